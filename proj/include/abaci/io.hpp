#pragma once
// File formats: the line-oriented sequence cache and OEIS b-files.

#include "abaci/nat.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace abaci::io {

// Sequence cache, one record per line: kind<TAB>params<TAB>n<TAB>decimal.
// Kind is one of W, Wstar, Domb, GenDomb, U. Concurrent readers, serialized
// writers.
class SequenceCache {
public:
    using Key = std::tuple<std::string, std::string, u64>;

    SequenceCache() = default;

    // Loads path when it exists; a missing file is a cold cache.
    explicit SequenceCache(const std::string& path) : path_(path) {
        std::ifstream in(path);
        if (!in) return;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string kind, params, n_str, value_str;
            if (!std::getline(ls, kind, '\t') || !std::getline(ls, params, '\t') ||
                !std::getline(ls, n_str, '\t') || !std::getline(ls, value_str))
                throw parse_error("malformed cache record", line_no);
            try {
                data_[{kind, params, std::stoull(n_str)}] = Int(value_str);
            } catch (const parse_error&) {
                throw;
            } catch (const std::exception&) {
                throw parse_error("malformed cache record", line_no);
            }
        }
    }

    std::optional<Int> lookup(const std::string& kind, const std::string& params, u64 n) const {
        std::shared_lock lock(mutex_);
        auto it = data_.find({kind, params, n});
        if (it == data_.end()) return std::nullopt;
        return it->second;
    }

    void store(const std::string& kind, const std::string& params, u64 n, const Int& value) {
        std::unique_lock lock(mutex_);
        data_[{kind, params, n}] = value;
    }

    void save(const std::string& path) const {
        std::shared_lock lock(mutex_);
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache file " + path);
        for (const auto& [key, value] : data_)
            out << std::get<0>(key) << '\t' << std::get<1>(key) << '\t' << std::get<2>(key)
                << '\t' << value.str() << '\n';
    }
    void save() const {
        if (path_.empty()) throw std::runtime_error("cache has no path");
        save(path_);
    }

    const std::string& path() const { return path_; }

    std::map<std::string, u64> counts_by_kind() const {
        std::shared_lock lock(mutex_);
        std::map<std::string, u64> c;
        for (const auto& [key, value] : data_) ++c[std::get<0>(key)];
        return c;
    }

    u64 size() const {
        std::shared_lock lock(mutex_);
        return data_.size();
    }

private:
    std::string path_;
    std::map<Key, Int> data_;
    mutable std::shared_mutex mutex_;
};

// OEIS b-file: `n value` per line, '#' comments allowed.
struct BFileEntry {
    i64 n;
    Int value;
};

inline std::vector<BFileEntry> read_bfile(std::istream& in) {
    std::vector<BFileEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream ls(line);
        i64 n;
        std::string value_str, extra;
        if (!(ls >> n >> value_str)) throw parse_error("malformed b-file line", line_no);
        if (ls >> extra) throw parse_error("trailing data on b-file line", line_no);
        for (std::size_t i = 0; i < value_str.size(); ++i) {
            char c = value_str[i];
            if (!(std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && c == '-')))
                throw parse_error("malformed b-file value", line_no);
        }
        entries.push_back({n, Int(value_str)});
    }
    return entries;
}

inline std::vector<BFileEntry> read_bfile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open b-file " + path);
    return read_bfile(in);
}

}  // namespace abaci::io
