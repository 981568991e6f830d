#pragma once
// Exact integer substrate: every count, sum and valuation in this library is
// computed in arbitrary precision. Nat is nonnegative by convention.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace abaci {

using Nat = boost::multiprecision::cpp_int;
using Int = boost::multiprecision::cpp_int;

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Thrown when an enumeration or search exceeds its configured limit.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; line is 1-based.
struct parse_error : std::runtime_error {
    parse_error(const std::string& msg, std::size_t line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

inline Nat pow_nat(Nat base, u64 exp) {
    Nat r = 1;
    while (exp) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

inline u64 pow_u64(u64 base, u32 exp) {
    u64 r = 1;
    while (exp--) r *= base;
    return r;
}

}  // namespace abaci
