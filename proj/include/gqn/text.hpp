#pragma once

#include <cstdint>
#include <string>

namespace gqn {

// Shortest decimal that parses back to the identical 64-bit value.
std::string format_double(double v);

// Strict full-string parsers; ParseError mentions `what` on failure.
double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
long long parse_i64(const std::string& text, const std::string& what);

}  // namespace gqn
