#include "gqn/text.hpp"

#include <charconv>
#include <system_error>

#include "gqn/errors.hpp"

namespace gqn {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw ParseError(what + ": '" + text + "' is not a number");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw ParseError(what + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

long long parse_i64(const std::string& text, const std::string& what) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw ParseError(what + ": '" + text + "' is not an integer");
  }
  return v;
}

}  // namespace gqn
