#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "iontrap/types.hpp"

namespace iontrap {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view whole) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad angle literal '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

double parse_angle(std::string_view text) {
  const std::string_view whole = text;
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty angle literal");
  double sign = 1.0;
  if (s.front() == '-' || s.front() == '+') {
    sign = s.front() == '-' ? -1.0 : 1.0;
    s.remove_prefix(1);
  }
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) {
    return sign * parse_number(s, whole);
  }
  // [<coef>*]pi[/<div>]
  double coef = 1.0;
  if (pi_pos > 0) {
    std::string_view head = s.substr(0, pi_pos);
    if (head.back() != '*') throw ParseError("bad angle literal '" + std::string(whole) + "'");
    head.remove_suffix(1);
    coef = parse_number(head, whole);
  }
  std::string_view tail = s.substr(pi_pos + 2);
  double div = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw ParseError("bad angle literal '" + std::string(whole) + "'");
    tail.remove_prefix(1);
    div = parse_number(tail, whole);
    if (div == 0.0) throw ParseError("division by zero in angle '" + std::string(whole) + "'");
  }
  return sign * coef * kPi / div;
}

std::string format_angle(double radians) {
  if (radians == 0.0) return "0";
  const double ratio = kPi / std::fabs(radians);
  const double k = std::round(ratio);
  if (k >= 1.0 && k <= 1e9 && std::fabs(ratio - k) < 1e-9 * k) {
    const std::string sign = radians < 0 ? "-" : "";
    if (k == 1.0) return sign + "pi";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.0f", "pi/", k);
    return sign + buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", radians);
  return buf;
}

}  // namespace iontrap
