#include "eluder/rational.hpp"

#include <array>
#include <cmath>

namespace eluder {

std::string rational_to_string(const Rational& r) {
  std::string out = numerator(r).str();
  if (denominator(r) != 1) {
    out += "/";
    out += denominator(r).str();
  }
  return out;
}

namespace {

Rational parse_decimal(const std::string& text) {
  // [sign] digits [. digits] [e exponent]
  std::string mantissa;
  long exponent = 0;
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    mantissa += text[i];
    any_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      mantissa += text[i];
      --exponent;
      any_digit = true;
    }
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_neg = text[i] == '-';
      ++i;
    }
    long e = 0;
    bool any_exp = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      e = e * 10 + (text[i] - '0');
      any_exp = true;
    }
    if (!any_exp) throw ConfigError("bad numeric literal: '" + text + "'");
    exponent += exp_neg ? -e : e;
  }
  if (!any_digit || i != text.size())
    throw ConfigError("bad numeric literal: '" + text + "'");

  BigInt num(mantissa.empty() ? "0" : mantissa);
  if (negative) num = -num;
  Rational value(num);
  if (exponent > 0) {
    BigInt scale = 1;
    for (long k = 0; k < exponent; ++k) scale *= 10;
    value *= Rational(scale);
  } else if (exponent < 0) {
    BigInt scale = 1;
    for (long k = 0; k < -exponent; ++k) scale *= 10;
    value /= Rational(scale);
  }
  return value;
}

}  // namespace

Rational rational_from_string(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string p = text.substr(0, slash);
    const std::string q = text.substr(slash + 1);
    if (p.empty() || q.empty()) throw ConfigError("bad rational literal: '" + text + "'");
    BigInt num(p), den(q);
    if (den == 0) throw ConfigError("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  return parse_decimal(text);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ConfigError("non-finite number in input");
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return parse_decimal(std::string(buf.data(), res.ptr));
}

}  // namespace eluder
