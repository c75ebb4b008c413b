#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <string>

#include "eluder/types.hpp"

namespace eluder {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Canonical text form: "p" for integers, "p/q" otherwise.
std::string rational_to_string(const Rational& r);

// Accepts "p/q", plain integers, and decimal strings like "-0.75".
Rational rational_from_string(const std::string& text);

// Converts through the shortest decimal representation that round-trips,
// so 0.7 becomes 7/10 rather than its binary expansion.
Rational rational_from_double(double x);

}  // namespace eluder
