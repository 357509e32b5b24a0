#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace patricia {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// "3/4" or "1" — denominator printed only when it is not 1.
inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

}  // namespace patricia
