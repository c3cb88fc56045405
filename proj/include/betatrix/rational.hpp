#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace betatrix {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_decimal(const BigInt& v) { return v.str(); }

/// Exact rational value of a finite double.
inline Rational exact_rational(double v) { return Rational(v); }

inline double to_double(const Rational& r) { return static_cast<double>(r); }

} // namespace betatrix
