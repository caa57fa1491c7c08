#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace ivd {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// "p", "-p", "p/q"
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

// Exact value of the double (every finite double is a dyadic rational).
Rational rational_from_double(double x);

// Best rational approximation with |x - p/q| <= tol and small q, via
// continued fractions.  Used to snap numerically-computed jet coefficients
// before exact series arithmetic.
Rational snap_rational(double x, double tol);

double to_double(const Rational& r);

}  // namespace ivd
