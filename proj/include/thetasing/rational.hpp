#pragma once

#include <string>

#include <gmpxx.h>

namespace thetasing {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "p/q" or a finite decimal such as "-1.25".
Rational parse_rational(const std::string& text);

/// "p/q", or "p" when q = 1.
std::string format_rational(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace thetasing
