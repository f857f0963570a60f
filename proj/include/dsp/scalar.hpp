#pragma once

#include <gmpxx.h>

#include <string>

namespace dsp {

// Exact rational; gmpxx keeps results of arithmetic canonical.
using Scalar = mpq_class;

Scalar rational(long num, long den = 1);

// "p/q", or a plain integer when the denominator is 1.
std::string to_string(const Scalar& x);

// Accepts "p/q", integers and finite decimals ("0.25").
Scalar parse_scalar(const std::string& text);

Scalar floor_of(const Scalar& x);
Scalar ceil_of(const Scalar& x);
inline Scalar positive_part(const Scalar& x) { return x > 0 ? x : Scalar(0); }
inline const Scalar& min_of(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
inline const Scalar& max_of(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
bool is_integer(const Scalar& x);
double to_double(const Scalar& x);

}  // namespace dsp
