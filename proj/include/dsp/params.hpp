#pragma once

#include "dsp/scalar.hpp"

namespace dsp {

// Constant of the enumeration's running-time exponent; fixes the inner accuracy.
inline constexpr long kEnumerationConstant = 5;

// Accuracy used inside the solver for outer accuracy eps; always 1/m for an integer m.
Scalar inner_epsilon(const Scalar& eps, long c = kEnumerationConstant);
// Width of the extra item as a fraction of D, derived from inner_epsilon(eps).
Scalar algorithm_lambda(const Scalar& eps, long c = kEnumerationConstant);

}  // namespace dsp
