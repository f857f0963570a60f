#include "dsp/params.hpp"

namespace dsp {

Scalar inner_epsilon(const Scalar& eps, long c) {
    Scalar a = eps / (2 * (3 * c + 1));
    Scalar b = eps / 15;
    // rounded down to 1/m so that the horizontal stacks split into whole slices
    Scalar m = 2 / min_of(a, b);
    return 1 / ceil_of(m);
}

Scalar algorithm_lambda(const Scalar& eps, long c) {
    Scalar e = inner_epsilon(eps, c);
    Scalar a = e / (3 * (5 + 4 * e));
    Scalar b = e / (13 * (1 + e));
    return min_of(min_of(a, b), Scalar(1, 80));
}

}  // namespace dsp
