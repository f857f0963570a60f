#pragma once

#include "dsp/core.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace dsp {

enum class Shape { Uniform, TallHeavy, TwoGap, Partition };
Shape parse_shape(const std::string& name);  // throws InputError
std::string to_string(Shape s);

struct GenParams {
    int n = 6;
    long dmax = 10;  // the deadline
    long hmax = 8;
    std::uint64_t seed = 1;
    Shape shape = Shape::Uniform;
};

struct Generated {
    InstancePtr instance;
    // A packing of peak H_LB (hence optimal), for shapes that build one.
    std::optional<Packing> witness;
};

// Deterministic in the parameters. Uniform: sizes uniform in [1, D] x [1, hmax].
// TallHeavy: two thirds of the items taller than hmax / 2 and narrow. Partition:
// every width above D / 2. TwoGap: one width-1 item of height hmax in the middle,
// the rest at most hmax / 2 high and stacked into the two gaps beside it.
Generated generate(const GenParams& g);

}  // namespace dsp
