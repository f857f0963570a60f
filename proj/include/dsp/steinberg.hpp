#pragma once

#include "dsp/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dsp {

struct Placement {
    Scalar x, y;
};

// Two-dimensional packing of items into a box. Items and placements are
// parallel and keep the caller's order.
struct GeomPacking {
    Scalar boxWidth, boxHeight;
    std::vector<Item> items;
    std::vector<Placement> at;
    std::vector<std::string> trace;

    const Placement* find(const std::string& id) const;
};

struct SteinbergPreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when the packer cannot place an input that satisfies the area
// condition. Distinct from a precondition failure on purpose.
struct SteinbergInternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Box width used by the single-argument form: 2 * max(area / H, widest).
Scalar steinberg_width(const std::vector<Item>& items, const Scalar& H);

// Empty string when the items provably fit in W x H; otherwise the violated inequality.
std::string steinberg_violation(const std::vector<Item>& items, const Scalar& W, const Scalar& H);

GeomPacking steinberg_pack(const std::vector<Item>& items, const Scalar& H);
GeomPacking steinberg_pack_box(const std::vector<Item>& items, const Scalar& W, const Scalar& H);

// Exact pairwise overlap and containment check.
std::vector<std::string> geom_violations(const GeomPacking& g);

}  // namespace dsp
