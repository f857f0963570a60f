#pragma once

#include "dsp/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dsp {

struct StretchResult {
    Packing repacked;  // only the kept items are assigned
    ItemSet kept;
    ItemSet removed;   // items lying wholly inside a tall-free segment
    Scalar shift;      // total tall-free width inside the window
};

// Items taller than H are pinned; the others overlapping [windowStart, windowEnd]
// move right by the width of every tall-free segment starting at or before
// them. Requires peak/2 <= H <= peak.
StretchResult right_stretch(const Packing& p, const Scalar& H, const Scalar& windowStart, const Scalar& windowEnd);
StretchResult left_stretch(const Packing& p, const Scalar& H, const Scalar& windowEnd, const Scalar& windowStart);

// Checks the stretch guarantees against the input; empty when they hold.
std::vector<std::string> stretch_violations(const Packing& before, const Scalar& H, const StretchResult& r,
                                            bool towardsRight);

// Assigned items only. Tall (2h > H) items back to back from 0 by
// non-increasing height, nothing outside [0, D], peak <= (3/2 + eps) H.
std::vector<std::string> neat_violations(const Packing& p, const Scalar& H, const Scalar& eps);

struct SqueezeResult {
    Packing packing;
    Scalar point;  // from here on the profile stays at most (1 + eps) H
    size_t moves = 0;
};

SqueezeResult squeeze(const Packing& p, const Scalar& H, const Scalar& eps);

// `add` holds unassigned squeezable items; each goes in at the point the
// squeeze leaves free. iterated_squeeze reruns the squeeze per item,
// extended_squeeze runs it once and then only advances the insertion point.
// onStep sees the packing after every squeeze and after every insertion.
Packing iterated_squeeze(const Packing& p, const Scalar& H, const Scalar& eps, const ItemSet& add,
                         const std::function<void(const Packing&)>& onStep = {});
Packing extended_squeeze(const Packing& p, const Scalar& H, const Scalar& eps, const ItemSet& add);

}  // namespace dsp
