#pragma once

#include "dsp/core.hpp"

#include <string>

namespace dsp {

struct RenderSpec {
    int widthPx = 800;
    int heightPx = 400;
    int colorSeed = 0;
    bool showProfile = true;
    bool annotate = false;  // item ids inside their rectangles
};

// One rectangle per (item, stacking position); within each time segment items are
// stacked bottom-up by non-increasing height, then id. Unassigned items are skipped.
std::string render_svg(const Packing& p, const RenderSpec& spec = {});

}  // namespace dsp
