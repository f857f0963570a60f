#include "dsp/generate.hpp"

#include <random>

namespace dsp {

Shape parse_shape(const std::string& name) {
    if (name == "uniform") return Shape::Uniform;
    if (name == "tall-heavy") return Shape::TallHeavy;
    if (name == "two-gap") return Shape::TwoGap;
    if (name == "partition") return Shape::Partition;
    throw InputError("unknown shape '" + name + "' (uniform, tall-heavy, two-gap, partition)");
}

std::string to_string(Shape s) {
    switch (s) {
        case Shape::Uniform: return "uniform";
        case Shape::TallHeavy: return "tall-heavy";
        case Shape::TwoGap: return "two-gap";
        case Shape::Partition: return "partition";
    }
    return "?";
}

namespace {

// std::uniform_int_distribution is implementation-defined; this keeps files identical across toolchains.
long draw(std::mt19937_64& rng, long lo, long hi) {
    std::uint64_t span = std::uint64_t(hi - lo) + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    return lo + long(x % span);
}

Generated two_gap(const GenParams& g, std::mt19937_64& rng) {
    if (g.dmax < 3 || g.hmax < 2) throw InputError("two-gap needs dmax >= 3 and hmax >= 2");
    const long D = g.dmax, mid = (D - 1) / 2;
    std::vector<std::pair<long, long>> wh{{1, g.hmax}};
    std::vector<long> starts{mid};
    long used[2] = {0, 0};  // stacked height left and right of the tall item
    for (int k = 1; k < g.n; ++k) {
        int side = k % 2;
        long h = draw(rng, 1, g.hmax / 2);
        if (used[side] + h > g.hmax) side = 1 - side;
        if (used[side] + h > g.hmax) h = g.hmax - used[side];
        if (h <= 0) break;
        long w = draw(rng, 1, mid);
        used[side] += h;
        wh.emplace_back(w, h);
        starts.push_back(side == 0 ? 0 : D - w);
    }
    Generated out;
    out.instance = std::make_shared<const Instance>(Instance::make(D, wh));
    Packing p(out.instance);
    for (size_t k = 0; k < starts.size(); ++k) p.set(k, Scalar(starts[k]));
    out.witness = std::move(p);
    return out;
}

}  // namespace

Generated generate(const GenParams& g) {
    if (g.n < 0 || g.dmax < 1 || g.hmax < 1) throw InputError("n must be >= 0, dmax and hmax >= 1");
    std::mt19937_64 rng(g.seed);
    if (g.shape == Shape::TwoGap) return two_gap(g, rng);
    const long D = g.dmax;
    std::vector<std::pair<long, long>> wh;
    for (int k = 0; k < g.n; ++k) {
        long w = 1, h = 1;
        switch (g.shape) {
            case Shape::Uniform:
                w = draw(rng, 1, D);
                h = draw(rng, 1, g.hmax);
                break;
            case Shape::TallHeavy:
                if (k % 3 != 2) {
                    w = draw(rng, 1, std::max<long>(1, D / std::max(1, g.n)));
                    h = draw(rng, g.hmax / 2 + 1, g.hmax);
                } else {
                    w = draw(rng, 1, D);
                    h = draw(rng, 1, std::max<long>(1, g.hmax / 2));
                }
                break;
            case Shape::Partition:
                w = draw(rng, D / 2 + 1, D);
                h = draw(rng, 1, g.hmax);
                break;
            case Shape::TwoGap: break;
        }
        wh.emplace_back(w, h);
    }
    return {std::make_shared<const Instance>(Instance::make(D, wh)), std::nullopt};
}

}  // namespace dsp
