#pragma once

#include "dsp/core.hpp"
#include "dsp/stretch_squeeze.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace dsp {

inline InstancePtr make_instance(long D, const std::vector<std::pair<long, long>>& wh) {
    return std::make_shared<const Instance>(Instance::make(D, wh));
}

inline InstancePtr random_instance(std::mt19937_64& rng, int maxItems, int maxD, int maxH) {
    std::uniform_int_distribution<int> dD(1, maxD), dn(1, maxItems), dh(1, maxH);
    int D = dD(rng);
    int n = dn(rng);
    std::vector<std::pair<long, long>> wh;
    std::uniform_int_distribution<int> dw(1, D);
    for (int k = 0; k < n; ++k) wh.emplace_back(dw(rng), dh(rng));
    return make_instance(D, wh);
}

inline Packing random_integer_packing(std::mt19937_64& rng, const InstancePtr& inst) {
    Packing p(inst);
    long D = inst->deadline.get_num().get_si();
    for (size_t k = 0; k < inst->items.size(); ++k) {
        long w = inst->items[k].width.get_num().get_si();
        std::uniform_int_distribution<long> ds(0, D - w);
        p.set(k, Scalar(ds(rng)));
    }
    return p;
}

inline Packing placed(long D, const std::vector<std::pair<long, long>>& wh, const std::vector<Scalar>& starts) {
    Packing p(make_instance(D, wh));
    for (size_t k = 0; k < starts.size(); ++k) p.set(k, starts[k]);
    return p;
}

// Peak evaluated on unit cells; exact for integer starts and widths.
inline Scalar unit_cell_peak(const Packing& p) {
    long D = p.deadline().get_num().get_si();
    Scalar best = 0;
    for (long t = 0; t < D; ++t) {
        Scalar s = 0;
        for (size_t k = 0; k < p.size(); ++k)
            if (p.assigned(k) && p.start(k) <= t && t < p.end(k)) s += p.item(k).height;
        if (s > best) best = s;
    }
    return best;
}

// Tall items back to back by height from 0, the rest at random integer
// starts; nullopt if no attempt comes out neat. Items in `skip` stay unassigned.
inline std::optional<Packing> random_neat(std::mt19937_64& rng, const InstancePtr& inst, const Scalar& H,
                                          const Scalar& eps, const ItemSet& skip = {}, int attempts = 40) {
    Packing base(inst);
    ItemSet tall, rest;
    for (size_t k = 0; k < inst->items.size(); ++k) {
        if (std::find(skip.begin(), skip.end(), k) != skip.end()) continue;
        (is_tall(inst->items[k], H) ? tall : rest).push_back(k);
    }
    if (total_width(base, tall) > inst->deadline) return std::nullopt;
    pack_adjacent(base, tall, 0);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        Packing p = base;
        for (size_t k : rest) {
            long w = inst->items[k].width.get_num().get_si();
            long D = inst->deadline.get_num().get_si();
            p.set(k, Scalar(std::uniform_int_distribution<long>(0, D - w)(rng)));
        }
        if (neat_violations(p, H, eps).empty()) return p;
    }
    return std::nullopt;
}

// One item of height `tall` to lift H_LB, the rest mostly flat.
inline InstancePtr flat_heavy(std::mt19937_64& rng, long tall) {
    int D = std::uniform_int_distribution<int>(2, 10)(rng);
    int n = std::uniform_int_distribution<int>(3, 7)(rng);
    std::uniform_int_distribution<int> dw(1, D);
    std::vector<std::pair<long, long>> wh{{dw(rng), tall}};
    for (int k = 1; k < n; ++k) {
        long h = k % 3 == 0 ? std::uniform_int_distribution<long>(1, tall)(rng)
                            : std::uniform_int_distribution<long>(1, 2)(rng);
        wh.emplace_back(dw(rng), h);
    }
    return make_instance(D, wh);
}

}  // namespace dsp
