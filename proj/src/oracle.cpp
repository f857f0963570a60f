#include "dsp/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace dsp {

namespace {

struct Search {
    int D = 0;
    std::vector<int> width, height;    // in search order
    std::vector<bool> sameAsPrevious;  // identical to the preceding item
    std::vector<std::int64_t> suffixArea;
    std::vector<std::int64_t> level;   // per unit cell
    std::vector<int> start, bestStart;
    std::int64_t best = 0;
    std::int64_t areaBound = 0;
    std::uint64_t nodes = 0, nodeCap = 0;
    bool symmetry = true;

    std::int64_t window_max(int s, int w) const {
        std::int64_t m = 0;
        for (int t = s; t < s + w; ++t) m = std::max(m, level[t]);
        return m;
    }

    // Can the remaining items possibly fit strictly below `best`?
    bool hopeless(size_t j) const {
        std::int64_t cap = best - 1;
        std::int64_t room = 0;
        for (int t = 0; t < D; ++t) room += std::max<std::int64_t>(0, cap - level[t]);
        if (room < suffixArea[j]) return true;
        for (size_t q = j; q < width.size(); ++q) {
            std::int64_t lo = INT64_MAX;
            for (int s = 0; s + width[q] <= D && lo > cap; ++s)
                lo = std::min(lo, window_max(s, width[q]) + height[q]);
            if (lo > cap) return true;
        }
        return false;
    }

    void dfs(size_t j, std::int64_t current) {
        if (++nodes > nodeCap) throw OracleRefusal("oracle node cap exceeded");
        if (j == width.size()) {
            if (current < best) {
                best = current;
                bestStart = start;
            }
            return;
        }
        if (std::max(current, areaBound) >= best) return;
        if (hopeless(j)) return;
        int w = width[j];
        int lo = 0, hi = D - w;
        if (symmetry && j == 0) hi = (D - w) / 2;
        if (symmetry && sameAsPrevious[j]) lo = start[j - 1];
        for (int s = lo; s <= hi; ++s) {
            std::int64_t top = window_max(s, w) + height[j];
            std::int64_t next = std::max(current, top);
            if (next >= best) continue;
            for (int t = s; t < s + w; ++t) level[t] += height[j];
            start[j] = s;
            dfs(j + 1, next);
            for (int t = s; t < s + w; ++t) level[t] -= height[j];
            if (best <= std::max(current, areaBound)) return;
        }
    }
};

long to_long(const Scalar& x) { return x.get_num().get_si(); }

}  // namespace

OracleResult exact_opt(const InstancePtr& inst, const OracleLimits& limits) {
    inst->validate();
    const int n = static_cast<int>(inst->items.size());
    if (n > limits.maxItems) throw OracleRefusal("instance has more items than the oracle accepts");
    if (inst->deadline > limits.maxDeadline) throw OracleRefusal("deadline exceeds the oracle limit");

    OracleResult res{Scalar(0), Packing(inst), 0};
    if (n == 0) return res;

    Search S;
    S.D = static_cast<int>(to_long(inst->deadline));
    S.nodeCap = limits.nodeCap;
    S.symmetry = limits.symmetryPruning;
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const Item& x = inst->items[a];
        const Item& y = inst->items[b];
        if (x.area() != y.area()) return x.area() > y.area();
        if (x.width != y.width) return x.width > y.width;
        return x.id < y.id;
    });
    std::int64_t area = 0;
    for (size_t j = 0; j < order.size(); ++j) {
        const Item& it = inst->items[order[j]];
        S.width.push_back(static_cast<int>(to_long(it.width)));
        S.height.push_back(static_cast<int>(to_long(it.height)));
        S.sameAsPrevious.push_back(j > 0 && S.width[j] == S.width[j - 1] &&
                                   S.height[j] == S.height[j - 1]);
        area += static_cast<std::int64_t>(S.width[j]) * S.height[j];
    }
    S.suffixArea.assign(n + 1, 0);
    for (int j = n - 1; j >= 0; --j)
        S.suffixArea[j] = S.suffixArea[j + 1] + static_cast<std::int64_t>(S.width[j]) * S.height[j];
    S.areaBound = (area + S.D - 1) / S.D;
    S.level.assign(S.D, 0);
    S.start.assign(n, 0);

    // Greedy incumbent: each item where it raises the peak least, leftmost on ties.
    S.bestStart.assign(n, 0);
    std::int64_t peakSoFar = 0;
    for (int j = 0; j < n; ++j) {
        int bestS = 0;
        std::int64_t bestTop = INT64_MAX;
        for (int s = 0; s + S.width[j] <= S.D; ++s) {
            std::int64_t top = S.window_max(s, S.width[j]) + S.height[j];
            if (top < bestTop) {
                bestTop = top;
                bestS = s;
            }
        }
        S.bestStart[j] = bestS;
        for (int t = bestS; t < bestS + S.width[j]; ++t) S.level[t] += S.height[j];
        peakSoFar = std::max(peakSoFar, bestTop);
    }
    S.best = peakSoFar;
    std::fill(S.level.begin(), S.level.end(), 0);
    if (S.best > S.areaBound) S.dfs(0, 0);

    res.opt = Scalar(static_cast<long>(S.best));
    for (int j = 0; j < n; ++j) res.packing.set(order[j], Scalar(S.bestStart[j]));
    res.nodes = S.nodes;
    return res;
}

Scalar grid_opt(const Instance& inst) {
    inst.validate();
    const int D = static_cast<int>(to_long(inst.deadline));
    const size_t n = inst.items.size();
    if (n == 0) return 0;
    std::vector<int> w(n), h(n), s(n, 0);
    for (size_t k = 0; k < n; ++k) {
        w[k] = static_cast<int>(to_long(inst.items[k].width));
        h[k] = static_cast<int>(to_long(inst.items[k].height));
    }
    long best = -1;
    std::vector<long> cell(D);
    while (true) {
        std::fill(cell.begin(), cell.end(), 0);
        for (size_t k = 0; k < n; ++k)
            for (int t = s[k]; t < s[k] + w[k]; ++t) cell[t] += h[k];
        long pk = *std::max_element(cell.begin(), cell.end());
        if (best < 0 || pk < best) best = pk;
        size_t k = 0;
        while (k < n && s[k] == D - w[k]) s[k++] = 0;
        if (k == n) break;
        ++s[k];
    }
    return Scalar(best);
}

Packing floor_starts(const Packing& p) {
    Packing q = p;
    for (size_t k : p.assigned_items()) q.set(k, floor_of(p.start(k)));
    return q;
}

RatioReport verify_ratio(const Packing& p, const Scalar& eps, const OracleLimits& limits) {
    RatioReport r;
    Feasibility f = check_feasible(p);
    r.feasible = f.ok;
    r.violations = f.violations;
    r.bound = Scalar(3, 2) + eps;
    r.achieved = f.ok ? peak(p) : partial_profile(p).peak();
    // no packing beats the lower bound, so a feasible one meeting it is optimal
    const Scalar lb = lower_bound(p.instance());
    if (f.ok && r.achieved == lb) {
        r.opt = lb;
        r.optSource = "lower-bound";
    } else {
        r.opt = exact_opt(p.instance_ptr(), limits).opt;
        r.optSource = "oracle";
    }
    r.ratio = r.opt == 0 ? Scalar(1) : Scalar(r.achieved / r.opt);
    r.pass = r.feasible && r.achieved <= r.bound * r.opt;
    return r;
}

}  // namespace dsp
