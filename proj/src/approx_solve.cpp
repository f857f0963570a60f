#include "dsp/approx.hpp"
#include "dsp/oracle.hpp"
#include "dsp/params.hpp"
#include "dsp/steinberg.hpp"

#include <algorithm>

namespace dsp {

std::vector<std::string> split_violations(const Packing& blank, const Scalar& asideShare, const SplitResult& r,
                                          const std::optional<Scalar>& heightBound) {
    std::vector<std::string> out;
    if (r.main.size() != blank.size() || r.aside.size() != blank.size()) {
        out.push_back("split result does not carry the same items");
        return out;
    }
    const Scalar& D = blank.deadline();
    const Scalar narrow = asideShare * D;
    for (size_t k = 0; k < blank.size(); ++k) {
        const std::string& id = blank.item(k).id;
        bool m = r.main.assigned(k), a = r.aside.assigned(k);
        if (m == a) out.push_back("item " + id + (m ? " is in both parts" : " is in neither part"));
        if (m && (r.main.start(k) < 0 || r.main.end(k) > D)) out.push_back("item " + id + " outside [0, D]");
        if (a && (r.aside.start(k) < 0 || r.aside.end(k) > narrow))
            out.push_back("aside item " + id + " outside [0, " + to_string(narrow) + "]");
    }
    if (heightBound) {
        Scalar hm = partial_profile(r.main).peak(), ha = partial_profile(r.aside).peak();
        if (hm > *heightBound) out.push_back("main height " + to_string(hm) + " exceeds " + to_string(*heightBound));
        if (ha > *heightBound) out.push_back("aside height " + to_string(ha) + " exceeds " + to_string(*heightBound));
    }
    return out;
}

SplitResult greedy_split(const Packing& blank, const Scalar& asideShare) {
    const Scalar& D = blank.deadline();
    SplitResult r{blank, blank};
    ItemSet all = blank.all();

    ItemSet narrow;
    for (size_t k : blank.base_items())
        if (blank.item(k).width <= asideShare * D) narrow.push_back(k);
    std::sort(narrow.begin(), narrow.end(), [&](size_t a, size_t b) {
        const Item &x = blank.item(a), &y = blank.item(b);
        if (x.width != y.width) return x.width < y.width;
        return x.id < y.id;
    });
    Scalar used = 0;
    std::vector<bool> aside(blank.size(), false);
    for (size_t k : narrow) {
        if (used + blank.item(k).width > asideShare * D) break;
        r.aside.set(k, used);
        used += blank.item(k).width;
        aside[k] = true;
    }

    ItemSet rest;
    for (size_t k : all)
        if (!aside[k]) rest.push_back(k);
    std::sort(rest.begin(), rest.end(), [&](size_t a, size_t b) {
        const Item &x = blank.item(a), &y = blank.item(b);
        if (x.height != y.height) return x.height > y.height;
        if (x.width != y.width) return x.width > y.width;
        return x.id < y.id;
    });
    std::vector<Block> placed;
    for (size_t k : rest) {
        const Item& it = blank.item(k);
        const Scalar last = D - it.width;
        std::vector<Scalar> cand{Scalar(0), last};
        for (const Block& b : placed) {
            cand.push_back(b.start + b.width);
            cand.push_back(b.start - it.width);
        }
        HeightProfile prof = profile_from(placed, D);
        std::optional<Scalar> best, bestAt;
        for (const Scalar& s : cand) {
            if (s < 0 || s > last) continue;
            Scalar top = prof.max_on(s, s + it.width);
            if (!best || top < *best || (top == *best && s < *bestAt)) {
                best = top;
                bestAt = s;
            }
        }
        r.main.set(k, *bestAt);
        placed.push_back({*bestAt, it.width, it.height});
    }
    return r;
}

SplitResult exhaustive_split(const Packing& blank, const Scalar& asideShare, std::uint64_t maxVectors) {
    (void)asideShare;
    const Scalar& Ds = blank.deadline();
    if (!is_integer(Ds)) throw OracleRefusal("deadline is not an integer");
    const long D = Ds.get_num().get_si();
    ItemSet base = blank.base_items();
    std::uint64_t vectors = 1;
    for (size_t k : base) {
        if (!is_integer(blank.item(k).width)) throw OracleRefusal("item widths must be integers");
        vectors *= std::uint64_t(D - blank.item(k).width.get_num().get_si() + 1);
        if (vectors > maxVectors) throw OracleRefusal("too many start vectors for exhaustive split");
    }
    ItemSet extras;
    for (size_t k = blank.base_size(); k < blank.size(); ++k) extras.push_back(k);

    std::vector<Scalar> load(D, Scalar(0));
    std::vector<long> at(base.size(), 0), bestAt;
    std::vector<Scalar> bestExtra;
    std::optional<Scalar> best;

    // extras go, one after another, to the integer start that adds least
    auto finish = [&]() {
        std::vector<Scalar> l = load;
        std::vector<Scalar> ex;
        for (size_t e : extras) {
            const Item& it = blank.item(e);
            Scalar lastS = Ds - it.width;
            std::optional<Scalar> top;
            Scalar where = 0;
            std::vector<Scalar> cand;
            for (long t = 0; t < D; ++t)
                if (Scalar(t) <= lastS) cand.push_back(Scalar(t));
            cand.push_back(lastS);
            for (const Scalar& s : cand) {
                long a = floor_of(s).get_num().get_si();
                long b = ceil_of(Scalar(s + it.width)).get_num().get_si();
                Scalar m = 0;
                for (long c = a; c < b; ++c) m = max_of(m, l[c]);
                if (!top || m < *top) {
                    top = m;
                    where = s;
                }
            }
            long a = floor_of(where).get_num().get_si();
            long b = ceil_of(Scalar(where + it.width)).get_num().get_si();
            for (long c = a; c < b; ++c) l[c] += it.height;
            ex.push_back(where);
        }
        Scalar pk = 0;
        for (const Scalar& v : l) pk = max_of(pk, v);
        if (!best || pk < *best) {
            best = pk;
            bestAt = at;
            bestExtra = ex;
        }
    };

    auto dfs = [&](auto&& self, size_t j, const Scalar& curMax) -> void {
        if (best && curMax >= *best) return;
        if (j == base.size()) {
            finish();
            return;
        }
        const Item& it = blank.item(base[j]);
        long w = it.width.get_num().get_si();
        for (long s = 0; s + w <= D; ++s) {
            Scalar m = curMax;
            for (long c = s; c < s + w; ++c) {
                load[c] += it.height;
                m = max_of(m, load[c]);
            }
            at[j] = s;
            self(self, j + 1, m);
            for (long c = s; c < s + w; ++c) load[c] -= it.height;
        }
    };
    dfs(dfs, 0, Scalar(0));

    SplitResult r{blank, blank};
    for (size_t j = 0; j < base.size(); ++j) r.main.set(base[j], Scalar(bestAt[j]));
    for (size_t e = 0; e < extras.size(); ++e) r.main.set(extras[e], bestExtra[e]);
    return r;
}

Packing forgiving_solve(const InstancePtr& inst, const Scalar& inner, const Scalar& lambda, long c,
                        const SplitPacker& split) {
    Packing out(inst);
    if (inst->items.empty()) return out;
    const Scalar& D = inst->deadline;
    const Scalar HLB = lower_bound(*inst);
    const Scalar asideShare = min_of(Scalar(lambda / (12 + 12 * c)), inner);

    Packing blank(inst);
    size_t slot = blank.add_extra({"slot", lambda * D, HLB});
    SplitResult r = split(blank, asideShare);
    std::vector<std::string> bad = split_violations(blank, asideShare, r, (1 + c * asideShare) * 3 * HLB);
    if (!bad.empty()) throw SplitContractError("split packer broke its contract: " + bad.front());
    if (!r.main.assigned(slot)) throw SplitContractError("split packer put the slot aside");

    ItemSet aside;
    std::vector<Item> asideItems;
    for (size_t k : blank.base_items()) {
        if (r.main.assigned(k))
            out.set(k, r.main.start(k));
        else {
            aside.push_back(k);
            asideItems.push_back(blank.item(k));
        }
    }
    if (!aside.empty()) {
        GeomPacking g;
        try {
            g = steinberg_pack_box(asideItems, lambda * D, HLB);
        } catch (const SteinbergPreconditionError& e) {
            throw SplitContractError(std::string("aside items do not fit the slot: ") + e.what());
        }
        for (size_t j = 0; j < aside.size(); ++j) out.set(aside[j], r.main.start(slot) + g.at[j].x);
    }
    Feasibility f = check_feasible(out);
    if (!f.ok) throw std::logic_error("forgiving packing infeasible: " + f.violations.front());
    return out;
}

SolveResult solve(const InstancePtr& inst, const SolverConfig& config, const SplitPacker& split) {
    if (config.eps <= 0 || config.eps > 1) throw InputError("epsilon must lie in (0, 1]");
    if (config.c < 1) throw InputError("enumeration constant must be positive");
    inst->validate();

    SolveReport rep;
    rep.inner = inner_epsilon(config.eps, config.c);
    rep.lambda = algorithm_lambda(config.eps, config.c);
    if (inst->items.empty()) {
        rep.branch = "forgiving";
        return {Packing(inst), rep};
    }
    const Scalar& D = inst->deadline;
    const Scalar HLB = lower_bound(*inst);
    rep.lowerBound = HLB;

    Packing forgiving = forgiving_solve(inst, rep.inner, rep.lambda, config.c, split);
    rep.forgivingPeak = peak(forgiving);

    Packing fallback(inst);
    {
        GeomPacking g = steinberg_pack_box(inst->items, D, 2 * HLB);
        for (size_t k = 0; k < inst->items.size(); ++k) fallback.set(k, g.at[k].x);
    }
    rep.fallbackPeak = peak(fallback);

    std::optional<Packing> neat;
    if (rep.forgivingPeak > (Scalar(3, 2) + config.eps) * HLB) {
        NeatAccuracy acc = NeatAccuracy::make(rep.inner, config.eps / 2);
        EnumLimits lim{config.enumCap, config.parallelism};
        Scalar lo = HLB, hi = min_of(rep.forgivingPeak, Scalar(2 * HLB));
        const Scalar stop = config.eps / 4 * HLB;
        while (hi - lo > stop) {
            Scalar mid = (lo + hi) / 2;
            NeatResult nr = enumerate_neat(inst, mid, acc, lim);
            rep.probes.push_back({mid, nr.status, nr.configurations});
            rep.configurations += nr.configurations;
            if (nr.status == NeatStatus::BudgetExceeded) rep.budgetExceeded = true;
            if (nr.status == NeatStatus::Found) {
                hi = mid;
                neat = std::move(nr.packing);
            } else {
                lo = mid;
            }
        }
        if (neat) rep.neatPeak = peak(*neat);
    }

    const Packing* pick = &forgiving;
    rep.branch = "forgiving";
    if (neat && *rep.neatPeak < peak(*pick)) {
        pick = &*neat;
        rep.branch = "neat";
    }
    if (rep.fallbackPeak < peak(*pick)) {
        pick = &fallback;
        rep.branch = "fallback";
    }
    return {*pick, rep};
}

}  // namespace dsp
