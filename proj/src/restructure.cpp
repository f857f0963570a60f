#include "dsp/restructure.hpp"

#include "dsp/params.hpp"
#include "dsp/steinberg.hpp"
#include "dsp/stretch_squeeze.hpp"

#include <algorithm>
#include <functional>

namespace dsp {

Params Params::make(const Scalar& eps, const std::optional<Scalar>& lambda) {
    Params p;
    p.eps = eps;
    p.wideTallSlack = eps / (5 + 4 * eps);
    p.lambda = lambda ? *lambda : algorithm_lambda(eps);
    return p;
}

void Params::validate() const {
    if (eps <= 0 || eps > 1) throw InputError("epsilon must lie in (0, 1], got " + to_string(eps));
    Scalar cap = min_of(eps / (3 * (5 + 4 * eps)), Scalar(1, 60));
    if (lambda <= 0 || lambda > cap)
        throw InputError("lambda must lie in (0, " + to_string(cap) + "], got " + to_string(lambda));
}

std::string to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::NoTall: return "NoTall";
        case CaseLabel::WideTall: return "WideTall";
        case CaseLabel::MediumGap: return "MediumGap";
        case CaseLabel::FuseBorder: return "FuseBorder";
        case CaseLabel::FuseCenter: return "FuseCenter";
        case CaseLabel::OneWideGap: return "OneWideGap";
        case CaseLabel::TwoWideGaps: return "TwoWideGaps";
    }
    return "?";
}

const Scalar& CaseContext::at(const std::string& key) const {
    auto it = geometry.find(key);
    if (it == geometry.end()) throw CaseMisroute("case context lacks '" + key + "'");
    return it->second;
}

std::string CaseContext::trace() const {
    std::string s = to_string(label);
    if (!variant.empty()) s += "/" + variant;
    if (mirrored) s += " (mirrored)";
    return s;
}

namespace {

using Pred = std::function<bool(size_t)>;

ItemSet select(const Packing& p, const Pred& keep) {
    ItemSet out;
    for (size_t k : p.assigned_items())
        if (!p.is_extra(k) && keep(k)) out.push_back(k);
    return out;
}

bool contains(const ItemSet& s, size_t k) { return std::find(s.begin(), s.end(), k) != s.end(); }

ItemSet minus(const ItemSet& a, const ItemSet& b) {
    ItemSet out;
    for (size_t k : a)
        if (!contains(b, k)) out.push_back(k);
    return out;
}

bool crosses(const Packing& p, size_t k, const Scalar& t) { return p.start(k) < t && t < p.end(k); }
bool active(const Packing& p, size_t k, const Scalar& t) { return p.start(k) <= t && t < p.end(k); }
bool inside(const Packing& p, size_t k, const Scalar& a, const Scalar& b) { return a <= p.start(k) && p.end(k) <= b; }
bool covers(const Packing& p, size_t k, const Scalar& a, const Scalar& b) { return p.start(k) <= a && b <= p.end(k); }

// Width of [a, b) left uncovered by the given items.
Scalar uncovered_width(const Packing& p, const ItemSet& items, const Scalar& a, const Scalar& b) {
    if (b <= a) return 0;
    std::vector<Segment> segs;
    for (size_t k : items) {
        Scalar l = max_of(p.start(k), a), r = min_of(p.end(k), b);
        if (l < r) segs.push_back({l, r});
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.l < y.l; });
    Scalar covered = 0, at = a;
    for (const Segment& s : segs) {
        Scalar l = max_of(s.l, at);
        if (s.r > l) {
            covered += s.r - l;
            at = s.r;
        }
    }
    return (b - a) - covered;
}

Scalar stretched_start(const StretchResult& r, const Packing& before, size_t k) {
    if (contains(r.removed, k)) throw RestructureFailure("stretching dropped item " + before.item(k).id);
    return r.repacked.assigned(k) ? r.repacked.start(k) : before.start(k);
}

void place_steinberg(Packing& p, const ItemSet& items, const Scalar& H, const Scalar& offset) {
    if (items.empty()) return;
    std::vector<Item> boxes;
    for (size_t k : items) boxes.push_back(p.item(k));
    GeomPacking g = steinberg_pack(boxes, H);
    for (size_t j = 0; j < items.size(); ++j) p.set(items[j], g.at[j].x + offset);
}

// Tall items of `group` keep their relative order and close up from `from`.
void close_up(Packing& q, const Packing& before, ItemSet group, const Scalar& from) {
    std::sort(group.begin(), group.end(), [&](size_t a, size_t b) { return before.start(a) < before.start(b); });
    Scalar at = from;
    for (size_t k : group) {
        q.set(k, at);
        at += q.item(k).width;
    }
}

void require_partition(const CaseContext& ctx, const std::vector<std::string>& names, const ItemSet& universe,
                       const Packing& p) {
    for (size_t k : universe) {
        int hits = 0;
        for (const std::string& n : names) hits += contains(ctx.sets.at(n), k) ? 1 : 0;
        if (hits != 1)
            throw CaseMisroute(ctx.trace() + ": item " + p.item(k).id + " lies in " + std::to_string(hits) +
                               " of the case's item groups");
    }
    for (const std::string& n : names)
        for (size_t k : ctx.sets.at(n))
            if (!contains(universe, k))
                throw CaseMisroute(ctx.trace() + ": group " + n + " holds foreign item " + p.item(k).id);
}

RestructureOutcome forgiving(Packing q, CaseContext ctx, const Params& params, const Scalar& at) {
    RestructureOutcome out;
    out.kind = OutcomeKind::Forgiving;
    size_t k = q.add_extra({"i_lambda", params.lambda_width(q.deadline()), ctx.opt});
    q.set(k, at);
    out.packing = std::move(q);
    out.extra = k;
    out.caseTrace = to_string(ctx.label);
    out.context = std::move(ctx);
    std::vector<std::string> bad = outcome_violations(out, out.context.opt, params);
    if (!bad.empty()) throw RestructureFailure(out.context.trace() + ": " + bad.front());
    return out;
}

// Neat case bodies leave squeezable items out; everything else must be placed.
RestructureOutcome neat_without_squeezables(Packing q, CaseContext ctx, const Params& params, const Scalar& bound,
                                            const ItemSet& expected) {
    for (size_t k : expected)
        if (!q.assigned(k)) throw RestructureFailure(ctx.trace() + ": item " + q.item(k).id + " left unplaced");
    std::vector<std::string> bad = neat_violations(q, ctx.opt, params.eps);
    Scalar pk = partial_profile(q).peak();
    if (pk > bound) bad.push_back("peak " + to_string(pk) + " exceeds " + to_string(bound));
    if (!bad.empty()) throw RestructureFailure(ctx.trace() + ": " + bad.front());
    RestructureOutcome out;
    out.kind = OutcomeKind::Neat;
    out.packing = std::move(q);
    out.caseTrace = to_string(ctx.label);
    out.context = std::move(ctx);
    return out;
}

ItemSet squeezables(const Packing& p, const Scalar& H, const Scalar& eps) {
    ItemSet out;
    for (size_t k : p.base_items())
        if (is_squeezable(p.item(k), p.deadline(), eps, H)) out.push_back(k);
    return out;
}

// Copy of `p` with the squeezable items unassigned.
Packing drop(const Packing& p, const ItemSet& items) {
    Packing q = p;
    for (size_t k : items) q.unset(k);
    return q;
}

// Smallest start in [0, limit] where an item of the given size stays under `bound`.
Scalar leftmost_fit(const Packing& p, const Scalar& w, const Scalar& h, const Scalar& bound, const Scalar& limit) {
    HeightProfile prof = partial_profile(p);
    std::vector<Scalar> cand{Scalar(0)};
    for (const Scalar& b : prof.breaks)
        if (b <= limit) cand.push_back(b);
    std::sort(cand.begin(), cand.end());
    for (const Scalar& c : cand)
        if (c + w <= p.deadline() && prof.max_on(c, c + w) + h <= bound) return c;
    return limit;
}

}  // namespace

CaseContext analyze_case(const Packing& opt, const Params& params) {
    params.validate();
    if (!opt.complete()) throw InputError("optimal packing is incomplete");
    Feasibility f = check_feasible(opt);
    if (!f.ok) throw InputError("optimal packing is infeasible: " + f.violations.front());

    CaseContext ctx;
    ctx.opt = peak(opt);
    const Scalar& D = opt.deadline();
    GapAnalysis g = gaps(opt, ctx.opt, params.lambda);
    if (g.tall.empty()) {
        ctx.label = CaseLabel::NoTall;
        return ctx;
    }
    if (g.tallWidth >= (1 - params.wideTallSlack) * D) {
        ctx.label = CaseLabel::WideTall;
        return ctx;
    }
    const Scalar lD = params.lambda_width(D);
    auto orient = [&](Scalar l, Scalar r, bool flip) {
        ctx.mirrored = flip;
        ctx.geometry["left"] = flip ? D - r : l;
        ctx.geometry["right"] = flip ? D - l : r;
    };

    for (size_t i = 0; i < g.gaps.size(); ++i)
        if (g.classes[i] == GapClass::Medium) {
            ctx.label = CaseLabel::MediumGap;
            const Segment& s = g.gaps[i];
            orient(s.l, s.r, D - s.r > s.l);
            return ctx;
        }

    const Scalar earlyEnd = (Scalar(1, 2) - 3 * params.lambda) * D;
    const Scalar lateStart = (Scalar(1, 2) + 3 * params.lambda) * D;
    if (g.earlyWidth >= lD || g.lateWidth >= lD) {
        bool fromLeft = g.earlyWidth >= lD;
        Scalar acc = 0;
        for (size_t j = 0; j < g.gaps.size(); ++j) {
            const Segment& s = g.gaps[fromLeft ? j : g.gaps.size() - 1 - j];
            if (fromLeft ? s.r > earlyEnd : s.l < lateStart) continue;
            acc += s.width();
            if (acc >= lD) {
                ctx.label = CaseLabel::FuseBorder;
                ctx.mirrored = !fromLeft;
                ctx.geometry["left"] = fromLeft ? s.r : D - s.l;
                ctx.geometry["fused_width"] = acc;
                return ctx;
            }
        }
    }

    {
        Scalar acc = 0;
        std::optional<Scalar> first;
        for (size_t i = 0; i < g.gaps.size(); ++i) {
            const Segment& s = g.gaps[i];
            if (g.classes[i] != GapClass::Narrow || s.r <= earlyEnd || s.l >= lateStart) continue;
            if (!first) first = s.l;
            acc += s.width();
            if (acc >= lD) {
                ctx.label = CaseLabel::FuseCenter;
                orient(*first, s.r, D - s.r > *first);
                ctx.geometry["fused_width"] = acc;
                return ctx;
            }
        }
    }

    std::vector<Segment> wide;
    for (size_t i = 0; i < g.gaps.size(); ++i)
        if (g.classes[i] == GapClass::Wide) wide.push_back(g.gaps[i]);
    if (wide.size() == 2) {
        ctx.label = CaseLabel::TwoWideGaps;
        Segment a = wide[0], b = wide[1];
        if (a.r + b.l < D) {
            ctx.mirrored = true;
            Segment na{D - b.r, D - b.l}, nb{D - a.r, D - a.l};
            a = na;
            b = nb;
        }
        ctx.geometry["first_left"] = a.l;
        ctx.geometry["first_right"] = a.r;
        ctx.geometry["second_left"] = b.l;
        ctx.geometry["second_right"] = b.r;
        return ctx;
    }
    if (wide.size() == 1) {
        ctx.label = CaseLabel::OneWideGap;
        const Segment& s = wide[0];
        orient(s.l, s.r, s.l > D - s.r);
        Scalar e = params.eps / (1 + params.eps);
        const Scalar& l = ctx.geometry["left"];
        const Scalar& r = ctx.geometry["right"];
        ctx.variant = l >= e * D ? "far-left-end" : 2 * r >= D ? "right-end-past-middle" : "right-end-before-middle";
        return ctx;
    }
    throw RestructureFailure("no case applies to the packing (" + std::to_string(wide.size()) + " wide gaps)");
}

Packing wide_tall_neat(const InstancePtr& inst, const Scalar& H, const Params& params, const ItemSet& items) {
    Packing p(inst);
    const Scalar& D = inst->deadline;
    const Scalar bound = (Scalar(3, 2) + params.eps) * H;
    const Scalar wideFrom = (Scalar(1, 2) + 2 * params.wideTallSlack) * D;

    ItemSet tall, medium, low;
    for (size_t k : items) {
        const Item& it = p.item(k);
        if (is_squeezable(it, D, params.eps, H)) throw CaseMisroute("wide-tall case got squeezable item " + it.id);
        if (is_tall(it, H))
            tall.push_back(k);
        else if (4 * it.height > H)
            medium.push_back(k);
        else
            low.push_back(k);
    }
    if (total_width(p, tall) < (1 - params.wideTallSlack) * D)
        throw CaseMisroute("tall items are narrower than (1 - eps') D");

    pack_adjacent(p, tall, 0);
    std::optional<size_t> special;
    ItemSet byHeight = sorted_by_height(p, medium);
    if (!byHeight.empty()) {
        special = byHeight[0];
        if (p.item(byHeight[0]).width > wideFrom)
            special = byHeight.size() > 1 ? std::optional<size_t>(byHeight[1]) : std::nullopt;
    }
    ItemSet rest = special ? minus(medium, {*special}) : medium;
    pack_adjacent(p, rest, 0);

    ItemSet wideLow;
    for (size_t k : low)
        if (p.item(k).width > wideFrom) wideLow.push_back(k);
    for (size_t k : wideLow) p.set(k, D - p.item(k).width);
    if (special) p.set(*special, D - p.item(*special).width);

    std::sort(wideLow.begin(), wideLow.end(), [&](size_t a, size_t b) {
        if (p.start(a) != p.start(b)) return p.start(a) < p.start(b);
        return p.item(a).id < p.item(b).id;
    });
    Scalar lastAbove = 0;
    for (size_t k : wideLow) {
        Scalar was = p.start(k);
        p.unset(k);
        p.set(k, leftmost_fit(p, p.item(k).width, p.item(k).height, bound, was));
        lastAbove = max_of(lastAbove, p.start(k));
    }

    ItemSet pending = sorted_by_height(p, minus(low, wideLow));
    while (!pending.empty()) {
        Scalar room = bound - partial_profile(p).at(lastAbove);
        auto fit = std::find_if(pending.begin(), pending.end(), [&](size_t k) { return p.item(k).height <= room; });
        if (fit != pending.end()) {
            p.set(*fit, lastAbove);
            pending.erase(fit);
            continue;
        }
        std::optional<Scalar> next;
        for (size_t k : p.assigned_items()) {
            Scalar e = p.end(k);
            if (e > lastAbove && (!next || e < *next)) next = e;
        }
        if (!next) throw RestructureFailure("wide-tall greedy ran past the last item end");
        lastAbove = *next;
    }

    std::vector<std::string> bad = neat_violations(p, H, params.eps);
    if (special && p.end(*special) != D) bad.push_back("special item does not end at D");
    if (!bad.empty()) throw RestructureFailure("WideTall: " + bad.front());
    return p;
}

Packing mountain_repack(const Packing& p, const Scalar& H, const ItemSet& mountain, const Scalar& a, const Scalar& b,
                        const Scalar& restart) {
    if (mountain.empty()) throw CaseMisroute("mountain: item set is empty");
    for (size_t k : mountain) {
        if (is_tall(p.item(k), H)) throw CaseMisroute("mountain: item " + p.item(k).id + " is tall");
        if (!covers(p, k, a, b))
            throw CaseMisroute("mountain: item " + p.item(k).id + " does not cover [" + to_string(a) + ", " +
                               to_string(b) + ")");
    }
    if (2 * total_height(p, mountain) < H) throw CaseMisroute("mountain: total height below H/2");

    ItemSet order = mountain;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        if (p.start(x) != p.start(y)) return p.start(x) < p.start(y);
        return p.item(x).id < p.item(y).id;
    });
    Packing q = p;
    const Scalar bound = Scalar(3, 2) * H;
    std::optional<size_t> last;
    for (size_t k : order) {
        q.set(k, 0);
        if (partial_profile(q).peak() > bound) {
            q.set(k, restart);
            last = k;
            break;
        }
    }
    if (last) {
        Scalar widest = 0;
        for (size_t k : mountain)
            if (k != *last) widest = max_of(widest, p.item(k).width);
        if (widest > a) throw CaseMisroute("mountain: an item moved to 0 is wider than " + to_string(a));
        const Scalar w = p.item(*last).width;
        // the last item may also land between the items at 0 and a
        bool after = b <= restart, before = widest <= restart && restart + w <= a;
        if (!after && !before)
            throw CaseMisroute("mountain: restart point " + to_string(restart) + " neither clears the items at 0 "
                               "before " + to_string(a) + " nor lies at or after " + to_string(b));
        if (restart + w > p.deadline()) throw CaseMisroute("mountain: last item would end after D");
    }
    return q;
}

Packing shift_over_tall(const Packing& p, const ItemSet& tall, const ItemSet& shifted, const Scalar& l,
                        const Scalar& r, const Scalar& slackRight) {
    const Scalar& D = p.deadline();
    for (size_t k : tall)
        if (!inside(p, k, 0, l) && !inside(p, k, r, D))
            throw CaseMisroute("shift over tall: tall item " + p.item(k).id + " is neither in [0, l] nor in [r, D]");
    Packing q = p;
    pack_adjacent(q, tall, 0);
    Scalar delta = (D - r) - slackRight * D;
    for (size_t k : shifted) q.set(k, p.start(k) + delta);
    return q;
}

RestructureOutcome medium_gap_forgiving(const Packing& opt, CaseContext ctx, const Params& params) {
    const Scalar& D = opt.deadline();
    const Scalar& H = ctx.opt;
    const Scalar& lam = params.lambda;
    const Scalar lD = lam * D;
    const Scalar l = ctx.at("left"), r = ctx.at("right");
    const Scalar eta = (r - l) / D;
    if (lam > Scalar(1, 50)) throw CaseMisroute("MediumGap needs lambda <= 1/50");
    if (eta < lam || eta > Scalar(1, 2) - 3 * lam) throw CaseMisroute("MediumGap: gap width out of range");
    if (D - r > l) throw CaseMisroute("MediumGap: expects D - r <= l");
    ItemSet tall = select(opt, [&](size_t k) { return is_tall(opt.item(k), H); });
    for (size_t k : tall)
        if (opt.start(k) < r && opt.end(k) > l) throw CaseMisroute("MediumGap: tall item inside the gap");

    ItemSet& crossLeft = ctx.sets["crossing_left"];
    ItemSet& crossRight = ctx.sets["crossing_right"];
    ItemSet& inGap = ctx.sets["in_gap"];
    crossLeft = select(opt, [&](size_t k) { return !is_tall(opt.item(k), H) && crosses(opt, k, l); });
    crossRight = select(opt, [&](size_t k) { return crosses(opt, k, r) && !contains(crossLeft, k); });
    inGap = select(opt, [&](size_t k) { return !is_tall(opt.item(k), H) && inside(opt, k, l, r + lD); });
    const Scalar midA = (Scalar(1, 2) + lam) * D, midB = (Scalar(1, 2) + 2 * lam) * D;
    ItemSet& midMountain = ctx.sets["middle_mountain"];
    ItemSet& rightMountain = ctx.sets["right_mountain"];
    for (size_t k : inGap) {
        if (covers(opt, k, midA, midB)) midMountain.push_back(k);
        if (covers(opt, k, r - 2 * lD, r - lD)) rightMountain.push_back(k);
    }
    ctx.geometry["eta"] = eta;

    Packing q = opt;
    Scalar at;
    if (2 * total_height(opt, midMountain) >= H) {
        ctx.variant = "mountain-middle";
        q = mountain_repack(opt, H, midMountain, midA, midB, midB);
        at = midA;
    } else if (2 * total_height(opt, rightMountain) >= H) {
        ctx.variant = "mountain-right";
        q = mountain_repack(opt, H, rightMountain, r - 2 * lD, r - lD, (eta + lam) * D);
        at = r - 2 * lD;
    } else {
        ctx.variant = "residual";
        for (size_t k : rightMountain) q.set(k, opt.start(k) - l);
        ItemSet& repacked = ctx.sets["near_right_end"];
        for (size_t k : inGap)
            if (inside(opt, k, r - 2 * lD, r + lD)) repacked.push_back(k);
        place_steinberg(q, repacked, H / 2, (eta + lam) * D);
        at = r - lD;
        ItemSet crossing = crossLeft;
        crossing.insert(crossing.end(), crossRight.begin(), crossRight.end());
        if (2 * profile_of(opt, crossing).max_on(r - 2 * lD, r - lD) > H) {
            ctx.variant = "overlap-shift";
            for (size_t k : select(opt, [&](size_t k) { return opt.start(k) >= r; })) q.set(k, opt.start(k) - lD);
            at = (1 - lam) * D;
        }
    }
    return forgiving(std::move(q), std::move(ctx), params, at);
}

RestructureOutcome fuse_gaps(const Packing& opt, CaseContext ctx, const Params& params, FuseVariant variant) {
    const Scalar& D = opt.deadline();
    const Scalar& H = ctx.opt;
    const Scalar& lam = params.lambda;
    const Scalar lD = lam * D;
    if (lam > Scalar(1, 60)) throw CaseMisroute("fusing gaps needs lambda <= 1/60");
    auto isTall = [&](size_t k) { return is_tall(opt.item(k), H); };
    ItemSet tall = select(opt, isTall);
    Packing q = opt;

    if (variant == FuseVariant::Border) {
        ctx.variant = "border";
        const Scalar l = ctx.at("left");
        if (l > (Scalar(1, 2) - lam) * D) throw CaseMisroute("FuseBorder: tall item starts after (1/2 - lambda) D");
        Scalar free = uncovered_width(opt, tall, 0, l);
        if (free < lD || free > 2 * lD) throw CaseMisroute("FuseBorder: gap width left of l not in [lD, 2 lD]");
        ItemSet& lowLeft = ctx.sets["low_left"];
        ItemSet& tallLeft = ctx.sets["tall_left"];
        lowLeft = select(opt, [&](size_t k) { return !isTall(k) && inside(opt, k, 0, l); });
        tallLeft = select(opt, [&](size_t k) { return isTall(k) && inside(opt, k, 0, l); });
        for (size_t k : tall)
            if (!contains(tallLeft, k) && opt.start(k) < l) throw CaseMisroute("FuseBorder: tall item crosses l");

        StretchResult st = left_stretch(opt, H / 2, l, 0);
        ItemSet& removed = ctx.sets["between_tall"];
        for (size_t k : st.removed)
            if (contains(lowLeft, k)) removed.push_back(k);
        for (size_t k : minus(lowLeft, removed)) q.set(k, stretched_start(st, opt, k) + D - l);
        place_steinberg(q, removed, H / 2, l >= 9 * lD ? Scalar(0) : l);
        close_up(q, opt, tallLeft, 0);
        return forgiving(std::move(q), std::move(ctx), params, l - lD);
    }

    ctx.variant = "center";
    const Scalar l = ctx.at("left"), r = ctx.at("right");
    const Scalar eta = (r - l) / D;
    Scalar free = uncovered_width(opt, tall, l, r);
    if (free < lD || free > 2 * lD) throw CaseMisroute("FuseCenter: fused width not in [lD, 2 lD]");
    if (eta > Scalar(1, 5) - 4 * lam) throw CaseMisroute("FuseCenter: span exceeds (1/5 - 4 lambda) D");
    if (D - r > l) throw CaseMisroute("FuseCenter: expects D - r <= l");
    if (r > (1 - lam) * D) throw CaseMisroute("FuseCenter: r exceeds (1 - lambda) D");
    ctx.geometry["eta"] = eta;

    ItemSet& lowInside = ctx.sets["low_inside"];
    ItemSet& tallInside = ctx.sets["tall_inside"];
    ItemSet& early = ctx.sets["starting_by_left"];
    ItemSet& late = ctx.sets["ending_after_right"];
    lowInside = select(opt, [&](size_t k) { return !isTall(k) && inside(opt, k, l, r); });
    tallInside = select(opt, [&](size_t k) { return isTall(k) && inside(opt, k, l, r); });
    for (size_t k : opt.base_items()) {
        if (contains(lowInside, k) || contains(tallInside, k)) continue;
        if (opt.start(k) <= l)
            early.push_back(k);
        else if (opt.end(k) > r)
            late.push_back(k);
        else
            throw CaseMisroute("FuseCenter: item " + opt.item(k).id + " is in no group");
    }

    StretchResult st = right_stretch(opt, H / 2, l, r);
    ItemSet& removed = ctx.sets["between_tall"];
    for (size_t k : st.removed)
        if (contains(lowInside, k)) removed.push_back(k);
    for (size_t k : minus(lowInside, removed)) q.set(k, stretched_start(st, opt, k) - l);
    place_steinberg(q, removed, H / 2, (eta + 2 * lam) * D);
    for (size_t k : late) q.set(k, opt.start(k) - eta * D);
    close_up(q, opt, tallInside, (1 - eta) * D);
    return forgiving(std::move(q), std::move(ctx), params, (1 - eta) * D + total_width(opt, tallInside));
}

RestructureOutcome one_wide_gap_neat(const Packing& opt, CaseContext ctx, const Params& params) {
    const Scalar& D = opt.deadline();
    const Scalar& H = ctx.opt;
    const Scalar& lam = params.lambda;
    const Scalar l = ctx.at("left"), r = ctx.at("right");
    const Scalar e = params.eps / (1 + params.eps);
    if (r - l <= (Scalar(1, 2) - 3 * lam) * D) throw CaseMisroute("OneWideGap: gap is not wide");
    if (l > D - r) throw CaseMisroute("OneWideGap: expects l <= D - r");

    ItemSet sq = squeezables(opt, H, params.eps);
    auto isTall = [&](size_t k) { return is_tall(opt.item(k), H); };
    ItemSet tall = select(opt, isTall);
    for (size_t k : tall)
        if (opt.start(k) < r && opt.end(k) > l) throw CaseMisroute("OneWideGap: tall item inside the gap");
    ItemSet low = select(opt, [&](size_t k) { return !isTall(k) && !contains(sq, k); });
    ItemSet kept = minus(opt.base_items(), sq);

    const Scalar slackL = uncovered_width(opt, tall, 0, l) / D;
    const Scalar slackR = uncovered_width(opt, tall, r, D) / D;
    ctx.geometry["slack_left"] = slackL;
    ctx.geometry["slack_right"] = slackR;
    const Scalar bound = Scalar(3, 2) * H;
    auto lowWhere = [&](const Pred& pr) {
        ItemSet out;
        for (size_t k : low)
            if (pr(k)) out.push_back(k);
        return out;
    };

    if (l >= e * D) {
        ctx.variant = "far-left-end";
        const Scalar cut = l + (slackL + slackR) * D;
        ItemSet& crossing = ctx.sets["crossing_right"];
        ItemSet& endingIn = ctx.sets["ending_in_gap"];
        ItemSet& leftOf = ctx.sets["left_of_gap"];
        ItemSet& rightOf = ctx.sets["right_of_gap"];
        crossing = lowWhere([&](size_t k) { return opt.start(k) < r && opt.end(k) > r + slackR * D; });
        leftOf = lowWhere([&](size_t k) { return opt.end(k) <= l; });
        endingIn = lowWhere([&](size_t k) { return opt.end(k) > l && opt.end(k) <= r + slackR * D; });
        rightOf = lowWhere([&](size_t k) { return opt.start(k) >= r; });
        require_partition(ctx, {"crossing_right", "ending_in_gap", "left_of_gap", "right_of_gap"}, low, opt);
        ItemSet& early = ctx.sets["crossing_right_early"];
        ItemSet& spanning = ctx.sets["crossing_right_spanning"];
        ItemSet& late = ctx.sets["crossing_right_late"];
        for (size_t k : crossing) {
            if (opt.start(k) >= cut)
                late.push_back(k);
            else if (opt.end(k) > (1 - slackL) * D)
                spanning.push_back(k);
            else
                early.push_back(k);
        }

        Packing q = drop(shift_over_tall(opt, tall, endingIn, l, r, slackR), sq);
        for (size_t k : early) q.set(k, opt.start(k) + slackL * D);
        for (size_t k : spanning) q.set(k, opt.start(k));
        for (size_t k : late) q.set(k, opt.start(k) - slackR * D);
        StretchResult right = right_stretch(opt, H / 2, r, D);
        for (size_t k : rightOf) q.set(k, stretched_start(right, opt, k) - slackR * D);

        ItemSet tallAndSpanning = tall;
        tallAndSpanning.insert(tallAndSpanning.end(), spanning.begin(), spanning.end());
        HeightProfile prof = profile_of(q, tallAndSpanning);
        Scalar lastAbove = 0;
        for (size_t j = 0; j < prof.levels.size(); ++j)
            if (prof.levels[j] > H) lastAbove = prof.breaks[j + 1];
        Scalar spanningThere = 0;
        for (size_t k : spanning)
            if (active(opt, k, lastAbove)) spanningThere += opt.item(k).height;
        const Scalar cap = min_of(lastAbove, l + slackL * D);
        const Scalar pinAbove = H - spanningThere;
        // last point of [0, cap] still under an item of height >= pinAbove
        Scalar pinnedEnd = 0;
        for (size_t k : kept)
            if (opt.item(k).height >= pinAbove && opt.start(k) <= cap)
                pinnedEnd = max_of(pinnedEnd, min_of(opt.end(k), cap));
        ctx.geometry["last_above_h"] = lastAbove;
        ctx.geometry["pinned_end"] = pinnedEnd;

        StretchResult leftAll = left_stretch(opt, H / 2, l, 0);
        StretchResult leftPinned = left_stretch(opt, pinAbove, pinnedEnd, 0);
        for (size_t k : leftOf) {
            if (opt.start(k) <= pinnedEnd)
                q.set(k, stretched_start(leftPinned, opt, k) + l + (1 + 2 * slackL) * D - r);
            else
                q.set(k, stretched_start(leftAll, opt, k) - pinnedEnd + slackL * D);
        }
        return neat_without_squeezables(std::move(q), std::move(ctx), params, bound, kept);
    }

    if (2 * r >= D) {
        ctx.variant = "right-end-past-middle";
        ItemSet& crossing = ctx.sets["crossing_right"];
        ItemSet& endingIn = ctx.sets["ending_in_gap"];
        ItemSet& rightOf = ctx.sets["right_of_gap"];
        crossing = lowWhere([&](size_t k) { return opt.start(k) < r && opt.end(k) > r + slackR * D; });
        endingIn = lowWhere([&](size_t k) { return opt.end(k) >= l && opt.end(k) <= r + slackR * D; });
        rightOf = lowWhere([&](size_t k) { return opt.start(k) >= r; });
        require_partition(ctx, {"crossing_right", "ending_in_gap", "right_of_gap"}, low, opt);

        Packing q = drop(shift_over_tall(opt, tall, endingIn, l, r, slackR), sq);
        StretchResult right = right_stretch(opt, H / 2, r, D);
        for (size_t k : rightOf) q.set(k, stretched_start(right, opt, k) - slackR * D);
        for (size_t k : crossing) q.set(k, 0);
        return neat_without_squeezables(std::move(q), std::move(ctx), params, bound, kept);
    }

    ctx.variant = "right-end-before-middle";
    ItemSet& crossingLeft = ctx.sets["crossing_left"];
    ItemSet& startingIn = ctx.sets["starting_in_gap"];
    ItemSet& rightOf = ctx.sets["right_of_gap"];
    crossingLeft = lowWhere([&](size_t k) { return opt.start(k) < l - slackL * D && opt.end(k) > l; });
    startingIn = lowWhere([&](size_t k) { return opt.start(k) >= l - slackL * D && opt.start(k) < r; });
    rightOf = lowWhere([&](size_t k) { return opt.start(k) >= r; });
    require_partition(ctx, {"crossing_left", "starting_in_gap", "right_of_gap"}, low, opt);

    const Scalar from = r + (e - slackR) * D;
    const Scalar slackFar = uncovered_width(opt, tall, from, D) / D;
    ctx.geometry["slack_far_right"] = slackFar;
    Packing q = drop(shift_over_tall(mirror(opt), tall, startingIn, D - r, D - l, slackL), sq);
    StretchResult right = right_stretch(opt, H / 2, from, D);
    for (size_t k : rightOf) q.set(k, stretched_start(right, opt, k) - slackFar * D);
    for (size_t k : crossingLeft) q.set(k, opt.start(k));
    return neat_without_squeezables(std::move(q), std::move(ctx), params, bound, kept);
}

RestructureOutcome two_wide_gaps_neat(const Packing& opt, CaseContext ctx, const Params& params) {
    const Scalar& D = opt.deadline();
    const Scalar& H = ctx.opt;
    const Scalar wideAbove = (Scalar(1, 2) - 3 * params.lambda) * D;
    const Scalar la = ctx.at("first_left"), ra = ctx.at("first_right");
    const Scalar lb = ctx.at("second_left"), rb = ctx.at("second_right");
    if (ra - la <= wideAbove || rb - lb <= wideAbove) throw CaseMisroute("TwoWideGaps: a gap is not wide");
    if (!(ra < lb)) throw CaseMisroute("TwoWideGaps: gaps out of order");
    if (ra + lb < D) throw CaseMisroute("TwoWideGaps: expects first_right + second_left >= D");

    ItemSet sq = squeezables(opt, H, params.eps);
    auto isTall = [&](size_t k) { return is_tall(opt.item(k), H); };
    ItemSet tall = select(opt, isTall);
    for (size_t k : tall)
        if ((opt.start(k) < ra && opt.end(k) > la) || (opt.start(k) < rb && opt.end(k) > lb))
            throw CaseMisroute("TwoWideGaps: tall item inside a gap");
    ItemSet low = select(opt, [&](size_t k) { return !isTall(k) && !contains(sq, k); });
    const Scalar between = (lb - ra) / D, after = (D - rb) / D;
    ctx.geometry["between_gaps"] = between;
    ctx.geometry["after_second"] = after;

    ItemSet& crossEnd = ctx.sets["crossing_second_right"];
    ItemSet& intoSecond = ctx.sets["ending_in_second"];
    ItemSet& inSecond = ctx.sets["inside_second"];
    ItemSet& leftPart = ctx.sets["left_part"];
    for (size_t k : low) {
        if (crosses(opt, k, rb)) crossEnd.push_back(k);
        if (opt.start(k) < lb && opt.end(k) > lb && opt.end(k) <= rb) intoSecond.push_back(k);
        if (inside(opt, k, lb, rb)) inSecond.push_back(k);
        if (opt.start(k) <= ra && opt.end(k) <= lb) leftPart.push_back(k);
    }
    require_partition(ctx, {"crossing_second_right", "ending_in_second", "inside_second", "left_part"}, low, opt);

    Packing q = drop(opt, sq);
    pack_adjacent(q, tall, 0);
    for (size_t k : crossEnd) q.set(k, D - opt.item(k).width);
    for (size_t k : intoSecond) q.set(k, 0);
    for (size_t k : inSecond) q.set(k, opt.start(k) + after * D);
    for (size_t k : leftPart) q.set(k, opt.start(k) + (between + after) * D);
    return neat_without_squeezables(std::move(q), std::move(ctx), params, Scalar(3, 2) * H,
                                    minus(opt.base_items(), sq));
}

RestructureOutcome restructure(const Packing& opt, const Params& params) {
    CaseContext ctx = analyze_case(opt, params);
    const Scalar H = ctx.opt;
    RestructureOutcome out;
    Packing framed = ctx.mirrored ? mirror(opt) : opt;

    switch (ctx.label) {
        case CaseLabel::NoTall:
            out.kind = OutcomeKind::Neat;
            out.packing = opt;
            out.caseTrace = to_string(ctx.label);
            out.context = std::move(ctx);
            break;
        case CaseLabel::MediumGap:
        case CaseLabel::FuseBorder:
        case CaseLabel::FuseCenter: {
            CaseLabel label = ctx.label;
            if (label == CaseLabel::MediumGap)
                out = medium_gap_forgiving(framed, std::move(ctx), params);
            else
                out = fuse_gaps(framed, std::move(ctx), params,
                                label == CaseLabel::FuseBorder ? FuseVariant::Border : FuseVariant::Center);
            if (out.context.mirrored) out.packing = mirror(out.packing);
            break;
        }
        case CaseLabel::WideTall:
        case CaseLabel::OneWideGap:
        case CaseLabel::TwoWideGaps: {
            ItemSet sq = squeezables(opt, H, params.eps);
            if (ctx.label == CaseLabel::WideTall) {
                out.kind = OutcomeKind::Neat;
                out.packing = wide_tall_neat(opt.instance_ptr(), H, params, minus(opt.base_items(), sq));
                out.caseTrace = to_string(ctx.label);
                out.context = std::move(ctx);
            } else if (ctx.label == CaseLabel::OneWideGap) {
                out = one_wide_gap_neat(framed, std::move(ctx), params);
            } else {
                out = two_wide_gaps_neat(framed, std::move(ctx), params);
            }
            out.packing = iterated_squeeze(out.packing, H, params.eps, sq);
            break;
        }
    }
    std::vector<std::string> bad = outcome_violations(out, H, params);
    if (!bad.empty()) throw RestructureFailure(out.context.trace() + ": " + bad.front());
    return out;
}

std::vector<std::string> outcome_violations(const RestructureOutcome& out, const Scalar& opt, const Params& params) {
    std::vector<std::string> bad;
    const Packing& p = out.packing;
    if (!p.complete()) {
        bad.push_back("not every item is packed");
        return bad;
    }
    Feasibility f = check_feasible(p);
    bad.insert(bad.end(), f.violations.begin(), f.violations.end());
    if (out.kind == OutcomeKind::Neat) {
        if (out.extra) bad.push_back("neat outcome carries an extra item");
        std::vector<std::string> n = neat_violations(p, opt, params.eps);
        bad.insert(bad.end(), n.begin(), n.end());
        return bad;
    }
    if (!out.extra || !p.assigned(*out.extra)) {
        bad.push_back("forgiving outcome lacks the placed extra item");
        return bad;
    }
    const Item& x = p.item(*out.extra);
    if (x.height != opt) bad.push_back("extra item height " + to_string(x.height) + " differs from OPT");
    if (x.width != params.lambda_width(p.deadline())) bad.push_back("extra item width differs from lambda D");
    Scalar pk = partial_profile(p).peak();
    if (2 * pk > 3 * opt) bad.push_back("peak " + to_string(pk) + " exceeds 3/2 OPT = " + to_string(Scalar(3 * opt / 2)));
    return bad;
}

}  // namespace dsp
