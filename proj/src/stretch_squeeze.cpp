#include "dsp/stretch_squeeze.hpp"

#include <algorithm>

namespace dsp {

namespace {

// Maximal segments of [lo, hi) not covered by any of the intervals.
std::vector<Segment> uncovered(std::vector<Segment> covered, const Scalar& lo, const Scalar& hi) {
    std::sort(covered.begin(), covered.end(), [](const Segment& a, const Segment& b) { return a.l < b.l; });
    std::vector<Segment> out;
    Scalar at = lo;
    for (const Segment& c : covered) {
        Scalar l = max_of(c.l, lo), r = min_of(c.r, hi);
        if (l >= r) continue;
        if (at < l) out.push_back({at, l});
        if (r > at) at = r;
    }
    if (at < hi) out.push_back({at, hi});
    return out;
}

bool id_less(const Packing& p, size_t a, size_t b) { return p.item(a).id < p.item(b).id; }

}  // namespace

StretchResult right_stretch(const Packing& p, const Scalar& H, const Scalar& windowStart, const Scalar& windowEnd) {
    Scalar h = partial_profile(p).peak();
    if (2 * H < h || H > h)
        throw InputError("stretch height " + to_string(H) + " outside [peak/2, peak] for peak " + to_string(h));
    if (windowEnd < windowStart) throw InputError("stretch window is reversed");

    std::vector<Segment> tallCover;
    for (size_t k : p.assigned_items())
        if (p.item(k).height > H) tallCover.push_back({p.start(k), p.end(k)});
    std::vector<Segment> free = uncovered(tallCover, windowStart, windowEnd);

    StretchResult res{Packing(p.instance_ptr()), {}, {}, Scalar(0)};
    for (const Segment& g : free) res.shift += g.width();
    for (size_t k : p.assigned_items()) {
        if (p.item(k).height > H) continue;
        const Scalar& s = p.start(k);
        Scalar e = p.end(k);
        if (!(s <= windowEnd && e > windowStart)) continue;
        bool inside = std::any_of(free.begin(), free.end(), [&](const Segment& g) { return g.l <= s && e <= g.r; });
        if (inside) {
            res.removed.push_back(k);
            continue;
        }
        Scalar moved = s;
        for (const Segment& g : free)
            if (s >= g.l) moved += g.width();
        res.repacked.set(k, moved);
        res.kept.push_back(k);
    }
    return res;
}

StretchResult left_stretch(const Packing& p, const Scalar& H, const Scalar& windowEnd, const Scalar& windowStart) {
    const Scalar& D = p.deadline();
    StretchResult r = right_stretch(mirror(p), H, D - windowEnd, D - windowStart);
    r.repacked = mirror(r.repacked);
    return r;
}

std::vector<std::string> stretch_violations(const Packing& before, const Scalar& H, const StretchResult& r,
                                            bool towardsRight) {
    std::vector<std::string> out;
    Scalar h = partial_profile(before).peak();
    Scalar after = partial_profile(r.repacked).peak();
    if (after > h - H) out.push_back("stretched peak " + to_string(after) + " exceeds " + to_string(Scalar(h - H)));
    Scalar removedArea = total_area(before, r.removed);
    if (removedArea > r.shift * h)
        out.push_back("removed area " + to_string(removedArea) + " exceeds shift * peak " +
                      to_string(Scalar(r.shift * h)));
    for (size_t k : r.kept) {
        Scalar delta = r.repacked.start(k) - before.start(k);
        if (!towardsRight) delta = -delta;
        if (delta < 0 || delta > r.shift) out.push_back("item " + before.item(k).id + " moved by " + to_string(delta));
    }
    for (size_t k : r.removed)
        if (before.item(k).width > r.shift) out.push_back("removed item " + before.item(k).id + " is wider than shift");
    return out;
}

std::vector<std::string> neat_violations(const Packing& p, const Scalar& H, const Scalar& eps) {
    std::vector<std::string> out;
    const Scalar& D = p.deadline();
    ItemSet tall;
    for (size_t k : p.assigned_items()) {
        if (p.start(k) < 0 || p.end(k) > D) out.push_back("item " + p.item(k).id + " outside [0, D]");
        if (is_tall(p.item(k), H)) tall.push_back(k);
    }
    std::sort(tall.begin(), tall.end(), [&](size_t a, size_t b) { return p.start(a) < p.start(b); });
    Scalar at = 0;
    for (size_t j = 0; j < tall.size(); ++j) {
        size_t k = tall[j];
        if (p.start(k) != at) {
            out.push_back("tall item " + p.item(k).id + " starts at " + to_string(p.start(k)) + ", expected " +
                          to_string(at));
            break;
        }
        if (j > 0 && p.item(k).height > p.item(tall[j - 1]).height) {
            out.push_back("tall items not in non-increasing height order at " + p.item(k).id);
            break;
        }
        at = p.end(k);
    }
    Scalar bound = (Scalar(3, 2) + eps) * H;
    Scalar pk = partial_profile(p).peak();
    if (pk > bound) out.push_back("peak " + to_string(pk) + " exceeds " + to_string(bound));
    return out;
}

SqueezeResult squeeze(const Packing& p, const Scalar& H, const Scalar& eps) {
    std::vector<std::string> bad = neat_violations(p, H, eps);
    if (!bad.empty()) throw InputError("input not neat: " + bad.front());
    const Scalar D = p.deadline();
    const Scalar level = (1 + eps) * H;
    const Scalar bound = (Scalar(3, 2) + eps) * H;

    SqueezeResult res{p, Scalar(0), 0};
    Packing& q = res.packing;
    while (true) {
        res.point = partial_profile(q).first_at_most(res.point, level);
        std::optional<size_t> pick;
        for (size_t k : q.assigned_items()) {
            if (is_tall(q.item(k), H) || q.start(k) <= res.point) continue;
            if (!pick || q.start(k) < q.start(*pick) || (q.start(k) == q.start(*pick) && id_less(q, k, *pick)))
                pick = k;
        }
        if (!pick) break;
        q.set(*pick, res.point);
        ++res.moves;
        if (partial_profile(q).peak() > bound)
            throw std::logic_error("squeeze raised the peak above (3/2 + eps) H");
    }

    HeightProfile prof = partial_profile(q);
    for (size_t j = 0; j + 1 < prof.levels.size(); ++j)
        if (prof.breaks[j + 1] > res.point && prof.levels[j + 1] > prof.levels[j])
            throw std::logic_error("squeezed profile increases after point");
    if (total_area(q, q.assigned_items()) <= H * D && res.point * (1 + eps) > D)
        throw std::logic_error("squeeze point beyond D / (1 + eps)");
    return res;
}

namespace {

void check_additions(const Packing& p, const Scalar& H, const Scalar& eps, const ItemSet& add) {
    Scalar area = total_area(p, p.assigned_items());
    for (size_t k : add) {
        if (k >= p.size() || p.assigned(k)) throw InputError("items to squeeze in must be unassigned");
        if (!is_squeezable(p.item(k), p.deadline(), eps, H))
            throw InputError("item " + p.item(k).id + " is not squeezable");
        area += p.item(k).area();
    }
    if (area > H * p.deadline()) throw InputError("H is below area / D");
}

void check_result(const Packing& p, const Scalar& H, const Scalar& eps) {
    std::vector<std::string> bad = neat_violations(p, H, eps);
    if (!bad.empty()) throw std::logic_error("squeezing broke neatness: " + bad.front());
}

}  // namespace

Packing iterated_squeeze(const Packing& p, const Scalar& H, const Scalar& eps, const ItemSet& add,
                         const std::function<void(const Packing&)>& onStep) {
    check_additions(p, H, eps, add);
    Packing q = p;
    for (size_t k : add) {
        SqueezeResult r = squeeze(q, H, eps);
        q = std::move(r.packing);
        if (onStep) onStep(q);
        q.set(k, r.point);
        if (onStep) onStep(q);
    }
    check_result(q, H, eps);
    return q;
}

Packing extended_squeeze(const Packing& p, const Scalar& H, const Scalar& eps, const ItemSet& add) {
    check_additions(p, H, eps, add);
    SqueezeResult r = squeeze(p, H, eps);
    Packing q = std::move(r.packing);
    Scalar point = r.point;
    const Scalar level = (1 + eps) * H;
    for (size_t k : add) {
        point = partial_profile(q).first_at_most(point, level);
        q.set(k, point);
    }
    check_result(q, H, eps);
    return q;
}

}  // namespace dsp
