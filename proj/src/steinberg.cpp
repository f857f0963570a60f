#include "dsp/steinberg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

namespace dsp {

const Placement* GeomPacking::find(const std::string& id) const {
    for (size_t k = 0; k < items.size(); ++k)
        if (items[k].id == id) return &at[k];
    return nullptr;
}

namespace {

struct Box {
    Scalar x, y, w, h;
};

struct Stats {
    Scalar area = 0, maxW = 0, maxH = 0;

    void add(const Item& it) {
        area += it.area();
        if (it.width > maxW) maxW = it.width;
        if (it.height > maxH) maxH = it.height;
    }
    Stats transposed() const { return {area, maxH, maxW}; }
};

Scalar correction(const Stats& s, const Scalar& u, const Scalar& v) {
    return positive_part(Scalar(2 * s.maxW - u)) * positive_part(Scalar(2 * s.maxH - v));
}

bool fits(const Stats& s, const Scalar& u, const Scalar& v) {
    if (s.area == 0) return true;
    if (s.maxW > u || s.maxH > v) return false;
    return 2 * s.area <= u * v - correction(s, u, v);
}

// Least box width at height v for which the area condition holds.
std::optional<Scalar> least_width(const Stats& s, const Scalar& v) {
    if (s.area == 0) return Scalar(0);
    if (s.maxH > v) return std::nullopt;
    if (s.area >= s.maxW * v) return Scalar(2 * s.area / v);
    Scalar c = positive_part(Scalar(2 * s.maxH - v));
    Scalar x = (2 * s.area + 2 * s.maxW * c) / (v + c);
    return max_of(x, s.maxW);
}

std::string fmt(const Box& b) {
    return to_string(b.w) + "x" + to_string(b.h) + "@(" + to_string(b.x) + "," + to_string(b.y) + ")";
}

class Packer {
public:
    Packer(const std::vector<Item>& items, long budget) : items_(items), at_(items.size()), budget_(budget) {}

    bool run(const Box& box) {
        std::vector<int> ids(items_.size());
        std::iota(ids.begin(), ids.end(), 0);
        return solve(ids, box, 0);
    }

    std::vector<Placement> placements() const { return at_; }
    std::vector<std::string> trace() const { return trace_; }

private:
    using Ids = std::vector<int>;

    const std::vector<Item>& items_;
    std::vector<Placement> at_;
    std::vector<std::string> trace_;
    long budget_;

    const Item& item(int k) const { return items_[k]; }

    Stats stats(const Ids& ids) const {
        Stats s;
        for (int k : ids) s.add(item(k));
        return s;
    }

    void note(int depth, const std::string& what) { trace_.push_back(std::string(2 * depth, ' ') + what); }

    // Runs `attempt`; on failure the trace is rolled back.
    bool tried(const std::function<bool()>& attempt) {
        size_t mark = trace_.size();
        if (attempt()) return true;
        trace_.resize(mark);
        return false;
    }

    bool solve(const Ids& ids, const Box& box, int depth) {
        if (ids.empty()) return true;
        if (ids.size() == 1) {
            const Item& it = item(ids[0]);
            if (it.width > box.w || it.height > box.h) return false;
            at_[ids[0]] = {box.x, box.y};
            note(depth, "place " + it.id + " in " + fmt(box));
            return true;
        }
        Stats s = stats(ids);
        if (fits(s, box.w, box.h) && budget_-- > 0) {
            if (tried([&] { return peel_widest(ids, s, box, depth); })) return true;
            if (tried([&] { return peel_tallest(ids, s, box, depth); })) return true;
            if (tried([&] { return shelf(ids, box, depth, false); })) return true;
            if (tried([&] { return shelf(ids, box, depth, true); })) return true;
            if (tried([&] { return split(ids, box, depth, false); })) return true;
            if (tried([&] { return split(ids, box, depth, true); })) return true;
        }
        return tried([&] { return maxrects_any(ids, box, depth); });
    }

    // Widest item along the bottom edge; the rest above it, optionally
    // some of them beside it.
    bool peel_widest(const Ids& ids, const Stats& s, const Box& box, int depth) {
        if (2 * s.maxW < box.w) return false;
        int pick = ids[0];
        for (int k : ids)
            if (item(k).width > item(pick).width ||
                (item(k).width == item(pick).width && item(k).height > item(pick).height))
                pick = k;
        const Item& it = item(pick);
        Ids rest;
        for (int k : ids)
            if (k != pick) rest.push_back(k);
        Box top{box.x, box.y + it.height, box.w, box.h - it.height};
        Box side{box.x + it.width, box.y, box.w - it.width, it.height};
        auto place = [&] {
            at_[pick] = {box.x, box.y};
            note(depth, "row " + it.id + " in " + fmt(box));
        };
        if (fits(stats(rest), top.w, top.h) &&
            tried([&] { place(); return solve(rest, top, depth + 1); }))
            return true;
        return beside(pick, rest, side, top, depth, place);
    }

    bool peel_tallest(const Ids& ids, const Stats& s, const Box& box, int depth) {
        if (2 * s.maxH < box.h) return false;
        int pick = ids[0];
        for (int k : ids)
            if (item(k).height > item(pick).height ||
                (item(k).height == item(pick).height && item(k).width > item(pick).width))
                pick = k;
        const Item& it = item(pick);
        Ids rest;
        for (int k : ids)
            if (k != pick) rest.push_back(k);
        Box right{box.x + it.width, box.y, box.w - it.width, box.h};
        Box above{box.x, box.y + it.height, it.width, box.h - it.height};
        auto place = [&] {
            at_[pick] = {box.x, box.y};
            note(depth, "column " + it.id + " in " + fmt(box));
        };
        if (fits(stats(rest), right.w, right.h) &&
            tried([&] { place(); return solve(rest, right, depth + 1); }))
            return true;
        return beside(pick, rest, above, right, depth, place);
    }

    // Moves items from the main region into a small pocket next to a
    // peeled item until the main region satisfies the area condition.
    bool beside(int, const Ids& rest, const Box& pocket, const Box& main, int depth,
                const std::function<void()>& place) {
        if (pocket.w <= 0 || pocket.h <= 0) return false;
        Ids cand;
        for (int k : rest)
            if (item(k).width <= pocket.w && item(k).height <= pocket.h) cand.push_back(k);
        if (cand.empty()) return false;
        std::stable_sort(cand.begin(), cand.end(),
                         [&](int a, int b) { return item(a).area() > item(b).area(); });
        Ids inPocket;
        Stats ps;
        for (int k : cand) {
            Stats trial = ps;
            trial.add(item(k));
            if (!fits(trial, pocket.w, pocket.h)) continue;
            ps = trial;
            inPocket.push_back(k);
            Ids outside;
            for (int q : rest)
                if (std::find(inPocket.begin(), inPocket.end(), q) == inPocket.end()) outside.push_back(q);
            if (!fits(stats(outside), main.w, main.h)) continue;
            if (tried([&] {
                    place();
                    return solve(inPocket, pocket, depth + 1) && solve(outside, main, depth + 1);
                }))
                return true;
        }
        return false;
    }

    // A shelf of the tallest items along the bottom, or a column of the
    // widest items along the left edge when `vertical`.
    bool shelf(const Ids& ids, const Box& box, int depth, bool vertical) {
        auto len = [&](int k) { return vertical ? item(k).height : item(k).width; };
        auto thick = [&](int k) { return vertical ? item(k).width : item(k).height; };
        Scalar span = vertical ? box.h : box.w;
        Ids order = ids;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return thick(a) > thick(b); });
        Scalar depthOfShelf = thick(order[0]);
        Ids row, rest;
        Scalar used = 0;
        for (int k : order) {
            if (used + len(k) <= span) {
                row.push_back(k);
                used += len(k);
            } else {
                rest.push_back(k);
            }
        }
        if (row.size() < 2 || rest.empty()) return false;
        Box remaining = vertical ? Box{box.x + depthOfShelf, box.y, box.w - depthOfShelf, box.h}
                                 : Box{box.x, box.y + depthOfShelf, box.w, box.h - depthOfShelf};
        if (!fits(stats(rest), remaining.w, remaining.h)) return false;
        Scalar pos = vertical ? box.y : box.x;
        for (int k : row) {
            at_[k] = vertical ? Placement{box.x, pos} : Placement{pos, box.y};
            pos += len(k);
        }
        note(depth, std::string(vertical ? "column-shelf" : "shelf") + " of " + std::to_string(row.size()) +
                        " in " + fmt(box));
        return solve(rest, remaining, depth + 1);
    }

    // Two side-by-side boxes (or stacked when `horizontal`), each
    // satisfying the area condition on its own.
    bool split(const Ids& ids, const Box& box, int depth, bool horizontal) {
        const Scalar& across = horizontal ? box.h : box.w;
        const Scalar& along = horizontal ? box.w : box.h;
        auto keyed = [&](auto key) {
            Ids o = ids;
            std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return key(a) > key(b); });
            return o;
        };
        std::vector<Ids> orders = {
            keyed([&](int k) { return item(k).width; }),
            keyed([&](int k) { return item(k).height; }),
            keyed([&](int k) { return item(k).area(); }),
        };
        for (const Ids& o : orders) {
            const size_t n = o.size();
            std::vector<Stats> suffix(n + 1);
            for (size_t k = n; k-- > 0;) {
                suffix[k] = suffix[k + 1];
                suffix[k].add(item(o[k]));
            }
            Stats prefix;
            for (size_t k = 0; k + 1 < n; ++k) {
                prefix.add(item(o[k]));
                Stats p = horizontal ? prefix.transposed() : prefix;
                Stats q = horizontal ? suffix[k + 1].transposed() : suffix[k + 1];
                std::optional<Scalar> cut = least_width(p, along);
                if (!cut || *cut > across) continue;
                if (!fits(q, across - *cut, along)) continue;
                Ids first(o.begin(), o.begin() + k + 1), second(o.begin() + k + 1, o.end());
                Box a = horizontal ? Box{box.x, box.y, box.w, *cut} : Box{box.x, box.y, *cut, box.h};
                Box b = horizontal ? Box{box.x, box.y + *cut, box.w, box.h - *cut}
                                   : Box{box.x + *cut, box.y, box.w - *cut, box.h};
                if (tried([&] {
                        note(depth, std::string(horizontal ? "cut-y " : "cut-x ") + to_string(*cut) + " in " +
                                        fmt(box));
                        return solve(first, a, depth + 1) && solve(second, b, depth + 1);
                    }))
                    return true;
            }
        }
        return false;
    }

    struct Free {
        Scalar x, y, w, h;
    };

    bool maxrects(const Ids& order, const Box& box, bool bottomLeft) {
        std::vector<Free> free{{box.x, box.y, box.w, box.h}};
        for (int k : order) {
            const Item& it = item(k);
            int best = -1;
            Scalar k1, k2;
            for (size_t f = 0; f < free.size(); ++f) {
                const Free& r = free[f];
                if (it.width > r.w || it.height > r.h) continue;
                Scalar a, b;
                if (bottomLeft) {
                    a = r.y;
                    b = r.x;
                } else {
                    Scalar dw = r.w - it.width, dh = r.h - it.height;
                    a = min_of(dw, dh);
                    b = max_of(dw, dh);
                }
                if (best < 0 || a < k1 || (a == k1 && b < k2)) {
                    best = static_cast<int>(f);
                    k1 = a;
                    k2 = b;
                }
            }
            if (best < 0) return false;
            Scalar px = free[best].x, py = free[best].y;
            at_[k] = {px, py};
            Scalar qx = px + it.width, qy = py + it.height;
            std::vector<Free> next;
            for (const Free& r : free) {
                Scalar rx2 = r.x + r.w, ry2 = r.y + r.h;
                if (!(px < rx2 && r.x < qx && py < ry2 && r.y < qy)) {
                    next.push_back(r);
                    continue;
                }
                if (r.x < px) next.push_back({r.x, r.y, px - r.x, r.h});
                if (qx < rx2) next.push_back({qx, r.y, rx2 - qx, r.h});
                if (r.y < py) next.push_back({r.x, r.y, r.w, py - r.y});
                if (qy < ry2) next.push_back({r.x, qy, r.w, ry2 - qy});
            }
            std::vector<Free> kept;
            for (size_t i = 0; i < next.size(); ++i) {
                bool contained = false;
                for (size_t j = 0; j < next.size() && !contained; ++j) {
                    if (i == j) continue;
                    const Free& a = next[i];
                    const Free& b = next[j];
                    bool inside = a.x >= b.x && a.y >= b.y && a.x + a.w <= b.x + b.w && a.y + a.h <= b.y + b.h;
                    // identical rectangles: keep the first
                    bool same = a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
                    if (inside && (!same || j < i)) contained = true;
                }
                if (!contained) kept.push_back(next[i]);
            }
            free.swap(kept);
        }
        return true;
    }

    bool maxrects_any(const Ids& ids, const Box& box, int depth) {
        using Key = std::function<Scalar(int)>;
        std::vector<std::pair<const char*, Key>> keys = {
            {"height", [&](int k) { return item(k).height; }},
            {"width", [&](int k) { return item(k).width; }},
            {"area", [&](int k) { return item(k).area(); }},
            {"side", [&](int k) { return max_of(item(k).width, item(k).height); }},
        };
        for (const auto& [name, key] : keys) {
            Ids o = ids;
            std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return key(a) > key(b); });
            for (bool bl : {true, false}) {
                if (maxrects(o, box, bl)) {
                    note(depth, std::string("maxrects by ") + name + (bl ? " bottom-left" : " best-fit") + " of " +
                                    std::to_string(ids.size()) + " in " + fmt(box));
                    return true;
                }
            }
        }
        return false;
    }
};

}  // namespace

Scalar steinberg_width(const std::vector<Item>& items, const Scalar& H) {
    if (items.empty()) return 0;
    Stats s;
    for (const Item& it : items) s.add(it);
    return 2 * max_of(Scalar(s.area / H), s.maxW);
}

std::string steinberg_violation(const std::vector<Item>& items, const Scalar& W, const Scalar& H) {
    Stats s;
    for (const Item& it : items) {
        if (it.width <= 0 || it.height <= 0) return "item " + it.id + " has non-positive size";
        s.add(it);
    }
    if (items.empty()) return "";
    if (s.maxW > W) return "max width " + to_string(s.maxW) + " > W = " + to_string(W);
    if (s.maxH > H) return "max height " + to_string(s.maxH) + " > H = " + to_string(H);
    Scalar rhs = W * H - correction(s, W, H);
    if (2 * s.area > rhs)
        return "2*area = " + to_string(Scalar(2 * s.area)) + " > W*H - (2*wmax - W)+ * (2*hmax - H)+ = " +
               to_string(rhs);
    return "";
}

GeomPacking steinberg_pack_box(const std::vector<Item>& items, const Scalar& W, const Scalar& H) {
    GeomPacking g;
    g.boxWidth = items.empty() ? Scalar(0) : W;
    g.boxHeight = H;
    g.items = items;
    if (items.empty()) return g;
    std::string why = steinberg_violation(items, W, H);
    if (!why.empty()) throw SteinbergPreconditionError("Steinberg precondition failed: " + why);
    Packer packer(items, 4000);
    if (!packer.run({0, 0, W, H}))
        throw SteinbergInternalError("rectangle packer found no placement for " + std::to_string(items.size()) +
                                     " items in " + to_string(W) + "x" + to_string(H));
    g.at = packer.placements();
    g.trace = packer.trace();
    std::vector<std::string> bad = geom_violations(g);
    if (!bad.empty()) throw SteinbergInternalError("rectangle packer produced an invalid packing: " + bad.front());
    return g;
}

GeomPacking steinberg_pack(const std::vector<Item>& items, const Scalar& H) {
    for (const Item& it : items)
        if (it.height > H)
            throw SteinbergPreconditionError("Steinberg precondition failed: max height " + to_string(it.height) +
                                             " > H = " + to_string(H));
    return steinberg_pack_box(items, steinberg_width(items, H), H);
}

std::vector<std::string> geom_violations(const GeomPacking& g) {
    std::vector<std::string> out;
    if (g.at.size() != g.items.size()) {
        out.push_back("placement count differs from item count");
        return out;
    }
    for (size_t a = 0; a < g.items.size(); ++a) {
        const Item& it = g.items[a];
        const Placement& p = g.at[a];
        if (p.x < 0 || p.y < 0 || p.x + it.width > g.boxWidth || p.y + it.height > g.boxHeight)
            out.push_back("item " + it.id + " leaves the box");
        for (size_t b = a + 1; b < g.items.size(); ++b) {
            const Item& jt = g.items[b];
            const Placement& q = g.at[b];
            if (p.x < q.x + jt.width && q.x < p.x + it.width && p.y < q.y + jt.height && q.y < p.y + it.height)
                out.push_back("items " + it.id + " and " + jt.id + " overlap");
        }
    }
    return out;
}

}  // namespace dsp
