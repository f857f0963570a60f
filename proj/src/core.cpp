#include "dsp/core.hpp"

#include <algorithm>
#include <set>

namespace dsp {

Instance Instance::make(long deadline, const std::vector<std::pair<long, long>>& widthHeight) {
    Instance inst;
    inst.deadline = deadline;
    for (size_t k = 0; k < widthHeight.size(); ++k)
        inst.items.push_back({std::to_string(k), Scalar(widthHeight[k].first),
                              Scalar(widthHeight[k].second)});
    return inst;
}

void Instance::validate() const {
    if (!is_integer(deadline) || deadline <= 0)
        throw InputError("deadline must be a positive integer");
    std::set<std::string> seen;
    for (const Item& it : items) {
        if (it.id.empty()) throw InputError("item with empty id");
        if (!seen.insert(it.id).second) throw InputError("duplicate item id '" + it.id + "'");
        if (!is_integer(it.width) || it.width < 1)
            throw InputError("item '" + it.id + "': width must be a positive integer");
        if (!is_integer(it.height) || it.height < 1)
            throw InputError("item '" + it.id + "': height must be a positive integer");
        if (it.width > deadline) throw InputError("item '" + it.id + "' is wider than the deadline");
    }
}

Scalar Instance::area() const {
    Scalar a = 0;
    for (const Item& it : items) a += it.area();
    return a;
}

Scalar Instance::max_height() const {
    Scalar m = 0;
    for (const Item& it : items) m = max_of(m, it.height);
    return m;
}

Scalar Instance::max_width() const {
    Scalar m = 0;
    for (const Item& it : items) m = max_of(m, it.width);
    return m;
}

Packing::Packing(InstancePtr instance)
    : instance_(std::move(instance)), start_(instance_->items.size()) {}

const Item& Packing::item(size_t k) const {
    if (k < base_size()) return instance_->items[k];
    return extra_.at(k - base_size());
}

const Scalar& Packing::start(size_t k) const {
    const auto& s = start_.at(k);
    if (!s) throw std::logic_error("item '" + item(k).id + "' has no start");
    return *s;
}

size_t Packing::add_extra(Item it) {
    extra_.push_back(std::move(it));
    start_.emplace_back();
    return start_.size() - 1;
}

std::optional<size_t> Packing::find(const std::string& id) const {
    for (size_t k = 0; k < size(); ++k)
        if (item(k).id == id) return k;
    return std::nullopt;
}

ItemSet Packing::all() const {
    ItemSet s(size());
    for (size_t k = 0; k < s.size(); ++k) s[k] = k;
    return s;
}

ItemSet Packing::base_items() const {
    ItemSet s(base_size());
    for (size_t k = 0; k < s.size(); ++k) s[k] = k;
    return s;
}

ItemSet Packing::assigned_items() const {
    ItemSet s;
    for (size_t k = 0; k < size(); ++k)
        if (assigned(k)) s.push_back(k);
    return s;
}

bool Packing::complete() const {
    for (size_t k = 0; k < base_size(); ++k)
        if (!assigned(k)) return false;
    return true;
}

// ---------------------------------------------------------------------------

Scalar HeightProfile::peak() const {
    Scalar m = 0;
    for (const Scalar& l : levels) m = max_of(m, l);
    return m;
}

Scalar HeightProfile::at(const Scalar& t) const {
    if (levels.empty() || t < breaks.front() || t >= breaks.back()) return 0;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    return levels[static_cast<size_t>(it - breaks.begin()) - 1];
}

Scalar HeightProfile::max_on(const Scalar& a, const Scalar& b) const {
    Scalar m = 0;
    if (!(a < b)) return m;
    for (size_t j = 0; j < levels.size(); ++j)
        if (breaks[j] < b && a < breaks[j + 1]) m = max_of(m, levels[j]);
    return m;
}

Scalar HeightProfile::first_at_most(const Scalar& from, const Scalar& bound) const {
    if (at(from) <= bound) return from;
    for (size_t j = 0; j < levels.size(); ++j)
        if (breaks[j] > from && levels[j] <= bound) return breaks[j];
    // Past the last breakpoint the height is zero.
    return breaks.back();
}

namespace {

HeightProfile build_profile(const Packing& p, const ItemSet& items) {
    std::vector<Block> blocks;
    blocks.reserve(items.size());
    for (size_t k : items) blocks.push_back({p.start(k), p.item(k).width, p.item(k).height});
    return profile_from(blocks, p.deadline());
}

}  // namespace

HeightProfile profile_from(const std::vector<Block>& blocks, const Scalar& D) {
    Scalar lo = 0, hi = D;
    std::vector<std::pair<Scalar, Scalar>> events;
    events.reserve(2 * blocks.size());
    for (const Block& b : blocks) {
        Scalar e = b.start + b.width;
        lo = min_of(lo, b.start);
        hi = max_of(hi, e);
        events.emplace_back(b.start, b.height);
        events.emplace_back(std::move(e), -b.height);
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    HeightProfile prof;
    prof.breaks.push_back(lo);
    Scalar level = 0;
    size_t e = 0;
    while (e < events.size() && events[e].first <= lo) level += events[e++].second;
    Scalar cursor = lo;
    while (cursor < hi) {
        Scalar next = e < events.size() ? events[e].first : hi;
        if (next > hi) next = hi;
        if (next > cursor) {
            if (!prof.levels.empty() && prof.levels.back() == level)
                prof.breaks.back() = next;
            else {
                prof.levels.push_back(level);
                prof.breaks.push_back(next);
            }
            cursor = next;
        }
        while (e < events.size() && events[e].first <= cursor) level += events[e++].second;
    }
    return prof;
}

HeightProfile profile(const Packing& p) {
    for (size_t k = 0; k < p.base_size(); ++k)
        if (!p.assigned(k)) throw InputError("incomplete packing: item '" + p.item(k).id + "' has no start");
    return build_profile(p, p.assigned_items());
}

HeightProfile profile_of(const Packing& p, const ItemSet& items) { return build_profile(p, items); }

HeightProfile partial_profile(const Packing& p) { return build_profile(p, p.assigned_items()); }

Scalar peak(const Packing& p) { return profile(p).peak(); }

Feasibility check_feasible(const Packing& p) {
    Feasibility f;
    for (size_t k = 0; k < p.size(); ++k) {
        const Item& it = p.item(k);
        if (!p.assigned(k)) {
            if (!p.is_extra(k)) {
                f.ok = false;
                f.violations.push_back("item '" + it.id + "' is not packed");
            }
            continue;
        }
        const Scalar& s = p.start(k);
        if (s < 0) {
            f.ok = false;
            f.violations.push_back("item '" + it.id + "' starts before 0 (at " + to_string(s) + ")");
        }
        if (s + it.width > p.deadline()) {
            f.ok = false;
            f.violations.push_back("item '" + it.id + "' ends after the deadline (at " +
                                   to_string(s + it.width) + ")");
        }
    }
    return f;
}

Scalar lower_bound(const Instance& inst) {
    if (inst.items.empty()) return 0;
    return max_of(inst.area() / inst.deadline, inst.max_height());
}

ItemSet sorted_by_height(const Packing& p, ItemSet items) {
    std::sort(items.begin(), items.end(), [&](size_t a, size_t b) {
        const Item& x = p.item(a);
        const Item& y = p.item(b);
        if (x.height != y.height) return x.height > y.height;
        return x.id < y.id;
    });
    return items;
}

Scalar pack_adjacent(Packing& p, const ItemSet& items, const Scalar& from) {
    Scalar cursor = from;
    for (size_t k : sorted_by_height(p, items)) {
        p.set(k, cursor);
        cursor += p.item(k).width;
    }
    return cursor;
}

Packing mirror(const Packing& p, const std::optional<Scalar>& width) {
    Scalar W = width ? *width : p.deadline();
    Packing q = p;
    for (size_t k = 0; k < p.size(); ++k)
        if (p.assigned(k)) q.set(k, W - p.start(k) - p.item(k).width);
    return q;
}

bool is_tall(const Item& it, const Scalar& H) { return 2 * it.height > H; }

bool is_squeezable(const Item& it, const Scalar& D, const Scalar& eps, const Scalar& H) {
    return it.width * (1 + eps) <= eps * D && 2 * it.height <= H;
}

GapAnalysis gaps(const Packing& p, const Scalar& H, const Scalar& lambda) {
    GapAnalysis g;
    const Scalar& D = p.deadline();
    std::vector<Segment> cover;
    g.tallWidth = 0;
    for (size_t k : p.assigned_items()) {
        if (!is_tall(p.item(k), H)) continue;
        g.tall.push_back(k);
        g.tallWidth += p.item(k).width;
        Scalar l = max_of(p.start(k), Scalar(0)), r = min_of(p.end(k), D);
        if (l < r) cover.push_back({l, r});
    }
    std::sort(cover.begin(), cover.end(), [](const Segment& a, const Segment& b) { return a.l < b.l; });
    for (const Segment& s : cover) {
        if (!g.tallBlocks.empty() && s.l <= g.tallBlocks.back().r)
            g.tallBlocks.back().r = max_of(g.tallBlocks.back().r, s.r);
        else
            g.tallBlocks.push_back(s);
    }
    Scalar cursor = 0;
    for (const Segment& b : g.tallBlocks) {
        if (cursor < b.l) g.gaps.push_back({cursor, b.l});
        cursor = b.r;
    }
    if (cursor < D) g.gaps.push_back({cursor, D});

    g.earlyWidth = g.lateWidth = g.intermediateWidth = 0;
    Scalar narrowBelow = lambda * D;
    Scalar wideAbove = (Scalar(1, 2) - 3 * lambda) * D;
    Scalar earlyEnd = (Scalar(1, 2) - 3 * lambda) * D;
    Scalar lateStart = (Scalar(1, 2) + 3 * lambda) * D;
    for (const Segment& s : g.gaps) {
        Scalar w = s.width();
        g.classes.push_back(w < narrowBelow ? GapClass::Narrow
                            : w > wideAbove ? GapClass::Wide
                                            : GapClass::Medium);
        if (s.r <= earlyEnd)
            g.earlyWidth += w;
        else if (s.l >= lateStart)
            g.lateWidth += w;
        else
            g.intermediateWidth += w;
    }
    return g;
}

Scalar total_width(const Packing& p, const ItemSet& items) {
    Scalar s = 0;
    for (size_t k : items) s += p.item(k).width;
    return s;
}

Scalar total_height(const Packing& p, const ItemSet& items) {
    Scalar s = 0;
    for (size_t k : items) s += p.item(k).height;
    return s;
}

Scalar total_area(const Packing& p, const ItemSet& items) {
    Scalar s = 0;
    for (size_t k : items) s += p.item(k).area();
    return s;
}

}  // namespace dsp
