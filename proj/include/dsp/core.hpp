#pragma once

#include "dsp/scalar.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dsp {

// Malformed instances, packings or parameters supplied by a caller.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Item {
    std::string id;
    Scalar width;   // processing time
    Scalar height;  // demand
    Scalar area() const { return width * height; }
};

struct Instance {
    Scalar deadline;
    std::vector<Item> items;

    // Items get ids "0", "1", ... in order.
    static Instance make(long deadline, const std::vector<std::pair<long, long>>& widthHeight);

    // Integer sizes, positive, width <= deadline, unique ids.
    void validate() const;
    Scalar area() const;
    Scalar max_height() const;
    Scalar max_width() const;
};
using InstancePtr = std::shared_ptr<const Instance>;

// Indices into Packing::item(); base items come first, extras after.
using ItemSet = std::vector<size_t>;

class Packing {
public:
    Packing() = default;
    explicit Packing(InstancePtr instance);

    const Instance& instance() const { return *instance_; }
    const InstancePtr& instance_ptr() const { return instance_; }
    const Scalar& deadline() const { return instance_->deadline; }

    size_t size() const { return start_.size(); }
    size_t base_size() const { return instance_->items.size(); }
    bool is_extra(size_t k) const { return k >= base_size(); }
    const Item& item(size_t k) const;
    const std::vector<Item>& extras() const { return extra_; }

    bool assigned(size_t k) const { return start_.at(k).has_value(); }
    const Scalar& start(size_t k) const;
    Scalar end(size_t k) const { return start(k) + item(k).width; }
    void set(size_t k, Scalar s) { start_.at(k) = std::move(s); }
    void unset(size_t k) { start_.at(k).reset(); }

    size_t add_extra(Item it);
    std::optional<size_t> find(const std::string& id) const;

    ItemSet all() const;
    ItemSet base_items() const;
    ItemSet assigned_items() const;
    // Every base item has a start (extras may be pending).
    bool complete() const;

private:
    InstancePtr instance_;
    std::vector<Item> extra_;
    std::vector<std::optional<Scalar>> start_;
};

struct Segment {
    Scalar l, r;
    Scalar width() const { return r - l; }
};

// Piecewise-constant height over [breaks.front(), breaks.back()); zero outside.
struct HeightProfile {
    std::vector<Scalar> breaks;  // strictly increasing, size = levels.size() + 1
    std::vector<Scalar> levels;

    Scalar peak() const;
    Scalar at(const Scalar& t) const;
    // Maximum level over [a, b); zero for an empty range.
    Scalar max_on(const Scalar& a, const Scalar& b) const;
    // Smallest t >= from with at(t) <= bound.
    Scalar first_at_most(const Scalar& from, const Scalar& bound) const;
};

// A weighted interval [start, start + width) for profiles of things that are not items.
struct Block {
    Scalar start, width, height;
};
// Covers [min(0, starts), max(D, ends)).
HeightProfile profile_from(const std::vector<Block>& blocks, const Scalar& D);

// All base items must be assigned; assigned extras are included.
HeightProfile profile(const Packing& p);
// Only the listed items; each must be assigned.
HeightProfile profile_of(const Packing& p, const ItemSet& items);
// Every assigned item, complete or not.
HeightProfile partial_profile(const Packing& p);
Scalar peak(const Packing& p);

struct Feasibility {
    bool ok = true;
    std::vector<std::string> violations;
};
Feasibility check_feasible(const Packing& p);

// max(area / D, tallest height); zero for the empty instance.
Scalar lower_bound(const Instance& inst);

// Non-increasing height, then ascending id.
ItemSet sorted_by_height(const Packing& p, ItemSet items);
// Places the items back to back from `from` in sorted_by_height order; returns the end.
Scalar pack_adjacent(Packing& p, const ItemSet& items, const Scalar& from);

// s -> W - s - w for every assigned item; W defaults to the deadline.
Packing mirror(const Packing& p, const std::optional<Scalar>& width = std::nullopt);

enum class GapClass { Narrow, Medium, Wide };

struct GapAnalysis {
    std::vector<Segment> gaps;        // maximal tall-free right-open segments of [0, D)
    std::vector<GapClass> classes;    // one per gap
    std::vector<Segment> tallBlocks;  // maximal tall-covered segments
    ItemSet tall;                     // assigned items with height > H/2
    Scalar tallWidth;
    Scalar earlyWidth, lateWidth, intermediateWidth;
};

// Narrow: width < lambda*D. Wide: width > (1/2 - 3 lambda) D. Medium otherwise.
// Early gaps end by (1/2 - 3 lambda) D, late gaps start from (1/2 + 3 lambda) D.
GapAnalysis gaps(const Packing& p, const Scalar& H, const Scalar& lambda = Scalar(0));

bool is_tall(const Item& it, const Scalar& H);
// width <= eps D / (1 + eps) and height <= H / 2
bool is_squeezable(const Item& it, const Scalar& D, const Scalar& eps, const Scalar& H);

Scalar total_width(const Packing& p, const ItemSet& items);
Scalar total_height(const Packing& p, const ItemSet& items);
Scalar total_area(const Packing& p, const ItemSet& items);

}  // namespace dsp
