#pragma once

#include "dsp/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsp {

// Accuracies used by the neat-packing search.
struct NeatAccuracy {
    Scalar inner;   // rounding granularity; 1/inner must be an integer
    Scalar target;  // the produced packings are (target, H)-neat
    Scalar narrowShare;  // target / (1 + target): squeezable items have width <= narrowShare * D
    int groups = 0; // width classes (D/2^k, D/2^(k-1)] for k = 1..groups
    Scalar flatShare;    // inner^3 / groups: horizontal items have height <= flatShare * H_LB

    static NeatAccuracy make(const Scalar& inner, const Scalar& target);
    long slices() const;  // 1 / inner
};

enum class ItemClass { Tall, Squeezable, Horizontal, Large };

struct Classification {
    Scalar H, lowerBound;
    std::vector<ItemClass> cls;          // per base item
    std::vector<Scalar> roundedHeight;   // tall heights rounded up to multiples of inner * H_LB
    std::vector<int> group;              // width class of horizontal items, 0 otherwise
    ItemSet tall, squeezable, horizontal, large;
};

Classification classify(const Instance& inst, const Scalar& H, const NeatAccuracy& acc);

// A piece of an item lying in one slice of its group's stack.
struct SlicePart {
    size_t item;
    Scalar height;
    bool whole;  // the item lies entirely in this slice
};

struct HorizontalGroup {
    int k = 0;                  // widths in (D/2^k, D/2^(k-1)]
    ItemSet members;            // non-increasing width, then id
    Scalar total;               // summed height
    Scalar unit;                // inner * total, the height of every stand-in
    std::vector<Scalar> widths; // stand-in widths, one per slice, non-increasing
    std::vector<std::vector<SlicePart>> slices;
};

struct HorizontalRounding {
    std::vector<HorizontalGroup> groups;  // index g holds width class g + 1
};

HorizontalRounding round_horizontal(const Instance& inst, const Classification& cls, const NeatAccuracy& acc);

// x copies of the stand-in (group, level) starting at `start`.
struct Fraction {
    Scalar start, x;
    int group = 0;  // index into HorizontalRounding::groups
    int level = 0;
};

struct FractionalPacking {
    Packing integral;            // horizontal items stay unassigned
    std::vector<Scalar> height;  // height in use per base item (tall ones may be rounded)
    std::vector<Fraction> parts;
};

HeightProfile fractional_profile(const FractionalPacking& fp, const HorizontalRounding& hr);
Scalar fractional_peak(const FractionalPacking& fp, const HorizontalRounding& hr);
// Starts inside [0, D - w]; with `complete`, copies of every stand-in add up to exactly 1.
std::vector<std::string> fractional_violations(const FractionalPacking& fp, const HorizontalRounding& hr,
                                               bool complete);
// Sums the copies of equal (start, group, level) and drops empty ones; sorted by (group, level, start).
void merge_parts(std::vector<Fraction>& parts);

// Horizontal items become stand-in copies at their own starts; the first stand-in of
// each group is packed flat into a D x 4 inner H_LB strip. Unassigned items stay so.
FractionalPacking integral_to_fractional(const Packing& integral, const Classification& cls,
                                         const HorizontalRounding& hr, const NeatAccuracy& acc);

struct IntegralResult {
    Packing packing;
    ItemSet leftover;  // horizontal items that found no copy to ride on
};

// Throws InputError when a group uses more than (2^k - 1) / inner distinct starts.
IntegralResult fractional_to_integral(const FractionalPacking& fp, const Classification& cls,
                                      const HorizontalRounding& hr, const NeatAccuracy& acc);

struct ReduceResult {
    FractionalPacking roundedTall;  // input with tall heights rounded, nothing moved
    FractionalPacking regrouped;    // after the left shift and per-segment regrouping
    FractionalPacking reduced;      // copies at each (start, level) cut to multiples of flatShare * H_LB
    std::vector<std::vector<Fraction>> deficit;  // what the cut removed, per group
};

// Input: squeezable and horizontal items unassigned, tall items back to back from 0.
ReduceResult reduce_starting_times(const FractionalPacking& fp, const Classification& cls,
                                   const HorizontalRounding& hr, const NeatAccuracy& acc);

// Candidate starts for large items and stand-ins: tall stair steps extended by
// chains of large and stand-in widths, plus the points r D / 2^(k-1).
// Stops early (returning what it has) once more than `cap` points exist.
std::vector<Scalar> start_points(const Instance& inst, const Classification& cls, const HorizontalRounding& hr,
                                 const NeatAccuracy& acc, size_t cap = SIZE_MAX);

// Structural checks on a reduction; empty when all hold.
std::vector<std::string> reduce_violations(const FractionalPacking& input, const ReduceResult& r,
                                           const Classification& cls, const HorizontalRounding& hr,
                                           const NeatAccuracy& acc);

enum class NeatStatus { Found, NotFound, BudgetExceeded };
std::string to_string(NeatStatus s);

struct EnumLimits {
    std::uint64_t cap = 200'000;  // configurations examined per call
    int parallelism = 1;
};

struct NeatResult {
    NeatStatus status = NeatStatus::NotFound;
    std::optional<Packing> packing;
    std::uint64_t configurations = 0;
    size_t startPoints = 0;
};

// Searches for a (acc.target, H)-neat packing of every item. H must lie in [H_LB, 2 H_LB].
// The outcome does not depend on limits.parallelism.
NeatResult enumerate_neat(const InstancePtr& inst, const Scalar& H, const NeatAccuracy& acc,
                          const EnumLimits& limits = {});

// A split packer receives a packing with nothing assigned (the extra item included) and
// returns `main`, packing some items within [0, D], and `aside`, packing the others
// within [0, asideShare D]. Each item goes to exactly one of them.
struct SplitResult {
    Packing main;
    Packing aside;
};
using SplitPacker = std::function<SplitResult(const Packing& blank, const Scalar& asideShare)>;

struct SplitContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Empty when `r` honours the split contract; heights are checked against heightBound if given.
std::vector<std::string> split_violations(const Packing& blank, const Scalar& asideShare, const SplitResult& r,
                                          const std::optional<Scalar>& heightBound);

// Narrowest items (total width <= asideShare D) go aside side by side; the rest are placed
// tallest first where they raise the peak least.
SplitResult greedy_split(const Packing& blank, const Scalar& asideShare);
// Exhaustive over integer starts of base items; extras go where they add least.
// Nothing goes aside. Throws OracleRefusal beyond `maxVectors` start vectors.
SplitResult exhaustive_split(const Packing& blank, const Scalar& asideShare, std::uint64_t maxVectors = 5'000'000);

// Packs the instance plus a lambda D x H_LB slot with `split`, then moves the aside
// items into the slot. Returns a packing of the instance only.
Packing forgiving_solve(const InstancePtr& inst, const Scalar& inner, const Scalar& lambda, long c,
                        const SplitPacker& split);

struct SolverConfig {
    Scalar eps{1, 2};
    long c = 5;
    std::uint64_t enumCap = 200'000;
    int parallelism = 1;
};

struct Probe {
    Scalar H;
    NeatStatus status = NeatStatus::NotFound;
    std::uint64_t configurations = 0;
};

struct SolveReport {
    std::string branch;  // "forgiving", "neat" or "fallback"
    Scalar inner, lambda;
    Scalar lowerBound, forgivingPeak, fallbackPeak;
    std::optional<Scalar> neatPeak;
    std::vector<Probe> probes;
    std::uint64_t configurations = 0;
    bool budgetExceeded = false;
};

struct SolveResult {
    Packing packing;
    SolveReport report;
};

SolveResult solve(const InstancePtr& inst, const SolverConfig& config, const SplitPacker& split = greedy_split);

}  // namespace dsp
