#pragma once

#include "dsp/core.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace dsp {

struct Params {
    Scalar eps;
    Scalar wideTallSlack;  // eps / (5 + 4 eps), the wide-tall threshold
    Scalar lambda;

    // lambda defaults to algorithm_lambda(eps).
    static Params make(const Scalar& eps, const std::optional<Scalar>& lambda = std::nullopt);
    // Throws InputError unless 0 < eps <= 1 and 0 < lambda <= min(eps / (3 (5 + 4 eps)), 1/60).
    void validate() const;
    Scalar lambda_width(const Scalar& D) const { return lambda * D; }
};

// A case body was handed a packing that does not meet its entry conditions.
struct CaseMisroute : std::logic_error {
    using std::logic_error::logic_error;
};
// A case body produced a packing that breaks its promised bound.
struct RestructureFailure : std::logic_error {
    using std::logic_error::logic_error;
};

enum class CaseLabel { NoTall, WideTall, MediumGap, FuseBorder, FuseCenter, OneWideGap, TwoWideGaps };
std::string to_string(CaseLabel c);

struct CaseContext {
    CaseLabel label = CaseLabel::NoTall;
    Scalar opt;             // height of the input packing
    bool mirrored = false;  // geometry below refers to the mirrored input
    std::string variant;    // sub-branch taken inside the case body
    // Gap endpoints and derived widths, keyed by role ("left", "right", "slack_left", ...).
    std::map<std::string, Scalar> geometry;
    // Named item partitions filled in by the case body.
    std::map<std::string, ItemSet> sets;

    const Scalar& at(const std::string& key) const;
    std::string trace() const;
};

enum class OutcomeKind { Neat, Forgiving };

struct RestructureOutcome {
    OutcomeKind kind = OutcomeKind::Neat;
    Packing packing;
    std::optional<size_t> extra;  // index of the inserted item in a forgiving packing
    CaseContext context;
    std::string caseTrace;
};

// Routes an optimal packing to exactly one case; its peak is taken as OPT.
CaseContext analyze_case(const Packing& opt, const Params& params);

// Packs `items` (none squeezable) when the tall ones fill at least (1 - wideTallSlack) D.
// Only `items` are assigned in the result.
Packing wide_tall_neat(const InstancePtr& inst, const Scalar& H, const Params& params, const ItemSet& items);

// Moves the items of `mountain`, in start order, to 0 until the peak would pass 3/2 H;
// that last item goes to `restart` instead, which must be at or after b or leave it
// clear of both the items at 0 and a. The items must all cover [a, b).
Packing mountain_repack(const Packing& p, const Scalar& H, const ItemSet& mountain, const Scalar& a, const Scalar& b,
                        const Scalar& restart);

// Tall items (all inside [0, l] or [r, D]) go back to back from 0; `shifted` moves
// right by (D - r) - slackRight * D; everything else stays.
Packing shift_over_tall(const Packing& p, const ItemSet& tall, const ItemSet& shifted, const Scalar& l,
                        const Scalar& r, const Scalar& slackRight);

// Case bodies. `opt` must already be in the frame described by ctx (mirrored if
// ctx.mirrored); neat bodies expect squeezable items to be unassigned.
enum class FuseVariant { Border, Center };
RestructureOutcome fuse_gaps(const Packing& opt, CaseContext ctx, const Params& params, FuseVariant variant);
RestructureOutcome medium_gap_forgiving(const Packing& opt, CaseContext ctx, const Params& params);
RestructureOutcome one_wide_gap_neat(const Packing& opt, CaseContext ctx, const Params& params);
RestructureOutcome two_wide_gaps_neat(const Packing& opt, CaseContext ctx, const Params& params);

// Full dispatcher; squeezable items are re-inserted into neat outcomes.
RestructureOutcome restructure(const Packing& opt, const Params& params);

// Empty when the outcome meets its bound for an input of height opt.
std::vector<std::string> outcome_violations(const RestructureOutcome& out, const Scalar& opt, const Params& params);

}  // namespace dsp
