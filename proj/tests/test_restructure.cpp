#include "dsp/oracle.hpp"
#include "dsp/params.hpp"
#include "dsp/restructure.hpp"
#include "dsp/stretch_squeeze.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace dsp;

namespace {

const Scalar kHalf(1, 2);

Params loose() { return Params::make(kHalf, Scalar(1, 80)); }

void expect_valid(const RestructureOutcome& out, const Packing& opt, const Params& params) {
    std::vector<std::string> bad = outcome_violations(out, peak(opt), params);
    EXPECT_TRUE(bad.empty()) << out.context.trace() << ": " << bad.front();
}

}  // namespace

TEST(Params, DefaultLambdaForHalf) {
    EXPECT_EQ(inner_epsilon(kHalf), Scalar(1, 128));
    Params p = Params::make(kHalf);
    EXPECT_EQ(p.wideTallSlack, Scalar(1, 14));
    EXPECT_EQ(p.lambda, algorithm_lambda(kHalf));
    EXPECT_LT(p.lambda, Scalar(1, 1900));
    EXPECT_NO_THROW(p.validate());
    EXPECT_THROW(Params::make(kHalf, Scalar(1, 50)).validate(), InputError);
}

TEST(AnalyzeCase, NoTallItems) {
    Packing p = placed(4, {{2, 1}, {2, 1}, {4, 1}}, {0, 2, 0});
    CaseContext c = analyze_case(p, Params::make(kHalf));
    EXPECT_EQ(c.label, CaseLabel::NoTall);
    RestructureOutcome out = restructure(p, Params::make(kHalf));
    EXPECT_EQ(out.kind, OutcomeKind::Neat);
    EXPECT_EQ(out.caseTrace, "NoTall");
}

TEST(AnalyzeCase, TallCoveringDeadlineIsWideTall) {
    Packing p = placed(4, {{4, 3}, {1, 1}}, {0, 2});
    EXPECT_EQ(analyze_case(p, Params::make(kHalf)).label, CaseLabel::WideTall);
    RestructureOutcome out = restructure(p, Params::make(kHalf));
    EXPECT_EQ(out.kind, OutcomeKind::Neat);
    expect_valid(out, p, Params::make(kHalf));
}

TEST(AnalyzeCase, ThirdOfDeadlineGapIsMedium) {
    // tall [0, 8), gap [8, 12) of width D/3
    Packing p = placed(12, {{8, 4}, {3, 2}}, {0, 8});
    CaseContext c = analyze_case(p, loose());
    EXPECT_EQ(c.label, CaseLabel::MediumGap);
    EXPECT_EQ(c.at("left"), 8);
    EXPECT_EQ(c.at("right"), 12);
    EXPECT_FALSE(c.mirrored);
    RestructureOutcome out = restructure(p, loose());
    EXPECT_EQ(out.kind, OutcomeKind::Forgiving);
    EXPECT_EQ(out.context.variant, "residual");
    EXPECT_EQ(out.packing.start(*out.extra), Scalar(237, 20));
    expect_valid(out, p, loose());
}

TEST(AnalyzeCase, MirroredMediumGap) {
    Packing p = placed(12, {{8, 4}, {3, 2}}, {4, 1});
    CaseContext c = analyze_case(p, loose());
    EXPECT_EQ(c.label, CaseLabel::MediumGap);
    EXPECT_TRUE(c.mirrored);
    EXPECT_EQ(c.at("left"), 8);
    RestructureOutcome out = restructure(p, loose());
    expect_valid(out, p, loose());
    EXPECT_EQ(out.packing.start(*out.extra), 0);
}

TEST(OneWideGap, RoutingForGapFromZeroToThreeQuarters) {
    Packing p = placed(4, {{1, 3}, {2, 1}}, {3, 0});
    CaseContext c = analyze_case(p, Params::make(kHalf));
    EXPECT_EQ(c.label, CaseLabel::OneWideGap);
    EXPECT_EQ(c.variant, "right-end-past-middle");
    RestructureOutcome out = restructure(p, Params::make(kHalf));
    EXPECT_EQ(out.kind, OutcomeKind::Neat);
    expect_valid(out, p, Params::make(kHalf));
}

TEST(OneWideGap, FarLeftEndRouting) {
    // with eps = 1/2 a wide gap cannot start after D/3 once normalized, so use eps = 1/10
    Params prm = Params::make(Scalar(1, 10), Scalar(1, 200));
    Packing p = placed(22, {{2, 4}, {3, 4}, {5, 2}, {3, 1}, {4, 1}}, {0, 19, 1, 16, 18});
    CaseContext c = analyze_case(p, prm);
    ASSERT_EQ(c.label, CaseLabel::OneWideGap);
    EXPECT_FALSE(c.mirrored);
    EXPECT_EQ(c.variant, "far-left-end");
    RestructureOutcome out = restructure(p, prm);
    EXPECT_EQ(out.kind, OutcomeKind::Neat);
    expect_valid(out, p, prm);
}

TEST(OneWideGap, ShortGapRouting) {
    // the tall item starts just before D/2, leaving a late gap narrower than lambda D
    Params prm = Params::make(Scalar(1, 10), Scalar(1, 200));
    Packing p = placed(200, {{100, 4}, {30, 2}, {25, 1}, {40, 1}}, {Scalar(199, 2), 0, 60, 120});
    CaseContext c = analyze_case(p, prm);
    ASSERT_EQ(c.label, CaseLabel::OneWideGap);
    EXPECT_EQ(c.variant, "right-end-before-middle");
    RestructureOutcome out = restructure(p, prm);
    EXPECT_EQ(out.kind, OutcomeKind::Neat);
    expect_valid(out, p, prm);
}

TEST(FuseGaps, BorderWithTwoNarrowEarlyGaps) {
    // lambda D = 1; early gaps of 1/2 and 3/5 to the left of the third tall item
    Packing p = placed(80, {{10, 4}, {10, 4}, {20, 4}, {5, 1}, {2, 2}},
                       {0, Scalar(21, 2), Scalar(211, 10), 0, 50});
    CaseContext c = analyze_case(p, loose());
    ASSERT_EQ(c.label, CaseLabel::FuseBorder);
    EXPECT_EQ(c.at("left"), Scalar(211, 10));
    RestructureOutcome out = restructure(p, loose());
    EXPECT_EQ(out.caseTrace, "FuseBorder");
    EXPECT_EQ(out.kind, OutcomeKind::Forgiving);
    EXPECT_EQ(out.packing.item(*out.extra).height, peak(p));
    EXPECT_EQ(out.packing.start(*out.extra), Scalar(201, 10));
    expect_valid(out, p, loose());
}

TEST(FuseGaps, MirroredBorderMatchesOriginal) {
    Packing p = placed(80, {{10, 4}, {10, 4}, {20, 4}, {5, 1}, {2, 2}},
                       {0, Scalar(21, 2), Scalar(211, 10), 0, 50});
    Packing m = mirror(p);
    CaseContext c = analyze_case(m, loose());
    ASSERT_EQ(c.label, CaseLabel::FuseBorder);
    EXPECT_TRUE(c.mirrored);
    EXPECT_EQ(c.at("left"), Scalar(211, 10));
    RestructureOutcome a = restructure(p, loose());
    RestructureOutcome b = restructure(m, loose());
    expect_valid(b, m, loose());
    Packing back = mirror(b.packing);
    for (size_t k = 0; k < a.packing.size(); ++k) EXPECT_EQ(a.packing.start(k), back.start(k));
}

TEST(FuseGaps, CenterWithOneGapOfLambdaD) {
    // wide gap [0, 75/2), then tall blocks split by two gaps of width 1/2 near the middle
    Packing p = placed(80, {{2, 4}, {2, 4}, {37, 4}, {5, 1}, {10, 2}, {1, 1}},
                       {Scalar(75, 2), 40, Scalar(85, 2), 38, 0, Scalar(81, 2)});
    CaseContext c = analyze_case(p, loose());
    ASSERT_EQ(c.label, CaseLabel::FuseCenter);
    EXPECT_EQ(c.at("left"), Scalar(79, 2));
    EXPECT_EQ(c.at("right"), Scalar(85, 2));
    RestructureOutcome out = restructure(p, loose());
    EXPECT_EQ(out.kind, OutcomeKind::Forgiving);
    expect_valid(out, p, loose());
}

TEST(TwoWideGaps, SingleTallInTheMiddle) {
    Packing p = placed(80, {{4, 4}, {10, 2}, {30, 1}, {3, 2}}, {38, 5, 45, 40});
    CaseContext c = analyze_case(p, loose());
    ASSERT_EQ(c.label, CaseLabel::TwoWideGaps);
    RestructureOutcome out = restructure(p, loose());
    EXPECT_EQ(out.kind, OutcomeKind::Neat);
    expect_valid(out, p, loose());
    EXPECT_EQ(out.packing.start(0), 0);
}

TEST(TwoWideGaps, MirrorFixedPoint) {
    Packing p = placed(80, {{4, 4}, {6, 2}, {6, 2}}, {38, 10, 64});
    RestructureOutcome a = restructure(p, loose());
    RestructureOutcome b = restructure(mirror(p), loose());
    expect_valid(a, p, loose());
    expect_valid(b, p, loose());
}

TEST(Mountain, TwoItemsReachHalfMoveFirst) {
    // two items of height 1 covering [2, 3); OPT 4 with a tall item at [0, 2)
    Packing p = placed(6, {{2, 4}, {2, 1}, {3, 1}}, {0, 1, 2});
    Packing q = mountain_repack(p, 4, {1, 2}, 2, 3, 3);
    EXPECT_EQ(q.start(1), 0);
    EXPECT_EQ(q.start(2), 0);
    EXPECT_LE(peak(q), 6);
}

TEST(Mountain, StopsWhenPeakWouldPassBound) {
    Packing p = placed(8, {{2, 4}, {3, 2}, {2, 2}}, {0, 1, 2});
    // both cover [3, 4); the second would lift [0, 2) to 8 and restarts at 4
    Packing q = mountain_repack(p, 4, {1, 2}, 3, 4, 4);
    EXPECT_EQ(q.start(1), 0);
    EXPECT_EQ(q.start(2), 4);
    EXPECT_LE(peak(q), 6);
}

TEST(Mountain, LastItemMayLandBeforeTheInterval) {
    Packing p = placed(12, {{2, 4}, {3, 2}, {2, 2}}, {0, 8, 9});
    Packing q = mountain_repack(p, 4, {1, 2}, 9, 10, 3);
    EXPECT_EQ(q.start(1), 0);
    EXPECT_EQ(q.start(2), 3);
    EXPECT_THROW(mountain_repack(p, 4, {1, 2}, 9, 10, 2), CaseMisroute);
}

TEST(Mountain, RejectsMisuse) {
    Packing p = placed(6, {{2, 4}, {2, 1}, {3, 1}}, {0, 1, 2});
    EXPECT_THROW(mountain_repack(p, 4, {}, 2, 3, 3), CaseMisroute);
    EXPECT_THROW(mountain_repack(p, 4, {0}, 0, 1, 3), CaseMisroute);
    EXPECT_THROW(mountain_repack(p, 4, {1}, 2, 3, 3), CaseMisroute);
    EXPECT_THROW(mountain_repack(p, 4, {1, 2}, 0, 3, 3), CaseMisroute);
}

TEST(ShiftOverTall, EmptyShiftGivesSortedStair) {
    Packing p = placed(10, {{2, 3}, {3, 5}, {1, 1}}, {0, 7, 4});
    Packing q = shift_over_tall(p, {0, 1}, {}, 2, 7, 0);
    EXPECT_EQ(q.start(1), 0);
    EXPECT_EQ(q.start(0), 3);
    EXPECT_EQ(q.start(2), 4);
}

TEST(ShiftOverTall, ItemEndingAtSlackBoundaryEndsAtD) {
    // gap [2, 6), right slack 1 on [6, 10): the item ending at 7 moves to end at 10
    Packing p = placed(10, {{2, 4}, {3, 4}, {3, 1}}, {0, 7, 4});
    Packing q = shift_over_tall(p, {0, 1}, {2}, 2, 6, Scalar(1, 10));
    EXPECT_EQ(q.end(2), 10);
}

TEST(ShiftOverTall, RejectsTallInsideGap) {
    Packing p = placed(10, {{2, 4}, {3, 4}}, {0, 4});
    EXPECT_THROW(shift_over_tall(p, {0, 1}, {}, 2, 6, 0), CaseMisroute);
}

TEST(WideTall, MediumItemEndsAtDeadline) {
    // tall widths fill D = 6; a medium item of height 2 for H = 5
    auto inst = make_instance(6, {{3, 5}, {3, 4}, {3, 2}, {3, 1}});
    Params prm = Params::make(kHalf);
    Packing q = wide_tall_neat(inst, 5, prm, {0, 1, 2, 3});
    EXPECT_EQ(q.end(2), 6);
    EXPECT_LE(peak(q), Scalar(15, 2));
    EXPECT_TRUE(neat_violations(q, 5, kHalf).empty());
}

TEST(WideTall, WideFlatItemEndsAtDeadlineUnderBound) {
    auto inst = make_instance(8, {{8, 5}, {7, 1}});
    Params prm = Params::make(kHalf);
    Packing q = wide_tall_neat(inst, 6, prm, {0, 1});
    EXPECT_LE(peak(q), (Scalar(3, 2) + kHalf) * 6);
    EXPECT_TRUE(check_feasible(q).ok);
}

TEST(WideTall, RejectsNarrowTall) {
    auto inst = make_instance(8, {{4, 5}, {3, 1}});
    EXPECT_THROW(wide_tall_neat(inst, 6, Params::make(kHalf), {0, 1}), CaseMisroute);
}

TEST(Restructure, RejectsInfeasibleInput) {
    Packing p = placed(4, {{3, 1}}, {2});
    EXPECT_THROW(restructure(p, Params::make(kHalf)), InputError);
}

TEST(Restructure, OracleOptimaOnRandomMicroInstances) {
    std::mt19937_64 rng(2024);
    Params prm = Params::make(kHalf);
    std::map<std::string, int> seen;
    for (int rep = 0; rep < 300; ++rep) {
        auto inst = random_instance(rng, 6, 10, 8);
        Packing opt = exact_opt(inst).packing;
        RestructureOutcome out;
        ASSERT_NO_THROW(out = restructure(opt, prm)) << "rep " << rep;
        expect_valid(out, opt, prm);
        ++seen[out.context.trace()];
    }
    EXPECT_GE(seen.size(), 4u);
}

TEST(Restructure, LooseLambdaOnRandomMicroInstances) {
    std::mt19937_64 rng(77);
    Params prm = loose();
    for (int rep = 0; rep < 300; ++rep) {
        auto inst = random_instance(rng, 6, 10, 8);
        Packing opt = exact_opt(inst).packing;
        RestructureOutcome out;
        ASSERT_NO_THROW(out = restructure(opt, prm)) << "rep " << rep;
        expect_valid(out, opt, prm);
    }
}
