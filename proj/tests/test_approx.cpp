#include "dsp/approx.hpp"
#include "dsp/oracle.hpp"
#include "dsp/params.hpp"
#include "dsp/stretch_squeeze.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dsp;

namespace {

const Scalar kHalf(1, 2);

// Greedy, then items pulled to 0 one by one while the peak stays within 5/2 H_LB.
SplitResult crowded(const Packing& blank, const Scalar& asideShare) {
    SplitResult r = greedy_split(blank, asideShare);
    const Scalar cap = Scalar(5, 2) * lower_bound(blank.instance());
    for (size_t k : blank.base_items()) {
        if (!r.main.assigned(k)) continue;
        Scalar was = r.main.start(k);
        r.main.set(k, 0);
        if (partial_profile(r.main).peak() > cap) r.main.set(k, was);
    }
    return r;
}

}  // namespace

TEST(NeatAccuracy, GroupsAndGrain) {
    NeatAccuracy a = NeatAccuracy::make(Scalar(1, 128), Scalar(1, 4));
    EXPECT_EQ(a.narrowShare, Scalar(1, 5));
    EXPECT_EQ(a.groups, 3);
    EXPECT_EQ(a.flatShare, Scalar(1, 6291456));
    EXPECT_EQ(a.slices(), 128);

    NeatAccuracy b = NeatAccuracy::make(kHalf, Scalar(1));
    EXPECT_EQ(b.narrowShare, kHalf);
    EXPECT_EQ(b.groups, 1);
    EXPECT_EQ(b.flatShare, Scalar(1, 8));
    EXPECT_THROW(NeatAccuracy::make(Scalar(2, 5), Scalar(1)), InputError);
}

TEST(Params, InnerEpsilonIsAUnitFraction) {
    EXPECT_EQ(inner_epsilon(kHalf), Scalar(1, 128));
    EXPECT_EQ(inner_epsilon(Scalar(3, 10)), Scalar(1, 214));
    EXPECT_EQ(inner_epsilon(Scalar(1)), Scalar(1, 64));
}

TEST(Classify, FourClasses) {
    auto inst = make_instance(8, {{2, 8}, {4, 1}, {5, 1}, {6, 3}});
    NeatAccuracy acc = NeatAccuracy::make(kHalf, Scalar(1));
    Classification c = classify(*inst, 8, acc);
    EXPECT_EQ(c.lowerBound, 8);
    EXPECT_EQ(c.tall, ItemSet({0}));
    EXPECT_EQ(c.squeezable, ItemSet({1}));
    EXPECT_EQ(c.horizontal, ItemSet({2}));
    EXPECT_EQ(c.large, ItemSet({3}));
    EXPECT_EQ(c.group[2], 1);
    EXPECT_EQ(c.roundedHeight[0], 8);
}

TEST(Classify, TallHeightsRoundUp) {
    auto inst = make_instance(4, {{1, 7}, {1, 5}});
    Classification c = classify(*inst, 7, NeatAccuracy::make(Scalar(1, 4), Scalar(1)));
    // grain 7/4
    EXPECT_EQ(c.roundedHeight[0], 7);
    EXPECT_EQ(c.roundedHeight[1], Scalar(21, 4));
}

TEST(RoundHorizontal, SlicesAndStandInWidths) {
    auto inst = make_instance(8, {{2, 16}, {6, 1}, {7, 1}, {5, 1}});
    NeatAccuracy acc = NeatAccuracy::make(kHalf, Scalar(1));
    Classification c = classify(*inst, 16, acc);
    ASSERT_EQ(c.horizontal.size(), 3u);
    HorizontalRounding hr = round_horizontal(*inst, c, acc);
    const HorizontalGroup& g = hr.groups[0];
    EXPECT_EQ(g.members, ItemSet({2, 1, 3}));
    EXPECT_EQ(g.unit, Scalar(3, 2));
    EXPECT_EQ(g.widths, std::vector<Scalar>({7, 6}));
    ASSERT_EQ(g.slices[0].size(), 2u);
    EXPECT_TRUE(g.slices[0][0].whole);
    EXPECT_EQ(g.slices[0][1].height, kHalf);
    EXPECT_FALSE(g.slices[0][1].whole);
    ASSERT_EQ(g.slices[1].size(), 2u);
    EXPECT_EQ(g.slices[1][1].item, 3u);
    EXPECT_TRUE(g.slices[1][1].whole);
}

TEST(FractionalToIntegral, FillsCopiesInStackOrder) {
    auto inst = make_instance(8, {{2, 16}, {6, 1}, {7, 1}, {5, 1}});
    NeatAccuracy acc = NeatAccuracy::make(kHalf, Scalar(1));
    Classification c = classify(*inst, 16, acc);
    HorizontalRounding hr = round_horizontal(*inst, c, acc);
    FractionalPacking fp{Packing(inst), {16, 1, 1, 1}, {}};
    fp.integral.set(0, 0);
    fp.parts = {{2, Scalar(1), 0, 0}, {3, Scalar(1), 0, 1}};
    IntegralResult r = fractional_to_integral(fp, c, hr, acc);
    EXPECT_EQ(r.packing.start(2), 2);  // width 7 rides on the first stand-in
    EXPECT_EQ(r.packing.start(3), 3);
    EXPECT_EQ(r.leftover, ItemSet({1}));  // split across both slices
}

TEST(FractionalToIntegral, RejectsTooManyStarts) {
    auto inst = make_instance(8, {{2, 16}, {6, 1}, {7, 1}, {5, 1}});
    NeatAccuracy acc = NeatAccuracy::make(kHalf, Scalar(1));
    Classification c = classify(*inst, 16, acc);
    HorizontalRounding hr = round_horizontal(*inst, c, acc);
    FractionalPacking fp{Packing(inst), {16, 1, 1, 1}, {}};
    // group 1 may use (2 - 1) / (1/2) = 2 distinct starts
    fp.parts = {{0, Scalar(1, 3), 0, 0}, {1, Scalar(1, 3), 0, 0}, {Scalar(1, 2), Scalar(1, 3), 0, 0}};
    EXPECT_THROW(fractional_to_integral(fp, c, hr, acc), InputError);
}

TEST(Reduce, RejectsUnsortedTall) {
    auto inst = make_instance(8, {{2, 16}, {2, 12}, {7, 1}});
    NeatAccuracy acc = NeatAccuracy::make(kHalf, Scalar(1));
    Classification c = classify(*inst, 16, acc);
    HorizontalRounding hr = round_horizontal(*inst, c, acc);
    Packing s = placed(8, {{2, 16}, {2, 12}, {7, 1}}, {2, 0, 0});
    FractionalPacking fp = integral_to_fractional(s, c, hr, acc);
    EXPECT_THROW(reduce_starting_times(fp, c, hr, acc), InputError);
}

TEST(RoundTrip, OptimalPackingsThroughFractionalForm) {
    std::mt19937_64 rng(5);
    int withFlat = 0;
    for (int rep = 0; rep < 200; ++rep) {
        bool coarse = rep % 2 == 1;
        NeatAccuracy acc = coarse ? NeatAccuracy::make(kHalf, Scalar(1)) : NeatAccuracy::make(kHalf, Scalar(1, 3));
        auto inst = flat_heavy(rng, coarse ? 8 : 16);
        OracleResult o = exact_opt(inst);
        Classification c = classify(*inst, o.opt, acc);
        HorizontalRounding hr = round_horizontal(*inst, c, acc);
        if (!c.horizontal.empty()) ++withFlat;
        Packing s = o.packing;
        for (size_t k : c.squeezable) s.unset(k);
        pack_adjacent(s, c.tall, 0);

        FractionalPacking fp = integral_to_fractional(s, c, hr, acc);
        EXPECT_TRUE(fractional_violations(fp, hr, true).empty());
        EXPECT_LE(fractional_peak(fp, hr), partial_profile(s).peak() + 4 * acc.inner * c.lowerBound);

        ReduceResult rr = reduce_starting_times(fp, c, hr, acc);
        std::vector<std::string> bad = reduce_violations(fp, rr, c, hr, acc);
        EXPECT_TRUE(bad.empty()) << "rep " << rep << ": " << bad.front();

        IntegralResult ir = fractional_to_integral(rr.regrouped, c, hr, acc);
        Scalar lost = total_area(ir.packing, ir.leftover);
        EXPECT_LE(lost, 2 * acc.inner * c.lowerBound * inst->deadline);
        EXPECT_LE(partial_profile(ir.packing).peak(), fractional_peak(rr.regrouped, hr));
        for (size_t k : c.large) EXPECT_EQ(ir.packing.start(k), rr.regrouped.integral.start(k));
    }
    EXPECT_GT(withFlat, 120);
}

TEST(EnumerateNeat, FindsPackingWhenOneExists) {
    std::mt19937_64 rng(11);
    NeatAccuracy acc = NeatAccuracy::make(inner_epsilon(kHalf), Scalar(1, 4));
    int tried = 0;
    for (int rep = 0; rep < 2000 && tried < 150; ++rep) {
        auto inst = random_instance(rng, 7, 10, 8);
        Scalar H = exact_opt(inst).opt;
        if (H > 2 * lower_bound(*inst)) continue;
        if (!random_neat(rng, inst, H, acc.inner, {}, 200)) continue;
        ++tried;
        NeatResult r = enumerate_neat(inst, H, acc);
        ASSERT_EQ(r.status, NeatStatus::Found) << "rep " << rep;
        EXPECT_TRUE(r.packing->complete());
        EXPECT_TRUE(check_feasible(*r.packing).ok);
        EXPECT_TRUE(neat_violations(*r.packing, H, acc.target).empty());
    }
    EXPECT_EQ(tried, 150);
}

TEST(EnumerateNeat, ParallelismDoesNotChangeTheOutcome) {
    std::mt19937_64 rng(17);
    NeatAccuracy acc = NeatAccuracy::make(Scalar(1, 32), Scalar(1, 2));
    for (int rep = 0; rep < 60; ++rep) {
        auto inst = random_instance(rng, 7, 10, 8);
        Scalar HLB = lower_bound(*inst);
        Scalar H = HLB * rational(std::uniform_int_distribution<int>(4, 8)(rng), 4);
        std::uint64_t cap = std::uniform_int_distribution<std::uint64_t>(1, 40)(rng);
        NeatResult a = enumerate_neat(inst, H, acc, {cap, 1});
        NeatResult b = enumerate_neat(inst, H, acc, {cap, 3});
        ASSERT_EQ(a.status, b.status) << "rep " << rep;
        EXPECT_EQ(a.configurations, b.configurations);
        if (a.packing)
            for (size_t k = 0; k < inst->items.size(); ++k) EXPECT_EQ(a.packing->start(k), b.packing->start(k));
    }
}

TEST(EnumerateNeat, BudgetExceededIsReported) {
    // four large items; an unlimited search finds a packing after 6 configurations
    auto inst = make_instance(10, {{6, 2}, {5, 2}, {4, 2}, {7, 2}});
    NeatAccuracy acc = NeatAccuracy::make(Scalar(1, 128), Scalar(1, 4));
    NeatResult r = enumerate_neat(inst, lower_bound(*inst), acc, {2, 1});
    EXPECT_EQ(r.status, NeatStatus::BudgetExceeded);
    EXPECT_EQ(r.configurations, 3u);
}

TEST(EnumerateNeat, RejectsHOutsideRange) {
    auto inst = make_instance(4, {{2, 3}, {2, 1}});
    NeatAccuracy acc = NeatAccuracy::make(Scalar(1, 128), Scalar(1, 4));
    EXPECT_THROW(enumerate_neat(inst, 2, acc), InputError);
    EXPECT_THROW(enumerate_neat(inst, 7, acc), InputError);
}

TEST(EnumerateNeat, CoarseAccuracyWithHorizontalItems) {
    std::mt19937_64 rng(23);
    NeatAccuracy acc = NeatAccuracy::make(kHalf, Scalar(8));
    int found = 0;
    for (int rep = 0; rep < 80; ++rep) {
        auto inst = flat_heavy(rng, 8);
        Scalar HLB = lower_bound(*inst);
        NeatResult r = enumerate_neat(inst, 2 * HLB, acc, {20000, 1});
        if (r.status != NeatStatus::Found) continue;
        ++found;
        EXPECT_TRUE(check_feasible(*r.packing).ok);
        EXPECT_TRUE(neat_violations(*r.packing, 2 * HLB, acc.target).empty());
    }
    EXPECT_GT(found, 40);
}

TEST(SplitPacker, GreedyHonoursContract) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        auto inst = random_instance(rng, 8, 40, 9);
        Packing blank(inst);
        blank.add_extra({"slot", Scalar(1, 3), lower_bound(*inst)});
        Scalar asideShare(1, std::uniform_int_distribution<int>(2, 20)(rng));
        SplitResult r = greedy_split(blank, asideShare);
        std::vector<std::string> bad = split_violations(blank, asideShare, r, std::nullopt);
        EXPECT_TRUE(bad.empty()) << bad.front();
    }
}

TEST(SplitPacker, ExhaustiveIsNoWorseThanGreedy) {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 100; ++rep) {
        auto inst = random_instance(rng, 5, 8, 6);
        Packing blank(inst);
        blank.add_extra({"slot", Scalar(1, 4), lower_bound(*inst)});
        SplitResult g = greedy_split(blank, Scalar(1, 100));
        SplitResult e = exhaustive_split(blank, Scalar(1, 100));
        EXPECT_TRUE(split_violations(blank, Scalar(1, 100), e, std::nullopt).empty());
        EXPECT_LE(partial_profile(e.main).peak(), partial_profile(g.main).peak());
    }
}

TEST(SplitPacker, ExhaustiveWithoutExtraMatchesOracle) {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 100; ++rep) {
        auto inst = random_instance(rng, 5, 8, 6);
        SplitResult e = exhaustive_split(Packing(inst), Scalar(1, 100));
        EXPECT_EQ(partial_profile(e.main).peak(), exact_opt(inst).opt);
    }
}

TEST(ForgivingSolve, AsideItemsLandInTheSlot) {
    // asideShare = min(1/2 / 72, 1/2) = 1/144, so width-1 items go aside only when D >= 144
    std::vector<std::pair<long, long>> wh{{100, 5}, {1, 3}, {1, 2}, {60, 4}};
    auto inst = make_instance(288, wh);
    Packing p = forgiving_solve(inst, kHalf, kHalf, 5, greedy_split);
    EXPECT_TRUE(p.complete());
    EXPECT_TRUE(check_feasible(p).ok);
    // both went into the same slot of width 144
    Scalar gap = p.start(1) > p.start(2) ? Scalar(p.start(1) - p.start(2)) : Scalar(p.start(2) - p.start(1));
    EXPECT_LE(gap + 1, 144);
}

TEST(ForgivingSolve, ContractViolationsAreRaised) {
    auto inst = make_instance(10, {{3, 4}, {2, 2}});
    auto too_wide = [](const Packing& blank, const Scalar& asideShare) {
        SplitResult r = greedy_split(blank, asideShare);
        r.main.unset(0);
        r.aside.set(0, 0);
        return r;
    };
    EXPECT_THROW(forgiving_solve(inst, Scalar(1, 128), Scalar(1, 80), 5, too_wide), SplitContractError);
    auto slot_aside = [](const Packing& blank, const Scalar& asideShare) {
        SplitResult r = greedy_split(blank, asideShare);
        r.main.unset(2);
        r.aside.set(2, 0);
        return r;
    };
    EXPECT_THROW(forgiving_solve(inst, Scalar(1, 128), Scalar(1, 80), 5, slot_aside), SplitContractError);
    auto too_tall = [](const Packing& blank, const Scalar&) {
        SplitResult r{blank, blank};
        for (size_t k : blank.all()) r.main.set(k, 0);
        return r;
    };
    auto stack = make_instance(10, {{3, 4}, {2, 4}, {2, 4}, {2, 4}});
    EXPECT_THROW(forgiving_solve(stack, Scalar(1, 128), Scalar(1, 80), 5, too_tall), SplitContractError);
}

TEST(Solve, RatioAgainstOracle) {
    std::mt19937_64 rng(7);
    SolverConfig cfg;
    for (int rep = 0; rep < 120; ++rep) {
        auto inst = random_instance(rng, 7, 10, 8);
        SolveResult r = solve(inst, cfg);
        ASSERT_TRUE(r.packing.complete());
        EXPECT_TRUE(check_feasible(r.packing).ok);
        EXPECT_LE(peak(r.packing), (Scalar(3, 2) + cfg.eps) * exact_opt(inst).opt) << "rep " << rep;
        EXPECT_LE(r.report.fallbackPeak, 2 * r.report.lowerBound);
    }
}

TEST(Solve, NeatSearchRunsWhenSplitPackerIsPoor) {
    std::mt19937_64 rng(9);
    SolverConfig cfg;
    int neat = 0, searched = 0;
    for (int rep = 0; rep < 400; ++rep) {
        auto inst = random_instance(rng, 7, 10, 8);
        if (inst->items.size() < 3) continue;
        SolveResult r = solve(inst, cfg, crowded);
        EXPECT_TRUE(check_feasible(r.packing).ok);
        EXPECT_LE(peak(r.packing), (Scalar(3, 2) + cfg.eps) * exact_opt(inst).opt);
        if (!r.report.probes.empty()) ++searched;
        if (r.report.neatPeak) {
            ++neat;
            EXPECT_LE(*r.report.neatPeak, (Scalar(3, 2) + cfg.eps) * exact_opt(inst).opt);
        }
        for (size_t j = 1; j < r.report.probes.size(); ++j)
            EXPECT_NE(r.report.probes[j].H, r.report.probes[j - 1].H);
    }
    EXPECT_GT(searched, 25);
    EXPECT_EQ(neat, searched);
}

TEST(Solve, DeterministicAcrossParallelism) {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        auto inst = random_instance(rng, 7, 10, 8);
        SolverConfig a, b;
        b.parallelism = 4;
        SolveResult x = solve(inst, a, crowded), y = solve(inst, b, crowded);
        EXPECT_EQ(x.report.branch, y.report.branch);
        EXPECT_EQ(x.report.configurations, y.report.configurations);
        for (size_t k = 0; k < inst->items.size(); ++k) EXPECT_EQ(x.packing.start(k), y.packing.start(k));
    }
}

TEST(Solve, EmptyInstance) {
    auto inst = std::make_shared<const Instance>(Instance{Scalar(5), {}});
    SolveResult r = solve(inst, SolverConfig{});
    EXPECT_EQ(r.packing.size(), 0u);
}
