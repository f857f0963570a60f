#include "dsp/steinberg.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dsp;

namespace {

std::vector<Item> items_of(const std::vector<std::pair<long, long>>& wh) {
    std::vector<Item> out;
    for (const auto& [w, h] : wh) out.push_back({std::to_string(out.size()), w, h});
    return out;
}

// x-projection of a geometric packing as a strip packing of width W
Packing project(const GeomPacking& g) {
    Instance inst;
    inst.deadline = g.boxWidth;
    inst.items = g.items;
    Packing p(std::make_shared<const Instance>(inst));
    for (size_t k = 0; k < g.items.size(); ++k) p.set(k, g.at[k].x);
    return p;
}

}  // namespace

TEST(Steinberg, SingleItemUsesTwiceItsWidth) {
    GeomPacking g = steinberg_pack(items_of({{3, 2}}), 2);
    EXPECT_EQ(g.boxWidth, 6);
    EXPECT_EQ(g.at[0].x, 0);
    EXPECT_EQ(g.at[0].y, 0);
}

TEST(Steinberg, TwoUnitSquares) {
    GeomPacking g = steinberg_pack(items_of({{1, 1}, {1, 1}}), 2);
    EXPECT_EQ(g.boxWidth, 2);
    EXPECT_TRUE(geom_violations(g).empty());
}

TEST(Steinberg, EmptyInput) {
    GeomPacking g = steinberg_pack({}, 5);
    EXPECT_EQ(g.boxWidth, 0);
    EXPECT_TRUE(g.at.empty());
}

TEST(Steinberg, PreconditionMessageNamesInequality) {
    try {
        steinberg_pack_box(items_of({{2, 2}, {2, 2}}), 3, 3);
        FAIL() << "expected a precondition failure";
    } catch (const SteinbergPreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("Steinberg precondition failed"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("2*area"), std::string::npos);
    }
    EXPECT_THROW(steinberg_pack(items_of({{1, 3}}), 2), SteinbergPreconditionError);
    EXPECT_THROW(steinberg_pack_box(items_of({{4, 1}}), 3, 5), SteinbergPreconditionError);
}

TEST(Steinberg, ThreeNearHalfSquares) {
    // no guillotine prefix split works here; a shelf does
    GeomPacking g = steinberg_pack_box(items_of({{45, 37}, {45, 37}, {45, 37}}), 100, 100);
    EXPECT_TRUE(geom_violations(g).empty());
    EXPECT_FALSE(g.trace.empty());
}

TEST(Steinberg, ExactConditionWithCorrectionTerm) {
    // 2*(36 + 12) = 96 = 10*10 - (12-10)*(12-10): tight
    std::vector<Item> items = items_of({{6, 6}, {3, 4}});
    EXPECT_EQ(steinberg_violation(items, 10, 10), "");
    EXPECT_TRUE(geom_violations(steinberg_pack_box(items, 10, 10)).empty());
    items.push_back({"extra", 1, 1});
    EXPECT_NE(steinberg_violation(items, 10, 10), "");
}

TEST(Steinberg, GeomCheckerCatchesOverlap) {
    GeomPacking g;
    g.boxWidth = 4;
    g.boxHeight = 4;
    g.items = items_of({{2, 2}, {2, 2}});
    g.at = {{0, 0}, {1, 1}};
    EXPECT_EQ(geom_violations(g).size(), 1u);
    g.at = {{0, 0}, {2, 0}};
    EXPECT_TRUE(geom_violations(g).empty());
    g.at = {{0, 0}, {3, 0}};
    EXPECT_EQ(geom_violations(g).size(), 1u);
}

TEST(Steinberg, RandomFormulaWidthProjectsUnderH) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(1, 20), n(1, 12);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<Item> items;
        for (int k = n(rng); k > 0; --k) items.push_back({std::to_string(items.size()), d(rng), d(rng)});
        Scalar H = 0;
        for (const Item& it : items) H = max_of(H, it.height);
        H += rational(d(rng) - 1, 4);
        GeomPacking g = steinberg_pack(items, H);
        ASSERT_TRUE(geom_violations(g).empty()) << "rep " << rep;
        Packing p = project(g);
        EXPECT_TRUE(check_feasible(p).ok);
        EXPECT_LE(peak(p), H);
    }
}

TEST(Steinberg, FallbackBoxFitsDeadline) {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 1000; ++rep) {
        auto inst = random_instance(rng, 12, 30, 20);
        Scalar H = 2 * lower_bound(*inst);
        GeomPacking g = steinberg_pack_box(inst->items, inst->deadline, H);
        ASSERT_TRUE(geom_violations(g).empty()) << "rep " << rep;
    }
}

TEST(Steinberg, RandomTightBoxes) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 1000; ++rep) {
        long u = std::uniform_int_distribution<long>(2, 40)(rng);
        long v = std::uniform_int_distribution<long>(2, 40)(rng);
        std::vector<Item> items;
        for (int t = 0; t < 80; ++t) {
            items.push_back({std::to_string(items.size()), std::uniform_int_distribution<long>(1, u)(rng),
                             std::uniform_int_distribution<long>(1, v)(rng)});
            if (!steinberg_violation(items, u, v).empty()) items.pop_back();
        }
        GeomPacking g = steinberg_pack_box(items, u, v);
        ASSERT_TRUE(geom_violations(g).empty()) << "rep " << rep;
    }
}
