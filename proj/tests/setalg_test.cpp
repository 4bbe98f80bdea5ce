#include <gtest/gtest.h>

#include <random>

#include "tcw/error.hpp"
#include "tcw/setalg.hpp"

using namespace tcw;
using namespace tcw::setalg;

namespace {

using Tuples = std::vector<std::vector<int>>;

TupleSet ts(const SpacePtr& sp, Tuples t) { return TupleSet::from_tuples(sp, t); }

TupleSet random_set(const SpacePtr& sp, std::mt19937_64& rng) {
    TupleSet x(sp);
    for (std::uint64_t c = 0; c < sp->tuple_count(); ++c)
        if (rng() & 1) x.insert(c);
    return x;
}

// Interior straight from the definition: s_k in int{a : s[k:=a] in X}.
TupleSet slow_interior(int k, const TupleSet& x) {
    const auto& sp = *x.space();
    TupleSet r(x.space());
    for (std::uint64_t c = 0; c < sp.tuple_count(); ++c) {
        auto s = sp.decode(c);
        PointSet fiber = 0;
        for (int a = 0; a < sp.base(); ++a) {
            auto t = s;
            t[k] = a;
            if (x.contains(t)) fiber |= PointSet{1} << a;
        }
        if (contains(interior(*sp.topology(), fiber), s[k])) r.insert(c);
    }
    return r;
}

}  // namespace

TEST(Cyl, Examples) {
    auto sp = make_space(2, 2);
    EXPECT_EQ(cyl(0, ts(sp, {{0, 0}})), ts(sp, {{0, 0}, {1, 0}}));
    EXPECT_EQ(cyl(0, TupleSet(sp)), TupleSet(sp));
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        auto x = random_set(sp, rng);
        EXPECT_EQ(cyl(1, cyl(1, x)), cyl(1, x));
        EXPECT_TRUE(x.subset_of(cyl(1, x)));
    }
    EXPECT_THROW(cyl(2, TupleSet(sp)), Error);
}

TEST(Diag, Examples) {
    auto sp = make_space(2, 2);
    EXPECT_EQ(diag(0, 1, sp), ts(sp, {{0, 0}, {1, 1}}));
    EXPECT_EQ(diag(0, 0, sp).count(), 4u);
    auto sp3 = make_space(3, 2);
    auto d = diag(0, 2, sp3);
    EXPECT_EQ(d.count(), 4u);
    for (const auto& t : d.tuples()) EXPECT_EQ(t[0], t[2]);
    EXPECT_THROW(diag(0, 3, sp3), Error);
}

TEST(Interior, Examples) {
    auto ind = make_space(2, 2, indiscrete(2));
    EXPECT_TRUE(interior_op(0, ts(ind, {{0, 0}})).empty());
    auto col = ts(ind, {{0, 0}, {1, 0}});
    EXPECT_EQ(interior_op(0, col), col);
    auto disc = make_space(2, 2, discrete(2));
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
        auto x = random_set(disc, rng);
        EXPECT_EQ(interior_op(0, x), x);
        EXPECT_EQ(interior_op(1, x), x);
        auto y = random_set(ind, rng);
        EXPECT_EQ(interior_op(1, y, true), cyl(1, y));
    }
    EXPECT_THROW(interior_op(0, TupleSet(make_space(2, 2))), Error);
}

TEST(Interior, MatchesDefinitionEverywhereSmall) {
    for (int n : {2, 3})
        for (int u : {2, 3})
            for (const auto& t : enumerate_topologies(u)) {
                auto sp = make_space(n, u, t);
                std::mt19937_64 rng(n * 10 + u);
                for (int k = 0; k < 20; ++k) {
                    auto x = random_set(sp, rng);
                    for (int i = 0; i < n; ++i) {
                        ASSERT_EQ(interior_op(i, x), slow_interior(i, x));
                        ASSERT_TRUE(interior_op(i, x).subset_of(x));
                        ASSERT_EQ(interior_op(i, x, true), ~interior_op(i, ~x));
                    }
                }
            }
}

TEST(Box, Examples) {
    auto sp = make_space(2, 2, std::nullopt, chang_from_topology(indiscrete(2)));
    // Fibre {0} is not in {0, base}, but the empty fibre of the second column is.
    EXPECT_EQ(box_op(0, ts(sp, {{0, 0}})), ts(sp, {{0, 1}, {1, 1}}));
    EXPECT_TRUE(box_op(0, ts(sp, {{0, 0}, {0, 1}})).empty());
    // Families holding only the base: box keeps exactly the full fibres.
    ChangSystem full{{{0b11}, {0b11}}};
    auto sp2 = make_space(2, 2, std::nullopt, full);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        auto x = random_set(sp2, rng);
        TupleSet expected(sp2);
        for (auto c : x.codes()) {
            auto s = sp2->decode(c);
            std::vector<int> a = s, b = s;
            a[0] = 0;
            b[0] = 1;
            if (x.contains(a) && x.contains(b)) expected.insert(c);
        }
        EXPECT_EQ(box_op(0, x), expected);
    }
    EXPECT_THROW(box_op(0, TupleSet(make_space(2, 2))), Error);
}

TEST(Box, NeighbourhoodSystemGivesInterior) {
    for (int u : {2, 3})
        for (const auto& t : enumerate_topologies(u)) {
            auto sp = make_space(2, u, t, neighbourhood_chang(t));
            std::mt19937_64 rng(u);
            for (int k = 0; k < 30; ++k) {
                auto x = random_set(sp, rng);
                ASSERT_EQ(box_op(0, x), interior_op(0, x));
                ASSERT_EQ(box_op(1, x), interior_op(1, x));
            }
        }
}

TEST(Box, OpenFamilySystemDiffersFromInteriorOnDiscrete) {
    // With V(x) = every subset, each fibre qualifies and the box is the unit.
    auto sp = make_space(2, 2, discrete(2), chang_from_topology(discrete(2)));
    auto x = ts(sp, {{0, 0}});
    EXPECT_EQ(box_op(0, x), TupleSet::unit(sp));
    EXPECT_EQ(interior_op(0, x), x);
}

TEST(ChangFromTopology, Examples) {
    auto v = chang_from_topology(discrete(2));
    EXPECT_EQ(v.families, (std::vector<std::vector<PointSet>>(2, {0, 1, 2, 3})));
    EXPECT_EQ(chang_from_topology(indiscrete(2)).families, (std::vector<std::vector<PointSet>>(2, {0, 3})));
    auto t = FiniteTopology::make(3, {0, 0b001, 0b011, 0b111});
    EXPECT_EQ(chang_from_topology(t).families, (std::vector<std::vector<PointSet>>(3, {0, 1, 3, 7})));
}

TEST(Subst, Examples) {
    auto sp = make_space(2, 2);
    auto tau = replacement(2, 0, 1);
    std::vector<int> id{0, 1};
    auto x = ts(sp, {{0, 1}});
    EXPECT_EQ(subst(id, x), x);
    EXPECT_TRUE(subst(tau, x).empty());
    auto y = ts(sp, {{1, 1}});
    EXPECT_EQ(subst(tau, y), ts(sp, {{0, 1}, {1, 1}}));
    EXPECT_EQ(subst(tau, y), cyl(0, diag(0, 1, sp) & y));
}

TEST(Subst, AgreesWithTermFormUpToThree) {
    for (int n : {2, 3})
        for (int u : {2, 3}) {
            auto sp = make_space(n, u);
            std::mt19937_64 rng(n * u);
            const int samples = sp->tuple_count() <= 9 ? -1 : 200;
            std::vector<TupleSet> xs;
            if (samples < 0) {
                for (std::uint64_t m = 0; m < (std::uint64_t{1} << sp->tuple_count()); ++m) {
                    TupleSet x(sp);
                    for (std::uint64_t c = 0; c < sp->tuple_count(); ++c)
                        if (m >> c & 1) x.insert(c);
                    xs.push_back(x);
                }
            } else {
                for (int k = 0; k < samples; ++k) xs.push_back(random_set(sp, rng));
            }
            for (const auto& x : xs)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j) ASSERT_EQ(subst(replacement(n, i, j), x), cyl(i, diag(i, j, sp) & x));
        }
}

TEST(NeatLift, Examples) {
    auto sp = make_space(2, 2, indiscrete(2));
    EXPECT_EQ(neat_lift(TupleSet::unit(sp), 1).count(), 8u);
    EXPECT_EQ(neat_lift(TupleSet::unit(sp), 2).count(), 16u);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 16; ++k) {
        auto x = random_set(sp, rng);
        EXPECT_EQ(neat_lift(interior_op(0, x), 1), interior_op(0, neat_lift(x, 1)));
        EXPECT_EQ(neat_lift(cyl(1, x), 1), cyl(1, neat_lift(x, 1)));
        EXPECT_EQ(dimension_set(neat_lift(x, 1)) & 0b100, 0u);
    }
    EXPECT_THROW(neat_lift(TupleSet(sp), 0), Error);
}

TEST(DimensionSet, Examples) {
    auto sp = make_space(2, 2);
    EXPECT_EQ(dimension_set(TupleSet::unit(sp)), 0u);
    EXPECT_EQ(dimension_set(diag(0, 1, sp)), 0b11u);
    EXPECT_EQ(dimension_set(ts(sp, {{0, 0}, {1, 0}})), 0b10u);
}

TEST(Generalized, SingleSummandIsIdentity) {
    auto sp = make_space(2, 2, discrete(2));
    GeneralizedSpace g{{sp}};
    auto x = ts(g.union_space(), {{0, 1}, {1, 1}});
    auto parts = decompose_generalized(g, x);
    ASSERT_EQ(parts.size(), 1u);
    EXPECT_EQ(parts[0].codes(), x.codes());
}

TEST(Generalized, UnitSplitsIntoUnits) {
    GeneralizedSpace g{{make_space(2, 1, indiscrete(1)), make_space(2, 2, indiscrete(2))}};
    auto unit = generalized_unit(g);
    EXPECT_EQ(unit.count(), 1u + 4u);
    auto parts = decompose_generalized(g, unit);
    EXPECT_EQ(parts[0], TupleSet::unit(g.summands[0]));
    EXPECT_EQ(parts[1], TupleSet::unit(g.summands[1]));
    EXPECT_EQ(compose_generalized(g, parts), unit);
    auto outside = ts(g.union_space(), {{0, 1}});
    try {
        decompose_generalized(g, outside);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSubsetOfUnit);
    }
}

TEST(Json, RoundTrip) {
    auto sp = make_space(2, 2, indiscrete(2));
    auto x = ts(sp, {{1, 0}, {1, 1}});
    auto j = to_json(x);
    EXPECT_EQ(j.at("members"), nlohmann::json({1, 3}));
    EXPECT_EQ(tuple_set_from_json(j), x);
    EXPECT_EQ(*tuple_set_from_json(j).space()->topology(), indiscrete(2));
}

TEST(Space, Limits) {
    EXPECT_THROW(make_space(0, 2), Error);
    EXPECT_THROW(make_space(25, 2), Error);
    EXPECT_THROW(make_space(2, 3, discrete(2)), Error);
    EXPECT_NO_THROW(make_space(24, 2));
}
