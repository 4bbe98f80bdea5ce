#include <gtest/gtest.h>

#include <set>

#include "tcw/error.hpp"
#include "tcw/topology.hpp"

using namespace tcw;

namespace {

// Reference interior: union of every open inside a.
PointSet slow_interior(const FiniteTopology& t, PointSet a) {
    PointSet r = 0;
    for (PointSet o : t.opens())
        if (subset_of(o, a)) r |= o;
    return r;
}

// Reference closure: intersection of every closed superset.
PointSet slow_closure(const FiniteTopology& t, PointSet a) {
    PointSet r = t.base();
    for (PointSet o : t.opens()) {
        PointSet c = t.base() & ~o;
        if (subset_of(a, c)) r &= c;
    }
    return r;
}

bool is_topology(int size, const std::vector<PointSet>& fam) {
    std::set<PointSet> s(fam.begin(), fam.end());
    if (!s.count(0) || !s.count(full_set(size))) return false;
    for (PointSet a : s)
        for (PointSet b : s)
            if (!s.count(a | b) || !s.count(a & b)) return false;
    return true;
}

FiniteTopology chain3() { return FiniteTopology::make(3, {0b000, 0b001, 0b011, 0b111}); }

}  // namespace

TEST(MakeTopology, Presets) {
    EXPECT_EQ(FiniteTopology::make(2, {}, Preset::Discrete).opens(), (std::vector<PointSet>{0, 1, 2, 3}));
    EXPECT_EQ(FiniteTopology::make(2, {0b01}, Preset::Indiscrete).opens(), (std::vector<PointSet>{0, 3}));
}

TEST(MakeTopology, ValidatesClosure) {
    EXPECT_TRUE(is_topology(3, chain3().opens()));
    try {
        FiniteTopology::make(3, {0, 0b001, 0b010, 0b111});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotClosedUnderUnion);
    }
    try {
        FiniteTopology::make(3, {0, 0b011, 0b110, 0b111});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotClosedUnderIntersection);
    }
    try {
        FiniteTopology::make(2, {0b01});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingEmptyOrFull);
    }
    try {
        FiniteTopology::make(2, {0, 0b100, 0b11});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfRangePoint);
    }
}

TEST(Interior, Examples) {
    EXPECT_EQ(interior(discrete(2), 0b01), 0b01u);
    EXPECT_EQ(interior(indiscrete(2), 0b01), 0u);
    EXPECT_EQ(interior(chain3(), 0b110), 0u);
    EXPECT_THROW(interior(discrete(2), 0b100), Error);
}

TEST(Closure, Examples) {
    EXPECT_EQ(closure(discrete(2), 0b01), 0b01u);
    EXPECT_EQ(closure(indiscrete(2), 0b01), 0b11u);
    EXPECT_EQ(closure(chain3(), 0b010), 0b110u);
}

TEST(Interior, AgreesWithScanOnAllSmallSpaces) {
    for (int n = 0; n <= 4; ++n)
        for (const auto& t : enumerate_topologies(n))
            for (PointSet a = 0; a <= t.base(); ++a) {
                const PointSet i = interior(t, a);
                ASSERT_EQ(i, slow_interior(t, a));
                ASSERT_EQ(closure(t, a), slow_closure(t, a));
                ASSERT_EQ(closure(t, a), t.base() & ~interior(t, t.base() & ~a));
                ASSERT_TRUE(subset_of(i, a));
                ASSERT_EQ(interior(t, i), i);
                for (PointSet b = 0; b <= t.base(); ++b) ASSERT_EQ(interior(t, a & b), i & interior(t, b));
            }
}

TEST(AlmostDiscrete, Examples) {
    EXPECT_TRUE(is_almost_discrete(discrete(3)));
    EXPECT_TRUE(is_almost_discrete(indiscrete(3)));
    // Every nonempty open of the chain is dense, so cl A = base is open.
    EXPECT_TRUE(is_almost_discrete(chain3()));
    auto t = FiniteTopology::make(3, {0, 0b001, 0b010, 0b011, 0b111});
    // cl{0} = {0,2}, whose interior is {0}.
    EXPECT_FALSE(is_almost_discrete(t));
}

TEST(Alexandrov, Examples) {
    EXPECT_EQ(alexandrov(Preorder::identity(2)), discrete(2));
    EXPECT_EQ(alexandrov(Preorder::total(2)), indiscrete(2));
    std::vector<std::pair<int, int>> chain{{0, 1}};
    auto p = Preorder::make(2, chain, true);
    EXPECT_EQ(alexandrov(p).opens(), (std::vector<PointSet>{0, 0b10, 0b11}));
}

TEST(Preorder, RejectsNonPreorders) {
    std::vector<std::pair<int, int>> nonrefl{{0, 1}};
    EXPECT_THROW(Preorder::make(2, nonrefl), Error);
    std::vector<std::pair<int, int>> nontrans{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}};
    EXPECT_THROW(Preorder::make(3, nontrans), Error);
}

TEST(Specialization, Examples) {
    EXPECT_EQ(specialization_preorder(discrete(2)), Preorder::identity(2));
    EXPECT_EQ(specialization_preorder(indiscrete(2)), Preorder::total(2));
    auto p = specialization_preorder(FiniteTopology::make(2, {0, 0b10, 0b11}));
    EXPECT_TRUE(p.leq(0, 1));
    EXPECT_FALSE(p.leq(1, 0));
}

TEST(Specialization, RoundTripsUpToSizeFour) {
    for (int n = 0; n <= 4; ++n)
        for (const auto& t : enumerate_topologies(n)) {
            auto p = specialization_preorder(t);
            ASSERT_EQ(alexandrov(p), t);
            ASSERT_EQ(specialization_preorder(alexandrov(p)), p);
        }
}

TEST(Coproduct, Examples) {
    std::vector<FiniteTopology> a{discrete(1), discrete(1)};
    EXPECT_EQ(coproduct(a), discrete(2));
    std::vector<FiniteTopology> b{indiscrete(2), indiscrete(2)};
    EXPECT_EQ(coproduct(b).opens(), (std::vector<PointSet>{0, 0b0011, 0b1100, 0b1111}));
    EXPECT_THROW(coproduct(std::span<const FiniteTopology>{}), Error);
}

TEST(Coproduct, MatchesIntersectionCondition) {
    std::vector<FiniteTopology> parts{discrete(2), indiscrete(2)};
    auto c = coproduct(parts);
    std::vector<PointSet> expected;
    for (PointSet u = 0; u < 16; ++u)
        if (discrete(2).is_open(u & 0b11) && indiscrete(2).is_open((u >> 2) & 0b11)) expected.push_back(u);
    EXPECT_EQ(c.opens(), expected);
    EXPECT_EQ(c.opens().size(), 8u);
}

TEST(Subspace, Examples) {
    EXPECT_EQ(subspace(discrete(3), 0b011), discrete(2));
    EXPECT_EQ(subspace(indiscrete(3), 0b011), indiscrete(2));
    // {1,2} of the chain: traces are {}, {}, {1}, {1,2}; re-indexed {0}, {0,1}.
    EXPECT_EQ(subspace(chain3(), 0b110).opens(), (std::vector<PointSet>{0, 0b01, 0b11}));
    EXPECT_THROW(subspace(discrete(2), 0b100), Error);
}

TEST(Enumerate, CountsMatchBruteForce) {
    EXPECT_EQ(enumerate_topologies(0).size(), 1u);
    EXPECT_EQ(enumerate_topologies(1).size(), 1u);
    EXPECT_EQ(enumerate_topologies(2).size(), 4u);
    // Brute force over all families of subsets of a 3-point base.
    std::size_t count3 = 0;
    for (std::uint32_t fam = 0; fam < (1u << 8); ++fam) {
        std::vector<PointSet> f;
        for (int s = 0; s < 8; ++s)
            if (fam >> s & 1) f.push_back(s);
        if (is_topology(3, f)) ++count3;
    }
    EXPECT_EQ(enumerate_topologies(3).size(), count3);
    EXPECT_EQ(enumerate_topologies(4).size(), 355u);
    EXPECT_THROW(enumerate_topologies(5), Error);
    std::set<std::vector<PointSet>> distinct;
    for (const auto& t : enumerate_topologies(4)) distinct.insert(t.opens());
    EXPECT_EQ(distinct.size(), 355u);
}

TEST(Json, RoundTrip) {
    auto t = chain3();
    auto j = to_json(t);
    EXPECT_EQ(j.dump(), R"({"opens":[[],[0],[0,1],[0,1,2]],"size":3})");
    EXPECT_EQ(topology_from_json(j), t);
    auto p = specialization_preorder(t);
    EXPECT_EQ(preorder_from_json(to_json(p)), p);
}
