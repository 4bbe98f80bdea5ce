#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tcw/bao.hpp"
#include "tcw/error.hpp"

using namespace tcw;
using namespace tcw::bao;
namespace T = tcw::bao::term;

namespace {

setalg::TupleSet as_set(const setalg::SpacePtr& sp, Element x) {
    setalg::TupleSet s(sp);
    for (std::uint64_t c = 0; c < sp->tuple_count(); ++c)
        if (x >> c & 1) s.insert(c);
    return s;
}

Element as_mask(const setalg::TupleSet& s) {
    Element m = 0;
    for (auto c : s.codes()) m |= Element{1} << c;
    return m;
}

FiniteAlgebra two_element(int dim) {
    FiniteAlgebra::Parts p;
    p.dim = dim;
    p.points = 1;
    p.cyl = [](int, Element x) { return x; };
    p.diag.assign(dim * dim, 1);
    return FiniteAlgebra(p);
}

}  // namespace

TEST(Cm, FullSetAlgebraStructureMatchesTupleSets) {
    for (const auto& top : enumerate_topologies(2)) {
        auto sp = setalg::make_space(2, 2, top);
        auto alg = cm(atom_structure_of(sp), true);
        ASSERT_EQ(alg.carrier().size(), 16u);
        EXPECT_TRUE(alg.flagged_interiors().empty());
        for (Element x : alg.carrier()) {
            auto s = as_set(sp, x);
            for (int i = 0; i < 2; ++i) {
                ASSERT_EQ(alg.cyl(i, x), as_mask(setalg::cyl(i, s)));
                ASSERT_EQ(alg.interior(i, x), as_mask(setalg::interior_op(i, s)));
                for (int j = 0; j < 2; ++j) ASSERT_EQ(alg.diag(i, j), as_mask(setalg::diag(i, j, sp)));
            }
            ASSERT_EQ(alg.neg(x), as_mask(~s));
        }
    }
}

TEST(Cm, IdentityDescriptorAndEmptyRelation) {
    AtomStructure s;
    s.dim = 2;
    s.atoms = 2;
    s.T = {{{0, 0}, {1, 1}}, {}};
    s.D = {3, 3, 3, 3};
    s.interior = {InteriorDesc::ident(), InteriorDesc::ident()};
    auto alg = cm(s);
    for (Element x = 0; x < 4; ++x) EXPECT_EQ(alg.interior(1, x), x);
    auto report = check_axiom_suite(alg, Suite::CA);
    EXPECT_FALSE(report.passed());
    auto failed = report.failed_ids();
    EXPECT_NE(std::find(failed.begin(), failed.end(), "3"), failed.end());
}

TEST(Cm, FlagsBadTables) {
    AtomStructure s;
    s.dim = 1;
    s.atoms = 2;
    s.T = {{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    s.D = {3};
    s.interior = {InteriorDesc::table({0b10, 0b10})};  // not reflexive at atom 0
    EXPECT_EQ(cm(s).flagged_interiors(), std::vector<int>{0});
    EXPECT_THROW(cm(s, false).cyl(1, 0), Error);
}

TEST(Cm, JsonRoundTrip) {
    auto s = atom_structure_of(setalg::make_space(2, 2, indiscrete(2)));
    auto j = to_json(s);
    EXPECT_EQ(j.at("atoms"), 4);
    EXPECT_EQ(to_json(atom_structure_from_json(j)), j);
}

TEST(EvalTerm, Examples) {
    auto sp = setalg::make_space(2, 2, discrete(2));
    auto alg = set_algebra(sp);
    const Element x = 0b0001;  // {(0,0)}
    EXPECT_EQ(eval_term(alg, T::var(0), {{0, x}}), x);
    EXPECT_EQ(eval_term(alg, T::s(0, 1, T::var(0)), {{0, x}}), alg.cyl(0, alg.diag(0, 1) & x));
    EXPECT_EQ(eval_term(alg, T::q(0, T::var(0)), {{0, x}}), 0u);
    try {
        eval_term(alg, T::var(1), {{0, x}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnboundVariable);
    }
    EXPECT_THROW(eval_term(alg, T::c(2, T::var(0)), {{0, x}}), Error);
    // a (+) b is the biconditional of the two arguments.
    EXPECT_EQ(eval_term(alg, T::oplus(T::var(0), T::var(1)), {{0, 0b0011}, {1, 0b0101}}), 0b1001u);
}

TEST(CheckEquation, Examples) {
    auto ind = set_algebra(setalg::make_space(2, 2, indiscrete(2)));
    Equation c0{T::c(0, T::zero()), T::zero()};
    EXPECT_EQ(check_equation(ind, c0).status, Status::Holds);
    Equation d00{T::d(0, 0), T::one()};
    EXPECT_EQ(check_equation(ind, d00).status, Status::Holds);

    Equation additive{T::join(T::I(0, T::var(0)), T::I(0, T::var(1))), T::I(0, T::join(T::var(0), T::var(1)))};
    auto v = check_equation(ind, additive, CheckMode::exhaustive());
    ASSERT_EQ(v.status, Status::Fails);
    ASSERT_TRUE(v.counterexample);
    const Element a = v.counterexample->at(0), b = v.counterexample->at(1);
    EXPECT_NE(ind.interior(0, a) | ind.interior(0, b), ind.interior(0, a | b));
    // The fixed witness: {(0,0)} and {(1,0)}.
    EXPECT_EQ(ind.interior(0, 0b0001) | ind.interior(0, 0b0010), 0u);
    EXPECT_EQ(ind.interior(0, 0b0011), 0b0011u);
}

TEST(CheckEquation, TooLargeForExhaustive) {
    auto alg = set_algebra(setalg::make_space(3, 2, discrete(2)));  // 256 elements
    Equation e{T::join(T::join(T::var(0), T::var(1)), T::var(3)), T::join(T::var(0), T::join(T::var(1), T::var(3)))};
    EXPECT_THROW(check_equation(alg, e, CheckMode::exhaustive()), Error);
    auto v = check_equation(alg, e, CheckMode::sampled(500, 3));
    EXPECT_EQ(v.status, Status::Holds);
    EXPECT_EQ(v.environments, 500u);  // four variables, 2^32 environments
    EXPECT_FALSE(v.exhaustive);
}

TEST(CheckEquation, GuardsFilterAndReportVacuity) {
    auto alg = set_algebra(setalg::make_space(2, 2, indiscrete(2)));
    // Only elements with c_0 p = p and c_1 p = p are 0 and 1.
    Equation e{T::var(0), T::var(0), Equation::Kind::Equal, {Guard{0, {0, 1}}}};
    auto v = check_equation(alg, e, CheckMode::exhaustive());
    EXPECT_EQ(v.environments, 2u);
    EXPECT_EQ(v.status, Status::Holds);
    Equation never{T::var(0), T::zero(), Equation::Kind::Equal, {}};
    EXPECT_EQ(check_equation(alg, never).status, Status::Fails);
}

TEST(Suites, FullSetAlgebrasPass) {
    for (const auto& top : enumerate_topologies(2)) {
        auto alg = set_algebra(setalg::make_space(2, 2, top));
        EXPECT_TRUE(check_axiom_suite(alg, Suite::CA).passed());
        auto tca = check_axiom_suite(alg, Suite::TCA);
        EXPECT_TRUE(tca.passed());
        EXPECT_TRUE(tca.exhaustive);
    }
}

TEST(Suites, DiscreteSpacePassesS5WithBoxesAsInteriors) {
    auto alg = set_algebra(setalg::make_space(2, 3, discrete(3)), BoxSource::Interior);
    auto r = check_axiom_suite(alg, Suite::S5Chang, CheckMode::sampled(2000, 1));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.axioms.size(), 8u);
}

TEST(Suites, SpaceThatIsNotAlmostDiscreteFailsOnlyItemSix) {
    // cl{0} = {0,2} here, and its interior is {0}.
    auto t = FiniteTopology::make(3, {0, 0b001, 0b010, 0b011, 0b111});
    auto alg = set_algebra(setalg::make_space(2, 3, t), BoxSource::Interior);
    auto r = check_axiom_suite(alg, Suite::S5Chang, CheckMode::sampled(4000, 2));
    EXPECT_EQ(r.failed_ids(), std::vector<std::string>{"6"});
}

TEST(Suites, NeighbourhoodChangSystemIsS4) {
    for (const auto& top : enumerate_topologies(2)) {
        auto sp = setalg::make_space(2, 2, top, setalg::neighbourhood_chang(top));
        auto alg = set_algebra(sp, BoxSource::Chang);
        EXPECT_TRUE(check_axiom_suite(alg, Suite::S4Chang).passed());
    }
}

TEST(Suites, ConstantZeroInteriorFailsUnitAxiom) {
    auto parts = set_algebra(setalg::make_space(2, 2, discrete(2))).parts();
    parts.interior = [](int, Element) { return Element{0}; };
    auto r = check_axiom_suite(FiniteAlgebra(parts), Suite::TCA);
    auto failed = r.failed_ids();
    EXPECT_NE(std::find(failed.begin(), failed.end(), "5"), failed.end());
}

TEST(Suites, ItemSevenInstanceCounts) {
    auto count = [](int dim) {
        for (const auto& a : axiom_suite(Suite::CA, dim))
            if (a.id == "7") return a.instances.size();
        return std::size_t{0};
    };
    // Triples with k outside {i, j}: at dimension 2 only i = j survives.
    EXPECT_EQ(count(2), 2u);
    EXPECT_EQ(count(3), 12u);
}

TEST(DimensionSetAbs, Examples) {
    auto alg = cm(atom_structure_of(setalg::make_space(2, 2)));
    EXPECT_EQ(dimension_set_abs(alg, alg.top()), 0u);
    EXPECT_EQ(dimension_set_abs(alg, alg.diag(0, 1)), 0b11u);
    for (Element a = 0; a < 16; ++a) EXPECT_FALSE(dimension_set_abs(alg, alg.cyl(0, a)) & 1u);
}

TEST(Nr, SameDimensionIsIdentity) {
    auto alg = set_algebra(setalg::make_space(2, 2, indiscrete(2)));
    EXPECT_EQ(nr(2, alg).carrier(), alg.carrier());
}

TEST(Nr, ThreeToTwoMatchesLiftedTwoDimensionalAlgebra) {
    for (const auto& top : enumerate_topologies(2)) {
        auto sp2 = setalg::make_space(2, 2, top);
        auto sp3 = setalg::make_space(3, 2, top);
        auto small = set_algebra(sp2);
        auto reduct = nr(2, set_algebra(sp3));
        ASSERT_EQ(reduct.carrier_size(), 16u);
        // x maps to its cylinder; this must hit every reduct element and preserve operations.
        std::vector<Element> image;
        for (Element x : small.carrier()) {
            const Element lx = as_mask(setalg::neat_lift(as_set(sp2, x), 1));
            ASSERT_TRUE(reduct.in_carrier(lx));
            image.push_back(lx);
            for (int i = 0; i < 2; ++i) {
                ASSERT_EQ(as_mask(setalg::neat_lift(as_set(sp2, small.cyl(i, x)), 1)), reduct.cyl(i, lx));
                ASSERT_EQ(as_mask(setalg::neat_lift(as_set(sp2, small.interior(i, x)), 1)), reduct.interior(i, lx));
            }
        }
        std::sort(image.begin(), image.end());
        EXPECT_EQ(image, reduct.carrier());
        EXPECT_TRUE(check_axiom_suite(reduct, Suite::TCA).passed());
    }
}

TEST(Nr, ExcludesElementsUsingHighIndices) {
    auto sp3 = setalg::make_space(3, 2);
    auto alg = set_algebra(sp3);
    const Element d02 = alg.diag(0, 2);
    EXPECT_EQ(dimension_set_abs(alg, d02), 0b101u);
    EXPECT_FALSE(nr(2, alg).in_carrier(d02));
}

TEST(Sg, Examples) {
    auto alg = set_algebra(setalg::make_space(2, 2, indiscrete(2)));
    auto minimal = sg(alg, {});
    EXPECT_EQ(sg(alg, {alg.top()}).carrier(), minimal.carrier());
    // 0, 1, d01 and its complement.
    EXPECT_EQ(minimal.carrier_size(), 4u);
    std::vector<Element> atoms{1, 2, 4, 8};
    EXPECT_EQ(sg(alg, atoms).carrier_size(), 16u);
}

TEST(Sg, MonotoneIdempotentAndSound) {
    auto alg = set_algebra(setalg::make_space(2, 3, FiniteTopology::make(3, {0, 1, 3, 7})));
    std::mt19937_64 rng(11);
    for (int k = 0; k < 5; ++k) {
        std::vector<Element> gens{alg.sample(rng)};
        auto a = sg(alg, gens);
        gens.push_back(alg.sample(rng));
        auto b = sg(alg, gens);
        for (Element x : a.carrier()) EXPECT_TRUE(b.in_carrier(x));
        EXPECT_EQ(sg(a, a.carrier()).carrier(), a.carrier());
        EXPECT_TRUE(check_axiom_suite(a, Suite::CA, CheckMode::sampled(300, k)).passed());
        EXPECT_TRUE(check_axiom_suite(a, Suite::TCA, CheckMode::sampled(300, k)).passed());
    }
}

TEST(Represent, FullSetAlgebraIsRepresentedOnItsOwnBase) {
    auto sp = setalg::make_space(2, 2, discrete(2));
    auto alg = cm(atom_structure_of(sp));
    auto r = try_represent(alg, 2);
    ASSERT_TRUE(r.representation);
    EXPECT_EQ(r.representation->base, 2);
    for (Element x = 0; x < 16; ++x) {
        auto image = represent_element(*r.representation, 2, x);
        EXPECT_EQ(image.count(), static_cast<std::uint64_t>(std::popcount(x)));
    }
    // The identity atom assignment is found first.
    for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(r.representation->images[a], std::vector<std::uint64_t>{a});
}

TEST(Represent, TwoElementAlgebraUsesOnePoint) {
    auto r = try_represent(two_element(2), 3);
    ASSERT_TRUE(r.representation);
    EXPECT_EQ(r.representation->base, 1);
}

TEST(Represent, BrokenAlgebraFailsFast) {
    FiniteAlgebra::Parts p;
    p.dim = 2;
    p.points = 2;
    p.cyl = [](int, Element x) { return x; };
    p.diag = {3, 1, 1, 3};  // d_00 = c_1(d_01 . d_01) = {0} breaks item 7
    auto r = try_represent(FiniteAlgebra(p), 3);
    EXPECT_FALSE(r.representation);
    ASSERT_TRUE(r.violated_axiom);
    EXPECT_EQ(r.violated_axiom->rfind("CA.", 0), 0u);
    EXPECT_THROW(try_represent(set_algebra(setalg::make_space(2, 3)), 2), Error);
}
