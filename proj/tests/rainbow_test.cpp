#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "tcw/error.hpp"
#include "tcw/rainbow.hpp"

using namespace tcw;
using namespace tcw::rainbow;
namespace T = tcw::bao::term;

namespace {

// Two shades: the empty set and {1,2}, so cone tints 1 and 2 are satisfiable
// and tints 3 and 4 are not.
constexpr std::uint64_t kSmallPalette = (1ull << 0) | (1ull << 6);

ColouredGraph triangle(EdgeColour xy, EdgeColour yz, EdgeColour xz) {
    ColouredGraph g(3);
    g.set_edge(0, 1, xy);
    g.set_edge(1, 2, yz);
    g.set_edge(0, 2, xz);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            if (x != y && !g.edge(x, y)->is_green()) g.set_yellow({x, y}, 31);
    return g;
}

}  // namespace

TEST(Signature, Inventories) {
    auto s3 = signature(3);
    EXPECT_EQ(s3.green_count(), 5);
    EXPECT_EQ(s3.white_count(), 2);
    EXPECT_EQ(s3.red_count(), 3);
    EXPECT_EQ(s3.yellow_count(), 32u);
    auto s4 = signature(4);
    EXPECT_EQ(s4.green_count(), 2 + 5);
    EXPECT_EQ(s4.white_count(), 3);
    EXPECT_EQ(s4.red_count(), 6);
    EXPECT_EQ(s4.yellow_count(), 64u);
    try {
        signature(2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimTooSmall);
    }
}

TEST(Colours, CodesRoundTrip) {
    for (int l = 0; l < kEdgeLabels; ++l) {
        auto c = edge_colour(l);
        EXPECT_EQ(EdgeColour::parse(c.to_string()), c);
        EXPECT_EQ(edge_label(c), l);
        EXPECT_EQ(converse_label(converse_label(l)), l);
    }
    EXPECT_EQ(EdgeColour::parse("g0^2"), EdgeColour::g0(2));
    EXPECT_EQ(EdgeColour::parse("r01").converse().to_string(), "r10");
    EXPECT_EQ(yellow_to_string(0b101), "yS:{0,2}");
    EXPECT_EQ(parse_yellow("yS:{0,2}"), 0b101u);
    EXPECT_EQ(parse_yellow("yS:{}"), 0u);
    EXPECT_THROW(EdgeColour::parse("x1"), Error);
    EXPECT_THROW(parse_yellow("y{1}"), Error);
}

TEST(Validity, ForbiddenTriples) {
    auto sig = signature(3);
    auto v = is_valid_coloured_graph(triangle(EdgeColour::g0(1), EdgeColour::g0(2), EdgeColour::w(0)), sig);
    EXPECT_FALSE(v.valid);
    EXPECT_EQ(v.kind, Violation::ForbiddenTriple);
    EXPECT_EQ(v.witness, (std::vector<int>{0, 1, 2}));

    EXPECT_TRUE(is_valid_coloured_graph(triangle(EdgeColour::r(0, 1), EdgeColour::r(1, 2), EdgeColour::r(0, 2)), sig).valid);
    v = is_valid_coloured_graph(triangle(EdgeColour::r(0, 1), EdgeColour::r(0, 2), EdgeColour::r(0, 2)), sig);
    EXPECT_FALSE(v.valid);
    EXPECT_EQ(v.kind, Violation::ForbiddenTriple);

    EXPECT_FALSE(is_valid_coloured_graph(triangle(EdgeColour::g(1), EdgeColour::g(1), EdgeColour::w(1)), sig).valid);
    EXPECT_FALSE(is_valid_coloured_graph(triangle(EdgeColour::g(1), EdgeColour::g0(3), EdgeColour::g0(2)), sig).valid);
    EXPECT_TRUE(is_valid_coloured_graph(triangle(EdgeColour::g(1), EdgeColour::g0(3), EdgeColour::w(0)), sig).valid);
    EXPECT_TRUE(is_valid_coloured_graph(triangle(EdgeColour::g0(1), EdgeColour::g0(1), EdgeColour::w(1)), sig).valid);
}

TEST(Validity, RedTrianglesNeedAConsistentIndexing) {
    // Brute force: consistent iff some f : {x,y,z} -> 3 reads every edge as r_{f(u) f(v)}.
    std::vector<EdgeColour> reds;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) reds.push_back(EdgeColour::r(a, b));
    int consistent = 0;
    for (auto xy : reds)
        for (auto yz : reds)
            for (auto xz : reds) {
                bool exists = false;
                for (int f0 = 0; f0 < 3; ++f0)
                    for (int f1 = 0; f1 < 3; ++f1)
                        for (int f2 = 0; f2 < 3; ++f2)
                            if (f0 != f1 && f1 != f2 && f0 != f2 && xy == EdgeColour::r(f0, f1) &&
                                yz == EdgeColour::r(f1, f2) && xz == EdgeColour::r(f0, f2))
                                exists = true;
                EXPECT_EQ(red_triangle_consistent(xy, yz, xz), exists);
                consistent += exists;
            }
    EXPECT_EQ(consistent, 6);
}

TEST(Validity, CompletenessAndShades) {
    auto sig = signature(3);
    ColouredGraph g(3);
    g.set_edge(0, 1, EdgeColour::w(0));
    auto v = is_valid_coloured_graph(g, sig);
    EXPECT_EQ(v.kind, Violation::Incomplete);

    g = triangle(EdgeColour::w(0), EdgeColour::w(0), EdgeColour::w(1));
    g.set_yellow({0, 1}, 1);
    EXPECT_TRUE(is_valid_coloured_graph(g, sig).valid);

    auto missing = ColouredGraph(2);
    missing.set_edge(0, 1, EdgeColour::w(0));
    missing.set_yellow({0, 1}, 3);
    EXPECT_EQ(is_valid_coloured_graph(missing, sig).kind, Violation::MissingYellow);
    EXPECT_TRUE(is_valid_coloured_graph(missing, sig, false).valid);

    auto on_green = ColouredGraph(2);
    on_green.set_edge(0, 1, EdgeColour::g(1));
    on_green.set_yellow({0, 1}, 3);
    EXPECT_EQ(is_valid_coloured_graph(on_green, sig).kind, Violation::UnexpectedYellow);

    auto bad = ColouredGraph(2);
    bad.set_edge(0, 1, EdgeColour::g0(5));
    EXPECT_EQ(is_valid_coloured_graph(bad, sig).kind, Violation::BadLabel);
    auto big_shade = missing;
    big_shade.set_yellow({1, 0}, 1u << 5);
    EXPECT_EQ(is_valid_coloured_graph(big_shade, sig).kind, Violation::BadLabel);
}

TEST(Validity, ConeHelperFollowsTheTint) {
    for (int n : {3, 4}) {
        auto sig = signature(n);
        for (int tint = sig.tint_min(); tint <= sig.tint_max(); ++tint) {
            YellowSet with = YellowSet{1} << tint;
            EXPECT_TRUE(is_valid_coloured_graph(cone(sig, tint, with), sig).valid) << n << " " << tint;
            auto v = is_valid_coloured_graph(cone(sig, tint, sig.full_yellow() & ~with), sig);
            EXPECT_FALSE(v.valid);
            EXPECT_EQ(v.kind, Violation::ConeTint);
            EXPECT_EQ(v.witness.back(), n - 1);
        }
    }
}

TEST(Validity, GraphJsonRoundTrip) {
    auto sig = signature(3);
    auto g = cone(sig, 2, 0b110);
    auto j = to_json(g);
    EXPECT_EQ(j["edges"]["(0,2)"], "g0^2");
    EXPECT_EQ(j["yellows"]["(0,1)"], "yS:{1,2}");
    EXPECT_EQ(graph_from_json(j), g);
}

TEST(Pieces, EncodingIsABijection) {
    std::set<Piece> seen{kIdentified};
    for (int l = 0; l < kEdgeLabels; ++l)
        for (YellowSet f = 0; f < 32; ++f)
            for (YellowSet b = 0; b < 32; ++b) {
                if (label_is_green(l) && (f || b)) continue;
                Piece p = make_piece(l, f, b);
                ASSERT_LT(p, kPieces);
                EXPECT_EQ(piece_label(p), l);
                EXPECT_EQ(piece_fwd(p), label_is_green(l) ? 0u : f);
                EXPECT_EQ(piece_bwd(p), label_is_green(l) ? 0u : b);
                EXPECT_EQ(reverse_piece(reverse_piece(p)), p);
                seen.insert(p);
            }
    EXPECT_EQ(seen.size(), static_cast<std::size_t>(kPieces));
}

TEST(Atoms, CountFixture) {
    // Regression value; the factored count is cross-checked against the
    // graph-level brute force on reduced palettes below.
    RainbowStructure s;
    EXPECT_EQ(s.atom_count(), 325277152272ull);
    EXPECT_EQ(s.skeleton_count(), 1851u);
    EXPECT_EQ(build_atom_structure(signature(3)).atom_count(), s.atom_count());
}

TEST(Atoms, FactoredCountMatchesBruteForce) {
    for (std::uint64_t pal : {std::uint64_t{0b11}, kSmallPalette}) {
        RainbowStructure s(pal);
        EXPECT_EQ(s.atom_count(), brute_force_atom_count(pal)) << pal;
    }
}

TEST(Atoms, EnumerationOnAReducedPalette) {
    auto sig = signature(3);
    RainbowStructure s(kSmallPalette);
    auto atoms = enumerate_atoms(sig, kSmallPalette);
    ASSERT_EQ(atoms.size(), s.atom_count());
    std::set<std::uint64_t> codes;
    int all_identified = 0;
    for (const auto& a : atoms) {
        codes.insert(a.code());
        ASSERT_TRUE(s.is_valid_atom(a));
        auto [g, surj] = s.graph_of(a);
        ASSERT_TRUE(is_valid_coloured_graph(g, sig).valid);
        ASSERT_EQ(s.atom_of(g, surj), a);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ASSERT_EQ(RainbowStructure::in_diagonal(i, j, a), surj[i] == surj[j]);
        if (g.nodes() == 1) ++all_identified;
    }
    EXPECT_EQ(codes.size(), atoms.size());
    EXPECT_EQ(all_identified, 1);
    // Graph size never decreases along the canonical order.
    int last = 0;
    for (const auto& a : atoms) {
        int size = s.graph_of(a).first.nodes();
        ASSERT_GE(size, last);
        last = size;
    }
    EXPECT_EQ(enumerate_atoms(sig, kSmallPalette), atoms);
}

TEST(Atoms, EnumerationGuards) {
    try {
        enumerate_atoms(signature(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooManyAtoms);
    }
    try {
        enumerate_atoms(signature(4));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimUnsupported);
    }
}

TEST(Atoms, EquivalenceIgnoresNodeNames) {
    RainbowStructure s;
    std::mt19937_64 rng(3);
    for (int k = 0; k < 500; ++k) {
        Atom a = s.random_atom(rng);
        auto [g, surj] = s.graph_of(a);
        std::vector<int> perm(g.nodes());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        ColouredGraph h(g.nodes());
        for (const auto& [e, c] : g.edges()) h.set_edge(perm[e.first], perm[e.second], c);
        for (const auto& [t, y] : g.yellows()) h.set_yellow({perm[t[0]], perm[t[1]]}, y);
        std::array<int, 3> moved{perm[surj[0]], perm[surj[1]], perm[surj[2]]};
        ASSERT_EQ(s.atom_of(h, moved), a);
    }
}

TEST(Atoms, TiComparesTheAwayPart) {
    RainbowStructure s;
    std::mt19937_64 rng(5);
    for (int k = 0; k < 300; ++k) {
        Atom a = s.random_atom(rng), b = s.random_atom(rng);
        auto [ga, sa] = s.graph_of(a);
        auto [gb, sb] = s.graph_of(b);
        for (int i = 0; i < 3; ++i) {
            int x = (i + 1) % 3, y = (i + 2) % 3;
            if (x > y) std::swap(x, y);
            auto part = [](const ColouredGraph& g, const std::array<int, 3>& f, int u, int v) {
                if (f[u] == f[v]) return std::string("=");
                std::string s = g.edge(f[u], f[v])->to_string();
                if (auto y1 = g.yellow({f[u], f[v]})) s += yellow_to_string(*y1) + yellow_to_string(*g.yellow({f[v], f[u]}));
                return s;
            };
            ASSERT_EQ(RainbowStructure::related(i, a, b), part(ga, sa, x, y) == part(gb, sb, x, y));
            ASSERT_TRUE(RainbowStructure::related(i, a, a));
        }
    }
}

TEST(Elements, AgreeWithExplicitSetsOnAReducedPalette) {
    RainbowStructure s(kSmallPalette);
    auto atoms = enumerate_atoms(signature(3), kSmallPalette);
    ElementAlgebra alg(s);
    std::mt19937_64 rng(11);
    auto members = [&](const ElementAlgebra::Value& x) {
        std::vector<bool> m;
        for (const auto& a : atoms) m.push_back(alg.member(x, a));
        return m;
    };
    for (int trial = 0; trial < 8; ++trial) {
        auto x = alg.random(rng);
        auto y = alg.random(rng);
        auto mx = members(x), my = members(y);
        std::uint64_t nx = std::count(mx.begin(), mx.end(), true);
        EXPECT_EQ(alg.size(x), nx);
        for (int i = 0; i < 3; ++i) {
            std::set<Piece> proj;
            for (std::size_t k = 0; k < atoms.size(); ++k)
                if (mx[k]) proj.insert(atoms[k].pieces[i]);
            auto c = members(alg.cyl(i, x));
            for (std::size_t k = 0; k < atoms.size(); ++k) ASSERT_EQ(c[k], proj.count(atoms[k].pieces[i]) > 0);
        }
        auto meet = members(alg.meet(x, y));
        auto neg = members(alg.neg(x));
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            ASSERT_EQ(meet[k], mx[k] && my[k]);
            ASSERT_EQ(neg[k], !mx[k]);
        }
        bool leq = true;
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if (mx[k] && !my[k]) leq = false;
        EXPECT_EQ(alg.leq(x, y), leq);
        EXPECT_EQ(alg.equal(x, y), mx == my);
    }
}

TEST(Elements, DiagonalsAndCounts) {
    RainbowStructure s;
    ElementAlgebra alg(s);
    EXPECT_EQ(alg.size(alg.top()), s.atom_count());
    EXPECT_TRUE(alg.equal(alg.diag(1, 1), alg.top()));
    // Two-node graphs: 3 identifications of 8197 atoms each, plus one point.
    EXPECT_EQ(alg.size(alg.diag(0, 1)), 8198u);
    auto all_same = alg.meet(alg.diag(0, 1), alg.diag(1, 2));
    EXPECT_EQ(alg.size(all_same), 1u);
    EXPECT_TRUE(alg.equal(alg.cyl(2, all_same), alg.diag(0, 1)));
}

TEST(Elements, FalseEquationsAreCaught) {
    using bao::Axiom;
    using bao::Equation;
    RainbowStructure s;
    std::vector<Axiom> wrong{
        {"c-id", "c_0 x = x", {Equation{T::c(0, T::var(0)), T::var(0), Equation::Kind::Equal, {}, "c0"}}},
        {"d-zero", "d_01 = 0", {Equation{T::d(0, 1), T::zero(), Equation::Kind::Equal, {}, "d"}}},
        {"cc", "c_0 c_1 x <= x", {Equation{T::c(0, T::c(1, T::var(0))), T::var(0), Equation::Kind::Leq, {}, "cc"}}},
    };
    auto rep = check_equations(s, bao::Suite::CA, wrong, 6, 1);
    for (const auto& r : rep.axioms) EXPECT_EQ(r.status, bao::Status::Fails) << r.id;
}

TEST(Structure, CaAndTcaHold) {
    RainbowStructure s;
    auto rep = check_ca(s, 2, 9);
    for (const auto& c : rep.atom_checks) EXPECT_TRUE(c.holds) << c.id << " " << c.evidence;
    EXPECT_TRUE(rep.element_checks.passed());
    EXPECT_TRUE(rep.tca_element_checks.passed());
    EXPECT_TRUE(rep.passed());
    auto j = to_json(rep);
    EXPECT_TRUE(j["passed"].get<bool>());
}
