#include <gtest/gtest.h>

#include <set>

#include "tcw/error.hpp"
#include "tcw/games.hpp"

using namespace tcw;
using namespace tcw::games;

namespace {

// Atoms of the full set algebra over 2^2 are tuple codes x0 + 2*x1.
AtomId code(int x0, int x1) { return static_cast<AtomId>(x0 + 2 * x1); }

/// Two atoms, every pair T_i-related, but D_01 empty: no network can exist.
bao::AtomStructure no_diagonal() {
    bao::AtomStructure s;
    s.dim = 2;
    s.atoms = 2;
    s.T.assign(2, {});
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) s.T[i].push_back({a, b});
    s.D = {3, 0, 0, 3};
    s.interior.assign(2, bao::InteriorDesc::ident());
    return s;
}

/// Network of a concrete assignment: node x is sent to point p[x], and the
/// tuple (x, y) carries the atom (p[x], p[y]).
AtomicNetwork point_network(const std::vector<int>& p) {
    AtomicNetwork net(2);
    for (std::size_t x = 0; x < p.size(); ++x) net.add_node(static_cast<int>(x));
    for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t y = 0; y < p.size(); ++y) net.set({int(x), int(y)}, code(p[x], p[y]));
    return net;
}

GraphNet after_demands(const std::vector<int>& tints, int depth) {
    GraphNet g = zeroth_graph(tints[0]);
    for (int r = 1; r <= depth; ++r) {
        auto rs = graph_responses(g, cone_demand(g, g.nodes, tints[r]));
        EXPECT_FALSE(rs.split);
        EXPECT_FALSE(rs.networks.empty());
        g = rs.networks.front();
    }
    return g;
}

}  // namespace

TEST(Networks, PointAssignmentsAreValid) {
    auto s = full_set_algebra_oracle(2, 2);
    EXPECT_TRUE(validate_network(*s, point_network({0, 1, 1})).valid);
    EXPECT_TRUE(validate_network(*s, point_network({1})).valid);
}

TEST(Networks, ViolationsAreNamed) {
    auto s = full_set_algebra_oracle(2, 2);
    auto net = point_network({0, 1});
    net.set({0, 0}, code(0, 1));  // off the diagonal
    auto v = validate_network(*s, net);
    EXPECT_FALSE(v.valid);
    EXPECT_EQ(v.condition, "diagonal");

    net = point_network({0, 1});
    net.set({0, 1}, code(1, 1));  // first entry disagrees with (0,0)
    v = validate_network(*s, net);
    EXPECT_FALSE(v.valid);
    EXPECT_EQ(v.condition, "cylinder");

    AtomicNetwork partial(2);
    partial.add_node(0);
    partial.add_node(1);
    partial.set({0, 0}, 0);
    EXPECT_EQ(validate_network(*s, partial).condition, "total");

    auto bad = point_network({0});
    bad.set({0, 0}, 17);
    EXPECT_EQ(validate_network(*s, bad).condition, "atom");
}

TEST(Networks, JsonRoundTrip) {
    auto net = point_network({1, 0, 1});
    EXPECT_EQ(network_from_json(to_json(net)), net);
}

TEST(Networks, CanonicalFormIgnoresNames) {
    auto a = point_network({0, 1, 1});
    auto b = point_network({1, 0, 1});
    auto c = point_network({1, 1, 0});
    EXPECT_EQ(canonical(a), canonical(b));
    EXPECT_EQ(canonical(b), canonical(c));
    EXPECT_NE(canonical(a), canonical(point_network({0, 0, 1})));
    // renaming nodes does not change the class
    AtomicNetwork far(2);
    for (int x : {3, 7}) far.add_node(x);
    far.set({3, 3}, code(0, 0));
    far.set({3, 7}, code(0, 1));
    far.set({7, 3}, code(1, 0));
    far.set({7, 7}, code(1, 1));
    EXPECT_EQ(canonical(far), canonical(point_network({0, 1})));
}

TEST(Moves, ExistsCopiesThePoint) {
    // In the full set algebra the responses to a fresh-node move correspond
    // to the points the new node may be sent to.
    auto s = full_set_algebra_oracle(2, 2);
    auto net = point_network({0, 1});
    Move mv{{0}, 2, code(0, 1), 1};  // (0, 2) must carry (0, 1)
    ASSERT_TRUE(move_condition(*s, net, mv));
    auto rs = legal_exists_responses(*s, net, mv);
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0], point_network({0, 1, 1}));

    // a demand whose first entry disagrees with node 0 is not a move
    EXPECT_FALSE(move_condition(*s, net, Move{{0}, 2, code(1, 0), 1}));
}

TEST(Moves, ForallMovesInBothModes) {
    auto s = full_set_algebra_oracle(2, 2);
    auto net = point_network({0, 1});
    GameState f{{net}, 1, 3, Mode::F};
    GameState g{{net}, 1, 3, Mode::G};
    auto fm = legal_forall_moves(*s, f);
    auto gm = legal_forall_moves(*s, g);
    // faces: 2 nodes; positions: 2; atoms meeting the condition: 2 per (face, l).
    // G offers only the fresh node 2; F also reuses the node off the face.
    EXPECT_EQ(gm.size(), 2u * 2u * 2u);
    EXPECT_EQ(fm.size(), 2u * 2u * 2u * 2u);
    for (const auto& mv : gm) EXPECT_EQ(mv.k, 2);
    // no fresh node left once the budget is used
    GameState tight{{net}, 1, 2, Mode::G};
    EXPECT_TRUE(legal_forall_moves(*s, tight).empty());
}

TEST(Moves, ReuseReplacesTheOldNode) {
    auto s = full_set_algebra_oracle(2, 2);
    auto net = point_network({0, 1});
    Move mv{{0}, 1, code(0, 0), 1};  // k = 1 is reused and now sits on point 0
    auto rs = legal_exists_responses(*s, net, mv);
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0], point_network({0, 0}));
}

TEST(Moves, OpeningNetworks) {
    auto s = full_set_algebra_oracle(2, 2);
    for (AtomId a = 0; a < 4; ++a) {
        auto opens = initial_networks(*s, a);
        ASSERT_EQ(opens.size(), 1u);
        EXPECT_EQ(opens[0].get({0, 1}), a);
        EXPECT_TRUE(validate_network(*s, opens[0]).valid);
    }
}

TEST(Solver, ExistsWinsOnTheFullSetAlgebra) {
    auto s = full_set_algebra_oracle(2, 2);
    for (Mode mode : {Mode::F, Mode::G}) {
        auto r = solve_bounded(*s, 5, 3, mode);
        EXPECT_EQ(r.winner, Winner::Exists);
        auto v = verify_certificate(*s, r.certificate);
        EXPECT_TRUE(v.ok) << v.detail;
        EXPECT_GT(v.moves, 0u);
    }
}

TEST(Solver, CertificateSurvivesJson) {
    auto s = full_set_algebra_oracle(2, 2);
    auto r = solve_bounded(*s, 4, 2, Mode::F);
    auto back = certificate_from_json(to_json(r.certificate));
    EXPECT_EQ(to_json(back), to_json(r.certificate));
    auto rebuilt = make_oracle(back.structure);
    EXPECT_TRUE(verify_certificate(*rebuilt, back).ok);
}

TEST(Solver, TamperedCertificateIsRejected) {
    auto s = full_set_algebra_oracle(2, 2);
    auto c = solve_bounded(*s, 4, 2, Mode::F).certificate;
    ASSERT_GT(c.states.size(), 1u);
    auto bad = c;
    bad.states[0].moves[0].replies[0].network.set({0, 1}, code(1, 1));
    EXPECT_FALSE(verify_certificate(*s, bad).ok);
    bad = c;
    bad.states[1].moves.pop_back();
    EXPECT_FALSE(verify_certificate(*s, bad).ok);
}

TEST(Solver, ZeroRoundsOnlyNeedsAnOpening) {
    auto s = full_set_algebra_oracle(2, 2);
    auto r = solve_bounded(*s, 2, 0, Mode::G);
    EXPECT_EQ(r.winner, Winner::Exists);
    EXPECT_TRUE(verify_certificate(*s, r.certificate).ok);
}

TEST(Solver, ForallWinsWithoutNetworks) {
    ExplicitOracle s(no_diagonal());
    auto r = solve_bounded(s, 3, 1, Mode::F);
    EXPECT_EQ(r.winner, Winner::Forall);
    ASSERT_EQ(r.certificate.states[0].moves.size(), 1u);
    EXPECT_TRUE(r.certificate.states[0].moves[0].replies.empty());
    auto v = verify_certificate(s, r.certificate);
    EXPECT_TRUE(v.ok) << v.detail;
    EXPECT_EQ(to_json(r.certificate)["states"][0]["moves"][0]["exists"], "dead-end");
}

TEST(Solver, MoreNodesKeepTheWin) {
    auto s = full_set_algebra_oracle(2, 2);
    for (int m = 2; m <= 5; ++m) EXPECT_EQ(solve_bounded(*s, m, 2, Mode::F).winner, Winner::Exists);
}

TEST(Solver, Deterministic) {
    auto s = full_set_algebra_oracle(2, 2);
    auto a = solve_bounded(*s, 4, 2, Mode::G);
    auto b = solve_bounded(*s, 4, 2, Mode::G);
    EXPECT_EQ(to_json(a.certificate), to_json(b.certificate));
    EXPECT_EQ(a.stats.expansions, b.stats.expansions);
}

TEST(Solver, BudgetIsEnforced) {
    auto s = full_set_algebra_oracle(2, 2);
    EXPECT_THROW(
        {
            try {
                solve_bounded(*s, 5, 3, Mode::F, 3);
            } catch (const Error& e) {
                EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
                throw;
            }
        },
        Error);
    RainbowOracle r;
    try {
        solve_bounded(r, 6, 5, Mode::F);
        FAIL() << "rainbow minimax should not complete";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
    }
}

TEST(RainbowGame, ZerothGraphIsValid) {
    RainbowOracle s;
    auto g = zeroth_graph(1);
    EXPECT_TRUE(rainbow::is_valid_coloured_graph(g.representative_graph(), rainbow::signature(3)).valid);
    EXPECT_TRUE(validate_network(s, g.representative()).valid);
    EXPECT_EQ(g.multiplicity(), 1u);
}

TEST(RainbowGame, ConeDemandIsLegal) {
    auto g = zeroth_graph(1);
    auto mv = cone_demand(g, 3, 2);
    EXPECT_TRUE(graph_move_legal(g, mv));
    EXPECT_TRUE(rainbow::RainbowStructure().is_valid_atom(mv.b));
}

TEST(RainbowGame, ApexesAreJoinedByReds) {
    // After two cones with distinct tints on the same white base, the edge
    // between the apexes can only be red.
    auto g = zeroth_graph(1);
    auto rs = graph_responses(g, cone_demand(g, 3, 2));
    ASSERT_FALSE(rs.split);
    ASSERT_FALSE(rs.networks.empty());
    std::set<int> labels;
    for (const auto& r : rs.networks) {
        int l = r.label(2, 3);
        EXPECT_TRUE(rainbow::edge_colour(l).is_red()) << rainbow::edge_colour(l).to_string();
        labels.insert(l);
    }
    EXPECT_EQ(labels.size(), rs.networks.size());
}

TEST(RainbowGame, ResponsesAreValidNetworks) {
    RainbowOracle s;
    auto g = after_demands({1, 2, 3}, 2);
    EXPECT_TRUE(validate_network(s, g.representative()).valid);
    EXPECT_TRUE(rainbow::is_valid_coloured_graph(g.representative_graph(), rainbow::signature(3)).valid);
}

TEST(RainbowGame, ScriptForcesDeadEnds) {
    RainbowOracle s;
    auto t = verify_forall_script(s);
    EXPECT_LE(t.max_round, 4);
    EXPECT_LE(t.max_nodes, 6);
    // One class per red label on the apex edge (6 oriented reds); the
    // second demand leaves one reply each and the third none.
    EXPECT_EQ(t.nodes[0].children.size(), 6u);
    EXPECT_EQ(t.leaves, 6u);
    EXPECT_EQ(t.max_round, 3);
    EXPECT_EQ(t.max_nodes, 6);
    for (const auto& n : t.nodes)
        if (n.children.empty()) EXPECT_EQ(n.kind, ScriptNode::Kind::DeadEnd);
    auto c = replay_script(s, t);
    EXPECT_TRUE(c.ok) << c.detail;
}

TEST(RainbowGame, ScriptSurvivesJson) {
    RainbowOracle s;
    auto t = verify_forall_script(s);
    auto back = script_from_json(to_json(t));
    EXPECT_EQ(to_json(back), to_json(t));
    EXPECT_TRUE(replay_script(s, back).ok);
}

TEST(RainbowGame, TamperedScriptIsRejected) {
    RainbowOracle s;
    auto t = verify_forall_script(s);
    auto bad = t;
    bad.tints.back() = 1;
    EXPECT_FALSE(replay_script(s, bad).ok);
}

TEST(RainbowGame, RepeatedTintLetsExistsSurvive) {
    RainbowOracle s;
    try {
        verify_forall_script(s, {1, 4, 5});
        FAIL() << "tint 5 is outside the palette";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ScriptRefuted);
    }
    try {
        verify_forall_script(s, {1, 1, 1, 1});
        FAIL() << "a repeated tint cannot force red apex edges";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ScriptRefuted);
    }
}
