#include "tcw/experiments.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "tcw/bao.hpp"
#include "tcw/error.hpp"
#include "tcw/modal.hpp"
#include "tcw/rainbow.hpp"
#include "tcw/setalg.hpp"
#include "tcw/topology.hpp"

namespace tcw::experiments {

using setalg::TupleSet;

namespace {

std::vector<TupleSet> all_elements(const setalg::SpacePtr& sp) {
    std::vector<TupleSet> out;
    const std::uint64_t n = sp->tuple_count();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        TupleSet x(sp);
        for (std::uint64_t c = 0; c < n; ++c)
            if (m >> c & 1) x.insert(c);
        out.push_back(std::move(x));
    }
    return out;
}

nlohmann::json tuples_json(const TupleSet& x) { return x.tuples(); }

}  // namespace

Outcome modal_equivalence(int max_size, int depth, int formulas, std::uint64_t seed, int sampled_large) {
    if (max_size < 1 || max_size > 5) throw Error(ErrorKind::InvalidArgument, "max size must lie in 1..5");
    std::mt19937_64 rng(seed);
    std::vector<modal::Formula> fs;
    for (int k = 0; k < formulas; ++k) fs.push_back(modal::random_formula(rng, 2, depth));

    Outcome out{true, {}};
    nlohmann::json per_size = nlohmann::json::array();
    std::uint64_t checks = 0;
    nlohmann::json mismatch;
    for (int size = 1; size <= max_size; ++size) {
        auto orders = modal::enumerate_preorders(size);
        const bool exhaustive = size <= 3;
        if (!exhaustive && static_cast<int>(orders.size()) > sampled_large) {
            std::shuffle(orders.begin(), orders.end(), rng);
            orders.erase(orders.begin() + sampled_large, orders.end());
        }
        const PointSet values = PointSet{1} << size;
        for (const auto& p : orders) {
            const auto top = alexandrov(p);
            for (PointSet v0 = 0; v0 < values; ++v0)
                for (PointSet v1 = 0; v1 < values; ++v1) {
                    modal::Valuation val{{0, v0}, {1, v1}};
                    modal::TopoModel tm{top, val};
                    modal::KripkeModel km{p, val};
                    for (const auto& f : fs) {
                        ++checks;
                        if (out.passed && modal::eval_topo(tm, f) != modal::eval_kripke(km, f)) {
                            out.passed = false;
                            mismatch = {{"order", to_json(p)}, {"formula", f.to_string()}, {"valuation", {v0, v1}}};
                        }
                    }
                }
        }
        per_size.push_back({{"size", size}, {"preorders", orders.size()}, {"exhaustive", exhaustive}});
    }
    out.report = {{"equal", out.passed}, {"formulas", formulas},    {"depth", depth},
                  {"sizes", per_size},   {"checks", checks},        {"mismatch", mismatch}};
    return out;
}

Outcome axiom_soundness(std::uint64_t samples, std::uint64_t seed) {
    Outcome out{true, {}};
    nlohmann::json spaces = nlohmann::json::array();
    for (auto [n, u] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
        int index = 0;
        for (const auto& top : enumerate_topologies(u)) {
            auto alg = bao::set_algebra(setalg::make_space(n, u, top));
            bao::CheckMode mode;
            mode.samples = samples;
            mode.seed = seed;
            auto ca = bao::check_axiom_suite(alg, bao::Suite::CA, mode);
            auto tca = bao::check_axiom_suite(alg, bao::Suite::TCA, mode);
            bool ok = ca.passed() && tca.passed();
            out.passed = out.passed && ok;
            std::uint64_t envs = 0;
            for (const auto* r : {&ca, &tca})
                for (const auto& a : r->axioms) envs += a.environments;
            nlohmann::json entry = {{"n", n},   {"u", u},  {"topology", index++}, {"opens", to_json(top)},
                                    {"passed", ok}, {"environments", envs}};
            if (!ok) entry["reports"] = {{"CA", bao::to_json(ca)}, {"TCA", bao::to_json(tca)}};
            spaces.push_back(std::move(entry));
        }
    }
    out.report = {{"violations", out.passed ? 0 : 1}, {"samples", samples}, {"seed", seed}, {"spaces", spaces}};
    return out;
}

Outcome witness_nonadditive() {
    auto sp = setalg::make_space(2, 2, indiscrete(2));
    auto a = TupleSet::from_tuples(sp, std::vector<std::vector<int>>{{0, 0}});
    auto b = TupleSet::from_tuples(sp, std::vector<std::vector<int>>{{1, 0}});
    auto separate = setalg::interior_op(0, a) | setalg::interior_op(0, b);
    auto together = setalg::interior_op(0, a | b);
    Outcome out;
    out.passed = separate.empty() && together == (a | b) && !(separate == together);
    out.report = {{"space", {{"n", 2}, {"u", 2}, {"topology", "indiscrete"}}},
                  {"x", tuples_json(a)},
                  {"y", tuples_json(b)},
                  {"I0x_union_I0y", tuples_json(separate)},
                  {"I0_of_union", tuples_json(together)},
                  {"additive", separate == together}};
    return out;
}

Outcome witness_nontermdef() {
    auto d = setalg::make_space(2, 2, discrete(2));
    auto i = setalg::make_space(2, 2, indiscrete(2));
    bool reducts_equal = true;
    const auto ed = all_elements(d);
    const auto ei = all_elements(i);
    for (std::size_t k = 0; k < ed.size(); ++k)
        for (int c = 0; c < 2; ++c)
            reducts_equal = reducts_equal && setalg::cyl(c, ed[k]).codes() == setalg::cyl(c, ei[k]).codes();
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            reducts_equal = reducts_equal && setalg::diag(p, q, d).codes() == setalg::diag(p, q, i).codes();
    const std::vector<std::vector<int>> named{{0, 0}};
    auto on_d = setalg::interior_op(0, TupleSet::from_tuples(d, named));
    auto on_i = setalg::interior_op(0, TupleSet::from_tuples(i, named));
    Outcome out;
    out.passed = reducts_equal && on_d.codes() != on_i.codes();
    out.report = {{"element", named},
                  {"cylindric_reducts_equal", reducts_equal},
                  {"I0_discrete", tuples_json(on_d)},
                  {"I0_indiscrete", tuples_json(on_i)}};
    return out;
}

Outcome lemma_box() {
    Outcome out{true, {}};
    std::uint64_t checks = 0;
    nlohmann::json failure;
    for (const auto& top : enumerate_topologies(2)) {
        auto sp = setalg::make_space(2, 2, top);
        for (const auto& x : all_elements(sp))
            for (int k = 0; k < 2; ++k) {
                ++checks;
                auto ix = setalg::interior_op(k, x);
                bool ok = ix.subset_of(x) && setalg::neat_lift(ix, 1) == setalg::interior_op(k, setalg::neat_lift(x, 1)) &&
                          setalg::neat_lift(setalg::cyl(k, x), 1) == setalg::cyl(k, setalg::neat_lift(x, 1));
                if (!ok && out.passed) failure = {{"opens", to_json(top)}, {"x", tuples_json(x)}, {"k", k}};
                out.passed = out.passed && ok;
            }
    }
    out.report = {{"topologies", enumerate_topologies(2).size()}, {"elements", 16}, {"checks", checks}, {"failure", failure}};
    return out;
}

Outcome subdirect_decomposition() {
    setalg::GeneralizedSpace g{{setalg::make_space(2, 1, indiscrete(1)), setalg::make_space(2, 2, indiscrete(2))}};
    const auto unit = generalized_unit(g);
    const auto members = unit.codes();
    std::vector<TupleSet> elems;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << members.size()); ++m) {
        TupleSet x(g.union_space());
        for (std::size_t c = 0; c < members.size(); ++c)
            if (m >> c & 1) x.insert(members[c]);
        elems.push_back(std::move(x));
    }
    Outcome out{true, {}};
    std::string failure;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok && out.passed) failure = what;
        out.passed = out.passed && ok;
    };
    std::set<std::vector<std::vector<std::uint64_t>>> images;
    for (const auto& x : elems) {
        auto px = setalg::decompose_generalized(g, x);
        std::vector<std::vector<std::uint64_t>> key;
        for (const auto& p : px) key.push_back(p.codes());
        images.insert(key);
        check(setalg::compose_generalized(g, px) == x, "compose after decompose");
        auto comp = setalg::decompose_generalized(g, setalg::gs_complement(g, x));
        for (std::size_t s = 0; s < px.size(); ++s) check(comp[s] == ~px[s], "complement");
        for (int i = 0; i < 2; ++i) {
            auto cx = setalg::decompose_generalized(g, setalg::gs_cyl(g, i, x));
            auto ix = setalg::decompose_generalized(g, setalg::gs_interior(g, i, x));
            for (std::size_t s = 0; s < px.size(); ++s) {
                check(cx[s] == setalg::cyl(i, px[s]), "cylindrification");
                check(ix[s] == setalg::interior_op(i, px[s]), "interior");
            }
        }
        for (const auto& y : elems) {
            auto py = setalg::decompose_generalized(g, y);
            auto j = setalg::decompose_generalized(g, x | y);
            auto m = setalg::decompose_generalized(g, x & y);
            for (std::size_t s = 0; s < px.size(); ++s) {
                check(j[s] == (px[s] | py[s]), "join");
                check(m[s] == (px[s] & py[s]), "meet");
            }
        }
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto dij = setalg::decompose_generalized(g, setalg::gs_diag(g, i, j));
            for (std::size_t s = 0; s < g.summands.size(); ++s) check(dij[s] == setalg::diag(i, j, g.summands[s]), "diagonal");
        }
    // Bijective: injective on all 2^|unit| elements, and the product of the
    // summand algebras has the same size.
    std::uint64_t product = 1;
    for (const auto& s : g.summands) product <<= s->tuple_count();
    check(images.size() == elems.size() && product == elems.size(), "bijection");
    out.report = {{"summand_sizes", {1, 2}}, {"elements", elems.size()}, {"injective", images.size() == elems.size()},
                  {"homomorphism", out.passed}, {"failure", failure}};
    return out;
}

Outcome rainbow_ca(std::uint64_t samples, std::uint64_t seed) {
    rainbow::RainbowStructure s;
    auto rep = rainbow::check_ca(s, samples, seed);
    Outcome out;
    out.passed = rep.passed() && s.atom_count() > 0;
    out.report = {{"n", 3},
                  {"atom_count", s.atom_count()},
                  {"skeletons", s.skeleton_count()},
                  {"check", rainbow::to_json(rep)}};
    return out;
}

Outcome forall_script(const std::vector<int>& tints) {
    games::RainbowOracle s;
    Outcome out;
    try {
        auto tree = games::verify_forall_script(s, tints);
        auto replay = games::replay_script(s, tree);
        // round 0 is the zeroth graph, so max_round + 1 rounds are played
        out.passed = replay.ok && tree.max_round + 1 <= 5 && tree.max_nodes <= 6;
        out.report = {{"status", out.passed ? 0 : 1},
                      {"rounds_played", tree.max_round + 1},
                      {"replay", {{"ok", replay.ok}, {"detail", replay.detail}, {"nodes_checked", replay.nodes_checked}}},
                      {"tree", games::to_json(tree)}};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ScriptRefuted) throw;
        out.passed = false;
        out.report = {{"status", 1}, {"refuted", e.what()}, {"tints", tints}};
    }
    return out;
}

Outcome exists_wins(int n, int u, int m, int rounds, games::Mode mode) {
    auto s = games::full_set_algebra_oracle(n, u);
    auto r = games::solve_bounded(*s, m, rounds, mode);
    auto v = games::verify_certificate(*s, r.certificate);
    Outcome out;
    out.passed = r.winner == games::Winner::Exists && v.ok;
    out.report = {{"winner", games::to_string(r.winner)},
                  {"verified", v.ok},
                  {"verify_detail", v.detail},
                  {"stats", {{"expansions", r.stats.expansions}, {"memo_hits", r.stats.memo_hits}, {"responses", r.stats.responses}}},
                  {"certificate", games::to_json(r.certificate)}};
    return out;
}

Outcome round_trips(int max_size) {
    Outcome out{true, {}};
    std::uint64_t topologies = 0, orders = 0, substs = 0;
    for (int size = 1; size <= max_size; ++size) {
        for (const auto& t : enumerate_topologies(size)) {
            ++topologies;
            out.passed = out.passed && alexandrov(specialization_preorder(t)) == t;
        }
        for (const auto& p : modal::enumerate_preorders(size)) {
            ++orders;
            out.passed = out.passed && specialization_preorder(alexandrov(p)) == p;
        }
    }
    auto sp = setalg::make_space(2, 2);
    for (const auto& x : all_elements(sp))
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                if (i == j) continue;
                ++substs;
                out.passed = out.passed && setalg::subst(setalg::replacement(2, i, j), x) == setalg::cyl(i, setalg::diag(i, j, sp) & x);
            }
    out.report = {{"max_size", max_size}, {"topologies", topologies}, {"preorders", orders}, {"subst_checks", substs},
                  {"identities_hold", out.passed}};
    return out;
}

}  // namespace tcw::experiments
