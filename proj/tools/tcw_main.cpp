// tcw: command-line front end. Every subcommand writes one JSON report and
// exits 0 when its verdict matches the expectation, 1 when it does not and 2
// on usage errors.
#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "tcw/bao.hpp"
#include "tcw/error.hpp"
#include "tcw/experiments.hpp"
#include "tcw/games.hpp"
#include "tcw/modal.hpp"
#include "tcw/rainbow.hpp"
#include "tcw/setalg.hpp"
#include "tcw/topology.hpp"

using namespace tcw;
using nlohmann::json;

namespace {

struct Config {
    std::uint64_t seed = 0;
    std::uint64_t samples = 1000;
    int max_size = 3;
    int rounds = 3;
    int nodes = 5;
    std::string out;
    std::string expect;
    std::string config;

    int size = 2;
    int depth = 3;
    int formulas = 500;
    std::string formula;
    std::string search = "topo";
    std::string valuation = "{}";
    std::string order;
    int n = 2;
    int u = 2;
    std::string topology = "discrete";
    std::string suite = "CA";
    std::string op = "cyl";
    int i = 0;
    int j = 1;
    std::string x = "[]";
    std::string structure = "full-set-algebra";
    std::string mode = "F";
    std::vector<int> tints{1, 2, 3, 4};
    std::string in;
    std::uint64_t limit = 20;
    std::uint64_t palette = 0xFFFFFFFFull;
    int m = 1;
    int max_base = 2;
    std::uint64_t budget = 2'000'000;
};

json echo(const Config& c) {
    return {{"seed", c.seed},         {"samples", c.samples},   {"max_size", c.max_size}, {"rounds", c.rounds},
            {"nodes", c.nodes},       {"size", c.size},         {"depth", c.depth},       {"formulas", c.formulas},
            {"formula", c.formula},   {"search", c.search},     {"valuation", c.valuation}, {"order", c.order},
            {"n", c.n},               {"u", c.u},               {"topology", c.topology}, {"suite", c.suite},
            {"op", c.op},             {"i", c.i},               {"j", c.j},               {"x", c.x},
            {"structure", c.structure}, {"mode", c.mode},       {"tints", c.tints},       {"in", c.in},
            {"limit", c.limit},       {"palette", c.palette},   {"m", c.m},               {"max_base", c.max_base},
            {"budget", c.budget},     {"expect", c.expect}};
}

struct Result {
    json body;
    std::string verdict;
    std::optional<std::string> default_expect;
};

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string(what) + ": " + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_json(ss.str(), path.c_str());
}

FiniteTopology topology_of(const std::string& spec, int size) {
    if (spec == "discrete") return discrete(size);
    if (spec == "indiscrete") return indiscrete(size);
    json j = parse_json(spec, "topology");
    if (j.is_array()) {
        json opens = j;
        j = {{"size", size}, {"opens", opens}};
    }
    return topology_from_json(j);
}

setalg::SpacePtr space_of(const Config& c) {
    auto top = topology_of(c.topology, c.u);
    return setalg::make_space(c.n, c.u, top, setalg::chang_from_topology(top));
}

setalg::TupleSet tuples_of(const setalg::SpacePtr& sp, const std::string& text) {
    auto t = parse_json(text, "x").get<std::vector<std::vector<int>>>();
    return setalg::TupleSet::from_tuples(sp, t);
}

std::string holds(bool b) { return b ? "holds" : "fails"; }

bao::CheckMode check_mode(const Config& c) {
    bao::CheckMode mode;
    mode.samples = c.samples;
    mode.seed = c.seed;
    return mode;
}

bao::FiniteAlgebra algebra_of(const Config& c) {
    if (c.structure == "full-set-algebra") return bao::set_algebra(space_of(c), bao::BoxSource::Interior);
    return bao::cm(bao::atom_structure_from_json(read_json_file(c.structure)));
}

// ------------------------------------------------------------ topo

Result topo_enum(const Config& c) {
    auto all = enumerate_topologies(c.size);
    json list = json::array();
    for (const auto& t : all) list.push_back(to_json(t));
    return {{{"size", c.size}, {"count", all.size()}, {"topologies", list}}, std::to_string(all.size()), std::nullopt};
}

Result topo_check(const Config& c) {
    try {
        auto t = topology_of(c.topology, c.size);
        auto p = specialization_preorder(t);
        bool trip = alexandrov(p) == t;
        return {{{"topology", to_json(t)},
                 {"almost_discrete", is_almost_discrete(t)},
                 {"specialization", to_json(p)},
                 {"round_trip", trip}},
                "valid",
                "valid"};
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse) throw;
        return {{{"error", e.what()}}, "invalid", "valid"};
    }
}

// ------------------------------------------------------------ modal

modal::Valuation valuation_of(const std::string& text) {
    modal::Valuation v;
    const json j = parse_json(text, "valuation");
    for (const auto& [k, pts] : j.items()) v[std::stoi(k)] = point_set_from_json(pts);
    return v;
}

Result modal_eval(const Config& c) {
    if (c.formula.empty()) throw Error(ErrorKind::InvalidArgument, "--formula is required");
    auto f = modal::parse_formula(c.formula);
    auto val = valuation_of(c.valuation);
    PointSet s;
    json where;
    if (!c.order.empty()) {
        auto p = preorder_from_json(parse_json(c.order, "order"));
        s = modal::eval_kripke({p, val}, f);
        where = {{"kripke", to_json(p)}};
    } else {
        auto t = topology_of(c.topology, c.size);
        s = modal::eval_topo({t, val}, f);
        where = {{"topology", to_json(t)}};
    }
    json set = point_set_json(s);
    return {{{"formula", f.to_string()}, {"model", where}, {"satisfied_at", set}}, set.dump(), std::nullopt};
}

Result modal_countermodel(const Config& c) {
    if (c.formula.empty()) throw Error(ErrorKind::InvalidArgument, "--formula is required");
    auto f = modal::parse_formula(c.formula);
    auto mode = c.search == "kripke" ? modal::SearchMode::Kripke : modal::SearchMode::Topo;
    if (c.search != "kripke" && c.search != "topo") throw Error(ErrorKind::InvalidArgument, "--search must be topo or kripke");
    auto r = modal::find_countermodel(f, c.max_size, mode, c.seed);
    return {{{"formula", f.to_string()}, {"search", modal::to_json(r)}},
            r.model ? "countermodel" : "none-up-to-bound",
            std::nullopt};
}

Result modal_equiv(const Config& c) {
    auto o = experiments::modal_equivalence(c.max_size, c.depth, c.formulas, c.seed);
    return {o.report, o.passed ? "equal" : "different", "equal"};
}

// ------------------------------------------------------------ setalg

Result setalg_op(const Config& c) {
    auto sp = space_of(c);
    auto x = tuples_of(sp, c.x);
    setalg::TupleSet r(sp);
    if (c.op == "complement") r = ~x;
    else if (c.op == "cyl") r = setalg::cyl(c.i, x);
    else if (c.op == "diag") r = setalg::diag(c.i, c.j, sp);
    else if (c.op == "interior") r = setalg::interior_op(c.i, x);
    else if (c.op == "closure") r = setalg::interior_op(c.i, x, true);
    else if (c.op == "box") r = setalg::box_op(c.i, x);
    else if (c.op == "subst") r = setalg::subst(setalg::replacement(c.n, c.i, c.j), x);
    else if (c.op == "lift") r = setalg::neat_lift(x, 1);
    else throw Error(ErrorKind::InvalidArgument, "unknown op '" + c.op + "'");
    json out = r.tuples();
    return {{{"op", c.op}, {"x", x.tuples()}, {"result", out}, {"dimension_set", setalg::dimension_set(r)}}, out.dump(), std::nullopt};
}

Result setalg_axioms(const Config& c) {
    if (c.topology == "all") {
        auto o = experiments::axiom_soundness(c.samples, c.seed);
        return {o.report, holds(o.passed), "holds"};
    }
    auto alg = bao::set_algebra(space_of(c));
    auto ca = bao::check_axiom_suite(alg, bao::Suite::CA, check_mode(c));
    auto tca = bao::check_axiom_suite(alg, bao::Suite::TCA, check_mode(c));
    return {{{"CA", bao::to_json(ca)}, {"TCA", bao::to_json(tca)}}, holds(ca.passed() && tca.passed()), "holds"};
}

Result setalg_nonadditive(const Config&) {
    auto o = experiments::witness_nonadditive();
    return {o.report, o.passed ? "non-additive" : "additive", "non-additive"};
}

Result setalg_nontermdef(const Config&) {
    auto o = experiments::witness_nontermdef();
    return {o.report, o.passed ? "interiors-differ" : "no-witness", "interiors-differ"};
}

// ------------------------------------------------------------ bao

Result bao_cm(const Config& c) {
    bao::AtomStructure s = c.structure == "full-set-algebra" ? bao::atom_structure_of(space_of(c))
                                                             : bao::atom_structure_from_json(read_json_file(c.structure));
    auto alg = bao::cm(s);
    auto r = bao::check_axiom_suite(alg, bao::suite_from_string(c.suite), check_mode(c));
    return {{{"atoms", s.atoms}, {"dim", s.dim}, {"carrier_size", alg.carrier_size()}, {"suite", bao::to_json(r)}},
            holds(r.passed()),
            "holds"};
}

Result bao_check(const Config& c) {
    auto alg = algebra_of(c);
    auto r = bao::check_axiom_suite(alg, bao::suite_from_string(c.suite), check_mode(c));
    return {{{"suite", bao::to_json(r)}, {"flagged_interiors", alg.flagged_interiors()}}, holds(r.passed()), "holds"};
}

Result bao_nr(const Config& c) {
    auto alg = algebra_of(c);
    auto reduct = bao::nr(c.m, alg);
    auto r = bao::check_axiom_suite(reduct, bao::Suite::CA, check_mode(c));
    return {{{"m", c.m}, {"carrier_size", reduct.carrier_size()}, {"CA", bao::to_json(r)}}, holds(r.passed()), "holds"};
}

Result bao_sg(const Config& c) {
    auto alg = algebra_of(c);
    auto gens = parse_json(c.x, "x").get<std::vector<bao::Element>>();
    auto sub = bao::sg(alg, gens);
    auto carrier = sub.carrier();
    return {{{"generators", gens}, {"carrier_size", carrier.size()}, {"carrier", carrier}}, std::to_string(carrier.size()), std::nullopt};
}

Result bao_represent(const Config& c) {
    auto alg = algebra_of(c);
    auto r = bao::try_represent(alg, c.max_base);
    return {bao::to_json(r, alg.dim()), r.representation ? "represented" : "not-found", std::nullopt};
}

// ------------------------------------------------------------ rainbow

json atom_json(const rainbow::Atom& a) {
    json pieces = json::array();
    for (auto p : a.pieces) pieces.push_back(rainbow::piece_to_string(p));
    return {{"code", a.code()}, {"pieces", pieces}};
}

Result rainbow_atoms(const Config& c) {
    rainbow::RainbowStructure s(c.palette);
    json listed = json::array();
    bool complete = s.atom_count() <= c.limit;
    if (complete) {
        for (const auto& a : rainbow::enumerate_atoms(s.sig(), c.palette, c.limit)) listed.push_back(atom_json(a));
    } else {
        std::mt19937_64 rng(c.seed);
        for (std::uint64_t k = 0; k < c.limit; ++k) listed.push_back(atom_json(s.random_atom(rng)));
    }
    json skeletons = json::array();
    for (const auto& sk : s.skeletons())
        if (skeletons.size() < c.limit) skeletons.push_back(rainbow::skeleton_json(sk));
    return {{{"n", 3},
             {"palette", c.palette},
             {"atom_count", s.atom_count()},
             {"skeleton_count", s.skeleton_count()},
             {"listing", complete ? "complete" : "seeded sample"},
             {"atoms", listed},
             {"skeletons", skeletons}},
            std::to_string(s.atom_count()),
            std::nullopt};
}

Result rainbow_structure(const Config& c) {
    auto o = experiments::rainbow_ca(c.samples, c.seed);
    return {o.report, holds(o.passed), "holds"};
}

// ------------------------------------------------------------ game

Result game_script(const Config& c) {
    if (c.n != 3 && c.n != 2) throw Error(ErrorKind::DimUnsupported, "the script exists for n = 3 only");
    auto o = experiments::forall_script(c.tints);
    return {o.report, o.passed ? "forall" : "refuted", "forall"};
}

Result game_solve(const Config& c) {
    std::unique_ptr<games::AtomOracle> s;
    if (c.structure == "full-set-algebra") s = games::full_set_algebra_oracle(c.n, c.u);
    else if (c.structure == "rainbow") s = std::make_unique<games::RainbowOracle>();
    else s = games::make_oracle(read_json_file(c.structure));
    try {
        auto r = games::solve_bounded(*s, c.nodes, c.rounds, games::mode_from_string(c.mode), c.budget);
        auto v = games::verify_certificate(*s, r.certificate);
        return {{{"method", "minimax"},
                 {"truncation", std::to_string(c.rounds) + "-round truncation"},
                 {"winner", games::to_string(r.winner)},
                 {"verified", v.ok},
                 {"stats", {{"expansions", r.stats.expansions}, {"memo_hits", r.stats.memo_hits}, {"responses", r.stats.responses}}},
                 {"certificate", games::to_json(r.certificate)}},
                games::to_string(r.winner),
                std::nullopt};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetExceeded) throw;
        auto* rb = dynamic_cast<games::RainbowOracle*>(s.get());
        if (!rb) return {{{"method", "minimax"}, {"inconclusive", e.what()}}, "inconclusive", std::nullopt};
        auto o = experiments::forall_script(c.tints);
        o.report["method"] = "script";
        o.report["minimax"] = e.what();
        return {o.report, o.passed ? "forall" : "inconclusive", std::nullopt};
    }
}

Result game_verify(const Config& c) {
    if (c.in.empty()) throw Error(ErrorKind::InvalidArgument, "--in is required");
    json doc = read_json_file(c.in);
    // Accept a bare artifact or a tcw report wrapping one.
    if (doc.contains("result")) doc = doc["result"];
    if (doc.contains("certificate")) doc = doc["certificate"];
    else if (doc.contains("tree")) doc = doc["tree"];
    const std::string kind = doc.value("kind", "");
    if (kind == "forall-script") {
        games::RainbowOracle s;
        auto r = games::replay_script(s, games::script_from_json(doc));
        return {{{"kind", kind}, {"ok", r.ok}, {"detail", r.detail}, {"nodes_checked", r.nodes_checked}},
                r.ok ? "valid" : "invalid",
                "valid"};
    }
    if (kind == "exists-strategy" || kind == "forall-strategy") {
        auto cert = games::certificate_from_json(doc);
        auto s = games::make_oracle(cert.structure);
        auto r = games::verify_certificate(*s, cert);
        return {{{"kind", kind}, {"ok", r.ok}, {"detail", r.detail}, {"states", r.states}, {"moves", r.moves}},
                r.ok ? "valid" : "invalid",
                "valid"};
    }
    throw Error(ErrorKind::Parse, "no certificate or script tree in " + c.in);
}

void apply_config_file(CLI::App& app, Config& c) {
    if (c.config.empty()) return;
    json j = read_json_file(c.config);
    auto unset = [&](const char* flag) { return app.get_option(std::string("--") + flag)->count() == 0; };
    auto take = [&](const char* key, const char* flag, auto& field) {
        if (j.contains(key) && unset(flag)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("seed", "seed", c.seed);
    take("samples", "samples", c.samples);
    take("max_size", "max-size", c.max_size);
    take("rounds", "rounds", c.rounds);
    take("nodes", "nodes", c.nodes);
    take("out", "out", c.out);
    take("expect", "expect", c.expect);
    take("size", "size", c.size);
    take("depth", "depth", c.depth);
    take("formulas", "formulas", c.formulas);
    take("formula", "formula", c.formula);
    take("n", "n", c.n);
    take("u", "u", c.u);
    take("topology", "topology", c.topology);
    take("suite", "suite", c.suite);
    take("structure", "structure", c.structure);
    take("mode", "mode", c.mode);
    take("tints", "tints", c.tints);
    take("budget", "budget", c.budget);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological cylindric algebra workbench"};
    app.set_version_flag("--version", std::string("tcw ") + experiments::kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Config c;
    app.add_option("--seed", c.seed, "seed for every random choice");
    app.add_option("--samples", c.samples, "sampled environments or elements");
    app.add_option("--max-size", c.max_size, "largest space searched");
    app.add_option("--rounds", c.rounds, "rounds of the truncated game");
    app.add_option("--nodes", c.nodes, "node budget m");
    app.add_option("--out", c.out, "write the report here instead of stdout");
    app.add_option("--expect", c.expect, "expected verdict");
    app.add_option("--config", c.config, "JSON file overriding defaults");
    app.add_option("--size", c.size, "number of points");
    app.add_option("--depth", c.depth, "modal depth of generated formulas");
    app.add_option("--formulas", c.formulas, "number of generated formulas");
    app.add_option("--formula", c.formula, "formula text, e.g. 'I(p0 -> p1)'");
    app.add_option("--search", c.search, "countermodel search: topo or kripke");
    app.add_option("--valuation", c.valuation, "JSON object atom -> points");
    app.add_option("--order", c.order, "JSON preorder {size, leq}");
    app.add_option("--n", c.n, "dimension");
    app.add_option("--u", c.u, "base size");
    app.add_option("--topology", c.topology, "discrete, indiscrete, JSON opens, or 'all'");
    app.add_option("--suite", c.suite, "CA, TCA, Chang, S4Chang or S5Chang");
    app.add_option("--op", c.op, "complement, cyl, diag, interior, closure, box, subst or lift");
    app.add_option("--i", c.i, "first index");
    app.add_option("--j", c.j, "second index");
    app.add_option("--x", c.x, "JSON tuples (setalg) or element masks (bao sg)");
    app.add_option("--structure", c.structure, "full-set-algebra, rainbow, or a JSON file");
    app.add_option("--mode", c.mode, "game mode F or G");
    app.add_option("--tints", c.tints, "tints of the scripted cones")->delimiter(',');
    app.add_option("--in", c.in, "artifact to verify");
    app.add_option("--limit", c.limit, "listing limit");
    app.add_option("--palette", c.palette, "admitted shades as a bit mask");
    app.add_option("--m", c.m, "neat reduct dimension");
    app.add_option("--max-base", c.max_base, "largest base tried by represent");
    app.add_option("--budget", c.budget, "search expansions before giving up");

    std::string command;
    std::function<Result(const Config&)> handler;
    auto leaf = [&](CLI::App* group, const char* name, const char* help, Result (*h)(const Config&)) {
        group->add_subcommand(name, help)->callback([&, group, name, h] {
            command = group->get_name() + " " + name;
            handler = h;
        });
    };
    auto* topo = app.add_subcommand("topo", "finite topologies")->require_subcommand(1);
    leaf(topo, "enum", "list every topology on --size points", topo_enum);
    leaf(topo, "check", "validate --topology and its specialization preorder", topo_check);
    auto* modal = app.add_subcommand("modal", "S4 semantics")->require_subcommand(1);
    leaf(modal, "eval", "evaluate --formula", modal_eval);
    leaf(modal, "countermodel", "search for a countermodel to --formula", modal_countermodel);
    leaf(modal, "equiv", "Kripke and Alexandrov semantics agree", modal_equiv);
    auto* sa = app.add_subcommand("setalg", "topological set algebras")->require_subcommand(1);
    leaf(sa, "op", "apply --op to --x", setalg_op);
    leaf(sa, "axioms", "CA and TCA suites", setalg_axioms);
    leaf(sa, "witness-nonadditive", "interior is not additive", setalg_nonadditive);
    leaf(sa, "witness-nontermdef", "interiors are not term-definable", setalg_nontermdef);
    auto* bao = app.add_subcommand("bao", "algebras with operators")->require_subcommand(1);
    leaf(bao, "cm", "complex algebra of an atom structure", bao_cm);
    leaf(bao, "check", "run an axiom suite", bao_check);
    leaf(bao, "nr", "neat reduct", bao_nr);
    leaf(bao, "sg", "generated subalgebra", bao_sg);
    leaf(bao, "represent", "bounded representation search", bao_represent);
    auto* rb = app.add_subcommand("rainbow", "rainbow construction at n = 3")->require_subcommand(1);
    leaf(rb, "atoms", "count and list atoms", rainbow_atoms);
    leaf(rb, "structure", "CA suite on the complex algebra", rainbow_structure);
    auto* game = app.add_subcommand("game", "atomic games")->require_subcommand(1);
    leaf(game, "solve", "bounded minimax with a certificate", game_solve);
    leaf(game, "script", "verify the scripted forall strategy", game_script);
    leaf(game, "verify-transcript", "replay a certificate or script tree", game_verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Result r;
    try {
        apply_config_file(app, c);
        r = handler(c);
    } catch (const Error& e) {
        std::cerr << "tcw: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "tcw: " << e.what() << "\n";
        return 2;
    }

    const std::string expected = !c.expect.empty() ? c.expect : r.default_expect.value_or("");
    const bool matches = expected.empty() || expected == r.verdict;
    json doc = {{"tool", "tcw"},
                {"version", experiments::kVersion},
                {"command", command},
                {"config", echo(c)},
                {"result", r.body},
                {"verdict", r.verdict},
                {"expected", expected.empty() ? json(nullptr) : json(expected)},
                {"matches", matches}};
    const std::string text = doc.dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) {
            std::cerr << "tcw: cannot write " << c.out << "\n";
            return 2;
        }
        f << text;
    }
    return matches ? 0 : 1;
}
