#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcw/error.hpp"
#include "tcw/experiments.hpp"
#include "tcw/games.hpp"
#include "tcw/modal.hpp"
#include "tcw/rainbow.hpp"
#include "tcw/topology.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace tcw;

namespace {

// Reports cross the boundary as JSON text and are decoded on the Python side.
std::string text(const json& j) { return j.dump(); }

std::string outcome(const experiments::Outcome& o) { return text({{"passed", o.passed}, {"report", o.report}}); }

}  // namespace

PYBIND11_MODULE(_tcw, m) {
    m.doc() = "Topological cylindric algebra workbench";
    m.attr("__version__") = experiments::kVersion;

    static py::exception<Error> error(m, "TcwError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("enumerate_topologies", [](int size) {
        json out = json::array();
        for (const auto& t : enumerate_topologies(size)) out.push_back(to_json(t));
        return text(out);
    });
    m.def("interior", [](const std::string& topology, std::vector<int> points) {
        auto t = topology_from_json(json::parse(topology));
        return members(interior(t, from_members(points)));
    });
    m.def("eval_formula", [](const std::string& formula, const std::string& topology, const std::map<int, std::vector<int>>& val) {
        modal::Valuation v;
        for (const auto& [k, pts] : val) v[k] = from_members(pts);
        auto t = topology_from_json(json::parse(topology));
        return members(modal::eval_topo({t, v}, modal::parse_formula(formula)));
    });

    m.def("modal_equivalence", [](int max_size, int depth, int formulas, std::uint64_t seed) {
        return outcome(experiments::modal_equivalence(max_size, depth, formulas, seed));
    });
    m.def("axiom_soundness", [](std::uint64_t samples, std::uint64_t seed) { return outcome(experiments::axiom_soundness(samples, seed)); });
    m.def("witness_nonadditive", [] { return outcome(experiments::witness_nonadditive()); });
    m.def("witness_nontermdef", [] { return outcome(experiments::witness_nontermdef()); });
    m.def("lemma_box", [] { return outcome(experiments::lemma_box()); });
    m.def("subdirect_decomposition", [] { return outcome(experiments::subdirect_decomposition()); });
    m.def("round_trips", [](int max_size) { return outcome(experiments::round_trips(max_size)); });
    m.def("rainbow_ca", [](std::uint64_t samples, std::uint64_t seed) { return outcome(experiments::rainbow_ca(samples, seed)); });

    m.def("rainbow_atom_count", [](std::uint64_t palette) { return rainbow::RainbowStructure(palette).atom_count(); });
    m.def("forall_script", [](std::vector<int> tints) { return outcome(experiments::forall_script(tints)); });
    m.def("solve_bounded", [](int n, int u, int nodes, int rounds, const std::string& mode) {
        auto s = games::full_set_algebra_oracle(n, u);
        auto r = games::solve_bounded(*s, nodes, rounds, games::mode_from_string(mode));
        return text({{"winner", games::to_string(r.winner)}, {"certificate", games::to_json(r.certificate)}});
    });
    m.def("verify_certificate", [](const std::string& certificate) {
        auto c = games::certificate_from_json(json::parse(certificate));
        auto s = games::make_oracle(c.structure);
        auto r = games::verify_certificate(*s, c);
        return std::make_pair(r.ok, r.detail);
    });
    m.def("replay_script", [](const std::string& tree) {
        games::RainbowOracle s;
        auto r = games::replay_script(s, games::script_from_json(json::parse(tree)));
        return std::make_pair(r.ok, r.detail);
    });
}
