#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "tcw/games.hpp"

/// Reproducible experiments shared by the command-line tool, the acceptance
/// runner and the Python module. Each returns a verdict and a JSON report.
namespace tcw::experiments {

inline constexpr const char* kVersion = "0.1.0";

struct Outcome {
    bool passed = false;
    nlohmann::json report;
};

/// Topological and Kripke semantics agree on every Alexandrov space: all
/// preorders of size <= 3, `sampled_large` random preorders of each larger
/// size, all valuations of two atoms, `formulas` random formulas.
Outcome modal_equivalence(int max_size, int depth, int formulas, std::uint64_t seed, int sampled_large = 24);

/// CA and TCA suites on full topological set algebras (2,2), (2,3), (3,2)
/// under every topology on the base.
Outcome axiom_soundness(std::uint64_t samples, std::uint64_t seed);

/// I_0{(0,0)} u I_0{(1,0)} is empty but I_0{(0,0),(1,0)} is not (indiscrete u = 2).
Outcome witness_nonadditive();

/// Discrete and indiscrete interiors differ on {(0,0)} while the cylindric
/// reducts of the two algebras coincide.
Outcome witness_nontermdef();

/// On (2,2) under every topology: I_k x <= x, and neat lifts commute with I_k and c_i.
Outcome lemma_box();

/// Generalized space with indiscrete summands of sizes 1 and 2 (n = 2): the
/// decomposition map is a bijective homomorphism, interiors included.
Outcome subdirect_decomposition();

/// Rainbow atom count, graph validity and the CA suite at n = 3.
Outcome rainbow_ca(std::uint64_t samples, std::uint64_t seed);

/// ∀'s scripted win at n = 3 with a replay.
Outcome forall_script(const std::vector<int>& tints = {1, 2, 3, 4});

/// ∃ wins the r-round truncation on the full set algebra atom structure.
Outcome exists_wins(int n, int u, int m, int rounds, games::Mode mode);

/// Topology/preorder round trips up to `max_size` points and subst against
/// its term form on (2,2).
Outcome round_trips(int max_size);

}  // namespace tcw::experiments
