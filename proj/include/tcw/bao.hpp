#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcw/setalg.hpp"
#include "tcw/topology.hpp"

namespace tcw::bao {

/// Elements are bit masks over at most 64 underlying points (atoms of the
/// ambient powerset algebra).
using Element = std::uint64_t;

/// Either the identity, or box semantics over a successor table:
/// I(X) = {a : succ[a] is a subset of X}.
struct InteriorDesc {
    bool identity = true;
    std::vector<Element> succ;

    static InteriorDesc ident() { return {}; }
    static InteriorDesc table(std::vector<Element> succ) { return {false, std::move(succ)}; }
};

struct AtomStructure {
    int dim = 0;
    int atoms = 0;
    std::vector<std::vector<std::pair<int, int>>> T;  // per index i
    std::vector<Element> D;                           // row-major, D[i * dim + j]
    std::vector<InteriorDesc> interior;               // per index i

    Element diag(int i, int j) const { return D[i * dim + j]; }
};

nlohmann::json to_json(const AtomStructure& s);
AtomStructure atom_structure_from_json(const nlohmann::json& j);

/// Atoms are the tuple codes of the space; T_i is agreement off i, and the
/// interior descriptors come from the topology (every finite topology is
/// Alexandrov, so a successor table always exists).
AtomStructure atom_structure_of(const setalg::SpacePtr& space);

class FiniteAlgebra {
public:
    using Unary = std::function<Element(int, Element)>;

    struct Parts {
        int dim = 0;
        int points = 0;
        Unary cyl;
        std::vector<Element> diag;  // row-major
        Unary interior;             // empty means identity
        Unary box;                  // empty means no modalities
        std::optional<std::vector<Element>> carrier;  // empty means the full powerset
    };

    explicit FiniteAlgebra(Parts parts);

    int dim() const { return p_.dim; }
    int points() const { return p_.points; }
    Element top() const { return full_set(p_.points); }

    Element join(Element a, Element b) const { return a | b; }
    Element meet(Element a, Element b) const { return a & b; }
    Element neg(Element a) const { return ~a & top(); }
    Element cyl(int i, Element x) const;
    Element diag(int i, int j) const;
    Element interior(int i, Element x) const;
    bool has_box() const { return static_cast<bool>(p_.box); }
    Element box(int i, Element x) const;

    bool full_carrier() const { return !p_.carrier.has_value(); }
    /// 2^points for a full powerset carrier (saturating at 2^64 - 1).
    std::uint64_t carrier_size() const;
    /// Throws TooManyAtoms when the powerset has more than 2^20 members.
    std::vector<Element> carrier() const;
    bool in_carrier(Element x) const;
    Element element_at(std::uint64_t index) const;
    Element sample(std::mt19937_64& rng) const;

    /// Indices whose interior descriptor failed validation at construction.
    const std::vector<int>& flagged_interiors() const { return flagged_; }
    void set_flagged(std::vector<int> f) { flagged_ = std::move(f); }

    const Parts& parts() const { return p_; }

private:
    void check_index(int i) const;
    Parts p_;
    std::vector<int> flagged_;
};

/// Complex algebra; `materialize` asks for an explicit carrier (at most 20 atoms).
FiniteAlgebra cm(const AtomStructure& s, bool materialize = false);

enum class BoxSource { None, Interior, Chang };
/// Full set algebra over the space, which must have at most 64 tuples.
FiniteAlgebra set_algebra(const setalg::SpacePtr& space, BoxSource boxes = BoxSource::None);

// ---------------------------------------------------------------- terms

struct Term {
    enum class Op { Var, Zero, One, Join, Meet, Neg, Cyl, Diag, Interior, Box, Subst, Q, Xor };
    Op op = Op::Zero;
    int i = 0;
    int j = 0;
    std::vector<Term> kids;

    std::string to_string() const;
};

namespace term {
Term var(int k);
Term zero();
Term one();
Term join(Term a, Term b);
Term meet(Term a, Term b);
Term neg(Term a);
Term c(int i, Term a);
Term d(int i, int j);
Term I(int i, Term a);
Term box(int i, Term a);
/// s_i^j(x) = c_i(d_ij . x); the identity when i = j.
Term s(int i, int j, Term a);
/// q_i(x) = -c_i -x.
Term q(int i, Term a);
/// a (+) b = (-a + b) . (-b + a).
Term oplus(Term a, Term b);
}  // namespace term

/// `var` must satisfy: no index in `indices` lies in its dimension set.
struct Guard {
    int var = 0;
    std::vector<int> indices;
};

struct Equation {
    enum class Kind { Equal, Leq };
    Term lhs;
    Term rhs;
    Kind kind = Kind::Equal;
    std::vector<Guard> guards;
    std::string label;

    std::string to_string() const;
};

using Env = std::map<int, Element>;

Element eval_term(const FiniteAlgebra& alg, const Term& t, const Env& env);
int max_var(const Term& t);

struct CheckMode {
    enum class Kind { Auto, Exhaustive, Sampled };
    Kind kind = Kind::Auto;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;

    static CheckMode exhaustive() { return {Kind::Exhaustive, 0, 0}; }
    static CheckMode sampled(std::uint64_t count, std::uint64_t seed) { return {Kind::Sampled, count, seed}; }
};

enum class Status { Holds, Fails, Vacuous };
const char* to_string(Status s);

struct Verdict {
    Status status = Status::Holds;
    bool exhaustive = false;
    std::uint64_t environments = 0;  // environments that passed the guards
    std::optional<Env> counterexample;
    Element lhs_value = 0;
    Element rhs_value = 0;
};

/// Exhaustive when requested or, in Auto mode, when |carrier|^vars <= 2^24.
Verdict check_equation(const FiniteAlgebra& alg, const Equation& e, CheckMode mode = {});

enum class Suite { CA, TCA, Chang, S4Chang, S5Chang };
const char* to_string(Suite s);
Suite suite_from_string(const std::string& s);

/// One axiom of a suite together with its index instances.
struct Axiom {
    std::string id;
    std::string text;
    std::vector<Equation> instances;
};
std::vector<Axiom> axiom_suite(Suite suite, int dim);

struct AxiomResult {
    std::string id;
    std::string text;
    Status status = Status::Holds;
    std::size_t instances = 0;
    std::uint64_t environments = 0;
    std::optional<std::string> failing_instance;
    std::optional<Env> counterexample;
};

struct SuiteReport {
    Suite suite = Suite::CA;
    bool exhaustive = false;
    std::vector<AxiomResult> axioms;

    bool passed() const;
    std::vector<std::string> failed_ids() const;
};

SuiteReport check_axiom_suite(const FiniteAlgebra& alg, Suite suite, CheckMode mode = {});

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const SuiteReport& r);

// ------------------------------------------------------- derived algebras

std::uint64_t dimension_set_abs(const FiniteAlgebra& alg, Element x);

/// Elements with dimension set inside {0..m-1}, with operations of index < m.
FiniteAlgebra nr(int m, const FiniteAlgebra& alg);

/// Least subuniverse containing `gens`, 0, 1 and every d_ij, closed under
/// every operation (including boxes when present).
FiniteAlgebra sg(const FiniteAlgebra& alg, const std::vector<Element>& gens);

/// Minimal nonzero members of the carrier.
std::vector<Element> atoms_of(const FiniteAlgebra& alg);

struct Representation {
    int base = 0;
    FiniteTopology topology = discrete(1);
    std::vector<Element> atoms;                  // atoms of the algebra
    std::vector<std::vector<std::uint64_t>> images;  // tuple codes per atom
};

struct RepresentReport {
    std::optional<Representation> representation;
    std::optional<std::string> violated_axiom;
    int max_base = 0;
    std::uint64_t candidates_tried = 0;
};

/// Bounded search for an embedding into a full topological set algebra of
/// the same dimension with base size at most `max_base`. A failed search is
/// not evidence of non-representability.
RepresentReport try_represent(const FiniteAlgebra& alg, int max_base);

/// Applies the representation to an element: union of the atom images.
setalg::TupleSet represent_element(const Representation& r, int dim, Element x);

nlohmann::json to_json(const RepresentReport& r, int dim);

}  // namespace tcw::bao
