#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tcw/topology.hpp"

namespace tcw::modal {

/// Formula over atoms p0, p1, ... with ~, &, |, ->, <->, the interior box I
/// and the temporal NEXT (written X in text).
class Formula {
public:
    enum class Op { Atom, Not, And, Or, Implies, Iff, Interior, Next };

    static Formula atom(int index);
    static Formula negation(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);
    static Formula iff(Formula a, Formula b);
    static Formula box(Formula f);
    static Formula next(Formula f);

    Op op() const { return node_->op; }
    int atom_index() const { return node_->atom; }
    const Formula& arg() const { return node_->children.at(0); }
    const Formula& lhs() const { return node_->children.at(0); }
    const Formula& rhs() const { return node_->children.at(1); }

    /// Nesting depth of I and X only.
    int modal_depth() const;
    int size() const;
    std::set<int> atoms() const;
    bool has_next() const;

    std::string to_string() const;
    nlohmann::json to_json() const;
    static Formula from_json(const nlohmann::json& j);

    bool operator==(const Formula& other) const;

private:
    struct Node {
        Op op;
        int atom = -1;
        std::vector<Formula> children;
    };
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(Op op, std::vector<Formula> children);

    std::shared_ptr<const Node> node_;
};

Formula parse_formula(std::string_view text);

/// Missing atoms denote the empty set.
using Valuation = std::map<int, PointSet>;

struct TopoModel {
    FiniteTopology topology;
    Valuation valuation;
};

struct KripkeModel {
    Preorder order;
    Valuation valuation;
};

class DynamicModel {
public:
    /// Throws NotContinuous when f is not continuous, OutOfRangePoint when f
    /// is not a total map on the base.
    DynamicModel(FiniteTopology topology, std::vector<int> map, Valuation valuation);

    const FiniteTopology& topology() const { return topology_; }
    const std::vector<int>& map() const { return map_; }
    const Valuation& valuation() const { return valuation_; }

private:
    FiniteTopology topology_;
    std::vector<int> map_;
    Valuation valuation_;
};

bool is_continuous(const FiniteTopology& t, std::span<const int> f);
PointSet preimage(std::span<const int> f, PointSet s);

/// NEXT is rejected (no dynamics); use eval_dynamic.
PointSet eval_topo(const TopoModel& m, const Formula& f);
PointSet eval_kripke(const KripkeModel& m, const Formula& f);
PointSet eval_dynamic(const DynamicModel& m, const Formula& f);

/// Every preorder on `size` <= 5 points, each once.
std::vector<Preorder> enumerate_preorders(int size);

enum class SearchMode { Topo, Kripke };

struct Countermodel {
    int size = 0;
    std::optional<FiniteTopology> topology;
    std::optional<Preorder> order;
    Valuation valuation;
    int point = 0;
};

struct CountermodelReport {
    std::optional<Countermodel> model;
    int max_size = 0;
    bool exhaustive = true;  // false when valuations were sampled
    std::uint64_t seed = 0;
    std::uint64_t models_checked = 0;
};

/// Absence of a countermodel is only evidence up to `max_size`.
CountermodelReport find_countermodel(const Formula& f, int max_size, SearchMode mode,
                                     std::uint64_t seed = 0, int samples_per_frame = 64);

/// Random formula with at most `modal_depth` nested modalities over atoms
/// p0..p(atoms-1); `allow_next` adds X.
Formula random_formula(std::mt19937_64& rng, int atoms, int modal_depth, int max_size = 12,
                       bool allow_next = false);

nlohmann::json to_json(const Countermodel& m);
nlohmann::json to_json(const CountermodelReport& r);

}  // namespace tcw::modal
