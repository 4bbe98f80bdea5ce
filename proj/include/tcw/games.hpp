#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcw/bao.hpp"
#include "tcw/rainbow.hpp"

namespace tcw::games {

using AtomId = std::uint64_t;

/// What the games need from an atom structure.
class AtomOracle {
public:
    virtual ~AtomOracle() = default;
    virtual int dim() const = 0;
    virtual bool is_atom(AtomId a) const = 0;
    /// a T_i b
    virtual bool related(int i, AtomId a, AtomId b) const = 0;
    virtual bool in_diagonal(int i, int j, AtomId a) const = 0;
    /// Every atom, or nothing when the structure is too large to list.
    virtual std::optional<std::vector<AtomId>> atoms() const = 0;
    /// Descriptor from which make_oracle rebuilds the structure.
    virtual nlohmann::json descriptor() const = 0;
};

/// Oracle over a materialised atom structure (atoms 0..atoms-1).
class ExplicitOracle : public AtomOracle {
public:
    explicit ExplicitOracle(bao::AtomStructure s, nlohmann::json descriptor = nullptr);
    int dim() const override { return s_.dim; }
    bool is_atom(AtomId a) const override { return a < static_cast<AtomId>(s_.atoms); }
    bool related(int i, AtomId a, AtomId b) const override;
    bool in_diagonal(int i, int j, AtomId a) const override;
    std::optional<std::vector<AtomId>> atoms() const override;
    nlohmann::json descriptor() const override;
    const bao::AtomStructure& structure() const { return s_; }

private:
    bao::AtomStructure s_;
    nlohmann::json descriptor_;
    std::vector<std::vector<bool>> rel_;  // per i, row-major atoms x atoms
};

/// The rainbow structure at n = 3; atoms are Atom codes and are not listed.
class RainbowOracle : public AtomOracle {
public:
    RainbowOracle() = default;
    int dim() const override { return 3; }
    bool is_atom(AtomId a) const override;
    bool related(int i, AtomId a, AtomId b) const override;
    bool in_diagonal(int i, int j, AtomId a) const override;
    std::optional<std::vector<AtomId>> atoms() const override { return std::nullopt; }
    nlohmann::json descriptor() const override { return {{"type", "rainbow"}, {"n", 3}}; }
    const rainbow::RainbowStructure& structure() const { return s_; }

private:
    rainbow::RainbowStructure s_;
};

/// Full set algebra atom structure of the space (n, u) with the discrete topology.
std::unique_ptr<AtomOracle> full_set_algebra_oracle(int n, int u);
/// Rebuilds an oracle from its descriptor.
std::unique_ptr<AtomOracle> make_oracle(const nlohmann::json& descriptor);

class AtomicNetwork {
public:
    AtomicNetwork() = default;
    explicit AtomicNetwork(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::vector<int>& nodes() const { return nodes_; }
    bool has_node(int x) const;
    void add_node(int x);
    void set(const std::vector<int>& tuple, AtomId a);
    std::optional<AtomId> get(const std::vector<int>& tuple) const;
    const std::map<std::vector<int>, AtomId>& labels() const { return labels_; }
    /// Restriction to every node except x.
    AtomicNetwork without(int x) const;

    bool operator==(const AtomicNetwork&) const = default;

private:
    int dim_ = 0;
    std::vector<int> nodes_;  // sorted
    std::map<std::vector<int>, AtomId> labels_;
};

nlohmann::json to_json(const AtomicNetwork& n);
AtomicNetwork network_from_json(const nlohmann::json& j);

struct NetworkVerdict {
    bool valid = true;
    std::string condition;  // "total", "atom", "diagonal", "cylinder"
    std::vector<int> tuple;
    std::string detail;
};

/// N(delta) lies in D_ij whenever delta_i = delta_j, and N(delta[i->d]) T_i N(delta).
NetworkVerdict validate_network(const AtomOracle& s, const AtomicNetwork& net);

enum class Mode { F, G };
const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Cylindrifier move (N, face, k, b, l): the tuple is the face with k inserted at position l.
struct Move {
    std::vector<int> face;
    int k = 0;
    AtomId b = 0;
    int l = 0;

    std::vector<int> tuple() const;
    bool operator==(const Move&) const = default;
};

struct GameState {
    std::vector<AtomicNetwork> history;
    int round = 0;
    int m = 0;
    Mode mode = Mode::F;

    const AtomicNetwork& current() const { return history.back(); }
};

/// b <= c_l N(face with x at l), some node x of N.
bool move_condition(const AtomOracle& s, const AtomicNetwork& net, const Move& mv);

/// Moves on the latest network. Fresh nodes are interchangeable, so only
/// the least unused node is offered as a fresh k.
std::vector<Move> legal_forall_moves(const AtomOracle& s, const GameState& state);

/// Every network M over nodes(N) and k extending N off k with M(tuple) = b.
/// Throws BudgetExceeded past `limit` responses.
std::vector<AtomicNetwork> legal_exists_responses(const AtomOracle& s, const AtomicNetwork& net, const Move& mv,
                                                  std::size_t limit = 200000);

/// Networks ∃ may open with after ∀ picks atom a: nodes 0..n-1, N(0..n-1) = a.
std::vector<AtomicNetwork> initial_networks(const AtomOracle& s, AtomId a, std::size_t limit = 200000);

/// Relabels nodes to 0..s-1, choosing the least label encoding.
AtomicNetwork canonical(const AtomicNetwork& net);

enum class Winner { Exists, Forall };
const char* to_string(Winner w);

struct Reply {
    AtomicNetwork network;
    int child = -1;
};

struct MoveRecord {
    bool initial = false;  // round 0: ∀ names the atom `move.b`
    Move move;
    std::vector<Reply> replies;  // empty: ∃ has no legal response
};

struct CertState {
    int id = 0;
    AtomicNetwork network;
    int rounds_left = 0;
    std::vector<MoveRecord> moves;
};

/// An ∃ strategy lists every ∀ move with one reply; a ∀ strategy lists one
/// move per state with every reply.
struct Certificate {
    Winner winner = Winner::Exists;
    int rounds = 0;
    int nodes = 0;
    Mode mode = Mode::F;
    nlohmann::json structure;
    std::vector<CertState> states;  // states[0] is the empty opening state
};

struct SolveStats {
    std::uint64_t expansions = 0;
    std::uint64_t memo_hits = 0;
    std::uint64_t responses = 0;
};

struct SolveResult {
    Winner winner = Winner::Exists;
    Certificate certificate;
    SolveStats stats;
};

/// Minimax over the r-round truncation of F^m or G^m; memoised on canonical
/// latest networks. Throws BudgetExceeded when `budget` expansions are
/// exceeded or the structure cannot list its atoms.
SolveResult solve_bounded(const AtomOracle& s, int m, int rounds, Mode mode, std::uint64_t budget = 2'000'000);

struct VerifyReport {
    bool ok = true;
    std::string detail;
    std::uint64_t states = 0;
    std::uint64_t moves = 0;
};

/// Independent replay of a certificate against the structure.
VerifyReport verify_certificate(const AtomOracle& s, const Certificate& c);

nlohmann::json to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

// ------------------------------------------------------ rainbow script

/// Class of concrete rainbow networks: nodes, identifications, edge labels
/// and, per ordered pair of distinct classes with a non-green edge, the set
/// of shades still possible (bit S set means y_S). Every combination of
/// shades from the masks is one concrete network.
struct GraphNet {
    int nodes = 0;
    std::vector<int> rep;                            // class representative per node
    std::map<std::pair<int, int>, int> edge;         // reps x < y, label read from x to y
    std::map<std::pair<int, int>, std::uint32_t> mask;  // ordered reps

    int label(int x, int y) const;                  // -1 when identified
    std::uint64_t multiplicity() const;             // concrete networks in the class
    /// The concrete network picking the least shade from every mask.
    AtomicNetwork representative() const;
    rainbow::ColouredGraph representative_graph() const;
    bool operator==(const GraphNet&) const = default;
};

nlohmann::json to_json(const GraphNet& g);
GraphNet graphnet_from_json(const nlohmann::json& j);

/// A demand read at graph level: the face nodes, the new node and the atom
/// over the tuple (face with k inserted at l).
struct GraphMove {
    std::vector<int> face;
    int k = 0;
    rainbow::Atom b;
    int l = 0;
};

struct GraphResponses {
    std::vector<GraphNet> networks;
    /// Set when a response is possible for only part of the class: the
    /// class must be split on this ordered pair by this shade mask first.
    std::optional<std::pair<std::pair<int, int>, std::uint32_t>> split;
};

bool graph_move_legal(const GraphNet& g, const GraphMove& mv);
/// Every ∃ response to a fresh-node demand, one class per choice of edges
/// (and of identification), shades left as masks.
GraphResponses graph_responses(const GraphNet& g, const GraphMove& mv);

/// The cone demand on face (0, 1) with apex k and tint t, given the network.
GraphMove cone_demand(const GraphNet& g, int k, int tint);
/// ∀'s zeroth graph: nodes 0..2, Γ(0,1) = w0, Γ(0,2) = g0^tint, Γ(1,2) = g1,
/// both orderings of (0,1) shaded with the full set.
GraphNet zeroth_graph(int tint);

struct ScriptNode {
    enum class Kind { Forall, Split, DeadEnd };
    Kind kind = Kind::Forall;
    int round = 0;
    GraphNet network;
    std::optional<GraphMove> move;
    std::optional<std::pair<std::pair<int, int>, std::uint32_t>> split;
    std::vector<int> children;
};

struct ScriptTree {
    std::vector<int> tints;
    int max_round = 0;
    int max_nodes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t lines = 0;  // concrete ∃ lines, counted with shade multiplicity
    std::vector<ScriptNode> nodes;  // nodes[0] is the root
};

/// Plays ∀'s cone bombardment at n = 3: zeroth graph with tints[0], then
/// cones on face (0,1) with apexes 3, 4, ... and tints[1], tints[2], ...
/// Throws ScriptRefuted when some ∃ line survives every demand or a tint
/// is outside 1..4.
ScriptTree verify_forall_script(const RainbowOracle& s, const std::vector<int>& tints = {1, 2, 3, 4});

struct ScriptCheck {
    bool ok = true;
    std::string detail;
    std::uint64_t nodes_checked = 0;
};

/// Replays a script tree: recomputes every response set, checks every leaf
/// is a dead-end and every network's representative passes validate_network.
ScriptCheck replay_script(const RainbowOracle& s, const ScriptTree& t);

nlohmann::json to_json(const ScriptTree& t);
ScriptTree script_from_json(const nlohmann::json& j);

}  // namespace tcw::games
