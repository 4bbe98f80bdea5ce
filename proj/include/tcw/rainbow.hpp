#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcw/bao.hpp"

namespace tcw::rainbow {

/// Shade of yellow y_S, S a subset of {0..n+1}.
using YellowSet = std::uint32_t;

struct RainbowSignature {
    int n = 3;

    int green_count() const { return (n - 2) + (n + 1); }  // g_1..g_{n-2}, g_0^1..g_0^{n+1}
    int white_count() const { return n - 1; }              // w_0..w_{n-2}
    int red_count() const { return n * (n - 1) / 2; }      // r_ij, i < j < n
    std::uint64_t yellow_count() const { return std::uint64_t{1} << (n + 2); }
    YellowSet full_yellow() const { return (YellowSet{1} << (n + 2)) - 1; }
    int tint_min() const { return 1; }
    int tint_max() const { return n + 1; }
};

RainbowSignature signature(int n);

/// Edge colour read from the first node to the second. Reds are oriented:
/// r_ij on (x, y) is r_ji on (y, x); greens and whites are symmetric.
struct EdgeColour {
    enum class Kind : std::uint8_t { Green, GreenZero, White, Red };
    Kind kind = Kind::White;
    int a = 0;
    int b = 0;

    static EdgeColour g(int i) { return {Kind::Green, i, 0}; }
    static EdgeColour g0(int i) { return {Kind::GreenZero, i, 0}; }
    static EdgeColour w(int i) { return {Kind::White, i, 0}; }
    static EdgeColour r(int i, int j) { return {Kind::Red, i, j}; }

    bool is_green() const { return kind == Kind::Green || kind == Kind::GreenZero; }
    bool is_red() const { return kind == Kind::Red; }
    EdgeColour converse() const { return is_red() ? r(b, a) : *this; }
    bool in_signature(const RainbowSignature& sig) const;

    std::string to_string() const;
    static EdgeColour parse(const std::string& s);

    auto operator<=>(const EdgeColour&) const = default;
};

std::string yellow_to_string(YellowSet s);
YellowSet parse_yellow(const std::string& s);

/// Complete graph on nodes 0..nodes-1 with yellow labels on (n-1)-tuples.
class ColouredGraph {
public:
    explicit ColouredGraph(int nodes = 0) : nodes_(nodes) {}

    int nodes() const { return nodes_; }
    void set_edge(int x, int y, EdgeColour c);
    std::optional<EdgeColour> edge(int x, int y) const;
    void set_yellow(const std::vector<int>& tuple, YellowSet s);
    std::optional<YellowSet> yellow(const std::vector<int>& tuple) const;
    const std::map<std::pair<int, int>, EdgeColour>& edges() const { return edges_; }
    const std::map<std::vector<int>, YellowSet>& yellows() const { return yellows_; }

    bool operator==(const ColouredGraph&) const = default;

private:
    int nodes_;
    std::map<std::pair<int, int>, EdgeColour> edges_;  // key x < y, colour read from x to y
    std::map<std::vector<int>, YellowSet> yellows_;
};

nlohmann::json to_json(const ColouredGraph& g);
ColouredGraph graph_from_json(const nlohmann::json& j);

enum class Violation { None, BadLabel, Incomplete, ForbiddenTriple, MissingYellow, UnexpectedYellow, ConeTint };
const char* to_string(Violation v);

struct GraphVerdict {
    bool valid = true;
    Violation kind = Violation::None;
    std::vector<int> witness;
    std::string detail;
};

/// Strict mode treats yellow tuples as order-sensitive and needs every
/// ordering labelled; lenient mode lets one labelled ordering of a node set
/// stand for all orderings.
GraphVerdict is_valid_coloured_graph(const ColouredGraph& g, const RainbowSignature& sig, bool strict = true);

/// Red triangle (x<y<z) with L(x,y)=r_ij, L(y,z)=r_j'k', L(x,z)=r_i*k* is
/// allowed only when i=i*, j=j', k'=k*.
bool red_triangle_consistent(EdgeColour xy, EdgeColour yz, EdgeColour xz);

/// Forbidden-triple test for the three edges of a triangle x<y<z.
bool triangle_forbidden(EdgeColour xy, EdgeColour yz, EdgeColour xz);

/// An i-cone on nodes x_0..x_{n-2} (0..n-2) with apex z (n-1): base edges w_0,
/// base tuple shaded `base_yellow`, every other green-free tuple shaded fully.
ColouredGraph cone(const RainbowSignature& sig, int tint, YellowSet base_yellow);

// ------------------------------------------------------------------ n = 3

/// Edge labels at n = 3: 0 = g1, 1..4 = g0^1..g0^4, 5 = w0, 6 = w1, 7..12 =
/// oriented reds r01, r02, r10, r12, r20, r21.
inline constexpr int kEdgeLabels = 13;
int edge_label(EdgeColour c);
EdgeColour edge_colour(int label);
int converse_label(int label);
inline bool label_is_green(int label) { return label <= 4; }

/// Description of the pair of indices other than i of an atom: whether the
/// two indices are identified, the edge read from the lower to the higher
/// index, and the shades on both orderings (absent on green edges).
using Piece = std::uint16_t;
inline constexpr int kPieces = 1 + 5 + 8 * 32 * 32;
inline constexpr Piece kIdentified = 0;
Piece make_piece(int label, YellowSet fwd, YellowSet bwd);
int piece_label(Piece p);   // -1 for kIdentified
YellowSet piece_fwd(Piece p);
YellowSet piece_bwd(Piece p);
Piece reverse_piece(Piece p);
std::string piece_to_string(Piece p);

/// Atom of the n = 3 structure: pieces[i] describes the pair n \ {i}.
struct Atom {
    std::array<Piece, 3> pieces{};

    std::uint64_t code() const;
    static Atom from_code(std::uint64_t code);
    auto operator<=>(const Atom&) const = default;
};

/// Pieces of the three positions plus the yellow masks each ordered pair may
/// take; every atom is one choice of shades from the masks of one skeleton.
struct Skeleton {
    int kernel = -1;                // -1 all distinct, i when only pair n\{i} is identified, 3 all identified
    std::array<int, 3> labels{};    // per position; -1 when identified
    std::array<YellowSet, 3> fwd{}; // per position: allowed shades as a 32-bit mask over S
    std::array<YellowSet, 3> bwd{};
    std::uint64_t count = 0;
};

/// The atom structure of the finite rainbow algebra at n = 3, kept implicit.
/// `palette` restricts the admissible shades (bit S set means y_S allowed);
/// the default admits all 32.
class RainbowStructure {
public:
    explicit RainbowStructure(std::uint64_t palette = 0xFFFFFFFFull);

    const RainbowSignature& sig() const { return sig_; }
    std::uint64_t palette() const { return palette_; }
    const std::vector<Skeleton>& skeletons() const { return skeletons_; }
    std::uint64_t atom_count() const { return count_; }
    std::uint64_t skeleton_count() const { return skeletons_.size(); }

    bool is_valid_atom(const Atom& a) const;
    /// The coloured graph M_a and the surjection a : 3 -> M_a with first-occurrence node numbering.
    std::pair<ColouredGraph, std::array<int, 3>> graph_of(const Atom& a) const;
    /// Inverse of graph_of; throws InvalidArgument when the graph is not a valid atom.
    Atom atom_of(const ColouredGraph& g, const std::array<int, 3>& surjection) const;

    static bool related(int i, const Atom& a, const Atom& b) { return a.pieces[i] == b.pieces[i]; }
    static bool in_diagonal(int i, int j, const Atom& a);

    /// Visits every atom in canonical order; throws TooManyAtoms above `limit`.
    void for_each_atom(const std::function<void(const Atom&)>& f, std::uint64_t limit = 50'000'000) const;
    Atom random_atom(std::mt19937_64& rng) const;
    /// Pieces on position i realised by some atom of skeleton s.
    bool skeleton_has_piece(const Skeleton& s, int i, Piece p) const;

private:
    RainbowSignature sig_;
    std::uint64_t palette_;
    std::vector<Skeleton> skeletons_;
    std::vector<std::uint64_t> cumulative_;
    std::uint64_t count_ = 0;
};

/// The structure with identity interior descriptors.
RainbowStructure build_atom_structure(const RainbowSignature& sig);

/// Canonical listing of atoms; throws DimUnsupported unless n = 3 and
/// TooManyAtoms when the palette leaves more than `limit` atoms.
std::vector<Atom> enumerate_atoms(const RainbowSignature& sig, std::uint64_t palette = 0xFFFFFFFFull,
                                  std::uint64_t limit = 5'000'000);

/// Independent count: every coloured graph on 1..3 nodes over the palette is
/// generated and validated, and surjections from 3 are quotiented by the
/// atom equivalence.
std::uint64_t brute_force_atom_count(std::uint64_t palette);

namespace detail {
struct Sym;
class Engine;
}  // namespace detail

/// Exact arithmetic on elements of the complex algebra that are Boolean
/// combinations of piece-cylinders corrected on finitely many atoms; the
/// class is closed under every operation. The structure must outlive it.
class ElementAlgebra {
public:
    using Value = std::shared_ptr<const detail::Sym>;

    explicit ElementAlgebra(const RainbowStructure& s);
    ~ElementAlgebra();
    ElementAlgebra(const ElementAlgebra&) = delete;
    ElementAlgebra& operator=(const ElementAlgebra&) = delete;

    Value zero() const;
    Value top() const;
    Value finite(const std::vector<Atom>& atoms) const;
    /// Atoms whose piece at position i lies in `pieces`.
    Value piece_cylinder(int i, const std::vector<Piece>& pieces) const;
    Value neg(const Value& x) const;
    Value meet(const Value& x, const Value& y) const;
    Value join(const Value& x, const Value& y) const;
    Value cyl(int i, const Value& x) const;
    Value diag(int i, int j) const;
    Value eval(const bao::Term& t, const std::vector<Value>& env) const;

    bool member(const Value& x, const Atom& a) const;
    bool equal(const Value& x, const Value& y) const;
    bool leq(const Value& x, const Value& y) const;
    std::uint64_t size(const Value& x) const;
    Value random(std::mt19937_64& rng) const;

private:
    std::unique_ptr<detail::Engine> e_;
};

/// Sampled check of arbitrary equations in the complex algebra.
bao::SuiteReport check_equations(const RainbowStructure& s, bao::Suite label, const std::vector<bao::Axiom>& axioms,
                                 std::uint64_t samples_per_instance, std::uint64_t seed);

struct CheckLine {
    std::string id;
    std::string text;
    bool holds = false;
    std::string evidence;
};

struct CaReport {
    std::vector<CheckLine> atom_checks;     // exhaustive, through the atom-structure correspondents
    bao::SuiteReport element_checks;        // CA suite on sampled elements, exact evaluation
    bao::SuiteReport tca_element_checks;    // TCA suite, interiors are the identity
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;

    bool passed() const;
};

/// CA suite for the complex algebra: exhaustive over atoms, sampled over elements.
CaReport check_ca(const RainbowStructure& s, std::uint64_t samples_per_instance, std::uint64_t seed);

nlohmann::json to_json(const CaReport& r);
nlohmann::json skeleton_json(const Skeleton& s);

}  // namespace tcw::rainbow
