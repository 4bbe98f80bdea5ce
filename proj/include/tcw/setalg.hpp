#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "tcw/topology.hpp"

namespace tcw::setalg {

/// V(x) for each base point x: an explicit family of point-sets.
struct ChangSystem {
    std::vector<std::vector<PointSet>> families;  // each family sorted ascending

    bool has(int point, PointSet s) const;
};

/// Constant map x -> opens of t.
ChangSystem chang_from_topology(const FiniteTopology& t);
/// x -> {A : x in int A}; its box operators coincide with the interiors of t.
ChangSystem neighbourhood_chang(const FiniteTopology& t);

/// Tuples s in ^nU are coded as sum s_i * u^i.
inline constexpr std::uint64_t kMaxTuples = std::uint64_t{1} << 24;

class SetAlgebraSpace {
public:
    SetAlgebraSpace(int dim, int base, std::optional<FiniteTopology> topology = std::nullopt,
                    std::optional<ChangSystem> chang = std::nullopt);

    int dim() const { return dim_; }
    int base() const { return base_; }
    std::uint64_t tuple_count() const { return tuple_count_; }
    std::uint64_t stride(int i) const { return strides_[i]; }
    const std::optional<FiniteTopology>& topology() const { return topology_; }
    const std::optional<ChangSystem>& chang() const { return chang_; }

    std::uint64_t encode(std::span<const int> s) const;
    std::vector<int> decode(std::uint64_t code) const;
    int coordinate(std::uint64_t code, int i) const { return static_cast<int>((code / strides_[i]) % base_); }

private:
    int dim_;
    int base_;
    std::uint64_t tuple_count_;
    std::vector<std::uint64_t> strides_;
    std::optional<FiniteTopology> topology_;
    std::optional<ChangSystem> chang_;
};

using SpacePtr = std::shared_ptr<const SetAlgebraSpace>;

SpacePtr make_space(int dim, int base, std::optional<FiniteTopology> topology = std::nullopt,
                    std::optional<ChangSystem> chang = std::nullopt);

/// Element of a full set algebra: a set of n-tuples over the base.
class TupleSet {
public:
    explicit TupleSet(SpacePtr space);
    static TupleSet unit(SpacePtr space);
    static TupleSet from_tuples(SpacePtr space, std::span<const std::vector<int>> tuples);
    static TupleSet from_codes(SpacePtr space, std::span<const std::uint64_t> codes);

    const SpacePtr& space() const { return space_; }
    bool contains(std::uint64_t code) const { return (words_[code >> 6] >> (code & 63)) & 1u; }
    bool contains(std::span<const int> tuple) const { return contains(space_->encode(tuple)); }
    void insert(std::uint64_t code) { words_[code >> 6] |= std::uint64_t{1} << (code & 63); }
    void erase(std::uint64_t code) { words_[code >> 6] &= ~(std::uint64_t{1} << (code & 63)); }
    std::uint64_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<std::uint64_t> codes() const;
    std::vector<std::vector<int>> tuples() const;

    TupleSet operator|(const TupleSet& o) const;
    TupleSet operator&(const TupleSet& o) const;
    /// Complement relative to the unit ^nU.
    TupleSet operator~() const;
    bool subset_of(const TupleSet& o) const;
    bool operator==(const TupleSet& o) const;

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void trim();
    SpacePtr space_;
    std::vector<std::uint64_t> words_;
};

TupleSet cyl(int i, const TupleSet& x);
TupleSet diag(int i, int j, const SpacePtr& space);
/// I_k, or Cl_k when `dual` is set.
TupleSet interior_op(int k, const TupleSet& x, bool dual = false);
TupleSet box_op(int k, const TupleSet& x);
/// s is in the result iff the tuple (s_tau(0), ..., s_tau(n-1)) is in x.
TupleSet subst(std::span<const int> tau, const TupleSet& x);
/// The map sending i to j and fixing every other index.
std::vector<int> replacement(int dim, int i, int j);
/// Cylinder {s in ^(n+extra)U : s restricted to n is in x}, same base and topology.
TupleSet neat_lift(const TupleSet& x, int extra);
/// Bit i set iff c_i x != x.
std::uint64_t dimension_set(const TupleSet& x);

/// Summands with pairwise disjoint bases; all share one dimension.
struct GeneralizedSpace {
    std::vector<SpacePtr> summands;

    int dim() const;
    /// ^n(U_0 + U_1 + ...) carrying the coproduct topology when every summand has one.
    SpacePtr union_space() const;
    int offset(std::size_t summand) const;
};

/// Elements of the generalized algebra live inside the unit, a subset of
/// ^n of the union base; operations are relativized to the unit.
TupleSet generalized_unit(const GeneralizedSpace& g);
TupleSet gs_complement(const GeneralizedSpace& g, const TupleSet& x);
TupleSet gs_cyl(const GeneralizedSpace& g, int i, const TupleSet& x);
TupleSet gs_diag(const GeneralizedSpace& g, int i, int j);
TupleSet gs_interior(const GeneralizedSpace& g, int k, const TupleSet& x);

std::vector<TupleSet> decompose_generalized(const GeneralizedSpace& g, const TupleSet& x);
TupleSet compose_generalized(const GeneralizedSpace& g, std::span<const TupleSet> parts);

nlohmann::json to_json(const TupleSet& x);
TupleSet tuple_set_from_json(const nlohmann::json& j);

}  // namespace tcw::setalg
