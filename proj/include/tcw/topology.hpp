#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace tcw {

/// Points are 0..size-1; a point-set is a bit mask over them.
using PointSet = std::uint64_t;
inline constexpr int kMaxPoints = 64;

constexpr PointSet full_set(int size) {
    return size >= 64 ? ~PointSet{0} : ((PointSet{1} << size) - 1);
}
constexpr bool contains(PointSet s, int p) { return (s >> p) & 1u; }
constexpr bool subset_of(PointSet a, PointSet b) { return (a & ~b) == 0; }
inline int cardinality(PointSet s) { return std::popcount(s); }
std::vector<int> members(PointSet s);
PointSet from_members(std::span<const int> points);

enum class Preset { None, Discrete, Indiscrete };

class FiniteTopology {
public:
    /// Validates eagerly; throws Error with the offending witness sets.
    static FiniteTopology make(int size, std::vector<PointSet> opens, Preset preset = Preset::None);

    int size() const { return size_; }
    PointSet base() const { return full_set(size_); }
    const std::vector<PointSet>& opens() const { return opens_; }
    bool is_open(PointSet s) const;

    bool operator==(const FiniteTopology&) const = default;

private:
    FiniteTopology(int size, std::vector<PointSet> opens) : size_(size), opens_(std::move(opens)) {}

    int size_ = 0;
    std::vector<PointSet> opens_;  // sorted ascending by mask, deduplicated
};

FiniteTopology discrete(int size);
FiniteTopology indiscrete(int size);

PointSet interior(const FiniteTopology& t, PointSet a);
PointSet closure(const FiniteTopology& t, PointSet a);
bool is_almost_discrete(const FiniteTopology& t);

class Preorder {
public:
    /// `pairs` lists (x, y) with x <= y; reflexive pairs may be omitted only
    /// when `close` is true, in which case the reflexive-transitive closure is taken.
    static Preorder make(int size, std::span<const std::pair<int, int>> pairs, bool close = false);
    static Preorder identity(int size);
    static Preorder total(int size);

    int size() const { return static_cast<int>(up_.size()); }
    bool leq(int x, int y) const { return contains(up_[x], y); }
    PointSet up_set(int x) const { return up_[x]; }
    std::vector<std::pair<int, int>> pairs() const;

    bool operator==(const Preorder&) const = default;

private:
    explicit Preorder(std::vector<PointSet> up) : up_(std::move(up)) {}
    std::vector<PointSet> up_;
};

/// Opens are exactly the up-closed sets.
FiniteTopology alexandrov(const Preorder& p);
/// x <= y iff every open containing x also contains y (x lies in cl{y}).
Preorder specialization_preorder(const FiniteTopology& t);

/// Summand i's point p maps to offset(i) + p, offsets by cumulative sizes.
FiniteTopology coproduct(std::span<const FiniteTopology> parts);
/// Points of s are re-indexed 0..|s|-1 in ascending order.
FiniteTopology subspace(const FiniteTopology& t, PointSet s);

/// Every topology on `size` <= 4 points, each exactly once, in ascending
/// order of the sorted open family.
std::vector<FiniteTopology> enumerate_topologies(int size);

nlohmann::json to_json(const FiniteTopology& t);
FiniteTopology topology_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Preorder& p);
Preorder preorder_from_json(const nlohmann::json& j);
nlohmann::json point_set_json(PointSet s);
PointSet point_set_from_json(const nlohmann::json& j);

}  // namespace tcw
