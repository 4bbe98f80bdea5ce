#include "tcw/topology.hpp"

#include <algorithm>
#include <sstream>

#include "tcw/error.hpp"

namespace tcw {

namespace {

std::string show(PointSet s) {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (int p : members(s)) {
        out << (first ? "" : ",") << p;
        first = false;
    }
    out << '}';
    return out.str();
}

void check_points(int size, PointSet s) {
    if (!subset_of(s, full_set(size))) {
        throw Error(ErrorKind::OutOfRangePoint, show(s) + " is not a subset of a " + std::to_string(size) + "-point base");
    }
}

void normalize(std::vector<PointSet>& family) {
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
}

// Lexicographic order on the ascending member lists.
bool lex_less(PointSet a, PointSet b) {
    auto ma = members(a), mb = members(b);
    return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

}  // namespace

std::vector<int> members(PointSet s) {
    std::vector<int> out;
    while (s) {
        out.push_back(std::countr_zero(s));
        s &= s - 1;
    }
    return out;
}

PointSet from_members(std::span<const int> points) {
    PointSet s = 0;
    for (int p : points) {
        if (p < 0 || p >= kMaxPoints) throw Error(ErrorKind::OutOfRangePoint, "point " + std::to_string(p));
        s |= PointSet{1} << p;
    }
    return s;
}

FiniteTopology FiniteTopology::make(int size, std::vector<PointSet> opens, Preset preset) {
    if (size < 0 || size > kMaxPoints) throw Error(ErrorKind::SizeTooLarge, "base size " + std::to_string(size));
    const PointSet base = full_set(size);
    if (preset == Preset::Discrete) {
        if (size > 20) throw Error(ErrorKind::SizeTooLarge, "discrete preset limited to 20 points");
        opens.clear();
        for (PointSet s = 0; s <= base; ++s) opens.push_back(s);
        return FiniteTopology(size, std::move(opens));
    }
    if (preset == Preset::Indiscrete) {
        opens = {0, base};
        normalize(opens);
        return FiniteTopology(size, std::move(opens));
    }
    for (PointSet s : opens) check_points(size, s);
    normalize(opens);
    if (!std::binary_search(opens.begin(), opens.end(), PointSet{0}) ||
        !std::binary_search(opens.begin(), opens.end(), base)) {
        throw Error(ErrorKind::MissingEmptyOrFull, "opens must contain {} and " + show(base));
    }
    for (std::size_t i = 0; i < opens.size(); ++i) {
        for (std::size_t j = i + 1; j < opens.size(); ++j) {
            if (!std::binary_search(opens.begin(), opens.end(), opens[i] | opens[j])) {
                throw Error(ErrorKind::NotClosedUnderUnion, show(opens[i]) + " u " + show(opens[j]));
            }
            if (!std::binary_search(opens.begin(), opens.end(), opens[i] & opens[j])) {
                throw Error(ErrorKind::NotClosedUnderIntersection, show(opens[i]) + " n " + show(opens[j]));
            }
        }
    }
    return FiniteTopology(size, std::move(opens));
}

bool FiniteTopology::is_open(PointSet s) const {
    return std::binary_search(opens_.begin(), opens_.end(), s);
}

FiniteTopology discrete(int size) { return FiniteTopology::make(size, {}, Preset::Discrete); }
FiniteTopology indiscrete(int size) { return FiniteTopology::make(size, {}, Preset::Indiscrete); }

PointSet interior(const FiniteTopology& t, PointSet a) {
    check_points(t.size(), a);
    PointSet result = 0;
    for (PointSet o : t.opens()) {
        if (subset_of(o, a)) result |= o;
    }
    return result;
}

PointSet closure(const FiniteTopology& t, PointSet a) {
    check_points(t.size(), a);
    return t.base() & ~interior(t, t.base() & ~a);
}

bool is_almost_discrete(const FiniteTopology& t) {
    return std::all_of(t.opens().begin(), t.opens().end(), [&](PointSet o) {
        PointSet c = closure(t, o);
        return c == interior(t, c);
    });
}

Preorder Preorder::make(int size, std::span<const std::pair<int, int>> pairs, bool close) {
    if (size < 0 || size > kMaxPoints) throw Error(ErrorKind::SizeTooLarge, "preorder size " + std::to_string(size));
    std::vector<PointSet> up(size, 0);
    for (auto [x, y] : pairs) {
        if (x < 0 || y < 0 || x >= size || y >= size) {
            throw Error(ErrorKind::OutOfRangePoint, "pair (" + std::to_string(x) + "," + std::to_string(y) + ")");
        }
        up[x] |= PointSet{1} << y;
    }
    if (close) {
        for (int x = 0; x < size; ++x) up[x] |= PointSet{1} << x;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int x = 0; x < size; ++x) {
                PointSet next = up[x];
                for (int y : members(up[x])) next |= up[y];
                if (next != up[x]) {
                    up[x] = next;
                    changed = true;
                }
            }
        }
    }
    for (int x = 0; x < size; ++x) {
        if (!contains(up[x], x)) throw Error(ErrorKind::NotPreorder, "not reflexive at " + std::to_string(x));
        for (int y : members(up[x])) {
            if (!subset_of(up[y], up[x])) {
                throw Error(ErrorKind::NotPreorder, "not transitive through " + std::to_string(x) + "<=" + std::to_string(y));
            }
        }
    }
    return Preorder(std::move(up));
}

Preorder Preorder::identity(int size) { return make(size, {}, true); }

Preorder Preorder::total(int size) {
    std::vector<std::pair<int, int>> all;
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) all.emplace_back(x, y);
    return make(size, all);
}

std::vector<std::pair<int, int>> Preorder::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < size(); ++x)
        for (int y : members(up_[x])) out.emplace_back(x, y);
    return out;
}

FiniteTopology alexandrov(const Preorder& p) {
    if (p.size() > 20) throw Error(ErrorKind::SizeTooLarge, "alexandrov limited to 20 points");
    std::vector<PointSet> opens;
    const PointSet base = full_set(p.size());
    for (PointSet s = 0;; ++s) {
        bool up_closed = true;
        for (int x : members(s)) {
            if (!subset_of(p.up_set(x), s)) {
                up_closed = false;
                break;
            }
        }
        if (up_closed) opens.push_back(s);
        if (s == base) break;
    }
    return FiniteTopology::make(p.size(), std::move(opens));
}

Preorder specialization_preorder(const FiniteTopology& t) {
    // The smallest open containing x is the up-set of x.
    std::vector<std::pair<int, int>> pairs;
    for (int x = 0; x < t.size(); ++x) {
        PointSet smallest = t.base();
        for (PointSet o : t.opens()) {
            if (contains(o, x)) smallest &= o;
        }
        for (int y : members(smallest)) pairs.emplace_back(x, y);
    }
    return Preorder::make(t.size(), pairs);
}

FiniteTopology coproduct(std::span<const FiniteTopology> parts) {
    if (parts.empty()) throw Error(ErrorKind::EmptyList, "coproduct of no spaces");
    int total = 0;
    for (const auto& t : parts) total += t.size();
    if (total > kMaxPoints) throw Error(ErrorKind::SizeTooLarge, "coproduct base exceeds 64 points");
    // Opens of a coproduct are exactly the unions of one open per summand.
    std::vector<PointSet> opens{0};
    int offset = 0;
    for (const auto& t : parts) {
        std::vector<PointSet> next;
        next.reserve(opens.size() * t.opens().size());
        for (PointSet acc : opens)
            for (PointSet o : t.opens()) next.push_back(acc | (o << offset));
        opens = std::move(next);
        offset += t.size();
    }
    return FiniteTopology::make(total, std::move(opens));
}

FiniteTopology subspace(const FiniteTopology& t, PointSet s) {
    check_points(t.size(), s);
    const auto keep = members(s);
    auto reindex = [&](PointSet o) {
        PointSet r = 0;
        for (std::size_t i = 0; i < keep.size(); ++i)
            if (contains(o, keep[i])) r |= PointSet{1} << i;
        return r;
    };
    std::vector<PointSet> opens;
    for (PointSet o : t.opens()) opens.push_back(reindex(o & s));
    return FiniteTopology::make(static_cast<int>(keep.size()), std::move(opens));
}

std::vector<FiniteTopology> enumerate_topologies(int size) {
    if (size < 0) throw Error(ErrorKind::InvalidArgument, "negative size");
    if (size > 4) throw Error(ErrorKind::SizeTooLarge, "enumeration is capped at 4 points");
    const PointSet base = full_set(size);
    std::vector<PointSet> proper;  // subsets other than {} and base
    for (PointSet s = 1; s < base; ++s) proper.push_back(s);
    std::vector<FiniteTopology> out;
    const std::uint64_t families = std::uint64_t{1} << proper.size();
    for (std::uint64_t pick = 0; pick < families; ++pick) {
        std::vector<PointSet> opens{0, base};
        for (std::size_t i = 0; i < proper.size(); ++i)
            if ((pick >> i) & 1u) opens.push_back(proper[i]);
        normalize(opens);
        bool closed = true;
        for (std::size_t i = 0; i < opens.size() && closed; ++i) {
            for (std::size_t j = i + 1; j < opens.size(); ++j) {
                if (!std::binary_search(opens.begin(), opens.end(), opens[i] | opens[j]) ||
                    !std::binary_search(opens.begin(), opens.end(), opens[i] & opens[j])) {
                    closed = false;
                    break;
                }
            }
        }
        if (closed) out.push_back(FiniteTopology::make(size, std::move(opens)));
    }
    std::sort(out.begin(), out.end(), [](const FiniteTopology& a, const FiniteTopology& b) {
        return a.opens() < b.opens();
    });
    return out;
}

nlohmann::json point_set_json(PointSet s) { return members(s); }

PointSet point_set_from_json(const nlohmann::json& j) {
    auto pts = j.get<std::vector<int>>();
    return from_members(pts);
}

nlohmann::json to_json(const FiniteTopology& t) {
    std::vector<PointSet> family = t.opens();
    std::sort(family.begin(), family.end(), lex_less);
    nlohmann::json opens = nlohmann::json::array();
    for (PointSet o : family) opens.push_back(point_set_json(o));
    return {{"size", t.size()}, {"opens", opens}};
}

FiniteTopology topology_from_json(const nlohmann::json& j) {
    std::vector<PointSet> opens;
    for (const auto& o : j.at("opens")) opens.push_back(point_set_from_json(o));
    return FiniteTopology::make(j.at("size").get<int>(), std::move(opens));
}

nlohmann::json to_json(const Preorder& p) {
    nlohmann::json leq = nlohmann::json::array();
    for (auto [x, y] : p.pairs()) leq.push_back({x, y});
    return {{"size", p.size()}, {"leq", leq}};
}

Preorder preorder_from_json(const nlohmann::json& j) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& e : j.at("leq")) pairs.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return Preorder::make(j.at("size").get<int>(), pairs);
}

}  // namespace tcw
