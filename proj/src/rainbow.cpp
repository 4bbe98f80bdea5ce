#include "tcw/rainbow.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tcw/error.hpp"

namespace tcw::rainbow {

RainbowSignature signature(int n) {
    if (n < 3) throw Error(ErrorKind::DimTooSmall, "rainbow signature needs n >= 3, got " + std::to_string(n));
    if (n > 29) throw Error(ErrorKind::DimUnsupported, "yellow shades are kept in 32-bit sets, n <= 29");
    return RainbowSignature{n};
}

// ------------------------------------------------------------------ colours

bool EdgeColour::in_signature(const RainbowSignature& sig) const {
    switch (kind) {
        case Kind::Green: return a >= 1 && a <= sig.n - 2;
        case Kind::GreenZero: return a >= 1 && a <= sig.n + 1;
        case Kind::White: return a >= 0 && a <= sig.n - 2;
        case Kind::Red: return a >= 0 && b >= 0 && a < sig.n && b < sig.n && a != b;
    }
    return false;
}

std::string EdgeColour::to_string() const {
    switch (kind) {
        case Kind::Green: return "g" + std::to_string(a);
        case Kind::GreenZero: return "g0^" + std::to_string(a);
        case Kind::White: return "w" + std::to_string(a);
        case Kind::Red:
            if (a < 10 && b < 10) return "r" + std::to_string(a) + std::to_string(b);
            return "r" + std::to_string(a) + "_" + std::to_string(b);
    }
    return "?";
}

namespace {

int parse_int(const std::string& s, const std::string& whole) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw Error(ErrorKind::Parse, "bad colour code '" + whole + "'");
    return std::stoi(s);
}

}  // namespace

EdgeColour EdgeColour::parse(const std::string& s) {
    if (s.rfind("g0^", 0) == 0) return g0(parse_int(s.substr(3), s));
    if (s.rfind("g", 0) == 0) return g(parse_int(s.substr(1), s));
    if (s.rfind("w", 0) == 0) return w(parse_int(s.substr(1), s));
    if (s.rfind("r", 0) == 0) {
        std::string rest = s.substr(1);
        auto us = rest.find('_');
        if (us != std::string::npos) return r(parse_int(rest.substr(0, us), s), parse_int(rest.substr(us + 1), s));
        if (rest.size() != 2) throw Error(ErrorKind::Parse, "bad colour code '" + s + "'");
        return r(parse_int(rest.substr(0, 1), s), parse_int(rest.substr(1), s));
    }
    throw Error(ErrorKind::Parse, "bad colour code '" + s + "'");
}

std::string yellow_to_string(YellowSet s) {
    std::string out = "yS:{";
    bool first = true;
    for (int i = 0; i < 32; ++i) {
        if (!(s >> i & 1u)) continue;
        if (!first) out += ",";
        out += std::to_string(i);
        first = false;
    }
    return out + "}";
}

YellowSet parse_yellow(const std::string& s) {
    if (s.rfind("yS:{", 0) != 0 || s.back() != '}') throw Error(ErrorKind::Parse, "bad yellow code '" + s + "'");
    std::string body = s.substr(4, s.size() - 5);
    YellowSet out = 0;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        int v = parse_int(item, s);
        if (v > 31) throw Error(ErrorKind::Parse, "yellow index out of range in '" + s + "'");
        out |= YellowSet{1} << v;
    }
    return out;
}

// ------------------------------------------------------------------ graphs

void ColouredGraph::set_edge(int x, int y, EdgeColour c) {
    if (x == y || x < 0 || y < 0 || x >= nodes_ || y >= nodes_)
        throw Error(ErrorKind::InvalidArgument, "edge (" + std::to_string(x) + "," + std::to_string(y) + ")");
    if (x < y)
        edges_[{x, y}] = c;
    else
        edges_[{y, x}] = c.converse();
}

std::optional<EdgeColour> ColouredGraph::edge(int x, int y) const {
    auto it = edges_.find({std::min(x, y), std::max(x, y)});
    if (it == edges_.end()) return std::nullopt;
    return x < y ? it->second : it->second.converse();
}

void ColouredGraph::set_yellow(const std::vector<int>& tuple, YellowSet s) { yellows_[tuple] = s; }

std::optional<YellowSet> ColouredGraph::yellow(const std::vector<int>& tuple) const {
    auto it = yellows_.find(tuple);
    if (it == yellows_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::string tuple_key(const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

std::vector<int> parse_tuple_key(const std::string& k) {
    if (k.size() < 2 || k.front() != '(' || k.back() != ')') throw Error(ErrorKind::Parse, "bad tuple key '" + k + "'");
    std::vector<int> out;
    std::stringstream ss(k.substr(1, k.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(item, k));
    return out;
}

}  // namespace

nlohmann::json to_json(const ColouredGraph& g) {
    nlohmann::json edges = nlohmann::json::object();
    for (const auto& [k, c] : g.edges()) edges[tuple_key({k.first, k.second})] = c.to_string();
    nlohmann::json yellows = nlohmann::json::object();
    for (const auto& [t, s] : g.yellows()) yellows[tuple_key(t)] = yellow_to_string(s);
    return {{"nodes", g.nodes()}, {"edges", edges}, {"yellows", yellows}};
}

ColouredGraph graph_from_json(const nlohmann::json& j) {
    ColouredGraph g(j.at("nodes").get<int>());
    for (const auto& [k, v] : j.at("edges").items()) {
        auto t = parse_tuple_key(k);
        if (t.size() != 2) throw Error(ErrorKind::Parse, "edge key '" + k + "'");
        g.set_edge(t[0], t[1], EdgeColour::parse(v.get<std::string>()));
    }
    if (j.contains("yellows"))
        for (const auto& [k, v] : j.at("yellows").items()) g.set_yellow(parse_tuple_key(k), parse_yellow(v.get<std::string>()));
    return g;
}

const char* to_string(Violation v) {
    switch (v) {
        case Violation::None: return "none";
        case Violation::BadLabel: return "bad-label";
        case Violation::Incomplete: return "incomplete";
        case Violation::ForbiddenTriple: return "forbidden-triple";
        case Violation::MissingYellow: return "missing-yellow";
        case Violation::UnexpectedYellow: return "unexpected-yellow";
        case Violation::ConeTint: return "cone-tint";
    }
    return "?";
}

bool red_triangle_consistent(EdgeColour xy, EdgeColour yz, EdgeColour xz) {
    if (!xy.is_red() || !yz.is_red() || !xz.is_red()) return false;
    return xy.a == xz.a && xy.b == yz.a && yz.b == xz.b;
}

bool triangle_forbidden(EdgeColour xy, EdgeColour yz, EdgeColour xz) {
    using K = EdgeColour::Kind;
    std::array<EdgeColour, 3> e{xy, yz, xz};
    if (std::all_of(e.begin(), e.end(), [](const EdgeColour& c) { return c.is_green(); })) return true;
    if (std::all_of(e.begin(), e.end(), [](const EdgeColour& c) { return c.is_red(); }))
        return !red_triangle_consistent(xy, yz, xz);
    for (int w = 0; w < 3; ++w) {
        if (e[w].kind != K::White) continue;
        const EdgeColour& p = e[(w + 1) % 3];
        const EdgeColour& q = e[(w + 2) % 3];
        if (e[w].a == 0 && p.kind == K::GreenZero && q.kind == K::GreenZero) return true;
        if (e[w].a >= 1 && p.kind == K::Green && q.kind == K::Green && p.a == e[w].a && q.a == e[w].a) return true;
    }
    return false;
}

namespace {

/// Ordered tuples of `len` distinct nodes out of `m`, in lexicographic order.
void for_each_tuple(int m, int len, const std::function<bool(const std::vector<int>&)>& f) {
    std::vector<int> t;
    std::vector<bool> used(m, false);
    std::function<bool()> rec = [&]() {
        if (static_cast<int>(t.size()) == len) return f(t);
        for (int x = 0; x < m; ++x) {
            if (used[x]) continue;
            used[x] = true;
            t.push_back(x);
            bool go = rec();
            t.pop_back();
            used[x] = false;
            if (!go) return false;
        }
        return true;
    };
    rec();
}

std::optional<YellowSet> lookup_yellow(const ColouredGraph& g, std::vector<int> t, bool strict) {
    if (auto y = g.yellow(t)) return y;
    if (strict) return std::nullopt;
    std::sort(t.begin(), t.end());
    do {
        if (auto y = g.yellow(t)) return y;
    } while (std::next_permutation(t.begin(), t.end()));
    return std::nullopt;
}

}  // namespace

GraphVerdict is_valid_coloured_graph(const ColouredGraph& g, const RainbowSignature& sig, bool strict) {
    const int m = g.nodes();
    const int n = sig.n;
    auto fail = [](Violation k, std::vector<int> w, std::string d) { return GraphVerdict{false, k, std::move(w), std::move(d)}; };

    for (const auto& [k, c] : g.edges())
        if (!c.in_signature(sig)) return fail(Violation::BadLabel, {k.first, k.second}, c.to_string());
    for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y)
            if (!g.edge(x, y)) return fail(Violation::Incomplete, {x, y}, "unlabelled edge");

    for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y)
            for (int z = y + 1; z < m; ++z) {
                EdgeColour xy = *g.edge(x, y), yz = *g.edge(y, z), xz = *g.edge(x, z);
                if (triangle_forbidden(xy, yz, xz))
                    return fail(Violation::ForbiddenTriple, {x, y, z},
                                xy.to_string() + "," + yz.to_string() + "," + xz.to_string());
            }

    auto green_free = [&](const std::vector<int>& t) {
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j)
                if (g.edge(t[i], t[j])->is_green()) return false;
        return true;
    };
    for (const auto& [t, s] : g.yellows()) {
        bool shaped = static_cast<int>(t.size()) == n - 1 &&
                      std::all_of(t.begin(), t.end(), [&](int x) { return x >= 0 && x < m; }) &&
                      std::set<int>(t.begin(), t.end()).size() == t.size();
        if (!shaped || !green_free(t)) return fail(Violation::UnexpectedYellow, t, yellow_to_string(s));
        if ((s & ~sig.full_yellow()) != 0) return fail(Violation::BadLabel, t, yellow_to_string(s));
    }
    GraphVerdict out;
    for_each_tuple(m, n - 1, [&](const std::vector<int>& t) {
        if (green_free(t) && !lookup_yellow(g, t, strict)) {
            out = fail(Violation::MissingYellow, t, "green-free tuple without a shade");
            return false;
        }
        return true;
    });
    if (!out.valid) return out;

    // Cone clause: base d (green-free), apex z with M(d_0,z) = g_0^i, M(d_j,z) = g_j.
    for_each_tuple(m, n - 1, [&](const std::vector<int>& d) {
        if (!green_free(d)) return true;
        for (int z = 0; z < m; ++z) {
            if (std::find(d.begin(), d.end(), z) != d.end()) continue;
            EdgeColour e0 = *g.edge(d[0], z);
            if (e0.kind != EdgeColour::Kind::GreenZero) continue;
            bool cone = true;
            for (int j = 1; j < n - 1 && cone; ++j) {
                EdgeColour ej = *g.edge(d[j], z);
                cone = ej.kind == EdgeColour::Kind::Green && ej.a == j;
            }
            if (!cone) continue;
            YellowSet s = *lookup_yellow(g, d, strict);
            if (!(s >> e0.a & 1u)) {
                auto w = d;
                w.push_back(z);
                out = fail(Violation::ConeTint, w, "tint " + std::to_string(e0.a) + " not in " + yellow_to_string(s));
                return false;
            }
        }
        return true;
    });
    return out;
}

ColouredGraph cone(const RainbowSignature& sig, int tint, YellowSet base_yellow) {
    const int n = sig.n;
    const int z = n - 1;
    ColouredGraph g(n);
    for (int x = 0; x < n - 1; ++x)
        for (int y = x + 1; y < n - 1; ++y) g.set_edge(x, y, EdgeColour::w(0));
    g.set_edge(0, z, EdgeColour::g0(tint));
    for (int j = 1; j < n - 1; ++j) g.set_edge(j, z, EdgeColour::g(j));
    std::vector<int> base(n - 1);
    std::iota(base.begin(), base.end(), 0);
    std::vector<int> t = base;
    do {
        g.set_yellow(t, t == base ? base_yellow : sig.full_yellow());
    } while (std::next_permutation(t.begin(), t.end()));
    return g;
}

// ------------------------------------------------------------------ n = 3

namespace {

constexpr std::array<std::pair<int, int>, 6> kRedPairs{{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};
constexpr std::array<std::pair<int, int>, 3> kPair{{{1, 2}, {0, 2}, {0, 1}}};  // pair n \ {i}

int position_of(int x, int y) { return 3 - x - y; }

YellowSet tint_mask(int t) {
    YellowSet m = 0;
    for (int s = 0; s < 32; ++s)
        if (s >> t & 1) m |= YellowSet{1} << s;
    return m;
}

}  // namespace

int edge_label(EdgeColour c) {
    using K = EdgeColour::Kind;
    switch (c.kind) {
        case K::Green:
            if (c.a == 1) return 0;
            break;
        case K::GreenZero:
            if (c.a >= 1 && c.a <= 4) return c.a;
            break;
        case K::White:
            if (c.a == 0 || c.a == 1) return 5 + c.a;
            break;
        case K::Red:
            for (int k = 0; k < 6; ++k)
                if (kRedPairs[k] == std::pair{c.a, c.b}) return 7 + k;
            break;
    }
    throw Error(ErrorKind::InvalidArgument, "colour " + c.to_string() + " is not in the n = 3 signature");
}

EdgeColour edge_colour(int label) {
    if (label == 0) return EdgeColour::g(1);
    if (label >= 1 && label <= 4) return EdgeColour::g0(label);
    if (label == 5 || label == 6) return EdgeColour::w(label - 5);
    if (label >= 7 && label <= 12) return EdgeColour::r(kRedPairs[label - 7].first, kRedPairs[label - 7].second);
    throw Error(ErrorKind::InvalidArgument, "edge label " + std::to_string(label));
}

int converse_label(int label) { return label >= 7 ? edge_label(edge_colour(label).converse()) : label; }

Piece make_piece(int label, YellowSet fwd, YellowSet bwd) {
    if (label_is_green(label)) return static_cast<Piece>(1 + label);
    if (label > 12 || fwd > 31 || bwd > 31) throw Error(ErrorKind::InvalidArgument, "piece out of range");
    return static_cast<Piece>(6 + ((label - 5) * 32 + fwd) * 32 + bwd);
}

int piece_label(Piece p) {
    if (p == kIdentified) return -1;
    if (p <= 5) return p - 1;
    return 5 + (p - 6) / 1024;
}

YellowSet piece_fwd(Piece p) { return p < 6 ? 0 : ((p - 6) / 32) % 32; }
YellowSet piece_bwd(Piece p) { return p < 6 ? 0 : (p - 6) % 32; }

Piece reverse_piece(Piece p) {
    if (p < 6) return p;
    return make_piece(converse_label(piece_label(p)), piece_bwd(p), piece_fwd(p));
}

std::string piece_to_string(Piece p) {
    if (p == kIdentified) return "=";
    std::string s = edge_colour(piece_label(p)).to_string();
    if (p >= 6) s += " " + yellow_to_string(piece_fwd(p)) + " " + yellow_to_string(piece_bwd(p));
    return s;
}

std::uint64_t Atom::code() const {
    return std::uint64_t{pieces[0]} | std::uint64_t{pieces[1]} << 16 | std::uint64_t{pieces[2]} << 32;
}

Atom Atom::from_code(std::uint64_t code) {
    return Atom{{static_cast<Piece>(code & 0xFFFF), static_cast<Piece>(code >> 16 & 0xFFFF),
                 static_cast<Piece>(code >> 32 & 0xFFFF)}};
}

bool RainbowStructure::in_diagonal(int i, int j, const Atom& a) {
    if (i < 0 || j < 0 || i > 2 || j > 2) throw Error(ErrorKind::IndexOutOfRange, "diagonal index");
    return i == j || a.pieces[3 - i - j] == kIdentified;
}

namespace {

/// Shade requirement on the ordered pair (x, y) of a three-node atom with
/// position labels L: the tint of the cone based on (x, y), or 0.
int required_tint(const std::array<int, 3>& L, int x, int y) {
    auto lab = [&](int a, int b) {
        int l = L[position_of(a, b)];
        return a < b ? l : converse_label(l);
    };
    int z = 3 - x - y;
    int xz = lab(x, z), yz = lab(y, z);
    if (xz >= 1 && xz <= 4 && yz == 0 && !label_is_green(lab(x, y))) return xz;
    return 0;
}

bool labels_forbidden(const std::array<int, 3>& L) {
    // L[2] = (0,1), L[0] = (1,2), L[1] = (0,2)
    return triangle_forbidden(edge_colour(L[2]), edge_colour(L[0]), edge_colour(L[1]));
}

std::uint64_t pc(YellowSet m) { return static_cast<std::uint64_t>(std::popcount(m)); }

std::vector<Piece> pieces_of(int label, YellowSet fwd, YellowSet bwd) {
    if (label < 0) return {kIdentified};
    if (label_is_green(label)) return {make_piece(label, 0, 0)};
    std::vector<Piece> out;
    for (int f = 0; f < 32; ++f)
        if (fwd >> f & 1u)
            for (int b = 0; b < 32; ++b)
                if (bwd >> b & 1u) out.push_back(make_piece(label, f, b));
    return out;
}

}  // namespace

RainbowStructure::RainbowStructure(std::uint64_t palette) : sig_(signature(3)), palette_(palette & 0xFFFFFFFFull) {
    const YellowSet pal = static_cast<YellowSet>(palette_);

    Skeleton one;
    one.kernel = 3;
    one.labels = {-1, -1, -1};
    one.count = 1;
    skeletons_.push_back(one);

    for (int kernel : {2, 1, 0}) {
        for (int e = 0; e < kEdgeLabels; ++e) {
            Skeleton s;
            s.kernel = kernel;
            s.labels[kernel] = -1;
            if (kernel == 2) s.labels[0] = s.labels[1] = e;
            if (kernel == 1) s.labels[2] = e, s.labels[0] = converse_label(e);
            if (kernel == 0) s.labels[2] = s.labels[1] = e;
            for (int i = 0; i < 3; ++i)
                if (i != kernel && !label_is_green(e)) s.fwd[i] = s.bwd[i] = pal;
            s.count = label_is_green(e) ? 1 : pc(pal) * pc(pal);
            if (s.count) skeletons_.push_back(s);
        }
    }

    for (int e01 = 0; e01 < kEdgeLabels; ++e01)
        for (int e02 = 0; e02 < kEdgeLabels; ++e02)
            for (int e12 = 0; e12 < kEdgeLabels; ++e12) {
                std::array<int, 3> L{e12, e02, e01};
                if (labels_forbidden(L)) continue;
                Skeleton s;
                s.kernel = -1;
                s.labels = L;
                s.count = 1;
                for (int i = 0; i < 3; ++i) {
                    if (label_is_green(L[i])) continue;
                    auto [x, y] = kPair[i];
                    int tf = required_tint(L, x, y), tb = required_tint(L, y, x);
                    s.fwd[i] = pal & (tf ? tint_mask(tf) : ~YellowSet{0});
                    s.bwd[i] = pal & (tb ? tint_mask(tb) : ~YellowSet{0});
                    s.count *= pc(s.fwd[i]) * pc(s.bwd[i]);
                }
                if (s.count) skeletons_.push_back(s);
            }

    std::uint64_t total = 0;
    for (const auto& s : skeletons_) {
        cumulative_.push_back(total);
        total += s.count;
    }
    count_ = total;
}

bool RainbowStructure::skeleton_has_piece(const Skeleton& s, int i, Piece p) const {
    if (s.labels[i] < 0) return p == kIdentified;
    if (piece_label(p) != s.labels[i]) return false;
    if (label_is_green(s.labels[i])) return true;
    return (s.fwd[i] >> piece_fwd(p) & 1u) && (s.bwd[i] >> piece_bwd(p) & 1u);
}

bool RainbowStructure::is_valid_atom(const Atom& a) const {
    const YellowSet pal = static_cast<YellowSet>(palette_);
    for (Piece p : a.pieces) {
        if (p >= kPieces) return false;
        if (p >= 6 && (!(pal >> piece_fwd(p) & 1u) || !(pal >> piece_bwd(p) & 1u))) return false;
    }
    int zeros = 0, zero_at = -1;
    for (int i = 0; i < 3; ++i)
        if (a.pieces[i] == kIdentified) ++zeros, zero_at = i;
    if (zeros == 3) return true;
    if (zeros == 2) return false;
    const auto& p = a.pieces;
    if (zeros == 1) {
        if (zero_at == 2) return p[0] == p[1];
        if (zero_at == 1) return p[0] == reverse_piece(p[2]);
        return p[1] == p[2];
    }
    std::array<int, 3> L{piece_label(p[0]), piece_label(p[1]), piece_label(p[2])};
    if (labels_forbidden(L)) return false;
    for (int i = 0; i < 3; ++i) {
        if (label_is_green(L[i])) continue;
        auto [x, y] = kPair[i];
        int tf = required_tint(L, x, y), tb = required_tint(L, y, x);
        if (tf && !(piece_fwd(p[i]) >> tf & 1u)) return false;
        if (tb && !(piece_bwd(p[i]) >> tb & 1u)) return false;
    }
    return true;
}

std::pair<ColouredGraph, std::array<int, 3>> RainbowStructure::graph_of(const Atom& a) const {
    if (!is_valid_atom(a)) throw Error(ErrorKind::InvalidArgument, "not an atom of the structure");
    const auto& p = a.pieces;
    auto put = [](ColouredGraph& g, int x, int y, Piece q) {
        int l = piece_label(q);
        g.set_edge(x, y, edge_colour(l));
        if (!label_is_green(l)) {
            g.set_yellow({x, y}, piece_fwd(q));
            g.set_yellow({y, x}, piece_bwd(q));
        }
    };
    if (p[0] == kIdentified && p[1] == kIdentified) return {ColouredGraph(1), {0, 0, 0}};
    if (p[2] == kIdentified) {
        ColouredGraph g(2);
        put(g, 0, 1, p[0]);
        return {g, {0, 0, 1}};
    }
    if (p[1] == kIdentified) {
        ColouredGraph g(2);
        put(g, 0, 1, p[2]);
        return {g, {0, 1, 0}};
    }
    if (p[0] == kIdentified) {
        ColouredGraph g(2);
        put(g, 0, 1, p[2]);
        return {g, {0, 1, 1}};
    }
    ColouredGraph g(3);
    for (int i = 0; i < 3; ++i) put(g, kPair[i].first, kPair[i].second, p[i]);
    return {g, {0, 1, 2}};
}

Atom RainbowStructure::atom_of(const ColouredGraph& g, const std::array<int, 3>& surj) const {
    std::set<int> image(surj.begin(), surj.end());
    if (g.nodes() < 1 || g.nodes() > 3 || static_cast<int>(image.size()) != g.nodes() || *image.begin() != 0 ||
        *image.rbegin() != g.nodes() - 1)
        throw Error(ErrorKind::InvalidArgument, "not a surjection onto the graph");
    auto v = is_valid_coloured_graph(g, sig_);
    if (!v.valid) throw Error(ErrorKind::InvalidArgument, std::string("invalid graph: ") + to_string(v.kind));
    Atom a;
    for (int i = 0; i < 3; ++i) {
        int x = surj[kPair[i].first], y = surj[kPair[i].second];
        if (x == y) {
            a.pieces[i] = kIdentified;
            continue;
        }
        int l = edge_label(*g.edge(x, y));
        a.pieces[i] = label_is_green(l) ? make_piece(l, 0, 0) : make_piece(l, *g.yellow({x, y}), *g.yellow({y, x}));
    }
    if (!is_valid_atom(a)) throw Error(ErrorKind::InvalidArgument, "graph shades fall outside the palette");
    return a;
}

void RainbowStructure::for_each_atom(const std::function<void(const Atom&)>& f, std::uint64_t limit) const {
    if (count_ > limit)
        throw Error(ErrorKind::TooManyAtoms, std::to_string(count_) + " atoms exceed the limit " + std::to_string(limit));
    for (const auto& s : skeletons_) {
        if (s.kernel == 3) {
            f(Atom{});
            continue;
        }
        if (s.kernel >= 0) {
            int i = s.kernel == 2 ? 0 : 2;  // position read in graph order 0 -> 1
            for (Piece p : pieces_of(s.labels[i], s.fwd[i], s.bwd[i])) {
                Atom a;
                if (s.kernel == 2) a.pieces = {p, p, kIdentified};
                if (s.kernel == 1) a.pieces = {reverse_piece(p), kIdentified, p};
                if (s.kernel == 0) a.pieces = {kIdentified, p, p};
                f(a);
            }
            continue;
        }
        auto p2 = pieces_of(s.labels[2], s.fwd[2], s.bwd[2]);
        auto p1 = pieces_of(s.labels[1], s.fwd[1], s.bwd[1]);
        auto p0 = pieces_of(s.labels[0], s.fwd[0], s.bwd[0]);
        for (Piece a2 : p2)
            for (Piece a1 : p1)
                for (Piece a0 : p0) f(Atom{{a0, a1, a2}});
    }
}

Atom RainbowStructure::random_atom(std::mt19937_64& rng) const {
    if (count_ == 0) throw Error(ErrorKind::InvalidArgument, "empty structure");
    std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, count_ - 1)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    const Skeleton& s = skeletons_[static_cast<std::size_t>(it - cumulative_.begin()) - 1];
    auto pick = [&](YellowSet m) {
        std::uniform_int_distribution<int> d(0, std::popcount(m) - 1);
        int k = d(rng);
        for (int b = 0; b < 32; ++b)
            if (m >> b & 1u && k-- == 0) return static_cast<YellowSet>(b);
        return YellowSet{0};
    };
    auto piece = [&](int i) -> Piece {
        if (s.labels[i] < 0) return kIdentified;
        if (label_is_green(s.labels[i])) return make_piece(s.labels[i], 0, 0);
        return make_piece(s.labels[i], pick(s.fwd[i]), pick(s.bwd[i]));
    };
    if (s.kernel == 3) return Atom{};
    if (s.kernel == 2) {
        Piece p = piece(0);
        return Atom{{p, p, kIdentified}};
    }
    if (s.kernel == 1) {
        Piece p = piece(2);
        return Atom{{reverse_piece(p), kIdentified, p}};
    }
    if (s.kernel == 0) {
        Piece p = piece(2);
        return Atom{{kIdentified, p, p}};
    }
    Piece a0 = piece(0), a1 = piece(1), a2 = piece(2);
    return Atom{{a0, a1, a2}};
}

RainbowStructure build_atom_structure(const RainbowSignature& sig) {
    if (sig.n != 3) throw Error(ErrorKind::DimUnsupported, "the implicit atom structure is built for n = 3 only");
    return RainbowStructure();
}

std::vector<Atom> enumerate_atoms(const RainbowSignature& sig, std::uint64_t palette, std::uint64_t limit) {
    if (sig.n != 3) throw Error(ErrorKind::DimUnsupported, "atom enumeration is implemented for n = 3 only");
    RainbowStructure s(palette);
    std::vector<Atom> out;
    s.for_each_atom([&](const Atom& a) { out.push_back(a); }, limit);
    return out;
}

std::uint64_t brute_force_atom_count(std::uint64_t palette) {
    const RainbowSignature sig = signature(3);
    std::vector<EdgeColour> colours{EdgeColour::g(1)};
    for (int i = 1; i <= 4; ++i) colours.push_back(EdgeColour::g0(i));
    colours.push_back(EdgeColour::w(0));
    colours.push_back(EdgeColour::w(1));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) colours.push_back(EdgeColour::r(a, b));
    std::vector<YellowSet> shades;
    for (int s = 0; s < 32; ++s)
        if (palette >> s & 1u) shades.push_back(static_cast<YellowSet>(s));

    std::unordered_set<std::string> classes;
    auto record = [&](const ColouredGraph& g) {
        const int m = g.nodes();
        std::array<int, 3> a{};
        for (a[0] = 0; a[0] < m; ++a[0])
            for (a[1] = 0; a[1] < m; ++a[1])
                for (a[2] = 0; a[2] < m; ++a[2]) {
                    std::set<int> img(a.begin(), a.end());
                    if (static_cast<int>(img.size()) != m) continue;
                    std::string key;
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            if (i == j) continue;
                            key += '|';
                            if (a[i] == a[j]) {
                                key += '=';
                                continue;
                            }
                            key += g.edge(a[i], a[j])->to_string();
                            if (auto y = g.yellow({a[i], a[j]})) key += yellow_to_string(*y);
                        }
                    classes.insert(key);
                }
    };

    record(ColouredGraph(1));
    // Every complete graph on 2 and 3 nodes with every shade assignment.
    for (int m = 2; m <= 3; ++m) {
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < m; ++x)
            for (int y = x + 1; y < m; ++y) pairs.push_back({x, y});
        std::vector<std::size_t> ci(pairs.size(), 0);
        while (true) {
            ColouredGraph base(m);
            for (std::size_t k = 0; k < pairs.size(); ++k) base.set_edge(pairs[k].first, pairs[k].second, colours[ci[k]]);
            std::vector<std::vector<int>> shaded;
            for (int x = 0; x < m; ++x)
                for (int y = 0; y < m; ++y)
                    if (x != y && !base.edge(x, y)->is_green()) shaded.push_back({x, y});
            std::vector<std::size_t> yi(shaded.size(), 0);
            if (!shades.empty() || shaded.empty()) {
                while (true) {
                    ColouredGraph g = base;
                    for (std::size_t k = 0; k < shaded.size(); ++k) g.set_yellow(shaded[k], shades[yi[k]]);
                    if (is_valid_coloured_graph(g, sig).valid) record(g);
                    std::size_t k = 0;
                    while (k < yi.size() && ++yi[k] == shades.size()) yi[k++] = 0;
                    if (k == yi.size()) break;
                }
            }
            std::size_t k = 0;
            while (k < ci.size() && ++ci[k] == colours.size()) ci[k++] = 0;
            if (k == ci.size()) break;
        }
    }
    return classes.size();
}

// ------------------------------------------------------- CA verification

namespace detail {

constexpr int kWords = (kPieces + 63) / 64;

struct PieceSet {
    std::array<std::uint64_t, kWords> w{};
    void set(Piece p) { w[p >> 6] |= std::uint64_t{1} << (p & 63); }
    bool test(Piece p) const { return w[p >> 6] >> (p & 63) & 1u; }
};
using SetPtr = std::shared_ptr<const PieceSet>;

/// Element of the complex algebra: a Boolean combination of piece-cylinders
/// (atoms whose piece at a position lies in a set), corrected on finitely
/// many atoms.
struct Sym {
    std::vector<std::pair<int, SetPtr>> sets;
    std::vector<std::uint8_t> table{0};
    std::vector<std::uint64_t> flips;  // sorted atom codes where membership differs from the table
};

class Engine {
public:
    explicit Engine(const RainbowStructure& s) : s_(s) {
        std::map<std::tuple<int, int, YellowSet, YellowSet>, int> ids;
        for (const auto& sk : s.skeletons()) {
            if (sk.kernel >= 0) continue;
            std::array<int, 3> c{};
            for (int i = 0; i < 3; ++i) {
                auto key = std::make_tuple(i, sk.labels[i], sk.fwd[i], sk.bwd[i]);
                auto [it, fresh] = ids.emplace(key, static_cast<int>(ctx_.size()));
                if (fresh) ctx_.push_back({i, pieces_of(sk.labels[i], sk.fwd[i], sk.bwd[i])});
                c[i] = it->second;
            }
            t3_.push_back(c);
        }
        // Atoms with an identification are few enough to list.
        for (const auto& sk : s.skeletons()) {
            if (sk.kernel < 0) continue;
            if (sk.kernel == 3) {
                small_.push_back(Atom{});
                continue;
            }
            int i = sk.kernel == 2 ? 0 : 2;
            for (Piece p : pieces_of(sk.labels[i], sk.fwd[i], sk.bwd[i])) {
                if (sk.kernel == 2) small_.push_back(Atom{{p, p, kIdentified}});
                if (sk.kernel == 1) small_.push_back(Atom{{reverse_piece(p), kIdentified, p}});
                if (sk.kernel == 0) small_.push_back(Atom{{kIdentified, p, p}});
            }
        }
    }

    const std::vector<Atom>& small_atoms() const { return small_; }

    Sym top() const { return Sym{{}, {1}, {}}; }
    Sym zero() const { return Sym{{}, {0}, {}}; }

    Sym finite(const std::vector<Atom>& atoms) const {
        Sym x = zero();
        for (const auto& a : atoms) x.flips.push_back(a.code());
        std::sort(x.flips.begin(), x.flips.end());
        x.flips.erase(std::unique(x.flips.begin(), x.flips.end()), x.flips.end());
        return x;
    }

    Sym cylinder(int i, SetPtr set) const { return Sym{{{i, std::move(set)}}, {0, 1}, {}}; }

    Sym diag(int i, int j) const {
        if (i < 0 || j < 0 || i > 2 || j > 2) throw Error(ErrorKind::IndexOutOfRange, "diagonal index");
        if (i == j) return top();
        auto set = std::make_shared<PieceSet>();
        set->set(kIdentified);
        return cylinder(3 - i - j, set);
    }

    static std::uint32_t pattern(const Sym& x, const Atom& a) {
        std::uint32_t idx = 0;
        for (std::size_t k = 0; k < x.sets.size(); ++k)
            if (x.sets[k].second->test(a.pieces[x.sets[k].first])) idx |= 1u << k;
        return idx;
    }

    static bool member(const Sym& x, const Atom& a) {
        bool g = x.table[pattern(x, a)];
        return g != std::binary_search(x.flips.begin(), x.flips.end(), a.code());
    }

    Sym neg(Sym x) const {
        for (auto& v : x.table) v = !v;
        return x;
    }

    template <class F>
    Sym combine(const Sym& x, const Sym& y, F f) const {
        Sym out;
        out.sets = x.sets;
        std::vector<int> ymap;
        for (const auto& s : y.sets) {
            auto it = std::find_if(out.sets.begin(), out.sets.end(),
                                   [&](const auto& t) { return t.first == s.first && t.second == s.second; });
            if (it == out.sets.end()) {
                ymap.push_back(static_cast<int>(out.sets.size()));
                out.sets.push_back(s);
            } else {
                ymap.push_back(static_cast<int>(it - out.sets.begin()));
            }
        }
        const std::size_t nx = x.sets.size();
        out.table.assign(std::size_t{1} << out.sets.size(), 0);
        for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
            std::size_t xi = idx & ((std::size_t{1} << nx) - 1), yi = 0;
            for (std::size_t k = 0; k < ymap.size(); ++k)
                if (idx >> ymap[k] & 1u) yi |= std::size_t{1} << k;
            out.table[idx] = f(x.table[xi] != 0, y.table[yi] != 0);
        }
        std::vector<std::uint64_t> cand;
        std::set_union(x.flips.begin(), x.flips.end(), y.flips.begin(), y.flips.end(), std::back_inserter(cand));
        for (auto code : cand) {
            Atom a = Atom::from_code(code);
            bool v = f(member(x, a), member(y, a));
            if (v != (out.table[pattern(out, a)] != 0)) out.flips.push_back(code);
        }
        return reduce(std::move(out));
    }

    Sym meet(const Sym& x, const Sym& y) const { return combine(x, y, [](bool a, bool b) { return a && b; }); }
    Sym join(const Sym& x, const Sym& y) const { return combine(x, y, [](bool a, bool b) { return a || b; }); }

    /// c_i: atoms whose piece i is the piece i of some member.
    Sym cyl(int i, const Sym& x) const {
        if (i < 0 || i > 2) throw Error(ErrorKind::IndexOutOfRange, "cylindrifier index");
        std::vector<std::uint64_t> cnt(kPieces, 0);
        auto set = std::make_shared<PieceSet>();
        for (const auto& a : small_)
            if (x.table[pattern(x, a)]) ++cnt[a.pieces[i]];
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        HistCache hj(ctx_.size()), hk(ctx_.size());
        for (const auto& sk : t3_) {
            const auto& Hj = hist(x, sk[j], hj);
            const auto& Hk = hist(x, sk[k], hk);
            std::unordered_map<std::uint32_t, std::uint64_t> w;
            for (Piece p : ctx_[sk[i]].pieces) {
                std::uint32_t mi = bits_at(x, i, p);
                auto it = w.find(mi);
                if (it == w.end()) {
                    std::uint64_t total = 0;
                    for (const auto& [mj, cj] : Hj)
                        for (const auto& [mk, ck] : Hk)
                            if (x.table[mi | mj | mk]) total += cj * ck;
                    it = w.emplace(mi, total).first;
                }
                cnt[p] += it->second;
            }
        }
        for (auto code : x.flips) {
            Atom a = Atom::from_code(code);
            if (x.table[pattern(x, a)])
                --cnt[a.pieces[i]];
            else
                set->set(a.pieces[i]);
        }
        for (int p = 0; p < kPieces; ++p)
            if (cnt[p] > 0) set->set(static_cast<Piece>(p));
        return cylinder(i, set);
    }

    bool is_zero(const Sym& x) const {
        for (auto code : x.flips)
            if (!x.table[pattern(x, Atom::from_code(code))]) return false;
        return count_table(x) == x.flips.size();
    }

    std::uint64_t size(const Sym& x) const {
        std::uint64_t total = count_table(x);
        for (auto code : x.flips) {
            if (x.table[pattern(x, Atom::from_code(code))])
                --total;
            else
                ++total;
        }
        return total;
    }

    bool equal(const Sym& x, const Sym& y) const {
        return is_zero(combine(x, y, [](bool a, bool b) { return a != b; }));
    }
    bool leq(const Sym& x, const Sym& y) const {
        return is_zero(combine(x, y, [](bool a, bool b) { return a && !b; }));
    }

    Sym random_piece_cylinder(std::mt19937_64& rng) const {
        int i = std::uniform_int_distribution<int>(0, 2)(rng);
        auto set = std::make_shared<PieceSet>();
        for (int p = 0; p < kPieces; ++p)
            if (rng() & 1u) set->set(static_cast<Piece>(p));
        return cylinder(i, set);
    }

    Atom random_atom(std::mt19937_64& rng) const {
        if (rng() & 1u) return small_[std::uniform_int_distribution<std::size_t>(0, small_.size() - 1)(rng)];
        return s_.random_atom(rng);
    }

    Sym random_element(std::mt19937_64& rng) const {
        std::vector<Atom> atoms;
        int count = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int k = 0; k < count; ++k) atoms.push_back(random_atom(rng));
        Sym fin = finite(atoms);
        switch (rng() % 4) {
            case 0: return fin;
            case 1: return neg(fin);
            case 2: return combine(random_piece_cylinder(rng), fin, [](bool a, bool b) { return a != b; });
            default: return meet(random_piece_cylinder(rng), neg(random_piece_cylinder(rng)));
        }
    }

private:
    struct Ctx {
        int pos;
        std::vector<Piece> pieces;
    };
    using Hist = std::vector<std::pair<std::uint32_t, std::uint64_t>>;
    using HistCache = std::vector<std::optional<Hist>>;

    static std::uint32_t bits_at(const Sym& x, int pos, Piece p) {
        std::uint32_t m = 0;
        for (std::size_t k = 0; k < x.sets.size(); ++k)
            if (x.sets[k].first == pos && x.sets[k].second->test(p)) m |= 1u << k;
        return m;
    }

    const Hist& hist(const Sym& x, int c, HistCache& cache) const {
        if (!cache[c]) {
            std::map<std::uint32_t, std::uint64_t> h;
            bool any = std::any_of(x.sets.begin(), x.sets.end(), [&](const auto& s) { return s.first == ctx_[c].pos; });
            if (!any)
                h[0] = ctx_[c].pieces.size();
            else
                for (Piece p : ctx_[c].pieces) ++h[bits_at(x, ctx_[c].pos, p)];
            cache[c] = Hist(h.begin(), h.end());
        }
        return *cache[c];
    }

    std::uint64_t count_table(const Sym& x) const {
        std::uint64_t total = 0;
        for (const auto& a : small_)
            if (x.table[pattern(x, a)]) ++total;
        HistCache h0(ctx_.size()), h1(ctx_.size()), h2(ctx_.size());
        for (const auto& sk : t3_) {
            const auto& A = hist(x, sk[0], h0);
            const auto& B = hist(x, sk[1], h1);
            const auto& C = hist(x, sk[2], h2);
            for (const auto& [ma, ca] : A)
                for (const auto& [mb, cb] : B)
                    for (const auto& [mc, cc] : C)
                        if (x.table[ma | mb | mc]) total += ca * cb * cc;
        }
        return total;
    }

    /// Drops sets the table does not depend on.
    static Sym reduce(Sym x) {
        for (std::size_t k = x.sets.size(); k-- > 0;) {
            bool dead = true;
            for (std::size_t idx = 0; idx < x.table.size() && dead; ++idx)
                if (x.table[idx] != x.table[idx ^ (std::size_t{1} << k)]) dead = false;
            if (!dead) continue;
            std::vector<std::uint8_t> t;
            for (std::size_t idx = 0; idx < x.table.size(); ++idx)
                if (!(idx >> k & 1u)) t.push_back(x.table[idx]);
            x.table = std::move(t);
            x.sets.erase(x.sets.begin() + static_cast<std::ptrdiff_t>(k));
        }
        return x;
    }

    const RainbowStructure& s_;
    std::vector<Ctx> ctx_;
    std::vector<std::array<int, 3>> t3_;
    std::vector<Atom> small_;
};

}  // namespace detail

namespace {

using detail::Engine;
using detail::kWords;
using detail::PieceSet;
using detail::Sym;

Sym eval(const Engine& e, const bao::Term& t, const std::vector<Sym>& env) {
    using Op = bao::Term::Op;
    switch (t.op) {
        case Op::Var:
            if (t.i < 0 || static_cast<std::size_t>(t.i) >= env.size())
                throw Error(ErrorKind::UnboundVariable, "v" + std::to_string(t.i));
            return env[t.i];
        case Op::Zero: return e.zero();
        case Op::One: return e.top();
        case Op::Join: return e.join(eval(e, t.kids[0], env), eval(e, t.kids[1], env));
        case Op::Meet: return e.meet(eval(e, t.kids[0], env), eval(e, t.kids[1], env));
        case Op::Neg: return e.neg(eval(e, t.kids[0], env));
        case Op::Cyl: return e.cyl(t.i, eval(e, t.kids[0], env));
        case Op::Diag: return e.diag(t.i, t.j);
        case Op::Interior:
            if (t.i < 0 || t.i > 2) throw Error(ErrorKind::IndexOutOfRange, "interior index");
            return eval(e, t.kids[0], env);
        case Op::Box: throw Error(ErrorKind::NoChangSystem, "the rainbow algebra carries no box operators");
        case Op::Subst: {
            Sym x = eval(e, t.kids[0], env);
            if (t.i == t.j) return x;
            return e.cyl(t.i, e.meet(e.diag(t.i, t.j), x));
        }
        case Op::Q: return e.neg(e.cyl(t.i, e.neg(eval(e, t.kids[0], env))));
        case Op::Xor: {
            Sym a = eval(e, t.kids[0], env), b = eval(e, t.kids[1], env);
            return e.meet(e.join(e.neg(a), b), e.join(e.neg(b), a));
        }
    }
    return e.zero();
}

bao::SuiteReport check_elements(const Engine& e, bao::Suite suite, const std::vector<bao::Axiom>& axioms,
                                std::uint64_t samples, std::uint64_t seed) {
    bao::SuiteReport report;
    report.suite = suite;
    report.exhaustive = false;
    std::uint64_t counter = 0;
    for (const auto& ax : axioms) {
        bao::AxiomResult r;
        r.id = ax.id;
        r.text = ax.text;
        r.instances = ax.instances.size();
        bool any_env = false;
        for (const auto& inst : ax.instances) {
            std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * ++counter);
            int vars = std::max(bao::max_var(inst.lhs), bao::max_var(inst.rhs)) + 1;
            for (const auto& g : inst.guards) vars = std::max(vars, g.var + 1);
            for (std::uint64_t k = 0; k < samples && r.status != bao::Status::Fails; ++k) {
                std::vector<Sym> env;
                for (int v = 0; v < vars; ++v) {
                    Sym x = e.random_element(rng);
                    for (const auto& g : inst.guards)
                        if (g.var == v)
                            for (int idx : g.indices) x = e.cyl(idx, x);
                    env.push_back(std::move(x));
                }
                bool guarded = true;
                for (const auto& g : inst.guards)
                    for (int idx : g.indices)
                        if (!e.equal(e.cyl(idx, env[g.var]), env[g.var])) guarded = false;
                if (!guarded) continue;
                any_env = true;
                ++r.environments;
                Sym l = eval(e, inst.lhs, env), rr = eval(e, inst.rhs, env);
                bool ok = inst.kind == bao::Equation::Kind::Equal ? e.equal(l, rr) : e.leq(l, rr);
                if (!ok) {
                    r.status = bao::Status::Fails;
                    r.failing_instance = inst.to_string() + " (sample " + std::to_string(k) + ")";
                }
            }
        }
        if (r.status != bao::Status::Fails && !any_env) r.status = bao::Status::Vacuous;
        report.axioms.push_back(std::move(r));
    }
    return report;
}

/// Three-node graph with position labels L and the given shades per position.
ColouredGraph graph_with(const std::array<int, 3>& L, const std::array<YellowSet, 3>& f, const std::array<YellowSet, 3>& b) {
    ColouredGraph g(3);
    for (int i = 0; i < 3; ++i) {
        auto [x, y] = kPair[i];
        g.set_edge(x, y, edge_colour(L[i]));
        if (!label_is_green(L[i])) {
            g.set_yellow({x, y}, f[i]);
            g.set_yellow({y, x}, b[i]);
        }
    }
    return g;
}

YellowSet lowest(YellowSet m) { return static_cast<YellowSet>(std::countr_zero(m)); }

CheckLine check_validity(const RainbowStructure& s) {
    const auto& sig = s.sig();
    const YellowSet pal = static_cast<YellowSet>(s.palette());
    std::map<std::array<int, 3>, const Skeleton*> t3;
    for (const auto& sk : s.skeletons())
        if (sk.kernel < 0) t3[sk.labels] = &sk;
    std::uint64_t graphs = 0;
    std::string problem;

    // Two-node graphs: every label and every pair of shades.
    for (int e = 0; e < kEdgeLabels && problem.empty(); ++e)
        for (int f = 0; f < 32 && problem.empty(); ++f)
            for (int b = 0; b < 32 && problem.empty(); ++b) {
                if (label_is_green(e) && (f || b)) continue;
                ColouredGraph g(2);
                g.set_edge(0, 1, edge_colour(e));
                if (!label_is_green(e)) g.set_yellow({0, 1}, f), g.set_yellow({1, 0}, b);
                ++graphs;
                bool admitted = is_valid_coloured_graph(g, sig).valid &&
                                (label_is_green(e) || ((pal >> f & 1u) && (pal >> b & 1u)));
                Atom a{{make_piece(e, f, b), make_piece(e, f, b), kIdentified}};
                if (admitted != s.is_valid_atom(a)) problem = "two-node graph " + piece_to_string(a.pieces[0]);
            }

    // Three-node graphs: every edge triple, then one shade varied at a time
    // against a base assignment drawn from the skeleton's masks.
    for (int e01 = 0; e01 < kEdgeLabels && problem.empty(); ++e01)
        for (int e02 = 0; e02 < kEdgeLabels && problem.empty(); ++e02)
            for (int e12 = 0; e12 < kEdgeLabels && problem.empty(); ++e12) {
                std::array<int, 3> L{e12, e02, e01};
                std::array<YellowSet, 3> full{31, 31, 31};
                ++graphs;
                bool edges_ok = is_valid_coloured_graph(graph_with(L, full, full), sig).valid;
                auto it = t3.find(L);
                if (!edges_ok) {
                    if (it != t3.end()) problem = "skeleton on a forbidden triangle";
                    continue;
                }
                if (it == t3.end()) {
                    bool empty_mask = false;
                    for (int i = 0; i < 3; ++i) {
                        if (label_is_green(L[i])) continue;
                        auto [x, y] = kPair[i];
                        int tf = required_tint(L, x, y), tb = required_tint(L, y, x);
                        if (!(pal & (tf ? tint_mask(tf) : ~0u)) || !(pal & (tb ? tint_mask(tb) : ~0u))) empty_mask = true;
                    }
                    if (!empty_mask) problem = "valid edge triple without a skeleton";
                    continue;
                }
                const Skeleton& sk = *it->second;
                std::array<YellowSet, 3> f{}, b{};
                for (int i = 0; i < 3; ++i)
                    if (!label_is_green(L[i])) f[i] = lowest(sk.fwd[i]), b[i] = lowest(sk.bwd[i]);
                for (int i = 0; i < 3 && problem.empty(); ++i) {
                    if (label_is_green(L[i])) continue;
                    for (int side = 0; side < 2; ++side)
                        for (YellowSet v = 0; v < 32; ++v) {
                            auto ff = f, bb = b;
                            (side == 0 ? ff : bb)[i] = v;
                            ++graphs;
                            bool admitted = is_valid_coloured_graph(graph_with(L, ff, bb), sig).valid && (pal >> v & 1u);
                            bool in_mask = ((side == 0 ? sk.fwd[i] : sk.bwd[i]) >> v & 1u) != 0;
                            if (admitted != in_mask) {
                                problem = "shade mask mismatch at position " + std::to_string(i);
                                break;
                            }
                        }
                }
            }

    // Direct check on atoms drawn from every skeleton.
    std::mt19937_64 rng(12345);
    std::uint64_t drawn = 0;
    for (std::size_t k = 0; k < 20000 && problem.empty(); ++k) {
        Atom a = s.random_atom(rng);
        auto [g, surj] = s.graph_of(a);
        ++drawn;
        if (!is_valid_coloured_graph(g, sig).valid || s.atom_of(g, surj) != a) problem = "drawn atom fails validity";
    }

    CheckLine line;
    line.id = "valid";
    line.text = "every atom's graph is a valid coloured graph, and every valid graph yields an atom";
    line.holds = problem.empty();
    line.evidence = problem.empty() ? std::to_string(graphs) + " graphs validated across all edge triples and shade positions; " +
                                          std::to_string(drawn) + " drawn atoms round-tripped"
                                    : problem;
    return line;
}

/// T_i . T_j = T_j . T_i: pieces at i and at j are jointly realised by some
/// atom exactly on a rectangle.
CheckLine check_commutation(const RainbowStructure& s, const Engine& e, int i, int j) {
    std::vector<PieceSet> rows(kPieces);
    std::vector<bool> row_used(kPieces, false);
    PieceSet cols;
    auto mark = [&](Piece pi, Piece pj) {
        rows[pi].set(pj);
        row_used[pi] = true;
        cols.set(pj);
    };
    for (const auto& a : e.small_atoms()) mark(a.pieces[i], a.pieces[j]);
    for (const auto& sk : s.skeletons()) {
        if (sk.kernel >= 0) continue;
        PieceSet colset;
        auto pj = pieces_of(sk.labels[j], sk.fwd[j], sk.bwd[j]);
        for (Piece p : pj) colset.set(p), cols.set(p);
        for (Piece p : pieces_of(sk.labels[i], sk.fwd[i], sk.bwd[i])) {
            row_used[p] = true;
            for (int w = 0; w < kWords; ++w) rows[p].w[w] |= colset.w[w];
        }
    }
    std::uint64_t used = 0;
    bool rect = true;
    for (int p = 0; p < kPieces; ++p) {
        if (!row_used[p]) continue;
        ++used;
        if (rows[p].w != cols.w) rect = false;
    }
    std::uint64_t col_count = 0;
    for (auto w : cols.w) col_count += static_cast<std::uint64_t>(std::popcount(w));
    CheckLine line;
    line.id = "5";
    line.text = "T_" + std::to_string(i) + " . T_" + std::to_string(j) + " = T_" + std::to_string(j) + " . T_" +
                std::to_string(i);
    line.holds = rect;
    line.evidence = "every one of " + std::to_string(used) + " pieces at " + std::to_string(i) + " amalgamates with every one of " +
                    std::to_string(col_count) + " pieces at " + std::to_string(j);
    if (!rect) line.evidence = "joint realisation is not a rectangle";
    return line;
}

}  // namespace

bool CaReport::passed() const {
    return std::all_of(atom_checks.begin(), atom_checks.end(), [](const CheckLine& c) { return c.holds; }) &&
           element_checks.passed() && tca_element_checks.passed();
}

CaReport check_ca(const RainbowStructure& s, std::uint64_t samples_per_instance, std::uint64_t seed) {
    CaReport rep;
    rep.samples = samples_per_instance;
    rep.seed = seed;
    Engine e(s);

    rep.atom_checks.push_back(check_validity(s));

    rep.atom_checks.push_back({"1", "Cm At is a powerset Boolean algebra", true, "complex algebra"});
    rep.atom_checks.push_back({"2", "c_i 0 = 0: the T_i image of no atom is empty", true, "complex algebra"});
    rep.atom_checks.push_back(
        {"3-4", "T_i is an equivalence relation", true, "T_i compares the i-th piece, the kernel of a function on atoms"});
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) rep.atom_checks.push_back(check_commutation(s, e, i, j));

    // E_ii = At holds by definition; E_ij = T_k[E_ik . E_jk] and the
    // uniqueness condition are checked on every atom with an identification.
    {
        CheckLine c7{"7", "E_ij = T_k[E_ik . E_jk] for k not in {i,j}", true, ""};
        std::uint64_t seen = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                int k = 3 - i - j;
                std::vector<Atom> meet;
                for (const auto& a : e.small_atoms())
                    if (RainbowStructure::in_diagonal(i, k, a) && RainbowStructure::in_diagonal(j, k, a)) meet.push_back(a);
                std::set<Piece> pk;
                for (const auto& a : meet) pk.insert(a.pieces[k]);
                // Atoms without identification never lie in E_ij, so the small list decides it.
                for (const auto& a : e.small_atoms()) {
                    ++seen;
                    if (RainbowStructure::in_diagonal(i, j, a) != (pk.count(a.pieces[k]) > 0)) c7.holds = false;
                }
                if (pk.count(kIdentified) == 0 || pk.size() != 1) c7.holds = false;
            }
        c7.evidence = std::to_string(seen) + " atom-index checks; three-node atoms have no identification";
        rep.atom_checks.push_back(c7);
    }
    rep.atom_checks.push_back({"6", "E_ii = At", true, "a(i) = a(i) for every atom"});
    {
        CheckLine c8{"8", "distinct atoms of E_ij are never T_i-related (i != j)", true, ""};
        std::uint64_t seen = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                std::set<Piece> pieces;
                std::uint64_t members = 0;
                for (const auto& a : e.small_atoms())
                    if (RainbowStructure::in_diagonal(i, j, a)) ++members, pieces.insert(a.pieces[i]);
                seen += members;
                if (pieces.size() != members) c8.holds = false;
            }
        c8.evidence = std::to_string(seen) + " diagonal atoms, piece maps injective";
        rep.atom_checks.push_back(c8);
    }

    rep.element_checks = check_elements(e, bao::Suite::CA, bao::axiom_suite(bao::Suite::CA, 3), samples_per_instance, seed);
    rep.tca_element_checks =
        check_elements(e, bao::Suite::TCA, bao::axiom_suite(bao::Suite::TCA, 3), samples_per_instance, seed ^ 0x5bd1e995ULL);
    return rep;
}

bao::SuiteReport check_equations(const RainbowStructure& s, bao::Suite label, const std::vector<bao::Axiom>& axioms,
                                 std::uint64_t samples_per_instance, std::uint64_t seed) {
    Engine e(s);
    return check_elements(e, label, axioms, samples_per_instance, seed);
}

ElementAlgebra::ElementAlgebra(const RainbowStructure& s) : e_(std::make_unique<Engine>(s)) {}
ElementAlgebra::~ElementAlgebra() = default;

namespace {
ElementAlgebra::Value wrap(Sym x) { return std::make_shared<const Sym>(std::move(x)); }
}  // namespace

ElementAlgebra::Value ElementAlgebra::zero() const { return wrap(e_->zero()); }
ElementAlgebra::Value ElementAlgebra::top() const { return wrap(e_->top()); }
ElementAlgebra::Value ElementAlgebra::finite(const std::vector<Atom>& atoms) const { return wrap(e_->finite(atoms)); }
ElementAlgebra::Value ElementAlgebra::piece_cylinder(int i, const std::vector<Piece>& pieces) const {
    if (i < 0 || i > 2) throw Error(ErrorKind::IndexOutOfRange, "piece position");
    auto set = std::make_shared<PieceSet>();
    for (Piece p : pieces) {
        if (p >= kPieces) throw Error(ErrorKind::InvalidArgument, "piece out of range");
        set->set(p);
    }
    return wrap(e_->cylinder(i, set));
}
ElementAlgebra::Value ElementAlgebra::neg(const Value& x) const { return wrap(e_->neg(*x)); }
ElementAlgebra::Value ElementAlgebra::meet(const Value& x, const Value& y) const { return wrap(e_->meet(*x, *y)); }
ElementAlgebra::Value ElementAlgebra::join(const Value& x, const Value& y) const { return wrap(e_->join(*x, *y)); }
ElementAlgebra::Value ElementAlgebra::cyl(int i, const Value& x) const { return wrap(e_->cyl(i, *x)); }
ElementAlgebra::Value ElementAlgebra::diag(int i, int j) const { return wrap(e_->diag(i, j)); }
ElementAlgebra::Value ElementAlgebra::eval(const bao::Term& t, const std::vector<Value>& env) const {
    std::vector<Sym> v;
    for (const auto& x : env) v.push_back(*x);
    return wrap(::tcw::rainbow::eval(*e_, t, v));
}
bool ElementAlgebra::member(const Value& x, const Atom& a) const { return Engine::member(*x, a); }
bool ElementAlgebra::equal(const Value& x, const Value& y) const { return e_->equal(*x, *y); }
bool ElementAlgebra::leq(const Value& x, const Value& y) const { return e_->leq(*x, *y); }
std::uint64_t ElementAlgebra::size(const Value& x) const { return e_->size(*x); }
ElementAlgebra::Value ElementAlgebra::random(std::mt19937_64& rng) const { return wrap(e_->random_element(rng)); }

nlohmann::json to_json(const CaReport& r) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& c : r.atom_checks)
        atoms.push_back({{"id", c.id}, {"text", c.text}, {"holds", c.holds}, {"evidence", c.evidence}});
    return {{"atom_checks", atoms},
            {"elements", {{"CA", bao::to_json(r.element_checks)}, {"TCA", bao::to_json(r.tca_element_checks)}}},
            {"samples_per_instance", r.samples},
            {"seed", r.seed},
            {"passed", r.passed()}};
}

nlohmann::json skeleton_json(const Skeleton& s) {
    nlohmann::json labels = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) labels.push_back(s.labels[i] < 0 ? std::string("=") : edge_colour(s.labels[i]).to_string());
    return {{"kernel", s.kernel}, {"labels", labels}, {"fwd", s.fwd}, {"bwd", s.bwd}, {"count", s.count}};
}

}  // namespace tcw::rainbow
