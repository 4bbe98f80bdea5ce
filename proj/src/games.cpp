#include "tcw/games.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "tcw/error.hpp"
#include "tcw/setalg.hpp"

namespace tcw::games {

using rainbow::Atom;
using rainbow::Piece;

// ---------------------------------------------------------------- oracles

ExplicitOracle::ExplicitOracle(bao::AtomStructure s, nlohmann::json descriptor)
    : s_(std::move(s)), descriptor_(std::move(descriptor)) {
    if (s_.atoms > 64) throw Error(ErrorKind::TooManyAtoms, "explicit oracle holds at most 64 atoms");
    const std::size_t N = static_cast<std::size_t>(s_.atoms);
    rel_.assign(static_cast<std::size_t>(s_.dim), std::vector<bool>(N * N, false));
    for (int i = 0; i < s_.dim; ++i)
        for (auto [a, b] : s_.T[i]) rel_[i][static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)] = true;
}

bool ExplicitOracle::related(int i, AtomId a, AtomId b) const {
    if (i < 0 || i >= s_.dim) throw Error(ErrorKind::IndexOutOfRange, "T index");
    if (!is_atom(a) || !is_atom(b)) return false;
    return rel_[i][a * static_cast<std::size_t>(s_.atoms) + b];
}

bool ExplicitOracle::in_diagonal(int i, int j, AtomId a) const {
    if (i < 0 || j < 0 || i >= s_.dim || j >= s_.dim) throw Error(ErrorKind::IndexOutOfRange, "diagonal index");
    return is_atom(a) && (s_.diag(i, j) >> a & 1u);
}

std::optional<std::vector<AtomId>> ExplicitOracle::atoms() const {
    std::vector<AtomId> out(static_cast<std::size_t>(s_.atoms));
    std::iota(out.begin(), out.end(), AtomId{0});
    return out;
}

nlohmann::json ExplicitOracle::descriptor() const {
    if (!descriptor_.is_null()) return descriptor_;
    return {{"type", "explicit"}, {"structure", bao::to_json(s_)}};
}

bool RainbowOracle::is_atom(AtomId a) const { return s_.is_valid_atom(Atom::from_code(a)); }

bool RainbowOracle::related(int i, AtomId a, AtomId b) const {
    if (i < 0 || i > 2) throw Error(ErrorKind::IndexOutOfRange, "T index");
    return rainbow::RainbowStructure::related(i, Atom::from_code(a), Atom::from_code(b));
}

bool RainbowOracle::in_diagonal(int i, int j, AtomId a) const {
    return rainbow::RainbowStructure::in_diagonal(i, j, Atom::from_code(a));
}

std::unique_ptr<AtomOracle> full_set_algebra_oracle(int n, int u) {
    auto sp = setalg::make_space(n, u, discrete(u));
    return std::make_unique<ExplicitOracle>(bao::atom_structure_of(sp),
                                            nlohmann::json{{"type", "full-set-algebra"}, {"n", n}, {"u", u}});
}

std::unique_ptr<AtomOracle> make_oracle(const nlohmann::json& d) {
    const std::string type = d.at("type").get<std::string>();
    if (type == "full-set-algebra") return full_set_algebra_oracle(d.at("n").get<int>(), d.at("u").get<int>());
    if (type == "rainbow") {
        if (d.at("n").get<int>() != 3) throw Error(ErrorKind::DimUnsupported, "rainbow oracle exists for n = 3 only");
        return std::make_unique<RainbowOracle>();
    }
    if (type == "explicit") return std::make_unique<ExplicitOracle>(bao::atom_structure_from_json(d.at("structure")));
    throw Error(ErrorKind::InvalidArgument, "unknown structure type '" + type + "'");
}

// ---------------------------------------------------------------- networks

bool AtomicNetwork::has_node(int x) const { return std::binary_search(nodes_.begin(), nodes_.end(), x); }

void AtomicNetwork::add_node(int x) {
    if (x < 0) throw Error(ErrorKind::InvalidArgument, "negative node");
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
    if (it == nodes_.end() || *it != x) nodes_.insert(it, x);
}

void AtomicNetwork::set(const std::vector<int>& tuple, AtomId a) {
    if (static_cast<int>(tuple.size()) != dim_) throw Error(ErrorKind::InvalidArgument, "tuple length");
    for (int x : tuple)
        if (!has_node(x)) throw Error(ErrorKind::InvalidArgument, "tuple uses node " + std::to_string(x) + " not in the network");
    labels_[tuple] = a;
}

std::optional<AtomId> AtomicNetwork::get(const std::vector<int>& tuple) const {
    auto it = labels_.find(tuple);
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

AtomicNetwork AtomicNetwork::without(int x) const {
    AtomicNetwork out(dim_);
    for (int y : nodes_)
        if (y != x) out.nodes_.push_back(y);
    for (const auto& [t, a] : labels_)
        if (std::find(t.begin(), t.end(), x) == t.end()) out.labels_.emplace(t, a);
    return out;
}

namespace {

std::string tuple_key(const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

std::vector<int> parse_tuple(const std::string& k) {
    if (k.size() < 2 || k.front() != '(' || k.back() != ')') throw Error(ErrorKind::Parse, "bad tuple '" + k + "'");
    std::vector<int> out;
    std::stringstream ss(k.substr(1, k.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

/// Every tuple of length n over `nodes`, lexicographic.
void for_each_tuple(const std::vector<int>& nodes, int n, const std::function<void(const std::vector<int>&)>& f) {
    if (nodes.empty()) return;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<int> t(static_cast<std::size_t>(n));
    while (true) {
        for (int i = 0; i < n; ++i) t[i] = nodes[idx[i]];
        f(t);
        int i = n - 1;
        while (i >= 0 && ++idx[i] == nodes.size()) idx[i--] = 0;
        if (i < 0) break;
    }
}

}  // namespace

nlohmann::json to_json(const AtomicNetwork& n) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [t, a] : n.labels()) labels[tuple_key(t)] = a;
    return {{"dim", n.dim()}, {"nodes", n.nodes()}, {"labels", labels}};
}

AtomicNetwork network_from_json(const nlohmann::json& j) {
    AtomicNetwork n(j.at("dim").get<int>());
    for (int x : j.at("nodes").get<std::vector<int>>()) n.add_node(x);
    for (const auto& [k, v] : j.at("labels").items()) n.set(parse_tuple(k), v.get<AtomId>());
    return n;
}

NetworkVerdict validate_network(const AtomOracle& s, const AtomicNetwork& net) {
    const int n = s.dim();
    if (net.dim() != n) return {false, "total", {}, "network dimension differs from the structure"};
    NetworkVerdict out;
    auto fail = [&](const char* c, const std::vector<int>& t, std::string d) {
        if (out.valid) out = NetworkVerdict{false, c, t, std::move(d)};
    };
    for_each_tuple(net.nodes(), n, [&](const std::vector<int>& t) {
        if (!out.valid) return;
        auto a = net.get(t);
        if (!a) return fail("total", t, "unlabelled tuple");
        if (!s.is_atom(*a)) return fail("atom", t, "label " + std::to_string(*a) + " is not an atom");
    });
    if (!out.valid) return out;
    if (net.labels().size() != static_cast<std::size_t>(std::pow(net.nodes().size(), n)))
        return {false, "total", {}, "labels on tuples outside the node set"};
    for (const auto& [t, a] : net.labels()) {
        for (int i = 0; i < n && out.valid; ++i)
            for (int j = 0; j < n && out.valid; ++j)
                if (t[i] == t[j] && !s.in_diagonal(i, j, a))
                    fail("diagonal", t, "entries " + std::to_string(i) + "," + std::to_string(j) + " coincide");
        for (int i = 0; i < n && out.valid; ++i)
            for (int d : net.nodes()) {
                auto u = t;
                u[i] = d;
                if (!s.related(i, *net.get(u), a)) {
                    fail("cylinder", u, "not T_" + std::to_string(i) + "-related to " + tuple_key(t));
                    break;
                }
            }
        if (!out.valid) break;
    }
    return out;
}

const char* to_string(Mode m) { return m == Mode::F ? "F" : "G"; }

Mode mode_from_string(const std::string& s) {
    if (s == "F") return Mode::F;
    if (s == "G") return Mode::G;
    throw Error(ErrorKind::InvalidArgument, "mode must be F or G");
}

const char* to_string(Winner w) { return w == Winner::Exists ? "exists" : "forall"; }

std::vector<int> Move::tuple() const {
    std::vector<int> t = face;
    t.insert(t.begin() + l, k);
    return t;
}

bool move_condition(const AtomOracle& s, const AtomicNetwork& net, const Move& mv) {
    const int n = s.dim();
    if (static_cast<int>(mv.face.size()) != n - 1 || mv.l < 0 || mv.l >= n || !s.is_atom(mv.b)) return false;
    for (int f : mv.face)
        if (!net.has_node(f)) return false;
    for (int x : net.nodes()) {
        Move probe = mv;
        probe.k = x;
        auto a = net.get(probe.tuple());
        if (a && s.related(mv.l, mv.b, *a)) return true;
    }
    return false;
}

namespace {

std::vector<AtomId> listed_atoms(const AtomOracle& s) {
    auto atoms = s.atoms();
    if (!atoms) throw Error(ErrorKind::TooManyAtoms, "the structure cannot list its atoms");
    return *atoms;
}

int least_unused(const AtomicNetwork& net) {
    int k = 0;
    while (net.has_node(k)) ++k;
    return k;
}

/// Consistency of labelling t with a against the tuples already labelled.
bool consistent(const AtomOracle& s, const std::map<std::vector<int>, AtomId>& lab, const std::vector<int>& nodes,
                const std::vector<int>& t, AtomId a) {
    const int n = static_cast<int>(t.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (t[i] == t[j] && !s.in_diagonal(i, j, a)) return false;
    std::vector<int> u = t;
    for (int i = 0; i < n; ++i) {
        for (int d : nodes) {
            if (d == t[i]) continue;
            u[i] = d;
            auto it = lab.find(u);
            if (it != lab.end() && (!s.related(i, a, it->second) || !s.related(i, it->second, a))) return false;
        }
        u[i] = t[i];
    }
    return true;
}

/// Backtracking completion, most constrained tuple first.
void complete(const AtomOracle& s, const std::vector<AtomId>& atoms, std::map<std::vector<int>, AtomId>& lab,
              const std::vector<int>& nodes, std::vector<std::vector<int>>& todo, std::size_t limit,
              const std::function<void(const std::map<std::vector<int>, AtomId>&)>& emit, std::size_t& emitted) {
    if (todo.empty()) {
        if (++emitted > limit) throw Error(ErrorKind::BudgetExceeded, "more than " + std::to_string(limit) + " responses");
        emit(lab);
        return;
    }
    std::size_t best = 0;
    std::vector<AtomId> best_dom;
    bool first = true;
    for (std::size_t k = 0; k < todo.size(); ++k) {
        std::vector<AtomId> dom;
        for (AtomId a : atoms)
            if (consistent(s, lab, nodes, todo[k], a)) dom.push_back(a);
        if (first || dom.size() < best_dom.size()) {
            best = k;
            best_dom = std::move(dom);
            first = false;
        }
        if (best_dom.empty()) return;
    }
    std::vector<int> t = todo[best];
    todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(best));
    for (AtomId a : best_dom) {
        lab[t] = a;
        complete(s, atoms, lab, nodes, todo, limit, emit, emitted);
        lab.erase(t);
    }
    todo.insert(todo.begin() + static_cast<std::ptrdiff_t>(best), t);
}

}  // namespace

std::vector<Move> legal_forall_moves(const AtomOracle& s, const GameState& state) {
    if (state.history.empty()) throw Error(ErrorKind::InvalidArgument, "no network has been played");
    const auto atoms = listed_atoms(s);
    const AtomicNetwork& net = state.current();
    const int n = s.dim();
    std::vector<Move> out;
    const int fresh = least_unused(net);
    for_each_tuple(net.nodes(), n - 1, [&](const std::vector<int>& face) {
        std::vector<int> ks;
        if (state.mode == Mode::F)
            for (int x : net.nodes())
                if (std::find(face.begin(), face.end(), x) == face.end()) ks.push_back(x);
        if (fresh < state.m) ks.push_back(fresh);
        for (int l = 0; l < n; ++l)
            for (int k : ks)
                for (AtomId b : atoms) {
                    Move mv{face, k, b, l};
                    if (move_condition(s, net, mv)) out.push_back(mv);
                }
    });
    return out;
}

std::vector<AtomicNetwork> legal_exists_responses(const AtomOracle& s, const AtomicNetwork& net, const Move& mv,
                                                  std::size_t limit) {
    if (!move_condition(s, net, mv)) return {};
    const auto atoms = listed_atoms(s);
    AtomicNetwork base = net.has_node(mv.k) ? net.without(mv.k) : net;
    std::vector<int> nodes = base.nodes();
    nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), mv.k), mv.k);
    auto lab = base.labels();
    const auto demand = mv.tuple();
    if (!consistent(s, lab, nodes, demand, mv.b)) return {};
    lab[demand] = mv.b;
    std::vector<std::vector<int>> todo;
    for_each_tuple(nodes, s.dim(), [&](const std::vector<int>& t) {
        if (std::find(t.begin(), t.end(), mv.k) != t.end() && t != demand) todo.push_back(t);
    });
    std::vector<AtomicNetwork> out;
    std::size_t emitted = 0;
    complete(s, atoms, lab, nodes, todo, limit,
             [&](const std::map<std::vector<int>, AtomId>& full) {
                 AtomicNetwork m(s.dim());
                 for (int x : nodes) m.add_node(x);
                 for (const auto& [t, a] : full) m.set(t, a);
                 out.push_back(std::move(m));
             },
             emitted);
    std::sort(out.begin(), out.end(), [](const AtomicNetwork& a, const AtomicNetwork& b) { return a.labels() < b.labels(); });
    return out;
}

std::vector<AtomicNetwork> initial_networks(const AtomOracle& s, AtomId a, std::size_t limit) {
    const auto atoms = listed_atoms(s);
    const int n = s.dim();
    std::vector<int> nodes(static_cast<std::size_t>(n));
    std::iota(nodes.begin(), nodes.end(), 0);
    std::map<std::vector<int>, AtomId> lab;
    if (!s.is_atom(a) || !consistent(s, lab, nodes, nodes, a)) return {};
    lab[nodes] = a;
    std::vector<std::vector<int>> todo;
    for_each_tuple(nodes, n, [&](const std::vector<int>& t) {
        if (t != nodes) todo.push_back(t);
    });
    std::vector<AtomicNetwork> out;
    std::size_t emitted = 0;
    complete(s, atoms, lab, nodes, todo, limit,
             [&](const std::map<std::vector<int>, AtomId>& full) {
                 AtomicNetwork m(n);
                 for (int x : nodes) m.add_node(x);
                 for (const auto& [t, b] : full) m.set(t, b);
                 out.push_back(std::move(m));
             },
             emitted);
    std::sort(out.begin(), out.end(), [](const AtomicNetwork& x, const AtomicNetwork& y) { return x.labels() < y.labels(); });
    return out;
}

namespace {

std::vector<AtomId> encode(const AtomicNetwork& net, const std::vector<int>& image) {
    // image[p] is the new name of net.nodes()[p]; the code lists labels of the
    // renamed network in lexicographic tuple order.
    const auto& nodes = net.nodes();
    const int s = static_cast<int>(nodes.size());
    std::vector<int> inverse(static_cast<std::size_t>(s));
    for (int p = 0; p < s; ++p) inverse[image[p]] = nodes[p];
    std::vector<int> order(static_cast<std::size_t>(s));
    std::iota(order.begin(), order.end(), 0);
    std::vector<AtomId> code;
    for_each_tuple(order, net.dim(), [&](const std::vector<int>& t) {
        std::vector<int> orig(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) orig[i] = inverse[t[i]];
        code.push_back(*net.get(orig));
    });
    return code;
}

}  // namespace

AtomicNetwork canonical(const AtomicNetwork& net) {
    const int s = static_cast<int>(net.nodes().size());
    AtomicNetwork out(net.dim());
    if (s == 0) return out;
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    std::vector<AtomId> best_code = encode(net, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        auto code = encode(net, perm);
        if (code < best_code) best_code = std::move(code), best = perm;
    }
    for (int x = 0; x < s; ++x) out.add_node(x);
    for (const auto& [t, a] : net.labels()) {
        std::vector<int> u(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            auto p = std::lower_bound(net.nodes().begin(), net.nodes().end(), t[i]) - net.nodes().begin();
            u[i] = best[static_cast<std::size_t>(p)];
        }
        out.set(u, a);
    }
    return out;
}

// ---------------------------------------------------------------- solver

namespace {

using Key = std::pair<std::vector<AtomId>, int>;

Key key_of(const AtomicNetwork& canon, int rounds_left) {
    std::vector<AtomId> code{static_cast<AtomId>(canon.nodes().size())};
    for (const auto& [t, a] : canon.labels()) code.push_back(a);
    return {code, rounds_left};
}

struct Outcome {
    bool win = false;
    AtomicNetwork network;
    int rounds_left = 0;
    // ∃ wins: every ∀ move with the reply she picks. ∀ wins: one move with every reply.
    std::vector<std::pair<Move, std::vector<std::pair<AtomicNetwork, Key>>>> moves;
    bool initial = false;
};

class Solver {
public:
    Solver(const AtomOracle& s, int m, Mode mode, std::uint64_t budget) : s_(s), m_(m), mode_(mode), budget_(budget) {}

    bool solve_root(int rounds) {
        Key root{{}, rounds + 1};
        Outcome o;
        o.network = AtomicNetwork(s_.dim());
        o.rounds_left = rounds + 1;
        o.initial = true;
        o.win = true;
        for (AtomId a : listed_atoms(s_)) {
            Move mv{{}, -1, a, -1};
            std::vector<std::pair<AtomicNetwork, Key>> replies;
            bool found = false;
            auto opens = initial_networks(s_, a);
            stats.responses += opens.size();
            for (const auto& n0 : opens) {
                auto c = canonical(n0);
                Key k = key_of(c, rounds);
                bool w = win(c, rounds);
                if (w) {
                    replies = {{n0, k}};
                    found = true;
                    break;
                }
                replies.push_back({n0, k});
            }
            if (!found) {
                o.win = false;
                o.moves = {{mv, replies}};
                break;
            }
            o.moves.push_back({mv, replies});
        }
        memo_[root] = o;
        root_ = root;
        return o.win;
    }

    bool win(const AtomicNetwork& canon, int rounds_left) {
        Key key = key_of(canon, rounds_left);
        if (auto it = memo_.find(key); it != memo_.end()) {
            ++stats.memo_hits;
            return it->second.win;
        }
        if (++stats.expansions > budget_)
            throw Error(ErrorKind::BudgetExceeded, "search exceeded " + std::to_string(budget_) + " expansions");
        Outcome o;
        o.network = canon;
        o.rounds_left = rounds_left;
        o.win = true;
        if (rounds_left > 0) {
            GameState st{{canon}, 0, m_, mode_};
            for (const auto& mv : legal_forall_moves(s_, st)) {
                auto responses = legal_exists_responses(s_, canon, mv);
                stats.responses += responses.size();
                std::vector<std::pair<AtomicNetwork, Key>> replies;
                bool found = false;
                for (const auto& r : responses) {
                    auto c = canonical(r);
                    Key k = key_of(c, rounds_left - 1);
                    if (win(c, rounds_left - 1)) {
                        replies = {{r, k}};
                        found = true;
                        break;
                    }
                    replies.push_back({r, k});
                }
                if (!found) {
                    o.win = false;
                    o.moves = {{mv, replies}};
                    break;
                }
                o.moves.push_back({mv, replies});
            }
        }
        memo_[key] = o;
        return o.win;
    }

    Certificate certificate(int rounds) const {
        Certificate c;
        const Outcome& root = memo_.at(root_);
        c.winner = root.win ? Winner::Exists : Winner::Forall;
        c.rounds = rounds;
        c.nodes = m_;
        c.mode = mode_;
        c.structure = s_.descriptor();
        std::map<Key, int> ids;
        std::vector<Key> queue{root_};
        ids[root_] = 0;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const Outcome& o = memo_.at(queue[q]);
            CertState st;
            st.id = static_cast<int>(q);
            st.network = o.network;
            st.rounds_left = o.rounds_left;
            for (const auto& [mv, replies] : o.moves) {
                MoveRecord rec;
                rec.initial = o.initial;
                rec.move = mv;
                for (const auto& [net, k] : replies) {
                    auto [it, fresh] = ids.emplace(k, static_cast<int>(queue.size()));
                    if (fresh) queue.push_back(k);
                    rec.replies.push_back({net, it->second});
                }
                st.moves.push_back(std::move(rec));
            }
            c.states.push_back(std::move(st));
        }
        return c;
    }

    SolveStats stats;

private:
    const AtomOracle& s_;
    int m_;
    Mode mode_;
    std::uint64_t budget_;
    std::map<Key, Outcome> memo_;
    Key root_;
};

}  // namespace

SolveResult solve_bounded(const AtomOracle& s, int m, int rounds, Mode mode, std::uint64_t budget) {
    if (rounds < 0 || rounds > 6) throw Error(ErrorKind::InvalidArgument, "rounds must lie in 0..6");
    if (m < s.dim() || m > s.dim() + 3) throw Error(ErrorKind::InvalidArgument, "node budget must lie in n..n+3");
    if (!s.atoms()) throw Error(ErrorKind::BudgetExceeded, "the structure cannot list its atoms; full minimax is out of reach");
    Solver solver(s, m, mode, budget);
    bool win = solver.solve_root(rounds);
    SolveResult r;
    r.winner = win ? Winner::Exists : Winner::Forall;
    r.certificate = solver.certificate(rounds);
    r.stats = solver.stats;
    return r;
}

// ---------------------------------------------------------------- verifier

namespace {

std::string check_reply(const AtomOracle& s, const AtomicNetwork& net, const Move& mv, const AtomicNetwork& reply) {
    auto v = validate_network(s, reply);
    if (!v.valid) return "reply fails " + v.condition + " at " + tuple_key(v.tuple);
    AtomicNetwork base = net.has_node(mv.k) ? net.without(mv.k) : net;
    std::vector<int> nodes = base.nodes();
    nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), mv.k), mv.k);
    if (reply.nodes() != nodes) return "reply has the wrong node set";
    for (const auto& [t, a] : base.labels())
        if (reply.get(t) != a) return "reply does not extend the network at " + tuple_key(t);
    if (reply.get(mv.tuple()) != mv.b) return "reply misses the demanded atom";
    return {};
}

std::string check_initial(const AtomOracle& s, AtomId a, const AtomicNetwork& reply) {
    auto v = validate_network(s, reply);
    if (!v.valid) return "opening network fails " + v.condition;
    std::vector<int> nodes(static_cast<std::size_t>(s.dim()));
    std::iota(nodes.begin(), nodes.end(), 0);
    if (reply.nodes() != nodes || reply.get(nodes) != a) return "opening network does not carry the atom";
    return {};
}

}  // namespace

VerifyReport verify_certificate(const AtomOracle& s, const Certificate& c) {
    VerifyReport rep;
    auto fail = [&](const std::string& d) {
        rep.ok = false;
        rep.detail = d;
        return rep;
    };
    if (c.states.empty()) return fail("empty certificate");
    if (!c.states[0].network.nodes().empty() || c.states[0].rounds_left != c.rounds + 1)
        return fail("state 0 is not the opening state");
    const auto atoms = listed_atoms(s);
    const bool exists = c.winner == Winner::Exists;

    for (const auto& st : c.states) {
        ++rep.states;
        auto child_ok = [&](const Reply& r, int expect_left) -> std::string {
            if (r.child < 0 || r.child >= static_cast<int>(c.states.size())) return "dangling child";
            const auto& ch = c.states[r.child];
            if (ch.rounds_left != expect_left) return "child round count is off";
            if (!(canonical(r.network) == ch.network)) return "child network is not the canonical reply";
            if (!exists && ch.rounds_left == 0) return "an ∃ line survives every round";
            return {};
        };
        const std::string where = "state " + std::to_string(st.id) + ": ";
        if (st.id == 0) {
            if (exists) {
                if (st.moves.size() != atoms.size()) return fail(where + "not every opening atom is answered");
                for (std::size_t k = 0; k < atoms.size(); ++k) {
                    const auto& rec = st.moves[k];
                    ++rep.moves;
                    if (!rec.initial || rec.move.b != atoms[k] || rec.replies.size() != 1)
                        return fail(where + "opening move " + std::to_string(k) + " malformed");
                    if (auto e = check_initial(s, atoms[k], rec.replies[0].network); !e.empty()) return fail(where + e);
                    if (auto e = child_ok(rec.replies[0], c.rounds); !e.empty()) return fail(where + e);
                }
            } else {
                if (st.moves.size() != 1 || !st.moves[0].initial) return fail(where + "∀ must name one opening atom");
                const auto& rec = st.moves[0];
                ++rep.moves;
                auto all = initial_networks(s, rec.move.b);
                if (all.size() != rec.replies.size()) return fail(where + "opening replies are incomplete");
                for (std::size_t k = 0; k < all.size(); ++k) {
                    if (!(all[k] == rec.replies[k].network)) return fail(where + "opening reply mismatch");
                    if (auto e = child_ok(rec.replies[k], c.rounds); !e.empty()) return fail(where + e);
                }
            }
            continue;
        }
        if (st.rounds_left == 0) continue;
        GameState gs{{st.network}, 0, c.nodes, c.mode};
        if (exists) {
            auto moves = legal_forall_moves(s, gs);
            if (moves.size() != st.moves.size()) return fail(where + "not every ∀ move is answered");
            for (std::size_t k = 0; k < moves.size(); ++k) {
                const auto& rec = st.moves[k];
                ++rep.moves;
                if (!(rec.move == moves[k]) || rec.replies.size() != 1) return fail(where + "move " + std::to_string(k) + " malformed");
                if (auto e = check_reply(s, st.network, rec.move, rec.replies[0].network); !e.empty()) return fail(where + e);
                if (auto e = child_ok(rec.replies[0], st.rounds_left - 1); !e.empty()) return fail(where + e);
            }
        } else {
            if (st.moves.size() != 1) return fail(where + "∀ must make exactly one move");
            const auto& rec = st.moves[0];
            ++rep.moves;
            auto moves = legal_forall_moves(s, gs);
            if (std::find(moves.begin(), moves.end(), rec.move) == moves.end()) return fail(where + "illegal ∀ move");
            auto all = legal_exists_responses(s, st.network, rec.move);
            if (all.size() != rec.replies.size()) return fail(where + "replies are incomplete");
            for (std::size_t k = 0; k < all.size(); ++k) {
                if (!(all[k] == rec.replies[k].network)) return fail(where + "reply mismatch");
                if (auto e = check_reply(s, st.network, rec.move, all[k]); !e.empty()) return fail(where + e);
                if (auto e = child_ok(rec.replies[k], st.rounds_left - 1); !e.empty()) return fail(where + e);
            }
        }
    }
    return rep;
}

nlohmann::json to_json(const Certificate& c) {
    nlohmann::json states = nlohmann::json::array();
    for (const auto& st : c.states) {
        nlohmann::json moves = nlohmann::json::array();
        for (const auto& rec : st.moves) {
            nlohmann::json fa = {{"network", st.id}, {"atom", rec.move.b}};
            if (rec.initial)
                fa["initial"] = true;
            else
                fa.update({{"face", rec.move.face}, {"k", rec.move.k}, {"l", rec.move.l}});
            nlohmann::json ex;
            if (rec.replies.empty()) {
                ex = "dead-end";
            } else {
                ex = nlohmann::json::array();
                for (const auto& r : rec.replies) ex.push_back({{"network", to_json(r.network)}, {"state", r.child}});
            }
            moves.push_back({{"forall", fa}, {"exists", ex}});
        }
        states.push_back({{"id", st.id}, {"rounds_left", st.rounds_left}, {"network", to_json(st.network)}, {"moves", moves}});
    }
    return {{"kind", c.winner == Winner::Exists ? "exists-strategy" : "forall-strategy"},
            {"winner", to_string(c.winner)},
            {"truncation", std::to_string(c.rounds) + "-round truncation"},
            {"rounds", c.rounds},
            {"nodes", c.nodes},
            {"mode", to_string(c.mode)},
            {"structure", c.structure},
            {"states", states}};
}

Certificate certificate_from_json(const nlohmann::json& j) {
    Certificate c;
    c.winner = j.at("winner").get<std::string>() == "exists" ? Winner::Exists : Winner::Forall;
    c.rounds = j.at("rounds").get<int>();
    c.nodes = j.at("nodes").get<int>();
    c.mode = mode_from_string(j.at("mode").get<std::string>());
    c.structure = j.at("structure");
    for (const auto& s : j.at("states")) {
        CertState st;
        st.id = s.at("id").get<int>();
        st.rounds_left = s.at("rounds_left").get<int>();
        st.network = network_from_json(s.at("network"));
        for (const auto& m : s.at("moves")) {
            MoveRecord rec;
            const auto& fa = m.at("forall");
            rec.initial = fa.value("initial", false);
            rec.move.b = fa.at("atom").get<AtomId>();
            if (rec.initial) {
                rec.move.k = -1;
                rec.move.l = -1;
            } else {
                rec.move.face = fa.at("face").get<std::vector<int>>();
                rec.move.k = fa.at("k").get<int>();
                rec.move.l = fa.at("l").get<int>();
            }
            const auto& ex = m.at("exists");
            if (ex.is_array())
                for (const auto& r : ex) rec.replies.push_back({network_from_json(r.at("network")), r.at("state").get<int>()});
            st.moves.push_back(std::move(rec));
        }
        c.states.push_back(std::move(st));
    }
    return c;
}

// ------------------------------------------------------- rainbow script

namespace {

constexpr std::uint32_t kAllShades = 0xFFFFFFFFu;
constexpr std::array<std::pair<int, int>, 3> kPair{{{1, 2}, {0, 2}, {0, 1}}};

const rainbow::RainbowStructure& full_structure() {
    static const rainbow::RainbowStructure s;
    return s;
}

std::uint32_t tint_mask(int t) {
    std::uint32_t m = 0;
    for (int s = 0; s < 32; ++s)
        if (s >> t & 1) m |= 1u << s;
    return m;
}

std::uint32_t shade_bit(rainbow::YellowSet s) { return 1u << s; }

rainbow::YellowSet least_shade(std::uint32_t mask) { return static_cast<rainbow::YellowSet>(std::countr_zero(mask)); }

/// Piece of the ordered node pair (x, y) in a concrete member of the class,
/// given shades; only meaningful when the masks are singletons.
struct PairInfo {
    int label = -1;  // -1 identified
    std::uint32_t fwd = 0, bwd = 0;
};

PairInfo pair_info(const GraphNet& g, int x, int y) {
    PairInfo p;
    p.label = g.label(x, y);
    if (p.label >= 0 && !rainbow::label_is_green(p.label)) {
        p.fwd = g.mask.at({g.rep[x], g.rep[y]});
        p.bwd = g.mask.at({g.rep[y], g.rep[x]});
    }
    return p;
}

/// The relation the atom b prescribes between tuple positions p and q (p != q), read from p to q.
PairInfo demanded(const Atom& b, int p, int q) {
    Piece piece = b.pieces[3 - p - q];
    PairInfo out;
    if (piece == rainbow::kIdentified) return out;
    if (p > q) piece = rainbow::reverse_piece(piece);
    out.label = rainbow::piece_label(piece);
    if (!rainbow::label_is_green(out.label)) {
        out.fwd = shade_bit(rainbow::piece_fwd(piece));
        out.bwd = shade_bit(rainbow::piece_bwd(piece));
    }
    return out;
}

using Split = std::pair<std::pair<int, int>, std::uint32_t>;

/// Does a class-level pair agree with a concrete demanded pair? Returns
/// 1 for every member, 0 for none, -1 with a split otherwise.
int agree(const GraphNet& g, int x, int y, const PairInfo& want, std::optional<Split>& split) {
    PairInfo have = pair_info(g, x, y);
    if (have.label != want.label) return 0;
    if (have.label < 0 || rainbow::label_is_green(have.label)) return 1;
    std::pair<int, int> fwd{g.rep[x], g.rep[y]}, bwd{g.rep[y], g.rep[x]};
    if (!(have.fwd & want.fwd) || !(have.bwd & want.bwd)) return 0;
    if (have.fwd != want.fwd) {
        split = Split{fwd, want.fwd};
        return -1;
    }
    if (have.bwd != want.bwd) {
        split = Split{bwd, want.bwd};
        return -1;
    }
    return 1;
}

std::vector<int> classes(const GraphNet& g) {
    std::vector<int> r;
    for (int x = 0; x < g.nodes; ++x)
        if (g.rep[x] == x) r.push_back(x);
    return r;
}

/// Applies cone constraints; old pairs may only be confirmed, new ones are cut.
/// Returns false when some mask empties.
bool apply_cones(GraphNet& g, int fresh, std::optional<Split>& split) {
    auto reps = classes(g);
    for (int d0 : reps)
        for (int d1 : reps)
            for (int z : reps) {
                if (d0 == d1 || d0 == z || d1 == z) continue;
                if (d0 != fresh && d1 != fresh && z != fresh) continue;
                int l0 = g.label(d0, z), l1 = g.label(d1, z), base = g.label(d0, d1);
                if (!(l0 >= 1 && l0 <= 4 && l1 == 0 && !rainbow::label_is_green(base))) continue;
                std::uint32_t need = tint_mask(l0);
                auto& m = g.mask.at({d0, d1});
                if (d0 != fresh && d1 != fresh) {
                    if ((m & need) == 0) return false;
                    if ((m & need) != m) {
                        split = Split{{d0, d1}, need};
                        return false;
                    }
                    continue;
                }
                m &= need;
                if (m == 0) return false;
            }
    return true;
}

}  // namespace

int GraphNet::label(int x, int y) const {
    int rx = rep.at(x), ry = rep.at(y);
    if (rx == ry) return -1;
    int l = edge.at({std::min(rx, ry), std::max(rx, ry)});
    return rx < ry ? l : rainbow::converse_label(l);
}

std::uint64_t GraphNet::multiplicity() const {
    std::uint64_t m = 1;
    for (const auto& [k, v] : mask) {
        std::uint64_t c = static_cast<std::uint64_t>(std::popcount(v));
        m = (c != 0 && m > UINT64_MAX / c) ? UINT64_MAX : m * c;
    }
    return m;
}

AtomicNetwork GraphNet::representative() const {
    AtomicNetwork net(3);
    for (int x = 0; x < nodes; ++x) net.add_node(x);
    for_each_tuple(net.nodes(), 3, [&](const std::vector<int>& t) {
        Atom a;
        for (int i = 0; i < 3; ++i) {
            int x = t[kPair[i].first], y = t[kPair[i].second];
            int l = label(x, y);
            if (l < 0)
                a.pieces[i] = rainbow::kIdentified;
            else if (rainbow::label_is_green(l))
                a.pieces[i] = rainbow::make_piece(l, 0, 0);
            else
                a.pieces[i] = rainbow::make_piece(l, least_shade(mask.at({rep[x], rep[y]})), least_shade(mask.at({rep[y], rep[x]})));
        }
        net.set(t, a.code());
    });
    return net;
}

rainbow::ColouredGraph GraphNet::representative_graph() const {
    auto reps = classes(*this);
    rainbow::ColouredGraph g(static_cast<int>(reps.size()));
    for (std::size_t a = 0; a < reps.size(); ++a)
        for (std::size_t b = 0; b < reps.size(); ++b) {
            if (a == b) continue;
            int l = label(reps[a], reps[b]);
            if (a < b) g.set_edge(static_cast<int>(a), static_cast<int>(b), rainbow::edge_colour(l));
            if (!rainbow::label_is_green(l))
                g.set_yellow({static_cast<int>(a), static_cast<int>(b)}, least_shade(mask.at({reps[a], reps[b]})));
        }
    return g;
}

nlohmann::json to_json(const GraphNet& g) {
    nlohmann::json edges = nlohmann::json::object(), masks = nlohmann::json::object();
    for (const auto& [k, l] : g.edge) edges[tuple_key({k.first, k.second})] = rainbow::edge_colour(l).to_string();
    for (const auto& [k, m] : g.mask) masks[tuple_key({k.first, k.second})] = m;
    return {{"nodes", g.nodes}, {"rep", g.rep}, {"edges", edges}, {"masks", masks}};
}

GraphNet graphnet_from_json(const nlohmann::json& j) {
    GraphNet g;
    g.nodes = j.at("nodes").get<int>();
    g.rep = j.at("rep").get<std::vector<int>>();
    if (static_cast<int>(g.rep.size()) != g.nodes) throw Error(ErrorKind::Parse, "rep length");
    for (const auto& [k, v] : j.at("edges").items()) {
        auto t = parse_tuple(k);
        g.edge[{t.at(0), t.at(1)}] = rainbow::edge_label(rainbow::EdgeColour::parse(v.get<std::string>()));
    }
    for (const auto& [k, v] : j.at("masks").items()) {
        auto t = parse_tuple(k);
        g.mask[{t.at(0), t.at(1)}] = v.get<std::uint32_t>();
    }
    return g;
}

GraphNet zeroth_graph(int tint) {
    if (tint < 1 || tint > 4) throw Error(ErrorKind::InvalidArgument, "tint must lie in 1..4");
    GraphNet g;
    g.nodes = 3;
    g.rep = {0, 1, 2};
    g.edge[{0, 1}] = rainbow::edge_label(rainbow::EdgeColour::w(0));
    g.edge[{0, 2}] = rainbow::edge_label(rainbow::EdgeColour::g0(tint));
    g.edge[{1, 2}] = rainbow::edge_label(rainbow::EdgeColour::g(1));
    const std::uint32_t full = shade_bit(31);  // y_S with S = {0,...,4}
    g.mask[{0, 1}] = full;
    g.mask[{1, 0}] = full;
    return g;
}

GraphMove cone_demand(const GraphNet& g, int k, int tint) {
    if (tint < 1 || tint > 4) throw Error(ErrorKind::InvalidArgument, "tint must lie in 1..4");
    PairInfo base = pair_info(g, 0, 1);
    if (base.label < 0) throw Error(ErrorKind::InvalidArgument, "face nodes are identified");
    if (!rainbow::label_is_green(base.label) && (std::popcount(base.fwd) != 1 || std::popcount(base.bwd) != 1))
        throw Error(ErrorKind::InvalidArgument, "face shades are not fixed in this class");
    Atom b;
    b.pieces[2] = rainbow::label_is_green(base.label) ? rainbow::make_piece(base.label, 0, 0)
                                                      : rainbow::make_piece(base.label, least_shade(base.fwd), least_shade(base.bwd));
    b.pieces[1] = rainbow::make_piece(rainbow::edge_label(rainbow::EdgeColour::g0(tint)), 0, 0);
    b.pieces[0] = rainbow::make_piece(rainbow::edge_label(rainbow::EdgeColour::g(1)), 0, 0);
    return GraphMove{{0, 1}, k, b, 2};
}

bool graph_move_legal(const GraphNet& g, const GraphMove& mv) {
    if (mv.l < 0 || mv.l > 2 || mv.face.size() != 2) return false;
    for (int f : mv.face)
        if (f < 0 || f >= g.nodes) return false;
    if (!full_structure().is_valid_atom(mv.b)) return false;
    auto [p, q] = kPair[mv.l];
    std::vector<int> t = mv.face;
    t.insert(t.begin() + mv.l, -1);
    std::optional<Split> split;
    return agree(g, t[p], t[q], demanded(mv.b, p, q), split) == 1;
}

GraphResponses graph_responses(const GraphNet& g, const GraphMove& mv) {
    GraphResponses out;
    if (mv.k != g.nodes) throw Error(ErrorKind::InvalidArgument, "the graph engine answers fresh-node demands only");
    if (mv.l < 0 || mv.l > 2 || mv.face.size() != 2 || !full_structure().is_valid_atom(mv.b))
        throw Error(ErrorKind::InvalidArgument, "malformed demand");
    std::vector<int> t = mv.face;
    t.insert(t.begin() + mv.l, mv.k);
    const int l = mv.l;
    {
        auto [p, q] = kPair[l];
        int a = agree(g, t[p], t[q], demanded(mv.b, p, q), out.split);
        if (a == 0) return out;  // the demand is illegal for this class
        if (a < 0) return out;
    }
    // What b prescribes between k and each face position.
    std::vector<std::pair<int, PairInfo>> towards;  // (face node, relation read from the face node to k)
    for (int p = 0; p < 3; ++p)
        if (p != l) towards.push_back({t[p], demanded(mv.b, p, l)});

    auto reps = classes(g);
    const int k = mv.k;

    // Identification of k with an existing class.
    for (int x : reps) {
        bool ok = true;
        for (const auto& [f, want] : towards) {
            if (want.label < 0) {
                ok = ok && g.rep[f] == x;
                continue;
            }
            if (g.rep[f] == x) {
                ok = false;
                continue;
            }
            int a = agree(g, f, x, want, out.split);
            if (a < 0) return GraphResponses{{}, out.split};
            ok = ok && a == 1;
        }
        if (!ok) continue;
        GraphNet m = g;
        m.nodes = g.nodes + 1;
        m.rep.push_back(x);
        out.networks.push_back(std::move(m));
    }
    for (const auto& [f, want] : towards)
        if (want.label < 0) return out;  // identification was the only option

    // A fresh class: labels towards face classes are fixed, the rest chosen.
    GraphNet base = g;
    base.nodes = g.nodes + 1;
    base.rep.push_back(k);
    std::map<int, int> fixed;  // rep -> label read from rep to k
    std::map<int, PairInfo> fixed_info;
    for (const auto& [f, want] : towards) {
        int r = g.rep[f];
        if (fixed.count(r) && fixed[r] != want.label) return out;
        fixed[r] = want.label;
        fixed_info[r] = want;
    }
    std::vector<int> free;
    for (int x : reps)
        if (!fixed.count(x)) free.push_back(x);

    std::map<int, int> chosen = fixed;
    auto triangle_ok = [&](int x) {
        // Every triangle (x, y, k) with y already decided.
        for (const auto& [y, ly] : chosen) {
            if (y == x) continue;
            int a = std::min(x, y), b = std::max(x, y);
            int lab_ab = g.label(a, b), lab_ak = chosen.at(a), lab_bk = chosen.at(b);
            if (rainbow::triangle_forbidden(rainbow::edge_colour(lab_ab), rainbow::edge_colour(lab_bk), rainbow::edge_colour(lab_ak)))
                return false;
        }
        return true;
    };
    // Fixed labels must already be compatible with one another.
    for (const auto& [x, lx] : fixed)
        if (!triangle_ok(x)) return out;

    std::function<bool(std::size_t)> rec = [&](std::size_t idx) -> bool {
        if (idx == free.size()) {
            GraphNet m = base;
            for (const auto& [x, lx] : chosen) {
                m.edge[{x, k}] = lx;  // x < k always
                if (!rainbow::label_is_green(lx)) {
                    auto it = fixed_info.find(x);
                    m.mask[{x, k}] = it != fixed_info.end() ? it->second.fwd : kAllShades;
                    m.mask[{k, x}] = it != fixed_info.end() ? it->second.bwd : kAllShades;
                }
            }
            std::optional<Split> split;
            bool ok = apply_cones(m, k, split);
            if (split) {
                out.split = split;
                return false;
            }
            if (ok) out.networks.push_back(std::move(m));
            return true;
        }
        int x = free[idx];
        for (int lab = 0; lab < rainbow::kEdgeLabels; ++lab) {
            chosen[x] = lab;
            if (triangle_ok(x) && !rec(idx + 1)) return false;
        }
        chosen.erase(x);
        return true;
    };
    if (!rec(0)) return GraphResponses{{}, out.split};
    return out;
}

namespace {

GraphNet restrict_mask(GraphNet g, std::pair<int, int> pair, std::uint32_t keep) {
    g.mask.at(pair) &= keep;
    return g;
}

struct ScriptBuilder {
    ScriptTree tree;

    int add(ScriptNode n) {
        tree.nodes.push_back(std::move(n));
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    int play(const GraphNet& g, int round) {
        if (round >= static_cast<int>(tree.tints.size()))
            throw Error(ErrorKind::ScriptRefuted, "an ∃ line survives every scripted demand (round " + std::to_string(round) +
                                                      ", " + std::to_string(g.nodes) + " nodes)");
        GraphMove mv = cone_demand(g, g.nodes, tree.tints[round]);
        if (!graph_move_legal(g, mv)) throw Error(ErrorKind::ScriptRefuted, "scripted demand is not a legal move");
        auto rs = graph_responses(g, mv);
        ScriptNode node;
        node.round = round;
        node.network = g;
        if (rs.split) {
            node.kind = ScriptNode::Kind::Split;
            node.split = rs.split;
            int id = add(node);
            auto [pair, keep] = *rs.split;
            int a = play(restrict_mask(g, pair, keep), round);
            int b = play(restrict_mask(g, pair, ~keep), round);
            tree.nodes[id].children = {a, b};
            return id;
        }
        node.move = mv;
        tree.max_nodes = std::max(tree.max_nodes, g.nodes + 1);
        if (rs.networks.empty()) {
            node.kind = ScriptNode::Kind::DeadEnd;
            tree.max_round = std::max(tree.max_round, round);
            ++tree.leaves;
            tree.lines += g.multiplicity();
            return add(node);
        }
        node.kind = ScriptNode::Kind::Forall;
        int id = add(node);
        std::vector<int> kids;
        for (const auto& r : rs.networks) kids.push_back(play(r, round + 1));
        tree.nodes[id].children = kids;
        return id;
    }
};

}  // namespace

ScriptTree verify_forall_script(const RainbowOracle& s, const std::vector<int>& tints) {
    if (tints.empty()) throw Error(ErrorKind::InvalidArgument, "the script needs at least the zeroth tint");
    for (int t : tints)
        if (t < 1 || t > 4) throw Error(ErrorKind::ScriptRefuted, "tint " + std::to_string(t) + " outside 1..4");
    ScriptBuilder b;
    b.tree.tints = tints;
    GraphNet g0 = zeroth_graph(tints[0]);
    auto v = rainbow::is_valid_coloured_graph(g0.representative_graph(), rainbow::signature(3));
    if (!v.valid) throw Error(ErrorKind::ScriptRefuted, std::string("zeroth graph invalid: ") + rainbow::to_string(v.kind));
    // Round 0 is ∀'s graph; demands start in round 1.
    b.play(g0, 1);
    for (const auto& node : b.tree.nodes) {
        auto nv = validate_network(s, node.network.representative());
        if (!nv.valid) throw Error(ErrorKind::ScriptRefuted, "network fails " + nv.condition + " at " + tuple_key(nv.tuple));
    }
    return b.tree;
}

ScriptCheck replay_script(const RainbowOracle& s, const ScriptTree& t) {
    ScriptCheck out;
    auto fail = [&](const std::string& d) {
        out.ok = false;
        out.detail = d;
        return out;
    };
    if (t.nodes.empty() || t.tints.empty()) return fail("empty tree");
    if (!(t.nodes[0].network == zeroth_graph(t.tints[0])) || t.nodes[0].round != 1) return fail("root is not the zeroth graph");
    std::uint64_t leaves = 0;
    int max_round = 0, max_nodes = 0;
    for (std::size_t id = 0; id < t.nodes.size(); ++id) {
        const auto& n = t.nodes[id];
        ++out.nodes_checked;
        const std::string where = "node " + std::to_string(id) + ": ";
        auto nv = validate_network(s, n.network.representative());
        if (!nv.valid) return fail(where + "network fails " + nv.condition);
        for (int c : n.children)
            if (c <= static_cast<int>(id) || c >= static_cast<int>(t.nodes.size())) return fail(where + "bad child index");
        if (n.round >= static_cast<int>(t.tints.size())) return fail(where + "round beyond the script");
        GraphMove mv = cone_demand(n.network, n.network.nodes, t.tints[n.round]);
        auto rs = graph_responses(n.network, mv);
        if (n.kind == ScriptNode::Kind::Split) {
            if (!rs.split || !n.split || rs.split->first != n.split->first || rs.split->second != n.split->second)
                return fail(where + "split does not reproduce");
            auto [pair, keep] = *n.split;
            if (n.children.size() != 2 || !(t.nodes[n.children[0]].network == restrict_mask(n.network, pair, keep)) ||
                !(t.nodes[n.children[1]].network == restrict_mask(n.network, pair, ~keep)))
                return fail(where + "split halves do not match");
            continue;
        }
        if (rs.split) return fail(where + "class needs a split");
        if (!n.move || !(n.move->face == mv.face) || n.move->k != mv.k || n.move->b != mv.b || n.move->l != mv.l)
            return fail(where + "move differs from the script");
        max_nodes = std::max(max_nodes, n.network.nodes + 1);
        if (n.kind == ScriptNode::Kind::DeadEnd) {
            if (!rs.networks.empty()) return fail(where + "∃ still has " + std::to_string(rs.networks.size()) + " responses");
            if (!n.children.empty()) return fail(where + "dead-end with children");
            ++leaves;
            max_round = std::max(max_round, n.round);
            continue;
        }
        if (rs.networks.size() != n.children.size()) return fail(where + "response count differs");
        for (std::size_t c = 0; c < rs.networks.size(); ++c) {
            const auto& child = t.nodes[n.children[c]];
            if (!(child.network == rs.networks[c])) return fail(where + "response " + std::to_string(c) + " differs");
            if (child.round != n.round + 1) return fail(where + "child round is off");
        }
    }
    if (leaves != t.leaves || max_round != t.max_round || max_nodes != t.max_nodes) return fail("summary counts differ");
    return out;
}

nlohmann::json to_json(const ScriptTree& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t id = 0; id < t.nodes.size(); ++id) {
        const auto& n = t.nodes[id];
        const char* kind = n.kind == ScriptNode::Kind::Forall ? "forall" : n.kind == ScriptNode::Kind::Split ? "split" : "dead-end";
        nlohmann::json j = {{"id", id},
                            {"kind", kind},
                            {"round", n.round},
                            {"network", to_json(n.network)},
                            {"multiplicity", n.network.multiplicity()},
                            {"children", n.children}};
        if (n.move)
            j["forall"] = {{"face", n.move->face},
                           {"k", n.move->k},
                           {"atom", n.move->b.code()},
                           {"l", n.move->l},
                           {"demand", rainbow::piece_to_string(n.move->b.pieces[0]) + " | " +
                                          rainbow::piece_to_string(n.move->b.pieces[1]) + " | " +
                                          rainbow::piece_to_string(n.move->b.pieces[2])}};
        if (n.split) j["split"] = {{"pair", {n.split->first.first, n.split->first.second}}, {"keep", n.split->second}};
        j["exists"] = n.kind == ScriptNode::Kind::DeadEnd ? nlohmann::json("dead-end") : nlohmann::json(n.children);
        nodes.push_back(std::move(j));
    }
    return {{"kind", "forall-script"},
            {"structure", {{"type", "rainbow"}, {"n", 3}}},
            {"winner", "forall"},
            {"truncation", std::to_string(t.tints.size()) + "-round truncation"},
            {"tints", t.tints},
            {"rounds_note", "round 0 is the zeroth graph; demand r is played in round r"},
            {"max_round", t.max_round},
            {"max_nodes", t.max_nodes},
            {"leaves", t.leaves},
            {"lines", t.lines},
            {"nodes", nodes}};
}

ScriptTree script_from_json(const nlohmann::json& j) {
    ScriptTree t;
    t.tints = j.at("tints").get<std::vector<int>>();
    t.max_round = j.at("max_round").get<int>();
    t.max_nodes = j.at("max_nodes").get<int>();
    t.leaves = j.at("leaves").get<std::uint64_t>();
    t.lines = j.at("lines").get<std::uint64_t>();
    for (const auto& n : j.at("nodes")) {
        ScriptNode s;
        const std::string kind = n.at("kind").get<std::string>();
        s.kind = kind == "forall" ? ScriptNode::Kind::Forall : kind == "split" ? ScriptNode::Kind::Split : ScriptNode::Kind::DeadEnd;
        s.round = n.at("round").get<int>();
        s.network = graphnet_from_json(n.at("network"));
        s.children = n.at("children").get<std::vector<int>>();
        if (n.contains("forall")) {
            const auto& f = n.at("forall");
            s.move = GraphMove{f.at("face").get<std::vector<int>>(), f.at("k").get<int>(), Atom::from_code(f.at("atom").get<std::uint64_t>()),
                               f.at("l").get<int>()};
        }
        if (n.contains("split")) {
            auto p = n.at("split").at("pair").get<std::vector<int>>();
            s.split = Split{{p.at(0), p.at(1)}, n.at("split").at("keep").get<std::uint32_t>()};
        }
        t.nodes.push_back(std::move(s));
    }
    return t;
}

}  // namespace tcw::games
