#include "tcw/modal.hpp"

#include <algorithm>
#include <cctype>

#include "tcw/error.hpp"

namespace tcw::modal {

Formula Formula::make(Op op, std::vector<Formula> children) {
    return Formula(std::make_shared<const Node>(Node{op, -1, std::move(children)}));
}

Formula Formula::atom(int index) {
    if (index < 0) throw Error(ErrorKind::InvalidArgument, "negative atom index");
    return Formula(std::make_shared<const Node>(Node{Op::Atom, index, {}}));
}
Formula Formula::negation(Formula f) { return make(Op::Not, {std::move(f)}); }
Formula Formula::conj(Formula a, Formula b) { return make(Op::And, {std::move(a), std::move(b)}); }
Formula Formula::disj(Formula a, Formula b) { return make(Op::Or, {std::move(a), std::move(b)}); }
Formula Formula::implies(Formula a, Formula b) { return make(Op::Implies, {std::move(a), std::move(b)}); }
Formula Formula::iff(Formula a, Formula b) { return make(Op::Iff, {std::move(a), std::move(b)}); }
Formula Formula::box(Formula f) { return make(Op::Interior, {std::move(f)}); }
Formula Formula::next(Formula f) { return make(Op::Next, {std::move(f)}); }

int Formula::modal_depth() const {
    int d = 0;
    for (const auto& c : node_->children) d = std::max(d, c.modal_depth());
    return d + (op() == Op::Interior || op() == Op::Next ? 1 : 0);
}

int Formula::size() const {
    int s = 1;
    for (const auto& c : node_->children) s += c.size();
    return s;
}

std::set<int> Formula::atoms() const {
    if (op() == Op::Atom) return {atom_index()};
    std::set<int> out;
    for (const auto& c : node_->children) out.merge(c.atoms());
    return out;
}

bool Formula::has_next() const {
    if (op() == Op::Next) return true;
    return std::any_of(node_->children.begin(), node_->children.end(),
                       [](const Formula& c) { return c.has_next(); });
}

bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) return true;
    if (op() != other.op() || atom_index() != other.atom_index()) return false;
    return node_->children == other.node_->children;
}

std::string Formula::to_string() const {
    switch (op()) {
        case Op::Atom: return "p" + std::to_string(atom_index());
        case Op::Not: return "~" + arg().to_string();
        case Op::Interior: return "I" + arg().to_string();
        case Op::Next: return "X" + arg().to_string();
        case Op::And: return "(" + lhs().to_string() + " & " + rhs().to_string() + ")";
        case Op::Or: return "(" + lhs().to_string() + " | " + rhs().to_string() + ")";
        case Op::Implies: return "(" + lhs().to_string() + " -> " + rhs().to_string() + ")";
        case Op::Iff: return "(" + lhs().to_string() + " <-> " + rhs().to_string() + ")";
    }
    return {};
}

namespace {

const char* op_tag(Formula::Op op) {
    switch (op) {
        case Formula::Op::Atom: return "atom";
        case Formula::Op::Not: return "~";
        case Formula::Op::And: return "&";
        case Formula::Op::Or: return "|";
        case Formula::Op::Implies: return "->";
        case Formula::Op::Iff: return "<->";
        case Formula::Op::Interior: return "I";
        case Formula::Op::Next: return "X";
    }
    return "";
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Formula parse() {
        Formula f = parse_iff();
        skip();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::Parse, what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(std::string_view token) {
        skip();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    Formula parse_iff() {
        Formula f = parse_implies();
        while (eat("<->")) f = Formula::iff(f, parse_implies());
        return f;
    }

    Formula parse_implies() {
        Formula f = parse_or();
        if (eat("->")) return Formula::implies(f, parse_implies());
        return f;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (eat("|")) f = Formula::disj(f, parse_and());
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (eat("&")) f = Formula::conj(f, parse_unary());
        return f;
    }

    Formula parse_unary() {
        skip();
        if (eat("~")) return Formula::negation(parse_unary());
        if (eat("I")) return Formula::box(parse_unary());
        if (eat("X")) return Formula::next(parse_unary());
        if (eat("(")) {
            Formula f = parse_iff();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        if (eat("p")) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected atom index");
            return Formula::atom(std::stoi(std::string(text_.substr(start, pos_ - start))));
        }
        fail("unexpected token");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

template <class Box, class Next>
PointSet evaluate(const Formula& f, PointSet base, const Valuation& v, const Box& box, const Next& next) {
    auto rec = [&](const Formula& g) { return evaluate(g, base, v, box, next); };
    switch (f.op()) {
        case Formula::Op::Atom: {
            auto it = v.find(f.atom_index());
            return it == v.end() ? PointSet{0} : (it->second & base);
        }
        case Formula::Op::Not: return base & ~rec(f.arg());
        case Formula::Op::And: return rec(f.lhs()) & rec(f.rhs());
        case Formula::Op::Or: return rec(f.lhs()) | rec(f.rhs());
        case Formula::Op::Implies: return (base & ~rec(f.lhs())) | rec(f.rhs());
        case Formula::Op::Iff: return base & ~(rec(f.lhs()) ^ rec(f.rhs()));
        case Formula::Op::Interior: return box(rec(f.arg()));
        case Formula::Op::Next: return next(rec(f.arg()));
    }
    return 0;
}

void check_valuation(int size, const Valuation& v) {
    for (const auto& [k, s] : v) {
        if (!subset_of(s, full_set(size))) {
            throw Error(ErrorKind::OutOfRangePoint, "valuation of p" + std::to_string(k) + " leaves the base");
        }
    }
}

[[noreturn]] PointSet no_next(PointSet) {
    throw Error(ErrorKind::InvalidArgument, "NEXT needs a dynamic model");
}

}  // namespace

nlohmann::json Formula::to_json() const {
    if (op() == Op::Atom) return {{"op", "atom"}, {"index", atom_index()}};
    if (node_->children.size() == 1) return {{"op", op_tag(op())}, {"arg", arg().to_json()}};
    return {{"op", op_tag(op())}, {"lhs", lhs().to_json()}, {"rhs", rhs().to_json()}};
}

Formula Formula::from_json(const nlohmann::json& j) {
    const std::string tag = j.at("op").get<std::string>();
    if (tag == "atom") return atom(j.at("index").get<int>());
    if (tag == "~") return negation(from_json(j.at("arg")));
    if (tag == "I") return box(from_json(j.at("arg")));
    if (tag == "X") return next(from_json(j.at("arg")));
    Formula a = from_json(j.at("lhs")), b = from_json(j.at("rhs"));
    if (tag == "&") return conj(a, b);
    if (tag == "|") return disj(a, b);
    if (tag == "->") return implies(a, b);
    if (tag == "<->") return iff(a, b);
    throw Error(ErrorKind::Parse, "unknown formula tag '" + tag + "'");
}

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

bool is_continuous(const FiniteTopology& t, std::span<const int> f) {
    if (static_cast<int>(f.size()) != t.size()) return false;
    for (int y : f)
        if (y < 0 || y >= t.size()) return false;
    return std::all_of(t.opens().begin(), t.opens().end(),
                       [&](PointSet o) { return t.is_open(preimage(f, o)); });
}

PointSet preimage(std::span<const int> f, PointSet s) {
    PointSet out = 0;
    for (std::size_t x = 0; x < f.size(); ++x)
        if (contains(s, f[x])) out |= PointSet{1} << x;
    return out;
}

DynamicModel::DynamicModel(FiniteTopology topology, std::vector<int> map, Valuation valuation)
    : topology_(std::move(topology)), map_(std::move(map)), valuation_(std::move(valuation)) {
    if (static_cast<int>(map_.size()) != topology_.size()) {
        throw Error(ErrorKind::OutOfRangePoint, "map is not total on the base");
    }
    for (int y : map_)
        if (y < 0 || y >= topology_.size()) throw Error(ErrorKind::OutOfRangePoint, "map leaves the base");
    if (!is_continuous(topology_, map_)) throw Error(ErrorKind::NotContinuous, "preimage of some open is not open");
    check_valuation(topology_.size(), valuation_);
}

PointSet eval_topo(const TopoModel& m, const Formula& f) {
    check_valuation(m.topology.size(), m.valuation);
    return evaluate(f, m.topology.base(), m.valuation,
                    [&](PointSet s) { return interior(m.topology, s); }, no_next);
}

PointSet eval_kripke(const KripkeModel& m, const Formula& f) {
    check_valuation(m.order.size(), m.valuation);
    auto box = [&](PointSet s) {
        PointSet out = 0;
        for (int x = 0; x < m.order.size(); ++x)
            if (subset_of(m.order.up_set(x), s)) out |= PointSet{1} << x;
        return out;
    };
    return evaluate(f, full_set(m.order.size()), m.valuation, box, no_next);
}

PointSet eval_dynamic(const DynamicModel& m, const Formula& f) {
    return evaluate(
        f, m.topology().base(), m.valuation(), [&](PointSet s) { return interior(m.topology(), s); },
        [&](PointSet s) { return preimage(m.map(), s); });
}

std::vector<Preorder> enumerate_preorders(int size) {
    if (size < 0) throw Error(ErrorKind::InvalidArgument, "negative size");
    if (size > 5) throw Error(ErrorKind::SizeTooLarge, "preorder enumeration is capped at 5 points");
    // Off-diagonal pairs are free bits; keep the transitive choices.
    std::vector<std::pair<int, int>> slots;
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y)
            if (x != y) slots.emplace_back(x, y);
    std::vector<Preorder> out;
    std::vector<PointSet> up(size);
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << slots.size()); ++pick) {
        for (int x = 0; x < size; ++x) up[x] = PointSet{1} << x;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if ((pick >> i) & 1u) up[slots[i].first] |= PointSet{1} << slots[i].second;
        bool transitive = true;
        for (int x = 0; x < size && transitive; ++x)
            for (int y : members(up[x]))
                if (!subset_of(up[y], up[x])) {
                    transitive = false;
                    break;
                }
        if (!transitive) continue;
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < size; ++x)
            for (int y : members(up[x])) pairs.emplace_back(x, y);
        out.push_back(Preorder::make(size, pairs));
    }
    return out;
}

namespace {

// Calls visit(valuation) for every valuation of `atoms` over a base of
// `size` points, or for `samples` seeded random ones.
template <class Visit>
bool for_valuations(const std::vector<int>& atoms, int size, bool exhaustive, int samples,
                    std::mt19937_64& rng, const Visit& visit) {
    const std::uint64_t per_atom = std::uint64_t{1} << size;
    if (exhaustive) {
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < atoms.size(); ++i) total *= per_atom;
        for (std::uint64_t code = 0; code < total; ++code) {
            Valuation v;
            std::uint64_t c = code;
            for (int a : atoms) {
                v[a] = c % per_atom;
                c /= per_atom;
            }
            if (visit(v)) return true;
        }
        return false;
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, per_atom - 1);
    for (int s = 0; s < samples; ++s) {
        Valuation v;
        for (int a : atoms) v[a] = pick(rng);
        if (visit(v)) return true;
    }
    return false;
}

}  // namespace

CountermodelReport find_countermodel(const Formula& f, int max_size, SearchMode mode, std::uint64_t seed,
                                     int samples_per_frame) {
    if (max_size < 0) throw Error(ErrorKind::InvalidArgument, "negative size bound");
    if (mode == SearchMode::Topo && max_size > 4) throw Error(ErrorKind::SizeTooLarge, "topological search is capped at 4 points");
    if (mode == SearchMode::Kripke && max_size > 5) throw Error(ErrorKind::SizeTooLarge, "Kripke search is capped at 5 points");
    if (f.has_next()) throw Error(ErrorKind::InvalidArgument, "countermodel search covers NEXT-free formulas");

    CountermodelReport report;
    report.max_size = max_size;
    report.seed = seed;
    const auto atom_set = f.atoms();
    const std::vector<int> atoms(atom_set.begin(), atom_set.end());
    report.exhaustive = atoms.size() <= 2;
    std::mt19937_64 rng(seed);

    for (int size = 1; size <= max_size; ++size) {
        const PointSet base = full_set(size);
        if (mode == SearchMode::Topo) {
            for (const auto& t : enumerate_topologies(size)) {
                bool found = for_valuations(atoms, size, report.exhaustive, samples_per_frame, rng, [&](const Valuation& v) {
                    ++report.models_checked;
                    PointSet sat = eval_topo(TopoModel{t, v}, f);
                    if (sat == base) return false;
                    report.model = Countermodel{size, t, std::nullopt, v, std::countr_zero(base & ~sat)};
                    return true;
                });
                if (found) return report;
            }
        } else {
            for (const auto& p : enumerate_preorders(size)) {
                bool found = for_valuations(atoms, size, report.exhaustive, samples_per_frame, rng, [&](const Valuation& v) {
                    ++report.models_checked;
                    PointSet sat = eval_kripke(KripkeModel{p, v}, f);
                    if (sat == base) return false;
                    report.model = Countermodel{size, std::nullopt, p, v, std::countr_zero(base & ~sat)};
                    return true;
                });
                if (found) return report;
            }
        }
    }
    return report;
}

Formula random_formula(std::mt19937_64& rng, int atoms, int modal_depth, int max_size, bool allow_next) {
    std::uniform_int_distribution<int> atom_pick(0, std::max(atoms, 1) - 1);
    if (max_size <= 1) return Formula::atom(atom_pick(rng));
    // 0 atom, 1 not, 2 and, 3 or, 4 implies, 5 iff, 6 I, 7 X
    std::uniform_int_distribution<int> op_pick(0, allow_next ? 7 : 6);
    int op = op_pick(rng);
    if (modal_depth == 0)
        while (op >= 6) op = op_pick(rng);
    switch (op) {
        case 0: return Formula::atom(atom_pick(rng));
        case 1: return Formula::negation(random_formula(rng, atoms, modal_depth, max_size - 1, allow_next));
        case 6: return Formula::box(random_formula(rng, atoms, modal_depth - 1, max_size - 1, allow_next));
        case 7: return Formula::next(random_formula(rng, atoms, modal_depth - 1, max_size - 1, allow_next));
        default: break;
    }
    const int budget = (max_size - 1) / 2;
    Formula a = random_formula(rng, atoms, modal_depth, std::max(budget, 1), allow_next);
    Formula b = random_formula(rng, atoms, modal_depth, std::max(budget, 1), allow_next);
    switch (op) {
        case 2: return Formula::conj(a, b);
        case 3: return Formula::disj(a, b);
        case 4: return Formula::implies(a, b);
        default: return Formula::iff(a, b);
    }
}

nlohmann::json to_json(const Countermodel& m) {
    nlohmann::json val = nlohmann::json::object();
    for (const auto& [k, s] : m.valuation) val["p" + std::to_string(k)] = point_set_json(s);
    nlohmann::json j{{"size", m.size}, {"valuation", val}, {"point", m.point}};
    if (m.topology) j["topology"] = tcw::to_json(*m.topology);
    if (m.order) j["preorder"] = tcw::to_json(*m.order);
    return j;
}

nlohmann::json to_json(const CountermodelReport& r) {
    nlohmann::json j{{"found", r.model.has_value()},
                     {"max_size", r.max_size},
                     {"exhaustive_valuations", r.exhaustive},
                     {"seed", r.seed},
                     {"models_checked", r.models_checked},
                     {"note", "absence of a countermodel is bounded evidence, not a validity proof"}};
    if (r.model) j["countermodel"] = to_json(*r.model);
    return j;
}

}  // namespace tcw::modal
