#include "tcw/bao.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_set>

#include "tcw/error.hpp"

namespace tcw::bao {

namespace {

constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 24;

Element bit(int a) { return Element{1} << a; }

template <class F>
void for_bits(Element m, F&& f) {
    while (m) {
        f(std::countr_zero(m));
        m &= m - 1;
    }
}

Element box_over(const std::vector<Element>& succ, Element x) {
    Element r = 0;
    for (std::size_t a = 0; a < succ.size(); ++a)
        if ((succ[a] & ~x) == 0) r |= bit(static_cast<int>(a));
    return r;
}

}  // namespace

// ------------------------------------------------------------ structures

nlohmann::json to_json(const AtomStructure& s) {
    nlohmann::json T = nlohmann::json::array();
    for (const auto& rel : s.T) {
        nlohmann::json pairs = nlohmann::json::array();
        for (auto [a, b] : rel) pairs.push_back({a, b});
        T.push_back(pairs);
    }
    nlohmann::json D = nlohmann::json::array();
    for (Element d : s.D) {
        nlohmann::json ids = nlohmann::json::array();
        for_bits(d, [&](int a) { ids.push_back(a); });
        D.push_back(ids);
    }
    nlohmann::json I = nlohmann::json::array();
    for (const auto& desc : s.interior) {
        if (desc.identity) {
            I.push_back("identity");
            continue;
        }
        nlohmann::json table = nlohmann::json::array();
        for (Element succ : desc.succ) {
            nlohmann::json ids = nlohmann::json::array();
            for_bits(succ, [&](int a) { ids.push_back(a); });
            table.push_back(ids);
        }
        I.push_back(table);
    }
    return {{"dim", s.dim}, {"atoms", s.atoms}, {"T", T}, {"D", D}, {"interior", I}};
}

AtomStructure atom_structure_from_json(const nlohmann::json& j) {
    AtomStructure s;
    s.dim = j.at("dim").get<int>();
    s.atoms = j.at("atoms").get<int>();
    if (s.atoms < 1 || s.atoms > 64) throw Error(ErrorKind::TooManyAtoms, "atom count " + std::to_string(s.atoms));
    auto to_mask = [&](const nlohmann::json& ids) {
        Element m = 0;
        for (const auto& a : ids) {
            int v = a.get<int>();
            if (v < 0 || v >= s.atoms) throw Error(ErrorKind::OutOfRangePoint, "atom id " + std::to_string(v));
            m |= bit(v);
        }
        return m;
    };
    for (const auto& rel : j.at("T")) {
        std::vector<std::pair<int, int>> pairs;
        for (const auto& p : rel) pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        s.T.push_back(std::move(pairs));
    }
    for (const auto& d : j.at("D")) s.D.push_back(to_mask(d));
    for (const auto& d : j.at("interior")) {
        if (d.is_string()) {
            s.interior.push_back(InteriorDesc::ident());
            continue;
        }
        std::vector<Element> succ;
        for (const auto& row : d) succ.push_back(to_mask(row));
        s.interior.push_back(InteriorDesc::table(std::move(succ)));
    }
    return s;
}

AtomStructure atom_structure_of(const setalg::SpacePtr& space) {
    const auto& sp = *space;
    if (sp.tuple_count() > 64) throw Error(ErrorKind::TooManyAtoms, "set algebra has more than 64 tuples");
    const int n = sp.dim();
    const int N = static_cast<int>(sp.tuple_count());
    AtomStructure s;
    s.dim = n;
    s.atoms = N;
    s.T.resize(n);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                bool agree = true;
                for (int k = 0; k < n && agree; ++k)
                    if (k != i && sp.coordinate(a, k) != sp.coordinate(b, k)) agree = false;
                if (agree) s.T[i].emplace_back(a, b);
            }
    s.D.assign(n * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < N; ++a)
                if (sp.coordinate(a, i) == sp.coordinate(a, j)) s.D[i * n + j] |= bit(a);
    std::optional<Preorder> order;
    if (sp.topology()) order = specialization_preorder(*sp.topology());
    for (int k = 0; k < n; ++k) {
        if (!order) {
            s.interior.push_back(InteriorDesc::ident());
            continue;
        }
        std::vector<Element> succ(N, 0);
        for (int a = 0; a < N; ++a) {
            const std::uint64_t line = a - static_cast<std::uint64_t>(sp.coordinate(a, k)) * sp.stride(k);
            for (int v : members(order->up_set(sp.coordinate(a, k)))) succ[a] |= bit(static_cast<int>(line + v * sp.stride(k)));
        }
        s.interior.push_back(InteriorDesc::table(std::move(succ)));
    }
    return s;
}

// --------------------------------------------------------------- algebra

FiniteAlgebra::FiniteAlgebra(Parts parts) : p_(std::move(parts)) {
    if (p_.dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
    if (p_.points < 1 || p_.points > 64) throw Error(ErrorKind::TooManyAtoms, "point count " + std::to_string(p_.points));
    if (static_cast<int>(p_.diag.size()) != p_.dim * p_.dim) throw Error(ErrorKind::InvalidArgument, "diagonal matrix size");
    if (!p_.cyl) throw Error(ErrorKind::InvalidArgument, "cylindrifications missing");
    if (p_.carrier) {
        auto& c = *p_.carrier;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        for (Element x : c)
            if (!subset_of(x, top())) throw Error(ErrorKind::OutOfRangePoint, "carrier element leaves the unit");
    }
}

void FiniteAlgebra::check_index(int i) const {
    if (i < 0 || i >= p_.dim) {
        throw Error(ErrorKind::IndexOutOfRange, "index " + std::to_string(i) + " in dimension " + std::to_string(p_.dim));
    }
}

Element FiniteAlgebra::cyl(int i, Element x) const {
    check_index(i);
    return p_.cyl(i, x);
}

Element FiniteAlgebra::diag(int i, int j) const {
    check_index(i);
    check_index(j);
    return p_.diag[i * p_.dim + j];
}

Element FiniteAlgebra::interior(int i, Element x) const {
    check_index(i);
    return p_.interior ? p_.interior(i, x) : x;
}

Element FiniteAlgebra::box(int i, Element x) const {
    check_index(i);
    if (!p_.box) throw Error(ErrorKind::NoChangSystem, "algebra has no box operators");
    return p_.box(i, x);
}

std::uint64_t FiniteAlgebra::carrier_size() const {
    if (p_.carrier) return p_.carrier->size();
    return p_.points >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << p_.points;
}

std::vector<Element> FiniteAlgebra::carrier() const {
    if (p_.carrier) return *p_.carrier;
    if (p_.points > 20) throw Error(ErrorKind::TooManyAtoms, "powerset of " + std::to_string(p_.points) + " atoms is not materialized");
    std::vector<Element> out(carrier_size());
    for (std::uint64_t x = 0; x < out.size(); ++x) out[x] = x;
    return out;
}

bool FiniteAlgebra::in_carrier(Element x) const {
    if (!p_.carrier) return subset_of(x, top());
    return std::binary_search(p_.carrier->begin(), p_.carrier->end(), x);
}

Element FiniteAlgebra::element_at(std::uint64_t index) const { return p_.carrier ? (*p_.carrier)[index] : index; }

Element FiniteAlgebra::sample(std::mt19937_64& rng) const {
    if (p_.carrier) return (*p_.carrier)[rng() % p_.carrier->size()];
    return rng() & top();
}

FiniteAlgebra cm(const AtomStructure& s, bool materialize) {
    if (s.atoms < 1 || s.atoms > 64) throw Error(ErrorKind::TooManyAtoms, std::to_string(s.atoms) + " atoms do not fit a 64-bit mask");
    if (materialize && s.atoms > 20) throw Error(ErrorKind::TooManyAtoms, "materialized carriers are limited to 20 atoms");
    const int n = s.dim;
    if (static_cast<int>(s.T.size()) != n || static_cast<int>(s.interior.size()) != n || static_cast<int>(s.D.size()) != n * n) {
        throw Error(ErrorKind::InvalidArgument, "atom structure arrays do not match its dimension");
    }
    auto img = std::make_shared<std::vector<std::vector<Element>>>(n, std::vector<Element>(s.atoms, 0));
    for (int i = 0; i < n; ++i)
        for (auto [a, b] : s.T[i]) {
            if (a < 0 || b < 0 || a >= s.atoms || b >= s.atoms) throw Error(ErrorKind::OutOfRangePoint, "T relation mentions an unknown atom");
            (*img)[i][a] |= bit(b);
        }
    FiniteAlgebra::Parts p;
    p.dim = n;
    p.points = s.atoms;
    p.diag = s.D;
    p.cyl = [img](int i, Element x) {
        Element r = 0;
        const auto& row = (*img)[i];
        for_bits(x, [&](int a) { r |= row[a]; });
        return r;
    };
    bool any_table = std::any_of(s.interior.begin(), s.interior.end(), [](const auto& d) { return !d.identity; });
    std::vector<int> flagged;
    if (any_table) {
        auto desc = std::make_shared<std::vector<InteriorDesc>>(s.interior);
        for (int i = 0; i < n; ++i) {
            const auto& d = (*desc)[i];
            if (d.identity) continue;
            if (static_cast<int>(d.succ.size()) != s.atoms) throw Error(ErrorKind::InvalidArgument, "interior table size");
            bool ok = true;
            for (int a = 0; a < s.atoms && ok; ++a) {
                const Element su = d.succ[a];
                if (!(su & bit(a))) ok = false;                 // I p <= p
                if ((su & ~(*img)[i][a]) != 0) ok = false;     // stays inside the T_i class
                for_bits(su, [&](int b) {
                    if ((d.succ[b] & ~su) != 0) ok = false;    // I p <= I I p
                });
            }
            if (!ok) flagged.push_back(i);
        }
        p.interior = [desc](int i, Element x) {
            const auto& d = (*desc)[i];
            return d.identity ? x : box_over(d.succ, x);
        };
    }
    if (materialize) {
        std::vector<Element> c(std::size_t{1} << s.atoms);
        for (std::size_t x = 0; x < c.size(); ++x) c[x] = x;
        p.carrier = std::move(c);
    }
    FiniteAlgebra alg(std::move(p));
    alg.set_flagged(std::move(flagged));
    return alg;
}

FiniteAlgebra set_algebra(const setalg::SpacePtr& space, BoxSource boxes) {
    auto base = cm(atom_structure_of(space));
    auto parts = base.parts();
    if (boxes == BoxSource::Interior) {
        auto inner = parts.interior;
        parts.box = [inner](int i, Element x) { return inner ? inner(i, x) : x; };
    } else if (boxes == BoxSource::Chang) {
        if (!space->chang()) throw Error(ErrorKind::NoChangSystem, "space has no Chang system");
        parts.box = [space](int i, Element x) {
            const auto& sp = *space;
            Element r = 0;
            for (std::uint64_t s = 0; s < sp.tuple_count(); ++s) {
                const std::uint64_t line = s - static_cast<std::uint64_t>(sp.coordinate(s, i)) * sp.stride(i);
                PointSet fiber = 0;
                for (int a = 0; a < sp.base(); ++a)
                    if (x & bit(static_cast<int>(line + a * sp.stride(i)))) fiber |= PointSet{1} << a;
                if (sp.chang()->has(sp.coordinate(s, i), fiber)) r |= bit(static_cast<int>(s));
            }
            return r;
        };
    }
    return FiniteAlgebra(std::move(parts));
}

// ----------------------------------------------------------------- terms

namespace term {
Term var(int k) { return {Term::Op::Var, k, 0, {}}; }
Term zero() { return {Term::Op::Zero, 0, 0, {}}; }
Term one() { return {Term::Op::One, 0, 0, {}}; }
Term join(Term a, Term b) { return {Term::Op::Join, 0, 0, {std::move(a), std::move(b)}}; }
Term meet(Term a, Term b) { return {Term::Op::Meet, 0, 0, {std::move(a), std::move(b)}}; }
Term neg(Term a) { return {Term::Op::Neg, 0, 0, {std::move(a)}}; }
Term c(int i, Term a) { return {Term::Op::Cyl, i, 0, {std::move(a)}}; }
Term d(int i, int j) { return {Term::Op::Diag, i, j, {}}; }
Term I(int i, Term a) { return {Term::Op::Interior, i, 0, {std::move(a)}}; }
Term box(int i, Term a) { return {Term::Op::Box, i, 0, {std::move(a)}}; }
Term s(int i, int j, Term a) { return {Term::Op::Subst, i, j, {std::move(a)}}; }
Term q(int i, Term a) { return {Term::Op::Q, i, 0, {std::move(a)}}; }
Term oplus(Term a, Term b) { return {Term::Op::Xor, 0, 0, {std::move(a), std::move(b)}}; }
}  // namespace term

std::string Term::to_string() const {
    auto idx = [](int v) { return std::to_string(v); };
    switch (op) {
        case Op::Var: return "v" + idx(i);
        case Op::Zero: return "0";
        case Op::One: return "1";
        case Op::Join: return "(" + kids[0].to_string() + " + " + kids[1].to_string() + ")";
        case Op::Meet: return "(" + kids[0].to_string() + " . " + kids[1].to_string() + ")";
        case Op::Neg: return "-" + kids[0].to_string();
        case Op::Cyl: return "c" + idx(i) + "(" + kids[0].to_string() + ")";
        case Op::Diag: return "d" + idx(i) + idx(j);
        case Op::Interior: return "I" + idx(i) + "(" + kids[0].to_string() + ")";
        case Op::Box: return "B" + idx(i) + "(" + kids[0].to_string() + ")";
        case Op::Subst: return "s" + idx(i) + "^" + idx(j) + "(" + kids[0].to_string() + ")";
        case Op::Q: return "q" + idx(i) + "(" + kids[0].to_string() + ")";
        case Op::Xor: return "(" + kids[0].to_string() + " (+) " + kids[1].to_string() + ")";
    }
    return "?";
}

std::string Equation::to_string() const {
    std::string out = lhs.to_string() + (kind == Kind::Equal ? " = " : " <= ") + rhs.to_string();
    for (const auto& g : guards)
        for (int k : g.indices) out += ", " + std::to_string(k) + " not in D(v" + std::to_string(g.var) + ")";
    return out;
}

int max_var(const Term& t) {
    int m = t.op == Term::Op::Var ? t.i : -1;
    for (const auto& k : t.kids) m = std::max(m, max_var(k));
    return m;
}

namespace {

struct FastEnv {
    const Element* values;
    const bool* bound;
    std::size_t size;
};

Element eval_fast(const FiniteAlgebra& alg, const Term& t, const FastEnv& env) {
    using Op = Term::Op;
    switch (t.op) {
        case Op::Var:
            if (t.i < 0 || static_cast<std::size_t>(t.i) >= env.size || !env.bound[t.i]) {
                throw Error(ErrorKind::UnboundVariable, "v" + std::to_string(t.i));
            }
            return env.values[t.i];
        case Op::Zero: return 0;
        case Op::One: return alg.top();
        case Op::Join: return eval_fast(alg, t.kids[0], env) | eval_fast(alg, t.kids[1], env);
        case Op::Meet: return eval_fast(alg, t.kids[0], env) & eval_fast(alg, t.kids[1], env);
        case Op::Neg: return alg.neg(eval_fast(alg, t.kids[0], env));
        case Op::Cyl: return alg.cyl(t.i, eval_fast(alg, t.kids[0], env));
        case Op::Diag: return alg.diag(t.i, t.j);
        case Op::Interior: return alg.interior(t.i, eval_fast(alg, t.kids[0], env));
        case Op::Box: return alg.box(t.i, eval_fast(alg, t.kids[0], env));
        case Op::Subst: {
            Element x = eval_fast(alg, t.kids[0], env);
            if (t.i == t.j) {
                alg.diag(t.i, t.j);  // index check
                return x;
            }
            return alg.cyl(t.i, alg.diag(t.i, t.j) & x);
        }
        case Op::Q: return alg.neg(alg.cyl(t.i, alg.neg(eval_fast(alg, t.kids[0], env))));
        case Op::Xor: {
            Element a = eval_fast(alg, t.kids[0], env);
            Element b = eval_fast(alg, t.kids[1], env);
            return (alg.neg(a) | b) & (alg.neg(b) | a);
        }
    }
    return 0;
}

bool guards_ok(const FiniteAlgebra& alg, const Equation& e, const std::vector<Element>& env) {
    for (const auto& g : e.guards)
        for (int k : g.indices)
            if (alg.cyl(k, env[g.var]) != env[g.var]) return false;
    return true;
}

bool satisfied(const Equation& e, Element l, Element r) {
    return e.kind == Equation::Kind::Equal ? l == r : (l & ~r) == 0;
}

Env to_env(const std::vector<Element>& v) {
    Env env;
    for (std::size_t k = 0; k < v.size(); ++k) env[static_cast<int>(k)] = v[k];
    return env;
}

}  // namespace

Element eval_term(const FiniteAlgebra& alg, const Term& t, const Env& env) {
    const int vars = max_var(t) + 1;
    std::vector<Element> values(vars, 0);
    std::unique_ptr<bool[]> bound(new bool[std::max(vars, 1)]());
    for (auto [k, v] : env) {
        if (k >= 0 && k < vars) {
            values[k] = v;
            bound[k] = true;
        }
    }
    return eval_fast(alg, t, FastEnv{values.data(), bound.get(), values.size()});
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        case Status::Vacuous: return "vacuous";
    }
    return "?";
}

Verdict check_equation(const FiniteAlgebra& alg, const Equation& e, CheckMode mode) {
    const int vars = std::max(max_var(e.lhs), max_var(e.rhs)) + 1;
    std::vector<Element> env(vars, 0);
    std::unique_ptr<bool[]> bound(new bool[std::max(vars, 1)]);
    std::fill(bound.get(), bound.get() + std::max(vars, 1), true);
    const FastEnv fast{env.data(), bound.get(), env.size()};

    std::uint64_t total = 1;
    bool feasible = true;
    for (int k = 0; k < vars; ++k) {
        const std::uint64_t c = alg.carrier_size();
        if (c != 0 && total > kExhaustiveLimit / c) {
            feasible = false;
            break;
        }
        total *= c;
    }
    feasible = feasible && total <= kExhaustiveLimit;
    bool exhaustive = mode.kind == CheckMode::Kind::Exhaustive || (mode.kind == CheckMode::Kind::Auto && feasible);
    if (exhaustive && !feasible) {
        throw Error(ErrorKind::TooLargeForExhaustive, "|carrier|^vars exceeds 2^24 for " + e.to_string());
    }

    Verdict v;
    v.exhaustive = exhaustive;
    auto test = [&]() {
        if (!guards_ok(alg, e, env)) return true;
        ++v.environments;
        Element l = eval_fast(alg, e.lhs, fast);
        Element r = eval_fast(alg, e.rhs, fast);
        if (satisfied(e, l, r)) return true;
        v.status = Status::Fails;
        v.counterexample = to_env(env);
        v.lhs_value = l;
        v.rhs_value = r;
        return false;
    };

    if (exhaustive) {
        std::vector<std::uint64_t> idx(vars, 0);
        for (std::uint64_t n = 0; n < total; ++n) {
            for (int k = 0; k < vars; ++k) env[k] = alg.element_at(idx[k]);
            if (!test()) return v;
            for (int k = 0; k < vars; ++k) {
                if (++idx[k] < alg.carrier_size()) break;
                idx[k] = 0;
            }
        }
    } else {
        std::mt19937_64 rng(mode.seed);
        std::vector<std::vector<int>> guarded(vars);
        for (const auto& g : e.guards)
            if (g.var >= 0 && g.var < vars) guarded[g.var].insert(guarded[g.var].end(), g.indices.begin(), g.indices.end());
        const std::uint64_t count = mode.kind == CheckMode::Kind::Auto ? 10000 : mode.samples;
        for (std::uint64_t n = 0; n < count; ++n) {
            for (int k = 0; k < vars; ++k) {
                Element x = alg.sample(rng);
                // Cylindrifying along the guarded indices lands inside the guard.
                for (int idx : guarded[k]) x = alg.cyl(idx, x);
                env[k] = x;
            }
            if (!test()) return v;
        }
    }
    if (v.environments == 0) v.status = Status::Vacuous;
    return v;
}

// ---------------------------------------------------------------- suites

const char* to_string(Suite s) {
    switch (s) {
        case Suite::CA: return "CA";
        case Suite::TCA: return "TCA";
        case Suite::Chang: return "Chang";
        case Suite::S4Chang: return "S4Chang";
        case Suite::S5Chang: return "S5Chang";
    }
    return "?";
}

Suite suite_from_string(const std::string& s) {
    for (Suite x : {Suite::CA, Suite::TCA, Suite::Chang, Suite::S4Chang, Suite::S5Chang})
        if (s == to_string(x)) return x;
    throw Error(ErrorKind::InvalidArgument, "unknown suite " + s);
}

namespace {

using namespace term;
using Kind = Equation::Kind;

Equation eq(Term l, Term r, std::string label, Kind kind = Kind::Equal, std::vector<Guard> guards = {}) {
    return Equation{std::move(l), std::move(r), kind, std::move(guards), std::move(label)};
}

std::string ix(std::initializer_list<std::pair<const char*, int>> parts) {
    std::string out;
    for (auto [name, v] : parts) out += std::string(out.empty() ? "" : ",") + name + "=" + std::to_string(v);
    return out;
}

std::vector<Axiom> ca_axioms(int n) {
    const Term x = var(0), y = var(1), z = var(2);
    std::vector<Axiom> out;
    out.push_back({"1", "Boolean algebra equations",
                   {eq(join(x, y), join(y, x), "x+y=y+x"),
                    eq(meet(x, y), meet(y, x), "x.y=y.x"),
                    eq(join(x, meet(y, z)), meet(join(x, y), join(x, z)), "x+(y.z)=(x+y).(x+z)"),
                    eq(meet(x, join(y, z)), join(meet(x, y), meet(x, z)), "x.(y+z)=x.y+x.z"),
                    eq(join(x, zero()), x, "x+0=x"),
                    eq(meet(x, one()), x, "x.1=x"),
                    eq(join(x, neg(x)), one(), "x+-x=1"),
                    eq(meet(x, neg(x)), zero(), "x.-x=0")}});
    Axiom a2{"2", "c_i 0 = 0", {}}, a3{"3", "x <= c_i x", {}}, a4{"4", "c_i(x . c_i y) = c_i x . c_i y", {}};
    Axiom a5{"5", "c_i c_j x = c_j c_i x", {}}, a6{"6", "d_ii = 1", {}};
    Axiom a7{"7", "d_ij = c_k(d_ik . d_jk) for k distinct from i, j", {}};
    Axiom a8{"8", "c_i(d_ij . x) . c_i(d_ij . -x) = 0 for i != j", {}};
    for (int i = 0; i < n; ++i) {
        a2.instances.push_back(eq(c(i, zero()), zero(), ix({{"i", i}})));
        a3.instances.push_back(eq(x, c(i, x), ix({{"i", i}}), Kind::Leq));
        a4.instances.push_back(eq(c(i, meet(x, c(i, y))), meet(c(i, x), c(i, y)), ix({{"i", i}})));
        a6.instances.push_back(eq(d(i, i), one(), ix({{"i", i}})));
        for (int j = 0; j < n; ++j) {
            if (j != i) {
                a5.instances.push_back(eq(c(i, c(j, x)), c(j, c(i, x)), ix({{"i", i}, {"j", j}})));
                a8.instances.push_back(eq(meet(c(i, meet(d(i, j), x)), c(i, meet(d(i, j), neg(x)))), zero(), ix({{"i", i}, {"j", j}})));
            }
            for (int k = 0; k < n; ++k)
                if (k != i && k != j)
                    a7.instances.push_back(eq(d(i, j), c(k, meet(d(i, k), d(j, k))), ix({{"i", i}, {"j", j}, {"k", k}})));
        }
    }
    for (auto* a : {&a2, &a3, &a4, &a5, &a6, &a7, &a8}) out.push_back(std::move(*a));
    return out;
}

// Shared shape of the TCA items and the Chang / S4 / S5 items; `op` is
// either the interior or the box constructor.
template <class Op>
Axiom compat_axiom(int n, Op op, const char* id, const char* name) {
    const Term p = var(0), q = var(1);
    Axiom a{id, std::string("q_i(p (+) q) <= q_i(") + name + "_i p (+) " + name + "_i q)", {}};
    for (int i = 0; i < n; ++i)
        a.instances.push_back(eq(term::q(i, oplus(p, q)), term::q(i, oplus(op(i, p), op(i, q))), ix({{"i", i}}), Kind::Leq));
    return a;
}

template <class Op>
Axiom subst_axiom(int n, Op op, const char* id, const char* name) {
    const Term p = var(0);
    Axiom a{id, std::string("s_i^j ") + name + "_i p = " + name + "_j s_i^j p for i != j, j not in D(p)", {}};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                a.instances.push_back(eq(s(i, j, op(i, p)), op(j, s(i, j, p)), ix({{"i", i}, {"j", j}}), Kind::Equal, {Guard{0, {j}}}));
    return a;
}

template <class Op>
std::vector<Axiom> s4_items(int n, Op op, const char* name, bool tca_numbering) {
    const Term p = var(0), q = var(1);
    const std::string nm = name;
    Axiom unit{tca_numbering ? "5" : "1", nm + "_i 1 = 1", {}};
    Axiom deflate{"2", nm + "_i p <= p", {}};
    Axiom mult{"3", nm + "_i p . " + nm + "_i q = " + nm + "_i(p . q)", {}};
    Axiom four{tca_numbering ? "4" : "5", nm + "_i p <= " + nm + "_i " + nm + "_i p", {}};
    Axiom cyl{tca_numbering ? "6" : "4", "c_k " + nm + "_i p = " + nm + "_i p for k != i, k not in D(p)", {}};
    for (int i = 0; i < n; ++i) {
        unit.instances.push_back(eq(op(i, one()), one(), ix({{"i", i}})));
        deflate.instances.push_back(eq(op(i, p), p, ix({{"i", i}}), Kind::Leq));
        mult.instances.push_back(eq(meet(op(i, p), op(i, q)), op(i, meet(p, q)), ix({{"i", i}})));
        four.instances.push_back(eq(op(i, p), op(i, op(i, p)), ix({{"i", i}}), Kind::Leq));
        for (int k = 0; k < n; ++k)
            if (k != i) cyl.instances.push_back(eq(c(k, op(i, p)), op(i, p), ix({{"i", i}, {"k", k}}), Kind::Equal, {Guard{0, {k}}}));
    }
    if (tca_numbering) return {std::move(deflate), std::move(mult), std::move(four), std::move(unit), std::move(cyl)};
    return {std::move(unit), std::move(deflate), std::move(mult), std::move(cyl), std::move(four)};
}

}  // namespace

std::vector<Axiom> axiom_suite(Suite suite, int dim) {
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
    auto I = [](int i, Term t) { return term::I(i, std::move(t)); };
    auto B = [](int i, Term t) { return term::box(i, std::move(t)); };
    std::vector<Axiom> out;
    switch (suite) {
        case Suite::CA: return ca_axioms(dim);
        case Suite::TCA: {
            out.push_back(compat_axiom(dim, I, "1", "I"));
            for (auto& a : s4_items(dim, I, "I", true)) out.push_back(std::move(a));
            out.push_back(subst_axiom(dim, I, "7", "I"));
            return out;
        }
        case Suite::Chang:
        case Suite::S4Chang:
        case Suite::S5Chang: {
            out.push_back(compat_axiom(dim, B, "C1", "B"));
            out.push_back(subst_axiom(dim, B, "C2", "B"));
            if (suite == Suite::Chang) return out;
            for (auto& a : s4_items(dim, B, "B", false)) out.push_back(std::move(a));
            if (suite == Suite::S5Chang) {
                const Term p = var(0);
                Axiom five{"6", "-B_i -p <= B_i -B_i -p", {}};
                for (int i = 0; i < dim; ++i)
                    five.instances.push_back(eq(neg(B(i, neg(p))), B(i, neg(B(i, neg(p)))), ix({{"i", i}}), Kind::Leq));
                out.push_back(std::move(five));
            }
            return out;
        }
    }
    return out;
}

bool SuiteReport::passed() const {
    return std::none_of(axioms.begin(), axioms.end(), [](const auto& a) { return a.status == Status::Fails; });
}

std::vector<std::string> SuiteReport::failed_ids() const {
    std::vector<std::string> out;
    for (const auto& a : axioms)
        if (a.status == Status::Fails) out.push_back(a.id);
    return out;
}

SuiteReport check_axiom_suite(const FiniteAlgebra& alg, Suite suite, CheckMode mode) {
    SuiteReport report;
    report.suite = suite;
    report.exhaustive = true;
    std::uint64_t counter = 0;
    for (const auto& ax : axiom_suite(suite, alg.dim())) {
        AxiomResult r;
        r.id = ax.id;
        r.text = ax.text;
        r.instances = ax.instances.size();
        bool any_nonvacuous = false;
        for (const auto& inst : ax.instances) {
            CheckMode m = mode;
            m.seed = mode.seed + 0x9E3779B97F4A7C15ULL * ++counter;
            Verdict v = check_equation(alg, inst, m);
            report.exhaustive = report.exhaustive && v.exhaustive;
            r.environments += v.environments;
            if (v.status == Status::Fails) {
                r.status = Status::Fails;
                r.failing_instance = inst.label + ": " + inst.to_string();
                r.counterexample = v.counterexample;
                break;
            }
            if (v.status == Status::Holds) any_nonvacuous = true;
        }
        if (r.status != Status::Fails && !any_nonvacuous) r.status = Status::Vacuous;
        report.axioms.push_back(std::move(r));
    }
    return report;
}

namespace {
nlohmann::json env_json(const Env& env) {
    nlohmann::json j = nlohmann::json::object();
    for (auto [k, v] : env) j["v" + std::to_string(k)] = v;
    return j;
}
}  // namespace

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j{{"status", to_string(v.status)}, {"exhaustive", v.exhaustive}, {"environments", v.environments}};
    if (v.counterexample) {
        j["counterexample"] = env_json(*v.counterexample);
        j["lhs"] = v.lhs_value;
        j["rhs"] = v.rhs_value;
    }
    return j;
}

nlohmann::json to_json(const SuiteReport& r) {
    nlohmann::json axioms = nlohmann::json::object();
    for (const auto& a : r.axioms) {
        nlohmann::json j{{"text", a.text}, {"status", to_string(a.status)}, {"instances", a.instances}, {"environments", a.environments}};
        if (a.failing_instance) j["failing_instance"] = *a.failing_instance;
        if (a.counterexample) j["counterexample"] = env_json(*a.counterexample);
        axioms[a.id] = j;
    }
    return {{"suite", to_string(r.suite)}, {"exhaustive", r.exhaustive}, {"passed", r.passed()}, {"axioms", axioms}};
}

// ------------------------------------------------------ derived algebras

std::uint64_t dimension_set_abs(const FiniteAlgebra& alg, Element x) {
    std::uint64_t out = 0;
    for (int i = 0; i < alg.dim(); ++i)
        if (alg.cyl(i, x) != x) out |= std::uint64_t{1} << i;
    return out;
}

FiniteAlgebra nr(int m, const FiniteAlgebra& alg) {
    if (m < 1 || m > alg.dim()) throw Error(ErrorKind::InvalidArgument, "neat reduct dimension " + std::to_string(m));
    const std::uint64_t allowed = full_set(m);
    std::vector<Element> carrier;
    for (Element x : alg.carrier())
        if (subset_of(dimension_set_abs(alg, x), allowed)) carrier.push_back(x);

    auto base = alg.parts();
    FiniteAlgebra::Parts p;
    p.dim = m;
    p.points = base.points;
    p.cyl = base.cyl;
    p.interior = base.interior;
    p.box = base.box;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) p.diag.push_back(base.diag[i * base.dim + j]);
    p.carrier = carrier;
    FiniteAlgebra out(std::move(p));

    auto need = [&](Element y, const std::string& what) {
        if (!out.in_carrier(y)) throw Error(ErrorKind::NotClosed, "neat reduct is not closed under " + what);
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) need(out.diag(i, j), "d_" + std::to_string(i) + std::to_string(j));
    for (Element x : carrier) {
        need(out.neg(x), "complement");
        for (int i = 0; i < m; ++i) {
            need(out.cyl(i, x), "c_" + std::to_string(i));
            need(out.interior(i, x), "I_" + std::to_string(i));
            if (out.has_box()) need(out.box(i, x), "box_" + std::to_string(i));
        }
    }
    for (std::size_t a = 0; a < carrier.size(); ++a)
        for (std::size_t b = a + 1; b < carrier.size(); ++b) {
            need(carrier[a] | carrier[b], "join");
            need(carrier[a] & carrier[b], "meet");
        }
    return out;
}

FiniteAlgebra sg(const FiniteAlgebra& alg, const std::vector<Element>& gens) {
    std::vector<Element> elems;
    std::unordered_set<Element> seen;
    auto add = [&](Element x) {
        if (seen.insert(x).second) elems.push_back(x);
    };
    add(0);
    add(alg.top());
    for (int i = 0; i < alg.dim(); ++i)
        for (int j = 0; j < alg.dim(); ++j) add(alg.diag(i, j));
    for (Element g : gens) {
        if (!alg.in_carrier(g)) throw Error(ErrorKind::InvalidArgument, "generator outside the carrier");
        add(g);
    }
    for (std::size_t p = 0; p < elems.size(); ++p) {
        const Element x = elems[p];
        add(alg.neg(x));
        for (int i = 0; i < alg.dim(); ++i) {
            add(alg.cyl(i, x));
            add(alg.interior(i, x));
            if (alg.has_box()) add(alg.box(i, x));
        }
        for (std::size_t q = 0; q < p; ++q) {
            add(x | elems[q]);
            add(x & elems[q]);
        }
    }
    auto p = alg.parts();
    p.carrier = std::move(elems);
    FiniteAlgebra out(std::move(p));
    out.set_flagged(alg.flagged_interiors());
    return out;
}

std::vector<Element> atoms_of(const FiniteAlgebra& alg) {
    std::vector<Element> out;
    if (alg.full_carrier()) {
        for (int a = 0; a < alg.points(); ++a) out.push_back(bit(a));
        return out;
    }
    const auto carrier = alg.carrier();
    for (Element x : carrier) {
        if (x == 0) continue;
        bool minimal = true;
        for (Element y : carrier)
            if (y != 0 && y != x && subset_of(y, x)) {
                minimal = false;
                break;
            }
        if (minimal) out.push_back(x);
    }
    return out;
}

setalg::TupleSet represent_element(const Representation& r, int dim, Element x) {
    auto space = setalg::make_space(dim, r.base, r.topology);
    setalg::TupleSet out(space);
    for (std::size_t a = 0; a < r.atoms.size(); ++a)
        if (subset_of(r.atoms[a], x))
            for (auto code : r.images[a]) out.insert(code);
    return out;
}

namespace {

struct RepSearch {
    const FiniteAlgebra& alg;
    const FiniteAlgebra& target;  // full set algebra over the candidate space
    const std::vector<Element>& atoms;
    int tuples;
    std::vector<std::vector<int>> allowed;  // atom indices per tuple
    std::vector<int> assign;
    std::vector<int> used;
    int distinct = 0;
    std::uint64_t leaves = 0;
    std::uint64_t budget;
    std::vector<std::vector<Element>> cyl_atoms;  // c_i(atom) per i, atom
    std::vector<std::vector<Element>> neighbours;  // per i, tuple: mask of tuples agreeing off i

    Element image(Element x) const {
        Element out = 0;
        for (int t = 0; t < tuples; ++t)
            if (subset_of(atoms[assign[t]], x)) out |= bit(t);
        return out;
    }

    bool consistent(int t, int a) const {
        for (int i = 0; i < alg.dim(); ++i) {
            bool ok = true;
            for_bits(neighbours[i][t], [&](int u) {
                if (u >= t || !ok) return;
                const int b = assign[u];
                // u in c_i h(a) = h(c_i a), so b must lie below c_i a, and symmetrically.
                if (!subset_of(atoms[b], cyl_atoms[i][a]) || !subset_of(atoms[a], cyl_atoms[i][b])) ok = false;
            });
            if (!ok) return false;
        }
        return true;
    }

    bool verify() const {
        for (Element x : alg.carrier()) {
            const Element hx = image(x);
            for (int i = 0; i < alg.dim(); ++i) {
                if (image(alg.cyl(i, x)) != target.cyl(i, hx)) return false;
                if (image(alg.interior(i, x)) != target.interior(i, hx)) return false;
            }
        }
        return true;
    }

    bool run(int t) {
        if (t == tuples) {
            ++leaves;
            return distinct == static_cast<int>(atoms.size()) && verify();
        }
        if (leaves >= budget) return false;
        if (static_cast<int>(atoms.size()) - distinct > tuples - t) return false;
        for (int a : allowed[t]) {
            if (!consistent(t, a)) continue;
            assign[t] = a;
            if (used[a]++ == 0) ++distinct;
            if (run(t + 1)) return true;
            if (--used[a] == 0) --distinct;
        }
        return false;
    }
};

}  // namespace

RepresentReport try_represent(const FiniteAlgebra& alg, int max_base) {
    if (max_base < 1 || max_base > 3) throw Error(ErrorKind::InvalidArgument, "max_base must lie in 1..3");
    if (alg.carrier_size() > 256) throw Error(ErrorKind::TooLarge, "carrier exceeds 2^8 elements");
    RepresentReport report;
    report.max_base = max_base;
    for (Suite suite : {Suite::CA, Suite::TCA}) {
        auto r = check_axiom_suite(alg, suite);
        if (!r.passed()) {
            report.violated_axiom = std::string(to_string(suite)) + "." + r.failed_ids().front();
            return report;
        }
    }
    const auto atoms = atoms_of(alg);
    const int n = alg.dim();
    for (int u = 1; u <= max_base; ++u) {
        std::uint64_t count = 1;
        for (int k = 0; k < n; ++k) count *= u;
        if (count > 64) break;
        std::vector<FiniteTopology> tops{discrete(u)};
        for (auto& t : enumerate_topologies(u))
            if (!(t == discrete(u))) tops.push_back(t);
        for (const auto& top : tops) {
            auto space = setalg::make_space(n, u, top);
            auto target = set_algebra(space);
            RepSearch s{alg, target, atoms, static_cast<int>(count), {}, {}, {}, 0, 0, 5'000'000, {}, {}};
            s.assign.assign(count, 0);
            s.used.assign(atoms.size(), 0);
            s.cyl_atoms.assign(n, std::vector<Element>(atoms.size()));
            s.neighbours.assign(n, std::vector<Element>(count, 0));
            for (int i = 0; i < n; ++i) {
                for (std::size_t a = 0; a < atoms.size(); ++a) s.cyl_atoms[i][a] = alg.cyl(i, atoms[a]);
                for (int t = 0; t < static_cast<int>(count); ++t) s.neighbours[i][t] = target.cyl(i, bit(t));
            }
            s.allowed.resize(count);
            for (int t = 0; t < static_cast<int>(count); ++t)
                for (std::size_t a = 0; a < atoms.size(); ++a) {
                    bool ok = true;
                    for (int i = 0; i < n && ok; ++i)
                        for (int j = 0; j < n && ok; ++j) {
                            const bool in_target = target.diag(i, j) & bit(t);
                            const bool in_alg = subset_of(atoms[a], alg.diag(i, j));
                            ok = in_target == in_alg;
                        }
                    if (ok) s.allowed[t].push_back(static_cast<int>(a));
                }
            const bool found = s.run(0);
            report.candidates_tried += s.leaves;
            if (found) {
                Representation rep;
                rep.base = u;
                rep.topology = top;
                rep.atoms = atoms;
                rep.images.resize(atoms.size());
                for (int t = 0; t < static_cast<int>(count); ++t) rep.images[s.assign[t]].push_back(t);
                report.representation = std::move(rep);
                return report;
            }
        }
    }
    return report;
}

nlohmann::json to_json(const RepresentReport& r, int dim) {
    nlohmann::json j{{"max_base", r.max_base}, {"candidates_tried", r.candidates_tried}};
    if (r.violated_axiom) j["violated_axiom"] = *r.violated_axiom;
    if (r.representation) {
        const auto& rep = *r.representation;
        nlohmann::json images = nlohmann::json::array();
        for (std::size_t a = 0; a < rep.atoms.size(); ++a) images.push_back({{"atom", rep.atoms[a]}, {"tuples", rep.images[a]}});
        j["found"] = true;
        j["representation"] = {{"base", rep.base}, {"dim", dim}, {"topology", tcw::to_json(rep.topology)}, {"images", images}};
    } else {
        j["found"] = false;
        j["note"] = "bounded search exhausted; this is not a proof of non-representability";
    }
    return j;
}

}  // namespace tcw::bao
