#include "tcw/setalg.hpp"

#include <algorithm>
#include <bit>

#include "tcw/error.hpp"

namespace tcw::setalg {

namespace {

void check_index(const SetAlgebraSpace& s, int i) {
    if (i < 0 || i >= s.dim()) {
        throw Error(ErrorKind::IndexOutOfRange, "index " + std::to_string(i) + " in dimension " + std::to_string(s.dim()));
    }
}

// Calls f(line_start) for every line along axis i (tuples with s_i = 0).
template <class F>
void for_each_line(const SetAlgebraSpace& s, int i, F&& f) {
    const std::uint64_t stride = s.stride(i);
    const std::uint64_t block = stride * s.base();
    for (std::uint64_t hi = 0; hi < s.tuple_count(); hi += block)
        for (std::uint64_t lo = 0; lo < stride; ++lo) f(hi + lo);
}

PointSet fiber(const TupleSet& x, int i, std::uint64_t line) {
    const auto& s = *x.space();
    PointSet f = 0;
    for (int a = 0; a < s.base(); ++a)
        if (x.contains(line + a * s.stride(i))) f |= PointSet{1} << a;
    return f;
}

void same_space(const TupleSet& a, const TupleSet& b) {
    if (a.space() != b.space() &&
        (a.space()->dim() != b.space()->dim() || a.space()->base() != b.space()->base())) {
        throw Error(ErrorKind::InvalidArgument, "operands live in different spaces");
    }
}

}  // namespace

bool ChangSystem::has(int point, PointSet s) const {
    const auto& fam = families.at(point);
    return std::binary_search(fam.begin(), fam.end(), s);
}

ChangSystem chang_from_topology(const FiniteTopology& t) {
    return ChangSystem{std::vector<std::vector<PointSet>>(t.size(), t.opens())};
}

ChangSystem neighbourhood_chang(const FiniteTopology& t) {
    if (t.size() > 16) throw Error(ErrorKind::SizeTooLarge, "neighbourhood families limited to 16 points");
    ChangSystem v;
    v.families.resize(t.size());
    for (PointSet a = 0; a <= t.base(); ++a) {
        PointSet in = interior(t, a);
        for (int x : members(in)) v.families[x].push_back(a);
    }
    return v;
}

SetAlgebraSpace::SetAlgebraSpace(int dim, int base, std::optional<FiniteTopology> topology,
                                 std::optional<ChangSystem> chang)
    : dim_(dim), base_(base), topology_(std::move(topology)), chang_(std::move(chang)) {
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
    if (base < 1 || base > kMaxPoints) throw Error(ErrorKind::InvalidArgument, "base size " + std::to_string(base));
    if (topology_ && topology_->size() != base) throw Error(ErrorKind::InvalidArgument, "topology size differs from base");
    if (chang_) {
        if (static_cast<int>(chang_->families.size()) != base) throw Error(ErrorKind::InvalidArgument, "Chang system size differs from base");
        for (auto& fam : chang_->families) {
            for (PointSet s : fam)
                if (!subset_of(s, full_set(base))) throw Error(ErrorKind::OutOfRangePoint, "Chang family leaves the base");
            std::sort(fam.begin(), fam.end());
            fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
        }
    }
    std::uint64_t n = 1;
    for (int i = 0; i < dim; ++i) {
        strides_.push_back(n);
        n *= static_cast<std::uint64_t>(base);
        if (n > kMaxTuples) throw Error(ErrorKind::TooLarge, "u^n exceeds 2^24");
    }
    tuple_count_ = n;
}

std::uint64_t SetAlgebraSpace::encode(std::span<const int> s) const {
    if (static_cast<int>(s.size()) != dim_) throw Error(ErrorKind::InvalidArgument, "tuple arity differs from dimension");
    std::uint64_t code = 0;
    for (int i = 0; i < dim_; ++i) {
        if (s[i] < 0 || s[i] >= base_) throw Error(ErrorKind::OutOfRangePoint, "tuple entry " + std::to_string(s[i]));
        code += static_cast<std::uint64_t>(s[i]) * strides_[i];
    }
    return code;
}

std::vector<int> SetAlgebraSpace::decode(std::uint64_t code) const {
    std::vector<int> s(dim_);
    for (int i = 0; i < dim_; ++i) s[i] = coordinate(code, i);
    return s;
}

SpacePtr make_space(int dim, int base, std::optional<FiniteTopology> topology, std::optional<ChangSystem> chang) {
    return std::make_shared<const SetAlgebraSpace>(dim, base, std::move(topology), std::move(chang));
}

TupleSet::TupleSet(SpacePtr space) : space_(std::move(space)), words_((space_->tuple_count() + 63) / 64, 0) {}

TupleSet TupleSet::unit(SpacePtr space) {
    TupleSet x(std::move(space));
    std::fill(x.words_.begin(), x.words_.end(), ~std::uint64_t{0});
    x.trim();
    return x;
}

TupleSet TupleSet::from_tuples(SpacePtr space, std::span<const std::vector<int>> tuples) {
    TupleSet x(space);
    for (const auto& t : tuples) x.insert(space->encode(t));
    return x;
}

TupleSet TupleSet::from_codes(SpacePtr space, std::span<const std::uint64_t> codes) {
    TupleSet x(space);
    for (auto c : codes) {
        if (c >= x.space_->tuple_count()) throw Error(ErrorKind::OutOfRangePoint, "tuple code " + std::to_string(c));
        x.insert(c);
    }
    return x;
}

void TupleSet::trim() {
    const std::uint64_t extra = words_.size() * 64 - space_->tuple_count();
    if (extra) words_.back() &= ~std::uint64_t{0} >> extra;
}

std::uint64_t TupleSet::count() const {
    std::uint64_t n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
}

std::vector<std::uint64_t> TupleSet::codes() const {
    std::vector<std::uint64_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            out.push_back(w * 64 + std::countr_zero(bits));
            bits &= bits - 1;
        }
    }
    return out;
}

std::vector<std::vector<int>> TupleSet::tuples() const {
    std::vector<std::vector<int>> out;
    for (auto c : codes()) out.push_back(space_->decode(c));
    return out;
}

TupleSet TupleSet::operator|(const TupleSet& o) const {
    same_space(*this, o);
    TupleSet r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
    return r;
}

TupleSet TupleSet::operator&(const TupleSet& o) const {
    same_space(*this, o);
    TupleSet r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
}

TupleSet TupleSet::operator~() const {
    TupleSet r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
}

bool TupleSet::subset_of(const TupleSet& o) const {
    same_space(*this, o);
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~o.words_[i]) return false;
    return true;
}

bool TupleSet::operator==(const TupleSet& o) const {
    return space_->dim() == o.space_->dim() && space_->base() == o.space_->base() && words_ == o.words_;
}

TupleSet cyl(int i, const TupleSet& x) {
    const auto& s = *x.space();
    check_index(s, i);
    TupleSet r(x.space());
    for_each_line(s, i, [&](std::uint64_t line) {
        if (fiber(x, i, line) == 0) return;
        for (int a = 0; a < s.base(); ++a) r.insert(line + a * s.stride(i));
    });
    return r;
}

TupleSet diag(int i, int j, const SpacePtr& space) {
    check_index(*space, i);
    check_index(*space, j);
    TupleSet r(space);
    for (std::uint64_t c = 0; c < space->tuple_count(); ++c)
        if (space->coordinate(c, i) == space->coordinate(c, j)) r.insert(c);
    return r;
}

TupleSet interior_op(int k, const TupleSet& x, bool dual) {
    const auto& s = *x.space();
    if (!s.topology()) throw Error(ErrorKind::NoTopology, "interior operator needs a topology on the base");
    check_index(s, k);
    const auto& t = *s.topology();
    TupleSet r(x.space());
    for_each_line(s, k, [&](std::uint64_t line) {
        PointSet f = fiber(x, k, line);
        PointSet keep = dual ? closure(t, f) : interior(t, f);
        for (int a : members(keep)) r.insert(line + a * s.stride(k));
    });
    return r;
}

TupleSet box_op(int k, const TupleSet& x) {
    const auto& s = *x.space();
    if (!s.chang()) throw Error(ErrorKind::NoChangSystem, "box operator needs a Chang system");
    check_index(s, k);
    TupleSet r(x.space());
    for_each_line(s, k, [&](std::uint64_t line) {
        PointSet f = fiber(x, k, line);
        for (int a = 0; a < s.base(); ++a)
            if (s.chang()->has(a, f)) r.insert(line + a * s.stride(k));
    });
    return r;
}

std::vector<int> replacement(int dim, int i, int j) {
    if (i < 0 || j < 0 || i >= dim || j >= dim) throw Error(ErrorKind::IndexOutOfRange, "replacement indices");
    std::vector<int> tau(dim);
    for (int k = 0; k < dim; ++k) tau[k] = k;
    tau[i] = j;
    return tau;
}

TupleSet subst(std::span<const int> tau, const TupleSet& x) {
    const auto& s = *x.space();
    if (static_cast<int>(tau.size()) != s.dim()) throw Error(ErrorKind::InvalidArgument, "transformation arity");
    for (int v : tau) check_index(s, v);
    TupleSet r(x.space());
    for (std::uint64_t c = 0; c < s.tuple_count(); ++c) {
        std::uint64_t moved = 0;
        for (int i = 0; i < s.dim(); ++i) moved += static_cast<std::uint64_t>(s.coordinate(c, tau[i])) * s.stride(i);
        if (x.contains(moved)) r.insert(c);
    }
    return r;
}

TupleSet neat_lift(const TupleSet& x, int extra) {
    if (extra < 1) throw Error(ErrorKind::InvalidArgument, "neat lift needs at least one extra dimension");
    const auto& s = *x.space();
    auto big = make_space(s.dim() + extra, s.base(), s.topology(), s.chang());
    TupleSet r(big);
    const std::uint64_t low = s.tuple_count();
    for (std::uint64_t c = 0; c < big->tuple_count(); ++c)
        if (x.contains(c % low)) r.insert(c);
    return r;
}

std::uint64_t dimension_set(const TupleSet& x) {
    std::uint64_t out = 0;
    for (int i = 0; i < x.space()->dim(); ++i)
        if (!(cyl(i, x) == x)) out |= std::uint64_t{1} << i;
    return out;
}

int GeneralizedSpace::dim() const {
    if (summands.empty()) throw Error(ErrorKind::EmptyList, "generalized space without summands");
    return summands.front()->dim();
}

int GeneralizedSpace::offset(std::size_t summand) const {
    int off = 0;
    for (std::size_t i = 0; i < summand; ++i) off += summands[i]->base();
    return off;
}

SpacePtr GeneralizedSpace::union_space() const {
    const int n = dim();
    int total = 0;
    bool all_topological = true;
    std::vector<FiniteTopology> parts;
    for (const auto& s : summands) {
        if (s->dim() != n) throw Error(ErrorKind::InvalidArgument, "summands differ in dimension");
        total += s->base();
        if (s->topology()) parts.push_back(*s->topology());
        else all_topological = false;
    }
    std::optional<FiniteTopology> top;
    if (all_topological) top = coproduct(parts);
    return make_space(n, total, std::move(top));
}

TupleSet generalized_unit(const GeneralizedSpace& g) {
    auto u = g.union_space();
    TupleSet r(u);
    for (std::uint64_t c = 0; c < u->tuple_count(); ++c) {
        for (std::size_t i = 0; i < g.summands.size(); ++i) {
            const int lo = g.offset(i), hi = lo + g.summands[i]->base();
            bool inside = true;
            for (int k = 0; k < u->dim() && inside; ++k) {
                int v = u->coordinate(c, k);
                inside = v >= lo && v < hi;
            }
            if (inside) {
                r.insert(c);
                break;
            }
        }
    }
    return r;
}

TupleSet gs_complement(const GeneralizedSpace& g, const TupleSet& x) { return ~x & generalized_unit(g); }
TupleSet gs_cyl(const GeneralizedSpace& g, int i, const TupleSet& x) { return cyl(i, x) & generalized_unit(g); }
TupleSet gs_diag(const GeneralizedSpace& g, int i, int j) {
    auto unit = generalized_unit(g);
    return diag(i, j, unit.space()) & unit;
}
TupleSet gs_interior(const GeneralizedSpace& g, int k, const TupleSet& x) {
    return interior_op(k, x) & generalized_unit(g);
}

std::vector<TupleSet> decompose_generalized(const GeneralizedSpace& g, const TupleSet& x) {
    auto unit = generalized_unit(g);
    if (x.space()->base() != unit.space()->base() || x.space()->dim() != unit.space()->dim() || !x.subset_of(unit)) {
        throw Error(ErrorKind::NotSubsetOfUnit, "element is not below the generalized unit");
    }
    const auto& u = *x.space();
    std::vector<TupleSet> parts;
    for (std::size_t i = 0; i < g.summands.size(); ++i) {
        const auto& sp = g.summands[i];
        const int off = g.offset(i);
        TupleSet part(sp);
        for (std::uint64_t c = 0; c < sp->tuple_count(); ++c) {
            std::uint64_t big = 0;
            for (int k = 0; k < sp->dim(); ++k) big += static_cast<std::uint64_t>(sp->coordinate(c, k) + off) * u.stride(k);
            if (x.contains(big)) part.insert(c);
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

TupleSet compose_generalized(const GeneralizedSpace& g, std::span<const TupleSet> parts) {
    if (parts.size() != g.summands.size()) throw Error(ErrorKind::InvalidArgument, "one part per summand expected");
    auto u = g.union_space();
    TupleSet r(u);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& sp = g.summands[i];
        const int off = g.offset(i);
        for (auto c : parts[i].codes()) {
            std::uint64_t big = 0;
            for (int k = 0; k < sp->dim(); ++k) big += static_cast<std::uint64_t>(sp->coordinate(c, k) + off) * u->stride(k);
            r.insert(big);
        }
    }
    return r;
}

nlohmann::json to_json(const TupleSet& x) {
    const auto& s = *x.space();
    nlohmann::json j{{"dim", s.dim()}, {"base", s.base()}, {"members", x.codes()}};
    j["topology"] = s.topology() ? tcw::to_json(*s.topology()) : nlohmann::json(nullptr);
    return j;
}

TupleSet tuple_set_from_json(const nlohmann::json& j) {
    std::optional<FiniteTopology> top;
    if (j.contains("topology") && !j.at("topology").is_null()) top = topology_from_json(j.at("topology"));
    auto space = make_space(j.at("dim").get<int>(), j.at("base").get<int>(), std::move(top));
    auto codes = j.at("members").get<std::vector<std::uint64_t>>();
    return TupleSet::from_codes(space, codes);
}

}  // namespace tcw::setalg
