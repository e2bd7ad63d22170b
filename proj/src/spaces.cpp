#include "cbr/spaces.hpp"

#include <algorithm>
#include <sstream>

#include "cbr/enumeration.hpp"

namespace cbr {

namespace en = enumeration;

// ---------------------------------------------------------------- schedules

Rational schedule_radius(Schedule s, std::uint32_t k) {
    long e = static_cast<long>(k);
    switch (s) {
        case Schedule::DyadicPaper: return Rational::pow2(-e - 1);
        case Schedule::DyadicTop: return Rational::pow2(-e);
        case Schedule::AlignedUltra: return Rational(3) * Rational::pow2(-e - 2);
    }
    throw SpaceError("unknown schedule");
}

std::string schedule_name(Schedule s) {
    switch (s) {
        case Schedule::DyadicPaper: return "paper";
        case Schedule::DyadicTop: return "top";
        case Schedule::AlignedUltra: return "aligned";
    }
    return "?";
}

Schedule parse_schedule(std::string_view s) {
    if (s == "paper") return Schedule::DyadicPaper;
    if (s == "top") return Schedule::DyadicTop;
    if (s == "aligned") return Schedule::AlignedUltra;
    throw SpaceError("unknown schedule '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- points

Branch Branch::make(std::vector<u64> word, u64 tail) {
    while (!word.empty() && word.back() == tail) word.pop_back();
    return Branch{std::move(word), tail};
}

std::vector<u64> Branch::prefix(std::size_t n) const {
    std::vector<u64> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
    return out;
}

std::string Branch::str() const {
    std::string s = "<";
    for (std::size_t i = 0; i < word.size(); ++i) s += (i ? "," : "") + std::to_string(word[i]);
    return s + "|" + std::to_string(tail) + ">";
}

Branch Branch::parse(std::string_view s) {
    auto bad = [&] { return SpaceError("invalid branch '" + std::string(s) + "'"); };
    if (s.size() < 3 || s.front() != '<' || s.back() != '>') throw bad();
    auto body = s.substr(1, s.size() - 2);
    auto bar = body.find('|');
    if (bar == std::string_view::npos) throw bad();
    auto num = [&](std::string_view t) {
        if (t.empty()) throw bad();
        u64 v = 0;
        for (char c : t) {
            if (c < '0' || c > '9') throw bad();
            v = v * 10 + static_cast<u64>(c - '0');
        }
        return v;
    };
    std::vector<u64> w;
    auto head = body.substr(0, bar);
    while (!head.empty()) {
        auto comma = head.find(',');
        w.push_back(num(head.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        head = head.substr(comma + 1);
        if (head.empty()) throw bad();
    }
    return make(std::move(w), num(body.substr(bar + 1)));
}

HedgePoint HedgePoint::make(u64 spine, Rational t) {
    if (t < Rational(0) || t > Rational(1)) throw SpaceError("hedgehog radial coordinate outside [0,1]");
    if (t == Rational(0)) spine = 0;
    return HedgePoint{spine, std::move(t)};
}

bool operator==(const Point& a, const Point& b) {
    if (a.v.index() != b.v.index()) return false;
    if (auto* sa = std::get_if<SumPoint>(&a.v)) {
        const auto& sb = std::get<SumPoint>(b.v);
        return sa->part == sb.part && *sa->inner == *sb.inner;
    }
    return std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SumPoint>) return false;
            else return x == std::get<T>(b.v);
        },
        a.v);
}

std::string Point::str() const {
    struct V {
        std::string operator()(std::size_t i) const { return "#" + std::to_string(i); }
        std::string operator()(const Rational& x) const { return x.str(); }
        std::string operator()(const HedgePoint& h) const {
            return h.t == Rational(0) ? "hub" : "s" + std::to_string(h.spine) + ":" + h.t.str();
        }
        std::string operator()(const Branch& b) const { return b.str(); }
        std::string operator()(const SumPoint& s) const { return "p" + std::to_string(s.part) + ":" + s.inner->str(); }
    };
    return std::visit(V{}, v);
}

Point finite_point(std::size_t i) { return Point{i}; }
Point line_point(Rational x) { return Point{std::move(x)}; }
Point hedge_point(u64 spine, Rational t) { return Point{HedgePoint::make(spine, std::move(t))}; }
Point branch_point(Branch b) { return Point{std::move(b)}; }
Point sum_point(std::uint32_t part, Point inner) {
    return Point{SumPoint{part, std::make_shared<const Point>(std::move(inner))}};
}

// ---------------------------------------------------------------- spaces

std::string family_name(Family f) {
    switch (f) {
        case Family::Finite: return "finite";
        case Family::Interval: return "interval";
        case Family::Line: return "line";
        case Family::Hedgehog: return "hedgehog";
        case Family::Baire: return "baire";
        case Family::UltraTable: return "ultratable";
        case Family::Scaled: return "scaled";
        case Family::Amalgam: return "amalgam";
    }
    return "?";
}

std::string Space::describe() const {
    struct V {
        std::string operator()(const FiniteSpace& f) const { return "finite(" + std::to_string(f.labels.size()) + ")"; }
        std::string operator()(const IntervalSpace& s) const {
            std::string out = "interval(";
            for (std::size_t i = 0; i < s.parts.size(); ++i) {
                if (i) out += ",";
                const auto& p = s.parts[i];
                out += p.lo == p.hi ? "{" + p.lo.str() + "}" : "[" + p.lo.str() + "," + p.hi.str() + "]";
            }
            return out + ")";
        }
        std::string operator()(const RealLine&) const { return "line"; }
        std::string operator()(const Hedgehog&) const { return "hedgehog"; }
        std::string operator()(const BaireSpace&) const { return "baire"; }
        std::string operator()(const UltraTable& u) const { return "ultratable(" + u.description + ")"; }
        std::string operator()(const Scaled& s) const { return "scaled(" + s.c.str() + "," + s.inner->describe() + ")"; }
        std::string operator()(const AmalgamSum& a) const {
            std::string out = "amalgam(";
            for (std::size_t i = 0; i < a.parts.size(); ++i) {
                if (i) out += ";";
                out += a.parts[i].inner->describe() + "@" + a.parts[i].anchor.str() + "+" + a.parts[i].bridge.str();
            }
            return out + ")";
        }
    };
    return std::visit(V{}, v);
}

SpacePtr finite_space(std::vector<std::string> labels, std::vector<std::vector<Rational>> dist) {
    if (dist.size() != labels.size()) throw SpaceError("finite space: matrix size does not match labels");
    for (const auto& row : dist)
        if (row.size() != labels.size()) throw SpaceError("finite space: matrix is not square");
    if (labels.empty()) throw SpaceError("finite space: no points");
    return std::make_shared<const Space>(Space{FiniteSpace{std::move(labels), std::move(dist)}});
}

SpacePtr interval_space(std::vector<Segment> parts) {
    if (parts.empty()) throw SpaceError("interval space: no parts");
    std::sort(parts.begin(), parts.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].hi < parts[i].lo) throw SpaceError("interval space: reversed part");
        if (i > 0 && !(parts[i - 1].hi < parts[i].lo)) throw SpaceError("interval space: parts overlap");
    }
    return std::make_shared<const Space>(Space{IntervalSpace{std::move(parts)}});
}

SpacePtr unit_interval() { return interval_space({Segment{Rational(0), Rational(1)}}); }
SpacePtr real_line() { return std::make_shared<const Space>(Space{RealLine{}}); }
SpacePtr hedgehog() { return std::make_shared<const Space>(Space{Hedgehog{}}); }
SpacePtr baire_space() { return std::make_shared<const Space>(Space{BaireSpace{}}); }

SpacePtr scaled(Rational c, SpacePtr inner) {
    if (c.sign() <= 0) throw SpaceError("scale factor must be positive");
    return std::make_shared<const Space>(Space{Scaled{std::move(c), std::move(inner)}});
}

SpacePtr amalgam(std::vector<AmalgamPart> parts) {
    if (parts.empty()) throw SpaceError("amalgam: no parts");
    for (const auto& p : parts) {
        auto f = p.inner->family();
        if (f != Family::Interval && f != Family::Line) throw SpaceError("amalgam parts must be interval spaces or the line");
        if (p.bridge.sign() < 0) throw SpaceError("amalgam bridge length must be non-negative");
        if (!contains(*p.inner, line_point(p.anchor))) throw SpaceError("amalgam anchor outside its part");
    }
    return std::make_shared<const Space>(Space{AmalgamSum{std::move(parts)}});
}

std::pair<const Space*, Rational> peel(const Space& s) {
    const Space* cur = &s;
    Rational c(1);
    while (auto* sc = std::get_if<Scaled>(&cur->v)) {
        c *= sc->c;
        cur = sc->inner.get();
    }
    return {cur, c};
}

bool is_compact(const Space& s) {
    switch (s.family()) {
        case Family::Finite:
        case Family::Interval: return true;
        case Family::Scaled: return is_compact(*std::get<Scaled>(s.v).inner);
        case Family::Amalgam: {
            for (const auto& p : std::get<AmalgamSum>(s.v).parts)
                if (!is_compact(*p.inner)) return false;
            return true;
        }
        default: return false;
    }
}

bool is_ultrametric(const Space& s) {
    auto [base, c] = peel(s);
    if (base->family() == Family::Baire || base->family() == Family::UltraTable) return true;
    if (auto* f = std::get_if<FiniteSpace>(&base->v)) {
        std::size_t n = f->labels.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (f->dist[i][k] > max(f->dist[i][j], f->dist[j][k])) return false;
        return true;
    }
    return false;
}

bool contains(const Space& s, const Point& x) {
    switch (s.family()) {
        case Family::Finite: {
            auto* i = std::get_if<std::size_t>(&x.v);
            return i && *i < std::get<FiniteSpace>(s.v).labels.size();
        }
        case Family::Interval: {
            auto* r = std::get_if<Rational>(&x.v);
            if (!r) return false;
            for (const auto& p : std::get<IntervalSpace>(s.v).parts)
                if (p.lo <= *r && *r <= p.hi) return true;
            return false;
        }
        case Family::Line: return std::holds_alternative<Rational>(x.v);
        case Family::Hedgehog: return std::holds_alternative<HedgePoint>(x.v);
        case Family::Baire: return std::holds_alternative<Branch>(x.v);
        case Family::UltraTable: {
            auto* b = std::get_if<Branch>(&x.v);
            return b && std::get<UltraTable>(s.v).index(*b).has_value();
        }
        case Family::Scaled: return contains(*std::get<Scaled>(s.v).inner, x);
        case Family::Amalgam: {
            auto* sp = std::get_if<SumPoint>(&x.v);
            const auto& parts = std::get<AmalgamSum>(s.v).parts;
            return sp && sp->part < parts.size() && contains(*parts[sp->part].inner, *sp->inner);
        }
    }
    return false;
}

namespace {

Rational baire_dist(const Branch& a, const Branch& b) {
    if (a == b) return Rational(0);
    std::size_t n = std::max(a.word.size(), b.word.size()) + 1;
    for (std::size_t i = 0; i < n; ++i)
        if (a.at(i) != b.at(i)) return Rational::pow2(-static_cast<long>(i) - 1);
    return Rational(0);
}

const Rational& as_rational(const Point& p) {
    auto* r = std::get_if<Rational>(&p.v);
    if (!r) throw SpaceError("expected a real coordinate, got " + p.str());
    return *r;
}

}  // namespace

Rational distance(const Space& s, const Point& a, const Point& b) {
    if (!contains(s, a) || !contains(s, b)) throw SpaceError("distance: point outside space");
    switch (s.family()) {
        case Family::Finite: return std::get<FiniteSpace>(s.v).dist[std::get<std::size_t>(a.v)][std::get<std::size_t>(b.v)];
        case Family::Interval:
        case Family::Line: return abs(as_rational(a) - as_rational(b));
        case Family::Hedgehog: {
            const auto& x = std::get<HedgePoint>(a.v);
            const auto& y = std::get<HedgePoint>(b.v);
            if (x.t == Rational(0) || y.t == Rational(0) || x.spine == y.spine) return abs(x.t - y.t);
            return x.t + y.t;
        }
        case Family::Baire:
        case Family::UltraTable: return baire_dist(std::get<Branch>(a.v), std::get<Branch>(b.v));
        case Family::Scaled: {
            const auto& sc = std::get<Scaled>(s.v);
            return sc.c * distance(*sc.inner, a, b);
        }
        case Family::Amalgam: {
            const auto& parts = std::get<AmalgamSum>(s.v).parts;
            const auto& x = std::get<SumPoint>(a.v);
            const auto& y = std::get<SumPoint>(b.v);
            if (x.part == y.part) return abs(as_rational(*x.inner) - as_rational(*y.inner));
            const auto& px = parts[x.part];
            const auto& py = parts[y.part];
            return abs(as_rational(*x.inner) - px.anchor) + px.bridge + py.bridge + abs(py.anchor - as_rational(*y.inner));
        }
    }
    throw SpaceError("distance: unsupported family");
}

// ---------------------------------------------------------------- homeomorphisms

Homeo identity_homeo() {
    Homeo h;
    h.name = "id";
    return h;
}

Homeo affine_homeo(Rational a, Rational b) {
    if (a.sign() == 0) throw SpaceError("affine map with zero slope");
    Homeo h;
    h.kind = HomeoKind::Affine;
    h.name = "affine(" + a.str() + "," + b.str() + ")";
    h.a = std::move(a);
    h.b = std::move(b);
    return h;
}

Homeo pl_homeo(std::vector<Rational> xs, std::vector<Rational> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw SpaceError("piecewise-linear map needs at least two knots");
    bool inc = ys[0] < ys[1];
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i - 1] < xs[i])) throw SpaceError("piecewise-linear knots must increase");
        if ((ys[i - 1] < ys[i]) != inc || ys[i - 1] == ys[i]) throw SpaceError("piecewise-linear map must be strictly monotone");
    }
    Homeo h;
    h.kind = HomeoKind::PiecewiseLinear;
    h.name = "pl(";
    for (std::size_t i = 0; i < xs.size(); ++i) h.name += (i ? ";" : "") + xs[i].str() + ":" + ys[i].str();
    h.name += ")";
    h.xs = std::move(xs);
    h.ys = std::move(ys);
    return h;
}

namespace {

// piecewise-linear interpolation through knots (u_i, v_i), u increasing, extended linearly
Rational interp(const std::vector<Rational>& u, const std::vector<Rational>& v, const Rational& x) {
    std::size_t k = 0;
    while (k + 2 < u.size() && x > u[k + 1]) ++k;
    return v[k] + (x - u[k]) * (v[k + 1] - v[k]) / (u[k + 1] - u[k]);
}

}  // namespace

bool Homeo::increasing() const {
    switch (kind) {
        case HomeoKind::Affine: return a.sign() > 0;
        case HomeoKind::PiecewiseLinear: return ys[0] < ys[1];
        default: return true;
    }
}

Rational Homeo::apply(const Rational& x) const {
    switch (kind) {
        case HomeoKind::Identity: return x;
        case HomeoKind::Affine: return a * x + b;
        case HomeoKind::PiecewiseLinear: return interp(xs, ys, x);
        case HomeoKind::Switch: break;
    }
    throw SpaceError("homeomorphism " + name + " does not act on reals");
}

Rational Homeo::invert(const Rational& y) const {
    switch (kind) {
        case HomeoKind::Identity: return y;
        case HomeoKind::Affine: return (y - b) / a;
        case HomeoKind::PiecewiseLinear: {
            if (increasing()) return interp(ys, xs, y);
            std::vector<Rational> ry(ys.rbegin(), ys.rend()), rx(xs.rbegin(), xs.rend());
            return interp(ry, rx, y);
        }
        case HomeoKind::Switch: break;
    }
    throw SpaceError("homeomorphism " + name + " does not act on reals");
}

Branch Homeo::apply(const Branch& x) const {
    if (kind == HomeoKind::Identity) return x;
    if (kind != HomeoKind::Switch) throw SpaceError("homeomorphism " + name + " does not act on branches");
    return fwd(x);
}

Branch Homeo::invert(const Branch& y) const {
    if (kind == HomeoKind::Identity) return y;
    if (kind != HomeoKind::Switch) throw SpaceError("homeomorphism " + name + " does not act on branches");
    return inv(y);
}

Point Homeo::apply(const Point& x) const {
    if (kind == HomeoKind::Identity) return x;
    if (auto* r = std::get_if<Rational>(&x.v)) return line_point(apply(*r));
    if (auto* b = std::get_if<Branch>(&x.v)) return branch_point(apply(*b));
    throw SpaceError("homeomorphism " + name + " does not act on " + x.str());
}

Point Homeo::invert(const Point& y) const {
    if (kind == HomeoKind::Identity) return y;
    if (auto* r = std::get_if<Rational>(&y.v)) return line_point(invert(*r));
    if (auto* b = std::get_if<Branch>(&y.v)) return branch_point(invert(*b));
    throw SpaceError("homeomorphism " + name + " does not act on " + y.str());
}

// ---------------------------------------------------------------- dense enumerations

std::string DenseSpec::str() const {
    switch (rule) {
        case DenseRule::Standard: return "standard";
        case DenseRule::ExcludePoint: return "exclude:" + (excluded ? excluded->str() : std::string("?"));
        case DenseRule::EventuallyOne: return "eventually-one";
        case DenseRule::Permuted: {
            std::string s = "permuted:";
            for (std::size_t i = 0; i < perm.size(); ++i) s += (i ? "," : "") + std::to_string(perm[i]);
            return s;
        }
    }
    return "?";
}

Presentation make_presentation(SpacePtr space, Schedule schedule, DenseSpec dense) {
    Presentation p;
    p.space = std::move(space);
    p.schedule = schedule;
    p.dense = std::move(dense);
    return p;
}

namespace {

// Standard enumeration of a (non-scaled view of a) space.
std::optional<Point> base_point(const Space& s, u64 i, u64 tail) {
    switch (s.family()) {
        case Family::Finite: {
            const auto& f = std::get<FiniteSpace>(s.v);
            if (i >= f.labels.size()) return std::nullopt;
            return finite_point(static_cast<std::size_t>(i));
        }
        case Family::Interval: {
            const auto& parts = std::get<IntervalSpace>(s.v).parts;
            std::vector<const Segment*> iso, fat;
            for (const auto& p : parts) (p.lo == p.hi ? iso : fat).push_back(&p);
            if (i < iso.size()) return line_point(iso[i]->lo);
            if (fat.empty()) return std::nullopt;
            u64 j = i - iso.size();
            const Segment& seg = *fat[j % fat.size()];
            return line_point(seg.lo + en::unit_rational(j / fat.size()) * (seg.hi - seg.lo));
        }
        case Family::Line: return line_point(en::line_rational(i));
        case Family::Hedgehog: {
            if (i == 0) return hedge_point(0, Rational(0));
            auto [s_, j] = en::unpair(i - 1);
            return hedge_point(s_, en::unit_rational(j + 1));
        }
        case Family::Baire: return branch_point(Branch::make(en::word(i, tail), tail));
        case Family::UltraTable: {
            auto b = std::get<UltraTable>(s.v).point(i);
            if (!b) return std::nullopt;
            return branch_point(*b);
        }
        case Family::Scaled: return base_point(*std::get<Scaled>(s.v).inner, i, tail);
        case Family::Amalgam: {
            const auto& parts = std::get<AmalgamSum>(s.v).parts;
            auto inner = base_point(*parts[i % parts.size()].inner, i / parts.size(), 0);
            if (!inner) return std::nullopt;
            return sum_point(static_cast<std::uint32_t>(i % parts.size()), *inner);
        }
    }
    return std::nullopt;
}

std::optional<u64> base_index(const Space& s, const Point& x, u64 tail) {
    if (!contains(s, x)) return std::nullopt;
    switch (s.family()) {
        case Family::Finite: return std::get<std::size_t>(x.v);
        case Family::Interval: {
            const auto& parts = std::get<IntervalSpace>(s.v).parts;
            const Rational& r = std::get<Rational>(x.v);
            std::vector<const Segment*> iso, fat;
            for (const auto& p : parts) (p.lo == p.hi ? iso : fat).push_back(&p);
            for (std::size_t k = 0; k < iso.size(); ++k)
                if (iso[k]->lo == r) return k;
            for (std::size_t k = 0; k < fat.size(); ++k) {
                if (r < fat[k]->lo || r > fat[k]->hi) continue;
                auto local = en::unit_index((r - fat[k]->lo) / (fat[k]->hi - fat[k]->lo));
                if (!local) return std::nullopt;
                return iso.size() + *local * fat.size() + k;
            }
            return std::nullopt;
        }
        case Family::Line: return en::line_index(std::get<Rational>(x.v));
        case Family::Hedgehog: {
            const auto& h = std::get<HedgePoint>(x.v);
            if (h.t == Rational(0)) return 0;
            auto j = en::unit_index(h.t);
            return en::pair(h.spine, *j - 1) + 1;
        }
        case Family::Baire: {
            const auto& b = std::get<Branch>(x.v);
            if (b.tail != tail) return std::nullopt;
            return en::word_index(b.word, tail);
        }
        case Family::UltraTable: return std::get<UltraTable>(s.v).index(std::get<Branch>(x.v));
        case Family::Scaled: return base_index(*std::get<Scaled>(s.v).inner, x, tail);
        case Family::Amalgam: {
            const auto& parts = std::get<AmalgamSum>(s.v).parts;
            const auto& sp = std::get<SumPoint>(x.v);
            auto inner = base_index(*parts[sp.part].inner, *sp.inner, 0);
            if (!inner) return std::nullopt;
            return *inner * parts.size() + sp.part;
        }
    }
    return std::nullopt;
}

u64 tail_of(const Presentation& p) { return p.dense.rule == DenseRule::EventuallyOne ? 1 : 0; }

// point of the untransported presentation
Point raw_dense_point(const Presentation& p, u64 i) {
    const Space& s = *p.space;
    switch (p.dense.rule) {
        case DenseRule::Permuted: {
            if (i >= p.dense.perm.size()) throw SpaceError("dense index out of range");
            return finite_point(p.dense.perm[i]);
        }
        case DenseRule::ExcludePoint: {
            auto skip = base_index(s, *p.dense.excluded, 0);
            if (skip && i >= *skip) ++i;
            break;
        }
        default: break;
    }
    auto pt = base_point(s, i, tail_of(p));
    if (!pt) throw SpaceError("dense index " + std::to_string(i) + " out of range");
    return *pt;
}

std::optional<u64> raw_dense_index(const Presentation& p, const Point& x) {
    const Space& s = *p.space;
    if (p.dense.rule == DenseRule::Permuted) {
        auto* i = std::get_if<std::size_t>(&x.v);
        if (!i) return std::nullopt;
        for (std::size_t k = 0; k < p.dense.perm.size(); ++k)
            if (p.dense.perm[k] == *i) return k;
        return std::nullopt;
    }
    auto idx = base_index(s, x, tail_of(p));
    if (!idx) return std::nullopt;
    if (p.dense.rule == DenseRule::ExcludePoint) {
        auto skip = base_index(s, *p.dense.excluded, 0);
        if (skip) {
            if (*idx == *skip) return std::nullopt;
            if (*idx > *skip) --*idx;
        }
    }
    return idx;
}

}  // namespace

Point dense_point(const Presentation& p, u64 i) {
    Point x = raw_dense_point(p, i);
    return p.transport ? p.transport->invert(x) : x;
}

std::optional<u64> dense_index(const Presentation& p, const Point& y) {
    if (!contains(*p.space, y)) return std::nullopt;
    return raw_dense_index(p, p.transport ? p.transport->apply(y) : y);
}

Rational dist(const Presentation& p, u64 i, u64 j) {
    // d_f(y_i, y_j) = d(f y_i, f y_j) = d(x_i, x_j)
    return distance(*p.space, raw_dense_point(p, i), raw_dense_point(p, j));
}

Rational radius(const Presentation& p, std::uint32_t level) { return schedule_radius(p.schedule, level); }

// ---------------------------------------------------------------- segments

Seg Seg::make(Rational lo, Rational hi, bool lo_closed, bool hi_closed) {
    Seg s;
    s.empty = false;
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    s.lo_closed = lo_closed;
    s.hi_closed = hi_closed;
    return seg_normalize(std::move(s));
}

Seg Seg::all() {
    Seg s;
    s.empty = false;
    s.lo_inf = s.hi_inf = true;
    return s;
}

Seg seg_normalize(Seg s) {
    if (s.empty || s.lo_inf || s.hi_inf) return s;
    if (s.hi < s.lo || (s.lo == s.hi && !(s.lo_closed && s.hi_closed))) return Seg::none();
    return s;
}

bool Seg::contains(const Rational& x) const {
    if (empty) return false;
    if (!lo_inf && (x < lo || (x == lo && !lo_closed))) return false;
    if (!hi_inf && (x > hi || (x == hi && !hi_closed))) return false;
    return true;
}

std::string Seg::str() const {
    if (empty) return "{}";
    std::string l = lo_inf ? "(-inf" : std::string(lo_closed ? "[" : "(") + lo.str();
    std::string r = hi_inf ? "inf)" : hi.str() + (hi_closed ? "]" : ")");
    return l + "," + r;
}

Seg seg_intersect(const Seg& a, const Seg& b) {
    if (a.empty || b.empty) return Seg::none();
    Seg s;
    s.empty = false;
    if (a.lo_inf) { s.lo_inf = b.lo_inf; s.lo = b.lo; s.lo_closed = b.lo_closed; }
    else if (b.lo_inf) { s.lo = a.lo; s.lo_closed = a.lo_closed; }
    else if (a.lo > b.lo) { s.lo = a.lo; s.lo_closed = a.lo_closed; }
    else if (b.lo > a.lo) { s.lo = b.lo; s.lo_closed = b.lo_closed; }
    else { s.lo = a.lo; s.lo_closed = a.lo_closed && b.lo_closed; }
    if (a.hi_inf) { s.hi_inf = b.hi_inf; s.hi = b.hi; s.hi_closed = b.hi_closed; }
    else if (b.hi_inf) { s.hi = a.hi; s.hi_closed = a.hi_closed; }
    else if (a.hi < b.hi) { s.hi = a.hi; s.hi_closed = a.hi_closed; }
    else if (b.hi < a.hi) { s.hi = b.hi; s.hi_closed = b.hi_closed; }
    else { s.hi = a.hi; s.hi_closed = a.hi_closed && b.hi_closed; }
    return seg_normalize(std::move(s));
}

bool seg_subset(const Seg& a, const Seg& b) {
    if (a.empty) return true;
    if (b.empty) return false;
    if (!b.lo_inf) {
        if (a.lo_inf || a.lo < b.lo) return false;
        if (a.lo == b.lo && a.lo_closed && !b.lo_closed) return false;
    }
    if (!b.hi_inf) {
        if (a.hi_inf || a.hi > b.hi) return false;
        if (a.hi == b.hi && a.hi_closed && !b.hi_closed) return false;
    }
    return true;
}

bool seg_disjoint(const Seg& a, const Seg& b) { return seg_intersect(a, b).empty; }

// ---------------------------------------------------------------- ball extents

namespace {

struct GroupInfo {
    Rational anchor, bridge;
};

std::vector<GroupInfo> line_groups(const Space& base) {
    if (auto* a = std::get_if<AmalgamSum>(&base.v)) {
        std::vector<GroupInfo> g;
        for (const auto& p : a->parts) g.push_back({p.anchor, p.bridge});
        return g;
    }
    return {GroupInfo{Rational(0), Rational(0)}};
}

void push_slots(const Space& s, std::uint32_t group, std::vector<Slot>& out) {
    if (auto* iv = std::get_if<IntervalSpace>(&s.v)) {
        for (const auto& p : iv->parts) out.push_back(Slot{group, Seg::make(p.lo, p.hi, true, true)});
    } else if (std::holds_alternative<RealLine>(s.v)) {
        out.push_back(Slot{group, Seg::all()});
    } else {
        throw SpaceError("not a line-like space: " + s.describe());
    }
}

// ball of radius r around x on the same axis
Seg around(const Rational& x, const Rational& r, bool closed) { return Seg::make(x - r, x + r, closed, closed); }

Seg transport_back(const Seg& s, const Homeo* f) {
    if (!f || s.empty) return s;
    if (s.lo_inf || s.hi_inf) throw SpaceError("transport of unbounded segment");
    Rational a = f->invert(s.lo), b = f->invert(s.hi);
    if (f->increasing()) return Seg::make(a, b, s.lo_closed, s.hi_closed);
    return Seg::make(b, a, s.hi_closed, s.lo_closed);
}

std::size_t cyl_length(const Rational& r, bool closed) {
    std::size_t L = 0;
    // least L with 2^{-L-1} < r (open) or <= r (closed)
    while (true) {
        Rational v = Rational::pow2(-static_cast<long>(L) - 1);
        if (closed ? v <= r : v < r) return L;
        ++L;
    }
}

}  // namespace

std::vector<Slot> line_slots(const Space& s) {
    auto [base, c] = peel(s);
    std::vector<Slot> out;
    if (auto* a = std::get_if<AmalgamSum>(&base->v)) {
        for (std::uint32_t g = 0; g < a->parts.size(); ++g) push_slots(*a->parts[g].inner, g, out);
    } else {
        push_slots(*base, 0, out);
    }
    return out;
}

BallShape ball_shape(const Presentation& p, const Point& center, std::uint32_t level) {
    auto [base, c] = peel(*p.space);
    Rational r = schedule_radius(p.schedule, level) / c;
    BallShape sh;
    sh.level = level;
    const Homeo* f = p.transport ? &*p.transport : nullptr;
    switch (base->family()) {
        case Family::Finite: {
            if (f) throw SpaceError("transport not supported on finite spaces");
            sh.kind = BallShape::Finite;
            const auto& fs = std::get<FiniteSpace>(base->v);
            std::size_t ci = std::get<std::size_t>(center.v);
            for (std::size_t q = 0; q < fs.labels.size(); ++q) {
                sh.f_open.push_back(fs.dist[ci][q] < r);
                sh.f_closed.push_back(fs.dist[ci][q] <= r);
            }
            return sh;
        }
        case Family::Interval:
        case Family::Line:
        case Family::Amalgam: {
            sh.kind = BallShape::Line;
            auto slots = line_slots(*base);
            auto groups = line_groups(*base);
            std::uint32_t g = 0;
            Rational x;
            if (auto* sp = std::get_if<SumPoint>(&center.v)) {
                g = sp->part;
                x = as_rational(*sp->inner);
            } else {
                x = as_rational(center);
            }
            if (f) {
                if (base->family() == Family::Amalgam) throw SpaceError("transport not supported on amalgams");
                x = f->apply(x);
            }
            for (const auto& sl : slots) {
                Seg o, cl;
                if (sl.group == g) {
                    o = around(x, r, false);
                    cl = around(x, r, true);
                } else {
                    Rational rho = r - abs(x - groups[g].anchor) - groups[g].bridge - groups[sl.group].bridge;
                    o = rho.sign() > 0 ? around(groups[sl.group].anchor, rho, false) : Seg::none();
                    cl = rho.sign() >= 0 ? around(groups[sl.group].anchor, rho, true) : Seg::none();
                }
                sh.l_open.push_back(seg_intersect(transport_back(o, f), sl.comp));
                sh.l_closed.push_back(seg_intersect(transport_back(cl, f), sl.comp));
            }
            return sh;
        }
        case Family::Hedgehog: {
            if (f) throw SpaceError("transport not supported on the hedgehog");
            sh.kind = BallShape::Hedge;
            const auto& h = std::get<HedgePoint>(center.v);
            sh.on_hub = h.t == Rational(0);
            sh.spine = h.spine;
            Seg spine = Seg::make(Rational(0), Rational(1), false, true);
            Rational rho = r - h.t;
            sh.h_own_open = seg_intersect(around(h.t, r, false), spine);
            sh.h_own_closed = seg_intersect(around(h.t, r, true), spine);
            sh.h_other_open = rho.sign() > 0 ? seg_intersect(around(Rational(0), rho, false), spine) : Seg::none();
            sh.h_other_closed = rho.sign() >= 0 ? seg_intersect(around(Rational(0), rho, true), spine) : Seg::none();
            sh.hub_open = h.t < r;
            sh.hub_closed = h.t <= r;
            if (sh.on_hub) {
                sh.h_own_open = sh.h_other_open;
                sh.h_own_closed = sh.h_other_closed;
            }
            return sh;
        }
        case Family::Baire:
        case Family::UltraTable: {
            sh.kind = BallShape::Cylinder;
            // codes of P_f are the cylinders of P around x_i = f(y_i)
            sh.center = f ? f->apply(std::get<Branch>(center.v)) : std::get<Branch>(center.v);
            sh.transport = f;
            sh.cyl_open = cyl_length(r, false);
            sh.cyl_closed = cyl_length(r, true);
            if (auto* t = std::get_if<UltraTable>(&base->v)) sh.table = t;
            return sh;
        }
        case Family::Scaled: break;
    }
    throw SpaceError("ball_shape: unsupported family");
}

BallShape ball_shape(const Presentation& p, const BallId& n) { return ball_shape(p, dense_point(p, n.center), n.level); }

namespace {

const Seg& hedge_open(const BallShape& s, u64 spine) {
    return (!s.on_hub && s.spine == spine) ? s.h_own_open : s.h_other_open;
}
const Seg& hedge_closed(const BallShape& s, u64 spine) {
    return (!s.on_hub && s.spine == spine) ? s.h_own_closed : s.h_other_closed;
}

std::vector<u64> hedge_probe_spines(const BallShape& a, const BallShape& b) {
    std::vector<u64> sp;
    if (!a.on_hub) sp.push_back(a.spine);
    if (!b.on_hub) sp.push_back(b.spine);
    u64 other = 0;
    while (std::find(sp.begin(), sp.end(), other) != sp.end()) ++other;
    sp.push_back(other);
    return sp;
}

bool prefix_eq(const Branch& a, const Branch& b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a.at(i) != b.at(i)) return false;
    return true;
}

}  // namespace

bool shape_below(const BallShape& n, const BallShape& m) {
    if (!(n.level < m.level)) return false;
    switch (n.kind) {
        case BallShape::Finite:
            for (std::size_t q = 0; q < n.f_open.size(); ++q)
                if (m.f_closed[q] && !n.f_open[q]) return false;
            return true;
        case BallShape::Line:
            for (std::size_t k = 0; k < n.l_open.size(); ++k)
                if (!seg_subset(m.l_closed[k], n.l_open[k])) return false;
            return true;
        case BallShape::Hedge:
            if (m.hub_closed && !n.hub_open) return false;
            for (u64 s : hedge_probe_spines(n, m))
                if (!seg_subset(hedge_closed(m, s), hedge_open(n, s))) return false;
            return true;
        case BallShape::Cylinder: {
            std::size_t L = n.cyl_open;
            if (m.cyl_closed >= L) return prefix_eq(m.center, n.center, L);
            if (!m.table) return false;
            auto w = m.table->forced(m.center.prefix(m.cyl_closed), L);
            return w.size() >= L && prefix_eq(m.center, n.center, L);
        }
    }
    return false;
}

bool shape_apart(const BallShape& a, const BallShape& b) {
    switch (a.kind) {
        case BallShape::Finite:
            for (std::size_t q = 0; q < a.f_closed.size(); ++q)
                if (a.f_closed[q] && b.f_closed[q]) return false;
            return true;
        case BallShape::Line:
            for (std::size_t k = 0; k < a.l_closed.size(); ++k)
                if (!seg_disjoint(a.l_closed[k], b.l_closed[k])) return false;
            return true;
        case BallShape::Hedge:
            if (a.hub_closed && b.hub_closed) return false;
            for (u64 s : hedge_probe_spines(a, b))
                if (!seg_disjoint(hedge_closed(a, s), hedge_closed(b, s))) return false;
            return true;
        case BallShape::Cylinder: {
            std::size_t L = std::min(a.cyl_closed, b.cyl_closed);
            return !prefix_eq(a.center, b.center, L);
        }
    }
    return false;
}

bool ball_strictly_below(const Presentation& p, const BallId& n, const BallId& m) {
    if (!(n.level < m.level)) return false;
    return shape_below(ball_shape(p, n), ball_shape(p, m));
}

bool ball_apart(const Presentation& p, const BallId& a, const BallId& b) {
    return shape_apart(ball_shape(p, a), ball_shape(p, b));
}

bool triangle_below(const Presentation& p, const BallId& n, const BallId& m) {
    if (!(n.level < m.level)) return false;
    auto [base, c] = peel(*p.space);
    (void)base;
    return dist(p, n.center, m.center) + radius(p, m.level) < radius(p, n.level);
}

// ---------------------------------------------------------------- validation

std::string ValidationReport::str() const {
    std::ostringstream os;
    os << (ok ? "valid" : "invalid") << "; whole-space ball: " << (whole_space_ball ? "yes" : "no");
    for (const auto& i : issues) os << "\n  issue: " << i;
    for (const auto& n : notes) os << "\n  note: " << n;
    return os.str();
}

namespace {

// Does some point of the space have an open ball of radius r covering everything?
bool whole_ball(const Space& s, const Rational& r) {
    auto [base, c] = peel(s);
    Rational R = r / c;
    switch (base->family()) {
        case Family::Finite: {
            const auto& f = std::get<FiniteSpace>(base->v);
            for (std::size_t i = 0; i < f.labels.size(); ++i) {
                bool all = true;
                for (std::size_t j = 0; j < f.labels.size() && all; ++j) all = f.dist[i][j] < R;
                if (all) return true;
            }
            return false;
        }
        case Family::Interval: {
            const auto& parts = std::get<IntervalSpace>(base->v).parts;
            Rational lo = parts.front().lo, hi = parts.back().hi;
            Rational mid = (lo + hi) / Rational(2);
            // best centre: the point of the space nearest the midpoint
            Rational best = parts.front().lo;
            for (const auto& p : parts) {
                Rational cand = mid < p.lo ? p.lo : (mid > p.hi ? p.hi : mid);
                if (abs(cand - mid) < abs(best - mid)) best = cand;
            }
            return max(best - lo, hi - best) < R;
        }
        case Family::Baire: return Rational(1, 2) < R;
        case Family::UltraTable: return Rational(1, 2) < R;
        case Family::Hedgehog: return Rational(1) < R;
        default: return false;
    }
}

}  // namespace

ValidationReport validate_presentation(const Presentation& p, std::size_t sample) {
    ValidationReport rep;
    const Space& s = *p.space;
    auto [base, c] = peel(s);
    if (auto* f = std::get_if<FiniteSpace>(&base->v)) {
        std::size_t n = f->labels.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const Rational& d = f->dist[i][j];
                if (i == j && d.sign() != 0) rep.issues.push_back("nonzero self-distance at " + std::to_string(i));
                if (i != j && d.sign() <= 0)
                    rep.issues.push_back("non-positive distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                if (i < j && !(d == f->dist[j][i]))
                    rep.issues.push_back("symmetry violated at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                for (std::size_t k = 0; k < n; ++k)
                    if (f->dist[i][k] > d + f->dist[j][k])
                        rep.issues.push_back("triangle violated at (" + std::to_string(i) + "," + std::to_string(j) +
                                             "," + std::to_string(k) + ")");
            }
    }
    if (rep.issues.empty()) {
        // metric axioms on a generator sample of dense points
        std::vector<u64> idx;
        for (u64 i = 0; i < sample; ++i) {
            try {
                dense_point(p, i);
                idx.push_back(i);
            } catch (const SpaceError&) {
                break;
            }
        }
        for (u64 i : idx)
            for (u64 j : idx) {
                Rational d = dist(p, i, j);
                if ((i == j) != (d.sign() == 0))
                    rep.issues.push_back("identity of indiscernibles fails at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                if (!(d == dist(p, j, i)))
                    rep.issues.push_back("symmetry violated at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                for (u64 k : idx)
                    if (dist(p, i, k) > d + dist(p, j, k))
                        rep.issues.push_back("triangle violated at (" + std::to_string(i) + "," + std::to_string(j) + "," +
                                             std::to_string(k) + ")");
            }
    }
    for (std::uint32_t k = 0; k < 8; ++k)
        if (!(schedule_radius(p.schedule, k + 1) < schedule_radius(p.schedule, k)))
            rep.issues.push_back("schedule not decreasing at level " + std::to_string(k));
    if (p.dense.rule == DenseRule::Permuted) {
        auto* f = std::get_if<FiniteSpace>(&base->v);
        std::vector<std::size_t> sorted = p.dense.perm;
        std::sort(sorted.begin(), sorted.end());
        bool ok = f && sorted.size() == f->labels.size();
        for (std::size_t i = 0; ok && i < sorted.size(); ++i) ok = sorted[i] == i;
        if (!ok) rep.issues.push_back("permuted enumeration is not a permutation of the points");
    }
    rep.notes.push_back("density: by construction (" + family_name(base->family()) + ", " + p.dense.str() + ")");
    if (p.schedule == Schedule::AlignedUltra && !is_ultrametric(s))
        rep.notes.push_back("aligned schedule is intended for ultrametric spaces");
    rep.whole_space_ball = whole_ball(s, schedule_radius(p.schedule, 0));
    rep.ok = rep.issues.empty();
    return rep;
}

// ---------------------------------------------------------------- derived presentations

Presentation pushforward_presentation(const Presentation& p, const Homeo& f) {
    if (p.transport) throw SpaceError("presentation is already a pushforward");
    auto [base, c] = peel(*p.space);
    Family fam = base->family();
    switch (f.kind) {
        case HomeoKind::Identity: break;
        case HomeoKind::Switch:
            if (fam != Family::Baire) throw SpaceError("switch maps act on the Baire space only");
            break;
        case HomeoKind::Affine:
        case HomeoKind::PiecewiseLinear: {
            if (fam == Family::Line) {
                if (f.kind == HomeoKind::PiecewiseLinear) throw SpaceError("piecewise-linear maps need a compact interval");
                break;
            }
            if (fam != Family::Interval) throw SpaceError("affine maps act on interval families only");
            const auto& parts = std::get<IntervalSpace>(base->v).parts;
            // f must permute the parts
            for (const auto& part : parts) {
                Rational a = f.apply(part.lo), b = f.apply(part.hi);
                if (b < a) std::swap(a, b);
                bool found = false;
                for (const auto& q : parts) found = found || (q.lo == a && q.hi == b);
                if (!found) throw SpaceError("map " + f.name + " does not preserve the interval space");
            }
            if (f.kind == HomeoKind::PiecewiseLinear && (f.xs.front() > parts.front().lo || f.xs.back() < parts.back().hi))
                throw SpaceError("piecewise-linear knots do not cover the space");
            break;
        }
    }
    Presentation q = p;
    if (f.kind != HomeoKind::Identity) q.transport = f;
    q.name = p.name.empty() ? "" : p.name + "_" + f.name;
    return q;
}

Presentation dense_swap(const Presentation& p, const DenseSpec& rule) {
    auto [base, c] = peel(*p.space);
    Family fam = base->family();
    switch (rule.rule) {
        case DenseRule::Standard: break;
        case DenseRule::EventuallyOne:
            if (fam != Family::Baire) throw SpaceError("eventually-one enumeration is for the Baire space");
            break;
        case DenseRule::Permuted:
            if (fam != Family::Finite) throw SpaceError("permuted enumeration is for finite spaces");
            break;
        case DenseRule::ExcludePoint: {
            if (!rule.excluded) throw SpaceError("excluded point missing");
            if (fam != Family::Interval && fam != Family::Line && fam != Family::Hedgehog)
                throw SpaceError("point exclusion is supported on interval, line and hedgehog spaces");
            if (!contains(*base, *rule.excluded)) throw SpaceError("excluded point not in space");
            if (auto* iv = std::get_if<IntervalSpace>(&base->v)) {
                const Rational& x = std::get<Rational>(rule.excluded->v);
                for (const auto& part : iv->parts)
                    if (part.lo == part.hi && part.lo == x) throw SpaceError("cannot exclude an isolated point");
            }
            break;
        }
    }
    Presentation q = p;
    q.dense = rule;
    return q;
}

}  // namespace cbr
