#include "cbr/sets.hpp"

#include <algorithm>
#include <sstream>

namespace cbr {

// ---------------------------------------------------------------- text

std::string ClosedSetSpec::str() const {
    struct V {
        std::string operator()(const EmptySet&) const { return "Empty"; }
        std::string operator()(const FinitePoints& f) const {
            std::string s = "FinitePoints{";
            for (std::size_t i = 0; i < f.points.size(); ++i) s += (i ? "," : "") + f.points[i].str();
            return s + "}";
        }
        std::string operator()(const ConvergentPackage& c) const {
            std::string s = "ConvergentPackage{";
            bool first = true;
            for (const auto& p : c.points) {
                s += (first ? "" : ",") + p.str();
                first = false;
            }
            for (const auto& q : c.seqs) {
                s += (first ? "" : ",") + q.a.str() + "+" + q.c.str() + "*2^-n";
                first = false;
            }
            return s + "}";
        }
        std::string operator()(const OrdinalEmbedding& e) const {
            std::string s = "OrdinalEmbedding(" + ord_format(e.alpha) + "," + std::to_string(e.m);
            if (e.d) s += ",d=" + std::to_string(e.d);
            if (!(e.scale == Rational(1)) || !(e.shift == Rational(0))) s += ",x->" + e.shift.str() + "+" + e.scale.str() + "x";
            return s + ")";
        }
        std::string operator()(const BranchFamily& b) const { return "BranchFamily(" + term_str(b.term) + ")"; }
        std::string operator()(const SwitchImage& s) const {
            return "SwitchImage(" + ord_format(s.alpha) + "," + term_str(s.base) + ")";
        }
    };
    return std::visit(V{}, v);
}

// ---------------------------------------------------------------- constructors

ClosedSetSpec empty_set() { return {EmptySet{}}; }

ClosedSetSpec finite_points(std::vector<Point> pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (pts[i] == pts[j]) throw SetError("repeated point " + pts[i].str());
    if (pts.empty()) return empty_set();
    return {FinitePoints{std::move(pts)}};
}

ClosedSetSpec convergent_package(std::vector<Rational> pts, std::vector<GeoSeq> seqs) {
    for (const auto& q : seqs)
        if (q.c.sign() == 0) throw SetError("convergent sequence with zero step");
    if (pts.empty() && seqs.empty()) return empty_set();
    return {ConvergentPackage{std::move(pts), std::move(seqs)}};
}

ClosedSetSpec ordinal_embedding(u64 alpha, u64 m) {
    if (m == 0) throw SetError("ordinal embedding needs at least one copy");
    if (alpha > 8) throw SetError("ordinal embedding supports finite α <= 8");
    return {OrdinalEmbedding{Ordinal(alpha), m, 0, Rational(1), Rational(0)}};
}

ClosedSetSpec branch_family(Term t) {
    if (term_empty(t)) return empty_set();
    return {BranchFamily{std::move(t)}};
}

namespace {

std::optional<SymbolPred> base_pred(const Term& t) {
    if (t->kind == BranchTermNode::Base) return pred_all();
    if (t->kind == BranchTermNode::BaseWhere) return t->pred;
    return std::nullopt;
}

}  // namespace

ClosedSetSpec switch_image(const Ordinal& alpha, Term base, const Ordinal& cap) {
    auto pair = switch_pair(alpha, cap);
    auto A = base_pred(base);
    if (!A) throw SetError("switch images are computed for Base and BaseWhere terms");
    Term img = switch_image_term(pair, *A);
    return {SwitchImage{alpha, std::move(base), std::move(img)}};
}

bool set_is_empty(const ClosedSetSpec& F) {
    if (auto* b = std::get_if<BranchFamily>(&F.v)) return term_empty(b->term);
    if (auto* s = std::get_if<SwitchImage>(&F.v)) return term_empty(s->image);
    if (auto* e = std::get_if<OrdinalEmbedding>(&F.v)) return Ordinal(e->d) > e->alpha;
    return std::holds_alternative<EmptySet>(F.v);
}

bool is_branch_set(const ClosedSetSpec& F) {
    if (std::holds_alternative<BranchFamily>(F.v) || std::holds_alternative<SwitchImage>(F.v)) return true;
    if (auto* f = std::get_if<FinitePoints>(&F.v))
        return std::all_of(f->points.begin(), f->points.end(), [](const Point& p) { return std::holds_alternative<Branch>(p.v); });
    return false;
}

// ---------------------------------------------------------------- geometry helpers

Seg seg_affine_preimage(const Seg& seg, const Rational& scale, const Rational& shift) {
    if (seg.empty) return seg;
    Seg out;
    out.empty = false;
    auto tr = [&](const Rational& x) { return (x - shift) / scale; };
    if (scale.sign() > 0) {
        out.lo_inf = seg.lo_inf;
        out.hi_inf = seg.hi_inf;
        if (!seg.lo_inf) { out.lo = tr(seg.lo); out.lo_closed = seg.lo_closed; }
        if (!seg.hi_inf) { out.hi = tr(seg.hi); out.hi_closed = seg.hi_closed; }
    } else {
        out.lo_inf = seg.hi_inf;
        out.hi_inf = seg.lo_inf;
        if (!seg.hi_inf) { out.lo = tr(seg.hi); out.lo_closed = seg.hi_closed; }
        if (!seg.lo_inf) { out.hi = tr(seg.lo); out.hi_closed = seg.lo_closed; }
    }
    return seg_normalize(std::move(out));
}

bool pow2_hits(const Seg& seg) {
    Seg s = seg_intersect(seg, Seg::make(Rational(0), Rational(1), false, true));
    if (s.empty) return false;
    if (s.contains(Rational(1))) return true;
    // s ⊆ (0,1): lower end at 0 means arbitrarily small powers fit
    if (s.lo.sign() == 0) return true;
    Rational q = Rational::pow2(floor_log2(s.hi));
    if (q == s.hi && !s.hi_closed) q = q / Rational(2);
    return s.contains(q);
}

namespace {

// sup M(β)
Rational model_sup(u64 beta) {
    Rational s(0);
    for (u64 k = 0; k < beta; ++k) s = Rational(1, 2) + s / Rational(4);
    return s;
}

}  // namespace

bool model_hits(u64 alpha, u64 d, const Seg& seg) {
    if (d > alpha || seg.empty) return false;
    if (seg.contains(Rational(0))) return true;
    if (alpha == d) return false;
    if (!seg.hi_inf && (seg.hi.sign() < 0 || (seg.hi.sign() == 0))) return false;
    // seg reaches right of 0
    if (seg.lo_inf || seg.lo.sign() <= 0) return true;
    Rational top_factor = model_sup(alpha - 1);
    for (long n = 0;; ++n) {
        Rational a = Rational::pow2(-n - 1);
        Rational w = Rational::pow2(-n - 2);
        Rational top = a + w * top_factor;
        if (top < seg.lo) return false;
        Seg hull = Seg::make(a, top, true, true);
        if (!seg_disjoint(hull, seg) && model_hits(alpha - 1, d, seg_affine_preimage(seg, w, a))) return true;
    }
}

namespace {

bool embedding_hits(const OrdinalEmbedding& e, const Seg& seg) {
    u64 alpha = e.alpha.finite_value();
    Seg s = seg_affine_preimage(seg, e.scale, e.shift);
    Rational m(static_cast<long>(e.m));
    for (u64 i = 0; i < e.m; ++i) {
        Rational off = Rational(static_cast<long>(i)) / m;
        Rational w = Rational(1) / (Rational(2) * m);
        if (model_hits(alpha, e.d, seg_affine_preimage(s, w, off))) return true;
    }
    return false;
}

bool package_hits(const ConvergentPackage& c, const Seg& seg) {
    for (const auto& p : c.points)
        if (seg.contains(p)) return true;
    for (const auto& q : c.seqs) {
        if (seg.contains(q.a)) return true;
        if (pow2_hits(seg_affine_preimage(seg, q.c, q.a))) return true;
    }
    return false;
}

const Seg& hedge_seg(const BallShape& b, u64 spine, bool closed) {
    bool own = !b.on_hub && b.spine == spine;
    if (closed) return own ? b.h_own_closed : b.h_other_closed;
    return own ? b.h_own_open : b.h_other_open;
}


bool line_hits(const BallShape& b, bool closed, const std::function<bool(const Seg&)>& hits) {
    if (b.kind != BallShape::Line) throw SetError("set needs a line-like space");
    const auto& segs = closed ? b.l_closed : b.l_open;
    // sets of this kind live in group 0
    for (const auto& s : segs)
        if (hits(s)) return true;
    return false;
}

}  // namespace

bool point_in_shape(const Point& x, const BallShape& b, bool closed, const std::vector<Slot>* slots) {
    switch (b.kind) {
        case BallShape::Finite: {
            std::size_t i = std::get<std::size_t>(x.v);
            return closed ? b.f_closed[i] : b.f_open[i];
        }
        case BallShape::Line: {
            std::uint32_t g = 0;
            const Rational* r = std::get_if<Rational>(&x.v);
            if (auto* sp = std::get_if<SumPoint>(&x.v)) {
                g = sp->part;
                r = std::get_if<Rational>(&sp->inner->v);
            }
            if (!r) throw SetError("point " + x.str() + " is not on a line");
            const auto& segs = closed ? b.l_closed : b.l_open;
            for (std::size_t k = 0; k < segs.size(); ++k)
                if ((!slots || (*slots)[k].group == g) && segs[k].contains(*r)) return true;
            return false;
        }
        case BallShape::Hedge: {
            const auto& h = std::get<HedgePoint>(x.v);
            if (h.t.sign() == 0) return closed ? b.hub_closed : b.hub_open;
            return hedge_seg(b, h.spine, closed).contains(h.t);
        }
        case BallShape::Cylinder: {
            const auto& br = std::get<Branch>(x.v);
            std::size_t L = closed ? b.cyl_closed : b.cyl_open;
            for (std::size_t i = 0; i < L; ++i)
                if (br.at(i) != b.center.at(i)) return false;
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------- ambient checks

void check_ambient(const ClosedSetSpec& F, const Space& s) {
    auto [base, c] = peel(s);
    auto line_like = [&](const Rational& lo, const Rational& hi) {
        if (base->family() == Family::Line) return;
        auto* iv = std::get_if<IntervalSpace>(&base->v);
        if (!iv) throw SetError(F.str() + " needs an interval space or the line");
        for (const auto& p : iv->parts)
            if (p.lo <= lo && hi <= p.hi) return;
        throw SetError(F.str() + " does not fit in " + s.describe());
    };
    struct V {
        const Space& s;
        const Space* base;
        const std::function<void(const Rational&, const Rational&)>& line_like;
        void operator()(const EmptySet&) const {}
        void operator()(const FinitePoints& f) const {
            for (const auto& p : f.points)
                if (!contains(s, p)) throw SetError("point " + p.str() + " not in " + s.describe());
        }
        void operator()(const ConvergentPackage& c) const {
            for (const auto& p : c.points) line_like(p, p);
            for (const auto& q : c.seqs) line_like(min(q.a, q.a + q.c), max(q.a, q.a + q.c));
        }
        void operator()(const OrdinalEmbedding& e) const {
            if (!e.alpha.is_finite()) throw SetError("ordinal embedding needs finite α");
            Rational a = e.shift, b = e.shift + e.scale;
            line_like(min(a, b), max(a, b));
        }
        void operator()(const BranchFamily&) const { branch(); }
        void operator()(const SwitchImage&) const { branch(); }
        void branch() const {
            auto f = base->family();
            if (f != Family::Baire && f != Family::UltraTable) throw SetError("branch sets live in the Baire space");
        }
    };
    std::function<void(const Rational&, const Rational&)> ll = line_like;
    std::visit(V{s, base, ll}, F.v);
}

// ---------------------------------------------------------------- meets

ClosedSetSpec realize(const ClosedSetSpec& F, const Presentation& p) {
    if (p.transport && p.transport->kind == HomeoKind::Switch) return homeo_image(F, *p.transport);
    return F;
}

bool meets_shape(const ClosedSetSpec& F, const BallShape& b, bool closed) {
    struct V {
        const BallShape& b;
        bool closed;
        bool operator()(const EmptySet&) const { return false; }
        bool operator()(const FinitePoints& f) const {
            for (const auto& p : f.points)
                if (point_in_shape(p, b, closed, nullptr)) return true;
            return false;
        }
        bool operator()(const ConvergentPackage& c) const {
            return line_hits(b, closed, [&](const Seg& s) { return package_hits(c, s); });
        }
        bool operator()(const OrdinalEmbedding& e) const {
            return line_hits(b, closed, [&](const Seg& s) { return embedding_hits(e, s); });
        }
        bool operator()(const BranchFamily& f) const { return cyl(f.term); }
        bool operator()(const SwitchImage& s) const { return cyl(s.image); }
        bool cyl(const Term& t) const {
            if (b.kind != BallShape::Cylinder) throw SetError("branch set in a non-Baire presentation");
            return residual(t, b.center.prefix(closed ? b.cyl_closed : b.cyl_open)) != nullptr;
        }
    };
    return std::visit(V{b, closed}, F.v);
}

bool meets(const ClosedSetSpec& F, const Presentation& p, const BallId& n) {
    check_ambient(F, *p.space);
    auto sh = ball_shape(p, n);
    if (sh.kind == BallShape::Line) {
        // resolve groups for amalgam point sets
        if (auto* f = std::get_if<FinitePoints>(&F.v)) {
            auto slots = line_slots(*p.space);
            for (const auto& x : f->points)
                if (point_in_shape(x, sh, false, &slots)) return true;
            return false;
        }
    }
    return meets_shape(realize(F, p), sh);
}

// ---------------------------------------------------------------- Cantor-Bendixson

ClosedSetSpec cb_derivative(const ClosedSetSpec& F) {
    struct V {
        ClosedSetSpec operator()(const EmptySet&) const { return empty_set(); }
        ClosedSetSpec operator()(const FinitePoints&) const { return empty_set(); }
        ClosedSetSpec operator()(const ConvergentPackage& c) const {
            std::vector<Point> lim;
            for (const auto& q : c.seqs) {
                Point p = line_point(q.a);
                if (std::find(lim.begin(), lim.end(), p) == lim.end()) lim.push_back(p);
            }
            return finite_points(std::move(lim));
        }
        ClosedSetSpec operator()(const OrdinalEmbedding& e) const {
            if (Ordinal(e.d + 1) > e.alpha) return empty_set();
            OrdinalEmbedding n = e;
            ++n.d;
            return {n};
        }
        // every branch term realizes a closed discrete set
        ClosedSetSpec operator()(const BranchFamily&) const { return empty_set(); }
        ClosedSetSpec operator()(const SwitchImage&) const { return empty_set(); }
    };
    return std::visit(V{}, F.v);
}

Ordinal cb_rank(const ClosedSetSpec& F) {
    if (set_is_empty(F)) return Ordinal(0);
    if (auto* e = std::get_if<OrdinalEmbedding>(&F.v)) return Ordinal(e->alpha.finite_value() + 1 - e->d);
    u64 r = 0;
    ClosedSetSpec cur = F;
    while (!set_is_empty(cur)) {
        cur = cb_derivative(cur);
        ++r;
    }
    return Ordinal(r);
}

bool is_discrete(const ClosedSetSpec& F) { return cb_rank(F) <= Ordinal(1); }

// ---------------------------------------------------------------- images

ClosedSetSpec switch_apply(const SwitchPair& pair, const ClosedSetSpec& F) {
    if (std::holds_alternative<EmptySet>(F.v)) return F;
    if (auto* f = std::get_if<FinitePoints>(&F.v)) {
        std::vector<Point> out;
        for (const auto& p : f->points) {
            auto* b = std::get_if<Branch>(&p.v);
            if (!b) throw SetError("switch maps act on branches");
            out.push_back(branch_point(pair.apply(*b)));
        }
        return finite_points(std::move(out));
    }
    if (auto* b = std::get_if<BranchFamily>(&F.v)) {
        auto A = base_pred(b->term);
        if (!A) throw SetError("switch image of " + term_str(b->term) + " is not supported");
        return {SwitchImage{pair.alpha, b->term, switch_image_term(pair, *A)}};
    }
    if (auto* s = std::get_if<SwitchImage>(&F.v)) {
        if (s->alpha == pair.alpha) return branch_family(s->base);
        throw SetError("composite switch images are not supported");
    }
    throw SetError("switch maps act on Baire-space sets");
}

ClosedSetSpec homeo_image(const ClosedSetSpec& F, const Homeo& f) {
    if (f.kind == HomeoKind::Identity) return F;
    if (f.kind == HomeoKind::Switch) return switch_apply(SwitchPair{f.alpha}, F);
    if (std::holds_alternative<EmptySet>(F.v)) return F;
    if (auto* fp = std::get_if<FinitePoints>(&F.v)) {
        std::vector<Point> out;
        for (const auto& p : fp->points) out.push_back(f.apply(p));
        return finite_points(std::move(out));
    }
    if (f.kind != HomeoKind::Affine) throw SetError("only affine maps carry " + F.str());
    if (auto* c = std::get_if<ConvergentPackage>(&F.v)) {
        ConvergentPackage out;
        for (const auto& p : c->points) out.points.push_back(f.apply(p));
        for (const auto& q : c->seqs) out.seqs.push_back({f.apply(q.a), f.a * q.c});
        return {out};
    }
    if (auto* e = std::get_if<OrdinalEmbedding>(&F.v)) {
        OrdinalEmbedding out = *e;
        out.scale = f.a * e->scale;
        out.shift = f.a * e->shift + f.b;
        return {out};
    }
    throw SetError("unsupported image of " + F.str() + " under " + f.name);
}

// ---------------------------------------------------------------- samples

namespace {

void model_points(u64 alpha, u64 d, u64 depth, const Rational& scale, const Rational& shift, std::vector<Rational>& out) {
    if (d > alpha) return;
    out.push_back(shift);
    if (alpha == d) return;
    for (u64 n = 0; n < depth; ++n) {
        Rational a = Rational::pow2(-static_cast<long>(n) - 1);
        Rational w = Rational::pow2(-static_cast<long>(n) - 2);
        model_points(alpha - 1, d, depth, scale * w, shift + scale * a, out);
    }
}

}  // namespace

std::vector<Point> sample_points(const ClosedSetSpec& F, u64 depth) {
    std::vector<Point> out;
    if (auto* f = std::get_if<FinitePoints>(&F.v)) return f->points;
    if (auto* c = std::get_if<ConvergentPackage>(&F.v)) {
        std::vector<Rational> xs = c->points;
        for (const auto& q : c->seqs) {
            xs.push_back(q.a);
            for (u64 n = 0; n < depth; ++n) xs.push_back(q.a + q.c * Rational::pow2(-static_cast<long>(n)));
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (const auto& x : xs) out.push_back(line_point(x));
    } else if (auto* e = std::get_if<OrdinalEmbedding>(&F.v)) {
        std::vector<Rational> xs;
        Rational m(static_cast<long>(e->m));
        for (u64 i = 0; i < e->m; ++i)
            model_points(e->alpha.finite_value(), e->d, depth, Rational(1) / (Rational(2) * m),
                         Rational(static_cast<long>(i)) / m, xs);
        for (const auto& x : xs) out.push_back(line_point(e->shift + e->scale * x));
    } else if (auto* b = std::get_if<BranchFamily>(&F.v)) {
        for (auto& br : term_branches(b->term, depth)) out.push_back(branch_point(br));
    } else if (auto* s = std::get_if<SwitchImage>(&F.v)) {
        for (auto& br : term_branches(s->image, depth)) out.push_back(branch_point(br));
    }
    // embedding blocks are disjoint and term branches come back unique
    return out;
}

}  // namespace cbr
