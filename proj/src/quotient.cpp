#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>

#include "cbr/engine.hpp"

namespace cbr {

namespace {

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }
bool get_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1; }


std::string mask_str(const std::vector<bool>& m) {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) {
            if (!first) s += ",";
            s += std::to_string(i);
            first = false;
        }
    return s + "}";
}

// Line segments with endpoints replaced by order ranks: lower bound 2v (closed) or 2v+1 (open),
// upper bound 2v (closed) or 2v-1 (open). Exact since the rationals are dense.
struct KeySeg {
    bool empty = true;
    std::int64_t lo = 0, hi = 0;
};
constexpr std::int64_t kInf = std::int64_t{1} << 60;

struct LineKeys {
    std::vector<std::vector<KeySeg>> open, closed;  // per ball, per slot

    explicit LineKeys(const std::vector<BallShape>& balls) {
        std::vector<Rational> vals;
        auto collect = [&](const Seg& s) {
            if (s.empty) return;
            if (!s.lo_inf) vals.push_back(s.lo);
            if (!s.hi_inf) vals.push_back(s.hi);
        };
        for (const auto& b : balls) {
            for (const auto& s : b.l_open) collect(s);
            for (const auto& s : b.l_closed) collect(s);
        }
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        auto rank = [&](const Rational& x) {
            return 2 * static_cast<std::int64_t>(std::lower_bound(vals.begin(), vals.end(), x) - vals.begin());
        };
        auto key = [&](const Seg& s) {
            KeySeg k;
            if (s.empty) return k;
            k.empty = false;
            k.lo = s.lo_inf ? -kInf : rank(s.lo) + (s.lo_closed ? 0 : 1);
            k.hi = s.hi_inf ? kInf : rank(s.hi) - (s.hi_closed ? 0 : 1);
            if (k.lo > k.hi) k.empty = true;
            return k;
        };
        open.reserve(balls.size());
        closed.reserve(balls.size());
        for (const auto& b : balls) {
            open.emplace_back();
            closed.emplace_back();
            for (const auto& s : b.l_open) open.back().push_back(key(s));
            for (const auto& s : b.l_closed) closed.back().push_back(key(s));
        }
    }

    static bool subset(const KeySeg& a, const KeySeg& b) {
        if (a.empty) return true;
        if (b.empty) return false;
        return a.lo >= b.lo && a.hi <= b.hi;
    }
    static bool disjoint(const KeySeg& a, const KeySeg& b) {
        return a.empty || b.empty || std::max(a.lo, b.lo) > std::min(a.hi, b.hi);
    }
    // same contracts as shape_below / shape_apart
    bool below(const std::vector<BallShape>& balls, std::size_t n, std::size_t m) const {
        if (!(balls[n].level < balls[m].level)) return false;
        for (std::size_t k = 0; k < open[n].size(); ++k)
            if (!subset(closed[m][k], open[n][k])) return false;
        return true;
    }
    bool apart(std::size_t a, std::size_t b) const {
        for (std::size_t k = 0; k < closed[a].size(); ++k)
            if (!disjoint(closed[a][k], closed[b][k])) return false;
        return true;
    }
};

}  // namespace

QuotientStructure build_point_quotient(const Presentation& p, const std::vector<Point>& pts,
                                       const std::optional<BallShape>& root, const std::optional<Point>& root_center) {
    QuotientStructure Q;
    Q.points = pts;
    auto fam = peel(*p.space).first->family();
    const bool line_like = fam == Family::Interval || fam == Family::Line || fam == Family::Amalgam;
    const auto slots = line_like ? line_slots(*p.space) : std::vector<Slot>{};
    auto holds = [&](const BallShape& b, const Point& q, bool closed) {
        return point_in_shape(q, b, closed, b.kind == BallShape::Line ? &slots : nullptr);
    };
    if (pts.empty()) return Q;

    const std::uint32_t K = separation_level(p, pts);
    std::vector<Point> extra;
    if (root_center) extra.push_back(*root_center);
    std::uint32_t first_level = root ? root->level + 1 : 0;
    std::vector<std::vector<bool>> open_mask, closed_mask;
    if (first_level < K) {
        auto centers = center_cover(p, pts, extra, K, first_level);
        for (std::uint32_t k = first_level; k < K; ++k)
            for (const auto& c : centers) {
                BallShape b = ball_shape(p, c, k);
                if (root && !shape_below(*root, b)) continue;
                std::vector<bool> om(pts.size()), cm(pts.size());
                bool any = false;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    om[i] = holds(b, pts[i], false);
                    cm[i] = holds(b, pts[i], true);
                    any = any || om[i];
                }
                if (!any) continue;
                Q.balls.push_back(std::move(b));
                Q.centers.push_back(c);
                open_mask.push_back(std::move(om));
                closed_mask.push_back(std::move(cm));
            }
    }
    // leaves: arbitrarily small balls around each point
    std::vector<bool> leaf_ok(pts.size(), true);
    if (root)
        for (std::size_t i = 0; i < pts.size(); ++i) leaf_ok[i] = holds(*root, pts[i], false);

    const std::size_t B = Q.balls.size(), N = B + pts.size();
    const std::size_t W = (N + 63) / 64;
    std::vector<Bits> below(N, Bits(W, 0)), apart(N, Bits(W, 0));
    std::optional<LineKeys> lk;
    if (B > 0 && Q.balls[0].kind == BallShape::Line) lk.emplace(Q.balls);
    for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t j = 0; j < B; ++j) {
            if (i == j) continue;
            if (lk ? lk->below(Q.balls, i, j) : shape_below(Q.balls[i], Q.balls[j])) set_bit(below[i], j);
            if (j > i && (lk ? lk->apart(i, j) : shape_apart(Q.balls[i], Q.balls[j]))) {
                set_bit(apart[i], j);
                set_bit(apart[j], i);
            }
        }
        for (std::size_t q = 0; q < pts.size(); ++q) {
            if (!leaf_ok[q]) continue;
            if (open_mask[i][q]) set_bit(below[i], B + q);
            if (!closed_mask[i][q]) {
                set_bit(apart[i], B + q);
                set_bit(apart[B + q], i);
            }
        }
    }
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = 0; b < pts.size(); ++b)
            if (a != b) set_bit(apart[B + a], B + b);

    // profile partition
    std::vector<std::string> key(N);
    for (std::size_t i = 0; i < B; ++i) key[i] = "ball" + mask_str(open_mask[i]) + mask_str(closed_mask[i]);
    for (std::size_t q = 0; q < pts.size(); ++q) {
        std::vector<bool> m(pts.size());
        m[q] = true;
        key[B + q] = "leaf" + mask_str(m);
    }
    Q.cls.assign(N, 0);
    std::vector<std::string> first_desc;
    {
        std::map<std::string, std::size_t> ids;
        for (std::size_t i = 0; i < N; ++i) {
            if (!ids.count(key[i])) {
                ids[key[i]] = ids.size();
                first_desc.push_back(key[i]);
            }
            Q.cls[i] = ids[key[i]];
        }
        Q.num_classes = ids.size();
    }

    // relation-driven refinement by witnessed class pairs
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> wit(N);
    // class pairs (c1 <= c2) with an apart pair of children of n; apart is irreflexive
    std::vector<Bits> members;
    auto index_classes = [&] {
        members.assign(Q.num_classes, Bits(W, 0));
        for (std::size_t i = 0; i < N; ++i) set_bit(members[Q.cls[i]], i);
    };
    auto witnesses = [&](std::size_t n) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const Bits& ch = below[n];
        std::vector<Bits> reach(Q.num_classes);
        for (std::size_t w = 0; w < W; ++w)
            for (std::uint64_t m = ch[w]; m; m &= m - 1) {
                std::size_t u = w * 64 + static_cast<std::size_t>(__builtin_ctzll(m));
                Bits& r = reach[Q.cls[u]];
                if (r.empty()) r.assign(W, 0);
                for (std::size_t x = 0; x < W; ++x) r[x] |= apart[u][x] & ch[x];
            }
        for (std::size_t c1 = 0; c1 < Q.num_classes; ++c1) {
            if (reach[c1].empty()) continue;
            for (std::size_t c2 = c1; c2 < Q.num_classes; ++c2)
                for (std::size_t x = 0; x < W; ++x)
                    if (reach[c1][x] & members[c2][x]) {
                        out.emplace_back(c1, c2);
                        break;
                    }
        }
        return out;
    };
    while (true) {
        ++Q.refinement_rounds;
        index_classes();
        for (std::size_t n = 0; n < N; ++n) wit[n] = witnesses(n);
        std::map<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>, std::size_t> ids;
        std::vector<std::size_t> next(N);
        std::vector<std::size_t> origin;
        for (std::size_t i = 0; i < N; ++i) {
            auto k = std::make_pair(Q.cls[i], wit[i]);
            auto it = ids.find(k);
            if (it == ids.end()) {
                it = ids.emplace(k, ids.size()).first;
                origin.push_back(Q.cls[i]);
            }
            next[i] = it->second;
        }
        bool stable = ids.size() == Q.num_classes;
        Q.cls = next;
        Q.num_classes = ids.size();
        std::vector<std::string> d;
        for (std::size_t c : origin) d.push_back(first_desc[c]);
        first_desc = d;
        if (stable) break;
    }
    index_classes();
    for (std::size_t n = 0; n < N; ++n) wit[n] = witnesses(n);

    Q.class_desc.assign(Q.num_classes, "");
    Q.pair_witness.assign(Q.num_classes, {});
    std::vector<std::uint32_t> lo(Q.num_classes, UINT32_MAX), hi(Q.num_classes, 0);
    std::vector<std::size_t> count(Q.num_classes, 0);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t c = Q.cls[i];
        if (count[c]++ == 0) Q.pair_witness[c] = wit[i];
        if (i < B) {
            lo[c] = std::min(lo[c], Q.balls[i].level);
            hi[c] = std::max(hi[c], Q.balls[i].level);
        }
    }
    for (std::size_t c = 0; c < Q.num_classes; ++c) {
        std::string d = first_desc[c];
        if (lo[c] != UINT32_MAX) d += " L" + std::to_string(lo[c]) + (hi[c] != lo[c] ? "-" + std::to_string(hi[c]) : "");
        Q.class_desc[c] = d + " x" + std::to_string(count[c]);
    }
    Q.below.assign(Q.num_classes, std::vector<bool>(Q.num_classes, false));
    Q.apart.assign(Q.num_classes, std::vector<bool>(Q.num_classes, false));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            if (get_bit(below[i], j)) Q.below[Q.cls[i]][Q.cls[j]] = true;
            if (get_bit(apart[i], j)) Q.apart[Q.cls[i]][Q.cls[j]] = true;
        }
    for (std::size_t i = 0; i < B; ++i)
        if (auto idx = dense_index(p, Q.centers[i])) Q.member_of[BallId{*idx, Q.balls[i].level}] = Q.cls[i];
    return Q;
}

QuotientStructure build_quotient(const Presentation& p, const ClosedSetSpec& F) {
    std::string why;
    if (!engine_supports(p, F, &why)) throw EngineError(why);
    if (is_branch_set(F)) throw EngineError("branch sets use the tree engine");
    return build_point_quotient(p, top_level_points(F));
}

ClassSet all_classes(const QuotientStructure& Q) {
    ClassSet s(Q.num_classes);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    return s;
}

ClassSet dp_step(const QuotientStructure& Q, const ClassSet& alive) {
    std::vector<bool> on(Q.num_classes, false);
    for (std::size_t c : alive) on[c] = true;
    ClassSet out;
    for (std::size_t c : alive)
        for (const auto& [a, b] : Q.pair_witness[c])
            if (on[a] && on[b]) {
                out.push_back(c);
                break;
            }
    return out;
}

}  // namespace cbr
