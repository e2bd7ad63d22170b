#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cbr/branch.hpp"
#include "cbr/ordinal.hpp"
#include "cbr/spaces.hpp"
#include "cbr/switch.hpp"

namespace cbr {

class SetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EmptySet {};

struct FinitePoints {
    std::vector<Point> points;
};

// a + c·2^{-n} (n >= 0) together with the limit a
struct GeoSeq {
    Rational a, c;
};

struct ConvergentPackage {
    std::vector<Rational> points;
    std::vector<GeoSeq> seqs;
};

// shift + scale·E with E = ⋃_{i<m} (i/m + M_d(α)/(2m)), where
// M(0) = {0}, M(α) = {0} ∪ ⋃_n (2^{-n-1} + 2^{-n-2}·M(α-1)) ≅ ω^α+1
// and M_d(α) = M(α)^(d), its d-th Cantor-Bendixson derivative.
struct OrdinalEmbedding {
    Ordinal alpha;  // finite
    u64 m = 1;
    u64 d = 0;
    Rational scale = 1, shift = 0;
};

struct BranchFamily {
    Term term;
};

struct SwitchImage {
    Ordinal alpha;
    Term base;
    Term image;
};

struct ClosedSetSpec {
    std::variant<EmptySet, FinitePoints, ConvergentPackage, OrdinalEmbedding, BranchFamily, SwitchImage> v;
    std::string str() const;
};

ClosedSetSpec empty_set();
ClosedSetSpec finite_points(std::vector<Point> pts);
ClosedSetSpec convergent_package(std::vector<Rational> pts, std::vector<GeoSeq> seqs);
ClosedSetSpec ordinal_embedding(u64 alpha, u64 m = 1);
ClosedSetSpec branch_family(Term t);
ClosedSetSpec switch_image(const Ordinal& alpha, Term base = t_base(), const Ordinal& cap = default_switch_cap());

bool set_is_empty(const ClosedSetSpec& F);
bool is_branch_set(const ClosedSetSpec& F);
// throws SetError when F does not live in the space
void check_ambient(const ClosedSetSpec& F, const Space& s);

// F in the coordinates of the balls of p (the image under a switch transport)
ClosedSetSpec realize(const ClosedSetSpec& F, const Presentation& p);
// does the open (or closed) extent meet F; F already realized for the presentation
bool meets_shape(const ClosedSetSpec& F, const BallShape& b, bool closed = false);
bool meets(const ClosedSetSpec& F, const Presentation& p, const BallId& n);

// membership of one point; `slots` resolves amalgam groups for line shapes
bool point_in_shape(const Point& x, const BallShape& b, bool closed, const std::vector<Slot>* slots = nullptr);

ClosedSetSpec cb_derivative(const ClosedSetSpec& F);
Ordinal cb_rank(const ClosedSetSpec& F);
bool is_discrete(const ClosedSetSpec& F);

ClosedSetSpec switch_apply(const SwitchPair& pair, const ClosedSetSpec& F);
ClosedSetSpec homeo_image(const ClosedSetSpec& F, const Homeo& f);

// finite sample of points of F (embedding blocks / sequence terms / branches below `depth`)
std::vector<Point> sample_points(const ClosedSetSpec& F, u64 depth);

// M_d(α) ∩ seg ≠ ∅ for the untransformed model set
bool model_hits(u64 alpha, u64 d, const Seg& seg);
// ∃ n >= 0 : 2^{-n} ∈ seg
bool pow2_hits(const Seg& seg);
// {e : shift + scale·e ∈ seg}
Seg seg_affine_preimage(const Seg& seg, const Rational& scale, const Rational& shift);

}  // namespace cbr
