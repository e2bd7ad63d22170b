#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbr/ordinal.hpp"
#include "cbr/rational.hpp"

namespace cbr {

using u64 = std::uint64_t;

class SpaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- schedules

enum class Schedule { DyadicPaper, DyadicTop, AlignedUltra };

Rational schedule_radius(Schedule s, std::uint32_t k);
std::string schedule_name(Schedule s);  // "paper" | "top" | "aligned"
Schedule parse_schedule(std::string_view s);

// ---------------------------------------------------------------- points

// word followed by tail repeated forever; canonical when word does not end with tail.
struct Branch {
    std::vector<u64> word;
    u64 tail = 0;

    static Branch make(std::vector<u64> word, u64 tail);
    static Branch constant(u64 c) { return make({}, c); }
    u64 at(std::size_t i) const { return i < word.size() ? word[i] : tail; }
    std::vector<u64> prefix(std::size_t n) const;
    std::string str() const;  // "<0,1|2>" = (0,1,2,2,2,...)
    static Branch parse(std::string_view s);
    auto operator<=>(const Branch&) const = default;
};

struct HedgePoint {
    u64 spine = 0;  // ignored when t == 0 (the centre)
    Rational t;
    static HedgePoint make(u64 spine, Rational t);
    bool operator==(const HedgePoint&) const = default;
};

struct Point;
struct SumPoint {
    std::uint32_t part = 0;
    std::shared_ptr<const Point> inner;
};

struct Point {
    std::variant<std::size_t, Rational, HedgePoint, Branch, SumPoint> v;
    std::string str() const;
};

bool operator==(const Point& a, const Point& b);

Point finite_point(std::size_t i);
Point line_point(Rational x);
Point hedge_point(u64 spine, Rational t);
Point branch_point(Branch b);
Point sum_point(std::uint32_t part, Point inner);

// ---------------------------------------------------------------- spaces

struct Space;
using SpacePtr = std::shared_ptr<const Space>;
struct BranchTermNode;  // defined by the sets module

struct FiniteSpace {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> dist;
};

struct Segment {
    Rational lo, hi;  // closed [lo, hi]; lo == hi is an isolated point
};

struct IntervalSpace {
    std::vector<Segment> parts;  // sorted, pairwise disjoint
};

struct RealLine {};
struct Hedgehog {};   // countably many unit spines glued at a centre
struct BaireSpace {};

// Countable discrete space: the branches of a branch term, with the Baire metric.
struct UltraTable {
    std::string description;
    std::shared_ptr<const BranchTermNode> term;
    std::function<std::optional<Branch>(u64)> point;
    std::function<std::optional<u64>(const Branch&)> index;
    // longest word w extending prefix, |w| <= len, such that every table point
    // extending prefix extends w
    std::function<std::vector<u64>(const std::vector<u64>& prefix, std::size_t len)> forced;
};

struct Scaled {
    Rational c;
    SpacePtr inner;
};

struct AmalgamPart {
    SpacePtr inner;  // IntervalSpace or RealLine
    Rational anchor;
    Rational bridge;
};

struct AmalgamSum {
    std::vector<AmalgamPart> parts;
};

enum class Family { Finite, Interval, Line, Hedgehog, Baire, UltraTable, Scaled, Amalgam };

struct Space {
    std::variant<FiniteSpace, IntervalSpace, RealLine, Hedgehog, BaireSpace, UltraTable, Scaled, AmalgamSum> v;
    Family family() const { return static_cast<Family>(v.index()); }
    std::string describe() const;
};

std::string family_name(Family f);

SpacePtr finite_space(std::vector<std::string> labels, std::vector<std::vector<Rational>> dist);
SpacePtr interval_space(std::vector<Segment> parts);
SpacePtr unit_interval();
SpacePtr real_line();
SpacePtr hedgehog();
SpacePtr baire_space();
SpacePtr scaled(Rational c, SpacePtr inner);
SpacePtr amalgam(std::vector<AmalgamPart> parts);

// Strip Scaled layers: underlying space and the product of the factors.
std::pair<const Space*, Rational> peel(const Space& s);

bool is_compact(const Space& s);
bool is_ultrametric(const Space& s);
bool contains(const Space& s, const Point& x);
Rational distance(const Space& s, const Point& a, const Point& b);

// ---------------------------------------------------------------- homeomorphisms

enum class HomeoKind { Identity, Affine, PiecewiseLinear, Switch };

struct Homeo {
    HomeoKind kind = HomeoKind::Identity;
    Rational a = 1, b = 0;               // Affine: x -> a x + b
    std::vector<Rational> xs, ys;        // PiecewiseLinear knots, strictly increasing, f(xs[i]) = ys[i]
    Ordinal alpha;                       // Switch stage
    std::function<Branch(const Branch&)> fwd, inv;  // Switch pointwise maps
    std::string name;

    Rational apply(const Rational& x) const;
    Rational invert(const Rational& y) const;
    bool increasing() const;
    Branch apply(const Branch& x) const;
    Branch invert(const Branch& y) const;
    Point apply(const Point& x) const;
    Point invert(const Point& y) const;
};

Homeo identity_homeo();
Homeo affine_homeo(Rational a, Rational b);
Homeo pl_homeo(std::vector<Rational> xs, std::vector<Rational> ys);

// ---------------------------------------------------------------- presentations

enum class DenseRule { Standard, ExcludePoint, EventuallyOne, Permuted };

struct DenseSpec {
    DenseRule rule = DenseRule::Standard;
    std::optional<Point> excluded;     // ExcludePoint
    std::vector<std::size_t> perm;     // Permuted (FiniteSpace): i-th dense point is perm[i]
    std::string str() const;
};

struct BallId {
    u64 center = 0;
    std::uint32_t level = 0;
    auto operator<=>(const BallId&) const = default;
};

struct Presentation {
    SpacePtr space;
    DenseSpec dense;
    Schedule schedule = Schedule::DyadicPaper;
    std::optional<Homeo> transport;  // P_f: metric d(f x, f y), dense y_i = f^-1(x_i)
    std::string name;
};

Presentation make_presentation(SpacePtr space, Schedule schedule, DenseSpec dense = {});

// i-th dense point, in the coordinates of the space itself
Point dense_point(const Presentation& p, u64 i);
std::optional<u64> dense_index(const Presentation& p, const Point& x);
Rational dist(const Presentation& p, u64 i, u64 j);
Rational radius(const Presentation& p, std::uint32_t level);

// ---------------------------------------------------------------- ball extents

// A one-dimensional piece: interval with open/closed ends, possibly unbounded.
struct Seg {
    bool empty = true;
    Rational lo, hi;
    bool lo_closed = false, hi_closed = false;
    bool lo_inf = false, hi_inf = false;

    static Seg none() { return Seg{}; }
    static Seg make(Rational lo, Rational hi, bool lo_closed, bool hi_closed);
    static Seg all();
    bool contains(const Rational& x) const;
    std::string str() const;
};

Seg seg_intersect(const Seg& a, const Seg& b);
bool seg_subset(const Seg& a, const Seg& b);
bool seg_disjoint(const Seg& a, const Seg& b);
Seg seg_normalize(Seg s);

// Exact open and closed extents of one ball.
struct BallShape {
    enum Kind { Finite, Line, Hedge, Cylinder } kind = Line;
    std::uint32_t level = 0;
    // Finite: membership flags per point
    std::vector<bool> f_open, f_closed;
    // Line: one segment per slot of the space (slots fixed per space)
    std::vector<Seg> l_open, l_closed;
    // Hedge: own spine, all other spines, centre
    u64 spine = 0;
    bool on_hub = false;
    Seg h_own_open, h_own_closed, h_other_open, h_other_closed;
    bool hub_open = false, hub_closed = false;
    // Cylinder: centre branch and the open / closed prefix lengths
    Branch center;
    std::size_t cyl_open = 0, cyl_closed = 0;
    const UltraTable* table = nullptr;
    const Homeo* transport = nullptr;  // cylinder codes of a switch pushforward
};

// Slot k of a line-like space: (group, component segment).
struct Slot {
    std::uint32_t group = 0;
    Seg comp;
};
std::vector<Slot> line_slots(const Space& s);

BallShape ball_shape(const Presentation& p, const Point& center, std::uint32_t level);
BallShape ball_shape(const Presentation& p, const BallId& n);
// n ≺ m : level(n) < level(m) and closed(m) ⊆ open(n)
bool shape_below(const BallShape& n, const BallShape& m);
// closed balls disjoint
bool shape_apart(const BallShape& a, const BallShape& b);

// n ≺_P m
bool ball_strictly_below(const Presentation& p, const BallId& n, const BallId& m);
bool ball_apart(const Presentation& p, const BallId& a, const BallId& b);

// Triangle-inequality sufficient condition for n ≺_P m (sanity cross-check only).
bool triangle_below(const Presentation& p, const BallId& n, const BallId& m);

struct ValidationReport {
    bool ok = true;
    bool whole_space_ball = false;
    std::vector<std::string> issues;
    std::vector<std::string> notes;
    std::string str() const;
};

ValidationReport validate_presentation(const Presentation& p, std::size_t sample = 12);

Presentation pushforward_presentation(const Presentation& p, const Homeo& f);
Presentation dense_swap(const Presentation& p, const DenseSpec& rule);

}  // namespace cbr
