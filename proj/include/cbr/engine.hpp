#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbr/sets.hpp"

namespace cbr {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- geometry helpers

// The last nonempty Cantor-Bendixson derivative of F (finite for the geometric specs).
std::vector<Point> top_level_points(const ClosedSetSpec& F);

// Least level from which no ball holds two of the points (all internal witnesses live at
// levels <= the returned value minus one).
std::uint32_t separation_level(const Presentation& p, const std::vector<Point>& pts);

// Distance in the metric of the presentation (transport applied).
Rational presentation_distance(const Presentation& p, const Point& a, const Point& b);

// Centres that realize every witness configuration over `pts` with levels in [first, levels).
// `extra` points (e.g. a fixed root centre) are folded into the lattice.
std::vector<Point> center_cover(const Presentation& p, const std::vector<Point>& pts, const std::vector<Point>& extra,
                                std::uint32_t levels, std::uint32_t first = 0);

// Open extent of b holds infinitely many points of F.
bool accumulates(const ClosedSetSpec& F, const BallShape& b);

// ---------------------------------------------------------------- quotient engine

struct QuotientStructure {
    // universe: explicit balls, then one tiny ball per point of `points`
    std::vector<BallShape> balls;
    std::vector<Point> centers;
    std::vector<Point> points;
    std::vector<std::size_t> cls;  // class of each universe element
    std::size_t num_classes = 0;
    std::vector<std::string> class_desc;
    std::vector<std::vector<bool>> below;  // class relation: some member ≺ some member
    std::vector<std::vector<bool>> apart;
    // class c -> unordered class pairs {c1 <= c2} witnessed below some member of c
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pair_witness;
    std::map<BallId, std::size_t> member_of;
    std::size_t refinement_rounds = 0;

    std::size_t size() const { return balls.size() + points.size(); }
};

// Quotient over the finite point set `pts` (the splitting points of F).
// `root`, when given, is folded into the centre lattice and restricts the universe to
// balls strictly below it.
QuotientStructure build_point_quotient(const Presentation& p, const std::vector<Point>& pts,
                                       const std::optional<BallShape>& root = std::nullopt,
                                       const std::optional<Point>& root_center = std::nullopt);
QuotientStructure build_quotient(const Presentation& p, const ClosedSetSpec& F);

using ClassSet = std::vector<std::size_t>;  // sorted
ClassSet dp_step(const QuotientStructure& Q, const ClassSet& alive);
ClassSet all_classes(const QuotientStructure& Q);

// ---------------------------------------------------------------- traces

struct TraceStage {
    Ordinal stage;
    ClassSet alive;
};

struct DerivativeTrace {
    std::string engine;  // "quotient" | "tree" | "brute"
    Ordinal offset;      // stages below offset are summarized (geometric specs of CB rank > 1)
    std::vector<TraceStage> stages;
    Ordinal final_rank;
    bool stabilized_empty = true;
    std::vector<std::string> class_desc;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // ≺ between classes
};

// ---------------------------------------------------------------- tree engine

struct NodeRankTable {
    std::vector<std::pair<std::string, Ordinal>> entries;  // reachable term type -> ν
    Ordinal root;
};

// Node rank ν of the root cylinder of t; nullopt when t is empty.
std::optional<Ordinal> node_rank(const Term& t, NodeRankTable* table = nullptr);
std::optional<Ordinal> node_rank(const std::vector<Branch>& finite);

std::pair<Ordinal, NodeRankTable> tree_rank(const Presentation& p, const ClosedSetSpec& F);

// ---------------------------------------------------------------- ranks

struct RankResult {
    Ordinal rank;
    DerivativeTrace trace;
};

bool engine_supports(const Presentation& p, const ClosedSetSpec& F, std::string* why = nullptr);
RankResult dp_rank(const Presentation& p, const ClosedSetSpec& F, const Ordinal& cap = Ordinal::omega() * Ordinal::omega() * Ordinal(2));

// D_P rank of a single ball: the largest α with n ∈ D^α; nullopt when n ∉ A_F.
// Exact when the ball holds at most 16 points of the derivative it splits; beyond that the
// finite part is a lower bound (the ω·k part is always exact).
std::optional<Ordinal> ball_rank(const Presentation& p, const ClosedSetSpec& F, const BallId& n);
std::optional<Ordinal> ball_rank(const Presentation& p, const ClosedSetSpec& F, const Point& center,
                                 std::uint32_t level);

struct DepthBound {
    std::uint32_t k = 0;
    std::string derivation;
};
// nullopt when no finite truncation can be sound (transfinite ranks, unsupported specs)
std::optional<DepthBound> witness_depth_bound(const Presentation& p, const ClosedSetSpec& F);

struct BruteOptions {
    std::size_t max_codes = 6000;
    u64 symbol_bound = 0;  // Baire: symbols sampled below this bound (0 = automatic)
};
RankResult brute_force_rank(const Presentation& p, const ClosedSetSpec& F, std::uint32_t K, BruteOptions opt = {});

struct RefinementReport {
    bool ok = true;
    std::size_t checked = 0;
    std::vector<std::string> violations;
};
RefinementReport refinement_check(const Presentation& p, const ClosedSetSpec& F, const DerivativeTrace& trace,
                                  std::size_t samples = 60);

// ---------------------------------------------------------------- export

std::string trace_csv(const DerivativeTrace& t);
std::string trace_dot(const DerivativeTrace& t);

}  // namespace cbr
