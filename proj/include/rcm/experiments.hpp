#pragma once

// Boundary-connection sums, strip and cover quantities and finite-size
// experiments built on the exact and sampling engines.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcm/exact.hpp"
#include "rcm/lattice.hpp"
#include "rcm/medial.hpp"
#include "rcm/sampler.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Boundary-connection sums

struct PhiTerm {
  int edge;     // edge of the ambient graph
  int inside;   // endpoint in S (ambient id)
  int outside;  // endpoint outside S
  double value;
};

struct PhiReport {
  std::vector<int> set;  // ambient vertex ids
  double value = 0;
  std::vector<PhiTerm> terms;
};

/// Sum over boundary edges (x,y) of S of P(0 <-> x), the probability taken in
/// the free measure on the subgraph induced by S. Requires the origin in S.
PhiReport phi_fn(const Graph& ambient, const std::vector<int>& set, const ModelParams& mp, int jobs = 1);

/// 1/2 |exp(i sigma pi/2) - 1| (1 + sqrt q).
double lemma_C(double q);

struct Q3Scan {
  int n = 0;
  double q = 0;
  double p = 0;
  double constant = 0;
  double min_value = 0;
  std::vector<Coord> argmin;
  std::size_t sets_checked = 0;
  bool pass = false;
};

/// Minimum of phi_fn at the self-dual point over sets 0 in S within the box of
/// size n, boundary edges taken in the box of size n+1. n = 1 checks all 256
/// sets; n = 2 checks every connected set of at most `max_connected` vertices
/// containing the origin plus `random_sets` seeded random sets.
Q3Scan lemma_q3_scan(int n, double q, int max_connected = 8, int random_sets = 2000, std::uint64_t seed = 1,
                     int jobs = 1);

// ---------------------------------------------------------------------------
// Strips

enum class SideCondition { Wired, Free };

/// Truncated strip of height n and half-width m. Both rows are wired into one
/// block; the side columns join the block (Wired) or stay free.
Domain strip_domain(int n, int m, SideCondition side);

/// Left arc connected to right arc by open edges.
EventSpec strip_primal_crossing(const Graph& strip);
/// Complement of the primal crossing: a dual crossing from the bottom gap to
/// the top gap left of the origin.
EventSpec strip_dual_crossing_event(const Graph& strip);

struct LeftmostDualPath {
  /// Dual vertices in doubled coordinates, from the gap below (-1/2, 0) to
  /// the gap above (-1/2, n), both gaps included.
  std::vector<Point2> faces;
  /// Primal edges crossed, one per consecutive pair of faces.
  std::vector<int> crossed;
};

/// Leftmost dual-open crossing, read off the exploration path that has the
/// left arc wired. Absent when the arcs are primally connected.
std::optional<LeftmostDualPath> leftmost_dual_path(const Graph& strip, Omega omega);

struct StripCrossing {
  double primal = 0;
  double dual = 0;
  Estimate primal_mc;
  Estimate dual_mc;
};

/// P(A_n) and P(A*_n) on the truncated strip, exactly or by heat-bath.
StripCrossing strip_dual_crossing(int n, int m, const ModelParams& mp, SideCondition side, bool exact,
                                  std::uint64_t seed = 1, long long budget = 100000, int jobs = 1);

/// Sum over bottom-left boundary vertices x of P(x <-> P*), exact only.
double q4_boundary_sum(int n, int m, const ModelParams& mp, SideCondition side, int jobs = 1);

enum class PhiBarVariant { Conditional, Unconditional };

/// Sum over boundary edges (x,y) of S of P(left arc <-> x inside S | the set
/// of vertices not connected to the right arc equals S). Exact only. S must
/// contain the left arc.
PhiReport phi_bar_fn(int n, int m, const std::vector<int>& set, const ModelParams& mp, SideCondition side,
                     PhiBarVariant variant = PhiBarVariant::Conditional, int jobs = 1);

// ---------------------------------------------------------------------------
// Crossings

/// Open path from the left column to the right column of a rectangle.
EventSpec horizontal_crossing_event(const Graph& rect);
/// Open path from the bottom row to the top row of a rectangle.
EventSpec vertical_crossing_event(const Graph& rect);
/// Dual-open path between the slots below the bottom row and above the top
/// row of a rectangle's dual (open dual edges only).
EventSpec dual_vertical_crossing_event(const DualGraph& dual, const Graph& rect);

struct CrossingSpec {
  int m = 1;            // box half-width
  double aspect = 1.0;  // box height = round(aspect * m)
  int n = 1;            // strip height
  int m_trunc = 1;      // strip truncation half-width, >= m
  SideCondition side = SideCondition::Wired;
};

/// Box [-m,m] x [0, aspect m] crossed bottom to top inside the box.
EventSpec box_crossing_event(const Graph& strip, const CrossingSpec& spec);

struct CrossingResult {
  double value = 0;
  Estimate mc;
  bool exact = true;
};
CrossingResult crossing_prob(const CrossingSpec& spec, const ModelParams& mp, bool exact, std::uint64_t seed = 1,
                             long long budget = 100000, int jobs = 1);

/// Vertices {0..n} x {0..n-1}: horizontal crossing of the (n+1) x n box.
Graph crossing_rectangle(int n);

// ---------------------------------------------------------------------------
// Universal cover

/// Parameter outside the range where a construction exists.
class UnsupportedParameter : public Error {
 public:
  using Error::Error;
};

/// Integer in [(2/s - 3)/2, (2/s - 1)/2] with s = sigma_hat(q), the smaller
/// one when both ends are integers. Requires q in (3,4).
int select_k(double q);

struct KConditions {
  double min_cos_low = 0;  // min over m in [0, 4k+1] of cos(pi m s / 2)
  double cos_high = 0;     // cos((4k+3) pi s / 2)
  bool low_ok = false;     // min_cos_low >= 0
  bool high_ok = false;    // cos_high <= 0
};
KConditions check_k_conditions(double q, int k);

struct DecayRow {
  int n = 0;
  Estimate to_inner;  // 0 <-> boundary of the inner box
  Estimate to_outer;  // 0 <-> boundary of the whole domain
};

/// Free-boundary estimates on the truncated cover at the self-dual point.
std::vector<DecayRow> uk_decay(double q, int k, int R, const std::vector<int>& n_list, long long budget,
                               std::uint64_t seed, std::optional<double> p = {}, int jobs = 1);

// ---------------------------------------------------------------------------
// Critical point

struct PcCurvePoint {
  int n = 0;
  double p = 0;
  Estimate crossing;
};

struct PcIntersection {
  int n1 = 0;
  int n2 = 0;
  double p = 0;
  bool found = false;
};

struct PcResult {
  double q = 0;
  std::vector<PcCurvePoint> curve;
  std::vector<PcIntersection> intersections;
  double spread = 0;
  double max_std_error = 0;
};

/// Crossing curves of (n+1) x n free boxes over `p_grid` (Chayes-Machta) and
/// their pairwise intersections. Throws when the budget is below 10^4.
PcResult pc_estimate(double q, const std::vector<int>& sizes, const std::vector<double>& p_grid, long long budget,
                     std::uint64_t seed, int jobs = 1);

/// Crossing of two curves sampled on an increasing grid. The sign of the
/// least-squares slope of a - b fixes the orientation; the bracket whose sign
/// split disagrees with the fewest points is interpolated linearly.
std::optional<double> curve_intersection(const std::vector<double>& p, const std::vector<double>& a,
                                         const std::vector<double>& b);

}  // namespace rcm
