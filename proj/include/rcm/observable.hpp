#pragma once

// Exploration paths and the parafermionic observable under Dobrushin
// boundary conditions, with signed contour sums around sets of medial
// vertices.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcm/exact.hpp"
#include "rcm/medial.hpp"
#include "rcm/sampler.hpp"

namespace rcm {

/// Spin exponent solving cos(sigma * pi / 2) = sqrt(q) / 2, for q in [1,4].
double sigma_hat(double q);

struct ExplorationPath {
  std::vector<int> edges;  // directed medial edges, start edge first
  std::vector<int> turns;  // turns[i]: +1 left, -1 right, from edges[i] to edges[i+1]
  /// Winding from edges[i] to the end edge, in quarter turns.
  std::vector<int> winding_to_end;

  /// Total winding from the start edge to the end edge, in quarter turns.
  int total_winding() const { return winding_to_end.empty() ? 0 : winding_to_end.front(); }
  static double radians(int quarter_turns);
};

/// Follows the successor tables from the start edge to the end edge.
ExplorationPath explore(const MedialGraph& m, Omega omega);

/// Quarter turn that takes direction `from` to direction `to` (+1 or -1).
int quarter_turn(int from_dir, int to_dir);

struct ObservableTable {
  double q = 0;
  double p = 0;
  double sigma = 0;
  std::vector<std::complex<double>> value;  // per directed medial edge
  std::vector<double> visit_prob;           // P(edge on the path)
};

/// Exact observable on every medial edge. `p` defaults to the self-dual point;
/// other values are an off-critical diagnostic.
ObservableTable observable_exact(const Domain& d, const MedialGraph& m, double q, std::optional<double> p = {},
                                 int jobs = 1);

enum class Admissibility {
  /// All four medial edges at the vertex lie between medial vertices of the
  /// domain, or are the start or end edge.
  Strict,
  /// Every medial vertex of the domain; edges to exterior sites count.
  Extended,
};

/// Medial sites (by site id) that may belong to a contour set.
std::vector<int> admissible_sites(const MedialGraph& m, Admissibility mode);

struct ContourTerm {
  int edge;
  int sign;  // +1 when the edge points into the set
};

/// Edges with exactly one end in `sites` and their signs. Throws when a site
/// is not admissible.
std::vector<ContourTerm> contour_boundary(const MedialGraph& m, const std::vector<int>& sites,
                                          Admissibility mode = Admissibility::Strict);

std::complex<double> contour_sum(const MedialGraph& m, const ObservableTable& f, const std::vector<int>& sites,
                                  Admissibility mode = Admissibility::Strict);

struct ContourReport {
  std::string domain;
  double q = 0;
  double p = 0;
  Admissibility mode = Admissibility::Strict;
  std::size_t subsets = 0;
  double max_modulus = 0;
  std::vector<int> argmax;  // site ids
  /// Sum for each admissible single site, keyed by site id.
  std::vector<std::pair<int, std::complex<double>>> singles;
};

/// Contour sums over every subset of admissible sites (at most 20 sites).
ContourReport contour_report(const Domain& d, const std::string& name, double q, std::optional<double> p,
                             Admissibility mode, int jobs = 1);
std::string to_json(const ContourReport& r, const MedialGraph& m);

struct ComplexEstimate {
  Estimate re;
  Estimate im;
};

/// Heat-bath estimate of the observable on the given medial edges.
std::vector<ComplexEstimate> observable_mc(const Domain& d, const MedialGraph& m, double q,
                                           const std::vector<int>& edges, std::uint64_t seed, long long budget,
                                           std::optional<double> p = {});

}  // namespace rcm
