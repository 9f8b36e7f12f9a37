#pragma once

// Exhaustive enumeration of random-cluster configurations on small domains.
// A configuration is a bitmask over edge ids; weights are handled relative to
// a fixed log-space shift so that no term over- or underflows.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rcm/lattice.hpp"
#include "rcm/union_find.hpp"

namespace rcm {

inline constexpr int kEnumerationCap = 26;

class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

struct ModelParams {
  double p;
  double q;
  /// Throws unless p in (0,1) and q >= 1.
  ModelParams(double p_, double q_);
};

/// Edge states by edge id, 1 = open.
using Omega = std::span<const std::uint8_t>;

struct Config {
  std::uint64_t bits = 0;

  bool open(int e) const { return (bits >> e) & 1u; }
  int open_count() const { return std::popcount(bits); }
  Config with(int e, bool state) const {
    return {state ? bits | (std::uint64_t{1} << e) : bits & ~(std::uint64_t{1} << e)};
  }
  void unpack(std::vector<std::uint8_t>& omega, int num_edges) const;
  static Config pack(Omega omega);
  bool operator==(const Config&) const = default;
};

struct EventSpec {
  std::string name;
  std::function<bool(Omega)> holds;
  /// Declared increasing in the edge order; required by FKG, pivotality and
  /// domination checks.
  bool increasing = false;
};

EventSpec always_event();
EventSpec never_event();
EventSpec edge_open_event(int e);
EventSpec all_open_event(int num_edges);
/// x <-> y through open edges and the boundary contractions of `d`.
EventSpec connection_event(const Domain& d, int x, int y);
/// x <-> some vertex of `targets`, with boundary contractions.
EventSpec connection_to_set_event(const Domain& d, int x, std::vector<int> targets);
EventSpec intersection_event(const EventSpec& a, const EventSpec& b);

/// Cluster counting with each boundary block contracted to one vertex.
class ClusterCounter {
 public:
  ClusterCounter(const Graph& g, const std::vector<std::vector<int>>& blocks);
  explicit ClusterCounter(const Domain& d);

  /// k(omega): components after contraction.
  int count(Omega omega);
  /// Runs the union-find for `omega`; afterwards `connected` answers queries.
  void build(Omega omega);
  bool connected(int x, int y) { return uf_.same(rep_[x], rep_[y]); }
  int contracted_vertices() const { return num_reps_; }

  /// Thread-safe variants working on caller-owned scratch space.
  void build_into(Omega omega, UnionFind& uf) const;
  bool connected_in(UnionFind& uf, int x, int y) const { return uf.same(rep_[x], rep_[y]); }

 private:
  std::vector<int> rep_;
  std::vector<Edge> edges_;
  int num_reps_ = 0;
  UnionFind uf_;
};

namespace detail {

struct WeightTable {
  int num_edges = 0;
  double log_shift = 0;
  std::vector<double> table;  // [k * (num_edges + 1) + open]
  double operator()(int k, int open) const { return table[static_cast<std::size_t>(k) * (num_edges + 1) + open]; }
};

WeightTable make_weight_table(int max_clusters, int num_edges, const ModelParams& mp);
void check_cap(int num_edges, int cap = kEnumerationCap);
/// Fixed chunking of [0, total) so merged results do not depend on the
/// number of workers.
std::vector<std::pair<std::uint64_t, std::uint64_t>> chunk_ranges(std::uint64_t total);
void run_chunks(int jobs, int num_chunks, const std::function<void(int)>& task);

}  // namespace detail

/// Visits every configuration of `d` with its relative weight. `visit(acc,
/// omega, config, weight)` accumulates into per-chunk copies of `init`, which
/// are merged in chunk order by `merge(into, part)`.
template <class Acc, class Visit, class Merge>
Acc enumerate(const Domain& d, const ModelParams& mp, const Acc& init, Visit visit, Merge merge, int jobs = 1) {
  const int m = d.graph.num_edges();
  detail::check_cap(m);
  const detail::WeightTable wt = detail::make_weight_table(d.graph.num_vertices(), m, mp);
  const auto ranges = detail::chunk_ranges(std::uint64_t{1} << m);
  std::vector<Acc> parts(ranges.size(), init);
  detail::run_chunks(jobs, static_cast<int>(ranges.size()), [&](int c) {
    ClusterCounter counter(d);
    std::vector<std::uint8_t> omega(m);
    for (std::uint64_t bits = ranges[c].first; bits < ranges[c].second; ++bits) {
      const Config cfg{bits};
      cfg.unpack(omega, m);
      const int k = counter.count(omega);
      visit(parts[c], Omega(omega), cfg, wt(k, cfg.open_count()));
    }
  });
  Acc out = init;
  for (const Acc& part : parts) merge(out, part);
  return out;
}

int cluster_count(const Domain& d, Config omega);
double log_weight(const Domain& d, const ModelParams& mp, Config omega);
double weight(const Domain& d, const ModelParams& mp, Config omega);
double log_partition_function(const Domain& d, const ModelParams& mp, int jobs = 1);
double partition_function(const Domain& d, const ModelParams& mp, int jobs = 1);
double prob(const Domain& d, const ModelParams& mp, Config omega, int jobs = 1);
/// Probabilities of every configuration, indexed by bitmask.
std::vector<double> all_probs(const Domain& d, const ModelParams& mp, int jobs = 1);

double event_prob(const Domain& d, const ModelParams& mp, const EventSpec& a, int jobs = 1);
std::vector<double> event_probs(const Domain& d, const ModelParams& mp, const std::vector<EventSpec>& events,
                                int jobs = 1);
double connection_prob(const Domain& d, const ModelParams& mp, int x, int y, int jobs = 1);

Config dualize_config(const DualGraph& dg, Config omega);
double dual_parameter(double p, double q);
double self_dual_point(double q);

struct Derivative {
  double value;
  double error_estimate;
};
/// Central difference with one Richardson step, in p.
Derivative event_prob_derivative(const Domain& d, const ModelParams& mp, const EventSpec& a, double h,
                                 int jobs = 1);

/// P(A(omega^e) and not A(omega_e)).
double pivotal_prob(const Domain& d, const ModelParams& mp, int e, const EventSpec& a, int jobs = 1);
/// P(e pivotal for A and A fails).
double pivotal_and_fail_prob(const Domain& d, const ModelParams& mp, int e, const EventSpec& a, int jobs = 1);

/// Expected Hamming distance from omega to the event.
double expected_hamming(const Domain& d, const ModelParams& mp, const EventSpec& a, int jobs = 1);

struct FkgReport {
  double lhs;  // P(A and B)
  double rhs;  // P(A) P(B)
  bool holds;
};
FkgReport check_fkg(const Domain& d, const ModelParams& mp, const EventSpec& a, const EventSpec& b, int jobs = 1);

struct DominationReport {
  double coarser;  // probability under the coarser (more wired) condition
  double finer;
  bool holds;
};
DominationReport check_domination(const Graph& g, const BoundarySpec& coarser, const BoundarySpec& finer,
                                  const ModelParams& mp, const EventSpec& a, int jobs = 1);

struct FiniteEnergyReport {
  double min_ratio;  // min over omega of P(omega^e) / P(omega_e)
  double max_ratio;
  double lower_bound;  // p / (q (1-p))
  double upper_bound;  // p / (1-p)
  bool holds;
};
FiniteEnergyReport check_finite_energy(const Domain& d, const ModelParams& mp, int e, int jobs = 1);

/// Brute-force check that `a` is increasing; limited to 12 edges.
bool audit_increasing(const Graph& g, const EventSpec& a);

}  // namespace rcm
