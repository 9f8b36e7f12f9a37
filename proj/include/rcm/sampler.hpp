#pragma once

// Markov chains for the random-cluster measure: single-edge heat bath for any
// boundary partition, Chayes-Machta cluster moves for free and wired domains.

#include <cstdint>
#include <functional>
#include <optional>
#include <iosfwd>
#include <random>
#include <vector>

#include "rcm/exact.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

struct Estimate {
  double mean = 0;
  double std_error = 0;
  long long n_samples = 0;
  int n_batches = 0;
};

struct ChainState {
  std::vector<std::uint8_t> current;
  std::mt19937_64 rng;
  long long sweeps_done = 0;
};

/// All edges closed, generator seeded from `seed`.
ChainState make_chain(const Domain& d, std::uint64_t seed);

/// Derives independent per-chain seeds from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class HeatBath {
 public:
  HeatBath(const Domain& d, const ModelParams& mp);

  /// Probability that `e` is open given the rest of `omega`.
  double open_probability(Omega omega, int e) const;
  void step(ChainState& s, int e) const;
  /// Every edge once, in id order.
  void sweep(ChainState& s) const;

 private:
  bool connected_off(Omega omega, int e) const;

  ModelParams mp_;
  std::vector<int> rep_;
  std::vector<Edge> edges_;                        // contracted endpoints
  std::vector<std::vector<Incidence>> adjacency_;  // contracted graph
  mutable std::vector<int> stamp_;
  mutable std::vector<int> stack_;
  mutable int epoch_ = 0;
};

class ChayesMachta {
 public:
  /// Throws UnsupportedDomain unless the condition is free or wired.
  ChayesMachta(const Domain& d, const ModelParams& mp);
  void step(ChainState& s) const;

 private:
  ModelParams mp_;
  std::vector<int> rep_;
  std::vector<Edge> edges_;
  int num_reps_ = 0;
};

enum class Dynamics { Auto, HeatBath, ChayesMachta };

/// One update of the chosen dynamics: a heat-bath sweep or a cluster move.
class Chain {
 public:
  Chain(const Domain& d, const ModelParams& mp, std::uint64_t seed, Dynamics dyn = Dynamics::Auto);
  void advance();
  const std::vector<std::uint8_t>& current() const { return state_.current; }
  ChainState& state() { return state_; }
  Dynamics dynamics() const { return dyn_; }

 private:
  Dynamics dyn_;
  ChainState state_;
  std::optional<HeatBath> hb_;
  std::optional<ChayesMachta> cm_;
};

/// Discards `burn_in` sweeps, then hands each of `n_sweeps` states to `sink`.
void run_chain(const Domain& d, const ModelParams& mp, std::uint64_t seed, long long burn_in, long long n_sweeps,
               const std::function<void(Omega)>& sink, Dynamics dyn = Dynamics::HeatBath);
/// Writes one '0'/'1' string per sweep, edge ids left to right.
void write_stream(std::ostream& os, const Domain& d, const ModelParams& mp, std::uint64_t seed, long long burn_in,
                  long long n_sweeps, Dynamics dyn = Dynamics::HeatBath);

struct EstimateOptions {
  Dynamics dynamics = Dynamics::Auto;
  int n_batches = 100;
  long long burn_in = -1;  // default: budget / 10
  long long min_budget = 10000;
};

/// Batch-means estimates of several events from one chain of `budget` sweeps.
std::vector<Estimate> estimate_events(const Domain& d, const ModelParams& mp, const std::vector<EventSpec>& events,
                                      std::uint64_t seed, long long budget, const EstimateOptions& opt = {});
Estimate estimate_event(const Domain& d, const ModelParams& mp, const EventSpec& a, std::uint64_t seed,
                        long long budget, const EstimateOptions& opt = {});

/// Batch-means mean and standard error of a scalar series.
Estimate batch_means(const std::vector<double>& series, int n_batches);

/// Inverse-variance combination of independent estimates.
Estimate combine(const std::vector<Estimate>& parts);

/// Runs `chains` independent chains (seeds derived from `seed`) on `jobs`
/// threads and combines them per event. Results do not depend on `jobs`.
std::vector<Estimate> estimate_events_parallel(const Domain& d, const ModelParams& mp,
                                               const std::vector<EventSpec>& events, std::uint64_t seed,
                                               long long budget_per_chain, int chains, int jobs,
                                               const EstimateOptions& opt = {});

}  // namespace rcm
