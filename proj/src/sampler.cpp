#include "rcm/sampler.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

namespace rcm {

namespace {

struct Contracted {
  std::vector<int> rep;
  std::vector<Edge> edges;
  int num_reps = 0;
};

Contracted contract(const Domain& d) {
  const Graph& g = d.graph;
  UnionFind merge(g.num_vertices());
  for (const auto& blk : d.bc.blocks(g))
    for (int v : blk) merge.unite(blk.front(), v);
  Contracted c;
  c.rep.assign(g.num_vertices(), -1);
  std::vector<int> id(g.num_vertices(), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int r = merge.find(v);
    if (id[r] < 0) id[r] = c.num_reps++;
    c.rep[v] = id[r];
  }
  for (const Edge& e : g.edges()) c.edges.push_back({c.rep[e.u], c.rep[e.v]});
  return c;
}

double uniform(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ChainState make_chain(const Domain& d, std::uint64_t seed) {
  ChainState s;
  s.current.assign(d.graph.num_edges(), 0);
  s.rng.seed(seed);
  return s;
}

// ---------------------------------------------------------------------------

HeatBath::HeatBath(const Domain& d, const ModelParams& mp) : mp_(mp) {
  Contracted c = contract(d);
  rep_ = std::move(c.rep);
  edges_ = std::move(c.edges);
  adjacency_.resize(c.num_reps);
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    if (ed.u == ed.v) continue;
    adjacency_[ed.u].push_back({ed.v, e});
    adjacency_[ed.v].push_back({ed.u, e});
  }
  stamp_.assign(c.num_reps, 0);
}

bool HeatBath::connected_off(Omega omega, int e) const {
  const int src = edges_[e].u, dst = edges_[e].v;
  if (src == dst) return true;
  ++epoch_;
  stack_.clear();
  stack_.push_back(src);
  stamp_[src] = epoch_;
  while (!stack_.empty()) {
    const int v = stack_.back();
    stack_.pop_back();
    for (const Incidence& inc : adjacency_[v]) {
      if (inc.edge == e || !omega[inc.edge] || stamp_[inc.vertex] == epoch_) continue;
      if (inc.vertex == dst) return true;
      stamp_[inc.vertex] = epoch_;
      stack_.push_back(inc.vertex);
    }
  }
  return false;
}

double HeatBath::open_probability(Omega omega, int e) const {
  if (connected_off(omega, e)) return mp_.p;
  return mp_.p / (mp_.p + mp_.q * (1 - mp_.p));
}

void HeatBath::step(ChainState& s, int e) const {
  const double po = open_probability(s.current, e);
  s.current[e] = uniform(s.rng) < po ? 1 : 0;
}

void HeatBath::sweep(ChainState& s) const {
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) step(s, e);
  ++s.sweeps_done;
}

// ---------------------------------------------------------------------------

ChayesMachta::ChayesMachta(const Domain& d, const ModelParams& mp) : mp_(mp) {
  const auto kind = d.bc.kind();
  if (kind != BoundarySpec::Kind::Free && kind != BoundarySpec::Kind::Wired)
    throw UnsupportedDomain("Chayes-Machta dynamics supports free and wired boundary conditions only");
  Contracted c = contract(d);
  rep_ = std::move(c.rep);
  edges_ = std::move(c.edges);
  num_reps_ = c.num_reps;
}

void ChayesMachta::step(ChainState& s) const {
  thread_local UnionFind uf;
  thread_local std::vector<std::uint8_t> active;
  uf.reset(num_reps_);
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (s.current[e]) uf.unite(edges_[e].u, edges_[e].v);
  // One draw per cluster, in order of the cluster's root vertex.
  active.assign(num_reps_, 2);
  const double keep = 1.0 / mp_.q;
  for (int v = 0; v < num_reps_; ++v) {
    const int r = uf.find(v);
    if (active[r] == 2) active[r] = uniform(s.rng) < keep ? 1 : 0;
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (active[uf.find(edges_[e].u)] == 1 && active[uf.find(edges_[e].v)] == 1)
      s.current[e] = uniform(s.rng) < mp_.p ? 1 : 0;
  }
  ++s.sweeps_done;
}

// ---------------------------------------------------------------------------

Chain::Chain(const Domain& d, const ModelParams& mp, std::uint64_t seed, Dynamics dyn)
    : dyn_(dyn), state_(make_chain(d, seed)) {
  if (dyn_ == Dynamics::Auto) {
    const auto kind = d.bc.kind();
    dyn_ = (kind == BoundarySpec::Kind::Free || kind == BoundarySpec::Kind::Wired) ? Dynamics::ChayesMachta
                                                                                   : Dynamics::HeatBath;
  }
  if (dyn_ == Dynamics::HeatBath)
    hb_.emplace(d, mp);
  else
    cm_.emplace(d, mp);
}

void Chain::advance() {
  if (hb_)
    hb_->sweep(state_);
  else
    cm_->step(state_);
}

void run_chain(const Domain& d, const ModelParams& mp, std::uint64_t seed, long long burn_in, long long n_sweeps,
               const std::function<void(Omega)>& sink, Dynamics dyn) {
  if (burn_in < 0 || n_sweeps < 0) throw Error("burn-in and sweep counts must be >= 0");
  Chain chain(d, mp, seed, dyn);
  for (long long i = 0; i < burn_in; ++i) chain.advance();
  for (long long i = 0; i < n_sweeps; ++i) {
    chain.advance();
    sink(chain.current());
  }
}

void write_stream(std::ostream& os, const Domain& d, const ModelParams& mp, std::uint64_t seed, long long burn_in,
                  long long n_sweeps, Dynamics dyn) {
  std::string line;
  run_chain(
      d, mp, seed, burn_in, n_sweeps,
      [&](Omega o) {
        line.resize(o.size());
        for (std::size_t e = 0; e < o.size(); ++e) line[e] = o[e] ? '1' : '0';
        os << line << '\n';
      },
      dyn);
}

// ---------------------------------------------------------------------------

Estimate batch_means(const std::vector<double>& series, int n_batches) {
  if (n_batches < 2) throw Error("batch means needs at least two batches");
  const std::size_t per = series.size() / n_batches;
  if (per == 0) throw Error("series shorter than the number of batches");
  std::vector<double> means(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double s = 0;
    for (std::size_t i = 0; i < per; ++i) s += series[b * per + i];
    means[b] = s / per;
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / n_batches;
  double ss = 0;
  for (double m : means) ss += (m - mean) * (m - mean);
  Estimate est;
  est.mean = mean;
  est.std_error = std::sqrt(ss / (n_batches - 1) / n_batches);
  est.n_samples = static_cast<long long>(per) * n_batches;
  est.n_batches = n_batches;
  return est;
}

std::vector<Estimate> estimate_events(const Domain& d, const ModelParams& mp, const std::vector<EventSpec>& events,
                                      std::uint64_t seed, long long budget, const EstimateOptions& opt) {
  if (opt.n_batches < 100) throw Error("batch means requires at least 100 batches");
  if (budget < opt.min_budget || budget < opt.n_batches)
    throw Error("budget of " + std::to_string(budget) + " sweeps is below the minimum of " +
                std::to_string(std::max<long long>(opt.min_budget, opt.n_batches)));
  const long long per = budget / opt.n_batches;
  const long long used = per * opt.n_batches;
  const long long burn = opt.burn_in >= 0 ? opt.burn_in : budget / 10;
  std::vector<std::vector<double>> series(events.size(), std::vector<double>());
  for (auto& s : series) s.reserve(used);
  run_chain(
      d, mp, seed, burn, used,
      [&](Omega o) {
        for (std::size_t i = 0; i < events.size(); ++i) series[i].push_back(events[i].holds(o) ? 1.0 : 0.0);
      },
      opt.dynamics);
  std::vector<Estimate> out;
  for (const auto& s : series) out.push_back(batch_means(s, opt.n_batches));
  return out;
}

Estimate estimate_event(const Domain& d, const ModelParams& mp, const EventSpec& a, std::uint64_t seed,
                        long long budget, const EstimateOptions& opt) {
  return estimate_events(d, mp, {a}, seed, budget, opt)[0];
}

Estimate combine(const std::vector<Estimate>& parts) {
  if (parts.empty()) throw Error("nothing to combine");
  if (parts.size() == 1) return parts[0];
  Estimate out;
  bool any_zero = false;
  for (const auto& p : parts) {
    out.n_samples += p.n_samples;
    out.n_batches += p.n_batches;
    if (p.std_error <= 0) any_zero = true;
  }
  if (any_zero) {
    // Degenerate chains: fall back to the plain average with pooled spread.
    double s = 0, s2 = 0;
    for (const auto& p : parts) {
      s += p.mean;
      s2 += p.std_error * p.std_error;
    }
    out.mean = s / parts.size();
    out.std_error = std::sqrt(s2) / parts.size();
    return out;
  }
  double wsum = 0, acc = 0;
  for (const auto& p : parts) {
    const double w = 1.0 / (p.std_error * p.std_error);
    wsum += w;
    acc += w * p.mean;
  }
  out.mean = acc / wsum;
  out.std_error = std::sqrt(1.0 / wsum);
  return out;
}

std::vector<Estimate> estimate_events_parallel(const Domain& d, const ModelParams& mp,
                                               const std::vector<EventSpec>& events, std::uint64_t seed,
                                               long long budget_per_chain, int chains, int jobs,
                                               const EstimateOptions& opt) {
  if (chains < 1) throw Error("need at least one chain");
  std::vector<std::vector<Estimate>> per_chain(chains);
  detail::run_chunks(jobs, chains, [&](int c) {
    per_chain[c] = estimate_events(d, mp, events, derive_seed(seed, c), budget_per_chain, opt);
  });
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::vector<Estimate> parts;
    for (const auto& pc : per_chain) parts.push_back(pc[i]);
    out.push_back(combine(parts));
  }
  return out;
}

}  // namespace rcm
