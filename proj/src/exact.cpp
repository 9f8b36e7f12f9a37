#include "rcm/exact.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <memory>

namespace rcm {

ModelParams::ModelParams(double p_, double q_) : p(p_), q(q_) {
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1), got " + std::to_string(p));
  if (!(q >= 1.0) || !std::isfinite(q)) throw Error("q must be >= 1, got " + std::to_string(q));
}

void Config::unpack(std::vector<std::uint8_t>& omega, int num_edges) const {
  omega.resize(num_edges);
  for (int e = 0; e < num_edges; ++e) omega[e] = static_cast<std::uint8_t>((bits >> e) & 1u);
}

Config Config::pack(Omega omega) {
  if (omega.size() > 64) throw Error("configuration too long for a bitmask");
  Config c;
  for (std::size_t e = 0; e < omega.size(); ++e)
    if (omega[e]) c.bits |= std::uint64_t{1} << e;
  return c;
}

// ---------------------------------------------------------------------------
// Cluster counting

ClusterCounter::ClusterCounter(const Graph& g, const std::vector<std::vector<int>>& blocks) {
  const int n = g.num_vertices();
  UnionFind merge(n);
  for (const auto& blk : blocks)
    for (int v : blk) merge.unite(blk.front(), v);
  rep_.assign(n, -1);
  std::vector<int> id_of_root(n, -1);
  for (int v = 0; v < n; ++v) {
    const int r = merge.find(v);
    if (id_of_root[r] < 0) id_of_root[r] = num_reps_++;
    rep_[v] = id_of_root[r];
  }
  edges_.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges_.push_back({rep_[e.u], rep_[e.v]});
  uf_.reset(num_reps_);
}

ClusterCounter::ClusterCounter(const Domain& d) : ClusterCounter(d.graph, d.bc.blocks(d.graph)) {}

void ClusterCounter::build_into(Omega omega, UnionFind& uf) const {
  uf.reset(num_reps_);
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (omega[e]) uf.unite(edges_[e].u, edges_[e].v);
}

void ClusterCounter::build(Omega omega) { build_into(omega, uf_); }

int ClusterCounter::count(Omega omega) {
  build(omega);
  return uf_.components();
}

// ---------------------------------------------------------------------------
// Events

EventSpec always_event() { return {"always", [](Omega) { return true; }, true}; }
EventSpec never_event() { return {"never", [](Omega) { return false; }, true}; }

EventSpec edge_open_event(int e) {
  return {"edge " + std::to_string(e) + " open", [e](Omega o) { return o[e] != 0; }, true};
}

EventSpec all_open_event(int num_edges) {
  return {"all open",
          [num_edges](Omega o) {
            for (int e = 0; e < num_edges; ++e)
              if (!o[e]) return false;
            return true;
          },
          true};
}

EventSpec connection_event(const Domain& d, int x, int y) {
  auto counter = std::make_shared<const ClusterCounter>(d);
  return {to_string(d.graph.coord(x)) + "<->" + to_string(d.graph.coord(y)),
          [counter, x, y](Omega o) {
            thread_local UnionFind uf;
            counter->build_into(o, uf);
            return counter->connected_in(uf, x, y);
          },
          true};
}

EventSpec connection_to_set_event(const Domain& d, int x, std::vector<int> targets) {
  auto counter = std::make_shared<const ClusterCounter>(d);
  return {to_string(d.graph.coord(x)) + "<->set",
          [counter, x, targets = std::move(targets)](Omega o) {
            thread_local UnionFind uf;
            counter->build_into(o, uf);
            for (int t : targets)
              if (counter->connected_in(uf, x, t)) return true;
            return false;
          },
          true};
}

EventSpec intersection_event(const EventSpec& a, const EventSpec& b) {
  return {a.name + " & " + b.name, [ha = a.holds, hb = b.holds](Omega o) { return ha(o) && hb(o); },
          a.increasing && b.increasing};
}

// ---------------------------------------------------------------------------
// Enumeration plumbing

namespace detail {

WeightTable make_weight_table(int max_clusters, int num_edges, const ModelParams& mp) {
  WeightTable wt;
  wt.num_edges = num_edges;
  const double lq = std::log(mp.q), lp = std::log(mp.p), l1p = std::log1p(-mp.p);
  wt.log_shift = max_clusters * lq + num_edges * std::max(lp, l1p);
  wt.table.resize(static_cast<std::size_t>(max_clusters + 1) * (num_edges + 1));
  for (int k = 0; k <= max_clusters; ++k)
    for (int o = 0; o <= num_edges; ++o)
      wt.table[static_cast<std::size_t>(k) * (num_edges + 1) + o] =
          std::exp(k * lq + o * lp + (num_edges - o) * l1p - wt.log_shift);
  return wt;
}

void check_cap(int num_edges, int cap) {
  if (num_edges > cap)
    throw EnumerationTooLarge("exact enumeration limited to " + std::to_string(cap) + " edges, domain has " +
                              std::to_string(num_edges));
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> chunk_ranges(std::uint64_t total) {
  const std::uint64_t chunk = std::max<std::uint64_t>(1024, total / 256);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t lo = 0; lo < total; lo += chunk) out.emplace_back(lo, std::min(total, lo + chunk));
  return out;
}

void run_chunks(int jobs, int num_chunks, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(jobs, num_chunks));
  if (workers == 1) {
    for (int c = 0; c < num_chunks; ++c) task(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int c = next++; c < num_chunks; c = next++) task(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

namespace {

struct Sums {
  double z = 0;
  std::vector<double> s;
};

void add_sums(Sums& into, const Sums& part) {
  into.z += part.z;
  for (std::size_t i = 0; i < into.s.size(); ++i) into.s[i] += part.s[i];
}

// Z and weighted sums of per-configuration scores.
template <class Score>
Sums weighted_sums(const Domain& d, const ModelParams& mp, std::size_t n, Score score, int jobs) {
  Sums init;
  init.s.assign(n, 0.0);
  return enumerate(
      d, mp, init,
      [&](Sums& acc, Omega o, Config c, double w) {
        acc.z += w;
        score(acc.s, o, c, w);
      },
      add_sums, jobs);
}

}  // namespace

int cluster_count(const Domain& d, Config omega) {
  std::vector<std::uint8_t> o;
  omega.unpack(o, d.graph.num_edges());
  ClusterCounter counter(d);
  return counter.count(o);
}

double log_weight(const Domain& d, const ModelParams& mp, Config omega) {
  const int m = d.graph.num_edges();
  const int o = omega.open_count();
  return cluster_count(d, omega) * std::log(mp.q) + o * std::log(mp.p) + (m - o) * std::log1p(-mp.p);
}

double weight(const Domain& d, const ModelParams& mp, Config omega) { return std::exp(log_weight(d, mp, omega)); }

double log_partition_function(const Domain& d, const ModelParams& mp, int jobs) {
  const auto sums = weighted_sums(d, mp, 0, [](auto&, Omega, Config, double) {}, jobs);
  const auto wt = detail::make_weight_table(d.graph.num_vertices(), d.graph.num_edges(), mp);
  return std::log(sums.z) + wt.log_shift;
}

double partition_function(const Domain& d, const ModelParams& mp, int jobs) {
  return std::exp(log_partition_function(d, mp, jobs));
}

double prob(const Domain& d, const ModelParams& mp, Config omega, int jobs) {
  return std::exp(log_weight(d, mp, omega) - log_partition_function(d, mp, jobs));
}

std::vector<double> all_probs(const Domain& d, const ModelParams& mp, int jobs) {
  const int m = d.graph.num_edges();
  detail::check_cap(m, 24);
  std::vector<double> w(std::size_t{1} << m, 0.0);
  const double z = enumerate(
      d, mp, 0.0,
      [&](double& acc, Omega, Config c, double wt) {
        w[c.bits] = wt;
        acc += wt;
      },
      [](double& into, double part) { into += part; }, jobs);
  for (double& x : w) x /= z;
  return w;
}

std::vector<double> event_probs(const Domain& d, const ModelParams& mp, const std::vector<EventSpec>& events,
                                int jobs) {
  const auto sums = weighted_sums(
      d, mp, events.size(),
      [&](std::vector<double>& s, Omega o, Config, double w) {
        for (std::size_t i = 0; i < events.size(); ++i)
          if (events[i].holds(o)) s[i] += w;
      },
      jobs);
  std::vector<double> out(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) out[i] = sums.s[i] / sums.z;
  return out;
}

double event_prob(const Domain& d, const ModelParams& mp, const EventSpec& a, int jobs) {
  return event_probs(d, mp, {a}, jobs)[0];
}

double connection_prob(const Domain& d, const ModelParams& mp, int x, int y, int jobs) {
  if (x == y) return 1.0;
  return event_prob(d, mp, connection_event(d, x, y), jobs);
}

// ---------------------------------------------------------------------------
// Duality

Config dualize_config(const DualGraph& dg, Config omega) {
  Config out;
  for (std::size_t e = 0; e < dg.to_dual.size(); ++e)
    if (!omega.open(static_cast<int>(e))) out.bits |= std::uint64_t{1} << dg.to_dual[e];
  return out;
}

double dual_parameter(double p, double q) {
  ModelParams(p, q);
  return q * (1 - p) / (q * (1 - p) + p);
}

double self_dual_point(double q) {
  if (!(q >= 1.0)) throw Error("q must be >= 1");
  return std::sqrt(q) / (1 + std::sqrt(q));
}

// ---------------------------------------------------------------------------
// Derivatives, pivotality, Hamming distance

Derivative event_prob_derivative(const Domain& d, const ModelParams& mp, const EventSpec& a, double h, int jobs) {
  if (!(h > 0) || mp.p - h <= 0 || mp.p + h >= 1) throw Error("derivative step leaves (0,1)");
  auto f = [&](double p) { return event_prob(d, ModelParams(p, mp.q), a, jobs); };
  const double d1 = (f(mp.p + h) - f(mp.p - h)) / (2 * h);
  const double d2 = (f(mp.p + h / 2) - f(mp.p - h / 2)) / h;
  const double r = (4 * d2 - d1) / 3;
  return {r, std::abs(r - d2)};
}

namespace {

void require_increasing(const EventSpec& a, const char* what) {
  if (!a.increasing) throw Error(std::string(what) + " requires an increasing event, got '" + a.name + "'");
}

double pivotal_impl(const Domain& d, const ModelParams& mp, int e, const EventSpec& a, bool require_fail, int jobs) {
  require_increasing(a, "pivotality");
  if (e < 0 || e >= d.graph.num_edges()) throw Error("edge out of range");
  const auto sums = weighted_sums(
      d, mp, 1,
      [&](std::vector<double>& s, Omega o, Config, double w) {
        thread_local std::vector<std::uint8_t> buf;
        buf.assign(o.begin(), o.end());
        buf[e] = 1;
        if (!a.holds(buf)) return;
        buf[e] = 0;
        if (a.holds(buf)) return;
        if (require_fail && o[e]) return;
        s[0] += w;
      },
      jobs);
  return sums.s[0] / sums.z;
}

}  // namespace

double pivotal_prob(const Domain& d, const ModelParams& mp, int e, const EventSpec& a, int jobs) {
  return pivotal_impl(d, mp, e, a, false, jobs);
}

double pivotal_and_fail_prob(const Domain& d, const ModelParams& mp, int e, const EventSpec& a, int jobs) {
  return pivotal_impl(d, mp, e, a, true, jobs);
}

double expected_hamming(const Domain& d, const ModelParams& mp, const EventSpec& a, int jobs) {
  const int m = d.graph.num_edges();
  detail::check_cap(m);
  const std::uint64_t total = std::uint64_t{1} << m;
  constexpr std::uint8_t kUnset = std::numeric_limits<std::uint8_t>::max();
  std::vector<std::uint8_t> dist(total, kUnset);
  std::vector<std::uint32_t> queue;
  std::vector<std::uint8_t> o;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    Config{bits}.unpack(o, m);
    if (a.holds(o)) {
      dist[bits] = 0;
      queue.push_back(static_cast<std::uint32_t>(bits));
    }
  }
  if (queue.empty()) throw Error("Hamming distance to an empty event is infinite");
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t x = queue[head];
    for (int e = 0; e < m; ++e) {
      const std::uint32_t y = x ^ (std::uint32_t{1} << e);
      if (dist[y] == kUnset) {
        dist[y] = static_cast<std::uint8_t>(dist[x] + 1);
        queue.push_back(y);
      }
    }
  }
  const auto sums = weighted_sums(
      d, mp, 1, [&](std::vector<double>& s, Omega, Config c, double w) { s[0] += w * dist[c.bits]; }, jobs);
  return sums.s[0] / sums.z;
}

// ---------------------------------------------------------------------------
// Inequality checks

FkgReport check_fkg(const Domain& d, const ModelParams& mp, const EventSpec& a, const EventSpec& b, int jobs) {
  require_increasing(a, "FKG");
  require_increasing(b, "FKG");
  const auto v = event_probs(d, mp, {intersection_event(a, b), a, b}, jobs);
  const double rhs = v[1] * v[2];
  return {v[0], rhs, v[0] >= rhs - 1e-12};
}

DominationReport check_domination(const Graph& g, const BoundarySpec& coarser, const BoundarySpec& finer,
                                  const ModelParams& mp, const EventSpec& a, int jobs) {
  require_increasing(a, "domination");
  if (!coarsens(g, coarser, finer)) throw Error("boundary conditions are not ordered: partition mismatch");
  const double hi = event_prob(Domain(g, coarser), mp, a, jobs);
  const double lo = event_prob(Domain(g, finer), mp, a, jobs);
  return {hi, lo, hi >= lo - 1e-12};
}

FiniteEnergyReport check_finite_energy(const Domain& d, const ModelParams& mp, int e, int jobs) {
  const int m = d.graph.num_edges();
  detail::check_cap(m);
  if (e < 0 || e >= m) throw Error("edge out of range");
  const double base = mp.p / (1 - mp.p);
  struct MinMax {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
  };
  const auto ranges = detail::chunk_ranges(std::uint64_t{1} << m);
  std::vector<MinMax> parts(ranges.size());
  detail::run_chunks(jobs, static_cast<int>(ranges.size()), [&](int c) {
    ClusterCounter counter(d);
    std::vector<std::uint8_t> o;
    for (std::uint64_t bits = ranges[c].first; bits < ranges[c].second; ++bits) {
      const Config cfg{bits};
      if (cfg.open(e)) continue;
      cfg.unpack(o, m);
      const int k_closed = counter.count(o);
      o[e] = 1;
      const int k_open = counter.count(o);
      const double r = base * std::pow(mp.q, k_open - k_closed);
      parts[c].lo = std::min(parts[c].lo, r);
      parts[c].hi = std::max(parts[c].hi, r);
    }
  });
  MinMax all;
  for (const auto& p : parts) {
    all.lo = std::min(all.lo, p.lo);
    all.hi = std::max(all.hi, p.hi);
  }
  FiniteEnergyReport rep{all.lo, all.hi, mp.p / (mp.q * (1 - mp.p)), base, false};
  const double tol = 1e-12 * base;
  rep.holds = rep.min_ratio >= rep.lower_bound - tol && rep.max_ratio <= rep.upper_bound + tol;
  return rep;
}

bool audit_increasing(const Graph& g, const EventSpec& a) {
  const int m = g.num_edges();
  if (m > 12) throw EnumerationTooLarge("monotonicity audit limited to 12 edges");
  std::vector<std::uint8_t> o;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    Config{bits}.unpack(o, m);
    if (!a.holds(o)) continue;
    for (int e = 0; e < m; ++e) {
      if (o[e]) continue;
      o[e] = 1;
      const bool up = a.holds(o);
      o[e] = 0;
      if (!up) return false;
    }
  }
  return true;
}

}  // namespace rcm
