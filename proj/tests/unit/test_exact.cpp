#include <cmath>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "rcm/exact.hpp"

using namespace rcm;

namespace {

// Independent brute force: explicit products, no log-space, own DFS.
namespace naive {

int clusters(const Graph& g, const std::vector<std::vector<int>>& blocks, std::uint64_t bits) {
  std::vector<std::vector<int>> adj(g.num_vertices());
  for (int e = 0; e < g.num_edges(); ++e)
    if ((bits >> e) & 1u) {
      adj[g.edge(e).u].push_back(g.edge(e).v);
      adj[g.edge(e).v].push_back(g.edge(e).u);
    }
  for (const auto& b : blocks)
    for (std::size_t i = 1; i < b.size(); ++i) {
      adj[b[0]].push_back(b[i]);
      adj[b[i]].push_back(b[0]);
    }
  std::vector<char> seen(g.num_vertices(), 0);
  int k = 0;
  for (int s = 0; s < g.num_vertices(); ++s) {
    if (seen[s]) continue;
    ++k;
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) seen[w] = 1, stack.push_back(w);
    }
  }
  return k;
}

std::vector<double> probs(const Domain& d, double p, double q) {
  const auto blocks = d.bc.blocks(d.graph);
  const int m = d.graph.num_edges();
  std::vector<double> w(std::size_t{1} << m);
  for (std::uint64_t b = 0; b < w.size(); ++b) {
    const int o = std::popcount(b);
    w[b] = std::pow(q, clusters(d.graph, blocks, b)) * std::pow(p, o) * std::pow(1 - p, m - o);
  }
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= z;
  return w;
}

}  // namespace naive

Graph path_graph(int edges) {
  Graph g;
  for (int i = 0; i <= edges; ++i) g.add_vertex({i, 0, 0});
  for (int i = 0; i < edges; ++i) g.add_edge(i, i + 1);
  g.set_boundary({0, edges});
  return g;
}

std::vector<Domain> small_domains() {
  std::vector<Domain> out;
  const Graph b1 = build_box(1);
  const Graph sq = build_rectangle(0, 1, 0, 1);
  const Graph r = build_rectangle(0, 2, 0, 1);
  out.emplace_back(path_graph(3), BoundarySpec::free());
  out.emplace_back(path_graph(3), BoundarySpec::wired());
  out.emplace_back(sq, BoundarySpec::free());
  out.emplace_back(sq, BoundarySpec::wired());
  out.emplace_back(r, BoundarySpec::dobrushin(r.vertex_at({0, 1, 0}), r.vertex_at({2, 1, 0})));
  out.emplace_back(r, BoundarySpec::partition({{r.vertex_at({0, 0, 0}), r.vertex_at({2, 1, 0})}}));
  out.emplace_back(b1, BoundarySpec::free());
  out.emplace_back(b1, BoundarySpec::wired());
  return out;
}

}  // namespace

TEST_CASE("cluster counts") {
  const Graph one = path_graph(1);
  CHECK(cluster_count(Domain(one, BoundarySpec::free()), Config{0}) == 2);
  CHECK(cluster_count(Domain(one, BoundarySpec::free()), Config{1}) == 1);
  CHECK(cluster_count(Domain(one, BoundarySpec::wired()), Config{0}) == 1);
  CHECK(cluster_count(Domain(one, BoundarySpec::wired()), Config{1}) == 1);
  CHECK(cluster_count(Domain(path_graph(2), BoundarySpec::free()), Config{0b01}) == 2);
}

TEST_CASE("cluster counts are bracketed by free and wired") {
  for (const Domain& d : small_domains()) {
    const Domain f(d.graph, BoundarySpec::free()), w(d.graph, BoundarySpec::wired());
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << d.graph.num_edges()); ++b) {
      const int k = cluster_count(d, Config{b});
      CHECK(cluster_count(w, Config{b}) <= k);
      CHECK(k <= cluster_count(f, Config{b}));
    }
  }
}

TEST_CASE("golden partition functions and probabilities") {
  const ModelParams mp(0.5, 2.0);
  const Domain one(path_graph(1), BoundarySpec::free());
  CHECK(partition_function(one, mp) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(prob(one, mp, Config{1}) - 1.0 / 3) < 1e-14);
  CHECK(std::abs(connection_prob(one, mp, 0, 1) - 1.0 / 3) < 1e-14);
  const Domain two(path_graph(2), BoundarySpec::free());
  CHECK(std::abs(partition_function(two, mp) - 4.5) < 1e-12);
  CHECK(std::abs(connection_prob(two, mp, 0, 2) - 1.0 / 9) < 1e-14);
  CHECK(event_prob(two, mp, always_event()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(connection_prob(two, mp, 1, 1) == 1.0);
}

TEST_CASE("probabilities match a naive enumeration") {
  for (const Domain& d : small_domains())
    for (double q : {1.0, 2.0, 3.7})
      for (double p : {0.1, 0.5, 0.83}) {
        const auto exact = all_probs(d, ModelParams(p, q));
        const auto ref = naive::probs(d, p, q);
        REQUIRE(exact.size() == ref.size());
        double total = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
          CHECK(std::abs(exact[i] - ref[i]) < 1e-13);
          total += exact[i];
        }
        CHECK(std::abs(total - 1) < 1e-10);
      }
}

TEST_CASE("q = 1 is the product measure") {
  const Domain d(build_rectangle(0, 2, 0, 1), BoundarySpec::wired());
  const double p = 0.3;
  const auto probs = all_probs(d, ModelParams(p, 1.0));
  for (std::uint64_t b = 0; b < probs.size(); ++b) {
    const int o = std::popcount(b);
    CHECK(std::abs(probs[b] - std::pow(p, o) * std::pow(1 - p, d.graph.num_edges() - o)) < 1e-15);
  }
}

TEST_CASE("large weights stay finite in log space") {
  const Domain d(build_rectangle(0, 3, 0, 3), BoundarySpec::free());
  const ModelParams mp(1e-3, 4.0);
  CHECK(std::isfinite(log_partition_function(d, mp)));
  CHECK(event_prob(d, mp, always_event()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(partition_function(Domain(build_rectangle(0, 4, 0, 3), BoundarySpec::free()), mp),
                  EnumerationTooLarge);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams(0.0, 2.0), Error);
  CHECK_THROWS_AS(ModelParams(1.0, 2.0), Error);
  CHECK_THROWS_AS(ModelParams(0.5, 0.5), Error);
}

TEST_CASE("enumeration does not depend on the worker count") {
  const Domain d(build_box(1), BoundarySpec::free());
  const ModelParams mp(0.41, 2.5);
  const EventSpec a = connection_event(d, d.graph.vertex_at({-1, -1, 0}), d.graph.vertex_at({1, 1, 0}));
  const double one = event_prob(d, mp, a, 1);
  CHECK(event_prob(d, mp, a, 3) == one);
  CHECK(log_partition_function(d, mp, 4) == log_partition_function(d, mp, 1));
}

TEST_CASE("dual parameters") {
  CHECK(self_dual_point(1) == 0.5);
  CHECK(std::abs(self_dual_point(4) - 2.0 / 3) < 1e-15);
  CHECK(std::abs(dual_parameter(0.5, 2) - 2.0 / 3) < 1e-15);
  for (double q : {1.0, 2.0, 3.5, 4.0})
    for (int i = 1; i < 20; ++i) {
      const double p = i / 20.0, ps = dual_parameter(p, q);
      CHECK(std::abs(dual_parameter(ps, q) - p) < 1e-12);
      CHECK(std::abs(p * ps / ((1 - p) * (1 - ps)) - q) < 1e-9);
      CHECK(std::abs(dual_parameter(self_dual_point(q), q) - self_dual_point(q)) < 1e-15);
    }
}

TEST_CASE("configuration duality") {
  const Domain d(build_box(1), BoundarySpec::free());
  const DualGraph dg = dual_graph(d);
  const int m = d.graph.num_edges();
  const std::uint64_t all = (std::uint64_t{1} << m) - 1;
  CHECK(dualize_config(dg, Config{all}).bits == 0);
  for (std::uint64_t b = 0; b <= all; b += 37) {
    const Config star = dualize_config(dg, Config{b});
    CHECK(Config{b}.open_count() + star.open_count() == m);
    CHECK(dualize_config(dg.inverse(), star).bits == b);
  }
}

TEST_CASE("duality identity on planar domains") {
  std::vector<Domain> domains;
  const Graph r = build_rectangle(0, 2, 0, 1);
  domains.emplace_back(build_box(1), BoundarySpec::free());
  domains.emplace_back(build_box(1), BoundarySpec::wired());
  domains.emplace_back(r, BoundarySpec::free());
  domains.emplace_back(r, BoundarySpec::dobrushin(r.vertex_at({0, 1, 0}), r.vertex_at({2, 0, 0})));
  domains.emplace_back(build_box(1, BoxKind::HalfPlane), BoundarySpec::free());
  for (const Domain& d : domains)
    for (double q : {1.0, 2.0, 4.0})
      for (double p : {0.3, 0.5, self_dual_point(q)}) {
        const DualGraph dg = dual_graph(d);
        const auto a = all_probs(d, ModelParams(p, q));
        const auto b = all_probs(dg.domain(), ModelParams(dual_parameter(p, q), q));
        double err = 0;
        for (std::uint64_t w = 0; w < a.size(); ++w)
          err = std::max(err, std::abs(a[w] - b[dualize_config(dg, Config{w}).bits]));
        CHECK(err <= 1e-12);
      }
}

TEST_CASE("derivatives") {
  const Domain one(path_graph(1), BoundarySpec::free());
  for (double p : {0.2, 0.5, 0.7}) {
    const Derivative d = event_prob_derivative(one, ModelParams(p, 1.0), edge_open_event(0), 1e-3);
    CHECK(std::abs(d.value - 1) < 1e-9);
    CHECK(std::abs(event_prob_derivative(one, ModelParams(p, 2.0), always_event(), 1e-3).value) < 1e-12);
  }
  // d/dp of 2p^2 / (8(1-p)^2 + 8p(1-p) + 2p^2) at p = 1/2 is 16/27.
  const Domain two(path_graph(2), BoundarySpec::free());
  const Derivative d = event_prob_derivative(two, ModelParams(0.5, 2.0), connection_event(two, 0, 2), 1e-3);
  CHECK(std::abs(d.value - 16.0 / 27) < 1e-9);
  CHECK(std::abs(d.value - 16.0 / 27) <= d.error_estimate);
  CHECK_THROWS_AS(event_prob_derivative(two, ModelParams(0.05, 2.0), always_event(), 0.1), Error);
}

TEST_CASE("pivotality") {
  const ModelParams mp(0.5, 2.0);
  const Domain one(path_graph(1), BoundarySpec::free());
  CHECK(std::abs(pivotal_prob(one, mp, 0, edge_open_event(0)) - 1) < 1e-15);
  const Domain two(path_graph(2), BoundarySpec::free());
  const EventSpec ac = connection_event(two, 0, 2);
  // e0 is pivotal exactly when e1 is open: (1 + 1/2) / 4.5.
  CHECK(std::abs(pivotal_prob(two, mp, 0, ac) - 1.0 / 3) < 1e-14);
  CHECK(std::abs(pivotal_prob(two, mp, 1, edge_open_event(0))) < 1e-15);
  // Pivotal and failing: e1 open, e0 closed: 1 / 4.5.
  CHECK(std::abs(pivotal_and_fail_prob(two, mp, 0, ac) - 1.0 / 4.5) < 1e-14);
  EventSpec dec{"closed", [](Omega o) { return o[0] == 0; }, false};
  CHECK_THROWS_AS(pivotal_prob(two, mp, 0, dec), Error);
}

TEST_CASE("expected Hamming distance") {
  const Domain one(path_graph(1), BoundarySpec::free());
  for (double p : {0.2, 0.6}) CHECK(std::abs(expected_hamming(one, ModelParams(p, 1.0), all_open_event(1)) - (1 - p)) < 1e-14);
  const Domain two(path_graph(2), BoundarySpec::free());
  // Closed edges count: (2*2 + 1 + 1 + 0) / 4.5.
  CHECK(std::abs(expected_hamming(two, ModelParams(0.5, 2.0), connection_event(two, 0, 2)) - 4.0 / 3) < 1e-14);
  CHECK(expected_hamming(two, ModelParams(0.5, 2.0), always_event()) == 0.0);
  CHECK_THROWS_AS(expected_hamming(two, ModelParams(0.5, 2.0), never_event()), Error);
}

TEST_CASE("FKG on small examples") {
  const ModelParams mp(0.5, 2.0);
  const Domain two(path_graph(2), BoundarySpec::free());
  const EventSpec ab = connection_event(two, 0, 1), bc = connection_event(two, 1, 2);
  const FkgReport same = check_fkg(two, mp, ab, ab);
  CHECK(same.holds);
  CHECK(same.lhs >= same.rhs);
  // Free clusters on a tree are independent edges, so the pair is uncorrelated.
  const FkgReport tree = check_fkg(two, mp, ab, bc);
  CHECK(tree.holds);
  CHECK(std::abs(tree.lhs - 1.0 / 9) < 1e-14);
  CHECK(std::abs(tree.lhs - tree.rhs) < 1e-14);
  const FkgReport indep = check_fkg(two, ModelParams(0.3, 1.0), edge_open_event(0), edge_open_event(1));
  CHECK(std::abs(indep.lhs - indep.rhs) < 1e-15);
  // A cycle correlates its edges strictly.
  const Domain sq(build_rectangle(0, 1, 0, 1), BoundarySpec::free());
  const FkgReport cyc = check_fkg(sq, mp, edge_open_event(0), edge_open_event(1));
  CHECK(cyc.lhs > cyc.rhs + 1e-6);
}

TEST_CASE("domination and finite energy") {
  const Graph b1 = build_box(1);
  const ModelParams mp(0.5, 2.0);
  const Domain f(b1, BoundarySpec::free());
  const EventSpec a = connection_to_set_event(f, b1.vertex_at({0, 0, 0}), b1.boundary());
  const DominationReport strict = check_domination(b1, BoundarySpec::wired(), BoundarySpec::free(), mp, a);
  CHECK(strict.holds);
  CHECK(strict.coarser > strict.finer + 1e-6);
  const DominationReport eq = check_domination(b1, BoundarySpec::free(), BoundarySpec::free(), mp, a);
  CHECK(eq.coarser == eq.finer);
  CHECK_THROWS_AS(check_domination(b1, BoundarySpec::free(), BoundarySpec::wired(), mp, a), Error);

  for (double q : {1.0, 2.0, 4.0}) {
    const FiniteEnergyReport r = check_finite_energy(f, ModelParams(0.4, q), 5);
    CHECK(r.holds);
    CHECK(std::abs(r.lower_bound - 0.4 / (q * 0.6)) < 1e-15);
    if (q == 1.0) {
      CHECK(std::abs(r.min_ratio - 0.4 / 0.6) < 1e-12);
      CHECK(std::abs(r.max_ratio - 0.4 / 0.6) < 1e-12);
    }
  }
}

TEST_CASE("increasing events are nondecreasing in p and audited") {
  const Domain d(build_rectangle(0, 2, 0, 1), BoundarySpec::free());
  const std::vector<EventSpec> events{connection_event(d, 0, d.graph.num_vertices() - 1), edge_open_event(3),
                                      all_open_event(d.graph.num_edges())};
  for (const EventSpec& a : events) {
    CHECK(audit_increasing(d.graph, a));
    double prev = -1;
    for (int i = 1; i <= 9; ++i) {
      const double v = event_prob(d, ModelParams(i / 10.0, 2.5), a);
      CHECK(v >= prev);
      prev = v;
    }
  }
  CHECK_FALSE(audit_increasing(d.graph, EventSpec{"closed", [](Omega o) { return o[0] == 0; }, true}));
}

TEST_CASE("Russo positivity and the Hamming inequality") {
  const Domain d(build_rectangle(0, 2, 0, 1), BoundarySpec::wired());
  const Domain f(build_rectangle(0, 2, 0, 1), BoundarySpec::free());
  const EventSpec a = connection_event(f, 0, f.graph.num_vertices() - 1);
  for (const Domain* dom : {&f, &d})
    for (double q : {1.0, 2.0, 4.0})
      for (int i = 2; i <= 8; ++i) {
        const ModelParams mp(i / 10.0, q);
        const double pa = event_prob(*dom, mp, a);
        const Derivative dp = event_prob_derivative(*dom, mp, a, 1e-3);
        CHECK(dp.value >= 0);
        double piv = 0;
        for (int e = 0; e < dom->graph.num_edges(); ++e) piv += pivotal_and_fail_prob(*dom, mp, e, a);
        if (piv > 0) CHECK(dp.value / (piv / (1 - mp.p)) > 0);
        CHECK(dp.value / pa >= expected_hamming(*dom, mp, a) / (mp.p * (1 - mp.p)) - 1e-6);
      }
}
