#include <cmath>
#include <functional>

#include "commands.hpp"
#include "rcm/exact.hpp"
#include "rcm/experiments.hpp"

namespace rcm::cli {

namespace {

Graph path_graph(int edges) {
  Graph g;
  for (int i = 0; i <= edges; ++i) g.add_vertex({i, 0, 0});
  for (int i = 0; i < edges; ++i) g.add_edge(i, i + 1);
  g.set_boundary({0, edges});
  return g;
}

struct Check {
  std::string name;
  bool pass;
  double value;
  std::string detail;
};

Check golden_values() {
  const ModelParams mp(0.5, 2.0);
  const Domain one(path_graph(1), BoundarySpec::free());
  const Domain two(path_graph(2), BoundarySpec::free());
  const double err = std::max({std::abs(partition_function(one, mp) - 3.0),
                               std::abs(event_prob(one, mp, edge_open_event(0)) - 1.0 / 3),
                               std::abs(partition_function(two, mp) - 4.5),
                               std::abs(connection_prob(two, mp, 0, 2) - 1.0 / 9)});
  return {"golden_values", err <= 1e-12, err, "single edge and two-edge path at q=2, p=1/2"};
}

Check duality(const Domain& d, const ModelParams& mp, const std::string& name) {
  const DualGraph dg = dual_graph(d);
  const ModelParams dmp(dual_parameter(mp.p, mp.q), mp.q);
  const auto primal = all_probs(d, mp);
  const auto dual = all_probs(dg.domain(), dmp);
  double err = 0;
  for (std::uint64_t b = 0; b < primal.size(); ++b)
    err = std::max(err, std::abs(primal[b] - dual[dualize_config(dg, Config{b}).bits]));
  return {"duality_" + name, err <= 1e-10, err, "max |P(omega) - P*(omega*)|"};
}

Check fkg(const Domain& d, const ModelParams& mp) {
  const int nv = d.graph.num_vertices();
  double worst = 0;
  bool ok = true;
  for (int a = 0; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b)
      for (int c = 0; c < nv; ++c)
        for (int e = c + 1; e < nv; ++e) {
          const FkgReport r = check_fkg(d, mp, connection_event(d, a, b), connection_event(d, c, e));
          worst = std::min(worst, r.lhs - r.rhs);
          ok = ok && r.holds;
        }
  return {"fkg_connections", ok, worst, "min P(A and B) - P(A) P(B) over connection pairs"};
}

Check finite_energy(const Domain& d, const ModelParams& mp) {
  bool ok = true;
  double slack = 1e300;
  for (int e = 0; e < d.graph.num_edges(); ++e) {
    const FiniteEnergyReport r = check_finite_energy(d, mp, e);
    ok = ok && r.holds;
    slack = std::min({slack, r.min_ratio - r.lower_bound, r.upper_bound - r.max_ratio});
  }
  return {"finite_energy", ok, slack, "min distance of conditional ratios to their bounds"};
}

Check domination(const Graph& g, const ModelParams& mp) {
  const Domain free_d(g, BoundarySpec::free());
  const int origin = g.vertex_at({0, 0, 0});
  const EventSpec a = connection_to_set_event(free_d, origin, g.boundary());
  const DominationReport r = check_domination(g, BoundarySpec::wired(), BoundarySpec::free(), mp, a);
  return {"wired_dominates_free", r.holds, r.coarser - r.finer, "P_wired(0 <-> boundary) - P_free"};
}

Check hamming_and_russo(const Domain& d, double q) {
  const EventSpec a = horizontal_crossing_event(d.graph);
  bool ok = true;
  double worst = 1e300;
  for (int i = 2; i <= 8; ++i) {
    const ModelParams mp(i / 10.0, q);
    const double pa = event_prob(d, mp, a);
    const Derivative dp = event_prob_derivative(d, mp, a, 1e-3);
    const double ham = expected_hamming(d, mp, a);
    const double slack = dp.value / pa - ham / (mp.p * (1 - mp.p));
    worst = std::min(worst, slack);
    ok = ok && slack >= -1e-6 && dp.value > 0;
  }
  return {"hamming_and_russo", ok, worst, "min of dlog P(A)/dp - E[H_A]/(p(1-p)) over p in 0.2..0.8"};
}

Check strip_complement(const ModelParams& mp) {
  double err = 0;
  for (SideCondition side : {SideCondition::Wired, SideCondition::Free}) {
    const StripCrossing s = strip_dual_crossing(1, 1, mp, side, true);
    err = std::max(err, std::abs(s.primal + s.dual - 1));
  }
  return {"strip_complement", err <= 1e-10, err, "|P(A) + P(A*) - 1| on the n=1, m=1 strip"};
}

}  // namespace

int verify_core(const Options& o, RunManifest& man, nlohmann::json& summary) {
  const double q = o.q;
  const ModelParams sd(self_dual_point(q), q);
  const Domain box1(build_box(1), BoundarySpec::free());
  const Domain square(build_rectangle(0, 1, 0, 1), BoundarySpec::free());
  const Domain rect23(build_rectangle(0, 2, 0, 1), BoundarySpec::wired());
  const Domain cross2(crossing_rectangle(2), BoundarySpec::free());

  std::vector<std::function<Check()>> checks{
      [] { return golden_values(); },
      [&] { return duality(box1, ModelParams(0.3, q), "box1_free"); },
      [&] { return duality(rect23, sd, "rect_wired"); },
      [&] { return fkg(square, sd); },
      [&] { return finite_energy(box1, sd); },
      [&] { return domination(box1.graph, sd); },
      [&] { return hamming_and_russo(cross2, q); },
      [&] { return strip_complement(sd); },
  };
  CsvWriter csv(man.output("verify.csv"), man.id(), {"check", "pass", "value", "detail"});
  bool all = true;
  summary = nlohmann::json::object();
  for (const auto& run : checks) {
    const Check c = run();
    csv.row({c.name, c.pass ? "1" : "0", fmt(c.value), c.detail});
    summary[c.name] = c.pass;
    all = all && c.pass;
  }
  return all ? 0 : 2;
}

}  // namespace rcm::cli
