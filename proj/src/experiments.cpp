#include "rcm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>

#include "rcm/observable.hpp"

namespace rcm {

namespace {

std::vector<char> membership(int n, const std::vector<int>& set) {
  std::vector<char> in(n, 0);
  for (int v : set) in.at(v) = 1;
  return in;
}

// Union-find over open edges only, optionally restricted to a vertex mask.
void open_components(const Graph& g, Omega o, UnionFind& uf, const std::vector<char>* mask = nullptr) {
  uf.reset(g.num_vertices());
  for (int e = 0; e < g.num_edges(); ++e) {
    if (!o[e]) continue;
    const Edge& ed = g.edge(e);
    if (mask && (!(*mask)[ed.u] || !(*mask)[ed.v])) continue;
    uf.unite(ed.u, ed.v);
  }
}

bool sets_connected(UnionFind& uf, const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> roots;
  for (int v : a) roots.insert(uf.find(v));
  for (int v : b)
    if (roots.count(uf.find(v))) return true;
  return false;
}

EventSpec set_crossing(const Graph& g, std::string name, std::vector<int> from, std::vector<int> to,
                       std::vector<char> mask = {}) {
  auto gp = std::make_shared<const Graph>(g);
  return {std::move(name),
          [gp, from = std::move(from), to = std::move(to), mask = std::move(mask)](Omega o) {
            thread_local UnionFind uf;
            open_components(*gp, o, uf, mask.empty() ? nullptr : &mask);
            return sets_connected(uf, from, to);
          },
          true};
}

}  // namespace

// ---------------------------------------------------------------------------
// Boundary-connection sums

PhiReport phi_fn(const Graph& ambient, const std::vector<int>& set, const ModelParams& mp, int jobs) {
  const int origin = ambient.vertex_at({0, 0, 0});
  if (std::find(set.begin(), set.end(), origin) == set.end()) throw Error("phi_fn needs the origin in S");
  PhiReport rep;
  rep.set = set;
  const auto boundary = edge_boundary(ambient, set);

  // Only the origin's component matters under free conditions.
  const InducedSubgraph sub = induced_subdomain(ambient, set);
  const int o_sub = sub.from_parent_vertex[origin];
  UnionFind uf(sub.graph.num_vertices());
  for (const Edge& e : sub.graph.edges()) uf.unite(e.u, e.v);
  std::vector<int> component;
  for (int v = 0; v < sub.graph.num_vertices(); ++v)
    if (uf.same(v, o_sub)) component.push_back(sub.to_parent_vertex[v]);
  const InducedSubgraph comp = induced_subdomain(ambient, component);
  const Domain dom(comp.graph, BoundarySpec::free());
  const int o_comp = comp.from_parent_vertex[origin];

  std::map<int, double> prob_of;
  std::vector<EventSpec> events;
  std::vector<int> targets;
  for (const auto& be : boundary) {
    if (prob_of.count(be.inside)) continue;
    const int x = comp.from_parent_vertex[be.inside];
    if (x < 0)
      prob_of[be.inside] = 0.0;
    else if (x == o_comp)
      prob_of[be.inside] = 1.0;
    else {
      prob_of[be.inside] = -1.0;
      events.push_back(connection_event(dom, o_comp, x));
      targets.push_back(be.inside);
    }
  }
  if (!events.empty()) {
    const auto probs = event_probs(dom, mp, events, jobs);
    for (std::size_t i = 0; i < probs.size(); ++i) prob_of[targets[i]] = probs[i];
  }
  for (const auto& be : boundary) {
    const double v = prob_of.at(be.inside);
    rep.terms.push_back({be.edge, be.inside, be.outside, v});
    rep.value += v;
  }
  return rep;
}

double lemma_C(double q) {
  const double s = sigma_hat(q);
  return 0.5 * std::abs(std::polar(1.0, s * std::numbers::pi / 2) - 1.0) * (1 + std::sqrt(q));
}

Q3Scan lemma_q3_scan(int n, double q, int max_connected, int random_sets, std::uint64_t seed, int jobs) {
  if (n < 1) throw Error("scan needs n >= 1");
  if (!(q >= 1 && q <= 3)) throw Error("the scan is stated for q in [1,3]");
  Q3Scan scan;
  scan.n = n;
  scan.q = q;
  scan.p = self_dual_point(q);
  scan.constant = lemma_C(q);
  scan.min_value = std::numeric_limits<double>::infinity();
  const ModelParams mp(scan.p, q);
  const Graph ambient = build_box(n + 1);
  const int origin = ambient.vertex_at({0, 0, 0});
  std::vector<int> others;
  for (int v = 0; v < ambient.num_vertices(); ++v) {
    const Coord c = ambient.coord(v);
    if (v != origin && std::max(std::abs(c.x), std::abs(c.y)) <= n) others.push_back(v);
  }

  auto consider = [&](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    PhiReport r;
    try {
      r = phi_fn(ambient, s, mp, jobs);
    } catch (const EnumerationTooLarge&) {
      return;
    }
    ++scan.sets_checked;
    if (r.value < scan.min_value) {
      scan.min_value = r.value;
      scan.argmin.clear();
      for (int v : s) scan.argmin.push_back(ambient.coord(v));
    }
  };

  if (others.size() <= 20 && n == 1) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
      std::vector<int> s{origin};
      for (std::size_t i = 0; i < others.size(); ++i)
        if ((mask >> i) & 1u) s.push_back(others[i]);
      consider(s);
    }
  } else {
    std::vector<char> in_box(ambient.num_vertices(), 0);
    in_box[origin] = 1;
    for (int v : others) in_box[v] = 1;
    std::set<std::vector<int>> layer{{origin}}, seen = layer;
    for (int size = 1; size <= max_connected && !layer.empty(); ++size) {
      std::set<std::vector<int>> next;
      for (const auto& s : layer) {
        consider(s);
        if (size == max_connected) continue;
        for (int v : s) {
          for (const auto& inc : ambient.neighbors(v)) {
            if (!in_box[inc.vertex] || std::binary_search(s.begin(), s.end(), inc.vertex)) continue;
            auto t = s;
            t.insert(std::upper_bound(t.begin(), t.end(), inc.vertex), inc.vertex);
            if (seen.insert(t).second) next.insert(t);
          }
        }
      }
      layer = std::move(next);
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < random_sets; ++i) {
      std::vector<int> s{origin};
      for (int v : others)
        if (coin(rng)) s.push_back(v);
      consider(s);
    }
  }
  scan.pass = scan.sets_checked > 0 && scan.min_value > scan.constant;
  return scan;
}

// ---------------------------------------------------------------------------
// Strips

Domain strip_domain(int n, int m, SideCondition side) {
  Graph g = build_strip_rect(n, m);
  if (side == SideCondition::Wired) return Domain(std::move(g), BoundarySpec::wired());
  std::vector<int> rows;
  for (int v : g.boundary()) {
    const int y = g.coord(v).y;
    if (y == 0 || y == n) rows.push_back(v);
  }
  return Domain(std::move(g), BoundarySpec::partition({rows}));
}

EventSpec strip_primal_crossing(const Graph& strip) {
  return set_crossing(strip, "A", strip.label("left_arc"), strip.label("right_arc"));
}

EventSpec strip_dual_crossing_event(const Graph& strip) {
  EventSpec a = strip_primal_crossing(strip);
  return {"A*", [h = a.holds](Omega o) { return !h(o); }, false};
}

namespace {

struct StripExplorer {
  explicit StripExplorer(const Graph& strip) : graph(strip), medial(make(strip)) {}

  static MedialGraph make(const Graph& g) {
    const int n = g.rect()->y1;
    const int a = g.vertex_at({-1, 0, 0}), b = g.vertex_at({-1, n, 0});
    return medial_graph(Domain(g, BoundarySpec::dobrushin(a, b)));
  }

  std::optional<LeftmostDualPath> path(Omega o) const {
    thread_local UnionFind uf;
    open_components(graph, o, uf);
    if (sets_connected(uf, graph.label("left_arc"), graph.label("right_arc"))) return std::nullopt;
    const ExplorationPath ex = explore(medial, o);
    std::vector<Point2> faces;
    for (int e : ex.edges) {
      const Point2 f = medial.edges()[e].dual_face;
      if (!faces.empty() && faces.back() == f) continue;
      auto it = std::find(faces.begin(), faces.end(), f);
      if (it != faces.end())
        faces.erase(it + 1, faces.end());
      else
        faces.push_back(f);
    }
    LeftmostDualPath out;
    out.faces = faces;
    for (std::size_t i = 0; i + 1 < faces.size(); ++i) {
      const Point2 mid{(faces[i].x + faces[i + 1].x) / 2, (faces[i].y + faces[i + 1].y) / 2};
      const auto site = medial.find_site(mid);
      if (!site || medial.sites()[*site].edge < 0) throw Error("dual path crosses a non-domain edge");
      out.crossed.push_back(medial.sites()[*site].edge);
    }
    return out;
  }

  const Graph& graph;
  MedialGraph medial;
};

}  // namespace

std::optional<LeftmostDualPath> leftmost_dual_path(const Graph& strip, Omega omega) {
  return StripExplorer(strip).path(omega);
}

StripCrossing strip_dual_crossing(int n, int m, const ModelParams& mp, SideCondition side, bool exact,
                                  std::uint64_t seed, long long budget, int jobs) {
  const Domain d = strip_domain(n, m, side);
  const std::vector<EventSpec> ev{strip_primal_crossing(d.graph), strip_dual_crossing_event(d.graph)};
  StripCrossing out;
  if (exact) {
    const auto v = event_probs(d, mp, ev, jobs);
    out.primal = v[0];
    out.dual = v[1];
  } else {
    EstimateOptions opt;
    opt.dynamics = Dynamics::HeatBath;
    const auto est = estimate_events(d, mp, ev, seed, budget, opt);
    out.primal_mc = est[0];
    out.dual_mc = est[1];
    out.primal = est[0].mean;
    out.dual = est[1].mean;
  }
  return out;
}

double q4_boundary_sum(int n, int m, const ModelParams& mp, SideCondition side, int jobs) {
  const Domain d = strip_domain(n, m, side);
  const StripExplorer explorer(d.graph);
  const std::vector<int>& bottom = d.graph.label("bottom_minus");
  const auto sums = enumerate(
      d, mp, std::pair<double, double>{0.0, 0.0},
      [&](std::pair<double, double>& acc, Omega o, Config, double w) {
        acc.first += w;
        const auto path = explorer.path(o);
        if (!path) return;
        std::vector<int> ends;
        for (int e : path->crossed) {
          ends.push_back(d.graph.edge(e).u);
          ends.push_back(d.graph.edge(e).v);
        }
        thread_local UnionFind uf;
        open_components(d.graph, o, uf);
        for (int x : bottom)
          if (sets_connected(uf, {x}, ends)) acc.second += w;
      },
      [](std::pair<double, double>& into, const std::pair<double, double>& part) {
        into.first += part.first;
        into.second += part.second;
      },
      jobs);
  return sums.second / sums.first;
}

PhiReport phi_bar_fn(int n, int m, const std::vector<int>& set, const ModelParams& mp, SideCondition side,
                     PhiBarVariant variant, int jobs) {
  const Domain d = strip_domain(n, m, side);
  const Graph& g = d.graph;
  const std::vector<char> in = membership(g.num_vertices(), set);
  const std::vector<int>& left = g.label("left_arc");
  const std::vector<int>& right = g.label("right_arc");
  for (int v : left)
    if (!in[v]) throw Error("phi_bar_fn needs S to contain the left boundary arc");
  const auto boundary = edge_boundary(g, set);
  struct Acc {
    double z = 0;
    double cond = 0;
    std::vector<double> terms;
  };
  Acc init;
  init.terms.assign(boundary.size(), 0.0);
  const bool conditional = variant == PhiBarVariant::Conditional;
  const Acc acc = enumerate(
      d, mp, init,
      [&](Acc& a, Omega o, Config, double w) {
        a.z += w;
        thread_local UnionFind all, inside;
        if (conditional) {
          open_components(g, o, all);
          std::set<int> right_roots;
          for (int v : right) right_roots.insert(all.find(v));
          for (int v = 0; v < g.num_vertices(); ++v) {
            const bool unreached = right_roots.count(all.find(v)) == 0;
            if (unreached != static_cast<bool>(in[v])) return;
          }
        }
        a.cond += w;
        open_components(g, o, inside, &in);
        for (std::size_t i = 0; i < boundary.size(); ++i)
          if (sets_connected(inside, left, {boundary[i].inside})) a.terms[i] += w;
      },
      [](Acc& into, const Acc& part) {
        into.z += part.z;
        into.cond += part.cond;
        for (std::size_t i = 0; i < into.terms.size(); ++i) into.terms[i] += part.terms[i];
      },
      jobs);
  if (acc.cond <= 0) throw Error("conditioning event has probability zero");
  PhiReport rep;
  rep.set = set;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const double v = acc.terms[i] / acc.cond;
    rep.terms.push_back({boundary[i].edge, boundary[i].inside, boundary[i].outside, v});
    rep.value += v;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Crossings

Graph crossing_rectangle(int n) {
  if (n < 1) throw Error("crossing rectangle needs n >= 1");
  return build_rectangle(0, n, 0, n - 1);
}

EventSpec horizontal_crossing_event(const Graph& rect) {
  if (!rect.rect()) throw UnsupportedDomain("crossing events need a rectangle");
  const RectExtent r = *rect.rect();
  std::vector<int> left, right;
  for (int y = r.y0; y <= r.y1; ++y) {
    left.push_back(rect.vertex_at({r.x0, y, 0}));
    right.push_back(rect.vertex_at({r.x1, y, 0}));
  }
  return set_crossing(rect, "horizontal crossing", left, right);
}

EventSpec vertical_crossing_event(const Graph& rect) {
  if (!rect.rect()) throw UnsupportedDomain("crossing events need a rectangle");
  const RectExtent r = *rect.rect();
  std::vector<int> bottom, top;
  for (int x = r.x0; x <= r.x1; ++x) {
    bottom.push_back(rect.vertex_at({x, r.y0, 0}));
    top.push_back(rect.vertex_at({x, r.y1, 0}));
  }
  return set_crossing(rect, "vertical crossing", bottom, top);
}

EventSpec dual_vertical_crossing_event(const DualGraph& dual, const Graph& rect) {
  if (!rect.rect()) throw UnsupportedDomain("crossing events need a rectangle");
  const RectExtent r = *rect.rect();
  std::vector<int> bottom, top;
  for (int v = 0; v < dual.graph.num_vertices(); ++v) {
    if (!dual.is_slot[v]) continue;
    const int y = dual.graph.coord(v).y;  // quarter units
    if (y < 4 * r.y0) bottom.push_back(v);
    if (y > 4 * r.y1) top.push_back(v);
  }
  return set_crossing(dual.graph, "dual vertical crossing", bottom, top);
}

EventSpec box_crossing_event(const Graph& strip, const CrossingSpec& spec) {
  const int h = static_cast<int>(std::lround(spec.aspect * spec.m));
  if (h < 1 || h > spec.n || spec.m > spec.m_trunc) throw Error("crossing box does not fit the strip truncation");
  std::vector<char> mask(strip.num_vertices(), 0);
  std::vector<int> bottom, top;
  for (int v = 0; v < strip.num_vertices(); ++v) {
    const Coord c = strip.coord(v);
    if (std::abs(c.x) > spec.m || c.y > h) continue;
    mask[v] = 1;
    if (c.y == 0) bottom.push_back(v);
    if (c.y == h) top.push_back(v);
  }
  return set_crossing(strip, "box crossing", bottom, top, mask);
}

CrossingResult crossing_prob(const CrossingSpec& spec, const ModelParams& mp, bool exact, std::uint64_t seed,
                             long long budget, int jobs) {
  const Domain d = strip_domain(spec.n, spec.m_trunc, spec.side);
  const EventSpec ev = box_crossing_event(d.graph, spec);
  CrossingResult out;
  out.exact = exact;
  if (exact) {
    out.value = event_prob(d, mp, ev, jobs);
  } else {
    EstimateOptions opt;
    opt.dynamics = spec.side == SideCondition::Wired ? Dynamics::ChayesMachta : Dynamics::HeatBath;
    out.mc = estimate_event(d, mp, ev, seed, budget, opt);
    out.value = out.mc.mean;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Universal cover

int select_k(double q) {
  if (q == 4.0) throw UnsupportedParameter("select_k: at q = 4 the spin exponent vanishes and no finite k exists");
  if (!(q > 3.0 && q < 4.0)) throw UnsupportedParameter("select_k needs q in (3,4)");
  const double s = sigma_hat(q);
  const double lo = (2.0 / s - 3.0) / 2.0;
  const double hi = (2.0 / s - 1.0) / 2.0;
  const int k = static_cast<int>(std::ceil(lo - 1e-12));
  if (k > hi + 1e-12 || k < 1) throw UnsupportedParameter("select_k: no admissible integer");
  return k;
}

KConditions check_k_conditions(double q, int k) {
  const double s = sigma_hat(q);
  KConditions c;
  c.min_cos_low = 1.0;
  for (int m = 0; m <= 4 * k + 1; ++m) c.min_cos_low = std::min(c.min_cos_low, std::cos(std::numbers::pi * m * s / 2));
  c.cos_high = std::cos((4 * k + 3) * std::numbers::pi * s / 2);
  c.low_ok = c.min_cos_low >= 0;
  c.high_ok = c.cos_high <= 0;
  return c;
}

std::vector<DecayRow> uk_decay(double q, int k, int R, const std::vector<int>& n_list, long long budget,
                               std::uint64_t seed, std::optional<double> p, int jobs) {
  if (R < 1) throw Error("inner radius must be >= 1");
  for (int n : n_list)
    if (R >= n) throw Error("inner radius R must be smaller than every n");
  const ModelParams mp(p ? *p : self_dual_point(q), q);
  std::vector<DecayRow> rows(n_list.size());
  detail::run_chunks(jobs, static_cast<int>(n_list.size()), [&](int i) {
    const int n = n_list[i];
    const Domain d(build_universal_cover_box(n, k), BoundarySpec::free());
    const int origin = d.graph.vertex_at({0, 0, 0});
    std::vector<int> inner, outer;
    for (int v = 0; v < d.graph.num_vertices(); ++v) {
      const Coord c = d.graph.coord(v);
      const int r = std::max(std::abs(c.x), std::abs(c.y));
      if (r == R) inner.push_back(v);
      if (r == n) outer.push_back(v);
    }
    const std::vector<EventSpec> ev{connection_to_set_event(d, origin, inner),
                                    connection_to_set_event(d, origin, outer)};
    EstimateOptions opt;
    opt.dynamics = Dynamics::ChayesMachta;
    const auto est = estimate_events(d, mp, ev, derive_seed(seed, static_cast<std::uint64_t>(n)), budget, opt);
    rows[i] = {n, est[0], est[1]};
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Critical point

std::optional<double> curve_intersection(const std::vector<double>& p, const std::vector<double>& a,
                                         const std::vector<double>& b) {
  const std::size_t n = p.size();
  if (n < 2 || a.size() != n || b.size() != n) return std::nullopt;
  std::vector<double> d(n);
  double mp = 0, md = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    mp += p[i] / n;
    md += d[i] / n;
  }
  double sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxy += (p[i] - mp) * (d[i] - md);
  if (sxy == 0) return std::nullopt;
  const double dir = sxy > 0 ? 1.0 : -1.0;
  std::optional<std::size_t> best;
  std::size_t best_bad = n + 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(dir * d[i] <= 0 && dir * d[i + 1] > 0)) continue;
    std::size_t bad = 0;
    for (std::size_t j = 0; j < n; ++j) bad += j <= i ? dir * d[j] > 0 : dir * d[j] <= 0;
    if (bad < best_bad) {
      best_bad = bad;
      best = i;
    }
  }
  if (!best) return std::nullopt;
  const std::size_t i = *best;
  return p[i] + (p[i + 1] - p[i]) * d[i] / (d[i] - d[i + 1]);
}

PcResult pc_estimate(double q, const std::vector<int>& sizes, const std::vector<double>& p_grid, long long budget,
                     std::uint64_t seed, int jobs) {
  if (sizes.size() < 3) throw Error("pc_estimate needs at least three sizes");
  if (p_grid.size() < 2) throw Error("pc_estimate needs at least two grid points");
  if (budget < 10000) throw Error("budget too small for a target standard error of 0.01");
  PcResult res;
  res.q = q;
  const std::size_t cells = sizes.size() * p_grid.size();
  res.curve.resize(cells);
  detail::run_chunks(jobs, static_cast<int>(cells), [&](int c) {
    const int n = sizes[c / p_grid.size()];
    const double p = p_grid[c % p_grid.size()];
    const Domain d(crossing_rectangle(n), BoundarySpec::free());
    EstimateOptions opt;
    opt.dynamics = Dynamics::ChayesMachta;
    const Estimate e =
        estimate_event(d, ModelParams(p, q), horizontal_crossing_event(d.graph), derive_seed(seed, c), budget, opt);
    res.curve[c] = {n, p, e};
  });
  for (const auto& pt : res.curve) res.max_std_error = std::max(res.max_std_error, pt.crossing.std_error);
  auto curve_of = [&](std::size_t i) {
    std::vector<double> v;
    for (std::size_t j = 0; j < p_grid.size(); ++j) v.push_back(res.curve[i * p_grid.size() + j].crossing.mean);
    return v;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (std::size_t j = i + 1; j < sizes.size(); ++j) {
      PcIntersection x{sizes[i], sizes[j], 0.0, false};
      if (auto r = curve_intersection(p_grid, curve_of(i), curve_of(j))) {
        x.p = *r;
        x.found = true;
        lo = std::min(lo, *r);
        hi = std::max(hi, *r);
      }
      res.intersections.push_back(x);
    }
  }
  res.spread = hi >= lo ? hi - lo : 0.0;
  return res;
}

}  // namespace rcm
