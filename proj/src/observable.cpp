#include "rcm/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace rcm {

double sigma_hat(double q) {
  if (!(q >= 1.0 && q <= 4.0)) throw Error("sigma_hat needs q in [1,4], got " + std::to_string(q));
  return 2.0 / std::numbers::pi * std::acos(std::sqrt(q) / 2.0);
}

double ExplorationPath::radians(int quarter_turns) { return quarter_turns * std::numbers::pi / 2.0; }

int quarter_turn(int from_dir, int to_dir) {
  const int diff = ((to_dir - from_dir) % 4 + 4) % 4;
  if (diff == 1) return 1;
  if (diff == 3) return -1;
  throw Error("medial step is not a quarter turn");
}

ExplorationPath explore(const MedialGraph& m, Omega omega) {
  ExplorationPath path;
  int cur = m.start_edge();
  path.edges.push_back(cur);
  const int limit = m.num_edges();
  while (cur != m.end_edge()) {
    const int head = m.edges()[cur].head;
    const bool open = m.is_open(head, omega);
    const int next = m.successor(cur, open);
    if (next < 0) throw Error("exploration left the medial graph: construction bug");
    path.turns.push_back(open ? -1 : 1);
    path.edges.push_back(next);
    cur = next;
    if (static_cast<int>(path.edges.size()) > limit)
      throw Error("exploration exceeded the number of medial edges: construction bug");
  }
  path.winding_to_end.assign(path.edges.size(), 0);
  for (int i = static_cast<int>(path.edges.size()) - 2; i >= 0; --i)
    path.winding_to_end[i] = path.winding_to_end[i + 1] + path.turns[i];
  return path;
}

ObservableTable observable_exact(const Domain& d, const MedialGraph& m, double q, std::optional<double> p, int jobs) {
  ObservableTable t;
  t.q = q;
  t.sigma = sigma_hat(q);
  t.p = p ? *p : self_dual_point(q);
  const ModelParams mp(t.p, q);
  const int ne = m.num_edges();
  // Windings are bounded by the path length.
  std::vector<std::complex<double>> phase(2 * ne + 1);
  for (int w = -ne; w <= ne; ++w) phase[w + ne] = std::polar(1.0, t.sigma * ExplorationPath::radians(w));

  struct Acc {
    double z = 0;
    std::vector<std::complex<double>> f;
    std::vector<double> visit;
  };
  Acc init;
  init.f.assign(ne, 0.0);
  init.visit.assign(ne, 0.0);
  const Acc acc = enumerate(
      d, mp, init,
      [&](Acc& a, Omega o, Config, double w) {
        a.z += w;
        const ExplorationPath path = explore(m, o);
        for (std::size_t i = 0; i < path.edges.size(); ++i) {
          a.f[path.edges[i]] += w * phase[path.winding_to_end[i] + ne];
          a.visit[path.edges[i]] += w;
        }
      },
      [](Acc& into, const Acc& part) {
        into.z += part.z;
        for (std::size_t i = 0; i < into.f.size(); ++i) {
          into.f[i] += part.f[i];
          into.visit[i] += part.visit[i];
        }
      },
      jobs);
  t.value.resize(ne);
  t.visit_prob.resize(ne);
  for (int i = 0; i < ne; ++i) {
    t.value[i] = acc.f[i] / acc.z;
    t.visit_prob[i] = acc.visit[i] / acc.z;
  }
  return t;
}

namespace {

bool is_admissible(const MedialGraph& m, int site, Admissibility mode) {
  if (site < 0 || site >= m.num_sites() || m.sites()[site].edge < 0) return false;
  const auto inc = m.incident(site);
  if (inc.size() != 4) return false;
  if (mode == Admissibility::Extended) return true;
  for (int e : inc) {
    if (e == m.start_edge() || e == m.end_edge()) continue;
    const MedialEdge& me = m.edges()[e];
    if (m.sites()[me.tail].edge < 0 || m.sites()[me.head].edge < 0) return false;
  }
  return true;
}

}  // namespace

std::vector<int> admissible_sites(const MedialGraph& m, Admissibility mode) {
  std::vector<int> out;
  for (int s = 0; s < m.num_sites(); ++s)
    if (is_admissible(m, s, mode)) out.push_back(s);
  return out;
}

std::vector<ContourTerm> contour_boundary(const MedialGraph& m, const std::vector<int>& sites, Admissibility mode) {
  std::vector<char> in(m.num_sites(), 0);
  for (int s : sites) {
    if (!is_admissible(m, s, mode)) throw Error("contour set contains a medial vertex without four usable edges");
    in[s] = 1;
  }
  std::vector<ContourTerm> out;
  std::vector<char> seen(m.num_edges(), 0);
  for (int s : sites) {
    for (int e : m.incident(s)) {
      if (seen[e]) continue;
      seen[e] = 1;
      const MedialEdge& me = m.edges()[e];
      const bool head_in = in[me.head], tail_in = in[me.tail];
      if (head_in != tail_in) out.push_back({e, head_in ? 1 : -1});
    }
  }
  return out;
}

std::complex<double> contour_sum(const MedialGraph& m, const ObservableTable& f, const std::vector<int>& sites,
                                  Admissibility mode) {
  std::complex<double> sum = 0;
  for (const ContourTerm& t : contour_boundary(m, sites, mode)) sum += static_cast<double>(t.sign) * f.value[t.edge];
  return sum;
}

ContourReport contour_report(const Domain& d, const std::string& name, double q, std::optional<double> p,
                             Admissibility mode, int jobs) {
  const MedialGraph m = medial_graph(d);
  const ObservableTable f = observable_exact(d, m, q, p, jobs);
  const std::vector<int> cand = admissible_sites(m, mode);
  if (cand.size() > 20) throw Error("too many admissible medial vertices for an all-subsets report");
  ContourReport r;
  r.domain = name;
  r.q = q;
  r.p = f.p;
  r.mode = mode;
  for (int s : cand) r.singles.emplace_back(s, contour_sum(m, f, {s}, mode));
  const std::uint64_t total = std::uint64_t{1} << cand.size();
  r.subsets = total;
  std::vector<int> set;
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    set.clear();
    for (std::size_t i = 0; i < cand.size(); ++i)
      if ((mask >> i) & 1u) set.push_back(cand[i]);
    const double mod = std::abs(contour_sum(m, f, set, mode));
    if (mod > r.max_modulus || r.argmax.empty()) {
      r.max_modulus = mod;
      r.argmax = set;
    }
  }
  return r;
}

std::string to_json(const ContourReport& r, const MedialGraph& m) {
  using nlohmann::json;
  auto site_json = [&](int s) {
    const Point2 pos = m.sites()[s].pos;
    return json{{"site", s}, {"x2", pos.x}, {"y2", pos.y}};
  };
  json j;
  j["domain"] = r.domain;
  j["q"] = r.q;
  j["p"] = r.p;
  j["admissibility"] = r.mode == Admissibility::Strict ? "strict" : "extended";
  j["subsets"] = r.subsets;
  j["max_modulus"] = r.max_modulus;
  json arg = json::array();
  for (int s : r.argmax) arg.push_back(site_json(s));
  j["argmax"] = arg;
  json singles = json::array();
  for (const auto& [s, v] : r.singles) {
    json e = site_json(s);
    e["re"] = v.real();
    e["im"] = v.imag();
    singles.push_back(e);
  }
  j["singles"] = singles;
  return j.dump(2);
}

std::vector<ComplexEstimate> observable_mc(const Domain& d, const MedialGraph& m, double q,
                                           const std::vector<int>& edges, std::uint64_t seed, long long budget,
                                           std::optional<double> p) {
  const double pp = p ? *p : self_dual_point(q);
  const ModelParams mp(pp, q);
  const double sigma = sigma_hat(q);
  EstimateOptions opt;
  if (budget < opt.min_budget) throw Error("budget too small: need at least 10000 sweeps");
  const long long per = budget / opt.n_batches;
  const long long used = per * opt.n_batches;
  std::vector<int> slot(m.num_edges(), -1);
  for (std::size_t i = 0; i < edges.size(); ++i) slot.at(edges[i]) = static_cast<int>(i);
  std::vector<std::vector<double>> re(edges.size()), im(edges.size());
  run_chain(
      d, mp, seed, budget / 10, used,
      [&](Omega o) {
        const ExplorationPath path = explore(m, o);
        for (auto& v : re) v.push_back(0.0);
        for (auto& v : im) v.push_back(0.0);
        for (std::size_t i = 0; i < path.edges.size(); ++i) {
          const int k = slot[path.edges[i]];
          if (k < 0) continue;
          const std::complex<double> z = std::polar(1.0, sigma * ExplorationPath::radians(path.winding_to_end[i]));
          re[k].back() = z.real();
          im[k].back() = z.imag();
        }
      },
      Dynamics::HeatBath);
  std::vector<ComplexEstimate> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    out.push_back({batch_means(re[i], opt.n_batches), batch_means(im[i], opt.n_batches)});
  return out;
}

}  // namespace rcm
