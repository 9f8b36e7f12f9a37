#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rcm/exact.hpp"
#include "rcm/experiments.hpp"
#include "rcm/medial.hpp"
#include "rcm/observable.hpp"
#include "rcm/sampler.hpp"

namespace rcm::cli {

using nlohmann::json;

nlohmann::json to_json(const std::string& command, const Options& o) {
  json j{{"q", o.q}, {"p", o.p}, {"seed", o.seed}};
  auto add_domain = [&] {
    j["domain"] = o.domain;
    j["n"] = o.n;
    j["bc"] = o.bc;
  };
  if (command == "exact") {
    add_domain();
  } else if (command == "sample") {
    add_domain();
    j["budget"] = o.budget;
    j["dynamics"] = o.dynamics;
    j["stream"] = o.stream;
  } else if (command == "observable") {
    add_domain();
    j["budget"] = o.exact ? 0 : o.budget;
    j["exact"] = o.exact;
  } else if (command == "contour") {
    add_domain();
    j["admissibility"] = o.admissibility;
  } else if (command == "phi-scan") {
    j["n"] = o.n;
    j["max_connected"] = o.max_connected;
    j["random_sets"] = o.random_sets;
  } else if (command == "crossing") {
    j["n"] = o.n;
    j["m"] = o.m;
    j["m_trunc"] = o.m_trunc;
    j["aspect"] = o.aspect;
    j["side"] = o.side;
    j["exact"] = o.exact;
    j["budget"] = o.budget;
  } else if (command == "strip") {
    j["n"] = o.n;
    j["m"] = o.m;
    j["side"] = o.side;
    j["exact"] = o.exact;
    j["budget"] = o.budget;
  } else if (command == "cover-decay") {
    j["k"] = o.k;
    j["R"] = o.radius;
    j["sizes"] = o.sizes;
    j["budget"] = o.budget;
  } else if (command == "pc-scan") {
    j["sizes"] = o.sizes;
    j["p_grid"] = o.p_grid;
    j["p_halfwidth"] = o.p_halfwidth;
    j["p_points"] = o.p_points;
    j["budget"] = o.budget;
    j["tol"] = o.tol;
  } else if (command == "verify") {
    j = json{{"suite", o.suite}};
  }
  return j;
}

double resolve_p(const std::string& p, double q) {
  if (p == "sd") return self_dual_point(q);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(p, &used);
  } catch (const std::exception&) {
    throw UsageError("--p expects a real number or 'sd', got '" + p + "'");
  }
  if (used != p.size() || !(v > 0 && v < 1)) throw UsageError("--p must lie in (0,1), got '" + p + "'");
  return v;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<int> int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError(what + " expects comma-separated integers, got '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::vector<double> real_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError(what + " expects comma-separated reals, got '" + s + "'");
    }
  }
  return out;
}

Coord parse_point(const std::string& s) {
  const auto v = int_list(s, "boundary point");
  if (v.size() != 2) throw UsageError("boundary point must be x,y, got '" + s + "'");
  return {v[0], v[1], 0};
}

Graph parse_graph(const Options& o) {
  const std::string& d = o.domain;
  auto number_after = [&](const std::string& prefix) { return int_list(d.substr(prefix.size()), "--domain").at(0); };
  if (d.empty()) return build_box(o.n);
  if (d.rfind("halfbox", 0) == 0) return build_box(number_after("halfbox"), BoxKind::HalfPlane);
  if (d.rfind("box", 0) == 0) return build_box(number_after("box"));
  if (d.rfind("crossing", 0) == 0) return crossing_rectangle(number_after("crossing"));
  if (d.rfind("rect:", 0) == 0) {
    const auto v = int_list(d.substr(5), "--domain rect");
    if (v.size() != 4) throw UsageError("rect domain is rect:x0,x1,y0,y1");
    return build_rectangle(v[0], v[1], v[2], v[3]);
  }
  if (d.rfind("strip:", 0) == 0) {
    const auto v = int_list(d.substr(6), "--domain strip");
    if (v.size() != 2) throw UsageError("strip domain is strip:n,m");
    return build_strip_rect(v[0], v[1]);
  }
  if (d.rfind("cover:", 0) == 0) {
    const auto v = int_list(d.substr(6), "--domain cover");
    if (v.size() != 2) throw UsageError("cover domain is cover:n,k");
    return build_universal_cover_box(v[0], v[1]);
  }
  if (d.rfind("file:", 0) == 0) {
    std::ifstream is(d.substr(5));
    if (!is) throw UsageError("cannot read graph file " + d.substr(5));
    std::stringstream ss;
    ss << is.rdbuf();
    return graph_from_json(ss.str());
  }
  throw UsageError("unknown domain '" + d + "' (box<n>, halfbox<n>, crossing<n>, rect:, strip:, cover:, file:)");
}

}  // namespace

Domain parse_domain(const Options& o, bool want_dobrushin) {
  Graph g = parse_graph(o);
  std::string bc = o.bc;
  if (bc.empty()) bc = want_dobrushin ? "dobrushin" : "free";
  if (bc == "free") return Domain(std::move(g), BoundarySpec::free());
  if (bc == "wired") return Domain(std::move(g), BoundarySpec::wired());
  if (bc.rfind("dobrushin", 0) == 0) {
    int a = -1, b = -1;
    if (bc == "dobrushin") {
      // Wired along the top side, from the top-left to the top-right corner.
      if (!g.rect()) throw UsageError("plain 'dobrushin' needs a rectangle; give dobrushin:x,y:x,y");
      const RectExtent r = *g.rect();
      a = g.vertex_at({r.x0, r.y1, 0});
      b = g.vertex_at({r.x1, r.y1, 0});
    } else {
      const auto parts = split(bc, ':');
      if (parts.size() != 3) throw UsageError("--bc dobrushin takes dobrushin:x,y:x,y");
      const auto pa = g.find(parse_point(parts[1]));
      const auto pb = g.find(parse_point(parts[2]));
      if (!pa || !pb) throw UsageError("Dobrushin endpoints must be vertices of the domain");
      a = *pa;
      b = *pb;
    }
    return Domain(std::move(g), BoundarySpec::dobrushin(a, b));
  }
  throw UsageError("unknown --bc '" + bc + "' (free, wired, dobrushin[:x,y:x,y])");
}

namespace {

std::string coord_str(const Coord& c) { return std::to_string(c.x) + " " + std::to_string(c.y) + " " + std::to_string(c.z); }

Dynamics parse_dynamics(const std::string& s) {
  if (s == "auto") return Dynamics::Auto;
  if (s == "heat-bath") return Dynamics::HeatBath;
  if (s == "chayes-machta") return Dynamics::ChayesMachta;
  throw UsageError("unknown --dynamics '" + s + "' (auto, heat-bath, chayes-machta)");
}

std::vector<SideCondition> parse_sides(const std::string& s) {
  if (s == "wired") return {SideCondition::Wired};
  if (s == "free") return {SideCondition::Free};
  if (s == "both") return {SideCondition::Wired, SideCondition::Free};
  throw UsageError("unknown --side '" + s + "' (wired, free, both)");
}

const char* side_name(SideCondition s) { return s == SideCondition::Wired ? "wired" : "free"; }

bool is_self_dual(const Options& o) { return o.p == "sd"; }

int cmd_exact(const Options& o, RunManifest& man, json& summary) {
  const Domain d = parse_domain(o, false);
  const ModelParams mp(resolve_p(o.p, o.q), o.q);
  CsvWriter csv(man.output("exact.csv"), man.id(), {"quantity", "target", "value"});
  const double log_z = log_partition_function(d, mp, o.jobs);
  csv.row({"log_Z", "", fmt(log_z)});
  std::vector<EventSpec> events;
  std::vector<std::pair<std::string, std::string>> names;
  for (int e = 0; e < d.graph.num_edges(); ++e) {
    events.push_back(edge_open_event(e));
    const Edge& ed = d.graph.edge(e);
    names.emplace_back("edge_open", coord_str(d.graph.coord(ed.u)) + " - " + coord_str(d.graph.coord(ed.v)));
  }
  const int origin = d.graph.find({0, 0, 0}).value_or(0);
  for (int v = 0; v < d.graph.num_vertices(); ++v) {
    if (v == origin) continue;
    events.push_back(connection_event(d, origin, v));
    names.emplace_back("connected_to_origin", coord_str(d.graph.coord(v)));
  }
  const auto probs = event_probs(d, mp, events, o.jobs);
  for (std::size_t i = 0; i < probs.size(); ++i) csv.row({names[i].first, names[i].second, fmt(probs[i])});
  summary = {{"log_Z", log_z}, {"edges", d.graph.num_edges()}, {"p", mp.p}};
  return 0;
}

int cmd_sample(const Options& o, RunManifest& man, json& summary) {
  const Domain d = parse_domain(o, false);
  const ModelParams mp(resolve_p(o.p, o.q), o.q);
  EstimateOptions opt;
  opt.dynamics = parse_dynamics(o.dynamics);
  if (o.budget < opt.min_budget) throw UsageError("--budget must be at least 10000 sweeps");
  std::vector<EventSpec> events;
  for (int e = 0; e < d.graph.num_edges(); ++e) events.push_back(edge_open_event(e));
  const auto est = estimate_events(d, mp, events, o.seed, o.budget, opt);
  CsvWriter csv(man.output("sample.csv"), man.id(), {"edge", "u", "v", "estimate", "stderr", "n_samples"});
  for (int e = 0; e < d.graph.num_edges(); ++e) {
    const Edge& ed = d.graph.edge(e);
    csv.row({std::to_string(e), coord_str(d.graph.coord(ed.u)), coord_str(d.graph.coord(ed.v)), fmt(est[e].mean),
             fmt(est[e].std_error), std::to_string(est[e].n_samples)});
  }
  if (o.stream) {
    std::ofstream os(man.output("stream.txt"));
    const Dynamics dyn = opt.dynamics == Dynamics::Auto ? Dynamics::HeatBath : opt.dynamics;
    write_stream(os, d, mp, o.seed, o.budget / 10, o.budget, dyn);
  }
  summary = {{"p", mp.p}, {"edges", d.graph.num_edges()}};
  return 0;
}

int cmd_observable(const Options& o, RunManifest& man, json& summary) {
  const Domain d = parse_domain(o, true);
  const MedialGraph m = medial_graph(d);
  const double p = resolve_p(o.p, o.q);
  const ObservableTable f = observable_exact(d, m, o.q, p, o.jobs);
  std::vector<ComplexEstimate> mc;
  std::vector<int> all(m.num_edges());
  for (int i = 0; i < m.num_edges(); ++i) all[i] = i;
  if (!o.exact) mc = observable_mc(d, m, o.q, all, o.seed, o.budget, p);
  CsvWriter csv(man.output("observable.csv"), man.id(),
                {"medial_edge", "tail_x2", "tail_y2", "head_x2", "head_y2", "re", "im", "visit_prob", "mc_re",
                 "mc_re_stderr", "mc_im", "mc_im_stderr"});
  for (int i = 0; i < m.num_edges(); ++i) {
    const MedialEdge& e = m.edges()[i];
    const Point2 t = m.sites()[e.tail].pos, h = m.sites()[e.head].pos;
    std::vector<std::string> row{std::to_string(i), std::to_string(t.x), std::to_string(t.y), std::to_string(h.x),
                                 std::to_string(h.y), fmt(f.value[i].real()), fmt(f.value[i].imag()),
                                 fmt(f.visit_prob[i])};
    if (mc.empty()) {
      row.insert(row.end(), 4, "");
    } else {
      row.push_back(fmt(mc[i].re.mean));
      row.push_back(fmt(mc[i].re.std_error));
      row.push_back(fmt(mc[i].im.mean));
      row.push_back(fmt(mc[i].im.std_error));
    }
    csv.row(row);
  }
  summary = {{"sigma", f.sigma}, {"p", f.p}, {"medial_edges", m.num_edges()}};
  return 0;
}

int cmd_contour(const Options& o, RunManifest& man, json& summary) {
  Options oo = o;
  if (oo.domain.empty()) oo.domain = "box1";
  const Domain d = parse_domain(oo, true);
  Admissibility mode;
  if (o.admissibility == "strict")
    mode = Admissibility::Strict;
  else if (o.admissibility == "extended")
    mode = Admissibility::Extended;
  else
    throw UsageError("unknown --admissibility '" + o.admissibility + "' (strict, extended)");
  const ContourReport r = contour_report(d, oo.domain, o.q, resolve_p(o.p, o.q), mode, o.jobs);
  const MedialGraph m = medial_graph(d);
  std::ofstream(man.output("contour.json")) << to_json(r, m) << '\n';
  CsvWriter csv(man.output("contour.csv"), man.id(), {"site", "x2", "y2", "re", "im", "modulus"});
  for (const auto& [s, v] : r.singles) {
    const Point2 pos = m.sites()[s].pos;
    csv.row({std::to_string(s), std::to_string(pos.x), std::to_string(pos.y), fmt(v.real()), fmt(v.imag()),
             fmt(std::abs(v))});
  }
  const bool checked = is_self_dual(o);
  const bool ok = !checked || r.max_modulus <= 1e-9;
  summary = {{"max_modulus", r.max_modulus}, {"subsets", r.subsets}, {"checked", checked}, {"pass", ok}};
  return ok ? 0 : 2;
}

int cmd_phi_scan(const Options& o, RunManifest& man, json& summary) {
  const Q3Scan s = lemma_q3_scan(o.n, o.q, o.max_connected, o.random_sets, o.seed, o.jobs);
  CsvWriter csv(man.output("phi_scan.csv"), man.id(),
                {"q", "n", "p", "constant", "min_value", "sets_checked", "argmin", "pass"});
  std::string arg;
  for (const Coord& c : s.argmin) arg += (arg.empty() ? "" : ";") + std::to_string(c.x) + " " + std::to_string(c.y);
  csv.row({fmt(s.q), std::to_string(s.n), fmt(s.p), fmt(s.constant), fmt(s.min_value), std::to_string(s.sets_checked),
           arg, s.pass ? "1" : "0"});
  summary = {{"min_value", s.min_value}, {"constant", s.constant}, {"pass", s.pass}};
  return s.pass ? 0 : 2;
}

int cmd_crossing(const Options& o, RunManifest& man, json& summary) {
  const ModelParams mp(resolve_p(o.p, o.q), o.q);
  CsvWriter csv(man.output("crossing.csv"), man.id(),
                {"side", "m", "height", "n", "m_trunc", "mode", "estimate", "stderr", "n_samples"});
  summary = json::array();
  for (SideCondition side : parse_sides(o.side)) {
    CrossingSpec spec{o.m, o.aspect, o.n, o.m_trunc > 0 ? o.m_trunc : o.m, side};
    const CrossingResult r = crossing_prob(spec, mp, o.exact, o.seed, o.budget, o.jobs);
    const int h = static_cast<int>(std::lround(o.aspect * o.m));
    csv.row({side_name(side), std::to_string(spec.m), std::to_string(h), std::to_string(spec.n),
             std::to_string(spec.m_trunc), o.exact ? "exact" : "mc", fmt(r.value), o.exact ? "0" : fmt(r.mc.std_error),
             o.exact ? "0" : std::to_string(r.mc.n_samples)});
    summary.push_back({{"side", side_name(side)}, {"value", r.value}});
  }
  return 0;
}

int cmd_strip(const Options& o, RunManifest& man, json& summary) {
  const ModelParams mp(resolve_p(o.p, o.q), o.q);
  CsvWriter csv(man.output("strip.csv"), man.id(),
                {"side", "n", "m_trunc", "mode", "primal", "primal_stderr", "dual", "dual_stderr", "sum",
                 "q4_boundary_sum", "n_samples"});
  bool ok = true;
  summary = json::array();
  for (SideCondition side : parse_sides(o.side)) {
    const StripCrossing s = strip_dual_crossing(o.n, o.m, mp, side, o.exact, o.seed, o.budget, o.jobs);
    const double sum = s.primal + s.dual;
    std::string boundary;
    if (o.exact) {
      boundary = fmt(q4_boundary_sum(o.n, o.m, mp, side, o.jobs));
      ok = ok && std::abs(sum - 1) <= 1e-10;
    } else {
      const double tol = 3 * std::hypot(s.primal_mc.std_error, s.dual_mc.std_error) + 1e-12;
      ok = ok && std::abs(sum - 1) <= tol;
    }
    csv.row({side_name(side), std::to_string(o.n), std::to_string(o.m), o.exact ? "exact" : "mc", fmt(s.primal),
             fmt(s.primal_mc.std_error), fmt(s.dual), fmt(s.dual_mc.std_error), fmt(sum), boundary,
             std::to_string(s.primal_mc.n_samples)});
    summary.push_back({{"side", side_name(side)}, {"primal", s.primal}, {"dual", s.dual}});
  }
  return ok ? 0 : 2;
}

int cmd_cover_decay(const Options& o, RunManifest& man, json& summary) {
  const int k = o.k > 0 ? o.k : select_k(o.q);
  const std::vector<int> sizes = int_list(o.sizes.empty() ? "4,6,8" : o.sizes, "--sizes");
  const auto rows = uk_decay(o.q, k, o.radius, sizes, o.budget, o.seed, std::nullopt, o.jobs);
  CsvWriter csv(man.output("cover_decay.csv"), man.id(),
                {"q", "k", "R", "n", "to_inner", "to_inner_stderr", "to_outer", "to_outer_stderr", "n_samples"});
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const DecayRow& r = rows[i];
    csv.row({fmt(o.q), std::to_string(k), std::to_string(o.radius), std::to_string(r.n), fmt(r.to_inner.mean),
             fmt(r.to_inner.std_error), fmt(r.to_outer.mean), fmt(r.to_outer.std_error),
             std::to_string(r.to_inner.n_samples)});
    if (i > 0) {
      const Estimate& a = rows[i - 1].to_inner;
      const Estimate& b = r.to_inner;
      if (b.mean - a.mean > 3 * std::hypot(a.std_error, b.std_error)) ok = false;
    }
  }
  summary = {{"k", k}, {"weakly_decreasing", ok}};
  return ok ? 0 : 2;
}

int cmd_pc_scan(const Options& o, RunManifest& man, json& summary) {
  const std::vector<int> sizes = int_list(o.sizes.empty() ? "8,16,32" : o.sizes, "--sizes");
  const double psd = self_dual_point(o.q);
  std::vector<double> grid;
  if (!o.p_grid.empty()) {
    grid = real_list(o.p_grid, "--p-grid");
  } else {
    if (o.p_points < 2) throw UsageError("--p-points must be at least 2");
    for (int i = 0; i < o.p_points; ++i)
      grid.push_back(psd - o.p_halfwidth + 2 * o.p_halfwidth * i / (o.p_points - 1));
  }
  const PcResult r = pc_estimate(o.q, sizes, grid, o.budget, o.seed, o.jobs);
  {
    CsvWriter csv(man.output("pc_curves.csv"), man.id(), {"q", "n", "p", "estimate", "stderr", "n_samples"});
    for (const auto& c : r.curve)
      csv.row({fmt(o.q), std::to_string(c.n), fmt(c.p), fmt(c.crossing.mean), fmt(c.crossing.std_error),
               std::to_string(c.crossing.n_samples)});
  }
  bool ok = true;
  CsvWriter csv(man.output("pc_intersections.csv"), man.id(), {"q", "n1", "n2", "p", "found", "p_self_dual"});
  for (const auto& x : r.intersections) {
    csv.row({fmt(o.q), std::to_string(x.n1), std::to_string(x.n2), x.found ? fmt(x.p) : "", x.found ? "1" : "0",
             fmt(psd)});
    if (!x.found || (o.tol > 0 && std::abs(x.p - psd) > o.tol)) ok = false;
  }
  summary = {{"spread", r.spread}, {"max_std_error", r.max_std_error}, {"p_self_dual", psd}, {"pass", ok}};
  return ok ? 0 : 2;
}

}  // namespace

int run_command(const std::string& command, const Options& o, RunManifest& man, json& summary) {
  if (o.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (command == "exact") return cmd_exact(o, man, summary);
  if (command == "sample") return cmd_sample(o, man, summary);
  if (command == "observable") return cmd_observable(o, man, summary);
  if (command == "contour") return cmd_contour(o, man, summary);
  if (command == "phi-scan") return cmd_phi_scan(o, man, summary);
  if (command == "crossing") return cmd_crossing(o, man, summary);
  if (command == "strip") return cmd_strip(o, man, summary);
  if (command == "cover-decay") return cmd_cover_decay(o, man, summary);
  if (command == "pc-scan") return cmd_pc_scan(o, man, summary);
  if (command == "verify") {
    if (o.suite != "core") throw UsageError("unknown suite '" + o.suite + "' (core)");
    return verify_core(o, man, summary);
  }
  throw UsageError("unknown subcommand '" + command + "'");
}

}  // namespace rcm::cli
