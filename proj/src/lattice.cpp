#include "rcm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rcm {

std::string to_string(const Coord& c) {
  std::ostringstream os;
  os << '(' << c.x << ',' << c.y;
  if (c.z != 0) os << ',' << c.z;
  os << ')';
  return os.str();
}

int Graph::add_vertex(Coord c) {
  if (index_.count(c)) throw Error("duplicate vertex coordinate " + to_string(c));
  const int id = num_vertices();
  coords_.push_back(c);
  adjacency_.emplace_back();
  is_boundary_.push_back(0);
  index_.emplace(c, id);
  return id;
}

int Graph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= num_vertices() || v >= num_vertices()) throw Error("edge endpoint out of range");
  if (u == v) throw Error("self-loop at vertex " + std::to_string(u));
  const auto key = std::minmax(u, v);
  if (edge_index_.count(key)) throw Error("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
  const int id = num_edges();
  edges_.push_back({u, v});
  adjacency_[u].push_back({v, id});
  adjacency_[v].push_back({u, id});
  edge_index_.emplace(key, id);
  return id;
}

std::optional<int> Graph::find(const Coord& c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Graph::vertex_at(const Coord& c) const {
  auto v = find(c);
  if (!v) throw Error("no vertex at " + to_string(c));
  return *v;
}

std::optional<int> Graph::edge_between(int u, int v) const {
  auto it = edge_index_.find(std::minmax(u, v));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

void Graph::set_boundary(std::vector<int> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  std::fill(is_boundary_.begin(), is_boundary_.end(), 0);
  for (int v : vertices) {
    if (v < 0 || v >= num_vertices()) throw Error("boundary vertex out of range");
    is_boundary_[v] = 1;
  }
  boundary_ = std::move(vertices);
}

void Graph::set_boundary_cycle(std::vector<int> cycle) {
  for (int v : cycle)
    if (!is_boundary(v)) throw Error("boundary cycle contains a non-boundary vertex");
  boundary_cycle_ = std::move(cycle);
}

void Graph::set_label(const std::string& name, std::vector<int> vertices) { labels_[name] = std::move(vertices); }

const std::vector<int>& Graph::label(const std::string& name) const {
  auto it = labels_.find(name);
  if (it == labels_.end()) throw Error("graph has no vertex label '" + name + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// Boundary conditions

BoundarySpec BoundarySpec::dobrushin(int a, int b) {
  BoundarySpec s(Kind::Dobrushin);
  s.a_ = a;
  s.b_ = b;
  return s;
}

BoundarySpec BoundarySpec::partition(std::vector<std::vector<int>> blocks) {
  BoundarySpec s(Kind::Partition);
  for (auto& blk : blocks) std::sort(blk.begin(), blk.end());
  s.blocks_ = std::move(blocks);
  return s;
}

void BoundarySpec::validate(const Graph& g) const {
  switch (kind_) {
    case Kind::Free:
    case Kind::Wired:
      return;
    case Kind::Dobrushin: {
      if (a_ < 0 || a_ >= g.num_vertices() || b_ < 0 || b_ >= g.num_vertices())
        throw Error("Dobrushin endpoints out of range");
      if (!g.is_boundary(a_) || !g.is_boundary(b_)) throw Error("Dobrushin endpoints must be boundary vertices");
      if (a_ != b_ && g.boundary_cycle().empty()) throw UnsupportedDomain("Dobrushin conditions need an ordered boundary cycle");
      return;
    }
    case Kind::Partition: {
      std::set<int> seen;
      for (const auto& blk : blocks_) {
        for (int v : blk) {
          if (v < 0 || v >= g.num_vertices() || !g.is_boundary(v))
            throw Error("partition block contains a non-boundary vertex");
          if (!seen.insert(v).second) throw Error("partition blocks are not disjoint");
        }
      }
      return;
    }
  }
}

std::vector<int> BoundarySpec::wired_arc(const Graph& g) const {
  if (kind_ != Kind::Dobrushin) throw Error("wired_arc requires Dobrushin boundary conditions");
  if (a_ == b_) return {a_};
  const auto& cyc = g.boundary_cycle();
  const auto ia = std::find(cyc.begin(), cyc.end(), a_);
  const auto ib = std::find(cyc.begin(), cyc.end(), b_);
  if (ia == cyc.end() || ib == cyc.end()) throw Error("Dobrushin endpoints not on the boundary cycle");
  std::vector<int> arc;
  std::size_t i = static_cast<std::size_t>(ia - cyc.begin());
  const std::size_t end = static_cast<std::size_t>(ib - cyc.begin());
  while (true) {
    arc.push_back(cyc[i]);
    if (i == end) break;
    i = (i + 1) % cyc.size();
  }
  return arc;
}

std::vector<std::vector<int>> BoundarySpec::blocks(const Graph& g) const {
  std::vector<std::vector<int>> out;
  switch (kind_) {
    case Kind::Free:
      break;
    case Kind::Wired:
      if (g.boundary().size() >= 2) out.push_back(g.boundary());
      break;
    case Kind::Dobrushin: {
      auto arc = wired_arc(g);
      if (arc.size() >= 2) out.push_back(std::move(arc));
      break;
    }
    case Kind::Partition:
      for (const auto& blk : blocks_)
        if (blk.size() >= 2) out.push_back(blk);
      break;
  }
  return out;
}

std::string to_string(const BoundarySpec& bc, const Graph& g) {
  switch (bc.kind()) {
    case BoundarySpec::Kind::Free:
      return "free";
    case BoundarySpec::Kind::Wired:
      return "wired";
    case BoundarySpec::Kind::Dobrushin:
      return "dobrushin:" + to_string(g.coord(bc.a())) + ":" + to_string(g.coord(bc.b()));
    case BoundarySpec::Kind::Partition:
      return "partition:" + std::to_string(bc.raw_blocks().size()) + " blocks";
  }
  return "?";
}

bool coarsens(const Graph& g, const BoundarySpec& coarser, const BoundarySpec& finer) {
  std::vector<int> block_of(g.num_vertices(), -1);
  const auto cb = coarser.blocks(g);
  for (std::size_t i = 0; i < cb.size(); ++i)
    for (int v : cb[i]) block_of[v] = static_cast<int>(i);
  for (const auto& blk : finer.blocks(g)) {
    const int first = block_of[blk.front()];
    if (first < 0) return false;
    for (int v : blk)
      if (block_of[v] != first) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builders

Graph build_rectangle(int x0, int x1, int y0, int y1) {
  if (x1 < x0 || y1 < y0) throw Error("empty rectangle");
  Graph g;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) g.add_vertex({x, y, 0});
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x < x1; ++x) g.add_edge(g.vertex_at({x, y}), g.vertex_at({x + 1, y}));
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y < y1; ++y) g.add_edge(g.vertex_at({x, y}), g.vertex_at({x, y + 1}));

  // Clockwise: top row west to east, right column down, bottom row east to
  // west, left column up.
  std::vector<int> cycle;
  for (int x = x0; x <= x1; ++x) cycle.push_back(g.vertex_at({x, y1}));
  for (int y = y1 - 1; y >= y0; --y) cycle.push_back(g.vertex_at({x1, y}));
  if (y1 > y0)
    for (int x = x1 - 1; x >= x0; --x) cycle.push_back(g.vertex_at({x, y0}));
  if (x1 > x0)
    for (int y = y0 + 1; y < y1; ++y) cycle.push_back(g.vertex_at({x0, y}));
  std::vector<int> bnd(cycle);
  g.set_boundary(bnd);
  g.set_boundary_cycle(std::move(cycle));
  g.set_rect({x0, x1, y0, y1});
  return g;
}

Graph build_box(int n, BoxKind kind) {
  if (n < 1) throw Error("box size must be >= 1");
  return kind == BoxKind::Plane ? build_rectangle(-n, n, -n, n) : build_rectangle(-n, n, 0, n);
}

Graph build_strip_rect(int n, int m) {
  if (n < 1 || m < 1) throw Error("strip height and half-width must be >= 1");
  Graph g = build_rectangle(-m, m, 0, n);
  std::vector<int> plus, minus, bottom_minus, left_arc, right_arc;
  for (int v : g.boundary_cycle()) {
    const Coord c = g.coord(v);
    const bool row = c.y == 0 || c.y == n;
    if (row && c.x >= 0) plus.push_back(v);
    if (row && c.x <= 0) minus.push_back(v);
    if (c.y == 0 && c.x < 0) bottom_minus.push_back(v);
    if ((row && c.x <= -1) || c.x == -m)
      left_arc.push_back(v);
    else
      right_arc.push_back(v);
  }
  g.set_label("plus", plus);
  g.set_label("minus", minus);
  g.set_label("bottom_minus", bottom_minus);
  g.set_label("left_arc", left_arc);
  g.set_label("right_arc", right_arc);
  return g;
}

namespace {

bool cover_has_vertex(int n, int k, int x, int y, int z) {
  return std::max(std::abs(x), std::abs(y)) <= n && std::abs(z) <= k;
}

}  // namespace

Graph build_universal_cover_box(int n, int k) {
  if (n < 1 || k < 0) throw Error("universal cover box needs n >= 1 and k >= 0");
  Graph g;
  g.set_planar(false);
  for (int z = -k; z <= k; ++z)
    for (int y = -n; y <= n; ++y)
      for (int x = -n; x <= n; ++x) g.add_vertex({x, y, z});

  for (int z = -k; z <= k; ++z) {
    for (int y = -n; y <= n; ++y) {
      for (int x = -n; x <= n; ++x) {
        const int v = g.vertex_at({x, y, z});
        if (y < n) g.add_edge(v, g.vertex_at({x, y + 1, z}));
        if (x == n) continue;
        if (x != 0 || y >= 0) {
          g.add_edge(v, g.vertex_at({x + 1, y, z}));
        } else if (cover_has_vertex(n, k, x + 1, y, z + 1)) {
          // Below the removed face the cut sends (0,y) to the next sheet.
          g.add_edge(v, g.vertex_at({x + 1, y, z + 1}));
        }
      }
    }
  }

  std::vector<int> bnd;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const Coord c = g.coord(v);
    const bool box_edge = std::max(std::abs(c.x), std::abs(c.y)) == n;
    const bool cover_edge = c.x == 0 && c.y <= 0 && std::abs(c.z) == k;
    if (box_edge || cover_edge) bnd.push_back(v);
  }
  g.set_boundary(std::move(bnd));
  return g;
}

int universal_cover_cut_edges(int n, int k) {
  if (n < 1 || k < 0) throw Error("universal cover box needs n >= 1 and k >= 0");
  return n * 2 * k;
}

// ---------------------------------------------------------------------------
// Subdomains

InducedSubgraph induced_subdomain(const Graph& g, std::span<const int> subset) {
  InducedSubgraph out;
  out.from_parent_vertex.assign(g.num_vertices(), -1);
  std::vector<int> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int v : sorted) {
    if (v < 0 || v >= g.num_vertices()) throw Error("subset vertex out of range");
    out.from_parent_vertex[v] = out.graph.add_vertex(g.coord(v));
    out.to_parent_vertex.push_back(v);
  }
  out.graph.set_planar(g.planar());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto [u, v] = g.edge(e);
    const int a = out.from_parent_vertex[u];
    const int b = out.from_parent_vertex[v];
    if (a >= 0 && b >= 0) {
      out.graph.add_edge(a, b);
      out.to_parent_edge.push_back(e);
    }
  }
  std::vector<int> bnd;
  for (int v : sorted) {
    bool on_boundary = g.is_boundary(v);
    for (const auto& inc : g.neighbors(v))
      if (out.from_parent_vertex[inc.vertex] < 0) on_boundary = true;
    if (on_boundary) bnd.push_back(out.from_parent_vertex[v]);
  }
  out.graph.set_boundary(std::move(bnd));
  return out;
}

std::vector<BoundaryEdge> edge_boundary(const Graph& g, std::span<const int> subset) {
  std::vector<char> in(g.num_vertices(), 0);
  for (int v : subset) in.at(v) = 1;
  std::vector<BoundaryEdge> out;
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto [u, v] = g.edge(e);
    if (in[u] && !in[v]) out.push_back({e, u, v});
    if (in[v] && !in[u]) out.push_back({e, v, u});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Duality

namespace {

struct HalfEdge {
  int from;
  int to;
  int edge;
};

double angle_of(const Coord& from, const Coord& to) { return std::atan2(to.y - from.y, to.x - from.x); }

}  // namespace

DualGraph dual_graph(const Domain& d) {
  const Graph& g = d.graph;
  if (!g.planar()) throw UnsupportedDomain("duality is implemented for planar domains only");
  if (g.num_edges() == 0) throw UnsupportedDomain("dual of an edgeless graph");
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.neighbors(v).empty()) throw UnsupportedDomain("dual needs a graph without isolated vertices");
  if (d.bc.kind() == BoundarySpec::Kind::Partition)
    throw UnsupportedDomain("dual of a general partition boundary condition");

  // Rotation system: neighbours sorted counterclockwise by angle.
  const int nv = g.num_vertices();
  std::vector<std::vector<Incidence>> rot(nv);
  for (int v = 0; v < nv; ++v) {
    rot[v].assign(g.neighbors(v).begin(), g.neighbors(v).end());
    std::sort(rot[v].begin(), rot[v].end(), [&](const Incidence& a, const Incidence& b) {
      return angle_of(g.coord(v), g.coord(a.vertex)) < angle_of(g.coord(v), g.coord(b.vertex));
    });
  }
  // Half-edge 2e is u->v, 2e+1 is v->u.
  const int nh = 2 * g.num_edges();
  auto half = [&](int h) {
    const Edge& e = g.edge(h / 2);
    return (h % 2 == 0) ? HalfEdge{e.u, e.v, h / 2} : HalfEdge{e.v, e.u, h / 2};
  };
  auto half_id = [&](int from, int edge) { return 2 * edge + (g.edge(edge).u == from ? 0 : 1); };
  // Face to the left of a half-edge: at the head, continue with the neighbour
  // immediately clockwise of the way back.
  auto next_half = [&](int h) {
    const HalfEdge he = half(h);
    const auto& r = rot[he.to];
    std::size_t i = 0;
    while (r[i].edge != he.edge) ++i;
    const std::size_t j = (i + r.size() - 1) % r.size();
    return half_id(he.to, r[j].edge);
  };

  std::vector<int> face_of(nh, -1);
  std::vector<double> face_area;
  std::vector<std::vector<int>> face_halves;
  for (int h = 0; h < nh; ++h) {
    if (face_of[h] >= 0) continue;
    const int f = static_cast<int>(face_area.size());
    double area2 = 0;
    std::vector<int> members;
    int cur = h;
    do {
      face_of[cur] = f;
      members.push_back(cur);
      const HalfEdge he = half(cur);
      const Coord a = g.coord(he.from), b = g.coord(he.to);
      area2 += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
      cur = next_half(cur);
    } while (cur != h);
    face_area.push_back(area2 / 2);
    face_halves.push_back(std::move(members));
  }
  int outer_faces = 0;
  for (double a : face_area)
    if (a <= 0) ++outer_faces;
  if (outer_faces != 1) throw UnsupportedDomain("dual needs a connected planar graph");

  DualGraph out;
  out.primal = d;
  std::vector<int> inner_vertex(face_area.size(), -1);
  for (std::size_t f = 0; f < face_area.size(); ++f) {
    if (face_area[f] <= 0) continue;
    long sx = 0, sy = 0;
    for (int h : face_halves[f]) {
      sx += g.coord(half(h).from).x;
      sy += g.coord(half(h).from).y;
    }
    const long cnt = static_cast<long>(face_halves[f].size());
    const Coord c{static_cast<int>(std::lround(4.0 * sx / cnt)), static_cast<int>(std::lround(4.0 * sy / cnt)), 0};
    inner_vertex[f] = out.graph.add_vertex(c);
    out.is_slot.push_back(0);
  }
  std::vector<int> slot_vertex(nh, -1);
  std::vector<int> slots;
  for (int h = 0; h < nh; ++h) {
    if (face_area[face_of[h]] > 0) continue;
    const HalfEdge he = half(h);
    const Coord a = g.coord(he.from), b = g.coord(he.to);
    const int dx = b.x - a.x, dy = b.y - a.y;
    const Coord c{2 * (a.x + b.x) - dy, 2 * (a.y + b.y) + dx, 0};
    slot_vertex[h] = out.graph.add_vertex(c);
    out.is_slot.push_back(1);
    slots.push_back(slot_vertex[h]);
  }
  auto dual_end = [&](int h) { return slot_vertex[h] >= 0 ? slot_vertex[h] : inner_vertex[face_of[h]]; };
  out.to_dual.resize(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const int a = dual_end(2 * e), b = dual_end(2 * e + 1);
    if (a == b) throw UnsupportedDomain("primal edge with the same inner face on both sides");
    if (out.graph.edge_between(a, b)) throw UnsupportedDomain("two primal edges separate the same pair of faces");
    out.to_dual[e] = out.graph.add_edge(a, b);
    out.to_primal.push_back(e);
  }
  out.graph.set_boundary(slots);
  out.bc = dual_boundary(d, out);
  out.bc.validate(out.graph);
  return out;
}

BoundarySpec dual_boundary(const Domain& d, const DualGraph& dual) {
  const Graph& g = d.graph;
  switch (d.bc.kind()) {
    case BoundarySpec::Kind::Free:
      return BoundarySpec::wired();
    case BoundarySpec::Kind::Wired:
      return BoundarySpec::free();
    case BoundarySpec::Kind::Dobrushin: {
      // Slots facing the free arc are wired together in the dual.
      std::vector<char> wired(g.num_vertices(), 0);
      for (int v : d.bc.wired_arc(g)) wired[v] = 1;
      std::vector<int> block;
      for (int de = 0; de < dual.graph.num_edges(); ++de) {
        const Edge& pe = g.edge(dual.to_primal[de]);
        const bool inside_arc = wired[pe.u] && wired[pe.v] && d.bc.a() != d.bc.b();
        if (inside_arc) continue;
        for (int w : {dual.graph.edge(de).u, dual.graph.edge(de).v})
          if (dual.is_slot[w]) block.push_back(w);
      }
      return BoundarySpec::partition({block});
    }
    case BoundarySpec::Kind::Partition:
      break;
  }
  throw UnsupportedDomain("dual of a general partition boundary condition");
}

DualGraph DualGraph::inverse() const {
  DualGraph out;
  out.graph = primal.graph;
  out.bc = primal.bc;
  out.to_dual = to_primal;
  out.to_primal = to_dual;
  out.is_slot.assign(primal.graph.num_vertices(), 0);
  out.primal = Domain(graph, bc);
  return out;
}

std::string graph_to_json(const Graph& g) {
  using nlohmann::json;
  json j;
  json vs = json::array();
  for (int v = 0; v < g.num_vertices(); ++v) vs.push_back({g.coord(v).x, g.coord(v).y, g.coord(v).z});
  json es = json::array();
  for (const Edge& e : g.edges()) es.push_back({e.u, e.v});
  j["vertices"] = vs;
  j["edges"] = es;
  j["boundary"] = g.boundary();
  j["boundary_cycle"] = g.boundary_cycle();
  j["planar"] = g.planar();
  if (g.rect()) j["rect"] = {g.rect()->x0, g.rect()->x1, g.rect()->y0, g.rect()->y1};
  j["labels"] = g.labels();
  return j.dump();
}

Graph graph_from_json(const std::string& text) {
  using nlohmann::json;
  Graph g;
  try {
    const json j = json::parse(text);
    for (const auto& c : j.at("vertices")) g.add_vertex({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()});
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    g.set_boundary(j.at("boundary").get<std::vector<int>>());
    g.set_boundary_cycle(j.at("boundary_cycle").get<std::vector<int>>());
    g.set_planar(j.at("planar").get<bool>());
    if (j.contains("rect")) {
      const auto r = j["rect"].get<std::vector<int>>();
      g.set_rect({r.at(0), r.at(1), r.at(2), r.at(3)});
    }
    for (const auto& [name, vs] : j.at("labels").items()) g.set_label(name, vs.get<std::vector<int>>());
  } catch (const json::exception& e) {
    throw Error(std::string("malformed graph JSON: ") + e.what());
  }
  return g;
}

}  // namespace rcm
