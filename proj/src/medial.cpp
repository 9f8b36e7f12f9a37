#include "rcm/medial.hpp"

#include <algorithm>
#include <cstdlib>

namespace rcm {

namespace {

Point2 twice(const Coord& c) { return {2 * c.x, 2 * c.y}; }
Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }

bool even(int v) { return v % 2 == 0; }

// Outgoing diagonals at a site: horizontal edges (odd, even) leave towards
// NW and SE, vertical edges (even, odd) towards NE and SW.
std::array<int, 2> out_dirs(Point2 site) { return even(site.y) ? std::array<int, 2>{1, 3} : std::array<int, 2>{0, 2}; }

// Unit steps around a primal vertex in counterclockwise order: E, N, W, S.
constexpr std::array<Point2, 4> kAxes{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

void require_unit_lattice(const Graph& g) {
  if (!g.planar()) throw UnsupportedDomain("medial graph needs a planar domain");
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.coord(v).z != 0) throw UnsupportedDomain("medial graph needs planar coordinates");
  for (const Edge& e : g.edges()) {
    const Coord a = g.coord(e.u), b = g.coord(e.v);
    if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) throw UnsupportedDomain("medial graph needs unit lattice edges");
  }
}

}  // namespace

std::optional<int> MedialGraph::find_site(Point2 p) const {
  auto it = site_index_.find(p);
  if (it == site_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MedialGraph::find_edge(int tail, int head) const {
  auto it = edge_index_.find({tail, head});
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

int MedialGraph::add_site(Point2 p, int edge, std::uint8_t state) {
  const int id = num_sites();
  sites_.push_back({p, edge, state});
  site_index_.emplace(p, id);
  if (edge >= 0) site_of_edge_.at(edge) = id;
  return id;
}

void MedialGraph::link() {
  incident_.assign(sites_.size(), {});
  for (int s = 0; s < num_sites(); ++s) {
    const Point2 m = sites_[s].pos;
    for (int k : out_dirs(m)) {
      const Point2 d = kDiagonals[k];
      auto h = find_site(m + d);
      if (!h) continue;
      const Point2 c1{m.x + d.x, m.y}, c2{m.x, m.y + d.y};
      const bool c1_vertex = even(c1.x) && even(c1.y);
      MedialEdge e{s, *h, k, c1_vertex ? c1 : c2, c1_vertex ? c2 : c1};
      const int id = num_edges();
      edges_.push_back(e);
      edge_index_.emplace(std::make_pair(s, *h), id);
      incident_[s].push_back(id);
      incident_[*h].push_back(id);
    }
  }
  open_succ_.assign(edges_.size(), -1);
  closed_succ_.assign(edges_.size(), -1);
  for (int id = 0; id < num_edges(); ++id) {
    const MedialEdge& e = edges_[id];
    const Point2 h = sites_[e.head].pos;
    const int right = (e.dir + 3) % 4;
    const int left = (e.dir + 1) % 4;
    if (auto n = find_site(h + kDiagonals[right])) open_succ_[id] = edge_index_.at({e.head, *n});
    if (auto n = find_site(h + kDiagonals[left])) closed_succ_[id] = edge_index_.at({e.head, *n});
  }
}

MedialGraph medial_graph(const Domain& d) {
  const Graph& g = d.graph;
  if (d.bc.kind() != BoundarySpec::Kind::Dobrushin)
    throw UnsupportedDomain("medial graph needs Dobrushin boundary conditions");
  require_unit_lattice(g);
  const int a = d.bc.a(), b = d.bc.b();
  if (!g.is_boundary(a) || !g.is_boundary(b)) throw Error("Dobrushin endpoints must be boundary vertices");

  MedialGraph mg;
  mg.site_of_edge_.assign(g.num_edges(), -1);
  mg.collapsed_ = (a == b);

  if (mg.collapsed_) {
    // Every lattice edge touching the domain; missing ones are closed.
    for (int v = 0; v < g.num_vertices(); ++v) {
      const Coord c = g.coord(v);
      for (Point2 ax : kAxes) {
        const Point2 pos = twice(c) + ax;
        if (mg.find_site(pos)) continue;
        auto w = g.find({c.x + ax.x, c.y + ax.y, 0});
        std::optional<int> e = w ? g.edge_between(v, *w) : std::nullopt;
        mg.add_site(pos, e ? *e : -1, 0);
      }
    }
    mg.link();
    const Point2 va = twice(g.coord(a));
    int stub_axis = -1;
    for (int k : {1, 0, 3, 2}) {  // N, E, S, W
      const int s = *mg.find_site(va + kAxes[k]);
      if (mg.sites_[s].edge < 0) {
        stub_axis = k;
        break;
      }
    }
    if (stub_axis < 0) throw UnsupportedDomain("collapsed exploration point has no missing lattice edge");
    const int stub = *mg.find_site(va + kAxes[stub_axis]);
    const int next = *mg.find_site(va + kAxes[(stub_axis + 1) % 4]);
    const int prev = *mg.find_site(va + kAxes[(stub_axis + 3) % 4]);
    mg.start_ = *mg.find_edge(stub, next);
    mg.end_ = *mg.find_edge(prev, stub);
    return mg;
  }

  const auto& rect = g.rect();
  if (!rect || rect->x1 <= rect->x0 || rect->y1 <= rect->y0 ||
      g.num_edges() != (rect->x1 - rect->x0) * (rect->y1 - rect->y0 + 1) + (rect->y1 - rect->y0) * (rect->x1 - rect->x0 + 1))
    throw UnsupportedDomain("Dobrushin medial graph with a != b needs a full rectangle of width and height >= 1");
  const RectExtent r = *rect;
  std::vector<char> wired(g.num_vertices(), 0);
  for (int v : d.bc.wired_arc(g)) wired[v] = 1;
  auto wired_at = [&](int x, int y) { return wired[g.vertex_at({x, y, 0})] != 0; };
  // The boundary vertex next to a ring vertex; corners have none.
  auto partner = [&](int x, int y) -> std::optional<std::pair<int, int>> {
    for (Point2 ax : kAxes)
      if (r.contains(x + ax.x, y + ax.y)) return std::make_pair(x + ax.x, y + ax.y);
    return std::nullopt;
  };
  auto exterior_state = [&](int ux, int uy, int vx, int vy) -> std::uint8_t {
    const bool iu = r.contains(ux, uy), iv = r.contains(vx, vy);
    if (iu || iv) return iu ? wired_at(ux, uy) : wired_at(vx, vy);
    bool all = true;
    for (auto p : {partner(ux, uy), partner(vx, vy)})
      if (p && !wired_at(p->first, p->second)) all = false;
    return all ? 1 : 0;
  };
  for (int y = r.y0 - 1; y <= r.y1 + 1; ++y) {
    for (int x = r.x0 - 1; x <= r.x1 + 1; ++x) {
      for (Point2 ax : {Point2{1, 0}, Point2{0, 1}}) {
        const int x2 = x + ax.x, y2 = y + ax.y;
        if (x2 > r.x1 + 1 || y2 > r.y1 + 1) continue;
        const Point2 pos{x + x2, y + y2};
        if (r.contains(x, y) && r.contains(x2, y2)) {
          const int e = *g.edge_between(g.vertex_at({x, y, 0}), g.vertex_at({x2, y2, 0}));
          mg.add_site(pos, e, 0);
        } else {
          mg.add_site(pos, -1, exterior_state(x, y, x2, y2));
        }
      }
    }
  }
  mg.link();

  // Start and end edges sit on the exterior faces where the boundary
  // switches from free to wired (before a) and from wired to free (after b).
  const auto& cyc = g.boundary_cycle();
  const int n = static_cast<int>(cyc.size());
  const int ia = static_cast<int>(std::find(cyc.begin(), cyc.end(), a) - cyc.begin());
  const int ib = static_cast<int>(std::find(cyc.begin(), cyc.end(), b) - cyc.begin());
  auto outer_face = [&](int u, int v) {
    const Point2 pu = twice(g.coord(u)), pv = twice(g.coord(v));
    const Point2 dv{(pv.x - pu.x) / 2, (pv.y - pu.y) / 2};
    const Point2 mid = (pu + pv);
    return Point2{(mid.x - dv.y * 2) / 2, (mid.y + dv.x * 2) / 2};
  };
  // Face sites clockwise from north.
  auto face_ring = [](Point2 c) {
    return std::array<Point2, 4>{{{c.x, c.y + 1}, {c.x + 1, c.y}, {c.x, c.y - 1}, {c.x - 1, c.y}}};
  };
  auto opposite_index = [&](Point2 c, Point2 edge_mid) {
    const auto ring = face_ring(c);
    const Point2 target = c + (c - edge_mid);
    for (int k = 0; k < 4; ++k)
      if (ring[k] == target) return k;
    throw Error("medial construction: face does not border the boundary edge");
  };
  {
    const int u = cyc[(ia + n - 1) % n], v = a;
    const Point2 c = outer_face(u, v);
    const Point2 m = twice(g.coord(u)) + twice(g.coord(v));
    const Point2 mid{m.x / 2, m.y / 2};
    const auto ring = face_ring(c);
    const int k = opposite_index(c, mid);
    mg.start_ = *mg.find_edge(*mg.find_site(ring[k]), *mg.find_site(ring[(k + 1) % 4]));
  }
  {
    const int u = b, v = cyc[(ib + 1) % n];
    const Point2 c = outer_face(u, v);
    const Point2 m = twice(g.coord(u)) + twice(g.coord(v));
    const Point2 mid{m.x / 2, m.y / 2};
    const auto ring = face_ring(c);
    const int k = opposite_index(c, mid);
    mg.end_ = *mg.find_edge(*mg.find_site(ring[(k + 3) % 4]), *mg.find_site(ring[k]));
  }
  return mg;
}

}  // namespace rcm
