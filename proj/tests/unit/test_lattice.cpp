#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "rcm/lattice.hpp"

using namespace rcm;

namespace {

std::set<Coord> coords_of(const Graph& g, const std::vector<int>& vs) {
  std::set<Coord> out;
  for (int v : vs) out.insert(g.coord(v));
  return out;
}

int grid_edges(int w, int h) { return (w - 1) * h + w * (h - 1); }

bool adjacency_symmetric(const Graph& g) {
  for (int v = 0; v < g.num_vertices(); ++v)
    for (const auto& inc : g.neighbors(v)) {
      const auto back = g.neighbors(inc.vertex);
      if (std::none_of(back.begin(), back.end(), [&](const Incidence& b) { return b.vertex == v && b.edge == inc.edge; }))
        return false;
    }
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("boxes have grid counts") {
  const Graph b1 = build_box(1);
  CHECK(b1.num_vertices() == 9);
  CHECK(b1.num_edges() == 12);
  CHECK(b1.boundary().size() == 8);
  const Graph h1 = build_box(1, BoxKind::HalfPlane);
  CHECK(h1.num_vertices() == 6);
  CHECK(h1.num_edges() == 7);
  const Graph b2 = build_box(2);
  CHECK(b2.num_vertices() == 25);
  CHECK(b2.num_edges() == 40);
  for (int n = 1; n <= 5; ++n) {
    const Graph b = build_box(n);
    CHECK(b.num_vertices() == (2 * n + 1) * (2 * n + 1));
    CHECK(b.num_edges() == grid_edges(2 * n + 1, 2 * n + 1));
    CHECK(static_cast<int>(b.boundary().size()) == 8 * n);
    CHECK(adjacency_symmetric(b));
    const Graph h = build_box(n, BoxKind::HalfPlane);
    CHECK(h.num_edges() == grid_edges(2 * n + 1, n + 1));
  }
}

TEST_CASE("boundary cycle of a rectangle runs clockwise through every boundary vertex") {
  const Graph r = build_rectangle(0, 3, 0, 2);
  const auto& cyc = r.boundary_cycle();
  CHECK(cyc.size() == r.boundary().size());
  long long twice_area = 0;
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    const Coord a = r.coord(cyc[i]), b = r.coord(cyc[(i + 1) % cyc.size()]);
    CHECK(std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1);
    twice_area += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  CHECK(twice_area == -2 * 3 * 2);
}

TEST_CASE("strip truncations and their labelled arcs") {
  const Graph s11 = build_strip_rect(1, 1);
  CHECK(s11.num_vertices() == 6);
  CHECK(s11.num_edges() == 7);
  const Graph s22 = build_strip_rect(2, 2);
  CHECK(s22.num_vertices() == 15);
  CHECK(s22.num_edges() == 22);
  const Graph s23 = build_strip_rect(2, 3);
  CHECK(coords_of(s23, s23.label("bottom_minus")) == std::set<Coord>{{-1, 0, 0}, {-2, 0, 0}, {-3, 0, 0}});

  // The two arcs split the boundary with no overlap.
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      const Graph s = build_strip_rect(n, m);
      std::vector<int> left = s.label("left_arc"), right = s.label("right_arc");
      std::sort(left.begin(), left.end());
      std::sort(right.begin(), right.end());
      std::vector<int> both;
      std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(both));
      CHECK(both.empty());
      CHECK(left.size() + right.size() == s.boundary().size());
      for (int v : left) CHECK(s.coord(v).x <= -1);
    }
}

TEST_CASE("universal cover truncation") {
  for (int n = 1; n <= 3; ++n) {
    const Graph box = build_box(n);
    const Graph c0 = build_universal_cover_box(n, 0);
    CHECK(c0.num_vertices() == box.num_vertices());
    // Sheet 0 loses the cut edges below the axis, which lead to a missing sheet.
    CHECK(c0.num_edges() == box.num_edges() - n);
    for (int k = 1; k <= 3; ++k) {
      const Graph c = build_universal_cover_box(n, k);
      CHECK(c.num_vertices() == (2 * k + 1) * box.num_vertices());
      CHECK(c.num_edges() == (2 * k + 1) * box.num_edges() - n);
      CHECK(universal_cover_cut_edges(n, k) == 2 * k * n);
      CHECK(adjacency_symmetric(c));
      for (int v = 0; v < c.num_vertices(); ++v) {
        const Coord x = c.coord(v);
        if (std::max(std::abs(x.x), std::abs(x.y)) < n && std::abs(x.z) < k) CHECK(c.neighbors(v).size() == 4);
      }
      for (const Edge& e : c.edges()) {
        const Coord a = c.coord(e.u), b = c.coord(e.v);
        CHECK(std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1);
        if (a.z != b.z) {
          // Only cut edges below the axis change sheet, by exactly one.
          CHECK(a.y == b.y);
          CHECK(a.y <= -1);
          CHECK(std::min(a.x, b.x) == 0);
          CHECK(std::abs(a.z - b.z) == 1);
        }
      }
    }
  }
}

TEST_CASE("a loop around the face right of the cut changes sheet") {
  const Graph c = build_universal_cover_box(2, 1);
  const int start = c.vertex_at({0, 0, 0});
  const int a = c.vertex_at({1, 0, 0});
  const int b = c.vertex_at({1, -1, 0});
  CHECK(c.edge_between(start, a));
  CHECK(c.edge_between(a, b));
  CHECK_FALSE(c.edge_between(b, c.vertex_at({0, -1, 0})));
  const auto back = c.edge_between(b, c.vertex_at({0, -1, -1}));
  REQUIRE(back);
  CHECK(c.edge_between(c.vertex_at({0, -1, -1}), c.vertex_at({0, 0, -1})));
}

TEST_CASE("induced subdomain and edge boundary") {
  const Graph b1 = build_box(1);
  std::vector<int> all(b1.num_vertices());
  for (int v = 0; v < b1.num_vertices(); ++v) all[v] = v;
  CHECK(edge_boundary(b1, all).empty());
  const int origin = b1.vertex_at({0, 0, 0});
  const auto d0 = edge_boundary(b1, std::vector<int>{origin});
  CHECK(d0.size() == 4);
  for (const auto& be : d0) CHECK(be.inside == origin);
  CHECK(edge_boundary(b1, std::vector<int>{}).empty());
  CHECK(induced_subdomain(b1, std::vector<int>{}).graph.num_vertices() == 0);

  Graph path;
  for (int i = 0; i < 3; ++i) path.add_vertex({i, 0, 0});
  path.add_edge(0, 1);
  const int bc = path.add_edge(1, 2);
  path.set_boundary({0, 2});
  const auto dp = edge_boundary(path, std::vector<int>{0, 1});
  REQUIRE(dp.size() == 1);
  CHECK(dp[0].edge == bc);
  CHECK(dp[0].inside == 1);
  CHECK(dp[0].outside == 2);

  const auto sub = induced_subdomain(b1, std::vector<int>{origin, b1.vertex_at({1, 0, 0}), b1.vertex_at({1, 1, 0})});
  CHECK(sub.graph.num_vertices() == 3);
  CHECK(sub.graph.num_edges() == 2);
  CHECK(sub.graph.boundary().size() == 3);
  for (int e = 0; e < sub.graph.num_edges(); ++e) {
    const Edge& pe = b1.edge(sub.to_parent_edge[e]);
    const Edge& se = sub.graph.edge(e);
    CHECK(std::set<int>{pe.u, pe.v} == std::set<int>{sub.to_parent_vertex[se.u], sub.to_parent_vertex[se.v]});
  }
}

TEST_CASE("boundary conditions validate against the graph") {
  const Graph b1 = build_box(1);
  const int origin = b1.vertex_at({0, 0, 0});
  CHECK_THROWS_AS(Domain(b1, BoundarySpec::dobrushin(origin, 0)), Error);
  CHECK_NOTHROW(Domain(b1, BoundarySpec::dobrushin(b1.vertex_at({-1, 1, 0}), b1.vertex_at({1, 1, 0}))));
  CHECK_THROWS_AS(Domain(b1, BoundarySpec::partition({{origin, 0}})), Error);
  const Graph r = build_rectangle(0, 2, 0, 1);
  const auto arc = BoundarySpec::dobrushin(r.vertex_at({0, 1, 0}), r.vertex_at({2, 1, 0})).wired_arc(r);
  CHECK(coords_of(r, arc) == std::set<Coord>{{0, 1, 0}, {1, 1, 0}, {2, 1, 0}});
  CHECK(coarsens(b1, BoundarySpec::wired(), BoundarySpec::free()));
  CHECK_FALSE(coarsens(b1, BoundarySpec::free(), BoundarySpec::wired()));
}

TEST_CASE("planar duals") {
  Graph one;
  one.add_vertex({0, 0, 0});
  one.add_vertex({1, 0, 0});
  one.add_edge(0, 1);
  one.set_boundary({0, 1});
  const DualGraph d1 = dual_graph(Domain(one, BoundarySpec::free()));
  CHECK(d1.graph.num_edges() == 1);
  CHECK(d1.bc.kind() == BoundarySpec::Kind::Wired);
  CHECK(d1.graph.num_vertices() == 2);

  const DualGraph db = dual_graph(Domain(build_box(1), BoundarySpec::free()));
  CHECK(db.graph.num_edges() == 12);
  CHECK(std::count(db.is_slot.begin(), db.is_slot.end(), 0) == 4);
  CHECK(std::count(db.is_slot.begin(), db.is_slot.end(), 1) == 8);
  CHECK(db.bc.kind() == BoundarySpec::Kind::Wired);
  for (int v = 0; v < db.graph.num_vertices(); ++v) CHECK(db.graph.is_boundary(v) == static_cast<bool>(db.is_slot[v]));

  const DualGraph dw = dual_graph(Domain(build_box(1), BoundarySpec::wired()));
  CHECK(dw.bc.kind() == BoundarySpec::Kind::Free);

  CHECK_THROWS_AS(dual_graph(Domain(build_universal_cover_box(1, 1), BoundarySpec::free())), UnsupportedDomain);
}

TEST_CASE("duality is an involution on edge ids and boundary conditions") {
  std::vector<Domain> domains;
  const Graph r = build_rectangle(0, 2, 0, 1);
  domains.emplace_back(build_box(1), BoundarySpec::free());
  domains.emplace_back(build_box(2), BoundarySpec::wired());
  domains.emplace_back(r, BoundarySpec::dobrushin(r.vertex_at({0, 1, 0}), r.vertex_at({2, 0, 0})));
  for (const Domain& d : domains) {
    const DualGraph dg = dual_graph(d);
    for (int e = 0; e < d.graph.num_edges(); ++e) CHECK(dg.to_primal[dg.to_dual[e]] == e);
    const DualGraph back = dg.inverse();
    CHECK(back.graph.num_edges() == d.graph.num_edges());
    CHECK(back.domain().bc == d.bc);
    for (int e = 0; e < d.graph.num_edges(); ++e) CHECK(back.to_dual[dg.to_dual[e]] == e);
  }
}

TEST_CASE("graph JSON round trip and golden files") {
  for (const Graph& g : {build_box(1), build_strip_rect(1, 1), build_universal_cover_box(1, 1)}) {
    const Graph back = graph_from_json(graph_to_json(g));
    CHECK(graph_to_json(back) == graph_to_json(g));
  }
  const Graph box = graph_from_json(read_file(std::string(RCM_GOLDEN_DIR) + "/box1.json"));
  CHECK(graph_to_json(box) == graph_to_json(build_box(1)));
  const Graph strip = graph_from_json(read_file(std::string(RCM_GOLDEN_DIR) + "/strip_1_1.json"));
  CHECK(graph_to_json(strip) == graph_to_json(build_strip_rect(1, 1)));
  CHECK_THROWS_AS(graph_from_json("{\"vertices\": 3}"), Error);
}
