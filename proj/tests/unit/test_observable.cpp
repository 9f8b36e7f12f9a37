#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "rcm/exact.hpp"
#include "rcm/observable.hpp"

using namespace rcm;

namespace {

Domain dobrushin_rect(int x0, int x1, int y0, int y1, Coord a, Coord b) {
  Graph g = build_rectangle(x0, x1, y0, y1);
  const int va = g.vertex_at(a), vb = g.vertex_at(b);
  return Domain(std::move(g), BoundarySpec::dobrushin(va, vb));
}

Domain slit_box() {
  const Graph b = build_box(1);
  std::vector<int> keep;
  for (int v = 0; v < b.num_vertices(); ++v)
    if (b.coord(v) != Coord{0, 1, 0}) keep.push_back(v);
  Graph g = induced_subdomain(b, keep).graph;
  const int o = g.vertex_at({0, 0, 0});
  return Domain(std::move(g), BoundarySpec::dobrushin(o, o));
}

Domain collapsed_box() {
  Graph g = build_box(1);
  const int top = g.vertex_at({0, 1, 0});
  return Domain(std::move(g), BoundarySpec::dobrushin(top, top));
}

std::vector<Domain> contour_domains() {
  std::vector<Domain> out;
  out.push_back(dobrushin_rect(-1, 1, -1, 1, {-1, 1, 0}, {1, 1, 0}));
  out.push_back(collapsed_box());
  out.push_back(dobrushin_rect(0, 5, 0, 1, {0, 1, 0}, {3, 0, 0}));
  out.push_back(slit_box());
  return out;
}

}  // namespace

TEST_CASE("spin exponent") {
  CHECK(std::abs(sigma_hat(1) - 2.0 / 3) < 1e-15);
  CHECK(std::abs(sigma_hat(2) - 0.5) < 1e-15);
  CHECK(sigma_hat(4) == 0.0);
  for (double q = 1; q <= 4; q += 0.125) CHECK(std::abs(std::cos(sigma_hat(q) * std::numbers::pi / 2) - std::sqrt(q) / 2) < 1e-12);
  CHECK_THROWS_AS(sigma_hat(0.5), Error);
  CHECK_THROWS_AS(sigma_hat(4.5), Error);
}

TEST_CASE("exploration paths are valid and determine the visited edges") {
  for (const Domain& d : contour_domains()) {
    const MedialGraph m = medial_graph(d);
    const int ne = d.graph.num_edges();
    std::vector<std::uint8_t> omega(ne);
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << ne); b += (ne > 12 ? 7 : 1)) {
      Config{b}.unpack(omega, ne);
      const ExplorationPath p = explore(m, omega);
      REQUIRE(p.turns.size() + 1 == p.edges.size());
      for (std::size_t i = 0; i + 1 < p.edges.size(); ++i) {
        CHECK(quarter_turn(m.edges()[p.edges[i]].dir, m.edges()[p.edges[i + 1]].dir) == p.turns[i]);
        const int site = m.edges()[p.edges[i]].head;
        CHECK((p.turns[i] == -1) == m.is_open(site, omega));
        CHECK(p.winding_to_end[i] == p.winding_to_end[i + 1] + p.turns[i]);
      }
      CHECK(p.winding_to_end.back() == 0);
    }
  }
}

TEST_CASE("collapsed explorations close a loop") {
  for (const Domain& d : {collapsed_box(), slit_box()}) {
    const MedialGraph m = medial_graph(d);
    CHECK(m.collapsed());
    const std::vector<std::uint8_t> closed(d.graph.num_edges(), 0);
    const ExplorationPath p = explore(m, closed);
    // e_a leaves the stub and e_b enters it, so the walk itself turns three
    // quarters; the step from e_b back to e_a closes the full turn.
    CHECK(std::abs(p.total_winding()) == 3);
    const int closing = quarter_turn(m.edges()[m.end_edge()].dir, m.edges()[m.start_edge()].dir);
    CHECK(std::abs(p.total_winding() + closing) == 4);
  }
  // All closed in the slit box: the walk circles the origin's corner plaquettes.
  const Domain s = slit_box();
  const MedialGraph m = medial_graph(s);
  const std::vector<std::uint8_t> closed(s.graph.num_edges(), 0);
  const ExplorationPath p = explore(m, closed);
  for (int e : p.edges) CHECK(m.edges()[e].vertex_face == Point2{0, 0});
}

TEST_CASE("observable bounds and special values") {
  for (const Domain& d : contour_domains()) {
    const MedialGraph m = medial_graph(d);
    for (double q : {1.0, 2.0, 4.0}) {
      const ObservableTable f = observable_exact(d, m, q);
      CHECK(f.p == self_dual_point(q));
      for (int e = 0; e < m.num_edges(); ++e) {
        CHECK(std::abs(f.value[e]) <= f.visit_prob[e] + 1e-12);
        CHECK(f.visit_prob[e] <= 1 + 1e-12);
        if (q == 4.0) {
          CHECK(std::abs(f.value[e].imag()) < 1e-15);
          CHECK(std::abs(f.value[e].real() - f.visit_prob[e]) < 1e-12);
        }
      }
      CHECK(std::abs(f.value[m.end_edge()] - 1.0) < 1e-12);
      CHECK(std::abs(f.visit_prob[m.start_edge()] - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("contour sums vanish at the self-dual point") {
  for (const Domain& d : contour_domains()) {
    const MedialGraph m = medial_graph(d);
    for (double q : {1.0, 2.0, 3.0, 3.5, 4.0}) {
      const ObservableTable f = observable_exact(d, m, q);
      for (Admissibility mode : {Admissibility::Strict, Admissibility::Extended}) {
        const auto sites = admissible_sites(m, mode);
        CHECK(contour_sum(m, f, {}, mode) == std::complex<double>(0, 0));
        for (int s : sites) CHECK(std::abs(contour_sum(m, f, {s}, mode)) < 1e-12);
        CHECK(std::abs(contour_sum(m, f, sites, mode)) < 1e-12);
      }
    }
  }
}

TEST_CASE("contour sums are additive over disjoint sets") {
  const Domain d = dobrushin_rect(0, 5, 0, 1, {0, 1, 0}, {3, 0, 0});
  const MedialGraph m = medial_graph(d);
  const ObservableTable f = observable_exact(d, m, 2.0, 0.4);
  const auto sites = admissible_sites(m, Admissibility::Extended);
  REQUIRE(sites.size() >= 4);
  for (std::size_t i = 0; i + 1 < sites.size(); ++i) {
    const std::vector<int> a{sites[i]}, b{sites[i + 1]}, ab{sites[i], sites[i + 1]};
    const auto lhs = contour_sum(m, f, ab, Admissibility::Extended);
    const auto rhs = contour_sum(m, f, a, Admissibility::Extended) + contour_sum(m, f, b, Admissibility::Extended);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("off the self-dual point the sums do not vanish") {
  const Domain d = dobrushin_rect(-1, 1, -1, 1, {-1, 1, 0}, {1, 1, 0});
  const double q = 2.0;
  for (double dp : {-0.1, 0.1}) {
    const ContourReport r = contour_report(d, "box1", q, self_dual_point(q) + dp, Admissibility::Strict);
    CHECK(r.max_modulus > 1e-4);
  }
  const ContourReport at = contour_report(d, "box1", q, std::nullopt, Admissibility::Strict);
  CHECK(at.max_modulus < 1e-12);
  const auto j = nlohmann::json::parse(to_json(at, medial_graph(d)));
  CHECK(j["domain"] == "box1");
  CHECK(j["subsets"].get<std::size_t>() == at.subsets);
  CHECK(j["singles"].size() == at.singles.size());
}

TEST_CASE("contour sets must be admissible") {
  const Domain d = dobrushin_rect(-1, 1, -1, 1, {-1, 1, 0}, {1, 1, 0});
  const MedialGraph m = medial_graph(d);
  int exterior = -1;
  for (int s = 0; s < m.num_sites(); ++s)
    if (m.sites()[s].edge < 0) exterior = s;
  REQUIRE(exterior >= 0);
  CHECK_THROWS_AS(contour_boundary(m, {exterior}), Error);
  const auto strict = admissible_sites(m, Admissibility::Strict);
  const auto extended = admissible_sites(m, Admissibility::Extended);
  CHECK(strict.size() <= extended.size());
  CHECK(extended.size() == 12);
  // Boundary terms point into the set for incoming edges.
  for (const ContourTerm& t : contour_boundary(m, {strict.front()}))
    CHECK((m.edges()[t.edge].head == strict.front()) == (t.sign == 1));
}

TEST_CASE("Monte Carlo observable agrees with the exact table") {
  const Domain d = dobrushin_rect(0, 2, 0, 1, {0, 1, 0}, {2, 1, 0});
  const MedialGraph m = medial_graph(d);
  for (double q : {2.0, 4.0}) {
    const ObservableTable f = observable_exact(d, m, q);
    std::vector<int> edges(m.num_edges());
    for (int i = 0; i < m.num_edges(); ++i) edges[i] = i;
    const auto mc = observable_mc(d, m, q, edges, 5, 30000);
    for (int e = 0; e < m.num_edges(); ++e) {
      CHECK(std::abs(mc[e].re.mean - f.value[e].real()) <= 4 * mc[e].re.std_error + 2e-3);
      CHECK(std::abs(mc[e].im.mean - f.value[e].imag()) <= 4 * mc[e].im.std_error + 2e-3);
      CHECK(std::hypot(mc[e].re.mean, mc[e].im.mean) <= 1 + 1e-12);
      if (q == 4.0) CHECK(mc[e].im.mean == 0.0);
    }
  }
  CHECK_THROWS_AS(observable_mc(d, m, 2.0, {0}, 1, 100), Error);
}
