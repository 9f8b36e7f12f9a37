#pragma once

// Oriented medial graph of a square-lattice domain under Dobrushin boundary
// conditions, with the successor tables that drive the exploration walk.
//
// Positions are in doubled coordinates: primal vertex (x,y) sits at (2x,2y),
// the medial vertex of an edge at the sum of its endpoints, a dual face at
// odd/odd coordinates. Medial edges are diagonal unit steps.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rcm/lattice.hpp"

namespace rcm {

struct Point2 {
  int x = 0;
  int y = 0;
  auto operator<=>(const Point2&) const = default;
};

/// Diagonal directions in counterclockwise order: NE, NW, SW, SE.
inline constexpr std::array<Point2, 4> kDiagonals{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};

struct MedialSite {
  Point2 pos;
  /// Primal edge id, or -1 for a site outside the domain (stub or ring edge)
  /// whose state is fixed by the boundary condition.
  int edge = -1;
  std::uint8_t fixed_state = 0;
};

struct MedialEdge {
  int tail = 0;
  int head = 0;
  int dir = 0;           // index into kDiagonals
  Point2 vertex_face;    // primal vertex on the left
  Point2 dual_face;      // dual face on the right
};

class MedialGraph {
 public:
  const std::vector<MedialSite>& sites() const { return sites_; }
  const std::vector<MedialEdge>& edges() const { return edges_; }
  int num_sites() const { return static_cast<int>(sites_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Successor after crossing an open (resp. closed) primal edge at the head
  /// of `e`; -1 when the step would leave the constructed neighbourhood.
  int open_successor(int e) const { return open_succ_.at(e); }
  int closed_successor(int e) const { return closed_succ_.at(e); }
  int successor(int e, bool open) const { return open ? open_successor(e) : closed_successor(e); }

  int start_edge() const { return start_; }
  int end_edge() const { return end_; }

  /// Medial site carrying primal edge `e`.
  int site_of_edge(int e) const { return site_of_edge_.at(e); }
  std::optional<int> find_site(Point2 p) const;
  std::optional<int> find_edge(int tail, int head) const;

  /// Directed medial edges touching a site (two incoming, two outgoing when
  /// all four neighbours exist).
  std::span<const int> incident(int site) const { return incident_.at(site); }

  /// State of the site's primal edge under a configuration indexed by edge id.
  bool is_open(int site, std::span<const std::uint8_t> omega) const {
    const MedialSite& s = sites_[site];
    return s.edge >= 0 ? omega[s.edge] != 0 : s.fixed_state != 0;
  }

  int primal_edges() const { return static_cast<int>(site_of_edge_.size()); }
  bool collapsed() const { return collapsed_; }

 private:
  friend MedialGraph medial_graph(const Domain& d);
  int add_site(Point2 p, int edge, std::uint8_t state);
  void link();

  std::vector<MedialSite> sites_;
  std::vector<MedialEdge> edges_;
  std::map<Point2, int> site_index_;
  std::map<std::pair<int, int>, int> edge_index_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> open_succ_;
  std::vector<int> closed_succ_;
  std::vector<int> site_of_edge_;
  int start_ = -1;
  int end_ = -1;
  bool collapsed_ = false;
};

/// Requires a planar unit-step graph on Z^2 with Dobrushin(a,b) conditions.
/// For a != b the graph must be a full rectangle with at least two rows and
/// two columns. For a == b (free conditions seen from a) any such graph works
/// as long as `a` misses at least one lattice neighbour.
MedialGraph medial_graph(const Domain& d);

}  // namespace rcm
