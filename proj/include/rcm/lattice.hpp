#pragma once

// Finite graphs used by the random-cluster laboratory: planar boxes, half-plane
// boxes, truncated strips and truncated universal covers, together with their
// boundaries, boundary conditions, induced subdomains and planar duals.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested construction is not available for this kind of domain
/// (e.g. duality on a universal cover, medial graph of a non-rectangle).
class UnsupportedDomain : public Error {
 public:
  using Error::Error;
};

/// Integer lattice coordinates. `z` is the sheet index on the universal cover
/// and stays 0 for planar graphs.
struct Coord {
  int x = 0;
  int y = 0;
  int z = 0;
  auto operator<=>(const Coord&) const = default;
};

std::string to_string(const Coord& c);

struct Edge {
  int u = 0;
  int v = 0;
  int other(int w) const { return w == u ? v : u; }
};

struct Incidence {
  int vertex;
  int edge;
};

/// Inclusive coordinate extent of a full rectangle of Z^2.
struct RectExtent {
  int x0, x1, y0, y1;
  bool contains(int x, int y) const { return x0 <= x && x <= x1 && y0 <= y && y <= y1; }
  bool operator==(const RectExtent&) const = default;
};

class Graph {
 public:
  int add_vertex(Coord c);
  int add_edge(int u, int v);

  int num_vertices() const { return static_cast<int>(coords_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Coord& coord(int v) const { return coords_.at(v); }
  const Edge& edge(int e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Incidence> neighbors(int v) const { return adjacency_.at(v); }

  std::optional<int> find(const Coord& c) const;
  /// Like `find` but throws when the coordinate is not a vertex.
  int vertex_at(const Coord& c) const;
  std::optional<int> edge_between(int u, int v) const;

  void set_boundary(std::vector<int> vertices);
  const std::vector<int>& boundary() const { return boundary_; }
  bool is_boundary(int v) const { return is_boundary_.at(v) != 0; }

  /// Boundary vertices in clockwise order, when the graph has a natural one
  /// (rectangles). Empty otherwise.
  const std::vector<int>& boundary_cycle() const { return boundary_cycle_; }
  void set_boundary_cycle(std::vector<int> cycle);

  const std::optional<RectExtent>& rect() const { return rect_; }
  void set_rect(RectExtent r) { rect_ = r; }

  /// Named vertex subsets (e.g. "left", "right", "bottom_left" for strips).
  void set_label(const std::string& name, std::vector<int> vertices);
  const std::vector<int>& label(const std::string& name) const;
  bool has_label(const std::string& name) const { return labels_.count(name) != 0; }
  const std::map<std::string, std::vector<int>>& labels() const { return labels_; }

  bool planar() const { return planar_; }
  void set_planar(bool planar) { planar_ = planar; }

 private:
  std::vector<Coord> coords_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::map<Coord, int> index_;
  std::map<std::pair<int, int>, int> edge_index_;
  std::vector<int> boundary_;
  std::vector<char> is_boundary_;
  std::vector<int> boundary_cycle_;
  std::optional<RectExtent> rect_;
  std::map<std::string, std::vector<int>> labels_;
  bool planar_ = true;
};

/// Boundary conditions as a partition of boundary vertices into blocks that are
/// contracted before clusters are counted.
class BoundarySpec {
 public:
  enum class Kind { Free, Wired, Dobrushin, Partition };

  static BoundarySpec free() { return BoundarySpec(Kind::Free); }
  static BoundarySpec wired() { return BoundarySpec(Kind::Wired); }
  /// Wired on the boundary arc from `a` clockwise to `b`, free elsewhere.
  /// `a == b` is the collapsed case (free everywhere, exploration at `a`).
  static BoundarySpec dobrushin(int a, int b);
  static BoundarySpec partition(std::vector<std::vector<int>> blocks);

  Kind kind() const { return kind_; }
  int a() const { return a_; }
  int b() const { return b_; }
  const std::vector<std::vector<int>>& raw_blocks() const { return blocks_; }

  /// Throws `Error` when the condition does not fit `g`.
  void validate(const Graph& g) const;
  /// Blocks with at least two vertices, resolved against `g`.
  std::vector<std::vector<int>> blocks(const Graph& g) const;
  /// Vertices of the wired arc for a Dobrushin condition, in clockwise order.
  std::vector<int> wired_arc(const Graph& g) const;

  bool operator==(const BoundarySpec&) const = default;

 private:
  explicit BoundarySpec(Kind k) : kind_(k) {}
  Kind kind_;
  int a_ = -1;
  int b_ = -1;
  std::vector<std::vector<int>> blocks_;
};

std::string to_string(const BoundarySpec& bc, const Graph& g);

/// True when every block of `finer` lies inside one block of `coarser`.
bool coarsens(const Graph& g, const BoundarySpec& coarser, const BoundarySpec& finer);

struct Domain {
  Graph graph;
  BoundarySpec bc = BoundarySpec::free();

  Domain() = default;
  Domain(Graph g, BoundarySpec b) : graph(std::move(g)), bc(std::move(b)) { bc.validate(graph); }
};

enum class BoxKind { Plane, HalfPlane };

/// Full rectangle [x0,x1] x [y0,y1] with nearest-neighbour edges; the boundary
/// is the rectangle's outer cycle.
Graph build_rectangle(int x0, int x1, int y0, int y1);
/// Λ_n = {max(|x|,|y|) <= n}, or its intersection with y >= 0.
Graph build_box(int n, BoxKind kind = BoxKind::Plane);
/// Strip S_n truncated to x in [-m, m]. Labels: "plus" (∂+S), "minus" (∂-S),
/// "bottom_minus" (∂_b^-S), and the strict arcs "left_arc"/"right_arc".
Graph build_strip_rect(int n, int m);
/// Λ_{n,k} inside the truncated universal cover U_k.
Graph build_universal_cover_box(int n, int k);

/// Number of edges of Λ_{n,k} that cross the cut between sheets.
int universal_cover_cut_edges(int n, int k);

/// Graph on `subset` keeping the edges with both ends inside. The boundary of
/// the result is the set of subset vertices that were boundary vertices of `g`
/// or have a neighbour outside the subset.
struct InducedSubgraph {
  Graph graph;
  std::vector<int> to_parent_vertex;
  std::vector<int> to_parent_edge;
  std::vector<int> from_parent_vertex;  // -1 when not kept
};
InducedSubgraph induced_subdomain(const Graph& g, std::span<const int> subset);

struct BoundaryEdge {
  int edge;
  int inside;
  int outside;
};
/// ΔS = {(x,y) ∈ E(g) : x ∈ S, y ∉ S}.
std::vector<BoundaryEdge> edge_boundary(const Graph& g, std::span<const int> subset);

/// Planar dual of a domain. Inner faces become dual vertices; the outer face
/// is split into one vertex per outer-facing edge side ("slots"), which form
/// the dual boundary. Dual vertex coordinates are in quarter-lattice units.
struct DualGraph {
  Graph graph;
  BoundarySpec bc = BoundarySpec::free();
  std::vector<int> to_dual;    // primal edge -> dual edge
  std::vector<int> to_primal;  // dual edge -> primal edge
  std::vector<char> is_slot;   // per dual vertex
  Domain primal;

  Domain domain() const { return Domain(graph, bc); }
  /// Dualizing again: the roles of primal and dual swap back.
  DualGraph inverse() const;
};

DualGraph dual_graph(const Domain& d);

/// JSON form: vertices as [x, y, z], edges as [u, v], boundary, cycle, rect
/// and labels. Round-trips exactly.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
BoundarySpec dual_boundary(const Domain& d, const DualGraph& dual);

}  // namespace rcm
