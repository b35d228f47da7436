#pragma once

// Finite boxes of Z^d augmented with a ghost vertex, bond configurations on
// them, boundary conditions and cluster decomposition.
//
// Indexing conventions (stable, used by the hex serialization):
//   * lattice sites are numbered lexicographically by coordinates, the first
//     coordinate being the most significant;
//   * the ghost vertex is always the last vertex, index site_count();
//   * inner edges come first, sorted lexicographically by (lower endpoint,
//     upper endpoint); ghost edge of site v has index inner_edge_count() + v.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "klab/union_find.hpp"

namespace klab::lattice {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

enum class Sector { inner, ghost };

struct Edge {
  Vertex u;
  Vertex v;
};

struct Incidence {
  Vertex neighbour;
  EdgeId edge;
};

class BoxGraph {
 public:
  // Lambda_k: all x in Z^d with |x|_inf <= k, plus the ghost.
  static BoxGraph box(int d, int k);
  // Rectangular block with extents[i] sites along axis i (coordinates start
  // at 0). Boundary = sites on a face of the block.
  static BoxGraph rect(std::vector<int> extents);
  // Arbitrary finite graph on `sites` lattice vertices plus the ghost, with
  // one ghost edge per site. `boundary` may contain the ghost index.
  static BoxGraph custom(std::size_t sites, std::vector<Edge> inner,
                         std::vector<Vertex> boundary = {});

  std::size_t site_count() const { return sites_; }
  std::size_t vertex_count() const { return sites_ + 1; }
  Vertex ghost() const { return static_cast<Vertex>(sites_); }

  std::size_t inner_edge_count() const { return inner_count_; }
  std::size_t ghost_edge_count() const { return sites_; }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  Sector sector(EdgeId e) const { return e < inner_count_ ? Sector::inner : Sector::ghost; }
  EdgeId ghost_edge(Vertex site) const { return static_cast<EdgeId>(inner_count_ + site); }

  // Inner-edge incidences of a lattice site.
  std::span<const Incidence> neighbours(Vertex site) const {
    return {adjacency_.data() + offsets_[site], adjacency_.data() + offsets_[site + 1]};
  }

  std::span<const Vertex> boundary() const { return boundary_; }
  bool is_boundary(Vertex v) const { return on_boundary_[v] != 0; }

  // Geometry; dim() == 0 for custom graphs.
  int dim() const { return static_cast<int>(extents_.size()); }
  std::span<const int> extents() const { return extents_; }
  // Radius k for graphs built by box(), -1 otherwise.
  int radius() const { return radius_; }
  std::vector<int> coords(Vertex site) const;
  Vertex site_at(std::span<const int> coords) const;
  // Sup-norm of the site's coordinates relative to the box centre (box() only).
  int sup_norm(Vertex site) const;

 private:
  BoxGraph() = default;
  void finish();

  std::size_t sites_ = 0;
  std::size_t inner_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Incidence> adjacency_;
  std::vector<Vertex> boundary_;
  std::vector<std::uint8_t> on_boundary_;
  std::vector<int> extents_;
  std::vector<int> origin_;
  int radius_ = -1;
};

inline BoxGraph build_box(int d, int k) { return BoxGraph::box(d, k); }

class BoundaryCondition {
 public:
  enum class Kind { free, wired, partition };

  static BoundaryCondition free() { return BoundaryCondition(Kind::free, {}); }
  static BoundaryCondition wired() { return BoundaryCondition(Kind::wired, {}); }
  static BoundaryCondition partition(std::vector<std::vector<Vertex>> blocks) {
    return BoundaryCondition(Kind::partition, std::move(blocks));
  }

  Kind kind() const { return kind_; }
  const std::vector<std::vector<Vertex>>& blocks() const { return blocks_; }

  // Blocks of identified vertices for this graph (singletons omitted).
  std::vector<std::vector<Vertex>> resolve(const BoxGraph& g) const;

  // Throws std::invalid_argument unless an explicit partition covers exactly
  // the boundary set of g with disjoint blocks.
  void validate(const BoxGraph& g) const;

  std::string name() const;

 private:
  BoundaryCondition(Kind kind, std::vector<std::vector<Vertex>> blocks)
      : kind_(kind), blocks_(std::move(blocks)) {}

  Kind kind_ = Kind::free;
  std::vector<std::vector<Vertex>> blocks_;
};

class BondConfig {
 public:
  BondConfig() = default;
  explicit BondConfig(std::size_t edges, bool open = false) : bits_(edges, open ? 1 : 0) {}

  static BondConfig all_open(const BoxGraph& g) { return BondConfig(g.edge_count(), true); }
  static BondConfig all_closed(const BoxGraph& g) { return BondConfig(g.edge_count(), false); }
  // Bit i of mask is edge i; requires edges <= 64.
  static BondConfig from_mask(std::uint64_t mask, std::size_t edges);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t e) const { return bits_[e] != 0; }
  void set(std::size_t e, bool open) { bits_[e] = open ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t open_count() const;
  std::uint64_t mask() const;

  // Coordinatewise order: every edge open here is open in `other`.
  bool precedes(const BondConfig& other) const;

  // Hex string: character j holds edges 4j..4j+3, edge 4j+b in bit b of the
  // nibble; lowercase; ceil(size/4) characters.
  std::string to_hex() const;
  static BondConfig from_hex(std::string_view hex, std::size_t edges);

  friend bool operator==(const BondConfig&, const BondConfig&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct ClusterLabels {
  std::vector<std::uint32_t> label;   // per vertex (ghost included), 0..kappa-1
  std::vector<std::uint32_t> sizes;   // lattice sites per component
  std::vector<std::uint8_t> ghost_flag;
  std::size_t kappa = 0;

  std::uint32_t ghost_label(const BoxGraph& g) const { return label[g.ghost()]; }
};

// Components of the open subgraph after boundary identification.
ClusterLabels components(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc);

// Number of components only; cheaper than components().
std::size_t count_components(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc,
                             UnionFind& scratch);

// Whether the endpoints of e are joined in w with e forced closed.
bool connected_off_edge(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc,
                        EdgeId e);

// Reusable workspace answering connected_off_edge by a two-sided search that
// stops as soon as the answer is known. Boundary blocks and the ghost are
// treated as hubs: the ghost is never expanded, a side that reaches it just
// records the fact, and two sides that both reach it are connected.
class ConnectivityProbe {
 public:
  ConnectivityProbe(const BoxGraph& g, const BoundaryCondition& bc);

  bool connected_off_edge(const BondConfig& w, EdgeId e);

 private:
  struct Side {
    std::vector<Vertex> queue;
    std::size_t head = 0;
    bool ghost = false;
    bool exhausted() const { return head == queue.size(); }
  };

  bool visit(const BondConfig& w, int side, Vertex v);
  bool touch_ghost(const BondConfig& w, int side);
  bool touch_block(const BondConfig& w, int side, std::uint32_t block);
  bool expand(const BondConfig& w, int side, EdgeId skip);

  const BoxGraph* g_;
  std::vector<std::int32_t> block_of_;  // per vertex, -1 when unidentified
  std::vector<std::vector<Vertex>> blocks_;
  std::vector<std::uint32_t> seen_[2];
  std::vector<std::uint32_t> block_seen_[2];
  std::uint32_t epoch_ = 0;
  Side sides_[2];
};

}  // namespace klab::lattice
