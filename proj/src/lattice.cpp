#include "klab/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace klab::lattice {

namespace {

constexpr std::size_t kMaxVertices = std::size_t{1} << 30;

std::size_t checked_volume(std::span<const int> extents) {
  std::size_t n = 1;
  for (int e : extents) {
    if (e <= 0) throw std::invalid_argument("box extents must be positive");
    if (n > kMaxVertices / static_cast<std::size_t>(e))
      throw std::overflow_error("box too large for 32-bit vertex indices");
    n *= static_cast<std::size_t>(e);
  }
  if (n >= kMaxVertices) throw std::overflow_error("box too large for 32-bit vertex indices");
  return n;
}

}  // namespace

BoxGraph BoxGraph::rect(std::vector<int> extents) {
  if (extents.empty()) throw std::invalid_argument("dimension must be at least 1");
  BoxGraph g;
  g.sites_ = checked_volume(extents);
  const int d = static_cast<int>(extents.size());
  if (g.sites_ > kMaxVertices / static_cast<std::size_t>(d + 1))
    throw std::overflow_error("box too large for 32-bit edge indices");
  g.extents_ = std::move(extents);
  g.origin_.assign(d, 0);

  std::vector<std::size_t> stride(d);
  stride[d - 1] = 1;
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * g.extents_[i + 1];

  // For each site in index order, forward neighbours in ascending index order:
  // the last axis has the smallest stride.
  std::vector<int> x(d, 0);
  for (std::size_t u = 0; u < g.sites_; ++u) {
    for (int i = d - 1; i >= 0; --i) {
      if (x[i] + 1 < g.extents_[i])
        g.edges_.push_back({static_cast<Vertex>(u), static_cast<Vertex>(u + stride[i])});
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] < g.extents_[i]) break;
      x[i] = 0;
    }
  }
  g.inner_count_ = g.edges_.size();

  g.on_boundary_.assign(g.sites_ + 1, 0);
  std::fill(x.begin(), x.end(), 0);
  for (std::size_t u = 0; u < g.sites_; ++u) {
    bool face = false;
    for (int i = 0; i < d; ++i) face = face || x[i] == 0 || x[i] == g.extents_[i] - 1;
    if (face) {
      g.boundary_.push_back(static_cast<Vertex>(u));
      g.on_boundary_[u] = 1;
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] < g.extents_[i]) break;
      x[i] = 0;
    }
  }
  g.finish();
  return g;
}

BoxGraph BoxGraph::box(int d, int k) {
  if (d < 1) throw std::invalid_argument("dimension must be at least 1");
  if (k < 0) throw std::invalid_argument("radius must be nonnegative");
  if (k > (std::numeric_limits<int>::max() - 1) / 2) throw std::overflow_error("radius too large");
  BoxGraph g = rect(std::vector<int>(d, 2 * k + 1));
  g.origin_.assign(d, -k);
  g.radius_ = k;
  return g;
}

BoxGraph BoxGraph::custom(std::size_t sites, std::vector<Edge> inner, std::vector<Vertex> boundary) {
  if (sites == 0) throw std::invalid_argument("graph needs at least one site");
  if (sites >= kMaxVertices) throw std::overflow_error("graph too large");
  BoxGraph g;
  g.sites_ = sites;
  for (Edge& e : inner) {
    if (e.u >= sites || e.v >= sites || e.u == e.v)
      throw std::invalid_argument("inner edge endpoints must be distinct sites");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(inner.begin(), inner.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t i = 1; i < inner.size(); ++i)
    if (inner[i].u == inner[i - 1].u && inner[i].v == inner[i - 1].v)
      throw std::invalid_argument("duplicate inner edge");
  g.edges_ = std::move(inner);
  g.inner_count_ = g.edges_.size();

  g.on_boundary_.assign(sites + 1, 0);
  for (Vertex b : boundary) {
    if (b > sites) throw std::invalid_argument("boundary vertex out of range");
    if (g.on_boundary_[b]) throw std::invalid_argument("duplicate boundary vertex");
    g.on_boundary_[b] = 1;
  }
  std::sort(boundary.begin(), boundary.end());
  g.boundary_ = std::move(boundary);
  g.finish();
  return g;
}

void BoxGraph::finish() {
  for (std::size_t v = 0; v < sites_; ++v) edges_.push_back({static_cast<Vertex>(v), ghost()});

  offsets_.assign(sites_ + 1, 0);
  for (std::size_t e = 0; e < inner_count_; ++e) {
    ++offsets_[edges_[e].u + 1];
    ++offsets_[edges_[e].v + 1];
  }
  for (std::size_t v = 0; v < sites_; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(offsets_[sites_]);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < inner_count_; ++e) {
    const Edge& ed = edges_[e];
    adjacency_[fill[ed.u]++] = {ed.v, static_cast<EdgeId>(e)};
    adjacency_[fill[ed.v]++] = {ed.u, static_cast<EdgeId>(e)};
  }
}

std::vector<int> BoxGraph::coords(Vertex site) const {
  std::vector<int> x(extents_.size());
  std::size_t rest = site;
  for (int i = dim() - 1; i >= 0; --i) {
    x[i] = static_cast<int>(rest % extents_[i]) + origin_[i];
    rest /= extents_[i];
  }
  return x;
}

Vertex BoxGraph::site_at(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("coordinate dimension mismatch");
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    const int local = x[i] - origin_[i];
    if (local < 0 || local >= extents_[i]) throw std::out_of_range("coordinates outside the box");
    idx = idx * extents_[i] + local;
  }
  return static_cast<Vertex>(idx);
}

int BoxGraph::sup_norm(Vertex site) const {
  int m = 0;
  for (int c : coords(site)) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Vertex>> BoundaryCondition::resolve(const BoxGraph& g) const {
  std::vector<std::vector<Vertex>> out;
  switch (kind_) {
    case Kind::free:
      break;
    case Kind::wired:
      if (g.boundary().size() > 1) out.emplace_back(g.boundary().begin(), g.boundary().end());
      break;
    case Kind::partition:
      for (const auto& b : blocks_)
        if (b.size() > 1) out.push_back(b);
      break;
  }
  return out;
}

void BoundaryCondition::validate(const BoxGraph& g) const {
  if (kind_ != Kind::partition) return;
  std::vector<std::uint8_t> hit(g.vertex_count(), 0);
  std::size_t covered = 0;
  for (const auto& block : blocks_) {
    if (block.empty()) throw std::invalid_argument("empty boundary block");
    for (Vertex v : block) {
      if (v >= g.vertex_count() || !g.is_boundary(v))
        throw std::invalid_argument("partition block contains a non-boundary vertex");
      if (hit[v]) throw std::invalid_argument("partition blocks overlap");
      hit[v] = 1;
      ++covered;
    }
  }
  if (covered != g.boundary().size())
    throw std::invalid_argument("partition does not cover the boundary");
}

std::string BoundaryCondition::name() const {
  switch (kind_) {
    case Kind::free:
      return "free";
    case Kind::wired:
      return "wired";
    case Kind::partition:
      return "partition";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

BondConfig BondConfig::from_mask(std::uint64_t mask, std::size_t edges) {
  if (edges > 64) throw std::invalid_argument("mask holds at most 64 edges");
  BondConfig w(edges);
  for (std::size_t e = 0; e < edges; ++e) w.bits_[e] = (mask >> e) & 1u;
  return w;
}

std::size_t BondConfig::open_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t BondConfig::mask() const {
  if (bits_.size() > 64) throw std::logic_error("configuration longer than 64 edges");
  std::uint64_t m = 0;
  for (std::size_t e = 0; e < bits_.size(); ++e) m |= std::uint64_t{bits_[e]} << e;
  return m;
}

bool BondConfig::precedes(const BondConfig& other) const {
  if (other.size() != size()) throw std::invalid_argument("configurations of different length");
  for (std::size_t e = 0; e < bits_.size(); ++e)
    if (bits_[e] > other.bits_[e]) return false;
  return true;
}

std::string BondConfig::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::vector<unsigned> nibbles((bits_.size() + 3) / 4, 0);
  for (std::size_t e = 0; e < bits_.size(); ++e)
    if (bits_[e]) nibbles[e / 4] |= 1u << (e % 4);
  std::string out;
  out.reserve(nibbles.size());
  for (unsigned n : nibbles) out.push_back(digits[n]);
  return out;
}

BondConfig BondConfig::from_hex(std::string_view hex, std::size_t edges) {
  if (hex.size() != (edges + 3) / 4) throw std::invalid_argument("hex length does not match edge count");
  BondConfig w(edges);
  for (std::size_t j = 0; j < hex.size(); ++j) {
    const char c = hex[j];
    unsigned nib;
    if (c >= '0' && c <= '9')
      nib = c - '0';
    else if (c >= 'a' && c <= 'f')
      nib = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      nib = c - 'A' + 10;
    else
      throw std::invalid_argument("invalid hex digit");
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t e = 4 * j + b;
      const bool bit = (nib >> b) & 1u;
      if (e >= edges) {
        if (bit) throw std::invalid_argument("nonzero padding bits in hex string");
        continue;
      }
      w.bits_[e] = bit;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------

namespace {

void check_sized(const BoxGraph& g, const BondConfig& w) {
  if (w.size() != g.edge_count()) throw std::invalid_argument("configuration not sized for graph");
}

void join_all(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc, UnionFind& uf,
              std::size_t skip) {
  uf.reset(g.vertex_count());
  for (const auto& block : bc.resolve(g))
    for (std::size_t i = 1; i < block.size(); ++i) uf.unite(block[0], block[i]);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (w[e] && e != skip) uf.unite(edges[e].u, edges[e].v);
}

}  // namespace

ClusterLabels components(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc) {
  check_sized(g, w);
  bc.validate(g);
  UnionFind uf;
  join_all(g, w, bc, uf, static_cast<std::size_t>(-1));

  ClusterLabels out;
  const std::size_t n = g.vertex_count();
  out.label.assign(n, 0);
  std::vector<std::uint32_t> root_label(n, static_cast<std::uint32_t>(-1));
  for (std::size_t v = 0; v < n; ++v) {
    const auto r = uf.find(static_cast<Vertex>(v));
    if (root_label[r] == static_cast<std::uint32_t>(-1)) {
      root_label[r] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(0);
      out.ghost_flag.push_back(0);
    }
    const auto l = root_label[r];
    out.label[v] = l;
    if (v == g.ghost())
      out.ghost_flag[l] = 1;
    else
      ++out.sizes[l];
  }
  out.kappa = out.sizes.size();
  return out;
}

std::size_t count_components(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc,
                             UnionFind& scratch) {
  join_all(g, w, bc, scratch, static_cast<std::size_t>(-1));
  return scratch.set_count();
}

bool connected_off_edge(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc, EdgeId e) {
  check_sized(g, w);
  if (e >= g.edge_count()) throw std::out_of_range("edge index out of range");
  UnionFind uf;
  join_all(g, w, bc, uf, e);
  return uf.same(g.edge(e).u, g.edge(e).v);
}

// ---------------------------------------------------------------------------

ConnectivityProbe::ConnectivityProbe(const BoxGraph& g, const BoundaryCondition& bc)
    : g_(&g), block_of_(g.vertex_count(), -1) {
  bc.validate(g);
  blocks_ = bc.resolve(g);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (Vertex v : blocks_[b]) block_of_[v] = static_cast<std::int32_t>(b);
  for (int s = 0; s < 2; ++s) {
    seen_[s].assign(g.vertex_count(), 0);
    block_seen_[s].assign(blocks_.size(), 0);
  }
}

bool ConnectivityProbe::visit(const BondConfig& w, int side, Vertex v) {
  if (v == g_->ghost()) return touch_ghost(w, side);
  if (seen_[side][v] == epoch_) return false;
  if (seen_[1 - side][v] == epoch_) return true;
  seen_[side][v] = epoch_;
  sides_[side].queue.push_back(v);
  if (block_of_[v] >= 0) return touch_block(w, side, static_cast<std::uint32_t>(block_of_[v]));
  return false;
}

bool ConnectivityProbe::touch_ghost(const BondConfig& w, int side) {
  if (sides_[side].ghost) return false;
  if (sides_[1 - side].ghost) return true;
  sides_[side].ghost = true;
  const auto gb = block_of_[g_->ghost()];
  if (gb >= 0) return touch_block(w, side, static_cast<std::uint32_t>(gb));
  return false;
}

bool ConnectivityProbe::touch_block(const BondConfig& w, int side, std::uint32_t block) {
  if (block_seen_[side][block] == epoch_) return false;
  if (block_seen_[1 - side][block] == epoch_) return true;
  block_seen_[side][block] = epoch_;
  for (Vertex m : blocks_[block])
    if (visit(w, side, m)) return true;
  return false;
}

bool ConnectivityProbe::expand(const BondConfig& w, int side, EdgeId skip) {
  Side& s = sides_[side];
  const Vertex v = s.queue[s.head++];
  for (const Incidence& inc : g_->neighbours(v))
    if (inc.edge != skip && w[inc.edge] && visit(w, side, inc.neighbour)) return true;
  const EdgeId ge = g_->ghost_edge(v);
  if (ge != skip && w[ge] && touch_ghost(w, side)) return true;
  return false;
}

bool ConnectivityProbe::connected_off_edge(const BondConfig& w, EdgeId e) {
  if (++epoch_ == 0) {
    for (int s = 0; s < 2; ++s) {
      std::fill(seen_[s].begin(), seen_[s].end(), 0);
      std::fill(block_seen_[s].begin(), block_seen_[s].end(), 0);
    }
    epoch_ = 1;
  }
  for (Side& s : sides_) {
    s.queue.clear();
    s.head = 0;
    s.ghost = false;
  }
  const Edge& ed = g_->edge(e);
  if (visit(w, 0, ed.u)) return true;
  if (visit(w, 1, ed.v)) return true;

  for (;;) {
    const bool a_done = sides_[0].exhausted();
    const bool b_done = sides_[1].exhausted();
    if (a_done && b_done) return false;
    if (a_done && !sides_[0].ghost) return false;
    if (b_done && !sides_[1].ghost) return false;
    if (!a_done && expand(w, 0, e)) return true;
    if (!b_done && expand(w, 1, e)) return true;
  }
}

}  // namespace klab::lattice
