#include "klab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "klab/bounds.hpp"
#include "klab/upsets.hpp"

namespace klab::exact {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// count * log(v) with 0 * log 0 = 0.
double xlog(std::size_t count, double log_v) { return count == 0 ? 0.0 : static_cast<double>(count) * log_v; }

// Shared state for sums over {0,1}^E.
class Enumerator {
 public:
  Enumerator(const BoxGraph& g, const ModelParams& params, std::size_t budget = kEdgeBudget)
      : g_(g), params_(params), w_(g.edge_count()) {
    if (g.edge_count() > budget)
      throw BudgetExceeded("enumeration over " + std::to_string(g.edge_count()) +
                           " edges exceeds the budget of " + std::to_string(budget));
    params.bc.validate(g);
    blocks_ = params.bc.resolve(g);
    lp_ = std::log(params.p);
    lq_ = std::log1p(-params.p);
    lph_ = std::log(params.p_h);
    lqh_ = std::log1p(-params.p_h);
    lcw_ = std::log(params.q);
    inner_mask_ = g.inner_edge_count() == 64 ? ~0ull : ((1ull << g.inner_edge_count()) - 1);
    shift_ = static_cast<double>(g.inner_edge_count()) * std::max(lp_, lq_) +
             static_cast<double>(g.ghost_edge_count()) * std::max(lph_, lqh_) +
             static_cast<double>(g.vertex_count()) * lcw_;
  }

  std::size_t kappa(std::uint64_t mask) {
    uf_.reset(g_.vertex_count());
    for (const auto& b : blocks_)
      for (std::size_t i = 1; i < b.size(); ++i) uf_.unite(b[0], b[i]);
    const auto edges = g_.edges();
    for (std::uint64_t m = mask; m; m &= m - 1) {
      const auto e = std::countr_zero(m);
      uf_.unite(edges[e].u, edges[e].v);
    }
    return uf_.set_count();
  }

  double log_weight(std::uint64_t mask, std::size_t kappa) const {
    const std::size_t o_in = std::popcount(mask & inner_mask_);
    const std::size_t o_g = std::popcount(mask & ~inner_mask_);
    const std::size_t c_in = g_.inner_edge_count() - o_in;
    const std::size_t c_g = g_.ghost_edge_count() - o_g;
    return xlog(o_in, lp_) + xlog(c_in, lq_) + xlog(o_g, lph_) + xlog(c_g, lqh_) +
           static_cast<double>(kappa) * lcw_;
  }

  // visit(mask, w, weight, kappa); weights are scaled by exp(-shift()).
  template <class F>
  void run(F&& visit) {
    const std::uint64_t n = std::uint64_t{1} << g_.edge_count();
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      const std::uint64_t changed = mask ^ (mask == 0 ? 0 : mask - 1);
      for (std::uint64_t c = changed; c; c &= c - 1) {
        const auto e = std::countr_zero(c);
        w_.set(e, (mask >> e) & 1u);
      }
      const std::size_t k = kappa(mask);
      const double lw = log_weight(mask, k);
      visit(mask, static_cast<const BondConfig&>(w_), std::exp(lw - shift_), k);
    }
  }

  double shift() const { return shift_; }
  std::uint64_t inner_mask() const { return inner_mask_; }

 private:
  const BoxGraph& g_;
  ModelParams params_;
  BondConfig w_;
  std::vector<std::vector<Vertex>> blocks_;
  UnionFind uf_;
  double lp_, lq_, lph_, lqh_, lcw_, shift_;
  std::uint64_t inner_mask_;
};

// Flags a declared-monotone predicate that is not increasing on {0,1}^E.
void check_monotone(const EventPredicate& a, const std::vector<std::uint8_t>& hits, std::size_t edges) {
  const std::uint64_t n = std::uint64_t{1} << edges;
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    if (!hits[mask]) continue;
    for (std::size_t e = 0; e < edges; ++e)
      if (!hits[mask | (std::uint64_t{1} << e)])
        throw std::logic_error("event '" + a.name + "' is flagged monotone but is not increasing");
  }
}

// Classes of the inner part of w after boundary identification, ghost edges
// ignored. Returns per-vertex class id; classes numbered by first vertex.
std::vector<std::uint32_t> inner_classes(const BoxGraph& g, const BondConfig& w,
                                         const std::vector<std::vector<Vertex>>& blocks,
                                         std::size_t& count) {
  UnionFind uf(g.vertex_count());
  for (const auto& b : blocks)
    for (std::size_t i = 1; i < b.size(); ++i) uf.unite(b[0], b[i]);
  for (std::size_t e = 0; e < g.inner_edge_count(); ++e)
    if (w[e]) uf.unite(g.edge(static_cast<EdgeId>(e)).u, g.edge(static_cast<EdgeId>(e)).v);
  std::vector<std::uint32_t> root_id(g.vertex_count(), UINT32_MAX), cls(g.vertex_count());
  count = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const auto r = uf.find(v);
    if (root_id[r] == UINT32_MAX) root_id[r] = static_cast<std::uint32_t>(count++);
    cls[v] = root_id[r];
  }
  return cls;
}

// Sum over ghost configurations with the inner part of w fixed. visit receives
// (touched: per-class flags of classes joined to the ghost, weight).
template <class F>
void sum_ghost(const BoxGraph& g, const ModelParams& params, const BondConfig& w, F&& visit) {
  if (g.ghost_edge_count() > kGhostBudget)
    throw BudgetExceeded("ghost-sector enumeration over " + std::to_string(g.ghost_edge_count()) +
                         " edges exceeds the budget of " + std::to_string(kGhostBudget));
  if (w.size() != g.edge_count()) throw std::invalid_argument("configuration not sized for graph");
  params.bc.validate(g);
  const auto blocks = params.bc.resolve(g);
  std::size_t classes = 0;
  const auto cls = inner_classes(g, w, blocks, classes);
  const std::uint32_t ghost_cls = cls[g.ghost()];
  const std::size_t n = g.site_count();
  const double lph = std::log(params.p_h), lqh = std::log1p(-params.p_h), lcw = std::log(params.q);
  std::vector<std::uint8_t> touched(classes);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::fill(touched.begin(), touched.end(), 0);
    touched[ghost_cls] = 1;
    for (std::uint64_t m = mask; m; m &= m - 1) touched[cls[std::countr_zero(m)]] = 1;
    std::size_t joined = 0;
    for (auto t : touched) joined += t;
    const std::size_t kappa = classes - joined + 1;
    const std::size_t o = std::popcount(mask);
    const double lw = xlog(o, lph) + xlog(n - o, lqh) + static_cast<double>(kappa) * lcw;
    visit(touched, cls, lw);
  }
}

// Normalized accumulation of exp(lw) with a running maximum.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, bool>> terms;
  void add(double lw, bool hit) {
    terms.emplace_back(lw, hit);
    max = std::max(max, lw);
  }
  double ratio() const {
    double num = 0, den = 0;
    for (auto [lw, hit] : terms) {
      const double x = std::exp(lw - max);
      den += x;
      if (hit) num += x;
    }
    return num / den;
  }
};

}  // namespace

// ---------------------------------------------------------------------------

ModelParams::ModelParams(double p_, double q_, double p_h_, BoundaryCondition bc_)
    : p(p_), q(q_), p_h(p_h_), bc(std::move(bc_)) {
  require(in_unit(p), "p must lie in [0,1]");
  require(in_unit(p_h), "p_h must lie in [0,1]");
  require(q >= 1.0 && std::isfinite(q), "q must be finite and at least 1");
}

ModelParams ModelParams::from_field(double p, double q, double h, BoundaryCondition bc) {
  return ModelParams(p, q, bounds::ph_of_h(h, q), std::move(bc));
}

EventPredicate EventPredicate::full_space() {
  return {"full_space", [](const BondConfig&) { return true; }, true};
}

EventPredicate EventPredicate::edge_open(EdgeId e) {
  return {"edge_open(" + std::to_string(e) + ")", [e](const BondConfig& w) { return w[e]; }, true};
}

EventPredicate EventPredicate::connected(const BoxGraph& g, Vertex x, Vertex y, BoundaryCondition bc) {
  require(x < g.vertex_count() && y < g.vertex_count(), "vertex out of range");
  bc.validate(g);
  auto blocks = bc.resolve(g);
  const BoxGraph* gp = &g;
  return {"connected(" + std::to_string(x) + "," + std::to_string(y) + ")",
          [gp, x, y, blocks](const BondConfig& w) {
            UnionFind uf(gp->vertex_count());
            for (const auto& b : blocks)
              for (std::size_t i = 1; i < b.size(); ++i) uf.unite(b[0], b[i]);
            const auto edges = gp->edges();
            for (std::size_t e = 0; e < edges.size(); ++e)
              if (w[e]) uf.unite(edges[e].u, edges[e].v);
            return uf.same(x, y);
          },
          true};
}

EventPredicate EventPredicate::inner_connected(const BoxGraph& g, Vertex x, Vertex y) {
  require(x < g.site_count() && y < g.site_count(), "site out of range");
  const BoxGraph* gp = &g;
  return {"inner_connected(" + std::to_string(x) + "," + std::to_string(y) + ")",
          [gp, x, y](const BondConfig& w) {
            UnionFind uf(gp->site_count());
            for (std::size_t e = 0; e < gp->inner_edge_count(); ++e)
              if (w[e]) uf.unite(gp->edge(static_cast<EdgeId>(e)).u, gp->edge(static_cast<EdgeId>(e)).v);
            return uf.same(x, y);
          },
          true};
}

EventPredicate EventPredicate::inner_reaches_boundary(const BoxGraph& g, Vertex x) {
  require(x < g.site_count(), "site out of range");
  const BoxGraph* gp = &g;
  return {"inner_reaches_boundary(" + std::to_string(x) + ")",
          [gp, x](const BondConfig& w) {
            UnionFind uf(gp->site_count());
            for (std::size_t e = 0; e < gp->inner_edge_count(); ++e)
              if (w[e]) uf.unite(gp->edge(static_cast<EdgeId>(e)).u, gp->edge(static_cast<EdgeId>(e)).v);
            for (Vertex b : gp->boundary())
              if (b < gp->site_count() && uf.same(x, b)) return true;
            return false;
          },
          true};
}

EventPredicate EventPredicate::upset(std::vector<EdgeId> scope, std::uint64_t members) {
  require(scope.size() <= 6, "up-set scope holds at most 6 edges");
  const bool mono = is_upset(members, static_cast<unsigned>(scope.size()));
  return {"upset",
          [scope = std::move(scope), members](const BondConfig& w) {
            unsigned local = 0;
            for (std::size_t i = 0; i < scope.size(); ++i)
              if (w[scope[i]]) local |= 1u << i;
            return ((members >> local) & 1u) != 0;
          },
          mono};
}

// ---------------------------------------------------------------------------

PartitionFunction partition_function(const BoxGraph& g, const ModelParams& params) {
  Enumerator en(g, params);
  double sum = 0.0;
  en.run([&](std::uint64_t, const BondConfig&, double w, std::size_t) { sum += w; });
  const double log_z = std::log(sum) + en.shift();
  return {std::exp(log_z), log_z};
}

double event_probability(const BoxGraph& g, const ModelParams& params, const EventPredicate& a) {
  Enumerator en(g, params);
  double num = 0.0, den = 0.0;
  std::vector<std::uint8_t> hits;
  if (a.monotone) hits.assign(std::size_t{1} << g.edge_count(), 0);
  en.run([&](std::uint64_t mask, const BondConfig& w, double wt, std::size_t) {
    den += wt;
    if (a(w)) {
      num += wt;
      if (a.monotone) hits[mask] = 1;
    }
  });
  if (a.monotone) check_monotone(a, hits, g.edge_count());
  return num / den;
}

double ghost_formula(std::size_t n, double q, double p_h) {
  require(n >= 1, "cluster size must be at least 1");
  require(q >= 1.0, "q must be at least 1");
  require(in_unit(p_h), "p_h must lie in [0,1]");
  const double closed = std::pow(1.0 - p_h, static_cast<double>(n));
  return (1.0 - closed) / ((q - 1.0) * closed + 1.0);
}

std::vector<std::vector<Vertex>> inner_clusters(const BoxGraph& g, const BondConfig& w,
                                                const BoundaryCondition& bc) {
  if (w.size() != g.edge_count()) throw std::invalid_argument("configuration not sized for graph");
  bc.validate(g);
  std::size_t classes = 0;
  const auto cls = inner_classes(g, w, bc.resolve(g), classes);
  std::vector<std::vector<Vertex>> by_class(classes);
  for (Vertex v = 0; v < g.site_count(); ++v) by_class[cls[v]].push_back(v);
  std::vector<std::vector<Vertex>> out;
  for (std::uint32_t c = 0; c < classes; ++c)
    if (c != cls[g.ghost()] && !by_class[c].empty()) out.push_back(std::move(by_class[c]));
  return out;
}

double ghost_joint_oracle(const BoxGraph& g, const ModelParams& params, const BondConfig& w,
                          std::span<const std::size_t> clusters) {
  const auto list = inner_clusters(g, w, params.bc);
  std::vector<std::uint32_t> wanted;
  std::size_t classes = 0;
  const auto cls = inner_classes(g, w, params.bc.resolve(g), classes);
  for (std::size_t c : clusters) {
    if (c >= list.size()) throw std::out_of_range("cluster index out of range");
    wanted.push_back(cls[list[c].front()]);
  }
  LogSum acc;
  sum_ghost(g, params, w, [&](const std::vector<std::uint8_t>& touched, const auto&, double lw) {
    bool all = true;
    for (auto c : wanted) all = all && touched[c];
    acc.add(lw, all);
  });
  return acc.ratio();
}

double ghost_conditional_oracle(const BoxGraph& g, const ModelParams& params, const BondConfig& w,
                                std::size_t cluster) {
  const std::size_t one[] = {cluster};
  return ghost_joint_oracle(g, params, w, one);
}

double conditional_connection(const BoxGraph& g, const ModelParams& params, const BondConfig& w,
                              Vertex x, Vertex y) {
  require(x < g.vertex_count() && y < g.vertex_count(), "vertex out of range");
  LogSum acc;
  sum_ghost(g, params, w, [&](const std::vector<std::uint8_t>& touched, const auto& cls, double lw) {
    const bool hit = cls[x] == cls[y] || (touched[cls[x]] && touched[cls[y]]);
    acc.add(lw, hit);
  });
  return acc.ratio();
}

// ---------------------------------------------------------------------------

double deriv_event(const BoxGraph& g, const ModelParams& params, const EventPredicate& a,
                   Direction which) {
  switch (which) {
    case Direction::p:
      require(params.p > 0.0 && params.p < 1.0, "d/dp needs p in (0,1)");
      break;
    case Direction::p_h:
      require(params.p_h > 0.0 && params.p_h < 1.0, "d/dp_h needs p_h in (0,1)");
      break;
    case Direction::q:
      require(params.q > 1.0, "d/dq needs q > 1");
      break;
  }
  Enumerator en(g, params);
  const std::uint64_t inner = en.inner_mask();
  double z = 0, ea = 0, ex = 0, eax = 0;
  en.run([&](std::uint64_t mask, const BondConfig& w, double wt, std::size_t kappa) {
    double x = 0;
    switch (which) {
      case Direction::p:
        x = std::popcount(mask & inner);
        break;
      case Direction::p_h:
        x = std::popcount(mask & ~inner);
        break;
      case Direction::q:
        x = static_cast<double>(kappa);
        break;
    }
    z += wt;
    ex += wt * x;
    if (a(w)) {
      ea += wt;
      eax += wt * x;
    }
  });
  ea /= z;
  ex /= z;
  eax /= z;
  const double cov = eax - ea * ex;
  switch (which) {
    case Direction::p:
      return cov / (params.p * (1.0 - params.p));
    case Direction::p_h:
      return cov / (params.p_h * (1.0 - params.p_h));
    case Direction::q:
      return cov / params.q;
  }
  return 0.0;
}

Gamma eval_gamma(double p, double q, double p_h, int d) {
  require(p > 0.0 && p < 1.0, "gamma needs p in (0,1)");
  require(p_h > 0.0 && p_h < 1.0, "gamma needs p_h in (0,1)");
  require(q > 1.0, "gamma needs q > 1");
  require(d >= 1, "gamma needs d >= 1");
  const double tilde = p_h / (p_h + q * (1.0 - p_h));
  Gamma out;
  out.gamma_prime = (p_h - tilde) * tilde * std::pow(1.0 - p, 2 * d - 1);
  out.gamma = 2.0 * d * p_h * (1.0 - p_h) / (out.gamma_prime * p * (1.0 - p));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<EdgeId> scope_edges(const BoxGraph& g, Scope scope) {
  const std::size_t n = scope == Scope::all_edges ? g.edge_count() : g.inner_edge_count();
  std::vector<EdgeId> out(n);
  for (std::size_t e = 0; e < n; ++e) out[e] = static_cast<EdgeId>(e);
  return out;
}

std::vector<double> marginal_law(const BoxGraph& g, const ModelParams& params,
                                 std::span<const EdgeId> scope) {
  require(scope.size() <= 20, "marginal scope holds at most 20 edges");
  for (EdgeId e : scope) require(e < g.edge_count(), "scope edge out of range");
  Enumerator en(g, params);
  std::vector<double> law(std::size_t{1} << scope.size(), 0.0);
  double z = 0.0;
  en.run([&](std::uint64_t mask, const BondConfig&, double wt, std::size_t) {
    std::size_t local = 0;
    for (std::size_t i = 0; i < scope.size(); ++i)
      if ((mask >> scope[i]) & 1u) local |= std::size_t{1} << i;
    law[local] += wt;
    z += wt;
  });
  for (double& x : law) x /= z;
  return law;
}

DominationResult dominates(std::span<const double> lower, std::span<const double> upper, unsigned s,
                           double tol) {
  require(lower.size() == (std::size_t{1} << s) && upper.size() == lower.size(),
          "laws must have 2^s entries");
  DominationResult out;
  for_each_upset(s, [&](std::uint64_t family) {
    ++out.events_checked;
    double gap = 0.0;
    for (std::uint64_t f = family; f; f &= f - 1) {
      const auto x = std::countr_zero(f);
      gap += lower[x] - upper[x];
    }
    if (gap > out.worst_gap) out.worst_gap = gap;
    if (gap > tol && out.dominated) {
      out.dominated = false;
      out.counterexample = family;
    }
  });
  return out;
}

DominationResult domination_bruteforce(const BoxGraph& g, const ModelParams& lower,
                                       const ModelParams& upper, Scope scope, bool allow_six_edges) {
  const auto edges = scope_edges(g, scope);
  const std::size_t cap = allow_six_edges ? kUpsetEdgeBudgetExtended : kUpsetEdgeBudget;
  if (edges.size() > cap)
    throw BudgetExceeded("up-set enumeration over " + std::to_string(edges.size()) +
                         " edges exceeds the budget of " + std::to_string(cap));
  const auto a = marginal_law(g, lower, edges);
  const auto b = marginal_law(g, upper, edges);
  return dominates(a, b, static_cast<unsigned>(edges.size()), tolerance(g.edge_count()));
}

// ---------------------------------------------------------------------------

double potts_two_point(const BoxGraph& g, const BoundaryCondition& bc, double beta, double h, int q,
                       Vertex x, Vertex y) {
  require(q >= 2, "Potts model needs integer q >= 2");
  require(beta >= 0.0 && h >= 0.0, "beta and h must be nonnegative");
  require(x < g.vertex_count() && y < g.vertex_count(), "vertex out of range");
  bc.validate(g);

  // Free spin variables: one per boundary block not containing the ghost and
  // one per unidentified site. The ghost's class is pinned to spin 0.
  const auto blocks = bc.resolve(g);
  const Vertex ghost = g.ghost();
  std::vector<std::int32_t> var(g.vertex_count(), -1);
  constexpr std::int32_t kPinned = -2;
  std::size_t nvars = 0;
  for (const auto& b : blocks) {
    const bool pinned = std::find(b.begin(), b.end(), ghost) != b.end();
    const std::int32_t id = pinned ? kPinned : static_cast<std::int32_t>(nvars++);
    for (Vertex v : b) var[v] = id;
  }
  var[ghost] = kPinned;
  for (Vertex v = 0; v < g.site_count(); ++v)
    if (var[v] == -1) var[v] = static_cast<std::int32_t>(nvars++);

  double states = 1.0;
  for (std::size_t i = 0; i < nvars; ++i) states *= q;
  if (states > static_cast<double>(kPottsStateBudget))
    throw BudgetExceeded("Potts enumeration over " + std::to_string(nvars) + " spins exceeds the budget");

  const double unequal = -1.0 / (q - 1.0);
  auto dot = [&](int a, int b) { return a == b ? 1.0 : unequal; };
  std::vector<int> spin(nvars, 0);
  auto spin_of = [&](Vertex v) { return var[v] == kPinned ? 0 : spin[var[v]]; };

  // Energies are bounded by |E| (beta + h), so shift by that before exp.
  const double shift = beta * g.inner_edge_count() + h * g.ghost_edge_count();
  double z = 0.0, corr = 0.0;
  for (;;) {
    double energy = 0.0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(static_cast<EdgeId>(e));
      const double coupling = g.sector(static_cast<EdgeId>(e)) == lattice::Sector::inner ? beta : h;
      energy += coupling * dot(spin_of(ed.u), spin_of(ed.v));
    }
    const double wt = std::exp(energy - shift);
    z += wt;
    corr += wt * dot(spin_of(x), spin_of(y));
    std::size_t i = 0;
    while (i < nvars && ++spin[i] == q) spin[i++] = 0;
    if (i == nvars) break;
  }
  return corr / z;
}

EdwardsSokalCheck edwards_sokal_check(const BoxGraph& g, const BoundaryCondition& bc, double beta,
                                      double h, int q, Vertex x, Vertex y) {
  EdwardsSokalCheck out;
  out.potts = potts_two_point(g, bc, beta, h, q, x, y);
  const double qq = q;
  const double p = -std::expm1(-(qq / (qq - 1.0)) * beta);
  const double p_h = -std::expm1(-(qq / (qq - 1.0)) * h);
  out.random_cluster = event_probability(g, ModelParams(p, qq, p_h, bc), EventPredicate::connected(g, x, y, bc));
  return out;
}

// ---------------------------------------------------------------------------

ExactSampler::ExactSampler(const BoxGraph& g, const ModelParams& params) : edges_(g.edge_count()) {
  if (edges_ > kSamplerEdgeBudget)
    throw BudgetExceeded("exact sampler over " + std::to_string(edges_) +
                         " edges exceeds the budget of " + std::to_string(kSamplerEdgeBudget));
  Enumerator en(g, params, kSamplerEdgeBudget);
  std::vector<double> top(std::size_t{1} << edges_);
  double z = 0.0;
  en.run([&](std::uint64_t mask, const BondConfig&, double wt, std::size_t) {
    top[mask] = wt;
    z += wt;
  });
  for (double& x : top) x /= z;
  levels_.resize(edges_ + 1);
  levels_[edges_] = std::move(top);
  for (std::size_t j = edges_; j-- > 0;) {
    const auto& next = levels_[j + 1];
    auto& cur = levels_[j];
    cur.assign(std::size_t{1} << j, 0.0);
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t prefix = 0; prefix < cur.size(); ++prefix) cur[prefix] = next[prefix] + next[prefix | bit];
  }
}

BondConfig ExactSampler::draw(Rng& rng) const {
  std::uint64_t prefix = 0;
  for (std::size_t j = 0; j < edges_; ++j) {
    const double here = levels_[j][prefix];
    const double open = levels_[j + 1][prefix | (std::uint64_t{1} << j)];
    if (rng.uniform() * here < open) prefix |= std::uint64_t{1} << j;
  }
  return BondConfig::from_mask(prefix, edges_);
}

BondConfig sample_chain(const BoxGraph& g, const ModelParams& params, Rng& rng) {
  return ExactSampler(g, params).draw(rng);
}

// ---------------------------------------------------------------------------

std::optional<CentralViolation> central_inequality(const BoxGraph& g, const ModelParams& params1,
                                                   const ModelParams& params2) {
  const std::size_t m = g.inner_edge_count();
  if (m > kEdgeBudget - std::min(kEdgeBudget, g.ghost_edge_count()))
    throw BudgetExceeded("central inequality check exceeds the enumeration budget");
  // r_i (...) compared after multiplying both sides by (1-p1)(1-p2).
  const double s1 = params1.p * (1.0 - params2.p);
  const double s2 = params2.p * (1.0 - params1.p);
  for (std::uint64_t inner = 0; inner < (std::uint64_t{1} << m); ++inner) {
    BondConfig w = BondConfig::from_mask(inner, g.edge_count());
    for (std::size_t e = 0; e < m; ++e) {
      if (w[e]) continue;
      const auto& ed = g.edge(static_cast<EdgeId>(e));
      const double c1 = conditional_connection(g, params1, w, ed.u, ed.v);
      const double c2 = conditional_connection(g, params2, w, ed.u, ed.v);
      const double lhs = s2 * ((1.0 - 1.0 / params2.q) * c2 + 1.0 / params2.q);
      const double rhs = s1 * ((1.0 - 1.0 / params1.q) * c1 + 1.0 / params1.q);
      if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs)))
        return CentralViolation{inner, static_cast<EdgeId>(e), lhs, rhs};
    }
  }
  return std::nullopt;
}

}  // namespace klab::exact
