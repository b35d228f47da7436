#pragma once

// Brute-force enumeration oracles for the random-cluster measure with a ghost
// vertex on small graphs. Everything here sums over {0,1}^E exactly; nothing
// falls back to sampling. Budgets are hard caps and raise BudgetExceeded.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klab/lattice.hpp"
#include "klab/rng.hpp"

namespace klab::exact {

using lattice::BondConfig;
using lattice::BoundaryCondition;
using lattice::BoxGraph;
using lattice::EdgeId;
using lattice::Vertex;

inline constexpr std::size_t kEdgeBudget = 26;
inline constexpr std::size_t kSamplerEdgeBudget = 20;
inline constexpr std::size_t kGhostBudget = 20;
inline constexpr std::size_t kUpsetEdgeBudget = 5;
inline constexpr std::size_t kUpsetEdgeBudgetExtended = 6;
inline constexpr std::size_t kPottsStateBudget = 1u << 20;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Absolute comparison tolerance for enumerated probabilities.
inline double tolerance(std::size_t edges) { return edges <= 16 ? 1e-12 : 1e-9; }

struct ModelParams {
  double p = 0.5;    // inner edge parameter
  double q = 1.0;    // cluster weight
  double p_h = 0.0;  // ghost edge parameter
  BoundaryCondition bc = BoundaryCondition::free();

  ModelParams() = default;
  ModelParams(double p, double q, double p_h, BoundaryCondition bc = BoundaryCondition::free());

  // p_h = 1 - exp(-(q/(q-1)) h); requires q > 1.
  static ModelParams from_field(double p, double q, double h,
                                BoundaryCondition bc = BoundaryCondition::free());

  double edge_param(lattice::Sector s) const { return s == lattice::Sector::inner ? p : p_h; }
};

struct EventPredicate {
  std::string name;
  std::function<bool(const BondConfig&)> test;
  bool monotone = false;

  bool operator()(const BondConfig& w) const { return test(w); }

  static EventPredicate full_space();
  static EventPredicate edge_open(EdgeId e);
  // x <-> y through open edges, the ghost and boundary identification.
  static EventPredicate connected(const BoxGraph& g, Vertex x, Vertex y, BoundaryCondition bc);
  // x <-> y through open inner edges only.
  static EventPredicate inner_connected(const BoxGraph& g, Vertex x, Vertex y);
  // x reaches a boundary site of g through open inner edges only.
  static EventPredicate inner_reaches_boundary(const BoxGraph& g, Vertex x);
  // Up-set over `scope` given as a bitmask over the 2^|scope| local states.
  static EventPredicate upset(std::vector<EdgeId> scope, std::uint64_t members);
};

struct PartitionFunction {
  double value;
  double log_value;
};

PartitionFunction partition_function(const BoxGraph& g, const ModelParams& params);

double event_probability(const BoxGraph& g, const ModelParams& params, const EventPredicate& a);

// Probability that a cluster of n sites is joined to the ghost given the inner
// configuration: (1 - (1-p_h)^n) / ((q-1)(1-p_h)^n + 1).
double ghost_formula(std::size_t n, double q, double p_h);

// Lattice clusters of the inner part of w (ghost edges ignored) under bc, in
// label order, excluding any class that contains the ghost.
std::vector<std::vector<Vertex>> inner_clusters(const BoxGraph& g, const BondConfig& w,
                                                const BoundaryCondition& bc);

// Exact conditional probability, summing over all ghost configurations, that
// every listed cluster of inner_clusters(w) is joined to the ghost given the
// inner part of w.
double ghost_joint_oracle(const BoxGraph& g, const ModelParams& params, const BondConfig& w,
                          std::span<const std::size_t> clusters);
double ghost_conditional_oracle(const BoxGraph& g, const ModelParams& params, const BondConfig& w,
                                std::size_t cluster);

// phi[x <-> y | inner part of w], connections through the ghost allowed.
double conditional_connection(const BoxGraph& g, const ModelParams& params, const BondConfig& w,
                              Vertex x, Vertex y);

enum class Direction { p, p_h, q };

// Derivative of phi[A] from the covariance identities:
//   d/dp   = Cov[o(w_in), 1_A] / (p(1-p))
//   d/dp_h = Cov[o(w_g), 1_A] / (p_h(1-p_h))
//   d/dq   = Cov[1_A, kappa] / q
double deriv_event(const BoxGraph& g, const ModelParams& params, const EventPredicate& a,
                   Direction which);

struct Gamma {
  double gamma_prime;
  double gamma;
};

// Constants bounding d/dp phi[A] <= gamma * d/dp_h phi[A] for increasing A.
Gamma eval_gamma(double p, double q, double p_h, int d);

enum class Scope { all_edges, inner_edges };

struct DominationResult {
  bool dominated = true;
  std::optional<std::uint64_t> counterexample;  // up-set over the scope states
  double worst_gap = 0.0;                        // max of phi1[A] - phi2[A]
  std::size_t events_checked = 0;
};

// Law of the configuration restricted to `scope`, indexed by local bitmask.
std::vector<double> marginal_law(const BoxGraph& g, const ModelParams& params,
                                 std::span<const EdgeId> scope);

std::vector<EdgeId> scope_edges(const BoxGraph& g, Scope scope);

// Checks phi1[A] <= phi2[A] for every increasing A over the scope edges.
DominationResult domination_bruteforce(const BoxGraph& g, const ModelParams& lower,
                                       const ModelParams& upper, Scope scope = Scope::all_edges,
                                       bool allow_six_edges = false);

// Same check between two already computed laws on s scope edges.
DominationResult dominates(std::span<const double> lower, std::span<const double> upper, unsigned s,
                           double tol);

// Potts two-point function <sigma_x . sigma_y> by spin enumeration with the
// simplex inner product; the ghost (if x or y) carries the distinguished spin.
// Boundary blocks under bc are tied to one common spin (to the distinguished
// one when a block contains the ghost).
double potts_two_point(const BoxGraph& g, const BoundaryCondition& bc, double beta, double h, int q,
                       Vertex x, Vertex y);

struct EdwardsSokalCheck {
  double potts;
  double random_cluster;
};

// Both sides of <sigma_x . sigma_y> = phi[x <-> y] at p = 1-exp(-q beta/(q-1)),
// p_h = 1-exp(-q h/(q-1)).
EdwardsSokalCheck edwards_sokal_check(const BoxGraph& g, const BoundaryCondition& bc, double beta,
                                      double h, int q, Vertex x, Vertex y);

// Exact sampler by sequential inverse CDF over edges in index order.
class ExactSampler {
 public:
  ExactSampler(const BoxGraph& g, const ModelParams& params);

  BondConfig draw(Rng& rng) const;
  // Probability of the configuration with the given edge bitmask.
  double probability(std::uint64_t mask) const { return levels_.back()[mask]; }
  std::size_t edge_count() const { return edges_; }

 private:
  std::size_t edges_;
  std::vector<std::vector<double>> levels_;  // levels_[j][prefix]: mass of prefix over edges < j
};

BondConfig sample_chain(const BoxGraph& g, const ModelParams& params, Rng& rng);

struct CentralViolation {
  std::uint64_t inner_mask;
  EdgeId edge;
  double lhs;
  double rhs;
};

// Per-configuration check behind the explicit domination condition:
//   r2((1-1/q2) phi2[x<->y | w_in] + 1/q2) <= r1((1-1/q1) phi1[x<->y | w_in] + 1/q1)
// for every inner configuration and every closed inner edge (x,y).
std::optional<CentralViolation> central_inequality(const BoxGraph& g, const ModelParams& params1,
                                                   const ModelParams& params2);

}  // namespace klab::exact
