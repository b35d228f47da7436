#pragma once

// Closed-form quantities around the Kertesz line: tanh_q, the two upper
// bounds, the coarse-graining constants and lower-bound pipeline, lattice
// animals, the separated thinning, polymer weights and the cluster-expansion
// threshold h0(q,d).
//
// Bound functions return +inf / 0 at the edges of their domain instead of
// throwing; genuinely invalid inputs throw std::domain_error.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "klab/estimate.hpp"

namespace klab::bounds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double tanh_q(double x, double q);
double arctanh_q(double y, double q);

// Field h and ghost-edge parameter: p_h = 1 - exp(-(q/(q-1)) h), q > 1.
double ph_of_h(double h, double q);
double h_of_ph(double p_h, double q);

// Planar self-dual point and its inverse.
double pc_planar(double q);
double qc_planar(double p);

// arctanh_q( sqrt( (q/q_c(p) - 1)/(q-1) ) ); 0 when the radicand is negative
// (p above p_c(q,0)), +inf when it reaches 1.
double upper_bound_kertesz(double p, double q, const std::function<double(double)>& qc_of_p);

// arctanh_q( sqrt( (q r_B (1-p)/p - 1)/(q-1) ) ), r_B = p_B/(1-p_B).
double upper_bound_bernoulli(double p, double q, double p_bernoulli);

struct MuDelta {
  double mu;
  double log_mu;
  double delta;      // mu^(-4^d); underflows to 0 for large d, use log_delta
  double log_delta;
  // mu as an exact ratio when both parts fit in 64 bits.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> ratio;
};

MuDelta mu_delta(int d);

// ---------------------------------------------------------------------------
// Explicit domination condition between (p1,q1,h1) and (p2,q2,h2).

struct EksplicitWitness {
  static constexpr long kInfinity = -1;
  long n;  // cluster sizes; kInfinity for the n -> infinity limit
  long m;  // (0,0) marks the inner-connected case r2 <= r1
};

struct EksplicitResult {
  bool holds;
  std::optional<EksplicitWitness> witness;
};

// Checks, for all n,m in {1..n_max, infinity},
//   (r2/q2)((q2-1) t2(n) t2(m) + 1) <= (r1/q1)((q1-1) t1(n) t1(m) + 1)
// where t_i(n) is the probability that an n-site cluster reaches the ghost,
// and finally r2 <= r1.
EksplicitResult check_eksplicit_condition(double p1, double q1, double h1, double p2, double q2,
                                          double h2, long n_max = 64);

// Cluster-to-ghost probability t(n) at field h (0 when q == 1 or h == 0).
double ghost_touch(long n, double q, double h);

// ---------------------------------------------------------------------------
// Lower bound on the Kertesz line.

struct CrossingMeasurement {
  int k;
  mc::Estimate crossing;  // phi^1_{p,q,0,Lambda_3k}[Lambda_k <-> boundary]
};

// log crossing(k) ~ intercept + slope * k
struct DecayRate {
  double intercept;
  double slope;
};

struct LowerBound {
  bool resolved = false;
  int k_star = 0;
  bool extrapolated = false;
  double delta = kNaN;
  double ph_threshold = kNaN;
  double h_threshold = kNaN;
  std::optional<DecayRate> fit;
  std::string reason;
};

// 1 - (1 - delta/2)^(1/(6k+1)^d), evaluated without cancellation.
double lower_threshold_ph(double delta, int k, int d);

// Upper confidence bound on a measured crossing probability: mean + 2 stderr,
// and never below 3/n.
double crossing_upper_bound(const mc::Estimate& e);

LowerBound lower_bound_pipeline(double p, double q, int d,
                                std::span<const CrossingMeasurement> measured,
                                std::optional<DecayRate> rate = std::nullopt,
                                std::optional<double> delta_override = std::nullopt);

// ---------------------------------------------------------------------------
// Coarse-graining combinatorics.

using Point = std::vector<long>;

// Largest residue class of S modulo 4Z^d; pairwise L1 distances are >= 4.
std::vector<Point> thin_set(std::span<const Point> s);

// Connected n-subsets of Z^d containing the origin.
std::uint64_t lattice_animals(int n, int d = 2);
// Fixed polyominoes (animals up to translation) of size n.
std::uint64_t fixed_animals(int n, int d = 2);

// ---------------------------------------------------------------------------
// Cluster expansion.

double h0(double q, int d);

struct Polymer {
  int d = 2;
  std::vector<Point> sites;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // indices into sites
};

// Polymer with every nearest-neighbour edge among the sites.
Polymer induced_polymer(int d, std::vector<Point> sites);

// Edges of Z^d with exactly one endpoint in the polymer's sites.
std::size_t edge_boundary_size(const Polymer& s);

// beta(p) = -((q-1)/q) log(1-p).
double beta_of_p(double p, double q);

// sum over w in {0,1}^{E_S} of p^o (1-p)^c (q-1)^kappa(w), kappa on V_S.
double polymer_inner_sum(const Polymer& s, double p, double q);
double polymer_weight(const Polymer& s, double p, double q, double h);

struct ExpansionCheck {
  bool converges;
  double ratio;      // geometric ratio per polymer site
  double sum_bound;  // bound on the weighted polymer sum through the origin
  double h0;
};

ExpansionCheck expansion_converges(double q, int d, double h);

// Conjectured correlation-length exponent for q in [1,4].
double nu_conjectured(double q);

// ---------------------------------------------------------------------------

struct BoundsInputs {
  std::optional<double> qc_at_p;      // q_c(p,0); defaults to the planar formula in d = 2
  std::optional<double> p_bernoulli;  // defaults to 1/2 in d = 2
  std::vector<CrossingMeasurement> crossings;
  std::optional<DecayRate> rate;
  std::optional<double> delta_override;
};

struct BoundsReport {
  double p = kNaN;
  double q = kNaN;
  int d = 2;
  double h_upper_rc = kNaN;    // NaN when q_c(p,0) is unknown
  double h_upper_bern = kNaN;  // NaN when p_B is unknown
  double mu = kNaN;
  double delta = kNaN;
  LowerBound lower;
  double h0 = kNaN;  // NaN for q <= 1
};

// Throws std::logic_error if a finite lower bound exceeds a finite upper bound.
BoundsReport make_report(double p, double q, int d, const BoundsInputs& in);

}  // namespace klab::bounds
