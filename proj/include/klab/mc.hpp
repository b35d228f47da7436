#pragma once

// Monte Carlo engine: single-bond heat-bath dynamics, monotone coupling from
// the past, Edwards-Sokal colouring and batch-means estimators.
//
// A sweep resamples every edge once in index order and consumes exactly one
// uniform per edge. Replica r of a run with master seed s uses Rng(s + r);
// results depend on the replica count but not on the thread count.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "klab/estimate.hpp"
#include "klab/exact.hpp"
#include "klab/lattice.hpp"
#include "klab/rng.hpp"

namespace klab::mc {

using exact::EventPredicate;
using exact::ModelParams;
using lattice::BondConfig;
using lattice::BoundaryCondition;
using lattice::BoxGraph;
using lattice::EdgeId;

struct ChainState {
  BondConfig config;
  std::uint64_t sweep_count = 0;
  Rng rng;
};

// Heat-bath kernel bound to one graph and parameter point.
class HeatBath {
 public:
  HeatBath(const BoxGraph& g, const ModelParams& params);

  // Probability that e is open given the rest of w.
  double open_probability(const BondConfig& w, EdgeId e);
  // Resample e with the uniform u: open iff u < open_probability.
  void update(BondConfig& w, EdgeId e, double u);
  void sweep(BondConfig& w, Rng& rng);
  // Same sweep driven by precomputed uniforms, one per edge.
  void sweep(BondConfig& w, std::span<const double> uniforms);

  const BoxGraph& graph() const { return *g_; }

 private:
  const BoxGraph* g_;
  lattice::ConnectivityProbe probe_;
  double connected_[2];     // by sector: p, p_h
  double disconnected_[2];  // p/(p+q(1-p)), p_h/(p_h+q(1-p_h))
};

// Resamples edge e, using lattice::connected_off_edge directly.
ChainState heat_bath_step(ChainState state, const BoxGraph& g, const ModelParams& params, EdgeId e);

void sweep(ChainState& state, HeatBath& kernel);

class CftpTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kCftpMaxSweeps = std::uint64_t{1} << 20;

// Exact sample by coupling from the past with T = 2, 4, ... sweeps; throws
// CftpTimeout once T would exceed t_max. Throws std::logic_error if the two
// chains ever leave their order.
BondConfig cftp_sample(const BoxGraph& g, const ModelParams& params, Rng& rng,
                       std::uint64_t t_max = kCftpMaxSweeps);

// Spins in {0..q-1} per vertex, ghost included; spin 0 is the distinguished
// spin carried by every cluster joined to the ghost.
std::vector<int> edwards_sokal_color(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc,
                                     double q, Rng& rng);

struct CftpSettings {
  std::uint64_t t_max = kCftpMaxSweeps;
};

struct HeatBathSettings {
  std::size_t burn_in = 100;
  std::size_t thin = 1;  // sweeps between recorded samples
};

using SamplerSettings = std::variant<CftpSettings, HeatBathSettings>;

struct RunSettings {
  std::size_t replicas = 4;
  std::size_t threads = 1;
};

// Runs `replicas` independent chains (split of n_samples in replica order)
// and records observable(w) after each sample.
std::vector<double> sample_observable(const BoxGraph& g, const ModelParams& params,
                                      const std::function<double(const BondConfig&)>& observable,
                                      std::size_t n_samples, const SamplerSettings& sampler,
                                      std::uint64_t seed, RunSettings run = {});

Estimate estimate_event(const BoxGraph& g, const ModelParams& params, const EventPredicate& a,
                        std::size_t n_samples, const SamplerSettings& sampler, std::uint64_t seed,
                        RunSettings run = {});

// Whether some site of inner_sites is joined to some boundary site of g by
// open inner edges.
bool inner_crossing(const BoxGraph& g, const BondConfig& w, std::span<const lattice::Vertex> from,
                    std::span<const lattice::Vertex> to);

// phi^1_{p,q,0,Lambda_3k}[Lambda_k <-> boundary of Lambda_3k] via inner edges.
Estimate annulus_crossing(double p, double q, int k, std::size_t n_samples, std::uint64_t seed, int d = 2,
                          const SamplerSettings& sampler = HeatBathSettings{}, RunSettings run = {});

struct CorrelationFit {
  bool decays = false;
  double xi = 0.0;  // -1/slope when decays
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the log-probability residuals
};

CorrelationFit correlation_length_fit(std::span<const std::pair<double, double>> points);

}  // namespace klab::mc
