#pragma once

// Finite-size estimate of the Kertesz line h_c(p) by bisection in h.
//
// Proxy: in d = 2 the probability that open inner edges cross an L x (L+1)
// block (L rows, L+1 columns) from the left column to the right column; in
// d >= 3 the probability that the origin of Lambda_L reaches its boundary by
// open inner edges. Wired boundary, ghost edges never count as crossings.
// The transition point at size L is where this probability equals 1/2.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "klab/bounds.hpp"
#include "klab/estimate.hpp"
#include "klab/mc.hpp"

namespace klab::kertesz {

struct ProxySettings {
  int d = 2;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
  mc::SamplerSettings sampler = mc::HeatBathSettings{};
  mc::RunSettings run;
};

// Graph and endpoint sets for the crossing proxy at size L.
struct ProxyGeometry {
  lattice::BoxGraph graph;
  std::vector<lattice::Vertex> from;
  std::vector<lattice::Vertex> to;
};

ProxyGeometry proxy_geometry(int d, int L);

// Sizes are measured with seeds seed + i * 0x9e3779b97f4a7c15 (i = size
// index); every h shares those seeds, so estimates at different h come from
// monotonically coupled chains.
std::vector<mc::Estimate> percolation_proxy(double p, double q, double h, const std::vector<int>& sizes,
                                            const ProxySettings& settings);

class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HcSettings {
  std::vector<int> sizes{48};
  double tol_h = 0.05;
  std::size_t n_samples = 10000;
  std::size_t max_samples = 40000;  // doubling budget for undecidable steps
  std::uint64_t seed = 1;
  std::optional<double> h_max;       // default 2 x Bernoulli bound when finite, else 10
  std::optional<double> p_bernoulli;  // default 1/2 in d = 2
  mc::SamplerSettings sampler = mc::HeatBathSettings{};
  mc::RunSettings run;
};

enum class HcKind { zero, finite, infinite };

struct Decision {
  double h;
  mc::Estimate crossing;  // at the largest size
  int verdict;            // +1 supercritical, -1 subcritical, 0 undecidable
};

struct HcEstimate {
  HcKind kind = HcKind::finite;
  double h_est = 0.0;
  double h_err = 0.0;
  double h_max = 0.0;
  bool halted = false;  // an undecidable step stopped the bisection early
  std::vector<Decision> trace;
  std::vector<mc::Estimate> drift;  // proxies over all sizes at h_est (finite, >0 only)
  std::size_t samples_used = 0;
};

HcEstimate estimate_hc(double p, double q, int d, const HcSettings& settings);

enum class Flag { ok, fail_sandwich, unresolved };
const char* flag_name(Flag f);

struct ScanRow {
  double p = 0, q = 0;
  int d = 2;
  double h_lower = bounds::kNaN;
  double h_upper_rc = bounds::kNaN;
  double h_upper_bern = bounds::kNaN;
  double h_est = bounds::kNaN;
  double h_err = bounds::kNaN;
  std::vector<int> sizes_used;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  Flag flag = Flag::ok;
  std::string note;
};

struct ScanSettings {
  HcSettings hc;
  // Lower-bound pipeline: annulus crossings at h = 0 for these k.
  std::vector<int> lower_ks{1, 2, 3, 4};
  std::size_t lower_samples = 2000;
  std::optional<double> delta_override;
  std::optional<double> qc_at_p;  // needed for the rc upper bound beyond d = 2
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<std::string> warnings;  // monotonicity and sandwich diagnostics
};

// Rigorous bounds at a point, with the lower bound fed by annulus crossings.
bounds::BoundsReport point_bounds(double p, double q, int d, const ScanSettings& settings);

// Sandwich check of one row; returns a diagnostic when violated.
std::optional<std::string> sandwich_violation(const ScanRow& row);

ScanResult scan(const std::vector<double>& p_grid, double q, int d, const ScanSettings& settings);

}  // namespace klab::kertesz
