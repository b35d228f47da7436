#include "klab/kertesz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace klab::kertesz {

using lattice::BondConfig;
using lattice::BoundaryCondition;
using lattice::BoxGraph;
using lattice::Vertex;

ProxyGeometry proxy_geometry(int d, int L) {
  if (L < 1) throw std::invalid_argument("proxy size must be at least 1");
  if (d == 2) {
    ProxyGeometry out{BoxGraph::rect({L, L + 1}), {}, {}};
    for (int r = 0; r < L; ++r) {
      const int left[2] = {r, 0};
      const int right[2] = {r, L};
      out.from.push_back(out.graph.site_at(left));
      out.to.push_back(out.graph.site_at(right));
    }
    return out;
  }
  ProxyGeometry out{BoxGraph::box(d, L), {}, {}};
  const std::vector<int> origin(d, 0);
  out.from.push_back(out.graph.site_at(origin));
  out.to.assign(out.graph.boundary().begin(), out.graph.boundary().end());
  return out;
}

namespace {

exact::ModelParams proxy_params(double p, double q, double h) {
  if (h < 0.0) throw std::invalid_argument("h must be nonnegative");
  double p_h = 0.0;
  if (h > 0.0) {
    if (q == 1.0) throw std::invalid_argument("q = 1 has no field translation; use h = 0");
    p_h = bounds::ph_of_h(h, q);
  }
  return exact::ModelParams(p, q, p_h, BoundaryCondition::wired());
}

constexpr std::uint64_t kSizeStride = 0x9e3779b97f4a7c15ull;

mc::Estimate proxy_one(const ProxyGeometry& geo, const exact::ModelParams& params, std::size_t n,
                       std::uint64_t seed, const ProxySettings& s) {
  const auto xs = mc::sample_observable(
      geo.graph, params,
      [&](const BondConfig& w) { return mc::inner_crossing(geo.graph, w, geo.from, geo.to) ? 1.0 : 0.0; }, n,
      s.sampler, seed, s.run);
  return mc::batch_means(xs);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::vector<mc::Estimate> percolation_proxy(double p, double q, double h, const std::vector<int>& sizes,
                                            const ProxySettings& settings) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (settings.n_samples < 2) throw std::invalid_argument("proxy needs at least 2 samples");
  const auto params = proxy_params(p, q, h);
  std::vector<mc::Estimate> out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto geo = proxy_geometry(settings.d, sizes[i]);
    out.push_back(proxy_one(geo, params, settings.n_samples, settings.seed + i * kSizeStride, settings));
  }
  return out;
}

HcEstimate estimate_hc(double p, double q, int d, const HcSettings& s) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  if (q < 1.0) throw std::invalid_argument("q must be at least 1");
  if (s.sizes.empty()) throw std::invalid_argument("at least one size is required");
  if (!(s.tol_h > 0.0)) throw std::invalid_argument("tol_h must be positive");
  if (q == 1.0)
    throw std::invalid_argument("q = 1 has no field translation; the Kertesz line is undefined");

  const auto largest = std::max_element(s.sizes.begin(), s.sizes.end());
  const std::size_t li = static_cast<std::size_t>(largest - s.sizes.begin());
  const auto geo = proxy_geometry(d, *largest);
  ProxySettings ps{d, s.n_samples, s.seed, s.sampler, s.run};
  const std::uint64_t seed = s.seed + li * kSizeStride;

  HcEstimate out;
  if (s.h_max) {
    out.h_max = *s.h_max;
  } else {
    std::optional<double> pb = s.p_bernoulli;
    if (!pb && d == 2) pb = 0.5;
    const double bern = pb ? bounds::upper_bound_bernoulli(p, q, *pb) : bounds::kInf;
    out.h_max = std::isfinite(bern) && bern > 0.0 ? 2.0 * bern : 10.0;
  }

  auto decide = [&](double h) {
    const auto params = proxy_params(p, q, h);
    std::size_t n = s.n_samples;
    mc::Estimate e;
    int verdict = 0;
    for (;;) {
      e = proxy_one(geo, params, n, seed, ps);
      out.samples_used += n;
      if (e.lower(2.0) > 0.5) verdict = 1;
      else if (e.upper(2.0) < 0.5) verdict = -1;
      if (verdict != 0 || 2 * n > s.max_samples) break;
      n *= 2;
    }
    // Proxy must be nondecreasing in h.
    for (const auto& prev : out.trace) {
      const double se = std::hypot(prev.crossing.std_error, e.std_error);
      const bool bad = (prev.h < h && prev.crossing.mean - e.mean > 3.0 * se) ||
                       (prev.h > h && e.mean - prev.crossing.mean > 3.0 * se);
      if (bad)
        throw MonotonicityError("crossing proxy decreases in h beyond 3 stderr: h=" + fmt(prev.h) + " gives " +
                                fmt(prev.crossing.mean) + ", h=" + fmt(h) + " gives " + fmt(e.mean));
    }
    out.trace.push_back({h, e, verdict});
    return verdict;
  };

  const int at_zero = decide(0.0);
  if (at_zero >= 0) {
    out.kind = HcKind::zero;
    out.h_est = 0.0;
    out.h_err = at_zero == 0 ? s.tol_h : 0.0;
    out.halted = at_zero == 0;
    return out;
  }
  if (decide(out.h_max) <= 0) {
    out.kind = HcKind::infinite;
    out.h_est = bounds::kInf;
    out.h_err = 0.0;
    return out;
  }
  double lo = 0.0, hi = out.h_max;
  while (hi - lo > s.tol_h) {
    const double mid = 0.5 * (lo + hi);
    const int v = decide(mid);
    if (v > 0) {
      hi = mid;
    } else if (v < 0) {
      lo = mid;
    } else {
      out.halted = true;
      break;
    }
  }
  out.kind = HcKind::finite;
  out.h_est = 0.5 * (lo + hi);
  out.h_err = std::max(s.tol_h, 0.5 * (hi - lo));
  if (s.sizes.size() > 1) out.drift = percolation_proxy(p, q, out.h_est, s.sizes, ps);
  return out;
}

const char* flag_name(Flag f) {
  switch (f) {
    case Flag::ok:
      return "OK";
    case Flag::fail_sandwich:
      return "FAIL_SANDWICH";
    case Flag::unresolved:
      return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

bounds::BoundsReport point_bounds(double p, double q, int d, const ScanSettings& settings) {
  bounds::BoundsInputs in;
  in.qc_at_p = settings.qc_at_p;
  in.p_bernoulli = settings.hc.p_bernoulli;
  in.delta_override = settings.delta_override;
  for (std::size_t i = 0; i < settings.lower_ks.size(); ++i) {
    const int k = settings.lower_ks[i];
    in.crossings.push_back({k, mc::annulus_crossing(p, q, k, settings.lower_samples,
                                                    settings.hc.seed + 0x5bd1e995ull * (i + 1), d,
                                                    settings.hc.sampler, settings.hc.run)});
  }
  return bounds::make_report(p, q, d, in);
}

std::optional<std::string> sandwich_violation(const ScanRow& r) {
  if (!std::isfinite(r.h_err)) return std::nullopt;
  std::ostringstream os;
  if (std::isfinite(r.h_lower) && !(r.h_lower <= r.h_est + 2.0 * r.h_err)) {
    os << "p=" << r.p << ": h_lower " << r.h_lower << " exceeds h_est + 2 h_err";
    return os.str();
  }
  for (double up : {r.h_upper_rc, r.h_upper_bern}) {
    if (std::isnan(up) || std::isinf(up)) continue;
    if (!(r.h_est - 2.0 * r.h_err <= up)) {
      os << "p=" << r.p << ": h_est - 2 h_err exceeds the upper bound " << up;
      return os.str();
    }
  }
  return std::nullopt;
}

ScanResult scan(const std::vector<double>& p_grid, double q, int d, const ScanSettings& settings) {
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw std::invalid_argument("p grid must be ascending");
  ScanResult out;
  for (double p : p_grid) {
    ScanRow row;
    row.p = p;
    row.q = q;
    row.d = d;
    row.sizes_used = settings.hc.sizes;
    row.seed = settings.hc.seed;
    try {
      const auto b = point_bounds(p, q, d, settings);
      row.h_upper_rc = b.h_upper_rc;
      row.h_upper_bern = b.h_upper_bern;
      if (b.lower.resolved) row.h_lower = b.lower.h_threshold;
      const auto hc = estimate_hc(p, q, d, settings.hc);
      row.h_est = hc.h_est;
      row.h_err = hc.h_err;
      row.n_samples = hc.samples_used;
      if (hc.halted) row.note = "bisection halted at an undecidable step";
      if (auto v = sandwich_violation(row)) {
        row.flag = Flag::fail_sandwich;
        out.warnings.push_back(*v);
      }
    } catch (const std::exception& e) {
      row.flag = Flag::unresolved;
      row.note = e.what();
      out.warnings.push_back("p=" + fmt(p) + ": " + e.what());
    }
    out.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
    const auto& a = out.rows[i];
    const auto& b = out.rows[i + 1];
    if (a.flag == Flag::unresolved || b.flag == Flag::unresolved) continue;
    if (std::isinf(a.h_est)) continue;
    if (std::isinf(b.h_est) || b.h_est - a.h_est > 2.0 * (a.h_err + b.h_err))
      out.warnings.push_back("h_est increases between p=" + fmt(a.p) + " and p=" + fmt(b.p));
  }
  return out;
}

}  // namespace klab::kertesz
