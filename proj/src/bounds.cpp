#include "klab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "klab/union_find.hpp"

namespace klab::bounds {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

double tanh_q(double x, double q) {
  require(x >= 0.0, "tanh_q: x must be nonnegative");
  require(q >= 1.0, "tanh_q: q must be at least 1");
  if (std::isinf(x)) return 1.0;
  const double e = std::exp(-2.0 * x);
  return -std::expm1(-2.0 * x) / ((q - 1.0) * e + 1.0);
}

double arctanh_q(double y, double q) {
  require(y >= 0.0 && y < 1.0, "arctanh_q: argument must lie in [0,1)");
  require(q >= 1.0, "arctanh_q: q must be at least 1");
  return 0.5 * (std::log1p((q - 1.0) * y) - std::log1p(-y));
}

double ph_of_h(double h, double q) {
  require(q > 1.0, "ph_of_h: q = 1 has no field/edge translation");
  require(h >= 0.0, "ph_of_h: h must be nonnegative");
  return -std::expm1(-(q / (q - 1.0)) * h);
}

double h_of_ph(double p_h, double q) {
  require(q > 1.0, "h_of_ph: q = 1 has no field/edge translation");
  require(p_h >= 0.0 && p_h < 1.0, "h_of_ph: p_h must lie in [0,1)");
  return -((q - 1.0) / q) * std::log1p(-p_h);
}

double pc_planar(double q) {
  require(q >= 1.0, "pc_planar: q must be at least 1");
  const double s = std::sqrt(q);
  return s / (1.0 + s);
}

double qc_planar(double p) {
  require(p > 0.0 && p < 1.0, "qc_planar: p must lie in (0,1)");
  const double r = p / (1.0 - p);
  return r * r;
}

namespace {

double bound_from_radicand(double numerator, double q) {
  // numerator / (q-1) is the radicand
  if (q == 1.0) return numerator <= 0.0 ? 0.0 : kInf;
  const double rad = numerator / (q - 1.0);
  if (rad <= 0.0) return 0.0;
  if (rad >= 1.0) return kInf;
  return arctanh_q(std::sqrt(rad), q);
}

}  // namespace

double upper_bound_kertesz(double p, double q, const std::function<double(double)>& qc_of_p) {
  require(q >= 1.0, "upper_bound_kertesz: q must be at least 1");
  const double qc = qc_of_p(p);
  require(qc > 0.0, "upper_bound_kertesz: q_c(p) must be positive");
  return bound_from_radicand(q / qc - 1.0, q);
}

double upper_bound_bernoulli(double p, double q, double p_bernoulli) {
  require(p > 0.0 && p <= 1.0, "upper_bound_bernoulli: p must lie in (0,1]");
  require(q >= 1.0, "upper_bound_bernoulli: q must be at least 1");
  require(p_bernoulli > 0.0 && p_bernoulli < 1.0, "upper_bound_bernoulli: p_B must lie in (0,1)");
  const double r_b = p_bernoulli / (1.0 - p_bernoulli);
  return bound_from_radicand(q * r_b * (1.0 - p) / p - 1.0, q);
}

MuDelta mu_delta(int d) {
  require(d >= 1, "mu_delta: dimension must be at least 1");
  MuDelta out;
  const double a = 2.0 * d + 1.0;
  const double b = 2.0 * d;
  out.log_mu = a * std::log(a) - b * std::log(b);
  out.mu = std::exp(out.log_mu);
  out.log_delta = -std::pow(4.0, d) * out.log_mu;
  out.delta = std::exp(out.log_delta);

  // Exact ratio (2d+1)^(2d+1) / (2d)^(2d) while it fits.
  unsigned __int128 num = 1, den = 1;
  bool fits = true;
  for (int i = 0; i < 2 * d + 1 && fits; ++i) {
    num *= static_cast<unsigned>(2 * d + 1);
    fits = num <= UINT64_MAX;
  }
  for (int i = 0; i < 2 * d && fits; ++i) {
    den *= static_cast<unsigned>(2 * d);
    fits = den <= UINT64_MAX;
  }
  if (fits) {
    std::uint64_t n = static_cast<std::uint64_t>(num), m = static_cast<std::uint64_t>(den);
    // 2d+1 and 2d are coprime, so the ratio is already reduced.
    out.ratio = std::make_pair(n, m);
    out.mu = static_cast<double>(static_cast<long double>(n) / static_cast<long double>(m));
  }
  return out;
}

// ---------------------------------------------------------------------------

double ghost_touch(long n, double q, double h) {
  if (q == 1.0 || h == 0.0) return 0.0;
  const double p_h = ph_of_h(h, q);
  if (n == EksplicitWitness::kInfinity) return p_h > 0.0 ? 1.0 : 0.0;
  const double log_closed = static_cast<double>(n) * std::log1p(-p_h);
  const double closed = std::exp(log_closed);
  return -std::expm1(log_closed) / ((q - 1.0) * closed + 1.0);
}

EksplicitResult check_eksplicit_condition(double p1, double q1, double h1, double p2, double q2,
                                          double h2, long n_max) {
  require(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0, "eksplicit: p out of range");
  require(q1 >= 1.0 && q2 >= 1.0, "eksplicit: q must be at least 1");
  require(h1 >= 0.0 && h2 >= 0.0, "eksplicit: h must be nonnegative");
  require(n_max >= 1, "eksplicit: n_max must be at least 1");

  std::vector<long> sizes;
  for (long n = 1; n <= n_max; ++n) sizes.push_back(n);
  sizes.push_back(EksplicitWitness::kInfinity);

  std::vector<double> t1(sizes.size()), t2(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    t1[i] = ghost_touch(sizes[i], q1, h1);
    t2[i] = ghost_touch(sizes[i], q2, h2);
  }
  // r2/q2 * A <= r1/q1 * B, cross-multiplied by (1-p1)(1-p2) >= 0.
  const double left_scale = p2 * (1.0 - p1) / q2;
  const double right_scale = p1 * (1.0 - p2) / q1;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      const double lhs = left_scale * ((q2 - 1.0) * t2[i] * t2[j] + 1.0);
      const double rhs = right_scale * ((q1 - 1.0) * t1[i] * t1[j] + 1.0);
      if (lhs > rhs * (1.0 + 1e-12)) return {false, EksplicitWitness{sizes[i], sizes[j]}};
    }
  }
  if (p2 > p1) return {false, EksplicitWitness{0, 0}};
  return {true, std::nullopt};
}

// ---------------------------------------------------------------------------

double lower_threshold_ph(double delta, int k, int d) {
  require(delta > 0.0 && delta < 1.0, "lower_threshold_ph: delta must lie in (0,1)");
  require(k >= 1 && d >= 1, "lower_threshold_ph: k and d must be positive");
  const double volume = std::pow(6.0 * k + 1.0, d);
  return -std::expm1(std::log1p(-delta / 2.0) / volume);
}

double crossing_upper_bound(const mc::Estimate& e) {
  const double rule_of_three = e.n_samples > 0 ? 3.0 / static_cast<double>(e.n_samples) : 1.0;
  return std::max(e.upper(2.0), rule_of_three);
}

LowerBound lower_bound_pipeline(double p, double q, int d,
                                std::span<const CrossingMeasurement> measured,
                                std::optional<DecayRate> rate, std::optional<double> delta_override) {
  (void)p;
  require(d >= 1, "lower_bound_pipeline: dimension must be at least 1");
  require(q >= 1.0, "lower_bound_pipeline: q must be at least 1");
  LowerBound out;
  if (delta_override) {
    require(*delta_override > 0.0 && *delta_override < 1.0, "delta override must lie in (0,1)");
    out.delta = *delta_override;
  } else {
    out.delta = mu_delta(d).delta;
    if (out.delta <= 0.0) {
      out.reason = "delta underflows double precision";
      return out;
    }
  }
  const double target = out.delta / 2.0;
  const double log_target = std::log(target);

  std::vector<CrossingMeasurement> pts(measured.begin(), measured.end());
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  for (const auto& m : pts) require(m.k >= 1, "crossing measurements need k >= 1");

  if (rate) {
    out.fit = rate;
  } else {
    // Least squares of log(mean) against k over points with a positive mean.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& m : pts) {
      if (m.crossing.mean <= 0.0) continue;
      const double x = m.k, y = std::log(m.crossing.mean);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n >= 2) {
      const double den = n * sxx - sx * sx;
      if (den > 0.0) {
        const double slope = (n * sxy - sx * sy) / den;
        out.fit = DecayRate{(sy - slope * sx) / n, slope};
      }
    }
  }
  const bool decays = out.fit && out.fit->slope < 0.0;

  auto finish = [&](int k, bool extrapolated) {
    out.resolved = true;
    out.k_star = k;
    out.extrapolated = extrapolated;
    out.ph_threshold = lower_threshold_ph(out.delta, k, d);
    if (q > 1.0) {
      // -((q-1)/q) log(1 - ph) with log(1 - ph) = log1p(-delta/2) / |Lambda_3k|
      const double volume = std::pow(6.0 * k + 1.0, d);
      out.h_threshold = -((q - 1.0) / q) * std::log1p(-out.delta / 2.0) / volume;
    }
    return out;
  };

  const int k_measured_max = pts.empty() ? 0 : pts.back().k;
  for (int k = 1; k <= k_measured_max; ++k) {
    auto it = std::find_if(pts.begin(), pts.end(), [k](const auto& m) { return m.k == k; });
    if (it != pts.end()) {
      if (crossing_upper_bound(it->crossing) < target) return finish(k, false);
    } else if (decays && out.fit->intercept + out.fit->slope * k < log_target) {
      return finish(k, true);
    }
  }
  if (!decays) {
    out.reason = "no decay detected in crossing probabilities";
    return out;
  }
  // smallest k > k_measured_max with intercept + slope k < log_target
  const double x = (log_target - out.fit->intercept) / out.fit->slope;
  double k = std::max(static_cast<double>(k_measured_max) + 1.0, std::floor(x) + 1.0);
  if (k < 1.0) k = 1.0;
  if (k > 1e9) {
    out.reason = "extrapolated k beyond 1e9";
    return out;
  }
  return finish(static_cast<int>(k), true);
}

// ---------------------------------------------------------------------------

std::vector<Point> thin_set(std::span<const Point> s) {
  require(!s.empty(), "thin_set: set must be nonempty");
  const std::size_t d = s.front().size();
  require(d >= 1 && d <= 16, "thin_set: dimension out of range");
  for (const auto& x : s) require(x.size() == d, "thin_set: mixed dimensions");

  auto residue = [d](const Point& x) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < d; ++i) r = r * 4 + static_cast<std::size_t>(((x[i] % 4) + 4) % 4);
    return r;
  };
  std::vector<std::size_t> counts(std::size_t{1} << (2 * d), 0);
  for (const auto& x : s) ++counts[residue(x)];
  const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::vector<Point> out;
  for (const auto& x : s)
    if (residue(x) == best) out.push_back(x);
  return out;
}

// ---------------------------------------------------------------------------

double h0(double q, int d) {
  require(q > 1.0, "h0: q must exceed 1");
  require(d >= 1, "h0: dimension must be at least 1");
  const double dd = 2.0 * d;
  const double kesten = dd + (dd + 1.0) * std::log(dd + 1.0) - dd * std::log(dd);
  const double prefactor = (q - 1.0) / q;  // (1 + 1/(q-1))^(-1)
  if (q >= 2.0) return prefactor * (std::numbers::ln2 + std::log(q - 1.0) + kesten);
  return prefactor * (std::log(q) + kesten);
}

ExpansionCheck expansion_converges(double q, int d, double h) {
  require(q > 1.0, "expansion_converges: q must exceed 1");
  require(h >= 0.0, "expansion_converges: h must be nonnegative");
  ExpansionCheck out{};
  out.h0 = h0(q, d);
  // per-site factor e^{-(q/(q-1)) h} e^{2d} mu
  const double log_r = -(q / (q - 1.0)) * h + 2.0 * d + mu_delta(d).log_mu;
  const double r = std::exp(log_r);
  if (q >= 2.0) {
    out.ratio = (q - 1.0) * r;
    out.sum_bound = out.ratio < 1.0 ? out.ratio / (1.0 - out.ratio) : kInf;
  } else {
    out.ratio = r;
    out.sum_bound = r < 1.0 ? (q - 1.0) * r / (1.0 - r) : kInf;
  }
  out.converges = out.sum_bound < 1.0 && h > out.h0;
  return out;
}

Polymer induced_polymer(int d, std::vector<Point> sites) {
  Polymer s;
  s.d = d;
  s.sites = std::move(sites);
  for (std::size_t i = 0; i < s.sites.size(); ++i)
    for (std::size_t j = i + 1; j < s.sites.size(); ++j) {
      long dist = 0;
      for (int c = 0; c < d; ++c) dist += std::abs(s.sites[i][c] - s.sites[j][c]);
      if (dist == 1) s.edges.emplace_back(i, j);
    }
  return s;
}

namespace {

void validate_polymer(const Polymer& s) {
  require(s.d >= 1, "polymer: dimension must be at least 1");
  require(!s.sites.empty(), "polymer: needs at least one site");
  for (const auto& x : s.sites) require(static_cast<int>(x.size()) == s.d, "polymer: wrong dimension");
  for (std::size_t i = 0; i < s.sites.size(); ++i)
    for (std::size_t j = i + 1; j < s.sites.size(); ++j)
      require(s.sites[i] != s.sites[j], "polymer: repeated site");
  UnionFind uf(s.sites.size());
  for (auto [a, b] : s.edges) {
    require(a < s.sites.size() && b < s.sites.size() && a != b, "polymer: bad edge endpoints");
    long dist = 0;
    for (int c = 0; c < s.d; ++c) dist += std::abs(s.sites[a][c] - s.sites[b][c]);
    require(dist == 1, "polymer: edges must join nearest neighbours");
    uf.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  }
  require(uf.set_count() == 1, "polymer: subgraph must be connected");
  require(s.edges.size() <= 20, "polymer: more than 20 edges exceeds the enumeration budget");
}

}  // namespace

std::size_t edge_boundary_size(const Polymer& s) {
  std::size_t internal = 0;  // nearest-neighbour pairs inside V_S, used or not
  for (std::size_t i = 0; i < s.sites.size(); ++i)
    for (std::size_t j = i + 1; j < s.sites.size(); ++j) {
      long dist = 0;
      for (int c = 0; c < s.d; ++c) dist += std::abs(s.sites[i][c] - s.sites[j][c]);
      if (dist == 1) ++internal;
    }
  return 2 * static_cast<std::size_t>(s.d) * s.sites.size() - 2 * internal;
}

double beta_of_p(double p, double q) {
  require(q > 1.0, "beta_of_p: q must exceed 1");
  require(p >= 0.0 && p < 1.0, "beta_of_p: p must lie in [0,1)");
  return -((q - 1.0) / q) * std::log1p(-p);
}

double polymer_inner_sum(const Polymer& s, double p, double q) {
  validate_polymer(s);
  require(p >= 0.0 && p <= 1.0, "polymer: p out of range");
  require(q > 1.0, "polymer: q must exceed 1");
  const std::size_t m = s.edges.size();
  double total = 0.0;
  UnionFind uf;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    uf.reset(s.sites.size());
    std::size_t open = 0;
    for (std::size_t e = 0; e < m; ++e)
      if ((mask >> e) & 1u) {
        ++open;
        uf.unite(static_cast<std::uint32_t>(s.edges[e].first),
                 static_cast<std::uint32_t>(s.edges[e].second));
      }
    total += std::pow(p, static_cast<double>(open)) * std::pow(1.0 - p, static_cast<double>(m - open)) *
             std::pow(q - 1.0, static_cast<double>(uf.set_count()));
  }
  return total;
}

double polymer_weight(const Polymer& s, double p, double q, double h) {
  require(h >= 0.0, "polymer: h must be nonnegative");
  const double inner = polymer_inner_sum(s, p, q);
  if (std::isinf(h)) return 0.0;
  const double factor = q / (q - 1.0);
  const double expo = factor * (h * static_cast<double>(s.sites.size()) +
                                beta_of_p(p, q) * static_cast<double>(edge_boundary_size(s)));
  return inner * std::exp(-expo);
}

double nu_conjectured(double q) {
  require(q >= 1.0 && q <= 4.0, "nu_conjectured: q must lie in [1,4]");
  const double a = std::acos(-std::sqrt(q) / 2.0);
  return 2.0 * a / (6.0 * a - 3.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------

BoundsReport make_report(double p, double q, int d, const BoundsInputs& in) {
  require(p > 0.0 && p < 1.0, "bounds: p must lie in (0,1)");
  require(q >= 1.0, "bounds: q must be at least 1");
  require(d >= 1, "bounds: dimension must be at least 1");
  BoundsReport r;
  r.p = p;
  r.q = q;
  r.d = d;

  std::optional<double> qc = in.qc_at_p;
  if (!qc && d == 2) qc = qc_planar(p);
  if (qc) r.h_upper_rc = upper_bound_kertesz(p, q, [&](double) { return *qc; });

  std::optional<double> pb = in.p_bernoulli;
  if (!pb && d == 2) pb = 0.5;
  if (pb) r.h_upper_bern = upper_bound_bernoulli(p, q, *pb);

  const MuDelta md = mu_delta(d);
  r.mu = md.mu;
  r.delta = md.delta;
  if (!in.crossings.empty() || in.rate)
    r.lower = lower_bound_pipeline(p, q, d, in.crossings, in.rate, in.delta_override);
  else
    r.lower.reason = "no crossing measurements supplied";
  if (q > 1.0) r.h0 = h0(q, d);

  if (r.lower.resolved && std::isfinite(r.lower.h_threshold) && std::isfinite(r.h_upper_rc) &&
      r.lower.h_threshold > r.h_upper_rc)
    throw std::logic_error("lower bound exceeds the upper bound");
  return r;
}

}  // namespace klab::bounds
