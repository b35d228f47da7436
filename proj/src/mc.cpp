#include "klab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace klab::mc {

using lattice::Sector;
using lattice::Vertex;

Estimate batch_means(std::span<const double> samples, std::size_t batches) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("batch means needs at least one sample");
  Estimate out;
  out.n_samples = n;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  const std::size_t nb = std::min(batches, n);
  if (nb < 2) return out;
  const std::size_t b = n / nb;
  std::vector<double> means(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < b; ++j) means[i] += samples[i * b + j];
    means[i] /= static_cast<double>(b);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(nb);
  double var_batch = 0.0;
  for (double m : means) var_batch += (m - grand) * (m - grand);
  var_batch /= static_cast<double>(nb - 1);
  out.std_error = std::sqrt(var_batch / static_cast<double>(nb));

  double var = 0.0;
  for (double x : samples) var += (x - out.mean) * (x - out.mean);
  var /= static_cast<double>(n - 1);
  if (var > 0.0) out.tau = 0.5 * static_cast<double>(b) * var_batch / var;
  return out;
}

// ---------------------------------------------------------------------------

HeatBath::HeatBath(const BoxGraph& g, const ModelParams& params) : g_(&g), probe_(g, params.bc) {
  const double q = params.q;
  auto tilde = [q](double x) { return x == 0.0 ? 0.0 : x / (x + q * (1.0 - x)); };
  connected_[0] = params.p;
  connected_[1] = params.p_h;
  disconnected_[0] = tilde(params.p);
  disconnected_[1] = tilde(params.p_h);
}

double HeatBath::open_probability(const BondConfig& w, EdgeId e) {
  const int s = g_->sector(e) == Sector::inner ? 0 : 1;
  if (connected_[s] == disconnected_[s]) return connected_[s];
  return probe_.connected_off_edge(w, e) ? connected_[s] : disconnected_[s];
}

void HeatBath::update(BondConfig& w, EdgeId e, double u) { w.set(e, u < open_probability(w, e)); }

void HeatBath::sweep(BondConfig& w, Rng& rng) {
  const auto n = static_cast<EdgeId>(g_->edge_count());
  for (EdgeId e = 0; e < n; ++e) update(w, e, rng.uniform());
}

void HeatBath::sweep(BondConfig& w, std::span<const double> uniforms) {
  const auto n = static_cast<EdgeId>(g_->edge_count());
  for (EdgeId e = 0; e < n; ++e) update(w, e, uniforms[e]);
}

ChainState heat_bath_step(ChainState state, const BoxGraph& g, const ModelParams& params, EdgeId e) {
  if (e >= g.edge_count()) throw std::out_of_range("edge index out of range");
  if (state.config.size() != g.edge_count()) throw std::invalid_argument("configuration not sized for graph");
  const bool inner = g.sector(e) == Sector::inner;
  const double x = inner ? params.p : params.p_h;
  const double tilde = x == 0.0 ? 0.0 : x / (x + params.q * (1.0 - x));
  const double prob = lattice::connected_off_edge(g, state.config, params.bc, e) ? x : tilde;
  state.config.set(e, state.rng.uniform() < prob);
  return state;
}

void sweep(ChainState& state, HeatBath& kernel) {
  kernel.sweep(state.config, state.rng);
  ++state.sweep_count;
}

// ---------------------------------------------------------------------------

BondConfig cftp_sample(const BoxGraph& g, const ModelParams& params, Rng& rng, std::uint64_t t_max) {
  HeatBath kernel(g, params);
  const std::size_t edges = g.edge_count();
  std::vector<std::uint64_t> seeds;  // seeds[t-1] drives the sweep at time -t
  std::vector<double> u(edges);
  for (std::uint64_t t = 2; t <= t_max; t *= 2) {
    while (seeds.size() < t) seeds.push_back(rng.next());
    BondConfig top = BondConfig::all_open(g);
    BondConfig bottom = BondConfig::all_closed(g);
    for (std::uint64_t s = t; s >= 1; --s) {
      Rng step(seeds[s - 1]);
      for (double& x : u) x = step.uniform();
      kernel.sweep(top, u);
      kernel.sweep(bottom, u);
      if (!bottom.precedes(top)) throw std::logic_error("coupled heat-bath chains lost their order");
    }
    if (top == bottom) return top;
  }
  throw CftpTimeout("coupling from the past did not coalesce within " + std::to_string(t_max) + " sweeps");
}

std::vector<int> edwards_sokal_color(const BoxGraph& g, const BondConfig& w, const BoundaryCondition& bc,
                                     double q, Rng& rng) {
  if (q < 2.0 || q != std::floor(q) || q > 1e9)
    throw std::invalid_argument("Edwards-Sokal colouring needs an integer q >= 2");
  const auto labels = lattice::components(g, w, bc);
  std::vector<int> colour(labels.kappa);
  for (std::size_t c = 0; c < labels.kappa; ++c)
    colour[c] = labels.ghost_flag[c] ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(q)));
  std::vector<int> spins(g.vertex_count());
  for (std::size_t v = 0; v < spins.size(); ++v) spins[v] = colour[labels.label[v]];
  return spins;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> run_replica(const BoxGraph& g, const ModelParams& params,
                                const std::function<double(const BondConfig&)>& observable, std::size_t n,
                                const SamplerSettings& sampler, Rng rng) {
  std::vector<double> out;
  out.reserve(n);
  if (const auto* c = std::get_if<CftpSettings>(&sampler)) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(observable(cftp_sample(g, params, rng, c->t_max)));
    return out;
  }
  const auto& hb = std::get<HeatBathSettings>(sampler);
  HeatBath kernel(g, params);
  BondConfig w = BondConfig::all_closed(g);
  for (std::size_t i = 0; i < hb.burn_in; ++i) kernel.sweep(w, rng);
  const std::size_t thin = std::max<std::size_t>(1, hb.thin);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < thin; ++j) kernel.sweep(w, rng);
    out.push_back(observable(w));
  }
  return out;
}

}  // namespace

std::vector<double> sample_observable(const BoxGraph& g, const ModelParams& params,
                                      const std::function<double(const BondConfig&)>& observable,
                                      std::size_t n_samples, const SamplerSettings& sampler, std::uint64_t seed,
                                      RunSettings run) {
  params.bc.validate(g);
  const std::size_t replicas = std::max<std::size_t>(1, std::min(run.replicas, n_samples));
  std::vector<std::vector<double>> slots(replicas);
  std::vector<std::exception_ptr> errors(replicas);
  const Rng master(seed);
  auto job = [&](std::size_t r) {
    const std::size_t n = n_samples / replicas + (r < n_samples % replicas ? 1 : 0);
    try {
      slots[r] = run_replica(g, params, observable, n, sampler, master.replica(r));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  const std::size_t lanes = std::max<std::size_t>(1, std::min(run.threads, replicas));
  if (lanes == 1) {
    for (std::size_t r = 0; r < replicas; ++r) job(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < lanes; ++t)
      pool.emplace_back([&] {
        for (std::size_t r; (r = next++) < replicas;) job(r);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<double> all;
  all.reserve(n_samples);
  for (const auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  return all;
}

Estimate estimate_event(const BoxGraph& g, const ModelParams& params, const EventPredicate& a,
                        std::size_t n_samples, const SamplerSettings& sampler, std::uint64_t seed,
                        RunSettings run) {
  if (n_samples < 2) throw std::invalid_argument("estimate_event needs at least 2 samples");
  const auto xs = sample_observable(
      g, params, [&a](const BondConfig& w) { return a(w) ? 1.0 : 0.0; }, n_samples, sampler, seed, run);
  return batch_means(xs);
}

// ---------------------------------------------------------------------------

bool inner_crossing(const BoxGraph& g, const BondConfig& w, std::span<const Vertex> from,
                    std::span<const Vertex> to) {
  // Label propagation from `from` along open inner edges.
  std::vector<std::uint8_t> reached(g.site_count(), 0);
  std::vector<Vertex> stack;
  for (Vertex v : from)
    if (!reached[v]) {
      reached[v] = 1;
      stack.push_back(v);
    }
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const auto& inc : g.neighbours(v))
      if (w[inc.edge] && !reached[inc.neighbour]) {
        reached[inc.neighbour] = 1;
        stack.push_back(inc.neighbour);
      }
  }
  return std::any_of(to.begin(), to.end(), [&](Vertex v) { return v < g.site_count() && reached[v]; });
}

Estimate annulus_crossing(double p, double q, int k, std::size_t n_samples, std::uint64_t seed, int d,
                          const SamplerSettings& sampler, RunSettings run) {
  if (k < 1) throw std::invalid_argument("annulus crossing needs k >= 1");
  if (n_samples < 2) throw std::invalid_argument("annulus crossing needs at least 2 samples");
  const BoxGraph g = BoxGraph::box(d, 3 * k);
  std::vector<Vertex> inner;
  for (Vertex v = 0; v < g.site_count(); ++v)
    if (g.sup_norm(v) <= k) inner.push_back(v);
  const std::vector<Vertex> outer(g.boundary().begin(), g.boundary().end());
  const ModelParams params(p, q, 0.0, BoundaryCondition::wired());
  const auto xs = sample_observable(
      g, params, [&](const BondConfig& w) { return inner_crossing(g, w, inner, outer) ? 1.0 : 0.0; }, n_samples,
      sampler, seed, run);
  return batch_means(xs);
}

CorrelationFit correlation_length_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("correlation length fit needs at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (auto [x, prob] : points) {
    if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("probabilities must lie in (0,1)");
    const double y = std::log(prob);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw std::invalid_argument("correlation length fit needs distinct sizes");
  CorrelationFit out;
  out.slope = (n * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / n;
  double ss = 0.0;
  for (auto [x, prob] : points) {
    const double r = std::log(prob) - (out.intercept + out.slope * x);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / n);
  out.decays = out.slope < 0.0;
  out.xi = out.decays ? -1.0 / out.slope : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace klab::mc
