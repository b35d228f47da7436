#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "klab/bounds.hpp"
#include "klab/exact.hpp"
#include "klab/rng.hpp"
#include "support/graph_zoo.hpp"

using namespace klab;
using namespace klab::bounds;

namespace {

// Connected n-sets of Z^d containing the origin, by breadth-first growth of
// the set family.
std::uint64_t animals_oracle(int n, int d) {
  using Set = std::set<Point>;
  std::set<Set> level{Set{Point(d, 0)}};
  for (int size = 2; size <= n; ++size) {
    std::set<Set> next;
    for (const auto& s : level)
      for (const auto& x : s)
        for (int i = 0; i < d; ++i)
          for (int dir : {-1, 1}) {
            Point y = x;
            y[i] += dir;
            if (s.count(y)) continue;
            Set t = s;
            t.insert(y);
            next.insert(std::move(t));
          }
    level = std::move(next);
  }
  return level.size();
}

long l1(const Point& a, const Point& b) {
  long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

std::vector<Point> box_points(int d, int k) {
  std::vector<Point> out;
  Point x(d, -k);
  for (;;) {
    out.push_back(x);
    int i = 0;
    while (i < d && ++x[i] > k) x[i++] = -k;
    if (i == d) break;
  }
  return out;
}

double kesten(int d) {
  const double dd = 2.0 * d;
  return dd + (dd + 1) * std::log(dd + 1) - dd * std::log(dd);
}

}  // namespace

TEST_CASE("tanh_q values") {
  for (double q : {1.0, 1.5, 2.0, 10.0}) CHECK(tanh_q(0, q) == 0.0);
  CHECK(tanh_q(1, 2) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(tanh_q(1, 2) == doctest::Approx(0.761594155956).epsilon(1e-11));
  CHECK(tanh_q(0.5, 3) == doctest::Approx((1 - std::exp(-1.0)) / (2 * std::exp(-1.0) + 1)).epsilon(1e-14));
  CHECK(tanh_q(0.5, 3) == doctest::Approx(0.364176).epsilon(1e-6));
  CHECK(tanh_q(0.7, 1) == doctest::Approx(1 - std::exp(-1.4)).epsilon(1e-14));
  CHECK_THROWS_AS(arctanh_q(1.0, 2), std::domain_error);
  CHECK_THROWS_AS(tanh_q(-1.0, 2), std::domain_error);
}

TEST_CASE("tanh_q and arctanh_q are inverse and increasing") {
  for (double q : {1.0, 1.1, 2.0, 3.0, 10.0}) {
    double prev = -1;
    for (double y = 0; y <= 0.999; y += 0.001) {
      const double x = arctanh_q(y, q);
      CHECK(std::abs(tanh_q(x, q) - y) <= 1e-12);
      CHECK(x > prev);
      prev = x;
    }
    for (double x = 0.01; x < 5; x += 0.01) CHECK(tanh_q(x, q) > tanh_q(x - 0.01, q));
  }
}

TEST_CASE("field conversion") {
  CHECK(ph_of_h(0, 2) == 0.0);
  CHECK(ph_of_h(0.5, 2) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(ph_of_h(0.5, 2) == doctest::Approx(0.632121).epsilon(1e-6));
  // Roundtrip while 1 - p_h = exp(-(q/(q-1)) h) keeps at least 12 digits.
  for (double q : {1.01, 1.5, 2.0, 7.0})
    for (double h = 0; q / (q - 1) * h <= 9; h += 0.001 * (q - 1))
      CHECK(std::abs(h_of_ph(ph_of_h(h, q), q) - h) <= 1e-12 * std::max(1.0, h));
  for (double q : {1.01, 1.5, 2.0, 7.0})
    for (double ph = 0; ph <= 0.999; ph += 0.001) CHECK(std::abs(ph_of_h(h_of_ph(ph, q), q) - ph) <= 1e-12);
  CHECK_THROWS_AS(ph_of_h(0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(h_of_ph(0.5, 1.0), std::domain_error);
}

TEST_CASE("planar critical point") {
  CHECK(pc_planar(1) == 0.5);
  CHECK(pc_planar(2) == doctest::Approx(std::sqrt(2.0) / (1 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(pc_planar(2) == doctest::Approx(0.585786).epsilon(1e-6));
  CHECK(qc_planar(0.55) == doctest::Approx(121.0 / 81).epsilon(1e-15));
  for (double q = 1; q < 20; q += 0.5) CHECK(qc_planar(pc_planar(q)) == doctest::Approx(q).epsilon(1e-13));
  CHECK_THROWS_AS(qc_planar(1.0), std::domain_error);
  CHECK_THROWS_AS(pc_planar(0.5), std::domain_error);
}

TEST_CASE("random-cluster upper bound") {
  for (double q : {1.1, 2.0, 10.0}) CHECK(upper_bound_kertesz(pc_planar(q), q, qc_planar) <= 1e-7);
  CHECK(std::isinf(upper_bound_kertesz(0.5, 2, qc_planar)));
  CHECK(upper_bound_kertesz(0.6, 2, qc_planar) == 0.0);
  // The q = 2 specialization.
  for (double p = 0.501; p < pc_planar(2); p += 0.001) {
    const double explicit_form = std::atanh(std::sqrt(2 * (1 - p) * (1 - p) / (p * p) - 1));
    CHECK(std::abs(upper_bound_kertesz(p, 2, qc_planar) - explicit_form) <= 1e-12 * std::max(1.0, explicit_form));
  }
  CHECK(upper_bound_kertesz(0.55, 2, qc_planar) ==
        doctest::Approx(std::atanh(std::sqrt(2 * 0.45 * 0.45 / (0.55 * 0.55) - 1))).epsilon(1e-14));
}

TEST_CASE("Bernoulli upper bound") {
  CHECK(upper_bound_bernoulli(0.55, 2, 0.5) == doctest::Approx(std::atanh(std::sqrt(2 * 0.45 / 0.55 - 1))).epsilon(1e-14));
  for (double p = 0.501; p < 1; p += 0.01) {
    const double rad = 2 * (1 - p) / p - 1;
    const double expect = rad <= 0 ? 0.0 : std::atanh(std::sqrt(rad));
    CHECK(std::abs(upper_bound_bernoulli(p, 2, 0.5) - expect) <= 1e-12 * std::max(1.0, expect));
  }
  // Blows up as p decreases to p_B.
  double prev = 0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const double b = upper_bound_bernoulli(0.5 + eps, 3, 0.5);
    CHECK(b > prev);
    prev = b;
  }
  CHECK(std::isinf(upper_bound_bernoulli(0.5, 3, 0.5)));
  CHECK(std::isinf(upper_bound_bernoulli(0.45, 2, 0.5)));
  // The random-cluster bound is never weaker than the Bernoulli one in d = 2.
  for (double q : {1.1, 2.0, 10.0})
    for (double p = 0.501; p < 0.99; p += 0.01) CHECK(upper_bound_kertesz(p, q, qc_planar) <= upper_bound_bernoulli(p, q, 0.5) + 1e-12);
}

TEST_CASE("coarse-graining constants") {
  const auto m2 = mu_delta(2);
  REQUIRE(m2.ratio.has_value());
  CHECK(m2.ratio->first == 3125);
  CHECK(m2.ratio->second == 256);
  CHECK(m2.mu == 12.20703125);
  CHECK(m2.delta == doctest::Approx(std::exp(-16 * std::log(3125.0 / 256))).epsilon(1e-12));
  CHECK(m2.delta >= 4.0e-18);
  CHECK(m2.delta <= 4.3e-18);
  const auto m3 = mu_delta(3);
  CHECK(m3.ratio->first == 823543);
  CHECK(m3.ratio->second == 46656);
  CHECK(m3.mu == doctest::Approx(17.6514).epsilon(1e-5));
  for (int d = 1; d <= 8; ++d) {
    const auto m = mu_delta(d);
    CHECK(m.mu > 1);
    CHECK(m.log_delta == doctest::Approx(-std::pow(4.0, d) * m.log_mu).epsilon(1e-13));
  }
  CHECK(mu_delta(6).delta == 0.0);  // underflow; log_delta carries the value
}

TEST_CASE("lattice animals") {
  const std::uint64_t expected[] = {1, 4, 18, 76, 315};
  for (int n = 1; n <= 5; ++n) CHECK(lattice_animals(n, 2) == expected[n - 1]);
  const std::uint64_t fixed2[] = {1, 2, 6, 19, 63, 216, 760, 2725, 9910, 36446};
  for (int n = 1; n <= 10; ++n) CHECK(fixed_animals(n, 2) == fixed2[n - 1]);
  const std::uint64_t fixed3[] = {1, 3, 15, 86, 534, 3481, 23502, 162913};
  for (int n = 1; n <= 8; ++n) CHECK(fixed_animals(n, 3) == fixed3[n - 1]);
  for (int n = 1; n <= 6; ++n) CHECK(lattice_animals(n, 2) == animals_oracle(n, 2));
  for (int n = 1; n <= 4; ++n) CHECK(lattice_animals(n, 3) == animals_oracle(n, 3));
  for (int d = 1; d <= 4; ++d) {
    const double mu = mu_delta(d).mu;
    for (int n = 1; n <= (d == 2 ? 10 : 6); ++n)
      CHECK(static_cast<double>(lattice_animals(n, d)) <= std::pow(mu, n));
  }
  CHECK(fixed_animals(6, 1) == 1);
  CHECK_THROWS_AS(lattice_animals(11, 2), std::out_of_range);
  CHECK_THROWS_AS(lattice_animals(3, 0), std::domain_error);
}

TEST_CASE("thin set") {
  const std::vector<Point> origin{{0, 0}};
  CHECK(thin_set(origin) == origin);
  for (int k : {1, 5}) {
    const auto s = box_points(2, k);
    const auto t = thin_set(s);
    CHECK(t.size() * 16 >= s.size());
    if (k == 5) CHECK(t.size() >= 8);
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j) CHECK(l1(t[i], t[j]) >= 4);
  }
  Rng rng(4);
  for (int d = 1; d <= 3; ++d)
    for (int trial = 0; trial < 50; ++trial) {
      std::set<Point> s;
      const int n = 1 + static_cast<int>(rng.below(60));
      while (static_cast<int>(s.size()) < n) {
        Point x(d);
        for (auto& c : x) c = static_cast<long>(rng.below(101)) - 50;
        s.insert(x);
      }
      const std::vector<Point> sv(s.begin(), s.end());
      const auto t = thin_set(sv);
      CHECK(static_cast<double>(t.size()) >= static_cast<double>(sv.size()) / std::pow(4.0, d));
      for (const auto& x : t) CHECK(s.count(x) == 1);
      for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j) CHECK(l1(t[i], t[j]) >= 4);
    }
}

TEST_CASE("expansion threshold") {
  const double base = 4 + 5 * std::log(5.0) - 4 * std::log(4.0);
  CHECK(h0(2, 2) == doctest::Approx(0.5 * (std::numbers::ln2 + base)).epsilon(1e-14));
  CHECK(h0(2, 2) == doctest::Approx(3.597580).epsilon(3e-7));
  CHECK(h0(1.5, 2) == doctest::Approx((std::log(1.5) + base) / 3).epsilon(1e-14));
  CHECK(h0(1.5, 2) == doctest::Approx(2.302493).epsilon(1e-6));
  CHECK(h0(3, 2) == doctest::Approx(2.0 / 3 * (2 * std::numbers::ln2 + base)).epsilon(1e-14));
  CHECK(h0(3, 2) == doctest::Approx(5.258871).epsilon(1e-6));
  // Both branches evaluated at q = 2.
  for (int d = 1; d <= 4; ++d) {
    const double lower = 0.5 * (std::log(2.0) + kesten(d));
    const double upper = 0.5 * (std::numbers::ln2 + std::log(1.0) + kesten(d));
    CHECK(std::abs(lower - upper) <= 1e-12);
    CHECK(std::abs(h0(2, d) - upper) <= 1e-12);
    CHECK(std::abs(h0(2 - 1e-13, d) - h0(2, d)) <= 1e-12);
  }
  CHECK_THROWS_AS(h0(1, 2), std::domain_error);
}

TEST_CASE("expansion convergence") {
  CHECK(expansion_converges(2, 2, 4).converges);
  CHECK_FALSE(expansion_converges(2, 2, 3).converges);
  for (double q : {1.2, 2.0, 3.0, 10.0})
    for (int d = 1; d <= 3; ++d) {
      const double h = h0(q, d);
      CHECK_FALSE(expansion_converges(q, d, h).converges);
      CHECK(expansion_converges(q, d, h * (1 + 1e-9)).converges);
      CHECK_FALSE(expansion_converges(q, d, h * (1 - 1e-9)).converges);
      // The sum bound crosses 1 at h0.
      CHECK(expansion_converges(q, d, h).sum_bound == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("beta inverts the edge weight") {
  for (double q : {1.5, 2.0, 5.0})
    for (double p = 0; p < 1; p += 0.05) {
      const double b = beta_of_p(p, q);
      CHECK(b >= 0);
      CHECK(ph_of_h(b, q) == doctest::Approx(p).epsilon(1e-13));
    }
}

TEST_CASE("polymer weights") {
  for (int d = 1; d <= 3; ++d)
    for (double q : {1.5, 2.0, 4.0})
      for (double p : {0.1, 0.5})
        for (double h : {0.0, 0.3, 2.0}) {
          const auto s = induced_polymer(d, {Point(d, 0)});
          CHECK(edge_boundary_size(s) == static_cast<std::size_t>(2 * d));
          CHECK(polymer_inner_sum(s, p, q) == doctest::Approx(q - 1).epsilon(1e-14));
          const double expect = (q - 1) * std::exp(-(1 + 1 / (q - 1)) * (h + 2 * d * beta_of_p(p, q)));
          CHECK(polymer_weight(s, p, q, h) == doctest::Approx(expect).epsilon(1e-13));
        }
  const auto domino = induced_polymer(2, {{0, 0}, {1, 0}});
  CHECK(edge_boundary_size(domino) == 6);
  CHECK(polymer_inner_sum(domino, 0.3, 3) == doctest::Approx(0.7 * 4 + 0.3 * 2).epsilon(1e-14));
  CHECK(polymer_weight(domino, 0.3, 3, 50.0) < 1e-60);
  CHECK(polymer_weight(domino, 0.3, 3, std::numeric_limits<double>::infinity()) == 0.0);

  Polymer broken{2, {{0, 0}, {2, 0}}, {}};
  CHECK_THROWS_AS(polymer_inner_sum(broken, 0.3, 2), std::domain_error);
  Polymer far{2, {{0, 0}, {2, 0}}, {{0, 1}}};
  CHECK_THROWS_AS(polymer_inner_sum(far, 0.3, 2), std::domain_error);
}

TEST_CASE("polymer inner sum is at most (q-1)^|V| for q >= 2") {
  // Every connected spanning edge subset of every polyomino of at most four
  // cells, compared with a direct sum and with the bound.
  std::set<std::set<Point>> shapes;
  for (int n = 1; n <= 4; ++n) {
    std::set<std::set<Point>> level{{Point{0, 0}}};
    for (int size = 2; size <= n; ++size) {
      std::set<std::set<Point>> next;
      for (const auto& s : level)
        for (const auto& x : s)
          for (int i = 0; i < 2; ++i)
            for (int dir : {-1, 1}) {
              Point y = x;
              y[i] += dir;
              auto t = s;
              if (t.insert(y).second) next.insert(t);
            }
      level = std::move(next);
    }
    shapes.insert(level.begin(), level.end());
  }
  for (const auto& cells : shapes) {
    const auto full = induced_polymer(2, std::vector<Point>(cells.begin(), cells.end()));
    const std::size_t m = full.edges.size();
    const std::size_t n = full.sites.size();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      Polymer s{2, full.sites, {}};
      for (std::size_t e = 0; e < m; ++e)
        if ((mask >> e) & 1u) s.edges.push_back(full.edges[e]);
      klab::UnionFind uf(n);
      for (auto [a, b] : s.edges) uf.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
      if (uf.set_count() != 1) continue;
      for (double q : {2.0, 2.5, 4.0})
        for (double p : {0.1, 0.5, 0.9}) {
          double total = 0;
          for (std::uint32_t sub = 0; sub < (1u << s.edges.size()); ++sub) {
            klab::UnionFind u2(n);
            int open = 0;
            for (std::size_t i = 0; i < s.edges.size(); ++i)
              if ((sub >> i) & 1u) {
                ++open;
                u2.unite(static_cast<std::uint32_t>(s.edges[i].first), static_cast<std::uint32_t>(s.edges[i].second));
              }
            total += std::pow(p, open) * std::pow(1 - p, static_cast<double>(s.edges.size()) - open) *
                     std::pow(q - 1, static_cast<double>(u2.set_count()));
          }
          const double got = polymer_inner_sum(s, p, q);
          CHECK(got == doctest::Approx(total).epsilon(1e-13));
          CHECK(got <= std::pow(q - 1, static_cast<double>(n)) * (1 + 1e-12));
        }
    }
  }
}

TEST_CASE("polymer inner sum agrees with a direct sum on lattice polymers") {
  const auto square = induced_polymer(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  REQUIRE(square.edges.size() == 4);
  CHECK(edge_boundary_size(square) == 8);
  // kappa = 4 - #open unless all four are open (then 1).
  const double p = 0.3, q = 2.5;
  double expect = 0;
  for (int mask = 0; mask < 16; ++mask) {
    const int open = std::popcount(static_cast<unsigned>(mask));
    const int kappa = open == 4 ? 1 : 4 - open;
    expect += std::pow(p, open) * std::pow(1 - p, 4 - open) * std::pow(q - 1, kappa);
  }
  CHECK(polymer_inner_sum(square, p, q) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("conjectured correlation exponent") {
  CHECK(std::abs(nu_conjectured(1) - 4.0 / 3) <= 1e-12);
  CHECK(std::abs(nu_conjectured(2) - 1.0) <= 1e-12);
  CHECK(std::abs(nu_conjectured(4) - 2.0 / 3) <= 1e-12);
  double prev = 10;
  for (double q = 1; q <= 4; q += 0.01) {
    const double v = nu_conjectured(q);
    CHECK(v < prev);
    CHECK(v >= 2.0 / 3 - 1e-12);
    CHECK(v <= 4.0 / 3 + 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(nu_conjectured(4.5), std::domain_error);
}

TEST_CASE("explicit domination condition examples") {
  CHECK(check_eksplicit_condition(0.5, 2, 0.3, 0.5, 2, 0.3).holds);
  const auto r = check_eksplicit_condition(0.5, 2, 0.3, 0.6, 2, 0.3);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->n == 1);
  CHECK(r.witness->m == 1);
  // h2 = 0: the condition reduces to 1/q2 <= (1/q1)((q1-1) t1^2 + 1).
  for (double q1 : {1.5, 2.0, 3.0})
    for (double q2 : {1.2, 2.0, 2.5, 4.0})
      for (double h1 : {0.05, 0.3, 1.0}) {
        const double t = ghost_touch(1, q1, h1);
        const bool expect = 1 / q2 <= (1 / q1) * ((q1 - 1) * t * t + 1) * (1 + 1e-12);
        CHECK(check_eksplicit_condition(0.4, q1, h1, 0.4, q2, 0.0).holds == expect);
      }
  // With the field written through tanh_2 at q = 2.
  CHECK(ghost_touch(1, 2, 0.4) == doctest::Approx(tanh_q(0.4 * 2 / 2.0 * 1.0, 2)).epsilon(1e-14));
  CHECK(ghost_touch(EksplicitWitness::kInfinity, 2, 0.4) == 1.0);
  CHECK(ghost_touch(3, 2, 0.0) == 0.0);
}

TEST_CASE("explicit condition implies domination on small graphs") {
  Rng rng(2024);
  int tried = 0, passed = 0;
  const auto graphs = zoo::by_total_edges(5);
  while (passed < 20 && tried < 2000) {
    ++tried;
    const double p1 = 0.1 + 0.8 * rng.uniform(), q1 = 1.05 + 3 * rng.uniform(), h1 = 1.5 * rng.uniform();
    const double p2 = p1 * (0.7 + 0.3 * rng.uniform()), q2 = 1.05 + 3 * rng.uniform(), h2 = 1.5 * rng.uniform();
    if (!check_eksplicit_condition(p1, q1, h1, p2, q2, h2).holds) continue;
    ++passed;
    const auto upper = exact::ModelParams::from_field(p1, q1, h1);
    const auto lower = exact::ModelParams::from_field(p2, q2, h2);
    for (const auto& sg : graphs) {
      const auto g = sg.box();
      CHECK(exact::domination_bruteforce(g, lower, upper, exact::Scope::inner_edges).dominated);
      CHECK_FALSE(exact::central_inequality(g, upper, lower).has_value());
    }
  }
  CHECK(passed == 20);
}

TEST_CASE("lower-bound pipeline") {
  const auto est = [](double mean, double se, std::size_t n) { return mc::Estimate{mean, se, n, 0.5}; };
  const std::vector<CrossingMeasurement> measured{
      {1, est(0.2, 0.004, 100000)}, {2, est(0.05, 0.001, 100000)}, {3, est(0.012, 0.0004, 100000)},
      {4, est(0.004, 0.0002, 100000)}};
  const auto lb = lower_bound_pipeline(0.55, 2, 2, measured, std::nullopt, 0.01);
  REQUIRE(lb.resolved);
  CHECK(lb.k_star == 4);
  CHECK_FALSE(lb.extrapolated);
  CHECK(lb.ph_threshold == doctest::Approx(1 - std::pow(0.995, 1.0 / 625)).epsilon(1e-10));
  CHECK(lb.ph_threshold == doctest::Approx(8.02e-6).epsilon(1e-3));
  CHECK(lb.h_threshold == doctest::Approx(-0.5 * std::log(1 - lb.ph_threshold)).epsilon(1e-10));

  // True delta: first-order threshold delta / (2 |Lambda_3|).
  const double delta = mu_delta(2).delta;
  const double ph1 = lower_threshold_ph(delta, 1, 2);
  CHECK(ph1 == doctest::Approx(delta / (2 * 49)).epsilon(1e-12));
  CHECK(ph1 == doctest::Approx(4.2e-20).epsilon(0.01));
  const auto fitted = lower_bound_pipeline(0.55, 2, 2, {}, DecayRate{-30, -20});
  REQUIRE(fitted.resolved);
  CHECK(fitted.k_star == 1);
  CHECK(fitted.extrapolated);
  CHECK(fitted.ph_threshold == doctest::Approx(ph1).epsilon(1e-12));

  // No decay.
  const std::vector<CrossingMeasurement> flat{{1, est(0.3, 0.01, 1000)}, {2, est(0.3, 0.01, 1000)},
                                              {3, est(0.31, 0.01, 1000)}};
  const auto none = lower_bound_pipeline(0.55, 2, 2, flat, std::nullopt, 0.01);
  CHECK_FALSE(none.resolved);
  CHECK_FALSE(none.reason.empty());
  CHECK(std::isnan(none.h_threshold));
}

TEST_CASE("pipeline extrapolates beyond the measured radii") {
  const auto est = [](double mean) { return mc::Estimate{mean, mean * 0.01, 1000000, 0.5}; };
  std::vector<CrossingMeasurement> measured;
  for (int k = 1; k <= 4; ++k) measured.push_back({k, est(std::exp(-1.0 - 1.5 * k))});
  const auto lb = lower_bound_pipeline(0.52, 2, 2, measured, std::nullopt, 1e-6);
  REQUIRE(lb.resolved);
  REQUIRE(lb.fit.has_value());
  CHECK(lb.fit->slope == doctest::Approx(-1.5).epsilon(1e-9));
  // log(5e-7) = -14.51; -1 - 1.5 k < -14.51 first at k = 10.
  CHECK(lb.k_star == 10);
  CHECK(lb.extrapolated);
}

TEST_CASE("crossing upper confidence bound") {
  CHECK(crossing_upper_bound({0.0, 0.0, 1000, 0.5}) == doctest::Approx(0.003));
  CHECK(crossing_upper_bound({0.2, 0.01, 1000, 0.5}) == doctest::Approx(0.22));
}

TEST_CASE("bounds report") {
  BoundsInputs in;
  in.rate = DecayRate{-1, -2};
  in.delta_override = 0.01;
  const auto r = make_report(0.55, 2, 2, in);
  CHECK(r.h_upper_rc == doctest::Approx(upper_bound_kertesz(0.55, 2, qc_planar)));
  CHECK(r.h_upper_bern == doctest::Approx(upper_bound_bernoulli(0.55, 2, 0.5)));
  CHECK(r.mu == 12.20703125);
  CHECK(r.lower.resolved);
  CHECK(r.h0 == doctest::Approx(h0(2, 2)));
  // Bracket consistency over a p grid.
  for (double p = 0.505; p < pc_planar(2); p += 0.005) {
    const auto rp = make_report(p, 2, 2, in);
    if (rp.lower.resolved && std::isfinite(rp.h_upper_rc)) CHECK(rp.lower.h_threshold < rp.h_upper_rc);
  }
  // Beyond d = 2 the rc bound needs q_c(p,0).
  const auto r3 = make_report(0.3, 2, 3, {});
  CHECK(std::isnan(r3.h_upper_rc));
  CHECK(std::isnan(r3.h_upper_bern));
  CHECK_FALSE(r3.lower.resolved);

  BoundsInputs bad;
  bad.qc_at_p = 1.99999;
  bad.rate = DecayRate{-1, -2};
  bad.delta_override = 0.99;
  CHECK_THROWS_AS(make_report(0.55, 2, 2, bad), std::logic_error);
}
