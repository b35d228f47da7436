#include <doctest.h>

#include <cmath>
#include <map>

#include "klab/exact.hpp"
#include "klab/upsets.hpp"
#include "support/graph_zoo.hpp"

using namespace klab;
using namespace klab::exact;

namespace {

// Unnormalized weight of w computed from its definition, using the lattice
// module for the component count only.
double weight(const BoxGraph& g, const ModelParams& m, const BondConfig& w) {
  double x = 1.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double pe = g.sector(e) == lattice::Sector::inner ? m.p : m.p_h;
    x *= w[e] ? pe : 1.0 - pe;
  }
  return x * std::pow(m.q, static_cast<double>(lattice::components(g, w, m.bc).kappa));
}

std::vector<double> law_by_definition(const BoxGraph& g, const ModelParams& m) {
  const std::size_t n = std::size_t{1} << g.edge_count();
  std::vector<double> law(n);
  double z = 0;
  for (std::size_t mask = 0; mask < n; ++mask) z += law[mask] = weight(g, m, BondConfig::from_mask(mask, g.edge_count()));
  for (double& x : law) x /= z;
  return law;
}

const std::vector<double> kGrid{0.2, 0.5, 0.8};

}  // namespace

TEST_CASE("partition function examples") {
  const auto g = BoxGraph::custom(1, {});
  for (double q : {1.0, 1.5, 2.0, 3.0})
    for (double ph : {0.1, 0.5, 0.9}) {
      const auto z = partition_function(g, ModelParams(0.5, q, ph));
      CHECK(z.value == doctest::Approx(ph * q + (1 - ph) * q * q).epsilon(1e-13));
      CHECK(z.log_value == doctest::Approx(std::log(z.value)).epsilon(1e-13));
    }
  const auto box = lattice::build_box(2, 1);
  // 21 edges: above 16 edges the tolerance is 1e-9.
  CHECK(partition_function(box, ModelParams(0.3, 1.0, 0.7)).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(partition_function(box, ModelParams(1.0, 2.5, 1.0)).value == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(partition_function(box, ModelParams(1.0, 2.5, 1.0, BoundaryCondition::wired())).value ==
        doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("partition function against the definition") {
  for (const auto& sg : zoo::by_total_edges(7))
    for (double q : {1.0, 2.0, 3.5}) {
      const auto g = sg.box();
      const ModelParams m(0.35, q, 0.6);
      double z = 0;
      for (std::uint64_t mask = 0; mask < (1ull << g.edge_count()); ++mask)
        z += weight(g, m, BondConfig::from_mask(mask, g.edge_count()));
      CHECK(partition_function(g, m).value == doctest::Approx(z).epsilon(1e-12));
    }
}

TEST_CASE("enumeration budget is a hard cap") {
  const auto g = lattice::build_box(2, 2);  // 65 edges
  CHECK_THROWS_AS(partition_function(g, ModelParams(0.5, 2, 0.5)), BudgetExceeded);
  const auto big = BoxGraph::rect({3, 4});  // 17 inner + 12 ghost
  CHECK_THROWS_AS(event_probability(big, ModelParams(0.5, 2, 0.5), EventPredicate::full_space()), BudgetExceeded);
  const auto s = BoxGraph::rect({3, 3});  // 12 + 9 = 21 edges
  CHECK_THROWS_AS(ExactSampler(s, ModelParams(0.5, 2, 0.5)), BudgetExceeded);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams(1.5, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0.5, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0.5, 2, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::from_field(0.5, 1.0, 0.3), std::domain_error);
  const auto m = ModelParams::from_field(0.5, 2.0, 0.5);
  CHECK(m.p_h == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("event probability examples") {
  const auto g = BoxGraph::custom(1, {});
  const auto ghost_open = EventPredicate::edge_open(g.ghost_edge(0));
  for (double q : {1.0, 2.0, 4.0})
    for (double ph : kGrid)
      CHECK(event_probability(g, ModelParams(0.5, q, ph), ghost_open) ==
            doctest::Approx(ph / (ph + q * (1 - ph))).epsilon(1e-13));
  CHECK(event_probability(g, ModelParams(0.5, 2, 0.5), ghost_open) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  const auto box = lattice::build_box(2, 1);
  CHECK(event_probability(box, ModelParams(0.4, 2, 0.3), EventPredicate::full_space()) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("event probability against the definition") {
  for (const auto& sg : zoo::by_total_edges(7)) {
    if (sg.n < 2) continue;
    const auto g = sg.box();
    const auto event = EventPredicate::connected(g, 0, 1, BoundaryCondition::free());
    const ModelParams m(0.45, 2.5, 0.3);
    const auto law = law_by_definition(g, m);
    double expect = 0;
    for (std::size_t mask = 0; mask < law.size(); ++mask)
      if (lattice::components(g, BondConfig::from_mask(mask, g.edge_count()), m.bc).label[0] ==
          lattice::components(g, BondConfig::from_mask(mask, g.edge_count()), m.bc).label[1])
        expect += law[mask];
    CHECK(event_probability(g, m, event) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("monotone flag is verified") {
  const auto g = BoxGraph::custom(2, {{0, 1}});
  EventPredicate bad{"edge 0 closed", [](const BondConfig& w) { return !w[0]; }, true};
  CHECK_THROWS_AS(event_probability(g, ModelParams(0.5, 2, 0.5), bad), std::logic_error);
  bad.monotone = false;
  CHECK_NOTHROW(event_probability(g, ModelParams(0.5, 2, 0.5), bad));
}

TEST_CASE("ghost formula closed forms") {
  for (std::size_t n = 1; n <= 6; ++n)
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      CHECK(ghost_formula(n, q, 0.0) == 0.0);
      CHECK(ghost_formula(n, q, 1.0) == doctest::Approx(1.0));
    }
  for (std::size_t n = 1; n <= 6; ++n)
    for (double ph : kGrid) CHECK(ghost_formula(n, 1.0, ph) == doctest::Approx(1 - std::pow(1 - ph, n)).epsilon(1e-14));
  for (double h : {0.1, 0.5, 1.0, 2.0})
    CHECK(ghost_formula(1, 2.0, 1 - std::exp(-2 * h)) == doctest::Approx(std::tanh(h)).epsilon(1e-13));
}

TEST_CASE("ghost oracle equals the closed form on every cluster") {
  for (const auto& sg : zoo::connected_up_to(4)) {
    const auto g = sg.box();
    const std::size_t m = g.inner_edge_count();
    for (double q : {1.0, 2.0, 3.0})
      for (double ph : {0.1, 0.5, 0.9}) {
        const ModelParams params(0.5, q, ph);
        for (std::uint64_t inner = 0; inner < (1ull << m); ++inner) {
          const auto w = BondConfig::from_mask(inner, g.edge_count());
          const auto clusters = inner_clusters(g, w, params.bc);
          for (std::size_t c = 0; c < clusters.size(); ++c)
            CHECK(std::abs(ghost_conditional_oracle(g, params, w, c) - ghost_formula(clusters[c].size(), q, ph)) <=
                  1e-12);
        }
      }
  }
}

TEST_CASE("ghost oracle on a 2x2 block") {
  const auto g = BoxGraph::rect({2, 2});
  Rng rng(17);
  const ModelParams params(0.5, 3.0, 0.4);
  for (int trial = 0; trial < 16; ++trial) {
    BondConfig w(g.edge_count());
    for (EdgeId e = 0; e < g.inner_edge_count(); ++e) w.set(e, rng.uniform() < 0.5);
    const auto clusters = inner_clusters(g, w, params.bc);
    for (std::size_t c = 0; c < clusters.size(); ++c)
      CHECK(std::abs(ghost_conditional_oracle(g, params, w, c) - ghost_formula(clusters[c].size(), 3.0, 0.4)) <= 1e-12);
  }
}

TEST_CASE("clusters reach the ghost independently") {
  const auto g = BoxGraph::custom(4, {{0, 1}});
  const auto w = BondConfig::from_mask(0b1, g.edge_count());
  for (double q : {1.5, 2.0, 3.0})
    for (double ph : kGrid) {
      const ModelParams params(0.5, q, ph);
      const auto clusters = inner_clusters(g, w, params.bc);
      REQUIRE(clusters.size() == 3);
      const std::size_t pair[] = {1, 2};
      const std::size_t all[] = {0, 1, 2};
      const double a = ghost_conditional_oracle(g, params, w, 0);
      const double b = ghost_conditional_oracle(g, params, w, 1);
      const double c = ghost_conditional_oracle(g, params, w, 2);
      CHECK(ghost_joint_oracle(g, params, w, pair) == doctest::Approx(b * c).epsilon(1e-12));
      CHECK(ghost_joint_oracle(g, params, w, all) == doctest::Approx(a * b * c).epsilon(1e-12));
    }
}

TEST_CASE("Edwards-Sokal identity") {
  for (int q : {2, 3})
    for (const auto& sg : zoo::connected_up_to(4)) {
      if (sg.n < 2) continue;
      const auto g = sg.box();
      for (double beta : {0.0, 0.3, 0.8})
        for (double h : {0.0, 0.1, 0.5}) {
          const auto r = edwards_sokal_check(g, BoundaryCondition::free(), beta, h, q, 0, static_cast<Vertex>(sg.n - 1));
          CHECK(std::abs(r.potts - r.random_cluster) <= 1e-10);
          const auto rg = edwards_sokal_check(g, BoundaryCondition::free(), beta, h, q, 0, g.ghost());
          CHECK(std::abs(rg.potts - rg.random_cluster) <= 1e-10);
        }
    }
}

TEST_CASE("Edwards-Sokal identity under wired boundary") {
  const auto g = lattice::build_box(2, 1);
  for (int q : {2, 3})
    for (double h : {0.0, 0.2}) {
      const Vertex centre = g.site_at(std::vector<int>{0, 0});
      const auto r = edwards_sokal_check(g, BoundaryCondition::wired(), 0.4, h, q, centre, g.boundary()[0]);
      CHECK(std::abs(r.potts - r.random_cluster) <= 1e-10);
    }
}

TEST_CASE("Potts two-point examples") {
  const auto pair = BoxGraph::custom(2, {});
  CHECK(potts_two_point(pair, BoundaryCondition::free(), 0, 0, 3, 0, 1) == doctest::Approx(0.0).epsilon(1e-14));
  const auto edge = BoxGraph::custom(2, {{0, 1}});
  for (double beta : {0.1, 0.5, 1.3})
    CHECK(potts_two_point(edge, BoundaryCondition::free(), beta, 0, 2, 0, 1) ==
          doctest::Approx(std::tanh(beta)).epsilon(1e-12));
  const auto path = BoxGraph::custom(3, {{0, 1}, {1, 2}});
  const auto r = edwards_sokal_check(path, BoundaryCondition::free(), 0.3, 0.1, 3, 0, 2);
  CHECK(std::abs(r.potts - r.random_cluster) <= 1e-10);
  CHECK_THROWS_AS(potts_two_point(edge, BoundaryCondition::free(), 0.3, 0, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("covariance derivatives match finite differences") {
  const double step = 1e-5;
  auto fd = [&](const BoxGraph& g, ModelParams m, const EventPredicate& a, Direction which) {
    auto at = [&](double delta) {
      ModelParams x = m;
      if (which == Direction::p) x.p += delta;
      if (which == Direction::p_h) x.p_h += delta;
      if (which == Direction::q) x.q += delta;
      return event_probability(g, x, a);
    };
    return (at(step) - at(-step)) / (2 * step);
  };
  for (const auto& sg : zoo::by_total_edges(6)) {
    if (sg.n < 2) continue;
    const auto g = sg.box();
    const std::vector<EventPredicate> events{EventPredicate::connected(g, 0, 1, BoundaryCondition::free()),
                                             EventPredicate::edge_open(g.ghost_edge(0)),
                                             EventPredicate::inner_connected(g, 0, 1)};
    for (const auto& a : events)
      for (double q : {1.5, 2.0, 3.0}) {
        const ModelParams m(0.4, q, 0.3);
        for (auto which : {Direction::p, Direction::p_h, Direction::q})
          CHECK(std::abs(deriv_event(g, m, a, which) - fd(g, m, a, which)) <= 1e-6);
      }
  }
}

TEST_CASE("derivative signs and degenerate inputs") {
  const auto g = lattice::build_box(2, 1);
  const ModelParams m(0.4, 2.0, 0.2);
  const Vertex centre = g.site_at(std::vector<int>{0, 0});
  const auto full = EventPredicate::full_space();
  for (auto which : {Direction::p, Direction::p_h, Direction::q})
    CHECK(std::abs(deriv_event(g, m, full, which)) <= 1e-12);
  const auto reach = EventPredicate::inner_reaches_boundary(g, centre);
  CHECK(deriv_event(g, m, reach, Direction::p) >= 0);
  CHECK(deriv_event(g, m, reach, Direction::p_h) >= 0);
  CHECK(deriv_event(g, m, reach, Direction::q) <= 0);
  CHECK_THROWS_AS(deriv_event(g, ModelParams(0.0, 2, 0.2), reach, Direction::p), std::invalid_argument);
  CHECK_THROWS_AS(deriv_event(g, ModelParams(0.4, 2, 1.0), reach, Direction::p_h), std::invalid_argument);
  CHECK_THROWS_AS(deriv_event(g, ModelParams(0.4, 1, 0.2), reach, Direction::q), std::invalid_argument);
}

TEST_CASE("monotone events move the right way on every small graph") {
  for (const auto& sg : zoo::by_total_edges(4)) {
    const auto g = sg.box();
    const unsigned s = static_cast<unsigned>(g.edge_count());
    std::vector<EdgeId> scope(s);
    for (unsigned i = 0; i < s; ++i) scope[i] = i;
    for (auto family : all_upsets(s)) {
      const auto a = EventPredicate::upset(scope, family);
      const ModelParams m(0.4, 2.5, 0.3);
      CHECK(deriv_event(g, m, a, Direction::p) >= -1e-12);
      CHECK(deriv_event(g, m, a, Direction::p_h) >= -1e-12);
      CHECK(deriv_event(g, m, a, Direction::q) <= 1e-12);
    }
  }
}

TEST_CASE("gamma constants") {
  const auto g = eval_gamma(0.5, 2, 0.5, 2);
  CHECK(g.gamma_prime == doctest::Approx((0.5 - 1.0 / 3) * (1.0 / 3) * 0.125).epsilon(1e-13));
  CHECK(g.gamma == doctest::Approx(4 / g.gamma_prime).epsilon(1e-13));
  CHECK(g.gamma == doctest::Approx(576).epsilon(1e-12));
  CHECK(eval_gamma(0.5, 1 + 1e-9, 0.5, 2).gamma > 1e8);
  double prev = eval_gamma(0.1, 2, 0.5, 2).gamma_prime;
  for (double p = 0.2; p < 0.95; p += 0.1) {
    const double now = eval_gamma(p, 2, 0.5, 2).gamma_prime;
    CHECK(now < prev);
    prev = now;
  }
  CHECK_THROWS_AS(eval_gamma(0, 2, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(eval_gamma(0.5, 1, 0.5, 2), std::invalid_argument);
}

TEST_CASE("gamma bounds the p-derivative by the field derivative") {
  for (const auto& sg : zoo::lattice_shapes(3)) {
    const auto g = sg.box();
    const unsigned s = static_cast<unsigned>(g.edge_count());
    if (s > 5) continue;
    std::vector<EdgeId> scope(s);
    for (unsigned i = 0; i < s; ++i) scope[i] = i;
    for (double p : kGrid)
      for (double q : {1.5, 2.0, 4.0})
        for (double ph : kGrid) {
          const ModelParams m(p, q, ph);
          const double gamma = eval_gamma(p, q, ph, 2).gamma;
          for (auto family : all_upsets(s)) {
            const auto a = EventPredicate::upset(scope, family);
            const double dp = deriv_event(g, m, a, Direction::p);
            const double dh = deriv_event(g, m, a, Direction::p_h);
            CHECK(dp <= gamma * dh + 1e-12);
          }
        }
  }
}

TEST_CASE("FKG on every small graph") {
  for (const auto& sg : zoo::by_total_edges(5)) {
    const auto g = sg.box();
    const unsigned s = static_cast<unsigned>(g.edge_count());
    const auto ups = all_upsets(s);
    std::vector<EdgeId> scope(s);
    for (unsigned i = 0; i < s; ++i) scope[i] = i;
    for (double p : kGrid)
      for (double q : {1.0, 2.0, 5.0}) {
        const auto law = marginal_law(g, ModelParams(p, q, 0.3), scope);
        // Mass of a family by 16-bit halves.
        std::vector<double> lo(1 << 16, 0.0), hi(1 << 16, 0.0);
        for (std::size_t f = 1; f < lo.size(); ++f) {
          const int b = std::countr_zero(f);
          lo[f] = lo[f & (f - 1)] + (b < static_cast<int>(law.size()) ? law[b] : 0.0);
          hi[f] = hi[f & (f - 1)] + (b + 16 < static_cast<int>(law.size()) ? law[b + 16] : 0.0);
        }
        auto mass = [&](std::uint64_t f) { return lo[f & 0xffff] + hi[(f >> 16) & 0xffff]; };
        std::size_t violations = 0;
        for (auto a : ups)
          for (auto b : ups)
            if (mass(a & b) < mass(a) * mass(b) - 1e-12) ++violations;
        CHECK(violations == 0);
      }
  }
}

TEST_CASE("domain Markov property on nested blocks") {
  // G is Lambda_1; H is the 2x2 corner block with its four ghost edges. The
  // boundary of H is the set of its sites with a neighbour outside H or on
  // the boundary of G, plus the ghost.
  const auto g = lattice::build_box(2, 1);
  const std::vector<std::vector<int>> corner{{-1, -1}, {-1, 0}, {0, -1}, {0, 0}};
  std::vector<Vertex> sites;
  std::map<Vertex, Vertex> local;
  for (const auto& c : corner) {
    local[g.site_at(c)] = static_cast<Vertex>(sites.size());
    sites.push_back(g.site_at(c));
  }
  std::vector<lattice::Edge> h_inner;
  std::vector<EdgeId> to_g;  // H edge index -> G edge index
  for (EdgeId e = 0; e < g.inner_edge_count(); ++e) {
    const auto [u, v] = g.edge(e);
    if (local.count(u) && local.count(v)) {
      h_inner.push_back({local[u], local[v]});
      to_g.push_back(e);
    }
  }
  for (Vertex s : sites) to_g.push_back(g.ghost_edge(s));
  std::vector<Vertex> h_boundary;
  for (Vertex s : sites) {
    bool outer = g.is_boundary(s);
    for (const auto& inc : g.neighbours(s)) outer = outer || !local.count(inc.neighbour);
    if (outer) h_boundary.push_back(local[s]);
  }
  h_boundary.push_back(static_cast<Vertex>(sites.size()));
  const auto h = BoxGraph::custom(sites.size(), h_inner, h_boundary);
  REQUIRE(h.edge_count() == to_g.size());

  std::vector<char> in_h(g.edge_count(), 0);
  for (EdgeId e : to_g) in_h[e] = 1;
  std::vector<EdgeId> outside;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (!in_h[e]) outside.push_back(e);

  Rng rng(23);
  for (const auto& outer_bc : {BoundaryCondition::free(), BoundaryCondition::wired()})
    for (int trial = 0; trial < 12; ++trial) {
      const ModelParams gm(0.2 + 0.6 * rng.uniform(), 1 + 3 * rng.uniform(), 0.8 * rng.uniform(), outer_bc);
      BondConfig out(g.edge_count());
      for (EdgeId e : outside) out.set(e, rng.uniform() < 0.5);

      // Boundary partition of H induced by the outside configuration.
      const auto cl = lattice::components(g, out, outer_bc);
      std::map<std::uint32_t, std::vector<Vertex>> by_label;
      for (Vertex b : h_boundary) {
        const Vertex gv = b == sites.size() ? g.ghost() : sites[b];
        by_label[cl.label[gv]].push_back(b);
      }
      std::vector<std::vector<Vertex>> blocks;
      for (auto& [lab, blk] : by_label) blocks.push_back(blk);
      const ModelParams hm(gm.p, gm.q, gm.p_h, BoundaryCondition::partition(blocks));
      const auto expect = marginal_law(h, hm, scope_edges(h, Scope::all_edges));

      std::vector<double> cond(std::size_t{1} << h.edge_count());
      double z = 0;
      for (std::size_t mask = 0; mask < cond.size(); ++mask) {
        auto w = out;
        for (std::size_t i = 0; i < to_g.size(); ++i) w.set(to_g[i], (mask >> i) & 1u);
        z += cond[mask] = weight(g, gm, w);
      }
      double worst = 0;
      for (std::size_t mask = 0; mask < cond.size(); ++mask)
        worst = std::max(worst, std::abs(cond[mask] / z - expect[mask]));
      CHECK(worst <= 1e-12);
    }
}

TEST_CASE("domination examples") {
  for (const auto& sg : zoo::by_total_edges(5)) {
    const auto g = sg.box();
    const ModelParams m(0.4, 2.0, 0.3);
    CHECK(domination_bruteforce(g, m, m).dominated);
    CHECK(domination_bruteforce(g, m, ModelParams(0.5, 1.5, 0.4)).dominated);
    const double pt = 0.4 / (0.4 + 2 * 0.6), pht = 0.3 / (0.3 + 2 * 0.7);
    CHECK(domination_bruteforce(g, ModelParams(pt, 1, pht), m).dominated);
    CHECK(domination_bruteforce(g, m, ModelParams(0.4, 1, 0.3)).dominated);
  }
  // Lowering p strictly never dominates a graph with an inner edge.
  const auto g = BoxGraph::custom(2, {{0, 1}});
  const auto r = domination_bruteforce(g, ModelParams(0.5, 2, 0.3), ModelParams(0.4, 2, 0.3));
  CHECK_FALSE(r.dominated);
  REQUIRE(r.counterexample.has_value());
  CHECK(is_upset(*r.counterexample, 3));
  CHECK(r.worst_gap > 0);
}

TEST_CASE("domination budget") {
  const auto g = BoxGraph::custom(3, {{0, 1}, {1, 2}, {0, 2}});  // 6 edges
  const ModelParams m(0.4, 2, 0.3);
  CHECK_THROWS_AS(domination_bruteforce(g, m, m), BudgetExceeded);
  CHECK(domination_bruteforce(g, m, m, Scope::all_edges, true).dominated);
  CHECK(domination_bruteforce(g, m, m, Scope::inner_edges).dominated);
}

TEST_CASE("exact sampler matches the law") {
  const auto g = BoxGraph::custom(2, {{0, 1}});
  Rng rng(99);
  const ModelParams m(0.6, 2, 0.3);
  const ExactSampler sampler(g, m);
  const auto law = law_by_definition(g, m);
  for (std::size_t mask = 0; mask < law.size(); ++mask) CHECK(sampler.probability(mask) == doctest::Approx(law[mask]));
  const int n = 100000;
  std::vector<double> freq(g.edge_count(), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto w = sampler.draw(rng);
    for (EdgeId e = 0; e < g.edge_count(); ++e) freq[e] += w[e];
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double pe = event_probability(g, m, EventPredicate::edge_open(e));
    CHECK(std::abs(freq[e] / n - pe) <= 3 * std::sqrt(pe * (1 - pe) / n));
  }
}

TEST_CASE("sampler degenerate cases") {
  const auto g = BoxGraph::custom(3, {{0, 1}, {1, 2}});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(sample_chain(g, ModelParams(1, 3, 1), rng) == BondConfig::all_open(g));
  // q = 1: edges independent with their own parameters.
  const ExactSampler s(g, ModelParams(0.3, 1, 0.7));
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    double expect = 1;
    for (EdgeId e = 0; e < 5; ++e) {
      const double pe = e < 2 ? 0.3 : 0.7;
      expect *= (mask >> e) & 1 ? pe : 1 - pe;
    }
    CHECK(s.probability(mask) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("conditional connection through the ghost") {
  const auto g = BoxGraph::custom(2, {{0, 1}});
  const auto w = BondConfig::all_closed(g);
  for (double q : {1.5, 2.0, 3.0})
    for (double ph : kGrid) {
      const ModelParams m(0.5, q, ph);
      const double t = ghost_formula(1, q, ph);
      CHECK(conditional_connection(g, m, w, 0, 1) == doctest::Approx(t * t).epsilon(1e-13));
    }
}

TEST_CASE("central inequality for ordered parameters") {
  for (const auto& sg : zoo::by_total_edges(5)) {
    const auto g = sg.box();
    CHECK_FALSE(central_inequality(g, ModelParams(0.5, 2, 0.3), ModelParams(0.5, 2, 0.3)).has_value());
    CHECK_FALSE(central_inequality(g, ModelParams(0.6, 2, 0.4), ModelParams(0.5, 2.5, 0.3)).has_value());
  }
  const auto g = BoxGraph::custom(2, {{0, 1}});
  const auto v = central_inequality(g, ModelParams(0.5, 2, 0.3), ModelParams(0.6, 2, 0.3));
  REQUIRE(v.has_value());
  CHECK(v->lhs > v->rhs);
}
