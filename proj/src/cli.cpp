#include "klab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "klab/bounds.hpp"
#include "klab/exact.hpp"
#include "klab/kertesz.hpp"
#include "klab/mc.hpp"
#include "klab/report.hpp"
#include "klab/upsets.hpp"

namespace klab::cli {

namespace {

using report::Json;
using report::Metadata;

constexpr const char* kVersion = "1.0.0";

class Invalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>)
        out.push_back(std::stoi(item, &used));
      else
        out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Invalid(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw Invalid(std::string(what) + " list is empty");
  return out;
}

// key=value lines, '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Invalid("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Invalid(path + ":" + std::to_string(lineno) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

struct Output {
  std::string path;
  std::string format;

  template <class F>
  void emit(std::ostream& fallback, F&& write) const {
    if (path.empty() || path == "-") {
      write(fallback);
      return;
    }
    std::ofstream f(path);
    if (!f) throw Invalid("cannot open output file " + path);
    write(f);
  }
};

std::size_t thread_budget(int flag) {
  if (flag > 0) return static_cast<std::size_t>(flag);
  if (const char* env = std::getenv("KERTESZ_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw Invalid("KERTESZ_LAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return 1;
}

lattice::BoundaryCondition parse_bc(const std::string& s) {
  if (s == "free") return lattice::BoundaryCondition::free();
  if (s == "wired") return lattice::BoundaryCondition::wired();
  throw Invalid("boundary condition must be free or wired");
}

lattice::BoxGraph parse_graph(int d, int size, const std::string& shape) {
  if (!shape.empty()) return lattice::BoxGraph::rect(parse_list<int>(shape, "shape"));
  return lattice::BoxGraph::box(d, size);
}

exact::EventPredicate parse_event(const lattice::BoxGraph& g, const std::string& spec,
                                  const lattice::BoundaryCondition& bc) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto vertex = [&](int v) {
    if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) throw Invalid("vertex out of range in event");
    return static_cast<lattice::Vertex>(v);
  };
  if (kind == "full") return exact::EventPredicate::full_space();
  if (kind == "edge") {
    const auto e = parse_list<int>(arg, "edge");
    if (e.size() != 1 || e[0] < 0 || static_cast<std::size_t>(e[0]) >= g.edge_count())
      throw Invalid("edge event needs one valid edge index");
    return exact::EventPredicate::edge_open(static_cast<lattice::EdgeId>(e[0]));
  }
  if (kind == "connected" || kind == "inner_connected") {
    const auto xy = parse_list<int>(arg, "vertex");
    if (xy.size() != 2) throw Invalid("connection events need two vertices x,y");
    if (kind == "connected") return exact::EventPredicate::connected(g, vertex(xy[0]), vertex(xy[1]), bc);
    return exact::EventPredicate::inner_connected(g, vertex(xy[0]), vertex(xy[1]));
  }
  if (kind == "reaches_boundary") {
    const auto x = parse_list<int>(arg, "vertex");
    if (x.size() != 1) throw Invalid("reaches_boundary needs one vertex");
    return exact::EventPredicate::inner_reaches_boundary(g, vertex(x[0]));
  }
  throw Invalid("unknown event '" + spec + "'");
}

Json graph_json(const lattice::BoxGraph& g) {
  Json j;
  j["d"] = g.dim();
  j["extents"] = std::vector<int>(g.extents().begin(), g.extents().end());
  j["radius"] = g.radius();
  j["sites"] = g.site_count();
  j["inner_edges"] = g.inner_edge_count();
  j["ghost_edges"] = g.ghost_edge_count();
  return j;
}

// Field h (or p_h directly) to ModelParams.
exact::ModelParams make_params(double p, double q, double h, double ph, lattice::BoundaryCondition bc) {
  if (ph >= 0.0) return exact::ModelParams(p, q, ph, std::move(bc));
  if (h == 0.0) return exact::ModelParams(p, q, 0.0, std::move(bc));
  if (q == 1.0) throw Invalid("q = 1 has no field translation; pass --ph instead of --h");
  return exact::ModelParams::from_field(p, q, h, std::move(bc));
}

// ---------------------------------------------------------------------------

struct Common {
  double p = 0.5;
  double q = 2.0;
  double h = 0.0;
  int d = 2;
  std::uint64_t seed = 1;
  int threads = 0;
  Output out;
  std::string config;
};

void add_common(CLI::App* sub, Common& c, const char* default_format, bool with_p = true) {
  if (with_p) {
    sub->add_option("--p", c.p, "inner edge parameter p in [0,1]");
    sub->add_option("--q", c.q, "cluster weight q >= 1");
  }
  sub->add_option("--d", c.d, "lattice dimension");
  sub->add_option("--seed", c.seed, "master seed; replica r uses seed + r");
  sub->add_option("--threads", c.threads, "thread budget (fallback: KERTESZ_LAB_THREADS, then 1)");
  sub->add_option("--out", c.out.path, "output file (default stdout)");
  c.out.format = default_format;
  sub->add_option("--format", c.out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--config", c.config, "key=value file; flags override it");
}

Metadata metadata(const CLI::App* sub) {
  Metadata m;
  m["subcommand"] = sub->get_name();
  m["version"] = kVersion;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--config") continue;
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    m[key] = value;
  }
  if (auto it = m.find("threads"); it != m.end()) it->second = std::to_string(thread_budget(std::stoi(it->second)));
  return m;
}

// ---------------------------------------------------------------------------

int cmd_bounds(const Common& c, const CLI::App* sub, std::ostream& out, double qc, double pb,
               double delta_override, std::size_t samples, const std::string& ks, double p2, double q2, double h2,
               long nmax) {
  bounds::BoundsInputs in;
  if (qc > 0) in.qc_at_p = qc;
  if (pb > 0) in.p_bernoulli = pb;
  if (delta_override > 0) in.delta_override = delta_override;
  const std::size_t threads = thread_budget(c.threads);
  if (samples > 0) {
    const auto klist = parse_list<int>(ks, "k");
    for (std::size_t i = 0; i < klist.size(); ++i)
      in.crossings.push_back({klist[i], mc::annulus_crossing(c.p, c.q, klist[i], samples,
                                                             c.seed + 0x5bd1e995ull * (i + 1), c.d,
                                                             mc::HeatBathSettings{}, {4, threads})});
  }
  const auto r = bounds::make_report(c.p, c.q, c.d, in);
  Metadata meta = metadata(sub);
  meta["threads"] = std::to_string(threads);

  Json result = report::to_json(r);
  if (!in.crossings.empty()) {
    Json cr = Json::array();
    for (const auto& m : in.crossings) {
      Json e = report::to_json(m.crossing);
      e["k"] = m.k;
      cr.push_back(e);
    }
    result["crossings"] = cr;
  }
  if (p2 >= 0) {
    const auto ek = bounds::check_eksplicit_condition(c.p, c.q, c.h, p2, q2, h2, nmax);
    Json e;
    e["holds"] = ek.holds;
    if (ek.witness) {
      auto side = [](long n) { return n == bounds::EksplicitWitness::kInfinity ? Json("inf") : Json(n); };
      e["witness"] = {side(ek.witness->n), side(ek.witness->m)};
    }
    result["eksplicit"] = e;
  }
  c.out.emit(out, [&](std::ostream& os) {
    if (c.out.format == "json") {
      report::write_json(os, meta, result);
    } else {
      report::CsvTable t(report::kBoundsHeader);
      t.add(report::bounds_csv_row(r));
      t.write(os, meta);
    }
  });
  if (samples > 0 && !r.lower.resolved) throw Unresolved("lower bound unresolved: " + r.lower.reason);
  return kOk;
}

int cmd_curve(const Common& c, const CLI::App* sub, std::ostream& out, const std::string& kind,
              const std::string& qs, double pmin, double pmax, double qmin, double qmax, int points) {
  if (points < 2) throw Invalid("--points must be at least 2");
  const Metadata meta = metadata(sub);
  if (kind == "upper") {
    if (!(pmin > 0 && pmax < 1 && pmin < pmax)) throw Invalid("need 0 < pmin < pmax < 1");
    report::CsvTable t({"q", "p", "h_upper_rc", "h_upper_bern"});
    Json rows = Json::array();
    for (double q : parse_list<double>(qs, "q")) {
      for (int i = 0; i < points; ++i) {
        const double p = pmin + (pmax - pmin) * i / (points - 1);
        const double rc = bounds::upper_bound_kertesz(p, q, bounds::qc_planar);
        const double bern = bounds::upper_bound_bernoulli(p, q, 0.5);
        t.add({report::num(q), report::num(p), report::num(rc), report::num(bern)});
        rows.push_back({{"q", report::json_num(q)},
                        {"p", report::json_num(p)},
                        {"h_upper_rc", report::json_num(rc)},
                        {"h_upper_bern", report::json_num(bern)}});
      }
    }
    c.out.emit(out, [&](std::ostream& os) {
      if (c.out.format == "json") report::write_json(os, meta, rows);
      else t.write(os, meta);
    });
    return kOk;
  }
  if (kind == "h0") {
    if (!(qmin > 1 && qmin < qmax)) throw Invalid("need 1 < qmin < qmax");
    report::CsvTable t({"q", "h0"});
    Json rows = Json::array();
    for (int i = 0; i < points; ++i) {
      const double q = qmin + (qmax - qmin) * i / (points - 1);
      const double v = bounds::h0(q, c.d);
      t.add({report::num(q), report::num(v)});
      rows.push_back({{"q", report::json_num(q)}, {"h0", report::json_num(v)}});
    }
    c.out.emit(out, [&](std::ostream& os) {
      if (c.out.format == "json") report::write_json(os, meta, rows);
      else t.write(os, meta);
    });
    return kOk;
  }
  throw Invalid("--kind must be upper or h0");
}

int cmd_exact(const Common& c, const CLI::App* sub, std::ostream& out, int size, const std::string& shape,
              double ph, const std::string& bc_name, const std::string& event, bool derivs) {
  const auto g = parse_graph(c.d, size, shape);
  const auto bc = parse_bc(bc_name);
  const auto params = make_params(c.p, c.q, c.h, ph, bc);
  const auto a = parse_event(g, event, bc);
  Json result;
  result["graph"] = graph_json(g);
  result["params"] = report::to_json(params);
  result["event"] = a.name;
  result["value"] = report::json_num(exact::event_probability(g, params, a));
  result["log_z"] = report::json_num(exact::partition_function(g, params).log_value);
  if (derivs) {
    auto try_deriv = [&](exact::Direction dir) -> Json {
      try {
        return report::json_num(exact::deriv_event(g, params, a, dir));
      } catch (const std::invalid_argument&) {
        return nullptr;
      }
    };
    result["deriv_p"] = try_deriv(exact::Direction::p);
    result["deriv_ph"] = try_deriv(exact::Direction::p_h);
    result["deriv_q"] = try_deriv(exact::Direction::q);
  }
  const Metadata meta = metadata(sub);
  c.out.emit(out, [&](std::ostream& os) {
    if (c.out.format == "json") {
      report::write_json(os, meta, result);
    } else {
      report::CsvTable t({"event", "value", "log_z"});
      t.add({a.name, result["value"].dump(), result["log_z"].dump()});
      t.write(os, meta);
    }
  });
  return kOk;
}

int cmd_sample(const Common& c, const CLI::App* sub, std::ostream& out, int size, const std::string& shape,
               double ph, const std::string& bc_name, const std::string& event, std::size_t samples,
               const std::string& sampler_name, std::size_t burn_in, std::size_t thin, std::size_t replicas,
               std::size_t emit_configs) {
  const auto g = parse_graph(c.d, size, shape);
  const auto bc = parse_bc(bc_name);
  const auto params = make_params(c.p, c.q, c.h, ph, bc);
  const auto a = parse_event(g, event, bc);
  mc::SamplerSettings sampler;
  if (sampler_name == "cftp") sampler = mc::CftpSettings{};
  else if (sampler_name == "heat_bath") sampler = mc::HeatBathSettings{burn_in, thin};
  else throw Invalid("--sampler must be cftp or heat_bath");
  const std::size_t threads = thread_budget(c.threads);
  Metadata meta = metadata(sub);
  meta["threads"] = std::to_string(threads);

  if (emit_configs > 0) {
    // One chain (replica 0), configurations in sampling order.
    report::CsvTable t({"sample", "config_hex"});
    Rng rng(c.seed);
    if (sampler_name == "cftp") {
      for (std::size_t i = 0; i < emit_configs; ++i)
        t.add({std::to_string(i), mc::cftp_sample(g, params, rng).to_hex()});
    } else {
      mc::HeatBath kernel(g, params);
      auto w = lattice::BondConfig::all_closed(g);
      for (std::size_t i = 0; i < burn_in; ++i) kernel.sweep(w, rng);
      for (std::size_t i = 0; i < emit_configs; ++i) {
        for (std::size_t j = 0; j < std::max<std::size_t>(1, thin); ++j) kernel.sweep(w, rng);
        t.add({std::to_string(i), w.to_hex()});
      }
    }
    c.out.emit(out, [&](std::ostream& os) { t.write(os, meta); });
    return kOk;
  }

  const auto est = mc::estimate_event(g, params, a, samples, sampler, c.seed, {replicas, threads});
  Json result = report::to_json(est, c.seed, report::to_json(params));
  result["event"] = a.name;
  result["graph"] = graph_json(g);
  c.out.emit(out, [&](std::ostream& os) {
    if (c.out.format == "json") {
      report::write_json(os, meta, result);
    } else {
      report::CsvTable t({"event", "mean", "stderr", "n", "tau", "seed"});
      t.add({a.name, report::num(est.mean), report::num(est.std_error), std::to_string(est.n_samples),
             report::num(est.tau), std::to_string(c.seed)});
      t.write(os, meta);
    }
  });
  return kOk;
}

int cmd_scan(const Common& c, const CLI::App* sub, std::ostream& out, std::ostream& err, const std::string& ps,
             kertesz::ScanSettings s, const std::string& sizes, const std::string& ks, std::size_t replicas,
             std::size_t burn_in, std::size_t thin) {
  s.hc.sizes = parse_list<int>(sizes, "sizes");
  s.lower_ks = parse_list<int>(ks, "k");
  s.hc.seed = c.seed;
  const std::size_t threads = thread_budget(c.threads);
  s.hc.run = {replicas, threads};
  s.hc.sampler = mc::HeatBathSettings{burn_in, thin};
  if (!(c.q > 1.0)) throw Invalid("scan needs q > 1");
  if (c.d < 2) throw Invalid("scan needs d >= 2");
  const auto grid = parse_list<double>(ps, "p");
  for (double p : grid)
    if (!(p > 0.0 && p < 1.0)) throw Invalid("p grid values must lie in (0,1)");
  for (int L : s.hc.sizes)
    if (L < 1) throw Invalid("proxy sizes must be at least 1");
  if (!std::is_sorted(grid.begin(), grid.end())) throw Invalid("p grid must be ascending");
  const auto res = kertesz::scan(grid, c.q, c.d, s);
  Metadata meta = metadata(sub);
  meta["threads"] = std::to_string(threads);
  meta["proxy"] = c.d == 2 ? "left-right inner crossing of L x (L+1), wired, threshold 0.5"
                           : "origin to boundary of Lambda_L by inner edges, wired, threshold 0.5";
  for (std::size_t i = 0; i < res.warnings.size(); ++i) {
    meta["warning." + std::to_string(i + 1)] = res.warnings[i];
    err << "warning: " << res.warnings[i] << '\n';
  }
  c.out.emit(out, [&](std::ostream& os) {
    if (c.out.format == "json") {
      Json rows = Json::array();
      for (const auto& r : res.rows) rows.push_back(report::to_json(r));
      report::write_json(os, meta, rows);
    } else {
      report::CsvTable t(report::kScanHeader);
      for (const auto& r : res.rows) t.add(report::scan_csv_row(r));
      t.write(os, meta);
    }
  });
  for (const auto& r : res.rows)
    if (r.flag == kertesz::Flag::unresolved) throw Unresolved("scan row at p=" + report::num(r.p) + " unresolved");
  return kOk;
}

int cmd_animals(const Common& c, const CLI::App* sub, std::ostream& out, int n) {
  if (n < 1) throw Invalid("--n must be at least 1");
  const auto md = bounds::mu_delta(c.d);
  report::CsvTable t({"n", "count", "mu_pow_n", "kesten_ok"});
  Json rows = Json::array();
  for (int i = 1; i <= n; ++i) {
    const auto count = bounds::lattice_animals(i, c.d);
    const double bound = std::pow(md.mu, i);
    const bool ok = static_cast<double>(count) <= bound;
    t.add({std::to_string(i), std::to_string(count), report::num(bound), ok ? "true" : "false"});
    rows.push_back({{"n", i}, {"count", count}, {"mu_pow_n", report::json_num(bound)}, {"kesten_ok", ok}});
  }
  const Metadata meta = metadata(sub);
  c.out.emit(out, [&](std::ostream& os) {
    if (c.out.format == "json") report::write_json(os, meta, rows);
    else t.write(os, meta);
  });
  return kOk;
}

int cmd_expansion(const Common& c, const CLI::App* sub, std::ostream& out) {
  const auto e = bounds::expansion_converges(c.q, c.d, c.h);
  Json result;
  result["q"] = report::json_num(c.q);
  result["d"] = c.d;
  result["h"] = report::json_num(c.h);
  result["h0"] = report::json_num(e.h0);
  result["ratio"] = report::json_num(e.ratio);
  result["sum_bound"] = report::json_num(e.sum_bound);
  result["converges"] = e.converges;
  if (c.q <= 4.0) result["nu_conjectured"] = report::json_num(bounds::nu_conjectured(c.q));
  const Metadata meta = metadata(sub);
  c.out.emit(out, [&](std::ostream& os) {
    if (c.out.format == "json") {
      report::write_json(os, meta, result);
    } else {
      report::CsvTable t({"q", "d", "h", "h0", "ratio", "sum_bound", "converges"});
      t.add({report::num(c.q), std::to_string(c.d), report::num(c.h), report::num(e.h0), report::num(e.ratio),
             report::num(e.sum_bound), e.converges ? "true" : "false"});
      t.write(os, meta);
    }
  });
  return kOk;
}

// Splices config-file entries in front of the user's flags so that flags,
// parsed later with take-last semantics, override the file.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  std::size_t sub = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else if (sub == args.size() && !args[i].empty() && args[i][0] != '-') {
      sub = i;
    }
  }
  if (path.empty() || sub == args.size()) return args;
  std::vector<std::string> merged(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1);
  for (const auto& [k, v] : read_config(path)) {
    if (k == "config") continue;
    merged.push_back("--" + k);
    merged.push_back(v);
  }
  merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, args.end());
  return merged;
}

}  // namespace

// ---------------------------------------------------------------------------

bool selftest(std::ostream& log) {
  using namespace exact;
  using lattice::BoxGraph;
  using lattice::Edge;
  bool all = true;
  auto check = [&](const std::string& name, bool ok) {
    log << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  };
  auto guarded = [&](const std::string& name, const std::function<bool()>& f) {
    try {
      check(name, f());
    } catch (const std::exception& e) {
      log << "FAIL " << name << " (" << e.what() << ")\n";
      all = false;
    }
  };

  const BoxGraph single = BoxGraph::custom(1, {});
  const BoxGraph path3 = BoxGraph::custom(3, {Edge{0, 1}, Edge{1, 2}});
  const BoxGraph square = BoxGraph::rect({2, 2});

  guarded("partition function of one ghost edge", [&] {
    const double z = partition_function(single, ModelParams(0.3, 2.5, 0.4)).value;
    return std::abs(z - (0.4 * 2.5 + 0.6 * 2.5 * 2.5)) < 1e-12;
  });
  guarded("ghost edge probability p_h/(p_h+q(1-p_h))", [&] {
    const double v = event_probability(single, ModelParams(0.5, 2.0, 0.5), EventPredicate::edge_open(0));
    return std::abs(v - 1.0 / 3.0) < 1e-12;
  });
  guarded("ghost formula on the 2x2 block", [&] {
    Rng rng(7);
    for (double q : {1.0, 1.5, 2.0, 3.0})
      for (double ph : {0.1, 0.5, 0.9})
        for (int t = 0; t < 4; ++t) {
          auto w = lattice::BondConfig::from_mask(rng.below(16), square.edge_count());
          const ModelParams params(0.5, q, ph);
          const auto cl = inner_clusters(square, w, params.bc);
          for (std::size_t i = 0; i < cl.size(); ++i)
            if (std::abs(ghost_conditional_oracle(square, params, w, i) - ghost_formula(cl[i].size(), q, ph)) > 1e-12)
              return false;
        }
    return true;
  });
  guarded("Edwards-Sokal identity on a 3-path", [&] {
    for (int q : {2, 3}) {
      const auto r = edwards_sokal_check(path3, lattice::BoundaryCondition::free(), 0.3, 0.1, q, 0, 2);
      if (std::abs(r.potts - r.random_cluster) > 1e-10) return false;
    }
    return true;
  });
  guarded("comparison sandwich on a 3-path", [&] {
    const double p = 0.6, q = 2.5, ph = 0.3;
    auto tilde = [q](double x) { return x / (x + q * (1 - x)); };
    const BoxGraph g = BoxGraph::custom(2, {Edge{0, 1}});
    const ModelParams phi(p, q, ph), lo(tilde(p), 1.0, tilde(ph)), hi(p, 1.0, ph);
    return domination_bruteforce(g, lo, phi).dominated && domination_bruteforce(g, phi, hi).dominated;
  });
  guarded("covariance derivatives match finite differences", [&] {
    const auto a = EventPredicate::connected(path3, 0, 2, lattice::BoundaryCondition::free());
    const double p = 0.4, q = 1.7, ph = 0.3, eps = 1e-5;
    auto prob = [&](double pp, double qq, double hh) { return event_probability(path3, ModelParams(pp, qq, hh), a); };
    const ModelParams m(p, q, ph);
    const double fp = (prob(p + eps, q, ph) - prob(p - eps, q, ph)) / (2 * eps);
    const double fh = (prob(p, q, ph + eps) - prob(p, q, ph - eps)) / (2 * eps);
    const double fq = (prob(p, q + eps, ph) - prob(p, q - eps, ph)) / (2 * eps);
    return std::abs(deriv_event(path3, m, a, Direction::p) - fp) < 1e-6 &&
           std::abs(deriv_event(path3, m, a, Direction::p_h) - fh) < 1e-6 &&
           std::abs(deriv_event(path3, m, a, Direction::q) - fq) < 1e-6;
  });
  guarded("FKG on the 2x2 block", [&] {
    const ModelParams params(0.45, 2.0, 0.2, lattice::BoundaryCondition::wired());
    const auto a = EventPredicate::connected(square, 0, 3, params.bc);
    const auto b = EventPredicate::edge_open(0);
    const EventPredicate both{"a&b", [&](const lattice::BondConfig& w) { return a(w) && b(w); }, true};
    return event_probability(square, params, both) + 1e-12 >=
           event_probability(square, params, a) * event_probability(square, params, b);
  });
  guarded("up-set counts 2, 3, 6, 20, 168, 7581", [&] {
    const std::uint64_t want[] = {2, 3, 6, 20, 168, 7581};
    for (unsigned s = 0; s <= 5; ++s)
      if (all_upsets(s).size() != want[s]) return false;
    return true;
  });
  return all;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-cluster model with a ghost field: bounds and estimates of the Kertesz line", "kertesz_lab"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.footer(
      "Units: h is the external field with p_h = 1 - exp(-(q/(q-1)) h); p, p_h are edge probabilities.\n"
      "Exit codes: 0 success, 1 selftest failure, 2 invalid input, 3 unresolved numerical outcome.");

  Common cb, ccu, cex, csa, csc, can, cxp;

  auto* b = app.add_subcommand("bounds", "closed-form bounds at (p, q, d) as a BoundsReport");
  add_common(b, cb, "json");
  b->add_option("--h", cb.h, "field h1 for the explicit check");
  double qc = -1, pb = -1, delta_override = -1, p2 = -1, q2 = 1, h2 = 0;
  std::size_t bsamples = 0;
  long nmax = 64;
  std::string bks = "1,2,3,4";
  b->add_option("--qc", qc, "q_c(p,0) at this p (default: planar formula in d=2)");
  b->add_option("--pb", pb, "Bernoulli threshold p_B (default 1/2 in d=2)");
  b->add_option("--delta-override", delta_override, "replace delta = mu^(-4^d) in the lower-bound pipeline");
  b->add_option("--samples", bsamples, "samples per annulus crossing for the lower bound (0: skip)");
  b->add_option("--ks", bks, "annulus radii k for the lower bound, comma separated");
  b->add_option("--p2", p2, "second point p2 for the explicit domination check");
  b->add_option("--q2", q2, "second point q2");
  b->add_option("--h2", h2, "second point h2");
  b->add_option("--nmax", nmax, "largest cluster size checked by the explicit condition");

  auto* cu = app.add_subcommand("curve", "upper-bound curves over p, or h0 over q");
  add_common(cu, ccu, "csv", false);
  std::string kind = "upper", qs = "1.1,2,10";
  double pmin = 0.5, pmax = 0.95, qmin = 1.01, qmax = 10;
  int points = 91;
  cu->add_option("--kind", kind, "upper (h_upper_rc, h_upper_bern over p) or h0 (h0 over q)");
  cu->add_option("--q", qs, "q values for kind=upper, comma separated");
  cu->add_option("--pmin", pmin, "smallest p");
  cu->add_option("--pmax", pmax, "largest p");
  cu->add_option("--qmin", qmin, "smallest q for kind=h0");
  cu->add_option("--qmax", qmax, "largest q for kind=h0");
  cu->add_option("--points", points, "grid points");

  int size = 1;
  std::string shape, bc_name = "free", event = "connected:0,1";
  double ph = -1;
  auto* ex = app.add_subcommand("exact", "exact enumeration on a small box");
  add_common(ex, cex, "json");
  bool derivs = false;
  ex->add_option("--h", cex.h, "field h");
  ex->add_option("--ph", ph, "ghost edge parameter p_h (overrides --h)");
  ex->add_option("--size", size, "box radius k");
  ex->add_option("--shape", shape, "rectangular extents instead of a box, e.g. 2,2");
  ex->add_option("--bc", bc_name, "free or wired");
  ex->add_option("--event", event,
                 "full | edge:e | connected:x,y | inner_connected:x,y | reaches_boundary:x");
  ex->add_flag("--derivs", derivs, "also report d/dp, d/dp_h, d/dq");

  auto* sa = app.add_subcommand("sample", "Monte Carlo estimate of an event");
  add_common(sa, csa, "json");
  std::size_t samples = 1000, burn_in = 100, thin = 1, replicas = 4, emit = 0;
  std::string sampler = "cftp";
  sa->add_option("--h", csa.h, "field h");
  sa->add_option("--ph", ph, "ghost edge parameter p_h (overrides --h)");
  sa->add_option("--size", size, "box radius k");
  sa->add_option("--shape", shape, "rectangular extents instead of a box, e.g. 2,2");
  sa->add_option("--bc", bc_name, "free or wired");
  sa->add_option("--event", event, "as for exact");
  sa->add_option("--samples", samples, "number of samples");
  sa->add_option("--sampler", sampler, "cftp or heat_bath");
  sa->add_option("--burn-in", burn_in, "heat-bath burn-in sweeps");
  sa->add_option("--thin", thin, "heat-bath sweeps per sample");
  sa->add_option("--replicas", replicas, "independent chains");
  sa->add_option("--emit-configs", emit, "write this many sampled configurations as hex instead");

  auto* sc = app.add_subcommand("scan", "estimate h_c(p) over a p grid with bounds alongside");
  add_common(sc, csc, "csv", false);
  sc->add_option("--q", csc.q, "cluster weight q > 1");
  std::string pgrid = "0.5,0.52,0.55", sizes = "16,32,48", sks = "1,2,3,4";
  kertesz::ScanSettings ss;
  double h_max = -1, sdelta = -1, sqc = -1, spb = -1;
  sc->add_option("--p", pgrid, "ascending p grid, comma separated");
  sc->add_option("--sizes,--size", sizes, "proxy sizes L, comma separated; decisions use the largest");
  sc->add_option("--samples", ss.hc.n_samples, "samples per bisection decision");
  sc->add_option("--max-samples", ss.hc.max_samples, "doubling budget for undecidable steps");
  sc->add_option("--tol", ss.hc.tol_h, "bisection tolerance in h");
  sc->add_option("--h-max", h_max, "bisection ceiling (default 2 x Bernoulli bound, else 10)");
  sc->add_option("--delta-override", sdelta, "replace delta in the lower-bound pipeline");
  sc->add_option("--lower-samples", ss.lower_samples, "samples per annulus crossing");
  sc->add_option("--ks", sks, "annulus radii k for the lower bound");
  sc->add_option("--qc", sqc, "q_c(p,0), needed for the rc bound beyond d=2");
  sc->add_option("--pb", spb, "Bernoulli threshold p_B");
  sc->add_option("--replicas", replicas, "independent chains per estimate");
  sc->add_option("--burn-in", burn_in, "heat-bath burn-in sweeps");
  sc->add_option("--thin", thin, "heat-bath sweeps per sample");

  auto* an = app.add_subcommand("animals", "lattice animal counts against mu^n");
  add_common(an, can, "csv", false);
  int n = 5;
  an->add_option("--n,--nmax", n, "largest animal size");

  auto* xp = app.add_subcommand("expansion", "cluster-expansion convergence at (q, d, h)");
  add_common(xp, cxp, "json");
  xp->add_option("--h", cxp.h, "field h");

  auto* st = app.add_subcommand("selftest", "exact-module invariant suite");

  const auto args = [&] {
    try {
      return merge_config(raw_args);
    } catch (const Invalid& e) {
      err << "error: " << e.what() << '\n';
      return std::vector<std::string>{};
    }
  }();
  if (args.empty() && !raw_args.empty()) return kInvalid;

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*b) return cmd_bounds(cb, b, out, qc, pb, delta_override, bsamples, bks, p2, q2, h2, nmax);
    if (*cu) return cmd_curve(ccu, cu, out, kind, qs, pmin, pmax, qmin, qmax, points);
    if (*ex) return cmd_exact(cex, ex, out, size, shape, ph, bc_name, event, derivs);
    if (*sa)
      return cmd_sample(csa, sa, out, size, shape, ph, bc_name, event, samples, sampler, burn_in, thin, replicas, emit);
    if (*sc) {
      if (h_max > 0) ss.hc.h_max = h_max;
      if (sdelta > 0) ss.delta_override = sdelta;
      if (sqc > 0) ss.qc_at_p = sqc;
      if (spb > 0) ss.hc.p_bernoulli = spb;
      return cmd_scan(csc, sc, out, err, pgrid, ss, sizes, sks, replicas, burn_in, thin);
    }
    if (*an) return cmd_animals(can, an, out, n);
    if (*xp) return cmd_expansion(cxp, xp, out);
    if (*st) return selftest(out) ? kOk : kSelftestFailed;
  } catch (const Unresolved& e) {
    err << "unresolved: " << e.what() << '\n';
    return kUnresolved;
  } catch (const mc::CftpTimeout& e) {
    err << "unresolved: " << e.what() << '\n';
    return kUnresolved;
  } catch (const kertesz::MonotonicityError& e) {
    err << "unresolved: " << e.what() << '\n';
    return kUnresolved;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace klab::cli
