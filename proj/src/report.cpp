#include "klab/report.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace klab::report {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json json_num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json to_json(const exact::ModelParams& params) {
  Json j;
  j["p"] = json_num(params.p);
  j["q"] = json_num(params.q);
  j["p_h"] = json_num(params.p_h);
  j["bc"] = params.bc.name();
  return j;
}

Json to_json(const mc::Estimate& e) {
  Json j;
  j["mean"] = json_num(e.mean);
  j["stderr"] = json_num(e.std_error);
  j["n"] = e.n_samples;
  j["tau"] = json_num(e.tau);
  return j;
}

Json to_json(const mc::Estimate& e, std::uint64_t seed, const Json& params) {
  Json j = to_json(e);
  j["seed"] = seed;
  j["params"] = params;
  return j;
}

Json to_json(const bounds::LowerBound& lb) {
  Json j;
  j["resolved"] = lb.resolved;
  j["k_star"] = lb.resolved ? Json(lb.k_star) : Json(nullptr);
  j["extrapolated"] = lb.extrapolated;
  j["delta"] = json_num(lb.delta);
  j["ph_lower"] = json_num(lb.ph_threshold);
  j["h_lower"] = json_num(lb.h_threshold);
  if (lb.fit) j["decay_fit"] = {{"intercept", json_num(lb.fit->intercept)}, {"slope", json_num(lb.fit->slope)}};
  if (!lb.reason.empty()) j["reason"] = lb.reason;
  return j;
}

Json to_json(const bounds::BoundsReport& r) {
  Json j;
  j["p"] = json_num(r.p);
  j["q"] = json_num(r.q);
  j["d"] = r.d;
  j["h_upper_rc"] = json_num(r.h_upper_rc);
  j["h_upper_bern"] = json_num(r.h_upper_bern);
  j["mu"] = json_num(r.mu);
  j["delta"] = json_num(r.delta);
  j["k_star"] = r.lower.resolved ? Json(r.lower.k_star) : Json("unresolved");
  j["ph_lower"] = json_num(r.lower.ph_threshold);
  j["h_lower"] = json_num(r.lower.h_threshold);
  j["h0"] = json_num(r.h0);
  j["lower_bound"] = to_json(r.lower);
  return j;
}

Json to_json(const kertesz::ScanRow& r) {
  Json j;
  j["p"] = json_num(r.p);
  j["q"] = json_num(r.q);
  j["d"] = r.d;
  j["h_lower"] = json_num(r.h_lower);
  j["h_upper_rc"] = json_num(r.h_upper_rc);
  j["h_upper_bern"] = json_num(r.h_upper_bern);
  j["h_est"] = json_num(r.h_est);
  j["h_err"] = json_num(r.h_err);
  j["sizes_used"] = r.sizes_used;
  j["n_samples"] = r.n_samples;
  j["seed"] = r.seed;
  j["flag"] = kertesz::flag_name(r.flag);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os, const Metadata& meta) const {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::vector<std::string> scan_csv_row(const kertesz::ScanRow& r) {
  int l_max = 0;
  for (int L : r.sizes_used) l_max = std::max(l_max, L);
  return {num(r.p),     num(r.q),     std::to_string(r.d),         num(r.h_lower),
          num(r.h_upper_rc), num(r.h_upper_bern), num(r.h_est), num(r.h_err),
          std::to_string(l_max), std::to_string(r.n_samples), std::to_string(r.seed),
          kertesz::flag_name(r.flag)};
}

std::vector<std::string> bounds_csv_row(const bounds::BoundsReport& r) {
  return {num(r.p),
          num(r.q),
          std::to_string(r.d),
          num(r.h_upper_rc),
          num(r.h_upper_bern),
          num(r.mu),
          num(r.delta),
          r.lower.resolved ? std::to_string(r.lower.k_star) : "unresolved",
          r.lower.extrapolated ? "true" : "false",
          num(r.lower.ph_threshold),
          num(r.lower.h_threshold),
          num(r.h0)};
}

namespace {

// Same layout as dump(2), with floats printed through num().
void dump(std::ostream& os, const Json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        os << pad << Json(it.key()).dump() << ": ";
        dump(os, it.value(), depth + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << pad;
        dump(os, j[i], depth + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << close << ']';
      return;
    }
    case Json::value_t::number_float:
      os << num(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace

void write_json(std::ostream& os, const Metadata& meta, const Json& result) {
  Json doc;
  Json m = Json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  doc["meta"] = m;
  doc["result"] = result;
  dump(os, doc, 0);
  os << '\n';
}

}  // namespace klab::report
