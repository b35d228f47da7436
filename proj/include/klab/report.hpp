#pragma once

// JSON and CSV emission. Floats carry 12 significant digits; +inf is written
// as the string "inf" (CSV and JSON), NaN as null in JSON and "nan" in CSV.

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "klab/bounds.hpp"
#include "klab/estimate.hpp"
#include "klab/exact.hpp"
#include "klab/kertesz.hpp"

namespace klab::report {

using Json = nlohmann::ordered_json;
using Metadata = std::map<std::string, std::string>;

std::string num(double x);
Json json_num(double x);

Json to_json(const exact::ModelParams& params);
Json to_json(const mc::Estimate& e);
Json to_json(const mc::Estimate& e, std::uint64_t seed, const Json& params);
Json to_json(const bounds::LowerBound& lb);
Json to_json(const bounds::BoundsReport& r);
Json to_json(const kertesz::ScanRow& r);

// CSV table with "# key=value" metadata lines above the header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  void write(std::ostream& os, const Metadata& meta) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline const std::vector<std::string> kScanHeader = {"p",  "q",     "d",       "h_lower",   "h_upper_rc",
                                                     "h_upper_bern", "h_est", "h_err", "L_max",
                                                     "n_samples",    "seed",  "flag"};

std::vector<std::string> scan_csv_row(const kertesz::ScanRow& r);

inline const std::vector<std::string> kBoundsHeader = {
    "p", "q", "d", "h_upper_rc", "h_upper_bern", "mu", "delta", "k_star", "extrapolated", "ph_lower", "h_lower", "h0"};

std::vector<std::string> bounds_csv_row(const bounds::BoundsReport& r);

// {"meta": {...}, "result": ...} pretty-printed with a trailing newline.
void write_json(std::ostream& os, const Metadata& meta, const Json& result);

}  // namespace klab::report
