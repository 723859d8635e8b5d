#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pinlab/environment.hpp"
#include "pinlab/renewal_law.hpp"

namespace pinlab {

using Json = nlohmann::json;

// A suite outcome: line-delimited structured records plus plot-ready CSV
// side files.  Records of type "timing" carry wall-clock data and are the
// only part allowed to differ between identical re-runs.
struct Report {
  bool pass = true;
  std::vector<Json> records;
  std::vector<std::pair<std::string, std::string>> csv;  // name -> contents
};

std::string hex64(uint64_t v);

Json law_provenance(const RenewalLaw& law);
Json env_provenance(const Environment& env);

// JSONL rendering of the records.
std::string report_to_jsonl(const Report& report);
// The same with "timing" records removed; byte-identical across re-runs.
std::string report_to_jsonl_stable(const Report& report);

// Writes <out_base>.jsonl plus one <out_base>.<name>.csv per CSV entry.
void write_report(const Report& report, const std::filesystem::path& out_base);

// Small deterministic CSV builder: header row then %.17g-formatted cells.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::string header);
  void row(std::initializer_list<double> cells);
  void row_mixed(const std::vector<std::string>& cells);
  std::string str() const { return out_; }
  static std::string num(double v);

 private:
  std::string out_;
};

}  // namespace pinlab
