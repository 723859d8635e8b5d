#include "pinlab/reports.hpp"

#include <cstdio>
#include <fstream>

#include "pinlab/errors.hpp"

namespace pinlab {

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json law_provenance(const RenewalLaw& law) {
  Json j;
  j["spec"] = law.spec_string();
  j["n_table"] = law.n_table();
  j["alpha"] = std::isfinite(law.alpha) ? Json(law.alpha) : Json(nullptr);
  j["checksum"] = hex64(law.checksum);
  return j;
}

Json env_provenance(const Environment& env) {
  Json j;
  j["dist"] = dist_name(env.dist);
  if (env.dist == ChargeDist::CenteredUniform) j["half_width"] = env.half_width;
  j["seed"] = env.seed;
  j["length"] = env.length();
  j["checksum"] = hex64(env.checksum);
  return j;
}

std::string report_to_jsonl(const Report& report) {
  std::string out;
  for (const auto& r : report.records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string report_to_jsonl_stable(const Report& report) {
  std::string out;
  for (const auto& r : report.records) {
    if (r.contains("record") && r["record"] == "timing") continue;
    out += r.dump();
    out += '\n';
  }
  return out;
}

void write_report(const Report& report, const std::filesystem::path& out_base) {
  if (out_base.has_parent_path())
    std::filesystem::create_directories(out_base.parent_path());
  {
    std::filesystem::path p = out_base;
    p += ".jsonl";
    std::ofstream os(p);
    if (!os) throw DataFormatError("cannot open " + p.string() + " for writing");
    os << report_to_jsonl(report);
  }
  for (const auto& [name, contents] : report.csv) {
    std::filesystem::path p = out_base;
    p += "." + name + ".csv";
    std::ofstream os(p);
    if (!os) throw DataFormatError("cannot open " + p.string() + " for writing");
    os << contents;
  }
}

CsvBuilder::CsvBuilder(std::string header) : out_(std::move(header)) {
  out_ += '\n';
}

std::string CsvBuilder::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvBuilder::row(std::initializer_list<double> cells) {
  bool first = true;
  for (double v : cells) {
    if (!first) out_ += ',';
    out_ += num(v);
    first = false;
  }
  out_ += '\n';
}

void CsvBuilder::row_mixed(const std::vector<std::string>& cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out_ += ',';
    out_ += c;
    first = false;
  }
  out_ += '\n';
}

}  // namespace pinlab
