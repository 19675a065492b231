#include "ihra/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "ihra/errors.hpp"
#include "ihra/spec_file.hpp"

#ifndef IHRA_BUILD_ID
#define IHRA_BUILD_ID "unknown"
#endif

namespace ihra {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw IoError("results csv line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw IoError("format_double: buffer too small");
  return std::string(buffer, ptr);
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.scheme) << ',' << format_double(r.cell_radius_m) << ',' << r.num_preambles << ','
        << r.active_mmtc << ',' << r.trials << ',' << format_double(r.mean_success) << ','
        << format_double(r.ci95) << ',' << format_double(r.mean_urllc_success) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultCsvHeader) {
    throw IoError("results csv: header mismatch");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 8) throw IoError("results csv line " + std::to_string(line_no) + ": expected 8 fields");
    ResultRow r;
    try {
      r.scheme = parse_scheme(f[0]);
    } catch (const ConfigError&) {
      throw IoError("results csv line " + std::to_string(line_no) + ": unknown scheme '" + f[0] + "'");
    }
    r.cell_radius_m = parse_number<double>(f[1], line_no);
    r.num_preambles = parse_number<int>(f[2], line_no);
    r.active_mmtc = parse_number<int>(f[3], line_no);
    r.trials = parse_number<int>(f[4], line_no);
    r.mean_success = parse_number<double>(f[5], line_no);
    r.ci95 = parse_number<double>(f[6], line_no);
    r.mean_urllc_success = parse_number<double>(f[7], line_no);
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json results_to_json(const std::vector<ResultRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"scheme", std::string(to_string(r.scheme))},
                   {"R", r.cell_radius_m},
                   {"num_preambles", r.num_preambles},
                   {"Na", r.active_mmtc},
                   {"trials", r.trials},
                   {"mean_success", r.mean_success},
                   {"ci95", r.ci95},
                   {"mean_urllc_success", r.mean_urllc_success}});
  }
  return out;
}

std::string build_id() { return IHRA_BUILD_ID; }

nlohmann::json run_metadata(const ExperimentSpec& spec) {
  nlohmann::json schemes = nlohmann::json::array();
  for (auto s : spec.schemes) schemes.push_back(std::string(to_string(s)));
  return {{"name", spec.name},
          {"seed", spec.seed},
          {"trials", spec.trials},
          {"schemes", schemes},
          {"cell_radius_m", spec.cell_radii_m},
          {"quantum_m", spec.quantum_m},
          {"num_preambles", spec.num_preambles},
          {"active_mmtc", spec.active_mmtc},
          {"power_levels", spec.power_levels},
          {"unmatched_levels", spec.unmatched_levels == UnmatchedLevels::below_top ? "below_top" : "all"},
          {"urllc_mode", spec.urllc.kind == UrllcMode::Kind::fixed ? "fixed" : "poisson"},
          {"urllc_count", spec.urllc.fixed_count},
          {"urllc_lambda", spec.urllc.lambda},
          {"detection_miss_probability", spec.detection_miss_probability},
          {"spec", dump_spec(spec)},
          {"seed_derivation", "trial seed = mix(base seed, mix(scheme, R, preambles, Na), trial)"},
          {"build_id", build_id()}};
}

void write_fig2_summary_csv(std::ostream& out, const std::vector<Fig2Run>& runs) {
  out << "seed,model,epochs_run,best_epoch,val_rmse,test_rmse,coverage,peak_coverage\n";
  for (const auto& r : runs) {
    out << r.seed << ',' << to_string(r.architecture) << ',' << (r.training.curve.size() - 1) << ','
        << r.training.best_epoch << ',' << format_double(r.training.best_val_rmse) << ','
        << format_double(r.test.rmse) << ',' << format_double(r.test.coverage) << ','
        << format_double(r.test.peak_coverage) << '\n';
  }
}

}  // namespace ihra
