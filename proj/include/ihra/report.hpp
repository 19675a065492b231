#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ihra/harness.hpp"

namespace ihra {

/// Exact bit-for-bit text for the CSV header of result tables.
inline constexpr const char* kResultCsvHeader =
    "scheme,R,num_preambles,Na,trials,mean_success,ci95,mean_urllc_success";

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Throws IoError on a header mismatch or malformed row.
std::vector<ResultRow> read_results_csv(std::istream& in);

nlohmann::json results_to_json(const std::vector<ResultRow>& rows);

/// Run metadata: echoed spec, seed and build identifier.
nlohmann::json run_metadata(const ExperimentSpec& spec);

std::string build_id();

/// CSV `seed,model,epochs_run,best_epoch,val_rmse,test_rmse,coverage,peak_coverage`.
void write_fig2_summary_csv(std::ostream& out, const std::vector<Fig2Run>& runs);

}  // namespace ihra
