#pragma once

#include <iosfwd>
#include <string>

#include "ihra/harness.hpp"

namespace ihra {

/// Parses a flat `key = value` document. Lists are comma separated, `#`
/// starts a comment. Keys not listed below are rejected with ConfigError.
///
///   name, schemes, cell_radius_m, quantum_m, num_preambles, active_mmtc,
///   power_levels, unmatched_levels (below_top|all), urllc_mode (fixed|poisson), urllc_count, urllc_lambda,
///   trials, seed, detection_miss_probability, predictor_window,
///   predictor_hidden_size, predictor_epochs, predictor_learning_rate,
///   predictor_batch_size, predictor_patience, predictor_training_slots,
///   predictor_seed
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec load_spec(const std::string& path);

/// Writes every key of `spec` in the format parse_spec reads.
std::string dump_spec(const ExperimentSpec& spec);

}  // namespace ihra
