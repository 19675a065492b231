#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ihra/access.hpp"
#include "ihra/training.hpp"

namespace ihra {

enum class Scheme { ihra, ihra_random, tara };

std::string_view to_string(Scheme scheme);
/// Accepts "ihra", "ihra-random", "tara". Throws ConfigError("scheme", ...).
Scheme parse_scheme(std::string_view name);

struct UrllcMode {
  enum class Kind { fixed, poisson };
  Kind kind = Kind::fixed;
  int fixed_count = 0;  // devices per slot for Kind::fixed
  double lambda = 5.0;  // mean rate for Kind::poisson
};

/// Predictor used when URLLC traffic is Poisson: trained once per run on
/// `training_slots` slots, then queried on each trial's own history window.
struct PredictorSettings {
  TrainingOptions training;
  int training_slots = 10000;
};

struct ExperimentSpec {
  std::string name = "custom";
  std::vector<Scheme> schemes{Scheme::ihra};
  std::vector<double> cell_radii_m{1200.0};
  double quantum_m = kDefaultQuantumM;
  std::vector<int> num_preambles{40};
  std::vector<int> active_mmtc{80};
  int power_levels = 4;
  UnmatchedLevels unmatched_levels = UnmatchedLevels::below_top;
  UrllcMode urllc;
  int trials = 1000;
  std::uint64_t seed = 1;
  double detection_miss_probability = 0.0;
  PredictorSettings predictor;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ResultRow {
  Scheme scheme = Scheme::ihra;
  double cell_radius_m = 0.0;
  int num_preambles = 0;
  int active_mmtc = 0;
  int trials = 0;
  double mean_success = 0.0;  // mMTC plus URLLC successes per slot
  double ci95 = 0.0;          // half-width, normal approximation
  double mean_urllc_success = 0.0;

  bool operator==(const ResultRow&) const = default;
};

/// Seed of one trial, a function of the base seed, the grid coordinates and
/// the trial index only. Any trial can be replayed alone.
std::uint64_t trial_seed(std::uint64_t base_seed, Scheme scheme, double cell_radius_m,
                         int num_preambles, int active_mmtc, int trial);

/// One slot of `scheme` at a grid point with the given URLLC load.
SlotOutcome run_trial(const ExperimentSpec& spec, Scheme scheme, double cell_radius_m,
                      int num_preambles, int active_mmtc, std::uint64_t seed,
                      const PredictorModel* predictor);

/// Runs every grid point (scheme x R x preambles x Na, in that nesting
/// order) and returns one row per point in that order.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Fig. 4 setup: Na = 80, L = 4, R in {800, 1200}, preamble sweep 10..60.
ExperimentSpec preset_fig4();
/// Fig. 5 setup: 40 preambles, 3 URLLC devices, L = 4, R in {800, 1200},
/// Na sweep 20..140.
ExperimentSpec preset_fig5();

/// Predictor comparison: attention vs plain LSTM on Poisson(5) traffic with
/// peak targets over 5 slots.
struct Fig2Spec {
  double lambda = 5.0;
  int training_slots = 10000;
  int test_slots = 2000;
  int seeds = 5;
  std::uint64_t seed = 1;
  TrainingOptions training;
  int horizon = 5;
};

Fig2Spec preset_fig2();

struct Fig2Run {
  std::uint64_t seed = 0;
  Architecture architecture = Architecture::attention;
  TrainingResult training;
  Evaluation test;
};

/// Trains both architectures for each seed on the same series and scores
/// them on the same held-out series. Runs are ordered (seed, architecture).
std::vector<Fig2Run> run_fig2(const Fig2Spec& spec);

}  // namespace ihra
