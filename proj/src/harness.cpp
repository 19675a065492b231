#include "ihra/harness.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

namespace {

constexpr std::uint64_t kPredictorStream = 0x7072656469637472ULL;
constexpr std::uint64_t kFig2Stream = 0x6669673200000000ULL;

struct RunningStats {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  double ci95() const {
    if (n < 2) return 0.0;
    const double variance = m2 / static_cast<double>(n - 1);
    return 1.96 * std::sqrt(variance / static_cast<double>(n));
  }
};

PowerPolicy policy_for(Scheme scheme) {
  return scheme == Scheme::ihra_random ? PowerPolicy::ihra_random : PowerPolicy::ihra;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ihra:
      return "ihra";
    case Scheme::ihra_random:
      return "ihra-random";
    case Scheme::tara:
      return "tara";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "ihra") return Scheme::ihra;
  if (name == "ihra-random") return Scheme::ihra_random;
  if (name == "tara") return Scheme::tara;
  throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (schemes.empty()) throw ConfigError("schemes", "sweep must not be empty");
  if (cell_radii_m.empty()) throw ConfigError("cell_radius_m", "sweep must not be empty");
  if (num_preambles.empty()) throw ConfigError("num_preambles", "sweep must not be empty");
  if (active_mmtc.empty()) throw ConfigError("active_mmtc", "sweep must not be empty");
  for (double r : cell_radii_m) annulus_count(r, quantum_m);
  for (int p : num_preambles)
    if (p < 1) throw ConfigError("num_preambles", "every entry must be at least 1");
  for (int n : active_mmtc)
    if (n < 0) throw ConfigError("active_mmtc", "every entry must be non-negative");
  if (power_levels < 1) throw ConfigError("power_levels", "must be at least 1");
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  if (!(detection_miss_probability >= 0.0 && detection_miss_probability <= 1.0)) {
    throw ConfigError("detection_miss_probability", "must be in [0, 1]");
  }
  if (urllc.kind == UrllcMode::Kind::fixed) {
    if (urllc.fixed_count < 0) throw ConfigError("urllc_count", "must be non-negative");
  } else {
    if (!(urllc.lambda >= 0.0) || !std::isfinite(urllc.lambda)) {
      throw ConfigError("urllc_lambda", "must be finite and non-negative");
    }
    predictor.training.validate();
    if (predictor.training_slots < predictor.training.window + predictor.training.horizon) {
      throw ConfigError("predictor_training_slots", "too short for one training window");
    }
  }
}

std::uint64_t trial_seed(std::uint64_t base_seed, Scheme scheme, double cell_radius_m,
                         int num_preambles, int active_mmtc, int trial) {
  std::uint64_t key = derive_seed(static_cast<std::uint64_t>(scheme), std::bit_cast<std::uint64_t>(cell_radius_m));
  key = derive_seed(key, static_cast<std::uint64_t>(num_preambles), static_cast<std::uint64_t>(active_mmtc));
  return derive_seed(base_seed, key, static_cast<std::uint64_t>(trial));
}

SlotOutcome run_trial(const ExperimentSpec& spec, Scheme scheme, double cell_radius_m,
                      int num_preambles, int active_mmtc, std::uint64_t seed,
                      const PredictorModel* predictor) {
  Rng rng(seed);
  int urllc_actual = spec.urllc.fixed_count;
  int urllc_predicted = spec.urllc.fixed_count;
  if (spec.urllc.kind == UrllcMode::Kind::poisson) {
    if (predictor == nullptr) throw ConfigError("urllc_mode", "poisson traffic needs a trained predictor");
    std::vector<double> history(static_cast<std::size_t>(predictor->window));
    for (auto& h : history) h = static_cast<double>(rng.poisson(spec.urllc.lambda));
    urllc_actual = static_cast<int>(rng.poisson(spec.urllc.lambda));
    urllc_predicted = round_prediction(forward(std::span<const double>(history), *predictor));
  }

  if (scheme == Scheme::tara) {
    return tara_slot(active_mmtc, urllc_actual, num_preambles, rng);
  }
  AccessConfig config;
  config.geometry = GeometryConfig::make(cell_radius_m, spec.quantum_m);
  config.num_preambles = num_preambles;
  config.power_levels = spec.power_levels;
  config.policy = policy_for(scheme);
  config.unmatched_levels = spec.unmatched_levels;
  config.detection_miss_probability = spec.detection_miss_probability;
  const auto population = activate_mmtc(active_mmtc, config.geometry, rng);
  return ihra_slot(config, population, urllc_actual, urllc_predicted, rng);
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  std::optional<PredictorModel> predictor;
  if (spec.urllc.kind == UrllcMode::Kind::poisson) {
    Rng series_rng(derive_seed(spec.seed, kPredictorStream));
    const auto series = poisson_series(spec.urllc.lambda,
                                       static_cast<std::size_t>(spec.predictor.training_slots), series_rng);
    predictor = train(series, spec.predictor.training).model;
  }
  const PredictorModel* model = predictor ? &*predictor : nullptr;

  std::vector<ResultRow> rows;
  for (Scheme scheme : spec.schemes) {
    for (double radius : spec.cell_radii_m) {
      for (int preambles : spec.num_preambles) {
        for (int na : spec.active_mmtc) {
          RunningStats total;
          RunningStats urllc;
          for (int t = 0; t < spec.trials; ++t) {
            const auto seed = trial_seed(spec.seed, scheme, radius, preambles, na, t);
            const auto outcome = run_trial(spec, scheme, radius, preambles, na, seed, model);
            total.add(outcome.total_success());
            urllc.add(outcome.urllc_success);
          }
          rows.push_back(ResultRow{scheme, radius, preambles, na, spec.trials, total.mean,
                                   total.ci95(), urllc.mean});
        }
      }
    }
  }
  return rows;
}

ExperimentSpec preset_fig4() {
  ExperimentSpec spec;
  spec.name = "fig4";
  spec.schemes = {Scheme::ihra, Scheme::ihra_random, Scheme::tara};
  spec.cell_radii_m = {800.0, 1200.0};
  spec.num_preambles = {10, 20, 30, 40, 50, 60};
  spec.active_mmtc = {80};
  spec.power_levels = 4;
  spec.urllc = UrllcMode{UrllcMode::Kind::fixed, 0, 5.0};
  spec.trials = 10000;
  return spec;
}

ExperimentSpec preset_fig5() {
  ExperimentSpec spec;
  spec.name = "fig5";
  spec.schemes = {Scheme::ihra, Scheme::ihra_random, Scheme::tara};
  spec.cell_radii_m = {800.0, 1200.0};
  spec.num_preambles = {40};
  spec.active_mmtc = {20, 40, 60, 80, 100, 120, 140};
  spec.power_levels = 4;
  spec.urllc = UrllcMode{UrllcMode::Kind::fixed, 3, 5.0};
  spec.trials = 10000;
  return spec;
}

Fig2Spec preset_fig2() {
  Fig2Spec spec;
  spec.horizon = 5;
  spec.training.horizon = 5;
  return spec;
}

std::vector<Fig2Run> run_fig2(const Fig2Spec& spec) {
  if (spec.seeds < 1) throw ConfigError("seeds", "must be at least 1");
  if (spec.horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (spec.training_slots < 1) throw ConfigError("training_slots", "must be positive");
  if (spec.test_slots < 1) throw ConfigError("test_slots", "must be positive");
  std::vector<Fig2Run> runs;
  for (int s = 0; s < spec.seeds; ++s) {
    const auto run_seed = derive_seed(spec.seed, kFig2Stream, static_cast<std::uint64_t>(s));
    Rng train_rng(derive_seed(run_seed, 1));
    Rng test_rng(derive_seed(run_seed, 2));
    const auto train_series = poisson_series(spec.lambda, static_cast<std::size_t>(spec.training_slots), train_rng);
    const auto test_series = poisson_series(spec.lambda, static_cast<std::size_t>(spec.test_slots), test_rng);
    for (Architecture arch : {Architecture::attention, Architecture::plain}) {
      TrainingOptions options = spec.training;
      options.architecture = arch;
      options.horizon = spec.horizon;
      options.seed = derive_seed(run_seed, 3);
      Fig2Run run;
      run.seed = run_seed;
      run.architecture = arch;
      run.training = train(train_series, options);
      run.test = evaluate(run.training.model, test_series, options.source);
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

}  // namespace ihra
