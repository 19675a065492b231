// simulate: runs the hybrid random access experiments and writes result tables.
//
//   simulate --preset fig4 --out results/
//   simulate --spec my_run.cfg --format json
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ihra/errors.hpp"
#include "ihra/harness.hpp"
#include "ihra/model_io.hpp"
#include "ihra/report.hpp"
#include "ihra/spec_file.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string preset;
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> epochs;
  std::string out_dir = ".";
  std::string scheme;
  std::string format = "csv";
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ihra::IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw ihra::IoError("write failed for " + path.string());
}

void run_grid(ihra::ExperimentSpec spec, const Options& opt, const fs::path& out_dir) {
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.trials) spec.trials = *opt.trials;
  if (opt.epochs) spec.predictor.training.epochs = *opt.epochs;
  if (!opt.scheme.empty()) spec.schemes = {ihra::parse_scheme(opt.scheme)};

  const auto rows = ihra::run_experiment(spec);

  const fs::path table = out_dir / (spec.name + (opt.format == "csv" ? ".csv" : ".json"));
  auto out = open_output(table);
  if (opt.format == "csv") {
    ihra::write_results_csv(out, rows);
  } else {
    out << ihra::results_to_json(rows).dump(2) << '\n';
  }
  finish(out, table);

  const fs::path meta_path = out_dir / (spec.name + ".run.json");
  auto meta = open_output(meta_path);
  meta << ihra::run_metadata(spec).dump(2) << '\n';
  finish(meta, meta_path);

  ihra::write_results_csv(std::cout, rows);
}

void run_predictor_comparison(const Options& opt, const fs::path& out_dir) {
  auto spec = ihra::preset_fig2();
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.trials) spec.seeds = *opt.trials;
  if (opt.epochs) spec.training.epochs = *opt.epochs;

  const auto runs = ihra::run_fig2(spec);

  const fs::path summary_path = out_dir / (opt.format == "csv" ? "fig2.csv" : "fig2.json");
  auto summary = open_output(summary_path);
  if (opt.format == "csv") {
    ihra::write_fig2_summary_csv(summary, runs);
  } else {
    auto doc = nlohmann::json::array();
    for (const auto& r : runs) {
      doc.push_back({{"seed", r.seed},
                     {"model", std::string(ihra::to_string(r.architecture))},
                     {"best_epoch", r.training.best_epoch},
                     {"val_rmse", r.training.best_val_rmse},
                     {"test_rmse", r.test.rmse},
                     {"coverage", r.test.coverage},
                     {"peak_coverage", r.test.peak_coverage}});
    }
    summary << doc.dump(2) << '\n';
  }
  finish(summary, summary_path);

  for (const auto& r : runs) {
    const std::string tag = std::string(ihra::to_string(r.architecture)) + "_" + std::to_string(r.seed);
    const fs::path curve_path = out_dir / ("fig2_curve_" + tag + ".csv");
    auto curve = open_output(curve_path);
    ihra::write_curve_csv(curve, r.training.curve);
    finish(curve, curve_path);
    ihra::save_model(out_dir / ("fig2_model_" + tag + ".json"), r.training.model, spec.training);
  }

  // Per-slot trace of the first seed: both models on the same held-out slots.
  if (runs.size() >= 2) {
    const fs::path trace_path = out_dir / "fig2_trace.csv";
    auto trace = open_output(trace_path);
    trace << "slot,actual,peak,attention,plain\n";
    const auto& a = runs[0].test;
    const auto& p = runs[1].test;
    for (std::size_t k = 0; k < a.predictions.size(); ++k) {
      trace << k << ',' << a.actual[k] << ',' << a.peaks[k] << ',' << ihra::round_prediction(a.predictions[k])
            << ',' << ihra::round_prediction(p.predictions[k]) << '\n';
    }
    finish(trace, trace_path);
  }

  ihra::write_fig2_summary_csv(std::cout, runs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid random access simulator (TA-aided mMTC access, predicted URLLC access)"};
  Options opt;
  auto* preset = app.add_option("--preset", opt.preset, "Figure preset")->check(CLI::IsMember({"fig2", "fig4", "fig5"}));
  auto* spec = app.add_option("--spec", opt.spec_path, "Experiment file (key = value lines)");
  preset->excludes(spec);
  spec->excludes(preset);
  app.add_option("--seed", opt.seed, "Base seed");
  app.add_option("--trials", opt.trials, "Trials per grid point (fig2: number of training seeds)")
      ->check(CLI::PositiveNumber);
  app.add_option("--epochs", opt.epochs, "Maximum predictor training epochs")->check(CLI::NonNegativeNumber);
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--scheme", opt.scheme, "Restrict to one scheme")
      ->check(CLI::IsMember({"ihra", "ihra-random", "tara"}));
  app.add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (opt.preset.empty() && opt.spec_path.empty()) {
    std::cerr << "error: one of --preset or --spec is required\n";
    return kExitConfig;
  }

  try {
    const fs::path out_dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ihra::IoError("cannot create " + out_dir.string() + ": " + ec.message());

    if (opt.preset == "fig2") {
      run_predictor_comparison(opt, out_dir);
    } else if (opt.preset == "fig4") {
      run_grid(ihra::preset_fig4(), opt, out_dir);
    } else if (opt.preset == "fig5") {
      run_grid(ihra::preset_fig5(), opt, out_dir);
    } else {
      run_grid(ihra::load_spec(opt.spec_path), opt, out_dir);
    }
  } catch (const ihra::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ihra::InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ihra::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
