#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ihra/access.hpp"
#include "ihra/errors.hpp"
#include "ihra/harness.hpp"
#include "ihra/model_io.hpp"
#include "ihra/report.hpp"
#include "ihra/spec_file.hpp"

namespace py = pybind11;
using namespace ihra;

namespace {

PyObject* config_error_type = nullptr;

py::dict outcome_dict(const SlotOutcome& o) {
  py::dict d;
  d["mmtc_success"] = o.mmtc_success;
  d["mmtc_failed_no_rar"] = o.mmtc_failed_no_rar;
  d["mmtc_failed_collision"] = o.mmtc_failed_collision;
  d["urllc_success"] = o.urllc_success;
  d["urllc_actual"] = o.urllc_actual;
  d["urllc_predicted"] = o.urllc_predicted;
  return d;
}

UrllcSeries as_series(const std::vector<int>& counts) {
  UrllcSeries s;
  s.counts = counts;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid random access simulator and attention-LSTM traffic predictor";

  // ConfigError carries the offending field as `.field`.
  config_error_type = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError).ptr();
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::object err = py::reinterpret_borrow<py::object>(config_error_type)(std::string(e.what()));
      err.attr("field") = e.field();
      PyErr_SetObject(config_error_type, err.ptr());
    }
  });

  m.attr("DEFAULT_QUANTUM_M") = kDefaultQuantumM;
  m.attr("RESULT_CSV_HEADER") = kResultCsvHeader;

  // geometry and preambles
  m.def("annulus_count", &annulus_count, py::arg("cell_radius_m"), py::arg("quantum_m") = kDefaultQuantumM);
  m.def("ta_index", &ta_index, py::arg("distance_m"), py::arg("quantum_m"), py::arg("annuli"));
  m.def("subcarrier_start", &subcarrier_start, py::arg("annuli"), py::arg("ta_index"));

  // access
  m.def(
      "sic_decode",
      [](const std::vector<std::vector<DeviceId>>& levels) {
        RbLoad load(static_cast<int>(levels.size()));
        for (std::size_t k = 0; k < levels.size(); ++k) {
          for (DeviceId d : levels[k]) load.add(d, static_cast<int>(k) + 1);
        }
        return sic_decode(load);
      },
      py::arg("levels"),
      "Devices decoded from one resource block. levels[0] holds the devices on power level 1 (weakest).");
  m.def("urllc_round", &urllc_round, py::arg("predicted"), py::arg("actual"));
  m.def(
      "tara_slot",
      [](int mmtc, int urllc, int preambles, std::uint64_t seed) {
        Rng rng(seed);
        return outcome_dict(tara_slot(mmtc, urllc, preambles, rng));
      },
      py::arg("mmtc"), py::arg("urllc"), py::arg("num_preambles"), py::arg("seed"));
  m.def(
      "ihra_slot",
      [](double radius, int preambles, int mmtc, int power_levels, const std::string& policy,
         int urllc_actual, int urllc_predicted, std::uint64_t seed) {
        AccessConfig config;
        config.geometry = GeometryConfig::make(radius);
        config.num_preambles = preambles;
        config.power_levels = power_levels;
        if (policy == "ihra") config.policy = PowerPolicy::ihra;
        else if (policy == "ihra-random") config.policy = PowerPolicy::ihra_random;
        else throw ConfigError("policy", "expected 'ihra' or 'ihra-random'");
        Rng rng(seed);
        const auto population = activate_mmtc(mmtc, config.geometry, rng);
        return outcome_dict(ihra_slot(config, population, urllc_actual, urllc_predicted, rng));
      },
      py::arg("cell_radius_m"), py::arg("num_preambles"), py::arg("mmtc"), py::arg("power_levels") = 4,
      py::arg("policy") = "ihra", py::arg("urllc_actual") = 0, py::arg("urllc_predicted") = 0,
      py::arg("seed") = 1);

  // traffic and prediction helpers
  m.def(
      "poisson_series",
      [](double lambda, std::size_t slots, std::uint64_t seed) {
        Rng rng(seed);
        return poisson_series(lambda, slots, rng).counts;
      },
      py::arg("lam"), py::arg("slots"), py::arg("seed"));
  m.def("peak_targets", [](const std::vector<int>& s, int h) { return peak_targets(s, h); },
        py::arg("series"), py::arg("horizon"));
  m.def("round_prediction", &round_prediction, py::arg("y"));

  // predictor
  py::class_<TrainingOptions>(m, "TrainingOptions")
      .def(py::init<>())
      .def_property(
          "architecture", [](const TrainingOptions& o) { return std::string(to_string(o.architecture)); },
          [](TrainingOptions& o, const std::string& v) { o.architecture = parse_architecture(v); })
      .def_readwrite("learning_rate", &TrainingOptions::learning_rate)
      .def_readwrite("epochs", &TrainingOptions::epochs)
      .def_readwrite("window", &TrainingOptions::window)
      .def_readwrite("horizon", &TrainingOptions::horizon)
      .def_readwrite("hidden_size", &TrainingOptions::hidden_size)
      .def_readwrite("seed", &TrainingOptions::seed)
      .def_readwrite("batch_size", &TrainingOptions::batch_size)
      .def_readwrite("clip_norm", &TrainingOptions::clip_norm)
      .def_readwrite("validation_fraction", &TrainingOptions::validation_fraction)
      .def_readwrite("patience", &TrainingOptions::patience)
      .def_readwrite("input_scale", &TrainingOptions::input_scale);

  py::class_<PredictorModel>(m, "PredictorModel")
      .def_property_readonly("architecture", [](const PredictorModel& p) { return std::string(to_string(p.architecture)); })
      .def_readonly("window", &PredictorModel::window)
      .def_readonly("horizon", &PredictorModel::horizon)
      .def_property_readonly("hidden_size", &PredictorModel::hidden_size)
      .def_property_readonly("parameter_count", &PredictorModel::parameter_count)
      .def("forward", [](const PredictorModel& p, const std::vector<double>& w) { return forward(w, p); },
           py::arg("window"))
      .def("gradient_check",
           [](const PredictorModel& p, const std::vector<double>& w, double target) {
             return gradient_check(p, Sample{w, target});
           },
           py::arg("window"), py::arg("target"))
      .def("to_json", [](const PredictorModel& p) { return model_to_json(p).dump(); })
      .def_static("from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); })
      .def_static(
          "random",
          [](const std::string& arch, int window, int hidden, std::uint64_t seed) {
            Rng rng(seed);
            return PredictorModel::random({parse_architecture(arch), window, 5, hidden, 20.0}, rng);
          },
          py::arg("architecture"), py::arg("window"), py::arg("hidden_size"), py::arg("seed"));

  m.def(
      "train",
      [](const std::vector<int>& series, const TrainingOptions& options) {
        auto result = train(as_series(series), options);
        py::list curve;
        for (const auto& r : result.curve) curve.append(py::make_tuple(r.epoch, r.train_rmse, r.val_rmse));
        return py::make_tuple(std::move(result.model), curve);
      },
      py::arg("series"), py::arg("options") = TrainingOptions{},
      "Returns (model, curve) where curve holds (epoch, train_rmse, val_rmse).");
  m.def(
      "evaluate",
      [](const PredictorModel& model, const std::vector<int>& series) {
        const auto ev = evaluate(model, as_series(series));
        py::dict d;
        d["rmse"] = ev.rmse;
        d["coverage"] = ev.coverage;
        d["peak_coverage"] = ev.peak_coverage;
        d["predictions"] = ev.predictions;
        return d;
      },
      py::arg("model"), py::arg("series"));

  // experiments
  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("name", &ExperimentSpec::name)
      .def_property(
          "schemes",
          [](const ExperimentSpec& s) {
            std::vector<std::string> out;
            for (auto x : s.schemes) out.emplace_back(to_string(x));
            return out;
          },
          [](ExperimentSpec& s, const std::vector<std::string>& v) {
            s.schemes.clear();
            for (const auto& x : v) s.schemes.push_back(parse_scheme(x));
          })
      .def_readwrite("cell_radii_m", &ExperimentSpec::cell_radii_m)
      .def_readwrite("quantum_m", &ExperimentSpec::quantum_m)
      .def_readwrite("num_preambles", &ExperimentSpec::num_preambles)
      .def_readwrite("active_mmtc", &ExperimentSpec::active_mmtc)
      .def_readwrite("power_levels", &ExperimentSpec::power_levels)
      .def_property(
          "urllc_count", [](const ExperimentSpec& s) { return s.urllc.fixed_count; },
          [](ExperimentSpec& s, int v) { s.urllc.fixed_count = v; })
      .def_readwrite("trials", &ExperimentSpec::trials)
      .def_readwrite("seed", &ExperimentSpec::seed)
      .def_readwrite("detection_miss_probability", &ExperimentSpec::detection_miss_probability)
      .def("validate", &ExperimentSpec::validate)
      .def("dump", [](const ExperimentSpec& s) { return dump_spec(s); });

  m.def("preset_fig4", &preset_fig4);
  m.def("preset_fig5", &preset_fig5);
  m.def("parse_spec", [](const std::string& text) {
    std::istringstream in(text);
    return parse_spec(in);
  });
  m.def(
      "run_experiment",
      [](const ExperimentSpec& spec) {
        const auto rows = run_experiment(spec);
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["scheme"] = std::string(to_string(r.scheme));
          d["R"] = r.cell_radius_m;
          d["num_preambles"] = r.num_preambles;
          d["Na"] = r.active_mmtc;
          d["trials"] = r.trials;
          d["mean_success"] = r.mean_success;
          d["ci95"] = r.ci95;
          d["mean_urllc_success"] = r.mean_urllc_success;
          out.append(d);
        }
        return out;
      },
      py::arg("spec"));
  m.def(
      "run_experiment_csv",
      [](const ExperimentSpec& spec) {
        std::ostringstream out;
        write_results_csv(out, run_experiment(spec));
        return out.str();
      },
      py::arg("spec"));
}
