#include <doctest.h>

#include <sstream>

#include "ihra/errors.hpp"
#include "ihra/spec_file.hpp"

using namespace ihra;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

std::string error_field(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("parses keys, lists and comments") {
  const auto s = parse(
      "# sweep\n"
      "name = sweep\n"
      "schemes = ihra, tara\n"
      "cell_radius_m = 800,1200   # two radii\n"
      "\n"
      "num_preambles = 10,20\n"
      "active_mmtc = 80\n"
      "power_levels = 3\n"
      "unmatched_levels = all\n"
      "urllc_count = 2\n"
      "trials = 50\n"
      "seed = 18446744073709551615\n");
  CHECK(s.name == "sweep");
  CHECK(s.schemes == std::vector<Scheme>{Scheme::ihra, Scheme::tara});
  CHECK(s.cell_radii_m == std::vector<double>{800.0, 1200.0});
  CHECK(s.num_preambles == std::vector<int>{10, 20});
  CHECK(s.power_levels == 3);
  CHECK(s.unmatched_levels == UnmatchedLevels::all);
  CHECK(s.urllc.fixed_count == 2);
  CHECK(s.trials == 50);
  CHECK(s.seed == 18446744073709551615ULL);
  CHECK(s.quantum_m == kDefaultQuantumM);
}

TEST_CASE("an empty document gives the defaults") {
  const auto s = parse("");
  const ExperimentSpec d;
  CHECK(s.trials == d.trials);
  CHECK(s.num_preambles == d.num_preambles);
}

TEST_CASE("errors name the key") {
  CHECK(error_field("trails = 10\n") == "trails");
  CHECK(error_field("trials = 10\ntrials = 20\n") == "trials");
  CHECK(error_field("trials = ten\n") == "trials");
  CHECK(error_field("trials = 10.5\n") == "trials");
  CHECK(error_field("num_preambles = 10,,20\n") == "num_preambles");
  CHECK(error_field("schemes = ihra, aloha\n") == "scheme");
  CHECK(error_field("urllc_mode = bursty\n") == "urllc_mode");
  CHECK(error_field("power_levels = 0\n") == "power_levels");
  CHECK(error_field("just text\n") == "line 1");
}

TEST_CASE("dump and parse round trip") {
  ExperimentSpec s;
  s.name = "rt";
  s.schemes = {Scheme::tara, Scheme::ihra_random};
  s.cell_radii_m = {812.5, 1200.0};
  s.quantum_m = 150.0;
  s.num_preambles = {7, 33};
  s.active_mmtc = {0, 5};
  s.unmatched_levels = UnmatchedLevels::all;
  s.urllc = UrllcMode{UrllcMode::Kind::poisson, 0, 0.1};
  s.trials = 3;
  s.seed = 77;
  s.detection_miss_probability = 0.1;
  s.predictor.training.learning_rate = 0.003;
  s.predictor.training.window = 6;
  s.predictor.training_slots = 500;
  const auto text = dump_spec(s);
  const auto back = parse(text);
  CHECK(dump_spec(back) == text);
  CHECK(back.cell_radii_m == s.cell_radii_m);
  CHECK(back.urllc.lambda == 0.1);
  CHECK(back.detection_miss_probability == 0.1);
  CHECK(back.predictor.training.learning_rate == 0.003);
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load_spec("/nonexistent/dir/spec.cfg"), IoError);
}
