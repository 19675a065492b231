#include "ihra/spec_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ihra/errors.hpp"
#include "ihra/report.hpp"

namespace ihra {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key, "empty list entry");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError(key, "empty value");
  return items;
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key, "cannot parse '" + text + "'");
  }
  return value;
}

template <typename T>
std::vector<T> numbers(const std::string& key, const std::string& value) {
  std::vector<T> out;
  for (const auto& item : split_list(key, value)) out.push_back(number<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += format_double(values[k]);
    else out += std::to_string(values[k]);
  }
  return out;
}

using Setter = std::function<void(ExperimentSpec&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](ExperimentSpec& s, const std::string&, const std::string& v) { s.name = v; }},
      {"schemes",
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         s.schemes.clear();
         for (const auto& item : split_list(k, v)) s.schemes.push_back(parse_scheme(item));
       }},
      {"cell_radius_m", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.cell_radii_m = numbers<double>(k, v); }},
      {"quantum_m", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.quantum_m = number<double>(k, v); }},
      {"num_preambles", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.num_preambles = numbers<int>(k, v); }},
      {"active_mmtc", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.active_mmtc = numbers<int>(k, v); }},
      {"power_levels", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.power_levels = number<int>(k, v); }},
      {"unmatched_levels",
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         if (v == "below_top") s.unmatched_levels = UnmatchedLevels::below_top;
         else if (v == "all") s.unmatched_levels = UnmatchedLevels::all;
         else throw ConfigError(k, "expected 'below_top' or 'all', got '" + v + "'");
       }},
      {"urllc_mode",
       [](ExperimentSpec& s, const std::string& k, const std::string& v) {
         if (v == "fixed") s.urllc.kind = UrllcMode::Kind::fixed;
         else if (v == "poisson") s.urllc.kind = UrllcMode::Kind::poisson;
         else throw ConfigError(k, "expected 'fixed' or 'poisson', got '" + v + "'");
       }},
      {"urllc_count", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.urllc.fixed_count = number<int>(k, v); }},
      {"urllc_lambda", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.urllc.lambda = number<double>(k, v); }},
      {"trials", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.trials = number<int>(k, v); }},
      {"seed", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.seed = number<std::uint64_t>(k, v); }},
      {"detection_miss_probability",
       [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.detection_miss_probability = number<double>(k, v); }},
      {"predictor_window", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.window = number<int>(k, v); }},
      {"predictor_hidden_size", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.hidden_size = number<int>(k, v); }},
      {"predictor_epochs", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.epochs = number<int>(k, v); }},
      {"predictor_learning_rate", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.learning_rate = number<double>(k, v); }},
      {"predictor_batch_size", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.batch_size = number<int>(k, v); }},
      {"predictor_patience", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.patience = number<int>(k, v); }},
      {"predictor_training_slots", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training_slots = number<int>(k, v); }},
      {"predictor_seed", [](ExperimentSpec& s, const std::string& k, const std::string& v) { s.predictor.training.seed = number<std::uint64_t>(k, v); }},
  };
  return table;
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in) {
  ExperimentSpec spec;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    it->second(spec, key, value);
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spec file " + path);
  return parse_spec(in);
}

std::string dump_spec(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name << '\n';
  out << "schemes = ";
  for (std::size_t k = 0; k < spec.schemes.size(); ++k) out << (k ? "," : "") << to_string(spec.schemes[k]);
  out << '\n';
  out << "cell_radius_m = " << join(spec.cell_radii_m) << '\n';
  out << "quantum_m = " << format_double(spec.quantum_m) << '\n';
  out << "num_preambles = " << join(spec.num_preambles) << '\n';
  out << "active_mmtc = " << join(spec.active_mmtc) << '\n';
  out << "power_levels = " << spec.power_levels << '\n';
  out << "unmatched_levels = " << (spec.unmatched_levels == UnmatchedLevels::below_top ? "below_top" : "all") << '\n';
  out << "urllc_mode = " << (spec.urllc.kind == UrllcMode::Kind::fixed ? "fixed" : "poisson") << '\n';
  out << "urllc_count = " << spec.urllc.fixed_count << '\n';
  out << "urllc_lambda = " << format_double(spec.urllc.lambda) << '\n';
  out << "trials = " << spec.trials << '\n';
  out << "seed = " << spec.seed << '\n';
  out << "detection_miss_probability = " << format_double(spec.detection_miss_probability) << '\n';
  const auto& t = spec.predictor.training;
  out << "predictor_window = " << t.window << '\n';
  out << "predictor_hidden_size = " << t.hidden_size << '\n';
  out << "predictor_epochs = " << t.epochs << '\n';
  out << "predictor_learning_rate = " << format_double(t.learning_rate) << '\n';
  out << "predictor_batch_size = " << t.batch_size << '\n';
  out << "predictor_patience = " << t.patience << '\n';
  out << "predictor_training_slots = " << spec.predictor.training_slots << '\n';
  out << "predictor_seed = " << t.seed << '\n';
  return out.str();
}

}  // namespace ihra
