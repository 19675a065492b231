#include "ihra/model_io.hpp"

#include <fstream>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

namespace {

constexpr const char* kFormatName = "ihra-predictor";
constexpr std::array<const char*, 4> kGateNames{"forget", "update", "candidate", "output"};

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("shape").at(0).get<Eigen::Index>();
  const auto cols = j.at("shape").at(1).get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw IoError("model json: matrix data does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

nlohmann::json lstm_to_json(const LstmParams& p) {
  nlohmann::json gates;
  for (std::size_t k = 0; k < 4; ++k) {
    gates[kGateNames[k]] = {{"weight", matrix_to_json(p.weight[k])}, {"bias", vector_to_json(p.bias[k])}};
  }
  return {{"input_size", p.input_size}, {"hidden_size", p.hidden_size}, {"gates", gates}};
}

LstmParams lstm_from_json(const nlohmann::json& j) {
  LstmParams p;
  p.input_size = j.at("input_size").get<int>();
  p.hidden_size = j.at("hidden_size").get<int>();
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& g = j.at("gates").at(kGateNames[k]);
    p.weight[k] = matrix_from_json(g.at("weight"));
    p.bias[k] = vector_from_json(g.at("bias"));
  }
  return p;
}

}  // namespace

nlohmann::json model_to_json(const PredictorModel& model, const std::optional<TrainingOptions>& hyper) {
  nlohmann::json doc;
  doc["format"] = kFormatName;
  doc["version"] = kModelFormatVersion;
  doc["architecture"] = std::string(to_string(model.architecture));
  doc["window"] = model.window;
  doc["horizon"] = model.horizon;
  doc["input_scale"] = model.input_scale;
  doc["lstm1"] = lstm_to_json(model.lstm1);
  if (model.architecture == Architecture::attention) {
    doc["attention"] = {{"hidden_size", model.attention.hidden_size},
                        {"attention_size", model.attention.attention_size},
                        {"w_keys", matrix_to_json(model.attention.w_keys)},
                        {"w_query", matrix_to_json(model.attention.w_query)},
                        {"v", vector_to_json(model.attention.v)}};
  } else {
    doc["attention"] = nullptr;
  }
  doc["lstm2"] = lstm_to_json(model.lstm2);
  doc["fc"] = {{"weight", vector_to_json(model.fc_weight)}, {"bias", model.fc_bias}};
  if (hyper) {
    doc["hyperparameters"] = {{"learning_rate", hyper->learning_rate},
                              {"epochs", hyper->epochs},
                              {"window", hyper->window},
                              {"horizon", hyper->horizon},
                              {"hidden_size", hyper->hidden_size},
                              {"seed", hyper->seed},
                              {"batch_size", hyper->batch_size},
                              {"clip_norm", hyper->clip_norm},
                              {"validation_fraction", hyper->validation_fraction},
                              {"patience", hyper->patience}};
  }
  return doc;
}

PredictorModel model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormatName) throw IoError("model json: wrong format tag");
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw IoError("model json: unsupported version " + doc.at("version").dump());
    }
    PredictorModel m;
    m.architecture = parse_architecture(doc.at("architecture").get<std::string>());
    m.window = doc.at("window").get<int>();
    m.horizon = doc.at("horizon").get<int>();
    m.input_scale = doc.at("input_scale").get<double>();
    m.lstm1 = lstm_from_json(doc.at("lstm1"));
    if (m.architecture == Architecture::attention) {
      const auto& a = doc.at("attention");
      m.attention.hidden_size = a.at("hidden_size").get<int>();
      m.attention.attention_size = a.at("attention_size").get<int>();
      m.attention.w_keys = matrix_from_json(a.at("w_keys"));
      m.attention.w_query = matrix_from_json(a.at("w_query"));
      m.attention.v = vector_from_json(a.at("v"));
    }
    m.lstm2 = lstm_from_json(doc.at("lstm2"));
    m.fc_weight = vector_from_json(doc.at("fc").at("weight"));
    m.fc_bias = doc.at("fc").at("bias").get<double>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model json: ") + e.what());
  } catch (const InputError& e) {
    throw IoError(std::string("model json: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const PredictorModel& model,
                const std::optional<TrainingOptions>& hyper) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model, hyper).dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

PredictorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace ihra
