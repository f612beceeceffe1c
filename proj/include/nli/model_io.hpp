#ifndef NLI_MODEL_IO_HPP
#define NLI_MODEL_IO_HPP

// JSON container for trained multiclass models.

#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include <json.hpp>

#include "nli/error.hpp"
#include "nli/learn.hpp"
#include "nli/vectorize.hpp"

namespace nli {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const MulticlassModel& model) {
  nlohmann::json j;
  j["format"] = "nli-model";
  j["version"] = kModelFormatVersion;
  j["vocabulary_hash"] = model.vocabulary_hash;
  j["dimension"] = model.dimension;
  auto& arr = j["models"] = nlohmann::json::array();
  for (const auto& m : model.models) {
    arr.push_back({{"label", m.positive_label},
                   {"bias", m.bias},
                   {"platt_a", m.platt.a},
                   {"platt_b", m.platt.b},
                   {"epochs", m.epochs},
                   {"converged", m.converged},
                   {"calibration_fallback", m.calibration_fallback},
                   {"weights", m.weights}});
  }
  return j;
}

inline void write_model(std::ostream& out, const MulticlassModel& model) {
  out << model_to_json(model).dump() << '\n';
}

// Refuses a model whose recorded vocabulary hash differs from `vocabulary`.
inline MulticlassModel read_model(std::istream& in, std::shared_ptr<const FeatureVocabulary> vocabulary) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format") != "nli-model") throw ValidationError("not an nli-model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw ValidationError("unsupported model version " + j.at("version").dump());
    MulticlassModel model;
    model.vocabulary_hash = j.at("vocabulary_hash").get<std::string>();
    model.dimension = j.at("dimension").get<std::size_t>();
    if (vocabulary) {
      if (vocabulary->hash() != model.vocabulary_hash)
        throw ValidationError("model was trained against vocabulary " + model.vocabulary_hash +
                              ", given vocabulary hashes to " + vocabulary->hash());
      if (vocabulary->size() != model.dimension)
        throw ValidationError("model dimension differs from vocabulary size");
    }
    for (const auto& m : j.at("models")) {
      BinaryLinearModel b;
      b.positive_label = m.at("label").get<std::string>();
      b.bias = m.at("bias").get<double>();
      b.platt.a = m.at("platt_a").get<double>();
      b.platt.b = m.at("platt_b").get<double>();
      b.epochs = m.at("epochs").get<int>();
      b.converged = m.at("converged").get<bool>();
      b.calibration_fallback = m.value("calibration_fallback", false);
      b.weights = m.at("weights").get<std::vector<double>>();
      if (b.weights.size() != model.dimension)
        throw ValidationError("weights of label '" + b.positive_label + "' have wrong dimension");
      model.models.push_back(std::move(b));
    }
    model.vocabulary = std::move(vocabulary);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace nli

#endif  // NLI_MODEL_IO_HPP
