#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ispu/binary.hpp"
#include "ispu/cost.hpp"
#include "ispu/dense.hpp"

namespace ispu {

inline constexpr std::string_view kModelFormatVersion = "1";
inline constexpr std::string_view kModelExtension = ".ispu-model";
inline constexpr std::string_view kFeatureOrderTag = "St|St-1;xyz;mean,median,variance,max,min";

struct ModelMetadata {
  std::vector<std::string> class_names;  // empty: defaults
  std::string feature_order;             // empty: kFeatureOrderTag
  std::string note;
};

using Model = std::variant<FloatModel, BinaryModel>;

struct LoadedModel {
  Model model;
  ModelMetadata metadata;
};

ModelArchitecture architecture_of(const FloatModel& m);
ModelArchitecture architecture_of(const BinaryModel& m);
ModelArchitecture architecture_of(const Model& m);

Prediction infer(std::span<const double> features, const Model& m);

// Deterministic document; ends with a newline.
std::string serialize_model(const Model& m, const ModelMetadata& meta = {});

// Throws Error{kParse} for malformed text, LayerError{kValidation |
// kWidthLegality | kDegenerateNeuron} for structural problems.
LoadedModel parse_model(std::string_view text);

void save_model(const Model& m, const std::filesystem::path& path,
                const ModelMetadata& meta = {});
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace ispu
