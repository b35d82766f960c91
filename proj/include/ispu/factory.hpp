#pragma once

#include <cstdint>

#include "ispu/cost.hpp"
#include "ispu/model_io.hpp"

namespace ispu {

// Untrained models with a given shape. kZero yields uniform 0.2 outputs;
// kRandom draws every parameter from a seeded generator (test fixtures,
// benchmarking and format checks).
enum class ModelInit { kZero, kRandom };

FloatModel make_float_model(const ModelArchitecture& a, ModelInit init, std::uint64_t seed = 0);
BinaryModel make_binary_model(const ModelArchitecture& a, ModelInit init, std::uint64_t seed = 0);
Model make_model(const ModelArchitecture& a, ModelInit init, std::uint64_t seed = 0);

}  // namespace ispu
