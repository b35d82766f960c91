#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ispu/features.hpp"
#include "ispu/labels.hpp"

namespace ispu {

inline constexpr double kDefaultBnEpsilon = 1e-3;

// Per-dimension batch normalization: y = gamma (x - mu) / sqrt(sigma^2 + eps) + beta.
struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> mu;
  std::vector<double> sigma;
  double epsilon = kDefaultBnEpsilon;

  std::size_t size() const { return gamma.size(); }

  static BatchNormParams identity(std::size_t n, double epsilon = 0.0);

  // Throws Error{kValidation} on ragged arrays, sigma < 0, epsilon < 0 or a
  // zero denominator.
  void validate() const;
};

std::vector<double> batchnorm_apply(std::span<const double> x,
                                    const BatchNormParams& p);

enum class Activation { kNone, kRelu, kSoftmax };

const char* to_string(Activation a);

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // row-major, out x in
  std::vector<double> bias;     // out
  Activation activation = Activation::kNone;

  double weight(std::size_t row, std::size_t col) const {
    return weights[row * in + col];
  }
  void validate() const;
};

std::vector<double> dense_forward(std::span<const double> x,
                                  const DenseLayer& layer);

std::vector<double> softmax(std::span<const double> z);

struct Prediction {
  std::array<double, kNumClasses> probabilities{};
  ClassLabel label = ClassLabel::kIdle;
};

// Lowest index wins ties.
ClassLabel argmax_label(std::span<const double> values);

struct FloatModel {
  BatchNormParams input_bn;
  std::vector<DenseLayer> layers;

  std::vector<std::size_t> hidden_widths() const;

  // Checks the input-30 / output-5 contract, relu hidden layers, softmax last
  // layer and dimensional chaining. Throws LayerError naming the layer.
  void validate() const;
};

enum class Precision { kFloat64, kFloat32 };

// BN -> dense/relu* -> dense/softmax. kFloat32 mirrors a single-precision FPU
// datapath and is only accurate to float rounding.
Prediction float_infer(std::span<const double> features, const FloatModel& m,
                       Precision precision = Precision::kFloat64);

}  // namespace ispu
