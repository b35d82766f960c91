#include "ispu/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ispu/error.hpp"

namespace ispu {
namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::kDimension, std::string(what) + ": expected length " +
                                           std::to_string(want) + ", got " +
                                           std::to_string(got));
  }
}

template <typename T>
void softmax_in_place(std::span<T> z) {
  const T peak = *std::max_element(z.begin(), z.end());
  T total = 0;
  for (T& v : z) {
    v = std::exp(v - peak);
    total += v;
  }
  for (T& v : z) v /= total;
}

template <typename T>
std::vector<T> forward(std::span<const double> features, const FloatModel& m) {
  const BatchNormParams& bn = m.input_bn;
  std::vector<T> act(features.size());
  for (std::size_t i = 0; i < act.size(); ++i) {
    const T denom = std::sqrt(static_cast<T>(bn.sigma[i]) * static_cast<T>(bn.sigma[i]) +
                              static_cast<T>(bn.epsilon));
    act[i] = static_cast<T>(bn.gamma[i]) * (static_cast<T>(features[i]) -
                                            static_cast<T>(bn.mu[i])) / denom +
             static_cast<T>(bn.beta[i]);
  }
  std::vector<T> next;
  for (const DenseLayer& layer : m.layers) {
    next.assign(layer.out, T{0});
    for (std::size_t r = 0; r < layer.out; ++r) {
      T acc = static_cast<T>(layer.bias[r]);
      const double* row = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) acc += static_cast<T>(row[c]) * act[c];
      next[r] = acc;
    }
    if (layer.activation == Activation::kRelu) {
      for (T& v : next) v = std::max(v, T{0});
    } else if (layer.activation == Activation::kSoftmax) {
      softmax_in_place(std::span<T>(next));
    }
    act.swap(next);
  }
  return act;
}

}  // namespace

BatchNormParams BatchNormParams::identity(std::size_t n, double epsilon) {
  BatchNormParams p;
  p.gamma.assign(n, 1.0);
  p.beta.assign(n, 0.0);
  p.mu.assign(n, 0.0);
  p.sigma.assign(n, 1.0);
  p.epsilon = epsilon;
  return p;
}

void BatchNormParams::validate() const {
  const std::size_t n = gamma.size();
  if (beta.size() != n || mu.size() != n || sigma.size() != n) {
    throw Error(ErrorKind::kValidation, "batch-norm arrays differ in length");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::kValidation, "batch-norm epsilon must be >= 0");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(gamma[i]) || !std::isfinite(beta[i]) || !std::isfinite(mu[i]) ||
        !std::isfinite(sigma[i])) {
      throw Error(ErrorKind::kValidation,
                  "batch-norm entry " + std::to_string(i) + " is not finite");
    }
    if (sigma[i] < 0.0) {
      throw Error(ErrorKind::kValidation,
                  "batch-norm sigma[" + std::to_string(i) + "] is negative");
    }
    if (sigma[i] * sigma[i] + epsilon <= 0.0) {
      throw Error(ErrorKind::kValidation,
                  "batch-norm entry " + std::to_string(i) + " has zero variance");
    }
  }
}

std::vector<double> batchnorm_apply(std::span<const double> x,
                                    const BatchNormParams& p) {
  require_size(x.size(), p.size(), "batchnorm input");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = p.gamma[i] * (x[i] - p.mu[i]) / std::sqrt(p.sigma[i] * p.sigma[i] + p.epsilon) +
           p.beta[i];
  }
  return y;
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::kNone: return "none";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
  }
  return "none";
}

void DenseLayer::validate() const {
  if (in == 0 || out == 0) throw Error(ErrorKind::kValidation, "empty dense layer");
  if (weights.size() != in * out) {
    throw Error(ErrorKind::kValidation,
                "weight matrix has " + std::to_string(weights.size()) +
                    " entries, expected " + std::to_string(in * out));
  }
  if (bias.size() != out) {
    throw Error(ErrorKind::kValidation, "bias has " + std::to_string(bias.size()) +
                                            " entries, expected " + std::to_string(out));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorKind::kValidation, "non-finite weight");
  }
  for (double b : bias) {
    if (!std::isfinite(b)) throw Error(ErrorKind::kValidation, "non-finite bias");
  }
}

std::vector<double> dense_forward(std::span<const double> x, const DenseLayer& layer) {
  require_size(x.size(), layer.in, "dense input");
  require_size(layer.weights.size(), layer.in * layer.out, "dense weights");
  require_size(layer.bias.size(), layer.out, "dense bias");
  std::vector<double> y(layer.out);
  for (std::size_t r = 0; r < layer.out; ++r) {
    double acc = layer.bias[r];
    for (std::size_t c = 0; c < layer.in; ++c) acc += layer.weight(r, c) * x[c];
    y[r] = acc;
  }
  if (layer.activation == Activation::kRelu) {
    for (double& v : y) v = std::max(v, 0.0);
  } else if (layer.activation == Activation::kSoftmax) {
    softmax_in_place(std::span<double>(y));
  }
  return y;
}

std::vector<double> softmax(std::span<const double> z) {
  if (z.empty()) throw Error(ErrorKind::kDimension, "softmax of an empty vector");
  std::vector<double> y(z.begin(), z.end());
  softmax_in_place(std::span<double>(y));
  return y;
}

ClassLabel argmax_label(std::span<const double> values) {
  require_size(values.size(), kNumClasses, "class scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<ClassLabel>(best);
}

std::vector<std::size_t> FloatModel::hidden_widths() const {
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) widths.push_back(layers[i].out);
  return widths;
}

void FloatModel::validate() const {
  try {
    input_bn.validate();
  } catch (const Error& e) {
    throw LayerError(e.kind(), 0, e.what());
  }
  if (input_bn.size() != kFeatureVectorSize) {
    throw LayerError(ErrorKind::kValidation, 0,
                     "input batch-norm must have " +
                         std::to_string(kFeatureVectorSize) + " entries");
  }
  if (layers.empty()) throw LayerError(ErrorKind::kValidation, 1, "model has no dense layers");
  std::size_t width = kFeatureVectorSize;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const DenseLayer& layer = layers[i];
    const int index = static_cast<int>(i) + 1;
    try {
      layer.validate();
    } catch (const Error& e) {
      throw LayerError(e.kind(), index, e.what());
    }
    if (layer.in != width) {
      throw LayerError(ErrorKind::kValidation, index,
                       "input width " + std::to_string(layer.in) + " does not match " +
                           std::to_string(width));
    }
    const bool last = i + 1 == layers.size();
    if (last && layer.activation != Activation::kSoftmax) {
      throw LayerError(ErrorKind::kValidation, index, "final layer must use softmax");
    }
    if (!last && layer.activation != Activation::kRelu) {
      throw LayerError(ErrorKind::kValidation, index, "hidden layers must use relu");
    }
    width = layer.out;
  }
  if (width != static_cast<std::size_t>(kNumClasses)) {
    throw LayerError(ErrorKind::kValidation, static_cast<int>(layers.size()),
                     "output width must be " + std::to_string(kNumClasses));
  }
}

Prediction float_infer(std::span<const double> features, const FloatModel& m,
                       Precision precision) {
  require_size(features.size(), kFeatureVectorSize, "feature vector");
  require_size(m.input_bn.size(), kFeatureVectorSize, "model input");
  std::size_t width = kFeatureVectorSize;
  for (const DenseLayer& layer : m.layers) {
    require_size(layer.in, width, "dense input");
    require_size(layer.weights.size(), layer.in * layer.out, "dense weights");
    require_size(layer.bias.size(), layer.out, "dense bias");
    width = layer.out;
  }
  require_size(width, kNumClasses, "model output");
  Prediction p;
  if (precision == Precision::kFloat32) {
    const auto probs = forward<float>(features, m);
    require_size(probs.size(), kNumClasses, "model output");
    std::copy(probs.begin(), probs.end(), p.probabilities.begin());
  } else {
    const auto probs = forward<double>(features, m);
    require_size(probs.size(), kNumClasses, "model output");
    std::copy(probs.begin(), probs.end(), p.probabilities.begin());
  }
  p.label = argmax_label(p.probabilities);
  return p;
}

}  // namespace ispu
