#include "ispu/binary.hpp"

#include <bit>
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

void require_word_multiple(std::size_t bits, const char* what) {
  if (bits % kWordBits != 0) {
    throw Error(ErrorKind::kWidthLegality, std::string(what) + " width " +
                                               std::to_string(bits) +
                                               " is not a multiple of 32");
  }
}

}  // namespace

BitVector::BitVector(std::size_t bits) : bits_(bits) {
  require_word_multiple(bits, "bit vector");
  words_.assign(bits / kWordBits, 0u);
}

BitVector::BitVector(std::size_t bits, std::vector<std::uint32_t> words)
    : bits_(bits), words_(std::move(words)) {
  require_word_multiple(bits, "bit vector");
  require_size(words_.size(), bits / kWordBits, "packed words");
}

void BitVector::set(std::size_t i, bool value) {
  const std::uint32_t mask = 1u << (i % kWordBits);
  if (value) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

std::vector<double> pad_input(std::span<const double> features) {
  require_size(features.size(), kFeatureVectorSize, "feature vector");
  std::vector<double> padded(kBinaryInputSize, 0.0);
  std::copy(features.begin(), features.end(), padded.begin());
  return padded;
}

BitVector binarize(std::span<const double> x, const BatchNormParams& p) {
  require_size(x.size(), kBinaryInputSize, "binarize input");
  const std::vector<double> y = batchnorm_apply(x, p);
  BitVector bits(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) bits.set(i, y[i] >= 0.0);
  return bits;
}

std::int64_t xnor_dot(const BitVector& a, const BitVector& b) {
  require_size(b.size(), a.size(), "xnor operand");
  const auto wa = a.words();
  const auto wb = b.words();
  std::int64_t mismatches = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) mismatches += std::popcount(wa[i] ^ wb[i]);
  return static_cast<std::int64_t>(a.size()) - 2 * mismatches;
}

FoldedThreshold fold_bn_threshold(double gamma, double beta, double mu, double sigma,
                                  double epsilon) {
  if (gamma == 0.0) {
    throw Error(ErrorKind::kDegenerateNeuron, "batch-norm gamma is zero");
  }
  if (sigma < 0.0 || epsilon < 0.0 || sigma * sigma + epsilon <= 0.0) {
    throw Error(ErrorKind::kValidation, "batch-norm denominator must be positive");
  }
  FoldedThreshold t;
  t.tau = mu - beta * std::sqrt(sigma * sigma + epsilon) / gamma;
  t.flip = gamma < 0.0;
  return t;
}

void BinaryDenseLayer::validate() const {
  require_word_multiple(in, "layer input");
  if (rows.empty()) throw Error(ErrorKind::kValidation, "binary layer has no neurons");
  for (const BitVector& row : rows) {
    if (row.size() != in) {
      throw Error(ErrorKind::kValidation, "weight row length " + std::to_string(row.size()) +
                                              " differs from input width " +
                                              std::to_string(in));
    }
  }
  if (!is_final) {
    if (tau.size() != rows.size() || flip.size() != rows.size()) {
      throw Error(ErrorKind::kValidation, "threshold count differs from neuron count");
    }
    for (double t : tau) {
      if (std::isnan(t)) throw Error(ErrorKind::kValidation, "threshold is NaN");
    }
  }
}

std::vector<std::int64_t> binary_preactivations(const BitVector& x,
                                                const BinaryDenseLayer& layer) {
  require_size(x.size(), layer.in, "binary layer input");
  std::vector<std::int64_t> pre(layer.rows.size());
  for (std::size_t j = 0; j < layer.rows.size(); ++j) pre[j] = xnor_dot(x, layer.rows[j]);
  return pre;
}

BitVector binary_dense_forward(const BitVector& x, const BinaryDenseLayer& layer) {
  if (layer.is_final) {
    throw Error(ErrorKind::kContract, "final layer yields integer logits, not bits");
  }
  require_size(layer.tau.size(), layer.out(), "thresholds");
  require_size(layer.flip.size(), layer.out(), "flip flags");
  const auto pre = binary_preactivations(x, layer);
  BitVector out(layer.out());
  for (std::size_t j = 0; j < pre.size(); ++j) {
    out.set(j, (static_cast<double>(pre[j]) >= layer.tau[j]) != layer.flip[j]);
  }
  return out;
}

std::vector<std::size_t> BinaryModel::hidden_widths() const {
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) widths.push_back(layers[i].out());
  return widths;
}

void BinaryModel::validate() const {
  try {
    input_bn.validate();
  } catch (const Error& e) {
    throw LayerError(e.kind(), 0, e.what());
  }
  if (input_bn.size() != kBinaryInputSize) {
    throw LayerError(ErrorKind::kValidation, 0, "input batch-norm must have 32 entries");
  }
  for (std::size_t i = 0; i < input_bn.size(); ++i) {
    if (input_bn.gamma[i] == 0.0) {
      throw LayerError(ErrorKind::kDegenerateNeuron, 0,
                       "gamma[" + std::to_string(i) + "] is zero");
    }
  }
  if (layers.empty()) throw LayerError(ErrorKind::kValidation, 1, "model has no layers");
  std::size_t width = kBinaryInputSize;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const BinaryDenseLayer& layer = layers[i];
    const int index = static_cast<int>(i) + 1;
    const bool last = i + 1 == layers.size();
    if (layer.is_final != last) {
      throw LayerError(ErrorKind::kValidation, index,
                       last ? "last layer must be final" : "final layer before the end");
    }
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
    width = layer.out();
  }
  if (width != static_cast<std::size_t>(kNumClasses)) {
    throw LayerError(ErrorKind::kValidation, static_cast<int>(layers.size()),
                     "output width must be " + std::to_string(kNumClasses));
  }
  if (output_scale.size() != width || output_shift.size() != width) {
    throw LayerError(ErrorKind::kValidation, static_cast<int>(layers.size()),
                     "output affine must have one scale and shift per class");
  }
  for (std::size_t c = 0; c < width; ++c) {
    if (!std::isfinite(output_scale[c]) || !std::isfinite(output_shift[c])) {
      throw LayerError(ErrorKind::kValidation, static_cast<int>(layers.size()),
                       "output affine is not finite");
    }
  }
}

Prediction binary_infer(std::span<const double> features, const BinaryModel& m) {
  require_size(features.size(), kFeatureVectorSize, "feature vector");
  require_size(m.input_bn.size(), kBinaryInputSize, "model input");
  if (m.layers.empty() || !m.layers.back().is_final) {
    throw Error(ErrorKind::kDimension, "model has no final layer");
  }
  std::size_t width = kBinaryInputSize;
  for (const BinaryDenseLayer& layer : m.layers) {
    require_size(layer.in, width, "binary layer input");
    width = layer.out();
  }
  require_size(width, kNumClasses, "model output");
  require_size(m.output_scale.size(), kNumClasses, "output scale");
  require_size(m.output_shift.size(), kNumClasses, "output shift");

  BitVector act = binarize(pad_input(features), m.input_bn);
  for (std::size_t i = 0; i + 1 < m.layers.size(); ++i) {
    act = binary_dense_forward(act, m.layers[i]);
  }
  const auto logits = binary_preactivations(act, m.layers.back());
  std::vector<double> z(kNumClasses);
  for (std::size_t c = 0; c < z.size(); ++c) {
    z[c] = m.output_scale[c] * static_cast<double>(logits[c]) + m.output_shift[c];
  }
  const auto probs = softmax(z);
  Prediction p;
  std::copy(probs.begin(), probs.end(), p.probabilities.begin());
  p.label = argmax_label(p.probabilities);
  return p;
}

}  // namespace ispu
