#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ispu/dense.hpp"

namespace ispu {

inline constexpr std::size_t kWordBits = 32;
inline constexpr std::size_t kBinaryInputSize = 32;

// +/-1 vector packed into 32-bit words. Element i is bit (i % 32) of word
// (i / 32); a set bit encodes +1.
class BitVector {
 public:
  BitVector() = default;
  // Throws Error{kWidthLegality} unless bits is a multiple of 32.
  explicit BitVector(std::size_t bits);
  BitVector(std::size_t bits, std::vector<std::uint32_t> words);

  std::size_t size() const { return bits_; }
  std::span<const std::uint32_t> words() const { return words_; }

  bool get(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  void set(std::size_t i, bool value);

  bool operator==(const BitVector&) const = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint32_t> words_;
};

std::vector<double> pad_input(std::span<const double> features);

// bit_i = BN(x)_i >= 0.
BitVector binarize(std::span<const double> x, const BatchNormParams& p);

// n - 2 popcount(a ^ b).
std::int64_t xnor_dot(const BitVector& a, const BitVector& b);

struct FoldedThreshold {
  double tau = 0.0;
  bool flip = false;
};

// Turns BN followed by sign into (preact >= tau) XOR flip. gamma == 0 throws
// Error{kDegenerateNeuron}.
FoldedThreshold fold_bn_threshold(double gamma, double beta, double mu,
                                  double sigma, double epsilon);

struct BinaryDenseLayer {
  std::size_t in = 0;
  std::vector<BitVector> rows;  // one per output neuron
  std::vector<double> tau;      // hidden layers only
  std::vector<bool> flip;       // hidden layers only
  bool is_final = false;

  std::size_t out() const { return rows.size(); }
  void validate() const;
};

std::vector<std::int64_t> binary_preactivations(const BitVector& x,
                                                const BinaryDenseLayer& layer);

// Hidden layer: sign after the folded threshold. Requires !layer.is_final.
BitVector binary_dense_forward(const BitVector& x, const BinaryDenseLayer& layer);

struct BinaryModel {
  BatchNormParams input_bn;  // 32 entries; the two pad dims normally identity
  std::vector<BinaryDenseLayer> layers;  // last one is final
  std::vector<double> output_scale;      // per class
  std::vector<double> output_shift;      // per class

  std::vector<std::size_t> hidden_widths() const;
  void validate() const;
};

// pad -> BN -> binarize -> hidden layers -> integer logits -> affine -> softmax.
Prediction binary_infer(std::span<const double> features, const BinaryModel& m);

}  // namespace ispu
