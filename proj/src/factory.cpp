#include "ispu/factory.hpp"

#include <cmath>
#include <random>

#include "ispu/error.hpp"
#include "ispu/synth.hpp"

namespace ispu {

FloatModel make_float_model(const ModelArchitecture& a, ModelInit init, std::uint64_t seed) {
  if (a.kind != ModelKind::kFloat) throw Error(ErrorKind::kContract, "not a float architecture");
  a.validate();
  PortableNormal rng(seed);
  const bool random = init == ModelInit::kRandom;
  FloatModel m;
  m.input_bn = BatchNormParams::identity(a.input(), kDefaultBnEpsilon);
  if (random) {
    for (std::size_t i = 0; i < a.input(); ++i) {
      m.input_bn.gamma[i] = 0.5 + rng.uniform();
      m.input_bn.beta[i] = 0.2 * rng.normal();
      m.input_bn.mu[i] = rng.normal();
      m.input_bn.sigma[i] = 0.5 + rng.uniform();
    }
  }
  std::size_t prev = a.input();
  for (std::size_t i = 0; i <= a.hidden.size(); ++i) {
    const bool last = i == a.hidden.size();
    DenseLayer l;
    l.in = prev;
    l.out = last ? a.output : a.hidden[i];
    l.activation = last ? Activation::kSoftmax : Activation::kRelu;
    l.weights.assign(l.in * l.out, 0.0);
    l.bias.assign(l.out, 0.0);
    if (random) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(l.in));
      for (double& w : l.weights) w = scale * rng.normal();
      for (double& b : l.bias) b = 0.1 * rng.normal();
    }
    prev = l.out;
    m.layers.push_back(std::move(l));
  }
  return m;
}

BinaryModel make_binary_model(const ModelArchitecture& a, ModelInit init, std::uint64_t seed) {
  if (a.kind != ModelKind::kBinary) throw Error(ErrorKind::kContract, "not a binary architecture");
  a.validate();
  std::mt19937_64 bits(seed);
  PortableNormal rng(seed ^ 0x9e3779b97f4a7c15ull);
  const bool random = init == ModelInit::kRandom;
  BinaryModel m;
  m.input_bn = BatchNormParams::identity(a.input(), kDefaultBnEpsilon);
  if (random) {
    for (std::size_t i = 0; i < kFeatureVectorSize; ++i) {
      m.input_bn.gamma[i] = (rng.uniform() < 0.2 ? -1.0 : 1.0) * (0.5 + rng.uniform());
      m.input_bn.beta[i] = 0.2 * rng.normal();
      m.input_bn.mu[i] = rng.normal();
      m.input_bn.sigma[i] = 0.5 + rng.uniform();
    }
  }
  std::size_t prev = a.input();
  for (std::size_t i = 0; i <= a.hidden.size(); ++i) {
    const bool last = i == a.hidden.size();
    const std::size_t out = last ? a.output : a.hidden[i];
    BinaryDenseLayer l;
    l.in = prev;
    l.is_final = last;
    for (std::size_t j = 0; j < out; ++j) {
      std::vector<std::uint32_t> words(prev / kWordBits, 0u);
      if (random) {
        for (auto& w : words) w = static_cast<std::uint32_t>(bits());
      }
      l.rows.emplace_back(prev, std::move(words));
    }
    if (!last) {
      for (std::size_t j = 0; j < out; ++j) {
        // Half-integer offsets keep thresholds off the integer lattice.
        l.tau.push_back(random ? std::round(rng.normal() * 2.0) + 0.5 : 0.0);
        l.flip.push_back(random && rng.uniform() < 0.25);
      }
    }
    prev = out;
    m.layers.push_back(std::move(l));
  }
  m.output_scale.assign(a.output, 0.0);
  m.output_shift.assign(a.output, 0.0);
  if (random) {
    for (double& s : m.output_scale) s = 0.05 + 0.1 * rng.uniform();
    for (double& s : m.output_shift) s = 0.1 * rng.normal();
  }
  return m;
}

Model make_model(const ModelArchitecture& a, ModelInit init, std::uint64_t seed) {
  if (a.kind == ModelKind::kFloat) return make_float_model(a, init, seed);
  return make_binary_model(a, init, seed);
}

}  // namespace ispu
