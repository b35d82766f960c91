#include "ispu/features.hpp"

#include <algorithm>
#include <string>

#include "ispu/error.hpp"

namespace ispu {
namespace {

void require_window(std::span<const std::int16_t> window) {
  if (window.size() != kWindowLength) {
    throw Error(ErrorKind::kContract,
                "window must hold " + std::to_string(kWindowLength) +
                    " samples, got " + std::to_string(window.size()));
  }
}

std::int64_t integer_sum(std::span<const std::int16_t> window) {
  std::int64_t sum = 0;
  for (std::int16_t v : window) sum += v;
  return sum;
}

}  // namespace

void AxisBuffer::push(std::int16_t sample) {
  data_[head_] = sample;
  head_ = (head_ + 1) % kCapacity;
  if (fill_ < kCapacity) ++fill_;
}

void AxisBuffer::clear() {
  head_ = 0;
  fill_ = 0;
}

std::int16_t AxisBuffer::operator[](std::size_t i) const {
  const std::size_t oldest = (head_ + kCapacity - fill_) % kCapacity;
  return data_[(oldest + i) % kCapacity];
}

std::array<std::int16_t, AxisBuffer::kCapacity> AxisBuffer::window() const {
  if (!full()) throw Error(ErrorKind::kContract, "axis buffer is not full");
  std::array<std::int16_t, kCapacity> out{};
  // When full, head_ is also the oldest slot.
  std::rotate_copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(head_),
                   data_.end(), out.begin());
  return out;
}

double window_mean(std::span<const std::int16_t> window) {
  require_window(window);
  return static_cast<double>(integer_sum(window)) / static_cast<double>(kWindowLength);
}

double window_median(std::span<const std::int16_t> window) {
  require_window(window);
  std::array<std::int16_t, kWindowLength> scratch{};
  std::copy(window.begin(), window.end(), scratch.begin());
  constexpr std::size_t upper = kWindowLength / 2;  // 17th order statistic
  std::nth_element(scratch.begin(), scratch.begin() + upper, scratch.end());
  const std::int32_t hi = scratch[upper];
  const std::int32_t lo = *std::max_element(scratch.begin(), scratch.begin() + upper);
  return static_cast<double>(lo + hi) / 2.0;
}

double window_variance(std::span<const std::int16_t> window) {
  require_window(window);
  // Exact in double: the mean has at most five fractional bits, so every
  // deviation and square is representable and the sum stays below 2^53.
  const double mean = window_mean(window);
  double acc = 0.0;
  for (std::int16_t v : window) {
    const double d = static_cast<double>(v) - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(kWindowLength);
}

std::pair<double, double> window_minmax(std::span<const std::int16_t> window) {
  require_window(window);
  auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  return {static_cast<double>(*lo), static_cast<double>(*hi)};
}

AxisFeatures axis_features(std::span<const std::int16_t> window) {
  AxisFeatures f;
  f.mean = window_mean(window);
  f.median = window_median(window);
  f.variance = window_variance(window);
  std::tie(f.min, f.max) = window_minmax(window);
  return f;
}

std::array<double, kFeatureSetSize> FeatureSet::flatten() const {
  std::array<double, kFeatureSetSize> out{};
  std::size_t k = 0;
  for (const AxisFeatures& a : axes) {
    out[k++] = a.mean;
    out[k++] = a.median;
    out[k++] = a.variance;
    out[k++] = a.max;
    out[k++] = a.min;
  }
  return out;
}

FeatureVector make_feature_vector(const FeatureSet& current,
                                  const FeatureSet& previous) {
  FeatureVector v{};
  const auto now = current.flatten();
  const auto before = previous.flatten();
  std::copy(now.begin(), now.end(), v.begin());
  std::copy(before.begin(), before.end(), v.begin() + kFeatureSetSize);
  return v;
}

std::optional<FeaturesReady> FeatureExtractor::push(const Acquisition& acquisition) {
  if (last_index_ && acquisition.index != *last_index_ + 1) {
    throw Error(ErrorKind::kStreamDiscontinuity,
                "expected acquisition " + std::to_string(*last_index_ + 1) +
                    ", got " + std::to_string(acquisition.index));
  }
  last_index_ = acquisition.index;
  ++seen_;

  buffers_[0].push(acquisition.x);
  buffers_[1].push(acquisition.y);
  buffers_[2].push(acquisition.z);

  if (seen_ % static_cast<std::int64_t>(kWindowPeriod) != 0) return std::nullopt;

  FeatureSet set;
  set.window_index = ++windows_;
  for (std::size_t axis = 0; axis < kAxes; ++axis) {
    const auto window = buffers_[axis].window();
    set.axes[axis] = axis_features(window);
  }

  std::shift_right(history_.begin(), history_.end(), 1);
  history_[0] = set;
  if (history_fill_ < kHistoryDepth) ++history_fill_;
  if (history_fill_ < kHistoryDepth) return std::nullopt;

  FeaturesReady ready;
  ready.window_index = set.window_index;
  ready.acquisition_index = acquisition.index;
  ready.features = make_feature_vector(history_[0], history_[1]);
  return ready;
}

void FeatureExtractor::reset() { *this = FeatureExtractor{}; }

}  // namespace ispu
