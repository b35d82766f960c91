#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace ispu {

inline constexpr std::size_t kWindowLength = 32;  // N
inline constexpr std::size_t kWindowPeriod = 32;  // T
inline constexpr std::size_t kHistoryDepth = 2;   // L
inline constexpr std::size_t kAxes = 3;
inline constexpr std::size_t kFeaturesPerAxis = 5;
inline constexpr std::size_t kFeatureSetSize = kAxes * kFeaturesPerAxis;
inline constexpr std::size_t kFeatureVectorSize = kHistoryDepth * kFeatureSetSize;

struct Acquisition {
  std::int64_t index = 0;
  std::int16_t x = 0;
  std::int16_t y = 0;
  std::int16_t z = 0;
};

// Fixed-capacity ring of the most recent samples of one axis.
class AxisBuffer {
 public:
  static constexpr std::size_t kCapacity = kWindowLength;

  void push(std::int16_t sample);
  void clear();

  std::size_t size() const { return fill_; }
  bool full() const { return fill_ == kCapacity; }

  // Element i in arrival order, 0 = oldest retained sample.
  std::int16_t operator[](std::size_t i) const;

  // Copies the retained samples, oldest first. Requires full().
  std::array<std::int16_t, kCapacity> window() const;

 private:
  std::array<std::int16_t, kCapacity> data_{};
  std::size_t head_ = 0;  // next write slot
  std::size_t fill_ = 0;
};

struct AxisFeatures {
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;
  double max = 0.0;
  double min = 0.0;

  bool operator==(const AxisFeatures&) const = default;
};

struct FeatureSet {
  std::int64_t window_index = 0;  // 1-based ordinal of the completed window
  std::array<AxisFeatures, kAxes> axes{};

  // Flattened x,y,z then mean,median,variance,max,min.
  std::array<double, kFeatureSetSize> flatten() const;
};

using FeatureVector = std::array<double, kFeatureVectorSize>;

struct FeaturesReady {
  std::int64_t window_index = 0;       // index of S_t
  std::int64_t acquisition_index = 0;  // acquisition that completed S_t
  FeatureVector features{};
};

// Pure statistics over a single window. Each throws Error{kContract} unless
// the window holds exactly kWindowLength samples.
double window_mean(std::span<const std::int16_t> window);
double window_median(std::span<const std::int16_t> window);
double window_variance(std::span<const std::int16_t> window);
std::pair<double, double> window_minmax(std::span<const std::int16_t> window);

AxisFeatures axis_features(std::span<const std::int16_t> window);

// Concatenates [current | previous] in the network input order.
FeatureVector make_feature_vector(const FeatureSet& current,
                                  const FeatureSet& previous);

// Streaming extractor: three axis rings, a window counter and the L=2 shift
// buffer of feature sets.
class FeatureExtractor {
 public:
  // Throws Error{kStreamDiscontinuity} if acquisition.index is not the
  // successor of the previous one. The extractor keeps its state; call
  // reset() before feeding a new stream.
  std::optional<FeaturesReady> push(const Acquisition& acquisition);

  void reset();

  std::int64_t acquisitions_seen() const { return seen_; }
  std::int64_t windows_completed() const { return windows_; }
  std::size_t history_size() const { return history_fill_; }

 private:
  std::array<AxisBuffer, kAxes> buffers_{};
  std::array<FeatureSet, kHistoryDepth> history_{};  // [0] newest
  std::size_t history_fill_ = 0;
  std::optional<std::int64_t> last_index_;
  std::int64_t seen_ = 0;
  std::int64_t windows_ = 0;
};

// Number of features-ready events produced by n consecutive acquisitions.
constexpr std::int64_t expected_event_count(std::int64_t n) {
  const std::int64_t windows = n / static_cast<std::int64_t>(kWindowPeriod);
  return windows > 1 ? windows - 1 : 0;
}

}  // namespace ispu
