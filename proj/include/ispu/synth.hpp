#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ispu/features.hpp"
#include "ispu/labels.hpp"

namespace ispu {

inline constexpr std::int16_t kGravityCounts = 16384;  // 1 g at +/-2 g full scale
inline constexpr double kDefaultNoiseFloor = 24.0;

struct Segment {
  ClassLabel label = ClassLabel::kIdle;
  std::int64_t duration = 0;  // acquisitions
  double intensity = 1.0;     // multiplier on the class amplitude
};

struct ActivityScript {
  std::vector<Segment> segments;
  std::uint64_t seed = 0;
  double noise_floor = kDefaultNoiseFloor;  // Gaussian sigma, ADC counts

  std::int64_t total_duration() const;
  void validate() const;
};

// "idle:640,move:640:1.5" -> segments. Throws Error{kParse}.
std::vector<Segment> parse_script_segments(std::string_view text);

struct LabeledAcquisition {
  Acquisition sample;
  ClassLabel label = ClassLabel::kIdle;
};

// Reproducible normal source: mt19937_64, uniforms from the top 53 bits,
// Box-Muller cosine branch. Unlike std::normal_distribution the sequence is
// identical across standard libraries.
class PortableNormal {
 public:
  explicit PortableNormal(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)

 private:
  std::mt19937_64 engine_;
};

// Acquisition indices start at 1.
std::vector<LabeledAcquisition> generate(const ActivityScript& script);

}  // namespace ispu
