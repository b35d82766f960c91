#include "ispu/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "ispu/error.hpp"

namespace ispu {
namespace {

// Class amplitudes in ADC counts at intensity 1.
constexpr double kTransientAmplitude = 6000.0;
constexpr double kRotateAmplitude = 3000.0;
constexpr double kRotatePeriod = 48.0;  // acquisitions per revolution
constexpr double kMoveStep = 900.0;     // innovation sigma of the random walk
constexpr double kMoveLeak = 0.9;       // keeps the walk band-limited

std::int16_t clamp_sample(double v) {
  const double r = std::nearbyint(v);
  return static_cast<std::int16_t>(std::clamp(r, -32768.0, 32767.0));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

double PortableNormal::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableNormal::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t ActivityScript::total_duration() const {
  std::int64_t total = 0;
  for (const Segment& s : segments) total += s.duration;
  return total;
}

void ActivityScript::validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].duration <= 0) {
      throw Error(ErrorKind::kValidation,
                  "segment " + std::to_string(i + 1) + " has a nonpositive duration");
    }
    if (!(segments[i].intensity >= 0.0) || !std::isfinite(segments[i].intensity)) {
      throw Error(ErrorKind::kValidation,
                  "segment " + std::to_string(i + 1) + " has an invalid intensity");
    }
  }
  if (!(noise_floor >= 0.0) || !std::isfinite(noise_floor)) {
    throw Error(ErrorKind::kValidation, "noise floor must be >= 0");
  }
}

std::vector<Segment> parse_script_segments(std::string_view text) {
  std::vector<Segment> segments;
  text = trim(text);
  if (text.empty()) return segments;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = trim(text.substr(start, comma - start));
    const std::string shown(item);

    std::vector<std::string_view> parts;
    std::size_t p = 0;
    while (true) {
      const std::size_t colon = item.find(':', p);
      parts.push_back(item.substr(p, colon == std::string_view::npos ? item.npos : colon - p));
      if (colon == std::string_view::npos) break;
      p = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) {
      throw Error(ErrorKind::kParse, "segment '" + shown + "' must be label:duration[:intensity]");
    }
    Segment seg;
    auto label = parse_class_label(trim(parts[0]));
    if (!label) throw Error(ErrorKind::kParse, "unknown activity in segment '" + shown + "'");
    seg.label = *label;
    const std::string_view dur = trim(parts[1]);
    auto [ptr, ec] = std::from_chars(dur.data(), dur.data() + dur.size(), seg.duration);
    if (ec != std::errc{} || ptr != dur.data() + dur.size() || seg.duration <= 0) {
      throw Error(ErrorKind::kParse, "bad duration in segment '" + shown + "'");
    }
    if (parts.size() == 3) {
      const std::string_view inten = trim(parts[2]);
      auto [iptr, iec] = std::from_chars(inten.data(), inten.data() + inten.size(), seg.intensity);
      if (iec != std::errc{} || iptr != inten.data() + inten.size() || seg.intensity < 0.0) {
        throw Error(ErrorKind::kParse, "bad intensity in segment '" + shown + "'");
      }
    }
    segments.push_back(seg);
    start = comma + 1;
  }
  return segments;
}

std::vector<LabeledAcquisition> generate(const ActivityScript& script) {
  script.validate();
  std::vector<LabeledAcquisition> out;
  out.reserve(static_cast<std::size_t>(script.total_duration()));
  PortableNormal rng(script.seed);
  std::int64_t index = 1;

  for (const Segment& seg : script.segments) {
    const double n = static_cast<double>(seg.duration);
    std::array<double, kAxes> walk{};
    for (std::int64_t k = 0; k < seg.duration; ++k) {
      double x = 0.0;
      double y = 0.0;
      double z = kGravityCounts;
      const double phase = static_cast<double>(k) / n;
      switch (seg.label) {
        case ClassLabel::kIdle:
          break;
        case ClassLabel::kStandUp:
          // Unloading dip followed by the rebound.
          z -= seg.intensity * kTransientAmplitude * std::sin(2.0 * std::numbers::pi * phase);
          break;
        case ClassLabel::kSitDown:
          z += seg.intensity * kTransientAmplitude * std::sin(2.0 * std::numbers::pi * phase);
          break;
        case ClassLabel::kRotate: {
          const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / kRotatePeriod;
          x = seg.intensity * kRotateAmplitude * std::cos(angle);
          y = seg.intensity * kRotateAmplitude * std::sin(angle);
          break;
        }
        case ClassLabel::kMove:
          for (double& w : walk) w = kMoveLeak * w + seg.intensity * kMoveStep * rng.normal();
          x = walk[0];
          y = walk[1];
          z += walk[2];
          break;
      }
      if (script.noise_floor > 0.0) {
        x += script.noise_floor * rng.normal();
        y += script.noise_floor * rng.normal();
        z += script.noise_floor * rng.normal();
      }
      LabeledAcquisition row;
      row.sample = Acquisition{index++, clamp_sample(x), clamp_sample(y), clamp_sample(z)};
      row.label = seg.label;
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace ispu
