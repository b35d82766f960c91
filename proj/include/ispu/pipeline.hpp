#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ispu/features.hpp"
#include "ispu/model_io.hpp"
#include "ispu/synth.hpp"

namespace ispu {

using Classifier = std::function<Prediction(std::span<const double>)>;

Classifier make_classifier(Model model);

struct Classified {
  std::int64_t window_index = 0;
  std::int64_t acquisition_index = 0;
  ClassLabel label = ClassLabel::kIdle;
  std::array<double, kNumClasses> probabilities{};
};

using ConfusionMatrix = std::array<std::array<std::int64_t, kNumClasses>, kNumClasses>;

struct Evaluation {
  ConfusionMatrix confusion{};  // [true][predicted]
  std::int64_t total = 0;
  double accuracy() const;
};

class Pipeline {
 public:
  explicit Pipeline(Classifier classifier);
  explicit Pipeline(Model model) : Pipeline(make_classifier(std::move(model))) {}

  std::optional<Classified> step(const Acquisition& acquisition);

  void reset();

  std::int64_t inference_count() const { return inferences_; }
  const std::array<std::int64_t, kNumClasses>& predicted_counts() const {
    return predicted_;
  }

 private:
  Classifier classifier_;
  FeatureExtractor extractor_;
  std::int64_t inferences_ = 0;
  std::array<std::int64_t, kNumClasses> predicted_{};
};

// Majority label over a span of per-sample labels, earliest-seen on ties.
ClassLabel majority_label(std::span<const ClassLabel> labels);

struct EvaluationRun {
  std::vector<Classified> events;
  std::vector<ClassLabel> truth;  // parallel to events
  Evaluation evaluation;
};

// Runs a fresh pipeline over the stream; each window's ground truth is the
// majority over the 64 samples feeding it.
EvaluationRun evaluate(std::span<const LabeledAcquisition> stream,
                       Pipeline& pipeline);

}  // namespace ispu
