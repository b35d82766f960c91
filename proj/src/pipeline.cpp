#include "ispu/pipeline.hpp"

#include <memory>

#include "ispu/error.hpp"

namespace ispu {

Classifier make_classifier(Model model) {
  auto shared = std::make_shared<const Model>(std::move(model));
  return [shared](std::span<const double> features) { return infer(features, *shared); };
}

double Evaluation::accuracy() const {
  if (total == 0) return 0.0;
  std::int64_t hits = 0;
  for (int c = 0; c < kNumClasses; ++c) hits += confusion[c][c];
  return static_cast<double>(hits) / static_cast<double>(total);
}

Pipeline::Pipeline(Classifier classifier) : classifier_(std::move(classifier)) {
  if (!classifier_) throw Error(ErrorKind::kContract, "pipeline needs a classifier");
}

std::optional<Classified> Pipeline::step(const Acquisition& acquisition) {
  auto ready = extractor_.push(acquisition);
  if (!ready) return std::nullopt;
  const Prediction p = classifier_(ready->features);
  Classified c;
  c.window_index = ready->window_index;
  c.acquisition_index = ready->acquisition_index;
  c.label = p.label;
  c.probabilities = p.probabilities;
  ++inferences_;
  ++predicted_[static_cast<std::size_t>(p.label)];
  return c;
}

void Pipeline::reset() {
  extractor_.reset();
  inferences_ = 0;
  predicted_ = {};
}

ClassLabel majority_label(std::span<const ClassLabel> labels) {
  if (labels.empty()) throw Error(ErrorKind::kEvaluation, "no labels to vote over");
  std::array<std::int64_t, kNumClasses> votes{};
  std::array<std::size_t, kNumClasses> first_seen{};
  first_seen.fill(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    if (votes[c]++ == 0) first_seen[c] = i;
  }
  std::size_t best = static_cast<std::size_t>(labels[0]);
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && first_seen[c] < first_seen[best])) {
      best = c;
    }
  }
  return static_cast<ClassLabel>(best);
}

EvaluationRun evaluate(std::span<const LabeledAcquisition> stream, Pipeline& pipeline) {
  constexpr std::size_t span = kWindowLength * kHistoryDepth;
  pipeline.reset();
  EvaluationRun run;
  std::vector<ClassLabel> labels;
  labels.reserve(stream.size());
  for (const LabeledAcquisition& row : stream) {
    labels.push_back(row.label);
    auto event = pipeline.step(row.sample);
    if (!event) continue;
    const std::span<const ClassLabel> window(labels.data() + labels.size() - span, span);
    const ClassLabel truth = majority_label(window);
    ++run.evaluation.confusion[static_cast<std::size_t>(truth)]
                              [static_cast<std::size_t>(event->label)];
    ++run.evaluation.total;
    run.events.push_back(*event);
    run.truth.push_back(truth);
  }
  return run;
}

}  // namespace ispu
