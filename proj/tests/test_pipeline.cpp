#include <random>

#include "doctest.h"
#include "ispu/error.hpp"
#include "ispu/factory.hpp"
#include "ispu/pipeline.hpp"
#include "ispu/synth.hpp"

using namespace ispu;

namespace {

std::vector<LabeledAcquisition> stream_of(const char* text, std::uint64_t seed) {
  ActivityScript s;
  s.segments = parse_script_segments(text);
  s.seed = seed;
  return generate(s);
}

Prediction one_hot(ClassLabel label) {
  Prediction p;
  p.probabilities[static_cast<std::size_t>(label)] = 1.0;
  p.label = label;
  return p;
}

}  // namespace

TEST_CASE("one inference per features-ready event") {
  const auto rows = stream_of("idle:100,move:200,rotate:30", 1);
  Pipeline pipeline(make_model(*parse_architecture("Float_1,32"), ModelInit::kRandom, 3));
  std::vector<std::int64_t> at;
  for (const auto& r : rows) {
    if (auto c = pipeline.step(r.sample)) {
      at.push_back(c->acquisition_index);
      CHECK(c->window_index == c->acquisition_index / 32);
      double total = 0.0;
      for (double p : c->probabilities) total += p;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(at == std::vector<std::int64_t>{64, 96, 128, 160, 192, 224, 256, 288, 320});
  CHECK(pipeline.inference_count() == expected_event_count(330));
  std::int64_t counted = 0;
  for (auto n : pipeline.predicted_counts()) counted += n;
  CHECK(counted == pipeline.inference_count());
}

TEST_CASE("zero model predicts uniform probabilities and label 0") {
  for (const char* name : {"Float_2,64", "Binary_2,64"}) {
    CAPTURE(name);
    Pipeline pipeline(make_model(*parse_architecture(name), ModelInit::kZero, 0));
    for (const auto& r : stream_of("move:256", 2)) {
      if (auto c = pipeline.step(r.sample)) {
        for (double p : c->probabilities) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(c->label == ClassLabel::kIdle);
      }
    }
  }
}

TEST_CASE("pipeline output is deterministic and reset restores the initial state") {
  const auto rows = stream_of("idle:300,sitdown:300,move:300", 4);
  Pipeline pipeline(make_model(*parse_architecture("Binary_2,64"), ModelInit::kRandom, 8));
  auto run = [&] {
    std::vector<Classified> out;
    for (const auto& r : rows) {
      if (auto c = pipeline.step(r.sample)) out.push_back(*c);
    }
    return out;
  };
  const auto first = run();
  CHECK_THROWS_AS(run(), Error);  // indices restart at 1 without a reset
  pipeline.reset();
  CHECK(pipeline.inference_count() == 0);
  const auto second = run();
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].label == second[i].label);
    CHECK(first[i].probabilities == second[i].probabilities);
  }
}

TEST_CASE("majority label") {
  using L = ClassLabel;
  const std::vector<L> a{L::kMove, L::kIdle, L::kIdle};
  CHECK(majority_label(a) == L::kIdle);
  const std::vector<L> tie{L::kRotate, L::kIdle, L::kIdle, L::kRotate};
  CHECK(majority_label(tie) == L::kRotate);
  const std::vector<L> tie2{L::kIdle, L::kRotate, L::kRotate, L::kIdle};
  CHECK(majority_label(tie2) == L::kIdle);
  CHECK_THROWS_AS(majority_label(std::span<const L>{}), Error);
}

TEST_CASE("an oracle classifier scores perfectly on clean windows") {
  const auto rows = stream_of("idle:640,standup:640,sitdown:640,rotate:640,move:640", 5);
  // Peeks at the ground truth through the acquisition index.
  std::int64_t last_index = 0;
  Pipeline pipeline([&](std::span<const double>) {
    return one_hot(static_cast<ClassLabel>((last_index - 1) / 640));
  });
  Evaluation eval;
  for (const auto& r : rows) {
    last_index = r.sample.index;
    if (auto c = pipeline.step(r.sample)) {
      const std::int64_t first = c->acquisition_index - 63;
      if ((first - 1) / 640 != (c->acquisition_index - 1) / 640) continue;
      ++eval.confusion[static_cast<std::size_t>(r.label)][static_cast<std::size_t>(c->label)];
      ++eval.total;
    }
  }
  CHECK(eval.total == 95);
  CHECK(eval.accuracy() == 1.0);
}

TEST_CASE("evaluate uses the majority over the 64 contributing samples") {
  const auto rows = stream_of("idle:640,standup:640,sitdown:640,rotate:640,move:640", 5);
  Pipeline constant([](std::span<const double>) { return one_hot(ClassLabel::kIdle); });
  const EvaluationRun r = evaluate(rows, constant);
  REQUIRE(r.events.size() == static_cast<std::size_t>(expected_event_count(3200)));
  REQUIRE(r.truth.size() == r.events.size());
  // A window straddling a boundary is a 32/32 tie and goes to the earlier class,
  // so every class but the last owns 20 windows.
  std::int64_t row_total = 0;
  for (int t = 0; t < kNumClasses; ++t) {
    std::int64_t s = 0;
    for (int p = 0; p < kNumClasses; ++p) s += r.evaluation.confusion[t][p];
    row_total += s;
    CHECK(s == (t == kNumClasses - 1 ? 19 : 20));
  }
  CHECK(row_total == r.evaluation.total);
  CHECK(r.evaluation.accuracy() == doctest::Approx(20.0 / 99.0));
}

TEST_CASE("uniform random predictions score near chance") {
  const auto rows = stream_of("idle:13000,standup:13000,sitdown:13000,rotate:13000,move:13000", 6);
  std::mt19937_64 rng(99);
  Pipeline pipeline([&](std::span<const double>) {
    return one_hot(static_cast<ClassLabel>(rng() % kNumClasses));
  });
  const EvaluationRun r = evaluate(rows, pipeline);
  REQUIRE(r.evaluation.total >= 2000);
  CHECK(r.evaluation.accuracy() == doctest::Approx(0.2).epsilon(0.05 / 0.2));
}

TEST_CASE("empty evaluation has zero accuracy") {
  Evaluation e;
  CHECK(e.accuracy() == 0.0);
  CHECK_THROWS_AS(Pipeline(Classifier{}), Error);
}
