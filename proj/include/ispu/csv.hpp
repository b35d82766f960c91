#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ispu/features.hpp"
#include "ispu/pipeline.hpp"
#include "ispu/synth.hpp"

namespace ispu {

struct AcquisitionStream {
  std::vector<Acquisition> samples;
  std::optional<std::vector<ClassLabel>> labels;  // present iff a label column exists
};

// Header must be `index,x,y,z` with an optional trailing `label`. Throws
// Error{kParse} naming the 1-based line number.
AcquisitionStream read_acquisition_csv(std::istream& in);

void write_acquisition_csv(std::ostream& out,
                           std::span<const LabeledAcquisition> rows,
                           bool with_labels);

// f00..f29,window_index[,label]
void write_feature_header(std::ostream& out, bool with_label);
void write_feature_row(std::ostream& out, const FeaturesReady& event,
                       std::optional<ClassLabel> label);

struct FeatureStream {
  std::vector<FeaturesReady> rows;  // acquisition_index is not stored and stays 0
  std::optional<std::vector<ClassLabel>> labels;
};

// Reads what write_feature_header/row produce. Throws Error{kParse}.
FeatureStream read_feature_csv(std::istream& in);

// True if the first non-empty line is a feature header.
bool is_feature_header(std::string_view line);

// window_index,label,prob0..prob4[,true_label]
void write_classification_header(std::ostream& out, bool with_truth);
void write_classification_row(std::ostream& out, const Classified& event,
                              std::optional<ClassLabel> truth);

// Shortest decimal that round-trips the double.
std::string format_real(double value);

}  // namespace ispu
