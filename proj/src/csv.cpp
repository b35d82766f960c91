#include "ispu/csv.hpp"

#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "ispu/error.hpp"

namespace ispu {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_int(std::string_view field, std::size_t line, const char* column) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    fail(line, std::string("column ") + column + ": not an integer '" + std::string(field) + "'");
  }
  if (v < static_cast<long long>(std::numeric_limits<T>::min()) ||
      v > static_cast<long long>(std::numeric_limits<T>::max())) {
    fail(line, std::string("column ") + column + ": value out of range");
  }
  return static_cast<T>(v);
}

}  // namespace

std::string format_real(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

AcquisitionStream read_acquisition_csv(std::istream& in) {
  AcquisitionStream stream;
  std::string line;
  std::size_t number = 0;
  bool labeled = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (!header_seen) {
      const bool base = fields.size() >= 4 && fields[0] == "index" && fields[1] == "x" &&
                        fields[2] == "y" && fields[3] == "z";
      labeled = fields.size() == 5 && fields[4] == "label";
      if (!base || (fields.size() != 4 && !labeled)) {
        fail(number, "expected header 'index,x,y,z[,label]'");
      }
      header_seen = true;
      if (labeled) stream.labels.emplace();
      continue;
    }
    const std::size_t want = labeled ? 5 : 4;
    if (fields.size() != want) {
      fail(number, "expected " + std::to_string(want) + " fields, got " + std::to_string(fields.size()));
    }
    Acquisition a;
    a.index = parse_int<std::int64_t>(fields[0], number, "index");
    a.x = parse_int<std::int16_t>(fields[1], number, "x");
    a.y = parse_int<std::int16_t>(fields[2], number, "y");
    a.z = parse_int<std::int16_t>(fields[3], number, "z");
    stream.samples.push_back(a);
    if (labeled) {
      auto label = parse_class_label(fields[4]);
      if (!label) fail(number, "unknown label '" + std::string(fields[4]) + "'");
      stream.labels->push_back(*label);
    }
  }
  if (!header_seen) fail(number == 0 ? 1 : number, "missing header");
  return stream;
}

void write_acquisition_csv(std::ostream& out, std::span<const LabeledAcquisition> rows,
                           bool with_labels) {
  out << (with_labels ? "index,x,y,z,label\n" : "index,x,y,z\n");
  for (const LabeledAcquisition& r : rows) {
    out << r.sample.index << ',' << r.sample.x << ',' << r.sample.y << ',' << r.sample.z;
    if (with_labels) out << ',' << class_index(r.label);
    out << '\n';
  }
}

void write_feature_header(std::ostream& out, bool with_label) {
  for (std::size_t i = 0; i < kFeatureVectorSize; ++i) {
    out << 'f' << (i < 10 ? "0" : "") << i << ',';
  }
  out << "window_index";
  if (with_label) out << ",label";
  out << '\n';
}

void write_feature_row(std::ostream& out, const FeaturesReady& event,
                       std::optional<ClassLabel> label) {
  for (double v : event.features) out << format_real(v) << ',';
  out << event.window_index;
  if (label) out << ',' << class_index(*label);
  out << '\n';
}

bool is_feature_header(std::string_view line) {
  return line.substr(0, 4) == "f00,";
}

FeatureStream read_feature_csv(std::istream& in) {
  FeatureStream stream;
  std::string line;
  std::size_t number = 0;
  bool labeled = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (!header_seen) {
      bool ok = fields.size() == kFeatureVectorSize + 1 || fields.size() == kFeatureVectorSize + 2;
      for (std::size_t i = 0; ok && i < kFeatureVectorSize; ++i) {
        ok = fields[i] == std::string(i < 10 ? "f0" : "f") + std::to_string(i);
      }
      ok = ok && fields[kFeatureVectorSize] == "window_index";
      labeled = ok && fields.size() == kFeatureVectorSize + 2;
      if (ok && labeled) ok = fields.back() == "label";
      if (!ok) fail(number, "expected header 'f00,...,f29,window_index[,label]'");
      header_seen = true;
      if (labeled) stream.labels.emplace();
      continue;
    }
    const std::size_t want = kFeatureVectorSize + (labeled ? 2 : 1);
    if (fields.size() != want) {
      fail(number, "expected " + std::to_string(want) + " fields, got " + std::to_string(fields.size()));
    }
    FeaturesReady row;
    for (std::size_t i = 0; i < kFeatureVectorSize; ++i) {
      const std::string_view f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row.features[i]);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
        fail(number, "column " + std::to_string(i + 1) + ": not a number '" + std::string(f) + "'");
      }
    }
    row.window_index = parse_int<std::int64_t>(fields[kFeatureVectorSize], number, "window_index");
    stream.rows.push_back(row);
    if (labeled) {
      auto label = parse_class_label(fields.back());
      if (!label) fail(number, "unknown label '" + std::string(fields.back()) + "'");
      stream.labels->push_back(*label);
    }
  }
  if (!header_seen) fail(number == 0 ? 1 : number, "missing header");
  return stream;
}

void write_classification_header(std::ostream& out, bool with_truth) {
  out << "window_index,label";
  for (int c = 0; c < kNumClasses; ++c) out << ",prob" << c;
  if (with_truth) out << ",true_label";
  out << '\n';
}

void write_classification_row(std::ostream& out, const Classified& event,
                              std::optional<ClassLabel> truth) {
  out << event.window_index << ',' << class_index(event.label);
  for (double p : event.probabilities) out << ',' << format_real(p);
  if (truth) out << ',' << class_index(*truth);
  out << '\n';
}

}  // namespace ispu
