#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ispu/cost.hpp"
#include "ispu/csv.hpp"
#include "ispu/error.hpp"
#include "ispu/factory.hpp"
#include "ispu/model_io.hpp"
#include "ispu/pipeline.hpp"
#include "ispu/synth.hpp"

namespace ispu::cli {
namespace {

using nlohmann::json;

// Raised for argument problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
  std::string file;
  double clock_mhz = 5.0;
  std::optional<double> power_mw;
  std::optional<double> cycles_per_mac;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--calibration", file, "Calibration data file (default: built-in table)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--clock", clock_mhz, "Core clock in MHz")
        ->check(CLI::IsMember({5.0, 10.0}))
        ->capture_default_str();
    cmd->add_option("--power-mw", power_mw, "Effective core power override (mW)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cycles-per-mac", cycles_per_mac,
                    "Cycles/MAC override for architectures outside the table")
        ->check(CLI::PositiveNumber);
  }

  CalibrationTable resolve() const {
    CalibrationTable cal = file.empty() ? CalibrationTable::defaults() : load_calibration(file);
    cal.clock_mhz = clock_mhz;
    if (power_mw) cal.power_mw = power_mw;
    cal.validate();
    return cal;
  }
};

struct Global {
  std::string format = "table";
  bool json() const { return format == "json"; }
};

class Input {
 public:
  explicit Input(const std::string& path) {
    if (path == "-" || path.empty()) {
      stream_ = &std::cin;
    } else {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorKind::kIo, "cannot read " + path);
      stream_ = file_.get();
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

class Output {
 public:
  explicit Output(const std::string& path) : to_stdout_(path == "-" || path.empty()) {
    if (to_stdout_) {
      stream_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw Error(ErrorKind::kIo, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  bool is_stdout() const { return to_stdout_; }
  // Human summaries go wherever the data does not.
  std::ostream& summary() { return to_stdout_ ? std::cerr : std::cout; }

 private:
  bool to_stdout_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::string fixed(double v, int digits) { return fmt::format("{:.{}f}", v, digits); }

json report_json(const CostReport& r) {
  json j{{"architecture", r.architecture.name()},
         {"kind", to_string(r.architecture.kind)},
         {"hidden", r.architecture.hidden},
         {"in_catalog", r.in_catalog},
         {"macs_accounting", r.macs_extrapolated ? "fit-extrapolated" : "fit-exact-on-catalog"},
         {"canonical_macs", r.canonical_macs},
         {"paper_macs", r.paper_macs},
         {"clock_mhz", r.clock_mhz},
         {"power_mw", r.power_mw},
         {"footprint_bytes", r.footprint_bytes},
         {"ram_budget_bytes", r.ram_budget_bytes},
         {"deployable", r.deployable}};
  j["cycles_per_mac"] = r.cycles_per_mac ? json(*r.cycles_per_mac) : json(nullptr);
  j["m4_cycles_per_mac"] = r.m4_cycles_per_mac ? json(*r.m4_cycles_per_mac) : json(nullptr);
  if (r.latency) {
    j["nn_cycles"] = r.latency->nn_cycles;
    j["nn_ms"] = r.latency->nn_ms;
    j["total_ms"] = r.latency->total_ms;
    j["feature_ms"] = r.latency->total_ms - r.latency->nn_ms;
  } else {
    j["nn_cycles"] = j["nn_ms"] = j["total_ms"] = j["feature_ms"] = nullptr;
  }
  j["energy_uj"] = r.energy_uj ? json(*r.energy_uj) : json(nullptr);
  return j;
}

void print_report(std::ostream& out, const CostReport& r) {
  out << fmt::format("architecture      {}{}\n", r.architecture.name(),
                     r.in_catalog ? "" : " (not in catalog)");
  out << fmt::format("fitted MACs       {} ({})\n", r.paper_macs,
                     r.macs_extrapolated ? "fitted accounting, extrapolated"
                                         : "fitted accounting, exact on catalog");
  out << fmt::format("canonical MACs    {}\n", r.canonical_macs);
  if (r.latency) {
    out << fmt::format("cycles/MAC        {}\n", *r.cycles_per_mac);
    if (r.m4_cycles_per_mac) {
      out << fmt::format("cycles/MAC (M4)   {} (reference)\n", *r.m4_cycles_per_mac);
    }
    out << fmt::format("NN cycles         {}\n", fixed(r.latency->nn_cycles, 0));
    out << fmt::format("NN latency        {} ms @ {} MHz\n", fixed(r.latency->nn_ms, 3),
                       r.clock_mhz);
    out << fmt::format("total latency     {} ms (features {} ms)\n",
                       fixed(r.latency->total_ms, 3),
                       fixed(r.latency->total_ms - r.latency->nn_ms, 3));
    out << fmt::format("energy            {} uJ @ {} mW\n", fixed(*r.energy_uj, 3),
                       fixed(r.power_mw, 4));
  } else {
    out << "latency           n/a (no calibration)\n";
  }
  out << fmt::format("footprint         {} B of {} B ({})\n", r.footprint_bytes,
                     r.ram_budget_bytes, r.deployable ? "deployable" : "exceeds RAM budget");
}

std::string valid_names() {
  std::string names;
  for (const auto& a : architecture_catalog()) {
    if (!names.empty()) names += ", ";
    names += a.name();
  }
  return names + " (or Float_<layers>,<width> / Binary_[w1,w2,...])";
}

ModelArchitecture resolve_arch(const std::string& name) {
  auto a = parse_architecture(name);
  if (!a) throw UsageError("unknown architecture '" + name + "'; valid names: " + valid_names());
  try {
    a->validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return *a;
}

std::optional<ClassLabel> window_truth(const std::optional<std::vector<ClassLabel>>& labels,
                                       std::size_t consumed) {
  if (!labels) return std::nullopt;
  constexpr std::size_t span = kWindowLength * kHistoryDepth;
  return majority_label(std::span<const ClassLabel>(labels->data() + consumed - span, span));
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::uint64_t seed = 0;
  std::string script;
  std::string script_file;
  double noise = kDefaultNoiseFloor;
  bool no_labels = false;
  std::string output = "-";
};

int cmd_gen(const GenOptions& o, const Global& g) {
  ActivityScript script;
  script.seed = o.seed;
  script.noise_floor = o.noise;
  std::string text = o.script;
  if (!o.script_file.empty()) {
    std::ifstream in(o.script_file);
    if (!in) throw UsageError("cannot read script file " + o.script_file);
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (!text.empty()) text += ",";
      text += line;
    }
  }
  try {
    script.segments = parse_script_segments(text);
    script.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("invalid script: ") + e.what());
  }
  const auto rows = generate(script);
  Output out(o.output);
  write_acquisition_csv(out.get(), rows, !o.no_labels);
  if (g.json()) {
    out.summary() << json{{"command", "gen"},
                          {"segments", script.segments.size()},
                          {"acquisitions", rows.size()},
                          {"seed", script.seed},
                          {"noise_floor", script.noise_floor}}
                         .dump()
                  << "\n";
  } else {
    out.summary() << fmt::format("generated {} acquisitions in {} segments (seed {})\n",
                                 rows.size(), script.segments.size(), script.seed);
  }
  return kOk;
}

// ---------------------------------------------------------------- features

struct FeaturesOptions {
  std::string input = "-";
  std::string output = "-";
  bool labels = false;
};

int cmd_features(const FeaturesOptions& o, const Global& g) {
  Input in(o.input);
  const AcquisitionStream stream = read_acquisition_csv(in.get());
  if (o.labels && !stream.labels) {
    throw Error(ErrorKind::kParse, "--labels requires a labeled input stream");
  }
  Output out(o.output);
  write_feature_header(out.get(), o.labels);
  FeatureExtractor extractor;
  std::int64_t rows = 0;
  for (std::size_t i = 0; i < stream.samples.size(); ++i) {
    auto ready = extractor.push(stream.samples[i]);
    if (!ready) continue;
    write_feature_row(out.get(), *ready,
                      o.labels ? window_truth(stream.labels, i + 1) : std::nullopt);
    ++rows;
  }
  if (g.json()) {
    out.summary() << json{{"command", "features"},
                          {"acquisitions", stream.samples.size()},
                          {"feature_rows", rows}}
                         .dump()
                  << "\n";
  } else {
    out.summary() << fmt::format("{} acquisitions -> {} feature rows\n", stream.samples.size(),
                                 rows);
  }
  return kOk;
}

// ---------------------------------------------------------------- infer

struct InferOptions {
  std::string model;
  std::string input = "-";
  std::string output = "-";
  CalibrationOptions calibration;
};

// Accepts either an acquisition stream or a feature dump from `features`.
int cmd_infer(const InferOptions& o, const Global& g) {
  const LoadedModel loaded = load_model(o.model);
  const ModelArchitecture arch = architecture_of(loaded.model);
  const CalibrationTable cal = o.calibration.resolve();

  Input in(o.input);
  std::ostringstream buffered;
  buffered << in.get().rdbuf();
  const std::string text = buffered.str();
  const auto first = text.find_first_not_of("\r\n");
  std::istringstream source(text);
  const bool feature_input =
      first != std::string::npos && is_feature_header(std::string_view(text).substr(first));

  Output out(o.output);
  Evaluation eval;
  std::array<std::int64_t, kNumClasses> predicted{};
  std::int64_t inferences = 0;
  std::size_t acquisitions = 0;
  bool labeled = false;
  auto emit = [&](const Classified& event, std::optional<ClassLabel> truth) {
    write_classification_row(out.get(), event, truth);
    ++inferences;
    ++predicted[static_cast<std::size_t>(event.label)];
    if (truth) {
      ++eval.confusion[static_cast<std::size_t>(*truth)][static_cast<std::size_t>(event.label)];
      ++eval.total;
    }
  };

  if (feature_input) {
    const FeatureStream stream = read_feature_csv(source);
    labeled = stream.labels.has_value();
    write_classification_header(out.get(), labeled);
    const Classifier classify = make_classifier(loaded.model);
    for (std::size_t i = 0; i < stream.rows.size(); ++i) {
      const Prediction p = classify(stream.rows[i].features);
      Classified c;
      c.window_index = stream.rows[i].window_index;
      c.label = p.label;
      c.probabilities = p.probabilities;
      emit(c, labeled ? std::optional((*stream.labels)[i]) : std::nullopt);
    }
  } else {
    const AcquisitionStream stream = read_acquisition_csv(source);
    labeled = stream.labels.has_value();
    acquisitions = stream.samples.size();
    write_classification_header(out.get(), labeled);
    Pipeline pipeline(loaded.model);
    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
      auto event = pipeline.step(stream.samples[i]);
      if (event) emit(*event, window_truth(stream.labels, i + 1));
    }
  }

  const CostReport report = make_cost_report(arch, cal, o.calibration.cycles_per_mac);
  if (!report.latency) {
    std::cerr << "warning: no cycles/MAC calibration for " << arch.name()
              << "; latency and energy omitted (use --cycles-per-mac)\n";
  }
  if (g.json()) {
    json doc{{"command", "infer"},
             {"model", o.model},
             {"input", feature_input ? "features" : "acquisitions"},
             {"acquisitions", acquisitions},
             {"inferences", inferences},
             {"predicted_counts", predicted},
             {"cost", report_json(report)}};
    if (labeled) {
      doc["accuracy"] = eval.accuracy();
      doc["confusion"] = eval.confusion;
    }
    out.summary() << doc.dump() << "\n";
  } else {
    std::ostream& s = out.summary();
    if (feature_input) {
      s << fmt::format("{} feature rows, {} inferences\n", inferences, inferences);
    } else {
      s << fmt::format("{} acquisitions, {} inferences\n", acquisitions, inferences);
    }
    if (labeled) {
      s << fmt::format("window accuracy   {} ({} windows)\n", fixed(eval.accuracy(), 4),
                       eval.total);
    }
    s << "cost summary (sensor estimate)\n";
    print_report(s, report);
  }
  return kOk;
}

// ---------------------------------------------------------------- cost

struct CostOptions {
  std::vector<std::string> arch;
  std::string kind;
  std::vector<std::size_t> widths;
  bool all = false;
  bool dump_calibration = false;
  CalibrationOptions calibration;
};

int cmd_cost(const CostOptions& o, const Global& g) {
  const CalibrationTable cal = o.calibration.resolve();
  if (o.dump_calibration) {
    std::cout << format_calibration(cal);
    return kOk;
  }
  std::vector<ModelArchitecture> targets;
  if (o.all) targets = architecture_catalog();
  for (const auto& name : o.arch) targets.push_back(resolve_arch(name));
  if (!o.kind.empty()) {
    ModelArchitecture a;
    if (o.kind == "float") {
      a.kind = ModelKind::kFloat;
    } else if (o.kind == "binary") {
      a.kind = ModelKind::kBinary;
    } else {
      throw UsageError("--kind must be float or binary");
    }
    a.hidden = o.widths;
    try {
      a.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    targets.push_back(a);
  }
  if (targets.empty()) throw UsageError("nothing to report; pass --arch, --kind or --all");

  std::vector<CostReport> reports;
  for (const auto& a : targets) reports.push_back(make_cost_report(a, cal, o.calibration.cycles_per_mac));

  if (g.json()) {
    json rows = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      json r = report_json(reports[i]);
      if (auto pos = catalog_position(reports[i].architecture)) {
        r["published_macs"] = published_macs()[*pos];
      }
      rows.push_back(std::move(r));
    }
    std::cout << json{{"command", "cost"}, {"reports", rows}}.dump() << "\n";
    return kOk;
  }

  if (reports.size() == 1 && !o.all) {
    print_report(std::cout, reports.front());
    return kOk;
  }
  std::cout << fmt::format("{:<16} {:>4} {:>6} {:>10} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10} {:>9} {:>8} {:>10}\n",
                           "model", "hid", "units", "canonical", "paper_macs", "published",
                           "cyc/MAC", "M4", "nn_ms", "total_ms", "energy_uJ", "bytes",
                           "deployable");
  for (const CostReport& r : reports) {
    const auto& a = r.architecture;
    const auto pos = catalog_position(a);
    const bool uniform = !a.hidden.empty() &&
                         std::all_of(a.hidden.begin(), a.hidden.end(),
                                     [&](std::size_t w) { return w == a.hidden[0]; });
    std::cout << fmt::format(
        "{:<16} {:>4} {:>6} {:>10} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10} {:>9} {:>8} {:>10}\n",
        a.name(), a.hidden.size(), uniform ? std::to_string(a.hidden[0]) : std::string("-"),
        r.canonical_macs, r.paper_macs, pos ? std::to_string(published_macs()[*pos]) : "-",
        r.cycles_per_mac ? fixed(*r.cycles_per_mac, 2) : "-",
        r.m4_cycles_per_mac ? fixed(*r.m4_cycles_per_mac, 2) : "-",
        r.latency ? fixed(r.latency->nn_ms, 3) : "-",
        r.latency ? fixed(r.latency->total_ms, 3) : "-",
        r.energy_uj ? fixed(*r.energy_uj, 2) : "-", r.footprint_bytes,
        r.deployable ? "true" : "false");
  }
  std::cout << fmt::format("clock {} MHz, power {} mW, RAM budget {} B; paper_macs is the fitted MAC accounting\n",
                           cal.clock_mhz, fixed(cal.effective_power_mw(), 4),
                           static_cast<std::int64_t>(cal.ram_kib * 1024));
  return kOk;
}

// ---------------------------------------------------------------- init-model

struct InitOptions {
  std::string arch;
  std::string init = "zero";
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_init_model(const InitOptions& o, const Global& g) {
  const ModelArchitecture a = resolve_arch(o.arch);
  const ModelInit init = o.init == "random" ? ModelInit::kRandom : ModelInit::kZero;
  ModelMetadata meta;
  meta.note = o.init == "random" ? "untrained random parameters" : "untrained zero parameters";
  save_model(make_model(a, init, o.seed), o.output, meta);
  if (g.json()) {
    std::cout << json{{"command", "init-model"}, {"architecture", a.name()}, {"path", o.output}}.dump()
              << "\n";
  } else {
    std::cout << fmt::format("wrote {} ({}, {})\n", o.output, a.name(), o.init);
  }
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string model;
  std::string input = "-";
  int streams = 4;
  int threads = 0;
  int repeat = 1;
};

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct StreamResult {
  std::int64_t inferences = 0;
  std::uint64_t digest = 0;
  double feature_s = 0.0;
  double inference_s = 0.0;
};

StreamResult bench_stream(const Model& model, std::span<const Acquisition> samples, int repeat) {
  using clock = std::chrono::steady_clock;
  StreamResult r;
  std::ostringstream log;
  for (int rep = 0; rep < repeat; ++rep) {
    FeatureExtractor extractor;
    log.str("");
    std::int64_t inferences = 0;
    for (const Acquisition& a : samples) {
      const auto t0 = clock::now();
      auto ready = extractor.push(a);
      const auto t1 = clock::now();
      r.feature_s += std::chrono::duration<double>(t1 - t0).count();
      if (!ready) continue;
      const Prediction p = infer(ready->features, model);
      r.inference_s += std::chrono::duration<double>(clock::now() - t1).count();
      Classified c;
      c.window_index = ready->window_index;
      c.label = p.label;
      c.probabilities = p.probabilities;
      write_classification_row(log, c, std::nullopt);
      ++inferences;
    }
    r.inferences += inferences;
    r.digest = fnv1a(log.str());
  }
  return r;
}

int cmd_bench(const BenchOptions& o, const Global& g) {
  const LoadedModel loaded = load_model(o.model);
  Input in(o.input);
  const AcquisitionStream stream = read_acquisition_csv(in.get());
  const int threads = o.threads > 0 ? o.threads
                                    : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

  std::vector<StreamResult> results(static_cast<std::size_t>(o.streams));
  std::atomic<int> next{0};
  std::vector<std::string> failures(results.size());
  const auto start = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < std::min(threads, o.streams); ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < o.streams; i = next++) {
          try {
            results[static_cast<std::size_t>(i)] = bench_stream(loaded.model, stream.samples, o.repeat);
          } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
          }
        }
      });
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& f : failures) {
    if (!f.empty()) throw Error(ErrorKind::kDimension, f);
  }

  StreamResult total;
  std::uint64_t digest = 1469598103934665603ull;
  for (const StreamResult& r : results) {
    total.inferences += r.inferences;
    total.feature_s += r.feature_s;
    total.inference_s += r.inference_s;
    digest = fnv1a(fmt::format("{:016x}", r.digest), digest);
  }
  const std::uint64_t per_stream = results.empty() ? 0 : results.front().digest;
  const double rate = wall > 0.0 ? static_cast<double>(total.inferences) / wall : 0.0;
  const std::string arch = architecture_of(loaded.model).name();

  if (g.json()) {
    std::cout << json{{"command", "bench"},
                      {"measurement", "host"},
                      {"architecture", arch},
                      {"streams", o.streams},
                      {"threads", std::min(threads, o.streams)},
                      {"repeat", o.repeat},
                      {"acquisitions_per_stream", stream.samples.size()},
                      {"inferences", total.inferences},
                      {"wall_s", wall},
                      {"inferences_per_s", rate},
                      {"feature_stage_s", total.feature_s},
                      {"inference_stage_s", total.inference_s},
                      {"stream_digest", fmt::format("{:016x}", per_stream)},
                      {"digest", fmt::format("{:016x}", digest)}}
                         .dump()
              << "\n";
  } else {
    std::cout << "host measurement (this machine, not sensor timing)\n";
    std::cout << fmt::format("model             {}\n", arch);
    std::cout << fmt::format("streams           {} x {} acquisitions, {} threads, repeat {}\n",
                             o.streams, stream.samples.size(), std::min(threads, o.streams),
                             o.repeat);
    std::cout << fmt::format("inferences        {}\n", total.inferences);
    std::cout << fmt::format("wall time         {} s\n", fixed(wall, 6));
    std::cout << fmt::format("throughput        {} inferences/s\n", fixed(rate, 1));
    std::cout << fmt::format("feature stage     {} ms (summed over threads)\n",
                             fixed(total.feature_s * 1e3, 3));
    std::cout << fmt::format("inference stage   {} ms (summed over threads)\n",
                             fixed(total.inference_s * 1e3, 3));
    std::cout << fmt::format("stream digest     {:016x}\n", per_stream);
    std::cout << fmt::format("digest            {:016x}\n", digest);
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kStreamDiscontinuity:
    case ErrorKind::kIo:
      return kInputParse;
    case ErrorKind::kContract:
    case ErrorKind::kDimension:
    case ErrorKind::kValidation:
    case ErrorKind::kWidthLegality:
    case ErrorKind::kDegenerateNeuron:
      return kModelMismatch;
    case ErrorKind::kMissingCalibration:
    case ErrorKind::kEvaluation:
      return kUsage;
  }
  return 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"In-sensor activity recognition: features, BNN/MLP inference and cost model"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Optional config file (same keys as flags; flags win)");
  Global global;
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a labeled synthetic accelerometer stream");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--script", gen.script, "Segments, e.g. idle:640,move:640:1.5");
  gen_cmd->add_option("--script-file", gen.script_file, "File with one segment per line")
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("--noise", gen.noise, "Gaussian noise floor in ADC counts")
      ->capture_default_str();
  gen_cmd->add_flag("--no-labels", gen.no_labels, "Omit the label column");
  gen_cmd->add_option("-o,--output", gen.output, "Output CSV ('-' for stdout)");

  FeaturesOptions feat;
  auto* feat_cmd = app.add_subcommand("features", "Dump the 30-feature vectors of a stream");
  feat_cmd->add_option("-i,--input", feat.input, "Acquisition or feature CSV ('-' for stdin)");
  feat_cmd->add_option("-o,--output", feat.output, "Output CSV ('-' for stdout)");
  feat_cmd->add_flag("--labels", feat.labels, "Append the window's majority label");

  InferOptions inf;
  auto* infer_cmd = app.add_subcommand("infer", "Classify a stream and summarize sensor cost");
  infer_cmd->add_option("-m,--model", inf.model, "Model file (.ispu-model)")
      ->required()
      ->check(CLI::ExistingFile);
  infer_cmd->add_option("-i,--input", inf.input, "Acquisition or feature CSV ('-' for stdin)");
  infer_cmd->add_option("-o,--output", inf.output, "Classification log ('-' for stdout)");
  inf.calibration.add_to(infer_cmd);

  CostOptions cost;
  auto* cost_cmd = app.add_subcommand("cost", "MACs, latency, energy and memory estimates");
  cost_cmd->add_option("--arch", cost.arch, "Architecture name(s), e.g. Float_2,64")
      ->delimiter(';');
  cost_cmd->add_option("--kind", cost.kind, "Explicit architecture kind (float|binary)");
  cost_cmd->add_option("--widths", cost.widths, "Explicit hidden widths")->delimiter(',');
  cost_cmd->add_flag("--all", cost.all, "Report the full architecture catalog");
  cost_cmd->add_flag("--dump-calibration", cost.dump_calibration,
                     "Print the effective calibration file and exit");
  cost.calibration.add_to(cost_cmd);

  InitOptions init;
  auto* init_cmd = app.add_subcommand("init-model", "Write an untrained model of a given shape");
  init_cmd->add_option("--arch", init.arch, "Architecture name")->required();
  init_cmd->add_option("--init", init.init, "Parameter initialization")
      ->check(CLI::IsMember({"zero", "random"}))
      ->capture_default_str();
  init_cmd->add_option("--seed", init.seed, "Random seed")->capture_default_str();
  init_cmd->add_option("-o,--output", init.output, "Destination .ispu-model")->required();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Host-side throughput of this implementation");
  bench_cmd->add_option("-m,--model", bench.model, "Model file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("-i,--input", bench.input, "Acquisition or feature CSV ('-' for stdin)");
  bench_cmd->add_option("--streams", bench.streams, "Independent pipeline instances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--repeat", bench.repeat, "Passes over the stream per instance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, global);
    if (*feat_cmd) return cmd_features(feat, global);
    if (*infer_cmd) return cmd_infer(inf, global);
    if (*cost_cmd) return cmd_cost(cost, global);
    if (*init_cmd) return cmd_init_model(init, global);
    if (*bench_cmd) return cmd_bench(bench, global);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}

}  // namespace ispu::cli
