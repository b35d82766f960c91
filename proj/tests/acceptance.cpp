// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "bnn_fixture.hpp"
#include "ispu/binary.hpp"
#include "ispu/cost.hpp"
#include "ispu/dense.hpp"
#include "ispu/factory.hpp"
#include "ispu/features.hpp"
#include "json.hpp"
#include "oracles.hpp"

#ifndef ISPU_CLI_PATH
#error "ISPU_CLI_PATH must name the ispu executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ispu;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

struct Run {
  int code = -1;
  std::string out;
};

Run shell(const std::string& cmd) {
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string cli() { return std::string("'") + ISPU_CLI_PATH + "'"; }

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json cost_json(const std::string& args) {
  const Run r = shell(cli() + " cost --format json " + args);
  if (r.code != 0) throw std::runtime_error("cost exited with " + std::to_string(r.code));
  return json::parse(r.out);
}

Outcome table_one() {
  const std::vector<std::int64_t> published = {290,  1324, 2508, 2412, 6732, 3500,  304,
                                               1328, 2640, 2416, 6864, 3504, 208272};
  const auto t0 = Clock::now();
  const Run r = shell(cli() + " cost --all --format json");
  const double elapsed = seconds_since(t0);
  Outcome o;
  if (r.code != 0) return {false, "cost --all exited with " + std::to_string(r.code)};
  const json doc = json::parse(r.out);
  const auto& rows = doc.at("reports");
  int matched = 0;
  for (std::size_t i = 0; i < rows.size() && i < published.size(); ++i) {
    if (rows[i].at("paper_macs").get<std::int64_t>() == published[i]) ++matched;
  }
  o.pass = rows.size() == published.size() && matched == 13 && elapsed < 1.0;
  o.detail = std::to_string(matched) + "/13 rows exact, " + fmt3(elapsed) + " s";
  return o;
}

Outcome latency_energy() {
  const json doc = cost_json("--arch Float_2,64 --arch Binary_4,256");
  const json& f = doc.at("reports").at(0);
  const json& b = doc.at("reports").at(1);
  const double cycles = f.at("nn_cycles");
  const double nn = f.at("nn_ms");
  const double total = f.at("total_ms");
  const double energy = f.at("energy_uj");
  const double bnn = b.at("nn_ms");
  Outcome o;
  o.pass = std::llround(cycles) == 71830 && fmt3(nn) == "14.366" && fmt3(total) == "20.936" &&
           std::abs(energy - 90.0) <= 0.9 && std::abs(bnn - 61.6) <= 0.1e-2 * 61.6 &&
           f.at("paper_macs") == 6732;
  o.detail = "Float_2,64 " + std::to_string(std::llround(cycles)) + " cycles, " + fmt3(nn) +
             " ms NN, " + fmt3(total) + " ms total, " + fmt3(energy) + " uJ; Binary_4,256 " +
             fmt3(bnn) + " ms NN (" + fmt3(100.0 * std::abs(bnn - 61.6) / 61.6) + "% off 61.6)";
  return o;
}

Outcome speedups() {
  const CalibrationTable cal = CalibrationTable::defaults();
  const double s = speedup(*parse_architecture("Float_2,64"), *parse_architecture("Binary_2,64"), cal);
  const double reduction = 1.0 - 1.0 / s;
  const double ratio = cal.find(*parse_architecture("Float_2,64"))->sensor_cycles_per_mac /
                       cal.find(*parse_architecture("Binary_4,256"))->sensor_cycles_per_mac;
  Outcome o;
  o.pass = std::abs(reduction - 0.247) <= 0.005 && std::abs(ratio - 7.2) <= 0.1;
  o.detail = "Float_2,64 -> Binary_2,64 NN-time reduction " + fmt3(100.0 * reduction) +
             "%, cycles/MAC ratio " + fmt3(ratio);
  return o;
}

Outcome memory_wall() {
  const json doc = cost_json("--arch Float_4,256 --arch Binary_4,256");
  const json& f = doc.at("reports").at(0);
  const json& b = doc.at("reports").at(1);
  const std::int64_t fb = f.at("footprint_bytes");
  const std::int64_t bb = b.at("footprint_bytes");
  Outcome o;
  o.pass = fb > 40960 && !f.at("deployable").get<bool>() && bb <= 40960 &&
           b.at("deployable").get<bool>();
  o.detail = "Float_4,256 " + std::to_string(fb) + " B deployable=" +
             (f.at("deployable").get<bool>() ? "true" : "false") + ", Binary_4,256 " +
             std::to_string(bb) + " B deployable=" + (b.at("deployable").get<bool>() ? "true" : "false") +
             " (budget 40960 B)";
  return o;
}

constexpr int kCases = 10000;

int xnor_cases(std::mt19937_64& rng) {
  int exact = 0;
  for (int i = 0; i < kCases; ++i) {
    const std::size_t n = 32 * (1 + rng() % 16);
    const auto a = fixture::random_signs(rng, n);
    const auto b = fixture::random_signs(rng, n);
    const auto want = static_cast<std::int64_t>(oracle::pm_dot(a, b));
    if (xnor_dot(fixture::pack(a), fixture::pack(b)) == want) ++exact;
  }
  return exact;
}

int dense_layer_cases(std::mt19937_64& rng) {
  int exact = 0;
  for (int i = 0; i < kCases; ++i) {
    const std::size_t fan_in = 32 * (1 + rng() % 8);
    const std::size_t width = 32 * (1 + rng() % 4);
    oracle::BinLayer ol;
    for (std::size_t j = 0; j < width; ++j) ol.w.push_back(fixture::random_signs(rng, fan_in));
    ol.bn = fixture::random_hidden_bn(rng, width, fan_in);
    const auto layer = fixture::hidden_layer(ol, fan_in);
    const auto in = fixture::random_signs(rng, fan_in);
    std::vector<long double> pre(width);
    for (std::size_t j = 0; j < width; ++j) pre[j] = oracle::pm_dot(in, ol.w[j]);
    if (binary_dense_forward(fixture::pack(in), layer) ==
        fixture::pack(oracle::sign_of_bn(pre, ol.bn))) {
      ++exact;
    }
  }
  return exact;
}

int fold_cases(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.05, 5.0);
  std::normal_distribution<double> normal(0.0, 3.0);
  int exact = 0;
  for (int i = 0; i < kCases; ++i) {
    const double gamma = ((rng() & 1u) ? -1.0 : 1.0) * mag(rng);
    const double beta = normal(rng);
    const double mu = normal(rng);
    const double sigma = mag(rng);
    const double eps = (rng() & 1u) ? 1e-3 : 0.0;
    const oracle::Bn bn{{gamma}, {beta}, {mu}, {sigma}, eps};
    double x = 0.0;
    do {
      x = normal(rng) * 4.0;
    } while (std::abs(static_cast<double>(bn.apply(0, x))) < 1e-9);
    const bool direct = bn.apply(0, x) >= 0;
    const FoldedThreshold t = fold_bn_threshold(gamma, beta, mu, sigma, eps);
    if (((x >= t.tau) != t.flip) == direct) ++exact;
  }
  return exact;
}

double float_forward_cases(std::mt19937_64& rng) {
  std::vector<ModelArchitecture> archs;
  for (const auto& a : architecture_catalog()) {
    if (a.kind == ModelKind::kFloat) archs.push_back(a);
  }
  std::normal_distribution<double> normal(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < kCases; ++i) {
    const ModelArchitecture& a = archs[static_cast<std::size_t>(i) % archs.size()];
    const FloatModel m = make_float_model(a, ModelInit::kRandom, static_cast<std::uint64_t>(i));
    std::vector<double> f(kFeatureVectorSize);
    for (auto& v : f) v = normal(rng);
    oracle::Bn bn{m.input_bn.gamma, m.input_bn.beta, m.input_bn.mu, m.input_bn.sigma,
                  m.input_bn.epsilon};
    std::vector<oracle::Dense> layers;
    for (const auto& l : m.layers) layers.push_back(oracle::Dense{l.in, l.out, l.weights, l.bias});
    const auto want = oracle::mlp_forward(f, bn, layers);
    const Prediction got = float_infer(f, m);
    for (std::size_t c = 0; c < want.size(); ++c) {
      worst = std::max(worst, std::abs(got.probabilities[c] - static_cast<double>(want[c])));
    }
    if (static_cast<std::size_t>(got.label) != oracle::argmax(want)) worst = INFINITY;
  }
  return worst;
}

Outcome kernel_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  const int a = xnor_cases(rng);
  const int b = dense_layer_cases(rng);
  const int c = fold_cases(rng);
  const double d = float_forward_cases(rng);
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = a == kCases && b == kCases && c == kCases && d <= 1e-9 && elapsed < 30.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "xnor %d/%d, binary layer %d/%d, fold %d/%d, float max|err| %.3g; %.2f s", a,
                kCases, b, kCases, c, kCases, d, elapsed);
  o.detail = buf;
  return o;
}

std::int16_t random_sample(std::mt19937_64& rng) {
  switch (rng() % 8) {
    case 0: return -32768;
    case 1: return 32767;
    case 2: return static_cast<std::int16_t>(static_cast<int>(rng() % 7) - 3);
    default: return static_cast<std::int16_t>(static_cast<int>(rng() % 65536) - 32768);
  }
}

bool stats_match(std::span<const std::int16_t> w, const AxisFeatures& got, double& worst_var) {
  const oracle::WindowStats want = oracle::window_stats(std::vector<std::int16_t>(w.begin(), w.end()));
  const double rel = want.variance == 0.0 ? std::abs(got.variance)
                                          : std::abs(got.variance - want.variance) / want.variance;
  worst_var = std::max(worst_var, rel);
  return got.mean == want.mean && got.median == want.median && got.max == want.max &&
         got.min == want.min && rel <= 1e-12;
}

Outcome streaming_oracle() {
  std::mt19937_64 rng(77);
  double worst_var = 0.0;
  int windows_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::int16_t> w(kWindowLength);
    for (auto& v : w) v = random_sample(rng);
    if (stats_match(w, axis_features(w), worst_var)) ++windows_ok;
  }

  int streams_ok = 0;
  int schedule_ok = 0;
  std::int64_t events_checked = 0;
  for (int s = 0; s < 100; ++s) {
    const std::int64_t n = static_cast<std::int64_t>(rng() % 5000);
    std::array<std::vector<std::int16_t>, kAxes> axes;
    FeatureExtractor fx;
    bool ok = true;
    std::int64_t events = 0;
    for (std::int64_t i = 1; i <= n; ++i) {
      const Acquisition a{i, random_sample(rng), random_sample(rng), random_sample(rng)};
      axes[0].push_back(a.x);
      axes[1].push_back(a.y);
      axes[2].push_back(a.z);
      const auto ready = fx.push(a);
      const bool due = i >= 64 && i % 32 == 0;
      if (ready.has_value() != due) ok = false;
      if (!ready) continue;
      ++events;
      // Batch recomputation of S_t and S_{t-1} from the raw history.
      for (std::size_t h = 0; h < kHistoryDepth; ++h) {
        const std::size_t end = static_cast<std::size_t>(i) - h * kWindowPeriod;
        for (std::size_t axis = 0; axis < kAxes; ++axis) {
          const std::span<const std::int16_t> w(axes[axis].data() + end - kWindowLength, kWindowLength);
          const oracle::WindowStats want = oracle::window_stats(
              std::vector<std::int16_t>(w.begin(), w.end()));
          const std::size_t base = h * kFeatureSetSize + axis * 5;
          const auto& f = ready->features;
          const double rel = want.variance == 0.0
                                 ? std::abs(f[base + 2])
                                 : std::abs(f[base + 2] - want.variance) / want.variance;
          worst_var = std::max(worst_var, rel);
          if (f[base] != want.mean || f[base + 1] != want.median || rel > 1e-12 ||
              f[base + 3] != want.max || f[base + 4] != want.min) {
            ok = false;
          }
        }
      }
    }
    events_checked += events;
    if (ok) ++streams_ok;
    if (events == expected_event_count(n) && events == std::max<std::int64_t>(0, n / 32 - 1)) {
      ++schedule_ok;
    }
  }
  Outcome o;
  o.pass = windows_ok == 1000 && streams_ok == 100 && schedule_ok == 100;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "windows %d/1000, streams %d/100 (%lld events), schedule %d/100, worst variance rel err %.3g",
                windows_ok, streams_ok, static_cast<long long>(events_checked), schedule_ok, worst_var);
  o.detail = buf;
  return o;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("ispu-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string model = (dir / "m.ispu-model").string();
  Outcome o;
  if (shell(cli() + " init-model --arch Binary_2,64 --init random --seed 3 -o '" + model + "'").code != 0) {
    fs::remove_all(dir);
    return {false, "init-model failed"};
  }
  const std::string script = "idle:640,standup:320,sitdown:320,rotate:640,move:640";
  const std::string gen = cli() + " gen --seed 2024 --script " + script + " 2>/dev/null";
  const std::string chain = gen + " | " + cli() + " features 2>/dev/null | " + cli() +
                            " infer -m '" + model + "' 2>/dev/null";
  const Run g1 = shell(gen);
  const Run g2 = shell(gen);
  const Run f1 = shell(gen + " | " + cli() + " features 2>/dev/null");
  const Run f2 = shell(gen + " | " + cli() + " features 2>/dev/null");
  const Run i1 = shell(chain);
  const Run i2 = shell(chain);
  fs::remove_all(dir);
  const auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  o.pass = g1.code == 0 && f1.code == 0 && i1.code == 0 && i2.code == 0 && g1.out == g2.out &&
           f1.out == f2.out && i1.out == i2.out && lines(i1.out) == 1 + expected_event_count(2560);
  o.detail = "gen " + std::to_string(lines(g1.out) - 1) + " rows, features " +
             std::to_string(lines(f1.out) - 1) + " rows, infer " + std::to_string(lines(i1.out) - 1) +
             " rows; byte-identical across runs: " + (o.pass ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const auto guarded = [](const std::string& name, Outcome (*fn)()) {
    try {
      report(name, fn());
    } catch (const std::exception& e) {
      report(name, {false, std::string("exception: ") + e.what()});
    }
  };
  guarded("catalog-macs", table_one);
  guarded("latency-energy", latency_energy);
  guarded("speedup-claims", speedups);
  guarded("memory-wall", memory_wall);
  guarded("kernel-exactness", kernel_exactness);
  guarded("streaming-feature-oracle", streaming_oracle);
  guarded("pipeline-determinism", determinism);
  const bool substitutes_ok = failures == 0;
  report("accuracy-not-reproducible",
         {substitutes_ok,
          "published 96-98% float / 93-97% binary accuracy needs the unavailable dataset; "
          "substituted by the kernel, streaming and determinism checks above" +
              std::string(substitutes_ok ? "" : " (some substitutes failed)")});
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
