#include "ispu/cost.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ispu/error.hpp"

namespace ispu {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<std::size_t> parse_size(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::vector<std::size_t>> parse_list(std::string_view s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    auto v = parse_size(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!v || *v == 0) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::int64_t sum_hidden(const ModelArchitecture& a) {
  return std::accumulate(a.hidden.begin(), a.hidden.end(), std::int64_t{0},
                         [](std::int64_t acc, std::size_t w) {
                           return acc + static_cast<std::int64_t>(w);
                         });
}

std::int64_t words_for(std::size_t bits) {
  return static_cast<std::int64_t>((bits + 31) / 32);
}

ModelArchitecture arch(ModelKind kind, std::vector<std::size_t> hidden) {
  ModelArchitecture a;
  a.kind = kind;
  a.hidden = std::move(hidden);
  return a;
}

double parse_double(std::string_view token, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(ErrorKind::kParse, "calibration line " + std::to_string(line) +
                                       ": bad number '" + std::string(token) + "'");
  }
  return v;
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

const char* to_string(ModelKind kind) {
  return kind == ModelKind::kFloat ? "float" : "binary";
}

std::string ModelArchitecture::name() const {
  std::string base = kind == ModelKind::kFloat ? "Float" : "Binary";
  if (hidden.empty()) return base;
  const bool uniform =
      std::all_of(hidden.begin(), hidden.end(), [&](std::size_t w) { return w == hidden[0]; });
  if (uniform) {
    return base + "_" + std::to_string(hidden.size()) + "," + std::to_string(hidden[0]);
  }
  std::string list;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i) list += ",";
    list += std::to_string(hidden[i]);
  }
  return base + "_[" + list + "]";
}

void ModelArchitecture::validate() const {
  if (output == 0) throw Error(ErrorKind::kValidation, "architecture has no outputs");
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (hidden[i] == 0) {
      throw Error(ErrorKind::kValidation, "hidden layer " + std::to_string(i + 1) + " is empty");
    }
    if (kind == ModelKind::kBinary && hidden[i] % 32 != 0) {
      throw Error(ErrorKind::kWidthLegality,
                  "hidden layer " + std::to_string(i + 1) + " width " +
                      std::to_string(hidden[i]) + " is not a multiple of 32");
    }
  }
}

std::optional<ModelArchitecture> parse_architecture(std::string_view name) {
  const std::string s = lower(name);
  ModelArchitecture a;
  std::string_view rest;
  if (s.rfind("float", 0) == 0) {
    a.kind = ModelKind::kFloat;
    rest = std::string_view(s).substr(5);
  } else if (s.rfind("binary", 0) == 0) {
    a.kind = ModelKind::kBinary;
    rest = std::string_view(s).substr(6);
  } else {
    return std::nullopt;
  }
  if (rest.empty()) return a;
  if (rest.front() != '_') return std::nullopt;
  rest.remove_prefix(1);
  if (rest.size() >= 2 && rest.front() == '[' && rest.back() == ']') {
    auto widths = parse_list(rest.substr(1, rest.size() - 2));
    if (!widths) return std::nullopt;
    a.hidden = std::move(*widths);
    return a;
  }
  if (rest.size() >= 2 && rest.front() == '{' && rest.back() == '}') {
    rest = rest.substr(1, rest.size() - 2);
  }
  auto pair = parse_list(rest);
  if (!pair || pair->size() != 2) return std::nullopt;
  a.hidden.assign((*pair)[0], (*pair)[1]);
  return a;
}

const std::vector<ModelArchitecture>& architecture_catalog() {
  static const std::vector<ModelArchitecture> catalog = {
      arch(ModelKind::kFloat, {}),
      arch(ModelKind::kFloat, {32}),
      arch(ModelKind::kFloat, {64}),
      arch(ModelKind::kFloat, {32, 32}),
      arch(ModelKind::kFloat, {64, 64}),
      arch(ModelKind::kFloat, {32, 32, 32}),
      arch(ModelKind::kBinary, {}),
      arch(ModelKind::kBinary, {32}),
      arch(ModelKind::kBinary, {64}),
      arch(ModelKind::kBinary, {32, 32}),
      arch(ModelKind::kBinary, {64, 64}),
      arch(ModelKind::kBinary, {32, 32, 32}),
      arch(ModelKind::kBinary, {256, 256, 256, 256}),
  };
  return catalog;
}

std::optional<std::size_t> catalog_position(const ModelArchitecture& a) {
  const auto& catalog = architecture_catalog();
  auto it = std::find(catalog.begin(), catalog.end(), a);
  if (it == catalog.end()) return std::nullopt;
  return static_cast<std::size_t>(it - catalog.begin());
}

const std::vector<std::int64_t>& published_macs() {
  static const std::vector<std::int64_t> macs = {290,  1324, 2508, 2412, 6732, 3500,  304,
                                                 1328, 2640, 2416, 6864, 3504, 208272};
  return macs;
}

std::int64_t canonical_macs(const ModelArchitecture& a) {
  std::int64_t macs = 0;
  std::size_t prev = a.input();
  for (std::size_t w : a.hidden) {
    macs += static_cast<std::int64_t>(prev * w);
    prev = w;
  }
  return macs + static_cast<std::int64_t>(prev * a.output);
}

std::int64_t paper_macs(const ModelArchitecture& a) {
  const std::int64_t base = canonical_macs(a) + 2 * sum_hidden(a);
  if (a.kind == ModelKind::kFloat) return base + 140;
  const bool wide_tail = a.hidden.empty() || a.hidden.back() != 32;
  return base + 80 + (wide_tail ? 64 : 0);
}

CalibrationTable CalibrationTable::defaults() {
  CalibrationTable cal;
  struct Row {
    ModelArchitecture a;
    double sensor;
    std::optional<double> m4;
  };
  const auto& c = architecture_catalog();
  const Row rows[] = {
      {c[0], 32.32, 18.20},  {c[1], 15.86, 13.28},  {c[2], 12.76, 12.03},
      {c[3], 13.26, 12.45},  {c[4], 10.67, 10.91},  {c[5], 11.98, 12.13},
      {c[6], 32.09, {}},     {c[7], 19.78, {}},     {c[8], 16.32, {}},
      {c[9], 13.02, {}},     {c[10], 7.88, {}},     {c[11], 10.46, {}},
      {c[12], 1.48, {}},
  };
  for (const Row& r : rows) cal.entries[r.a.name()] = CalibrationEntry{r.sensor, r.m4};
  return cal;
}

void CalibrationTable::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kValidation, std::string("calibration ") + what + " must be positive");
    }
  };
  positive(clock_mhz, "clock");
  positive(reference_clock_mhz, "reference clock");
  positive(feature_ms, "feature duration");
  positive(ram_kib, "RAM budget");
  positive(reference_energy_uj, "reference energy");
  if (power_mw) positive(*power_mw, "power");
  if (clock_mhz != 5.0 && clock_mhz != 10.0) {
    throw Error(ErrorKind::kValidation, "clock must be 5 or 10 MHz");
  }
  for (const auto& [name, e] : entries) {
    if (!(e.sensor_cycles_per_mac > 0.0)) {
      throw Error(ErrorKind::kValidation, "cycles/MAC for " + name + " must be positive");
    }
    if (e.m4_cycles_per_mac && !(*e.m4_cycles_per_mac > 0.0)) {
      throw Error(ErrorKind::kValidation, "M4 cycles/MAC for " + name + " must be positive");
    }
  }
}

std::optional<CalibrationEntry> CalibrationTable::find(const ModelArchitecture& a) const {
  auto it = entries.find(a.name());
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

double CalibrationTable::feature_ms_at_clock() const {
  return feature_ms * reference_clock_mhz / clock_mhz;
}

double CalibrationTable::effective_power_mw() const {
  if (power_mw) return *power_mw;
  auto anchor = parse_architecture(energy_anchor);
  if (!anchor) {
    throw Error(ErrorKind::kMissingCalibration, "energy anchor '" + energy_anchor + "' is not an architecture");
  }
  CalibrationTable at_reference = *this;
  at_reference.clock_mhz = reference_clock_mhz;
  const Latency ref = estimate_latency(*anchor, at_reference);
  return reference_energy_uj / ref.total_ms;
}

CalibrationTable parse_calibration(std::string_view text) {
  CalibrationTable cal;
  cal.entries.clear();
  bool saw_version = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto need = [&](std::size_t n) {
      if (tok.size() != n) {
        throw Error(ErrorKind::kParse, "calibration line " + std::to_string(number) +
                                           ": expected " + std::to_string(n) + " fields");
      }
    };
    const std::string& key = tok[0];
    if (key == "version") {
      need(2);
      if (tok[1] != "1") {
        throw Error(ErrorKind::kParse, "unsupported calibration version " + tok[1]);
      }
      saw_version = true;
    } else if (key == "clock_mhz") {
      need(2);
      cal.clock_mhz = parse_double(tok[1], number);
    } else if (key == "reference_clock_mhz") {
      need(2);
      cal.reference_clock_mhz = parse_double(tok[1], number);
    } else if (key == "feature_ms") {
      need(2);
      cal.feature_ms = parse_double(tok[1], number);
    } else if (key == "ram_kib") {
      need(2);
      cal.ram_kib = parse_double(tok[1], number);
    } else if (key == "reference_energy_uj") {
      need(2);
      cal.reference_energy_uj = parse_double(tok[1], number);
    } else if (key == "energy_anchor") {
      need(2);
      cal.energy_anchor = tok[1];
    } else if (key == "power_mw") {
      need(2);
      if (tok[1] == "auto") {
        cal.power_mw.reset();
      } else {
        cal.power_mw = parse_double(tok[1], number);
      }
    } else if (key == "arch") {
      need(4);
      auto a = parse_architecture(tok[1]);
      if (!a) {
        throw Error(ErrorKind::kParse, "calibration line " + std::to_string(number) +
                                           ": unknown architecture '" + tok[1] + "'");
      }
      CalibrationEntry e;
      e.sensor_cycles_per_mac = parse_double(tok[2], number);
      if (tok[3] != "-") e.m4_cycles_per_mac = parse_double(tok[3], number);
      cal.entries[a->name()] = e;
    } else {
      throw Error(ErrorKind::kParse, "calibration line " + std::to_string(number) +
                                         ": unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw Error(ErrorKind::kParse, "calibration file lacks a version line");
  cal.validate();
  return cal;
}

std::string format_calibration(const CalibrationTable& cal) {
  std::ostringstream out;
  out << "version 1\n"
      << "clock_mhz " << format_number(cal.clock_mhz) << "\n"
      << "reference_clock_mhz " << format_number(cal.reference_clock_mhz) << "\n"
      << "feature_ms " << format_number(cal.feature_ms) << "\n"
      << "ram_kib " << format_number(cal.ram_kib) << "\n"
      << "reference_energy_uj " << format_number(cal.reference_energy_uj) << "\n"
      << "energy_anchor " << cal.energy_anchor << "\n"
      << "power_mw " << (cal.power_mw ? format_number(*cal.power_mw) : "auto") << "\n";
  // Catalog order first, then anything extra.
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const CalibrationEntry& e) {
    out << "arch " << name << " " << format_number(e.sensor_cycles_per_mac) << " "
        << (e.m4_cycles_per_mac ? format_number(*e.m4_cycles_per_mac) : "-") << "\n";
    written.push_back(name);
  };
  for (const auto& a : architecture_catalog()) {
    if (auto it = cal.entries.find(a.name()); it != cal.entries.end()) emit(it->first, it->second);
  }
  for (const auto& [name, e] : cal.entries) {
    if (std::find(written.begin(), written.end(), name) == written.end()) emit(name, e);
  }
  return out.str();
}

CalibrationTable load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open calibration file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_calibration(buf.str());
}

Latency estimate_latency(const ModelArchitecture& a, const CalibrationTable& cal,
                         std::optional<double> cycles_per_mac) {
  if (!cycles_per_mac) {
    auto entry = cal.find(a);
    if (!entry) {
      throw Error(ErrorKind::kMissingCalibration, "no cycles/MAC calibration for " + a.name());
    }
    cycles_per_mac = entry->sensor_cycles_per_mac;
  }
  Latency l;
  l.nn_cycles = static_cast<double>(paper_macs(a)) * *cycles_per_mac;
  l.nn_ms = l.nn_cycles / (cal.clock_mhz * 1e3);
  l.total_ms = l.nn_ms + cal.feature_ms_at_clock();
  return l;
}

double estimate_energy_uj(double total_ms, const CalibrationTable& cal) {
  if (total_ms < 0.0) throw Error(ErrorKind::kContract, "negative duration");
  return cal.effective_power_mw() * total_ms;
}

double speedup(const ModelArchitecture& a, const ModelArchitecture& b,
               const CalibrationTable& cal) {
  return estimate_latency(a, cal).nn_ms / estimate_latency(b, cal).nn_ms;
}

FootprintBreakdown memory_breakdown(const ModelArchitecture& a) {
  FootprintBreakdown f;
  f.buffers = kPipelineBufferBytes;
  const std::int64_t bn_bytes = 4 * 4 * static_cast<std::int64_t>(a.input());
  if (a.kind == ModelKind::kFloat) {
    std::int64_t params = 0;
    std::size_t prev = a.input();
    for (std::size_t w : a.hidden) {
      params += static_cast<std::int64_t>(prev * w + w);
      prev = w;
    }
    params += static_cast<std::int64_t>(prev * a.output + a.output);
    f.parameters = 4 * params + bn_bytes;
    return f;
  }
  std::int64_t words = 0;
  std::size_t prev = a.input();
  for (std::size_t w : a.hidden) {
    words += static_cast<std::int64_t>(w) * words_for(prev);
    prev = w;
  }
  words += static_cast<std::int64_t>(a.output) * words_for(prev);
  const std::int64_t thresholds = 4 * sum_hidden(a);
  const std::int64_t affine = 4 * 2 * static_cast<std::int64_t>(a.output);
  f.parameters = 4 * words + thresholds + affine + bn_bytes;
  return f;
}

std::int64_t memory_footprint(const ModelArchitecture& a) { return memory_breakdown(a).total(); }

CostReport make_cost_report(const ModelArchitecture& a, const CalibrationTable& cal,
                            std::optional<double> cycles_per_mac) {
  a.validate();
  CostReport r;
  r.architecture = a;
  r.in_catalog = catalog_position(a).has_value();
  r.macs_extrapolated = !r.in_catalog;
  r.canonical_macs = canonical_macs(a);
  r.paper_macs = paper_macs(a);
  r.clock_mhz = cal.clock_mhz;
  r.power_mw = cal.effective_power_mw();
  if (auto entry = cal.find(a)) {
    r.m4_cycles_per_mac = entry->m4_cycles_per_mac;
    if (!cycles_per_mac) cycles_per_mac = entry->sensor_cycles_per_mac;
  }
  if (cycles_per_mac) {
    r.cycles_per_mac = cycles_per_mac;
    r.latency = estimate_latency(a, cal, cycles_per_mac);
    r.energy_uj = estimate_energy_uj(r.latency->total_ms, cal);
  }
  r.footprint_bytes = memory_footprint(a);
  r.ram_budget_bytes = static_cast<std::int64_t>(std::llround(cal.ram_kib * 1024.0));
  r.deployable = r.footprint_bytes <= r.ram_budget_bytes;
  return r;
}

}  // namespace ispu
