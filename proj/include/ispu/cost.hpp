#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ispu {

enum class ModelKind { kFloat, kBinary };

const char* to_string(ModelKind kind);

struct ModelArchitecture {
  ModelKind kind = ModelKind::kFloat;
  std::vector<std::size_t> hidden;
  std::size_t output = 5;

  std::size_t input() const { return kind == ModelKind::kFloat ? 30 : 32; }
  // "Float", "Binary_4,256"; mixed widths print as "Float_[32,64]".
  std::string name() const;

  // Throws Error{kWidthLegality} for binary widths that are not multiples of 32.
  void validate() const;

  bool operator==(const ModelArchitecture&) const = default;
};

// Parses "Float", "Float_2,64", "Float_{2,64}", "Binary_[64,32]" (case
// insensitive). Returns nullopt for anything else.
std::optional<ModelArchitecture> parse_architecture(std::string_view name);

// The thirteen benchmarked architectures, in published order.
const std::vector<ModelArchitecture>& architecture_catalog();
std::optional<std::size_t> catalog_position(const ModelArchitecture& a);

// Published MAC column, parallel to architecture_catalog(). Reference data for
// reports; paper_macs() does not read it.
const std::vector<std::int64_t>& published_macs();

std::int64_t canonical_macs(const ModelArchitecture& a);

// Fitted accounting that reproduces the published MAC column. The fit is
// exact on catalog rows; other shapes are extrapolations.
std::int64_t paper_macs(const ModelArchitecture& a);

struct CalibrationEntry {
  double sensor_cycles_per_mac = 0.0;
  std::optional<double> m4_cycles_per_mac;  // reference only
};

struct CalibrationTable {
  std::map<std::string, CalibrationEntry> entries;  // keyed by name()
  double clock_mhz = 5.0;
  double reference_clock_mhz = 5.0;  // clock the measurements were taken at
  double feature_ms = 6.57;          // at reference_clock_mhz
  double ram_kib = 40.0;
  double reference_energy_uj = 90.0;
  std::string energy_anchor = "Float_2,64";
  std::optional<double> power_mw;  // unset: derived from the anchor

  static CalibrationTable defaults();

  // Throws Error{kValidation} for nonpositive values or a clock other than 5/10.
  void validate() const;

  std::optional<CalibrationEntry> find(const ModelArchitecture& a) const;
  double feature_ms_at_clock() const;
  // Power that makes the anchor's end-to-end inference cost the reference
  // energy at the reference clock, unless overridden.
  double effective_power_mw() const;
};

// Text format: see docs/calibration-format.md.
CalibrationTable parse_calibration(std::string_view text);
std::string format_calibration(const CalibrationTable& cal);
CalibrationTable load_calibration(const std::string& path);

struct Latency {
  double nn_cycles = 0.0;
  double nn_ms = 0.0;
  double total_ms = 0.0;
};

// Missing calibration without override throws Error{kMissingCalibration}.
Latency estimate_latency(const ModelArchitecture& a, const CalibrationTable& cal,
                         std::optional<double> cycles_per_mac = std::nullopt);

double estimate_energy_uj(double total_ms, const CalibrationTable& cal);

// NN time of a divided by NN time of b at the same clock.
double speedup(const ModelArchitecture& a, const ModelArchitecture& b,
               const CalibrationTable& cal);

struct FootprintBreakdown {
  std::int64_t parameters = 0;
  std::int64_t buffers = 0;
  std::int64_t total() const { return parameters + buffers; }
};

inline constexpr std::int64_t kPipelineBufferBytes = 3 * 32 * 2 + 30 * 4 * 2;

FootprintBreakdown memory_breakdown(const ModelArchitecture& a);
std::int64_t memory_footprint(const ModelArchitecture& a);

struct CostReport {
  ModelArchitecture architecture;
  bool in_catalog = false;
  bool macs_extrapolated = false;
  std::int64_t canonical_macs = 0;
  std::int64_t paper_macs = 0;
  std::optional<double> cycles_per_mac;
  std::optional<double> m4_cycles_per_mac;
  std::optional<Latency> latency;
  std::optional<double> energy_uj;
  double clock_mhz = 5.0;
  double power_mw = 0.0;
  std::int64_t footprint_bytes = 0;
  std::int64_t ram_budget_bytes = 0;
  bool deployable = false;
};

// Never throws for a valid architecture; timing fields stay empty without
// calibration.
CostReport make_cost_report(const ModelArchitecture& a, const CalibrationTable& cal,
                            std::optional<double> cycles_per_mac = std::nullopt);

}  // namespace ispu
