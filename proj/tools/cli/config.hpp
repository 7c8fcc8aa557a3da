#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkcim/cim_solver.hpp"
#include "fkcim/model.hpp"
#include "fkcim/time_marching.hpp"

namespace fkcim::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class OutputFormat { csv, json };
enum class TimeSpacing { linear, log };

struct TimesSpec {
  int count = 17;
  TimeSpacing spacing = TimeSpacing::linear;
  bool operator==(const TimesSpec&) const = default;
};

struct DebugSpec {
  bool literal_full_weight_k0 = false;
  D2Formula d2_formula = D2Formula::max;
  HistoryTerm tm_history = HistoryTerm::convolution_trapezoid;
  bool operator==(const DebugSpec&) const = default;
};

struct ReferenceSpec {
  int M = 4096;
  bool operator==(const ReferenceSpec&) const = default;
};

struct ConvergeSpec {
  int n_min = 2;
  int n_max = 32;
  bool operator==(const ConvergeSpec&) const = default;
};

struct BenchSpec {
  std::vector<double> targets{1e-2, 1e-4, 1e-6};
  int n_max = 128;
  int m_max = 65536;
  int repeats = 5;
  bool operator==(const BenchSpec&) const = default;
};

struct OccupationSpec {
  int state = 1;
  std::optional<double> eps1;  // default: stationary fraction of the chain
  std::optional<double> eps2;
  double alpha = 0.5;
  double Lambda = 50.0;
  double t_min = 1e3;
  double t_max = 1e6;
  int count = 13;
  bool operator==(const OccupationSpec&) const = default;
};

/// Everything a run depends on. Defaults reproduce the two-state example
/// with p = 2/3, b = 3/4 on the window [0.6, 3].
struct RunConfig {
  FkParams params{2.0 / 3.0, 0.75, 0.82, 0.59, 1.0, 1.0, 0.89, 0.68, 1.5, 0.55, 0.45};
  ContourKind contour = ContourKind::hyperbolic;
  double a = kDefaultStripA;
  double delta = kDefaultDelta;
  int N = 32;
  double t0 = 0.6;
  double t1 = 3.0;
  TimesSpec times;
  std::string output;  // empty: standard output
  OutputFormat format = OutputFormat::csv;
  DebugSpec debug;
  ReferenceSpec reference;
  ConvergeSpec converge;
  BenchSpec bench;
  OccupationSpec occupation;
  bool record_timing = true;

  bool operator==(const RunConfig&) const = default;
};

/// Throws InvalidParameter on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& config);

/// Checks cross-field invariants (times, window, N, ...). Throws InvalidParameter.
void validate_config(const RunConfig& config);

SolveOptions solve_options(const RunConfig& config);

/// Output times for the [t0, t1] window according to `times`.
std::vector<double> output_times(const RunConfig& config);

std::string to_string(ContourKind kind);
std::string to_string(D2Formula formula);
std::string to_string(HistoryTerm term);

ContourKind parse_contour(const std::string& s);
D2Formula parse_d2_formula(const std::string& s);
OutputFormat parse_format(const std::string& s);

}  // namespace fkcim::cli
