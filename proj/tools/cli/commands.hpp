#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "fkcim/cim_solver.hpp"
#include "fkcim/occupation.hpp"

namespace fkcim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitContour = 3,
  kExitSingular = 4,
  kExitOverflow = 5,
};

/// Number of times per window at which errors are measured.
inline constexpr int kErrorGridSize = 17;

struct SolveResult {
  std::vector<SolutionSample> samples;
  std::vector<std::string> warnings;
};

SolveResult compute_solve(const RunConfig& config);
std::vector<SolutionSample> compute_reference(const RunConfig& config);

struct ConvergenceRow {
  int N = 0;
  double error_G1 = 0.0;
  double error_G2 = 0.0;
  std::int64_t wall_time_ns = 0;
};

struct ConvergeResult {
  std::vector<ConvergenceRow> rows;
  double reference_error = 0.0;  // step-halving estimate of the TM reference error
  double theory_rate = 0.0;
  std::optional<DecayFit> fit;
  std::string fit_note;  // reason when no fit was possible
};

ConvergeResult compute_converge(const RunConfig& config);

struct BenchRow {
  double target = 0.0;
  std::string method;       // CIM-PC, CIM-HC or TMs
  std::optional<int> size;  // N or M; empty when the scan bound was hit
  int bound = 0;
  std::int64_t wall_time_ns = 0;
};

std::vector<BenchRow> compute_bench(const RunConfig& config);

struct OccupationResult {
  std::vector<OccupationSample> samples;
  double fraction = 0.0;  // eps_state / (eps1 + eps2)
  std::optional<AsymptoteFit> fit;
  std::string fit_note;
};

OccupationResult compute_occupation(const RunConfig& config);

/// Full command output (CSV or JSON) as written to the output file.
std::string render(const std::string& command, const RunConfig& config, std::vector<std::string>* warnings);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fkcim::cli
