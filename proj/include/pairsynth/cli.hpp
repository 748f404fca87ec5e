#pragma once

// Command implementations behind the `pairsynth` executable. Each command
// writes its JSON report to `out`, messages to `err`, and returns the exit
// code.

#include <optional>
#include <ostream>
#include <string>

namespace pairsynth {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitEmpty = 2,
  kExitOverConstrained = 3,
  kExitVerificationFailed = 4,
};

/// Acceptance thresholds of `verify`.
inline constexpr double kVerifyFidelityTolerance = 1e-6;
inline constexpr double kVerifyResidualTolerance = 1e-6;

int cmd_matchings(const std::string& graph_path, std::ostream& out,
                  std::ostream& err);

struct SimulateArgs {
  std::string graph_path;
  /// Highest expansion order; defaults to half the number of externals.
  std::optional<int> order;
  bool contamination = false;
  /// Rescale the weights so |beta|^2 equals this.
  std::optional<double> gain;
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct SynthArgs {
  std::string graph_path;
  std::optional<std::string> partition_path;  // unset: unconstrained
  std::optional<double> gain = 0.01;
  bool diagonal_sources = false;
  bool contamination = false;
  std::string output_path;
};
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

int cmd_verify(const std::string& design_path, const std::string& graph_path,
               std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to one of the commands above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pairsynth
