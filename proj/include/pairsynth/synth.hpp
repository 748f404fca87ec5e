#pragma once

// Graph -> pair matrix -> source configuration and circuit, plus the
// verification loop and the built-in reference fixtures.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pairsynth/core.hpp"
#include "pairsynth/decomp.hpp"
#include "pairsynth/graph.hpp"

namespace pairsynth {

struct Fixture {
  std::string name;
  ColoredGraph graph;
  Encoding encoding;
  Partition partition;
  DVState target;
};

/// Four vertices aS, aI, bS, bI (qudits 0..3) and colors 0, 1, 2 with six
/// unit-weight edges; partition groups S0..S2, I0..I2 by (range, bin), each
/// holding the a and b path modes.
Fixture builtin_ghz_qutrit();

/// Two-color version of the qutrit fixture: four edges, groups S0, S1, I0, I1.
Fixture builtin_ghz_qubit();

/// Three-term qubit state a1|0001> + a2|0110> + a3|1000> on vertices
/// aS, aI, bS, bI with qudits aS -> 0, bI -> 1, bS -> 2, aI -> 3.
///
/// Weight gauge: the edges (bI0, bS0) and (aI0, bS1) share the magnitude
/// s = sqrt(sum|a| / 12); the other three weights follow from a = 4 w w'.
/// Zero amplitudes remove the edges only they use. Requires sum |a|^2 = 1
/// within 1e-9.
Fixture builtin_l_a4(const std::array<Complex, 3>& alphas);

/// Frequency partition for a ModeSpace whose externals are {a,b} x {S,I}
/// named like "aS": group "<range><color>" holds the a and b modes.
Partition frequency_partition(const ModeSpace& space);

struct SynthOptions {
  /// Rescale beta so |beta|^2 equals this; unset keeps the graph weights.
  std::optional<double> target_gain = 0.01;
  bool diagonal_sources = false;
  bool contamination = false;
  double tolerance = 1e-8;
};

/// One pair source: the two modes it feeds and its amplitude.
struct Source {
  std::size_t row;
  std::size_t col;
  ModeLabel first;
  ModeLabel second;
  Complex amplitude;
};

struct Diagnostics {
  double unitarity_residual = 0.0;
  double reconstruction_residual = 0.0;
  double gain = 0.0;
  double fidelity = 0.0;
  std::optional<double> contamination;
  std::optional<std::string> warning;
};

struct DeviceDesign {
  ModeSpace space;
  Encoding encoding;
  Partition partition;
  BlockSolution solution;
  /// Pair matrix the design must reproduce (after rescaling).
  PairMatrix beta;
  /// Factor applied to the graph weights.
  double scale = 1.0;
  /// Nonzero upper-triangle entries of the source matrix.
  std::vector<Source> sources;
  Diagnostics diagnostics;
};

/// Upper-triangle nonzeros of betabar with their mode labels.
std::vector<Source> source_list(const PairMatrix& beta_bar, const ModeSpace& space);

/// Runs the pipeline. Without a partition the unconstrained factorization is
/// used. Throws EmptyStateError for graphs without perfect matchings and
/// OverConstrainedError when the block constraints cannot be met.
DeviceDesign synthesize(const ColoredGraph& graph, const Encoding& encoding,
                        const std::optional<Partition>& partition,
                        const SynthOptions& options = {});

inline DeviceDesign synthesize(const Fixture& f, bool constrained = true,
                               const SynthOptions& options = {}) {
  return synthesize(f.graph, f.encoding,
                    constrained ? std::optional<Partition>(f.partition)
                                : std::nullopt,
                    options);
}

/// Rebuilds beta from the solution, simulates postselection and compares
/// with `target`. Never throws for a bad design; an empty postselection gives
/// fidelity 0.
Diagnostics verify_design(const DeviceDesign& design, const DVState& target,
                          bool contamination = false);

}  // namespace pairsynth
