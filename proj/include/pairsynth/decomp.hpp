#pragma once

// Factorizations and the solvers for beta = U betabar U^T, either with an
// arbitrary unitary (global Takagi) or with U block-diagonal over a Partition.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pairsynth/core.hpp"

namespace pairsynth {

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kSingularThreshold = 1e-12;

/// a = U diag(s) U^T with s >= 0 descending.
struct TakagiResult {
  UnitaryMatrix unitary;
  RVector singulars;
};

/// Autonne-Takagi factorization of a complex symmetric matrix.
///
/// Works on the real symmetric embedding [[Re A, Im A], [Im A, -Re A]]: an
/// eigenvector [x; y] for eigenvalue s >= 0 gives a Takagi vector x + iy with
/// A conj(u) = s u. Any orthonormal basis of a degenerate positive
/// eigenspace gives orthonormal Takagi vectors.
/// Columns for singular values under the threshold are discarded and the
/// unitary is completed by Householder QR. Only the reconstruction identity
/// is promised; the factor is not unique.
TakagiResult takagi(const PairMatrix& a);

/// a = U diag(s) V^dagger (full U and V; s has min(rows, cols) entries).
struct SvdResult {
  CMatrix u;
  RVector singulars;
  CMatrix v;
};
SvdResult svd(const CMatrix& a);

enum class PolarSide {
  Right,  // a = W P, P = sqrt(a^dagger a)
  Left,   // a = P W, P = sqrt(a a^dagger)
};

struct PolarResult {
  CMatrix unitary;
  CMatrix positive;
};
/// Polar decomposition of a square matrix. Throws DomainError otherwise.
PolarResult polar(const CMatrix& a, PolarSide side = PolarSide::Right);

/// How one block was resolved.
enum class CaseTag {
  Zero,          // beta block zero, betabar block set to zero
  DiagTakagi,    // diagonal block, Takagi fixes U_ii
  OffdiagMult,   // both unitaries known, betabar by multiplication
  OffdiagPolar,  // one unitary known, polar decomposition fixes the other
  OffdiagSvd,    // neither known, SVD fixes both
  FreeIdentity,  // group never constrained, U_ii = 1
};
std::string to_string(CaseTag tag);
CaseTag case_tag_from_string(const std::string& s);

struct ResolutionRecord {
  std::string group_i;
  std::string group_j;
  CaseTag tag;

  friend bool operator==(const ResolutionRecord&, const ResolutionRecord&) = default;
};

struct BlockSolution {
  Partition partition;
  PairMatrix beta_bar;
  /// Indexed like partition.groups().
  std::vector<CMatrix> block_unitaries;
  /// ||beta - U betabar U^T||_F / ||beta||_F (absolute when beta = 0).
  double residual = 0.0;
  std::vector<ResolutionRecord> resolution_log;

  const CMatrix& block_unitary(const std::string& group) const {
    return block_unitaries.at(partition.group_index(group));
  }
  /// Block-diagonal U; entries between different groups are exactly zero.
  CMatrix assembled_unitary() const;
};

/// Per-block mismatch of a failed constrained solve, relative to ||beta||_F.
struct BlockResidual {
  std::string group_i;
  std::string group_j;
  double residual;
};

struct OverConstraintReport {
  double residual = 0.0;
  double tolerance = 0.0;
  std::vector<BlockResidual> blocks;            // every nonzero block
  std::vector<BlockResidual> inconsistent;      // blocks above tolerance
  std::vector<ResolutionRecord> resolution_log;
  std::string message() const;
};

struct ConstrainedOptions {
  /// Require every betabar block to be diagonal (each source couples one
  /// pair of waveguides). Non-diagonal parts are dropped and the mismatch
  /// surfaces in the residual check.
  bool diagonal_sources = false;
  double tolerance = 1e-8;
};

/// Either a solution or the structured over-constraint report.
class SolveResult {
 public:
  SolveResult(BlockSolution s) : value_(std::move(s)) {}
  SolveResult(OverConstraintReport r) : value_(std::move(r)) {}

  bool ok() const { return std::holds_alternative<BlockSolution>(value_); }
  const BlockSolution& solution() const { return std::get<BlockSolution>(value_); }
  const OverConstraintReport& failure() const {
    return std::get<OverConstraintReport>(value_);
  }

 private:
  std::variant<BlockSolution, OverConstraintReport> value_;
};

/// Raised by callers that need a solution when the solve failed.
class OverConstrainedError : public std::runtime_error {
 public:
  explicit OverConstrainedError(OverConstraintReport report)
      : std::runtime_error(report.message()), report_(std::move(report)) {}
  const OverConstraintReport& report() const { return report_; }

 private:
  OverConstraintReport report_;
};

/// Unconstrained solve: betabar = diag(takagi singulars), one group "all".
BlockSolution solve_global(const PairMatrix& beta);

/// Block-diagonal solve.
///   1. zero blocks give zero betabar blocks;
///   2. nonzero diagonal blocks are Takagi-factorized, fixing U_ii;
///   3. nonzero off-diagonal blocks (upper triangle) are taken greedily,
///      most already-fixed unitaries first, ties by (i, j): two fixed give
///      betabar by multiplication, one fixed uses a polar decomposition with
///      betabar the positive factor, none uses an SVD whose gauge is aligned
///      towards the identity;
///   4. groups never constrained get U_ii = 1;
/// then the assembled product is checked against `options.tolerance`.
SolveResult solve_block_constrained(const PairMatrix& beta,
                                    const Partition& partition,
                                    const ConstrainedOptions& options = {});

/// U betabar U^T for the assembled block-diagonal U.
PairMatrix reconstruct(const BlockSolution& sol);

/// ||a - b||_F / ||a||_F, or ||b||_F when a = 0.
double relative_residual(const CMatrix& a, const CMatrix& b);

}  // namespace pairsynth
