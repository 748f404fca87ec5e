#pragma once

// Mode indexing, complex symmetric pair matrices, unitaries, block partitions
// and qudit encodings shared by every other part of the library.

#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pairsynth {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Thrown when an argument violates a documented precondition or invariant.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A (external label, internal label) pair naming one optical mode.
struct ModeLabel {
  std::string external;
  std::string internal;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

/// Ordered set of M = |externals| * |internals| modes.
///
/// Flat index m = index(external) * |internals| + index(internal). Block
/// structure is never inferred from this arithmetic; use Partition for that.
class ModeSpace {
 public:
  ModeSpace() = default;
  ModeSpace(std::vector<std::string> externals,
            std::vector<std::string> internals);

  std::size_t size() const { return externals_.size() * internals_.size(); }
  std::size_t num_externals() const { return externals_.size(); }
  std::size_t num_internals() const { return internals_.size(); }

  const std::vector<std::string>& externals() const { return externals_; }
  const std::vector<std::string>& internals() const { return internals_; }

  bool contains(const std::string& external,
                const std::string& internal) const;
  std::size_t external_index(const std::string& external) const;
  std::size_t internal_index(const std::string& internal) const;

  std::size_t index(const std::string& external,
                    const std::string& internal) const;
  std::size_t index(const ModeLabel& label) const {
    return index(label.external, label.internal);
  }
  ModeLabel label(std::size_t flat) const;
  std::size_t external_of(std::size_t flat) const {
    return flat / internals_.size();
  }
  std::size_t internal_of(std::size_t flat) const {
    return flat % internals_.size();
  }

  friend bool operator==(const ModeSpace& a, const ModeSpace& b) {
    return a.externals_ == b.externals_ && a.internals_ == b.internals_;
  }

 private:
  std::vector<std::string> externals_;
  std::vector<std::string> internals_;
  std::map<std::string, std::size_t> external_pos_;
  std::map<std::string, std::size_t> internal_pos_;
};

/// One upper-triangle entry used to build a PairMatrix.
struct PairEntry {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// M x M complex symmetric matrix of pair amplitudes. Holds the source
/// configuration, the post-circuit pair matrix, or graph weights by role.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(std::size_t dim);

  /// Accepts a full matrix. Rejects non-square, non-finite, or asymmetric
  /// input (relative Frobenius asymmetry above 1e-12); stores (A + A^T) / 2 so
  /// the stored matrix is exactly symmetric.
  static PairMatrix from_full(const CMatrix& full);

  /// Builds from entries with row <= col; each entry is mirrored. Duplicate
  /// positions are rejected.
  static PairMatrix from_upper(std::size_t dim,
                               const std::vector<PairEntry>& entries);

  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  const CMatrix& matrix() const { return data_; }
  Complex operator()(std::size_t i, std::size_t j) const { return data_(i, j); }

  double squared_norm() const { return data_.squaredNorm(); }
  double frobenius() const { return data_.norm(); }

  PairMatrix scaled(Complex factor) const;

  /// Nonzero upper-triangle entries (|value| > tol * max|entry|).
  std::vector<PairEntry> upper_entries(double rel_tol = 0.0) const;

 private:
  CMatrix data_;
};

/// Square matrix validated unitary: ||U^dagger U - 1||_F <= tol * sqrt(M).
class UnitaryMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-12;

  UnitaryMatrix() = default;
  explicit UnitaryMatrix(CMatrix u, double tol = kDefaultTolerance);
  static UnitaryMatrix identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  const CMatrix& matrix() const { return data_; }
  Complex operator()(std::size_t i, std::size_t j) const { return data_(i, j); }

  /// ||U^dagger U - 1||_F.
  double unitarity_residual() const;

 private:
  CMatrix data_;
};

double unitarity_residual(const CMatrix& u);

/// Assignment of every mode to exactly one non-empty named group. Members of
/// a group are listed in ascending flat-index order.
class Partition {
 public:
  Partition() = default;

  /// group_of_mode[m] is the name of the group containing flat mode m;
  /// group_order lists every group name exactly once.
  Partition(std::vector<std::string> group_order,
            const std::vector<std::string>& group_of_mode);

  /// Every mode in one group.
  static Partition single(std::size_t dim, const std::string& name = "all");

  std::size_t dim() const { return group_of_.size(); }
  std::size_t num_groups() const { return groups_.size(); }
  const std::vector<std::string>& groups() const { return groups_; }
  const std::string& name(std::size_t group) const { return groups_.at(group); }

  /// Throws DomainError for an unknown name.
  std::size_t group_index(const std::string& name) const;
  std::size_t group_of(std::size_t mode) const { return group_of_.at(mode); }
  const std::vector<std::size_t>& members(std::size_t group) const {
    return members_.at(group);
  }
  const std::vector<std::size_t>& members(const std::string& name) const {
    return members_.at(group_index(name));
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.groups_ == b.groups_ && a.group_of_ == b.group_of_;
  }

 private:
  std::vector<std::string> groups_;
  std::vector<std::size_t> group_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::map<std::string, std::size_t> index_;
};

/// Dense |i| x |j| submatrix for groups i, j in within-group order.
CMatrix block(const CMatrix& matrix, const Partition& partition,
              std::size_t gi, std::size_t gj);
CMatrix block(const PairMatrix& matrix, const Partition& partition,
              const std::string& gi, const std::string& gj);
CMatrix block(const UnitaryMatrix& matrix, const Partition& partition,
              const std::string& gi, const std::string& gj);

/// Writes a block back through the same indexing used by block().
void set_block(CMatrix& matrix, const Partition& partition, std::size_t gi,
               std::size_t gj, const CMatrix& value);

/// Sum of |entries|^2; the pair-generation probability per pulse at low gain.
inline double squared_norm(const PairMatrix& m) { return m.squared_norm(); }

/// Map from external labels to qudit positions and from internal labels to
/// logical values.
class Encoding {
 public:
  Encoding() = default;
  Encoding(std::map<std::string, int> qudit_of,
           std::map<std::string, int> logical_of);

  /// Qudits numbered by the order of externals; logical values by the order
  /// of internals.
  static Encoding identity(const ModeSpace& space);

  int qudit(const std::string& external) const;
  int logical(const std::string& internal) const;
  int num_qudits() const { return static_cast<int>(qudit_of_.size()); }
  /// d = 1 + the largest logical value.
  int dimension() const { return dimension_; }

  const std::map<std::string, int>& qudit_of() const { return qudit_of_; }
  const std::map<std::string, int>& logical_of() const { return logical_of_; }

  /// Throws DomainError unless every external and internal label is mapped.
  void check_covers(const ModeSpace& space) const;

  friend bool operator==(const Encoding& a, const Encoding& b) {
    return a.qudit_of_ == b.qudit_of_ && a.logical_of_ == b.logical_of_;
  }

 private:
  std::map<std::string, int> qudit_of_;
  std::map<std::string, int> logical_of_;
  int dimension_ = 0;
};

}  // namespace pairsynth
