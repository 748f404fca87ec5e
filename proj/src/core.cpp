#include "pairsynth/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pairsynth {

namespace {

std::map<std::string, std::size_t> index_labels(
    const std::vector<std::string>& labels, const char* what) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!pos.emplace(labels[i], i).second) {
      throw DomainError(std::string("duplicate ") + what + " label '" +
                        labels[i] + "'");
    }
  }
  return pos;
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- ModeSpace

ModeSpace::ModeSpace(std::vector<std::string> externals,
                     std::vector<std::string> internals)
    : externals_(std::move(externals)), internals_(std::move(internals)) {
  external_pos_ = index_labels(externals_, "external");
  internal_pos_ = index_labels(internals_, "internal");
}

bool ModeSpace::contains(const std::string& external,
                         const std::string& internal) const {
  return external_pos_.count(external) != 0 &&
         internal_pos_.count(internal) != 0;
}

std::size_t ModeSpace::external_index(const std::string& external) const {
  auto it = external_pos_.find(external);
  if (it == external_pos_.end()) {
    throw DomainError("unknown external label '" + external + "'");
  }
  return it->second;
}

std::size_t ModeSpace::internal_index(const std::string& internal) const {
  auto it = internal_pos_.find(internal);
  if (it == internal_pos_.end()) {
    throw DomainError("unknown internal label '" + internal + "'");
  }
  return it->second;
}

std::size_t ModeSpace::index(const std::string& external,
                             const std::string& internal) const {
  return external_index(external) * internals_.size() +
         internal_index(internal);
}

ModeLabel ModeSpace::label(std::size_t flat) const {
  if (flat >= size()) {
    throw DomainError("mode index out of range");
  }
  return {externals_[external_of(flat)], internals_[internal_of(flat)]};
}

// --------------------------------------------------------------- PairMatrix

PairMatrix::PairMatrix(std::size_t dim)
    : data_(CMatrix::Zero(static_cast<Eigen::Index>(dim),
                          static_cast<Eigen::Index>(dim))) {}

PairMatrix PairMatrix::from_full(const CMatrix& full) {
  if (full.rows() != full.cols()) {
    throw DomainError("pair matrix must be square");
  }
  if (!all_finite(full)) {
    throw DomainError("pair matrix has non-finite entries");
  }
  const double asym = (full - full.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, full.norm())) {
    throw DomainError("pair matrix is not symmetric");
  }
  PairMatrix out;
  // IEEE addition commutes, so the average is bitwise symmetric.
  out.data_ = 0.5 * (full + full.transpose());
  return out;
}

PairMatrix PairMatrix::from_upper(std::size_t dim,
                                  const std::vector<PairEntry>& entries) {
  PairMatrix out(dim);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : entries) {
    if (e.row > e.col) {
      throw DomainError("upper-triangle entry has row > col");
    }
    if (e.col >= dim) {
      throw DomainError("pair entry index out of range");
    }
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw DomainError("pair matrix has non-finite entries");
    }
    if (!seen.emplace(e.row, e.col).second) {
      throw DomainError("duplicate pair entry");
    }
    const auto r = static_cast<Eigen::Index>(e.row);
    const auto c = static_cast<Eigen::Index>(e.col);
    out.data_(r, c) = e.value;
    out.data_(c, r) = e.value;
  }
  return out;
}

PairMatrix PairMatrix::scaled(Complex factor) const {
  PairMatrix out;
  out.data_ = data_ * factor;
  return out;
}

std::vector<PairEntry> PairMatrix::upper_entries(double rel_tol) const {
  const double cutoff = rel_tol * (data_.size() ? data_.cwiseAbs().maxCoeff() : 0.0);
  std::vector<PairEntry> out;
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    for (Eigen::Index j = i; j < data_.cols(); ++j) {
      const Complex v = data_(i, j);
      if (v != Complex{} && std::abs(v) > cutoff) {
        out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), v});
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ UnitaryMatrix

double unitarity_residual(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

UnitaryMatrix::UnitaryMatrix(CMatrix u, double tol) : data_(std::move(u)) {
  if (data_.rows() != data_.cols()) {
    throw DomainError("unitary must be square");
  }
  if (!all_finite(data_)) {
    throw DomainError("unitary has non-finite entries");
  }
  const double res = pairsynth::unitarity_residual(data_);
  if (res > tol * std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, data_.rows())))) {
    throw DomainError("matrix is not unitary (residual " + std::to_string(res) + ")");
  }
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryMatrix(CMatrix::Identity(n, n));
}

double UnitaryMatrix::unitarity_residual() const {
  return pairsynth::unitarity_residual(data_);
}

// ---------------------------------------------------------------- Partition

Partition::Partition(std::vector<std::string> group_order,
                     const std::vector<std::string>& group_of_mode)
    : groups_(std::move(group_order)) {
  index_ = index_labels(groups_, "group");
  members_.assign(groups_.size(), {});
  group_of_.reserve(group_of_mode.size());
  for (std::size_t m = 0; m < group_of_mode.size(); ++m) {
    auto it = index_.find(group_of_mode[m]);
    if (it == index_.end()) {
      throw DomainError("mode assigned to undeclared group '" +
                        group_of_mode[m] + "'");
    }
    group_of_.push_back(it->second);
    members_[it->second].push_back(m);
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (members_[g].empty()) {
      throw DomainError("group '" + groups_[g] + "' is empty");
    }
  }
}

Partition Partition::single(std::size_t dim, const std::string& name) {
  return Partition({name}, std::vector<std::string>(dim, name));
}

std::size_t Partition::group_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw DomainError("unknown group '" + name + "'");
  }
  return it->second;
}

CMatrix block(const CMatrix& matrix, const Partition& partition,
              std::size_t gi, std::size_t gj) {
  if (gi >= partition.num_groups() || gj >= partition.num_groups()) {
    throw DomainError("group index out of range");
  }
  if (static_cast<std::size_t>(matrix.rows()) != partition.dim() ||
      static_cast<std::size_t>(matrix.cols()) != partition.dim()) {
    throw DomainError("partition dimension does not match matrix");
  }
  const auto& rows = partition.members(gi);
  const auto& cols = partition.members(gj);
  CMatrix out(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          matrix(static_cast<Eigen::Index>(rows[r]),
                 static_cast<Eigen::Index>(cols[c]));
    }
  }
  return out;
}

CMatrix block(const PairMatrix& matrix, const Partition& partition,
              const std::string& gi, const std::string& gj) {
  return block(matrix.matrix(), partition, partition.group_index(gi),
               partition.group_index(gj));
}

CMatrix block(const UnitaryMatrix& matrix, const Partition& partition,
              const std::string& gi, const std::string& gj) {
  return block(matrix.matrix(), partition, partition.group_index(gi),
               partition.group_index(gj));
}

void set_block(CMatrix& matrix, const Partition& partition, std::size_t gi,
               std::size_t gj, const CMatrix& value) {
  const auto& rows = partition.members(gi);
  const auto& cols = partition.members(gj);
  if (static_cast<std::size_t>(value.rows()) != rows.size() ||
      static_cast<std::size_t>(value.cols()) != cols.size()) {
    throw DomainError("block shape mismatch");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      matrix(static_cast<Eigen::Index>(rows[r]),
             static_cast<Eigen::Index>(cols[c])) =
          value(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
}

// ----------------------------------------------------------------- Encoding

Encoding::Encoding(std::map<std::string, int> qudit_of,
                   std::map<std::string, int> logical_of)
    : qudit_of_(std::move(qudit_of)), logical_of_(std::move(logical_of)) {
  const int n = static_cast<int>(qudit_of_.size());
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto& [label, q] : qudit_of_) {
    if (q < 0 || q >= n || used[static_cast<std::size_t>(q)]) {
      throw DomainError("qudit_of must be a bijection onto [0, n_qudits); "
                        "offending label '" + label + "'");
    }
    used[static_cast<std::size_t>(q)] = true;
  }
  std::set<int> values;
  for (const auto& [label, v] : logical_of_) {
    if (v < 0) {
      throw DomainError("negative logical value for '" + label + "'");
    }
    if (!values.insert(v).second) {
      throw DomainError("logical_of is not injective at '" + label + "'");
    }
    dimension_ = std::max(dimension_, v + 1);
  }
}

Encoding Encoding::identity(const ModeSpace& space) {
  std::map<std::string, int> q;
  std::map<std::string, int> l;
  for (std::size_t i = 0; i < space.num_externals(); ++i) {
    q[space.externals()[i]] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < space.num_internals(); ++i) {
    l[space.internals()[i]] = static_cast<int>(i);
  }
  return Encoding(std::move(q), std::move(l));
}

int Encoding::qudit(const std::string& external) const {
  auto it = qudit_of_.find(external);
  if (it == qudit_of_.end()) {
    throw DomainError("encoding has no qudit for '" + external + "'");
  }
  return it->second;
}

int Encoding::logical(const std::string& internal) const {
  auto it = logical_of_.find(internal);
  if (it == logical_of_.end()) {
    throw DomainError("encoding has no logical value for '" + internal + "'");
  }
  return it->second;
}

void Encoding::check_covers(const ModeSpace& space) const {
  for (const auto& e : space.externals()) qudit(e);
  for (const auto& i : space.internals()) logical(i);
  if (static_cast<std::size_t>(num_qudits()) != space.num_externals()) {
    throw DomainError("encoding maps labels that are not in the mode space");
  }
}

}  // namespace pairsynth
