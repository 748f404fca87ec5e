#include "pairsynth/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace pairsynth {

namespace {

void require_finite(const CMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

// Unitary whose first r columns match `cols` (n x r, orthonormal up to
// rounding) column by column, phases included.
CMatrix complete_unitary(const CMatrix& cols, std::size_t n) {
  const auto r = cols.cols();
  CMatrix aug(static_cast<Eigen::Index>(n), r + static_cast<Eigen::Index>(n));
  aug << cols, CMatrix::Identity(static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(n));
  Eigen::HouseholderQR<CMatrix> qr(aug);
  CMatrix q = qr.householderQ();
  const CMatrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < r; ++j) {
    const Complex d = packed(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

// Z unitary (x.cols() square) with x * Z as close to positive as the shape
// allows: Hermitian PSD when square, [P | 0] when wide, P on top when tall.
CMatrix positive_gauge(const CMatrix& x) {
  const auto rows = x.rows();
  const auto cols = x.cols();
  if (rows > cols) {
    return polar(x.topRows(cols), PolarSide::Left).unitary.adjoint();
  }
  const SvdResult s = svd(x);
  CMatrix left = CMatrix::Identity(cols, cols);
  left.topLeftCorner(rows, rows) = s.u.adjoint();
  return s.v * left;
}

// Project onto the (rectangular) diagonal.
CMatrix diagonal_part(const CMatrix& a) {
  CMatrix d = CMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index k = 0; k < std::min(a.rows(), a.cols()); ++k) d(k, k) = a(k, k);
  return d;
}

// Greedy row choice for the columns `cols` of `u`, skipping rows in `taken`:
// repeatedly picks the largest |u(r, c)| among free rows and columns.
std::vector<Eigen::Index> pick_rows(const CMatrix& u,
                                    const std::vector<Eigen::Index>& cols,
                                    std::vector<bool>& taken) {
  std::vector<Eigen::Index> rows;
  std::vector<bool> col_done(cols.size(), false);
  for (std::size_t step = 0; step < cols.size(); ++step) {
    double best = -1.0;
    Eigen::Index best_r = -1;
    std::size_t best_c = 0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      if (taken[static_cast<std::size_t>(r)]) continue;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (col_done[c]) continue;
        const double mag = std::abs(u(r, cols[c]));
        if (mag > best) {
          best = mag;
          best_r = r;
          best_c = c;
        }
      }
    }
    taken[static_cast<std::size_t>(best_r)] = true;
    col_done[best_c] = true;
    rows.push_back(best_r);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

// Unitary Q with u[rows, cols] * Q Hermitian PSD.
CMatrix align_rotation(const CMatrix& u, const std::vector<Eigen::Index>& rows,
                       const std::vector<Eigen::Index>& cols) {
  const auto k = static_cast<Eigen::Index>(cols.size());
  CMatrix sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      sub(a, b) = u(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
    }
  }
  return polar(sub, PolarSide::Right).unitary.adjoint();
}

void rotate_columns(CMatrix& u, const std::vector<Eigen::Index>& cols,
                    const CMatrix& q) {
  CMatrix sub(u.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    sub.col(static_cast<Eigen::Index>(c)) = u.col(cols[c]);
  }
  sub = sub * q;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    u.col(cols[c]) = sub.col(static_cast<Eigen::Index>(c));
  }
}

// SVD of a square block with the gauge fixed towards U = V = 1: columns of
// equal singular value are rotated together (U and V alike) so the chosen
// rows form a PSD submatrix, null columns of U and V are aligned separately,
// and columns are then moved to the rows they were matched with. The
// singular values follow the permutation, so s is no longer sorted.
SvdResult aligned_svd(const CMatrix& b) {
  SvdResult s = svd(b);
  const Eigen::Index n = b.rows();
  const double smax = n > 0 ? s.singulars(0) : 0.0;
  const double zero_cut = kSingularThreshold * smax;
  const double cluster_tol = 1e-10 * std::max(smax, 1.0);

  std::vector<bool> taken_u(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> position(static_cast<std::size_t>(n), -1);
  Eigen::Index start = 0;
  while (start < n && s.singulars(start) > zero_cut) {
    Eigen::Index end = start + 1;
    while (end < n && s.singulars(end) > zero_cut &&
           s.singulars(start) - s.singulars(end) <= cluster_tol) {
      ++end;
    }
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(end - start));
    std::iota(cols.begin(), cols.end(), start);
    const auto rows = pick_rows(s.u, cols, taken_u);
    const CMatrix q = align_rotation(s.u, rows, cols);
    rotate_columns(s.u, cols, q);
    rotate_columns(s.v, cols, q);
    for (std::size_t t = 0; t < cols.size(); ++t) position[static_cast<std::size_t>(cols[t])] = rows[t];
    start = end;
  }
  if (start < n) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(n - start));
    std::iota(cols.begin(), cols.end(), start);
    // Both row sets are the complement of the positions already used, so
    // the null columns of U and V land on the same positions.
    std::vector<bool> taken_v = taken_u;
    const auto rows_u = pick_rows(s.u, cols, taken_u);
    const auto rows_v = pick_rows(s.v, cols, taken_v);
    rotate_columns(s.u, cols, align_rotation(s.u, rows_u, cols));
    rotate_columns(s.v, cols, align_rotation(s.v, rows_v, cols));
    for (std::size_t t = 0; t < cols.size(); ++t) {
      position[static_cast<std::size_t>(cols[t])] = rows_u[t];
    }
  }

  SvdResult out{CMatrix(n, n), RVector(n), CMatrix(n, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index p = position[static_cast<std::size_t>(c)];
    out.u.col(p) = s.u.col(c);
    out.v.col(p) = s.v.col(c);
    out.singulars(p) = s.singulars(c);
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------- factorizations

TakagiResult takagi(const PairMatrix& a) {
  const CMatrix& m = a.matrix();
  require_finite(m, "takagi");
  const auto n = m.rows();
  if (n == 0) return {UnitaryMatrix(CMatrix(0, 0)), RVector(0)};

  Eigen::MatrixXd h(2 * n, 2 * n);
  h << m.real(), m.imag(), m.imag(), -m.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  if (eig.info() != Eigen::Success) {
    throw DomainError("takagi: eigensolver did not converge");
  }
  // Eigenvalues come in +-s pairs, ascending; the top n are the singulars.
  const RVector& ev = eig.eigenvalues();
  const double smax = std::max(ev(2 * n - 1), 0.0);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 2 * n - 1; k >= n; --k) {
    if (ev(k) > kSingularThreshold * smax && ev(k) > 0.0) kept.push_back(k);
  }
  CMatrix cols(n, static_cast<Eigen::Index>(kept.size()));
  RVector s = RVector::Zero(n);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const auto col = eig.eigenvectors().col(kept[c]);
    for (Eigen::Index r = 0; r < n; ++r) {
      cols(r, static_cast<Eigen::Index>(c)) = Complex(col(r), col(n + r));
    }
    s(static_cast<Eigen::Index>(c)) = ev(kept[c]);
  }
  return {UnitaryMatrix(complete_unitary(cols, static_cast<std::size_t>(n)), 1e-10), s};
}

SvdResult svd(const CMatrix& a) {
  require_finite(a, "svd");
  Eigen::JacobiSVD<CMatrix> j(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {j.matrixU(), j.singularValues(), j.matrixV()};
}

PolarResult polar(const CMatrix& a, PolarSide side) {
  if (a.rows() != a.cols()) {
    throw DomainError("polar: matrix must be square");
  }
  const SvdResult s = svd(a);
  const CMatrix w = s.u * s.v.adjoint();
  const CMatrix& basis = side == PolarSide::Right ? s.v : s.u;
  CMatrix p = basis * s.singulars.cast<Complex>().asDiagonal() * basis.adjoint();
  p = (0.5 * (p + p.adjoint())).eval();
  return {w, p};
}

// -------------------------------------------------------------------- tags

std::string to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::Zero: return "zero";
    case CaseTag::DiagTakagi: return "diag-takagi";
    case CaseTag::OffdiagMult: return "offdiag-mult";
    case CaseTag::OffdiagPolar: return "offdiag-polar";
    case CaseTag::OffdiagSvd: return "offdiag-svd";
    case CaseTag::FreeIdentity: return "free-identity";
  }
  throw DomainError("unknown case tag");
}

CaseTag case_tag_from_string(const std::string& s) {
  for (CaseTag t : {CaseTag::Zero, CaseTag::DiagTakagi, CaseTag::OffdiagMult,
                    CaseTag::OffdiagPolar, CaseTag::OffdiagSvd,
                    CaseTag::FreeIdentity}) {
    if (to_string(t) == s) return t;
  }
  throw DomainError("unknown case tag '" + s + "'");
}

// ---------------------------------------------------------------- solutions

CMatrix BlockSolution::assembled_unitary() const {
  const auto m = static_cast<Eigen::Index>(partition.dim());
  CMatrix u = CMatrix::Zero(m, m);
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    set_block(u, partition, g, g, block_unitaries.at(g));
  }
  return u;
}

std::string OverConstraintReport::message() const {
  std::ostringstream os;
  os << "block constraints cannot be met: residual " << residual
     << " exceeds tolerance " << tolerance;
  if (!inconsistent.empty()) {
    os << "; inconsistent blocks:";
    for (const auto& b : inconsistent) {
      os << " (" << b.group_i << ", " << b.group_j << ") " << b.residual;
    }
  }
  return os.str();
}

double relative_residual(const CMatrix& a, const CMatrix& b) {
  const double diff = (a - b).norm();
  const double scale = a.norm();
  return scale > 0.0 ? diff / scale : diff;
}

PairMatrix reconstruct(const BlockSolution& sol) {
  const CMatrix u = sol.assembled_unitary();
  return PairMatrix::from_full(u * sol.beta_bar.matrix() * u.transpose());
}

BlockSolution solve_global(const PairMatrix& beta) {
  const TakagiResult t = takagi(beta);
  BlockSolution sol;
  sol.partition = Partition::single(beta.dim());
  sol.beta_bar = PairMatrix::from_full(t.singulars.cast<Complex>().asDiagonal());
  sol.block_unitaries = {t.unitary.matrix()};
  sol.resolution_log = {{"all", "all", CaseTag::DiagTakagi}};
  sol.residual = relative_residual(beta.matrix(), reconstruct(sol).matrix());
  return sol;
}

SolveResult solve_block_constrained(const PairMatrix& beta,
                                    const Partition& partition,
                                    const ConstrainedOptions& options) {
  if (beta.dim() != partition.dim()) {
    throw DomainError("partition dimension does not match pair matrix");
  }
  require_finite(beta.matrix(), "solve_block_constrained");
  const std::size_t ng = partition.num_groups();
  const CMatrix& b = beta.matrix();
  const double zero_cut = kSingularThreshold * b.norm();

  std::vector<std::optional<CMatrix>> u(ng);
  CMatrix bar = CMatrix::Zero(b.rows(), b.cols());
  std::vector<ResolutionRecord> log;
  std::vector<std::pair<std::size_t, std::size_t>> pending;

  auto set_bar = [&](std::size_t i, std::size_t j, const CMatrix& v) {
    const CMatrix val = options.diagonal_sources ? diagonal_part(v) : v;
    set_block(bar, partition, i, j, val);
    if (i != j) set_block(bar, partition, j, i, val.transpose());
  };

  // Pass 1: zero blocks.
  for (std::size_t i = 0; i < ng; ++i) {
    for (std::size_t j = i; j < ng; ++j) {
      if (block(b, partition, i, j).norm() <= zero_cut) {
        log.push_back({partition.name(i), partition.name(j), CaseTag::Zero});
      } else if (i != j) {
        pending.emplace_back(i, j);
      }
    }
  }

  // Pass 2: diagonal blocks.
  for (std::size_t i = 0; i < ng; ++i) {
    const CMatrix bii = block(b, partition, i, i);
    if (bii.norm() <= zero_cut) continue;
    const TakagiResult t = takagi(PairMatrix::from_full(bii));
    u[i] = t.unitary.matrix();
    set_bar(i, i, t.singulars.cast<Complex>().asDiagonal());
    log.push_back({partition.name(i), partition.name(i), CaseTag::DiagTakagi});
  }

  // Pass 3: off-diagonal blocks, most constrained first.
  while (!pending.empty()) {
    auto fixed_count = [&](const std::pair<std::size_t, std::size_t>& p) {
      return int(u[p.first].has_value()) + int(u[p.second].has_value());
    };
    auto it = std::max_element(pending.begin(), pending.end(),
                               [&](const auto& x, const auto& y) {
                                 const int fx = fixed_count(x), fy = fixed_count(y);
                                 return fx != fy ? fx < fy : y < x;
                               });
    const auto [i, j] = *it;
    pending.erase(it);
    const CMatrix bij = block(b, partition, i, j);
    CaseTag tag;
    if (u[i] && u[j]) {
      set_bar(i, j, u[i]->adjoint() * bij * u[j]->conjugate());
      tag = CaseTag::OffdiagMult;
    } else if (u[i]) {
      const CMatrix x = u[i]->adjoint() * bij;
      const CMatrix z = positive_gauge(x);
      u[j] = z.conjugate();
      set_bar(i, j, x * z);
      tag = CaseTag::OffdiagPolar;
    } else if (u[j]) {
      const CMatrix yt = (bij * u[j]->conjugate()).transpose();
      const CMatrix z = positive_gauge(yt);
      u[i] = z.conjugate();
      set_bar(i, j, (yt * z).transpose());
      tag = CaseTag::OffdiagPolar;
    } else {
      SvdResult s = bij.rows() == bij.cols() ? aligned_svd(bij) : svd(bij);
      CMatrix sig = CMatrix::Zero(bij.rows(), bij.cols());
      for (Eigen::Index k = 0; k < s.singulars.size(); ++k) sig(k, k) = s.singulars(k);
      u[i] = s.u;
      u[j] = s.v.conjugate();
      set_bar(i, j, sig);
      tag = CaseTag::OffdiagSvd;
    }
    log.push_back({partition.name(i), partition.name(j), tag});
  }

  // Pass 4: unconstrained groups.
  BlockSolution sol;
  sol.partition = partition;
  for (std::size_t g = 0; g < ng; ++g) {
    if (!u[g]) {
      const auto k = static_cast<Eigen::Index>(partition.members(g).size());
      u[g] = CMatrix::Identity(k, k);
      log.push_back({partition.name(g), partition.name(g), CaseTag::FreeIdentity});
    }
    sol.block_unitaries.push_back(*u[g]);
  }
  sol.beta_bar = PairMatrix::from_full(bar);
  sol.resolution_log = std::move(log);

  const CMatrix uu = sol.assembled_unitary();
  const CMatrix rec = uu * bar * uu.transpose();
  sol.residual = relative_residual(b, rec);
  if (sol.residual <= options.tolerance) return sol;

  OverConstraintReport report;
  report.residual = sol.residual;
  report.tolerance = options.tolerance;
  report.resolution_log = sol.resolution_log;
  const double scale = b.norm() > 0.0 ? b.norm() : 1.0;
  for (std::size_t i = 0; i < ng; ++i) {
    for (std::size_t j = i; j < ng; ++j) {
      const CMatrix bij = block(b, partition, i, j);
      if (bij.norm() <= zero_cut) continue;
      const double r = (bij - block(rec, partition, i, j)).norm() / scale;
      BlockResidual br{partition.name(i), partition.name(j), r};
      report.blocks.push_back(br);
      if (r > options.tolerance) report.inconsistent.push_back(br);
    }
  }
  return report;
}

}  // namespace pairsynth
