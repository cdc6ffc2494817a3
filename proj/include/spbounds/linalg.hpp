#ifndef SPBOUNDS_LINALG_HPP
#define SPBOUNDS_LINALG_HPP

// Dense symmetric eigendecomposition, SVD, numerical rank, orthonormal
// subspace bases and principal angles. Everything downstream is phrased in
// terms of these few primitives, so ordering and sign conventions are fixed
// here once: values descend, ties keep the solver's index order, and each
// eigenvector is signed so that its largest-magnitude entry is positive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "spbounds/error.hpp"

namespace spbounds {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative rank tolerance for an n-dimensional problem.
///
/// n machine epsilons, floored at 64 epsilons so that tiny problems do not
/// classify roundoff-level eigenvalues (a few ulps of the norm) as nonzero.
inline double default_rel_tol(Index n) {
  return static_cast<double>(std::max<Index>(n, 64)) * std::numeric_limits<double>::epsilon();
}

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  /// Stores (M + M^T) / 2 after checking |M_ij - M_ji| <= symTol * max|M|.
  explicit SymmetricMatrix(const Matrix& m, double symTol = 1e-12) {
    if (m.rows() != m.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "symmetric matrix must be square, got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
    }
    if (m.size() > 0) {
      const double scale = m.cwiseAbs().maxCoeff();
      const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
      if (asym > symTol * scale) {
        throw Error(ErrorCode::NotSymmetric, "asymmetry " + std::to_string(asym) +
                                                 " exceeds tolerance relative to max entry " +
                                                 std::to_string(scale));
      }
    }
    entries_ = (m + m.transpose()) / 2.0;
  }

  static SymmetricMatrix identity(Index n) { return SymmetricMatrix(Matrix::Identity(n, n)); }
  static SymmetricMatrix zero(Index n) { return SymmetricMatrix(Matrix::Zero(n, n)); }

  Index order() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

class RectMatrix {
 public:
  RectMatrix() = default;
  explicit RectMatrix(Matrix m) : entries_(std::move(m)) {}

  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// values[i] pairs with vectors.col(i); values descend.
struct EigDecomposition {
  Vector values;
  Matrix vectors;
};

/// N = leftVectors * diag(singularValues) * rightVectors^T restricted to the
/// first k = min(m, n) columns of each factor. Both factors are stored full
/// (m x m and n x n) so null-space bases can be read off the trailing columns.
struct SvdDecomposition {
  Vector singularValues;
  Matrix leftVectors;
  Matrix rightVectors;
};

enum class SubspaceKind { Range, Kernel };

struct SubspaceBasis {
  Index ambientDim = 0;
  Matrix columns;  // ambientDim x dim, orthonormal
  SubspaceKind kind = SubspaceKind::Range;
  double rankTol = 0.0;

  Index dim() const { return columns.cols(); }
};

struct PrincipalAngles {
  Vector cosines;  // descending, clamped into [0, 1]
  Vector angles;   // ascending, radians
};

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
}

// Flip each column so its largest-magnitude entry (first on ties) is positive.
inline void fix_column_signs(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > best) {
        best = std::abs(v(i, j));
        arg = i;
      }
    }
    if (v.rows() > 0 && v(arg, j) < 0.0) v.col(j) *= -1.0;
  }
}

}  // namespace detail

inline EigDecomposition sym_eig(const SymmetricMatrix& m) {
  const Matrix& a = m.matrix();
  detail::require_finite(a, "matrix");
  const Index n = a.rows();
  EigDecomposition out;
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& ascending = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index l, Index r) { return ascending(l) > ascending(r); });

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = ascending(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  detail::fix_column_signs(out.vectors);
  return out;
}

inline Vector sym_eigenvalues(const SymmetricMatrix& m) {
  detail::require_finite(m.matrix(), "matrix");
  if (m.order() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

inline SvdDecomposition svd(const RectMatrix& n) {
  const Matrix& a = n.matrix();
  detail::require_finite(a, "matrix");
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "SVD did not converge");
  }
  SvdDecomposition out{solver.singularValues(), solver.matrixU(), solver.matrixV()};
  return out;
}

/// Count of values strictly above relTol * values[0]; 0 when values[0] <= 0.
inline Index numerical_rank(const Vector& values, double relTol) {
  if (values.size() == 0 || !(values(0) > 0.0)) return 0;
  const double threshold = relTol * values(0);
  Index rank = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (values(i) > threshold) ++rank;
  }
  return rank;
}

namespace detail {

// Indices of eigenvalues whose magnitude exceeds relTol * max|value|.
inline std::vector<bool> significant(const Vector& values, double relTol) {
  std::vector<bool> keep(static_cast<std::size_t>(values.size()), false);
  if (values.size() == 0) return keep;
  const double scale = values.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return keep;
  for (Index i = 0; i < values.size(); ++i) {
    keep[static_cast<std::size_t>(i)] = std::abs(values(i)) > relTol * scale;
  }
  return keep;
}

inline SubspaceBasis select_columns(const Matrix& vectors, const std::vector<bool>& mask, bool want,
                                    SubspaceKind kind, double relTol) {
  std::vector<Index> cols;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == want) cols.push_back(static_cast<Index>(i));
  }
  SubspaceBasis out;
  out.ambientDim = vectors.rows();
  out.kind = kind;
  out.rankTol = relTol;
  out.columns.resize(vectors.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.columns.col(static_cast<Index>(k)) = vectors.col(cols[k]);
  return out;
}

}  // namespace detail

// For a symmetric matrix the range is spanned by the eigenvectors whose
// eigenvalue magnitude clears the tolerance; the kernel by the rest.
inline SubspaceBasis range_basis(const SymmetricMatrix& m, double relTol) {
  const EigDecomposition eig = sym_eig(m);
  return detail::select_columns(eig.vectors, detail::significant(eig.values, relTol), true,
                                SubspaceKind::Range, relTol);
}

inline SubspaceBasis kernel_basis(const SymmetricMatrix& m, double relTol) {
  const EigDecomposition eig = sym_eig(m);
  return detail::select_columns(eig.vectors, detail::significant(eig.values, relTol), false,
                                SubspaceKind::Kernel, relTol);
}

/// Null space of N (dimension cols - rank).
inline SubspaceBasis kernel_basis_rect(const RectMatrix& n, double relTol) {
  const SvdDecomposition s = svd(n);
  const Index rank = numerical_rank(s.singularValues, relTol);
  SubspaceBasis out;
  out.ambientDim = n.cols();
  out.kind = SubspaceKind::Kernel;
  out.rankTol = relTol;
  out.columns = s.rightVectors.rightCols(n.cols() - rank);
  return out;
}

/// Row space of N, i.e. range(N^T).
inline SubspaceBasis row_space_basis(const RectMatrix& n, double relTol) {
  const SvdDecomposition s = svd(n);
  const Index rank = numerical_rank(s.singularValues, relTol);
  SubspaceBasis out;
  out.ambientDim = n.cols();
  out.kind = SubspaceKind::Range;
  out.rankTol = relTol;
  out.columns = s.rightVectors.leftCols(rank);
  return out;
}

/// Principal angles between span(X) and span(Y).
///
/// Cosines are the singular values of X^T Y, clamped into [0, 1]. Angles are
/// taken from the sines (singular values of the component of the smaller
/// basis orthogonal to the larger one) when cos^2 >= 1/2, and from the
/// cosines otherwise, so small angles keep full relative accuracy.
inline PrincipalAngles principal_angles(const SubspaceBasis& x, const SubspaceBasis& y) {
  if (x.ambientDim != y.ambientDim) {
    throw Error(ErrorCode::DimensionMismatch,
                "subspaces live in R^" + std::to_string(x.ambientDim) + " and R^" +
                    std::to_string(y.ambientDim));
  }
  if (x.dim() == 0 || y.dim() == 0) {
    throw Error(ErrorCode::EmptySubspace, "principal angles need two nonempty subspaces");
  }
  const Matrix& big = x.dim() >= y.dim() ? x.columns : y.columns;
  const Matrix& small = x.dim() >= y.dim() ? y.columns : x.columns;
  const Index k = small.cols();

  const Matrix cross = big.transpose() * small;
  Eigen::JacobiSVD<Matrix> cosSvd(cross);
  Vector cosines = cosSvd.singularValues().head(k).cwiseMax(0.0).cwiseMin(1.0);

  const Matrix residual = small - big * cross;
  Eigen::JacobiSVD<Matrix> sinSvd(residual);
  Vector sines = sinSvd.singularValues().head(k).reverse().cwiseMax(0.0).cwiseMin(1.0);

  PrincipalAngles out;
  out.cosines = cosines;
  out.angles.resize(k);
  for (Index i = 0; i < k; ++i) {
    out.angles(i) = cosines(i) * cosines(i) >= 0.5 ? std::asin(sines(i)) : std::acos(cosines(i));
  }
  // Mixed branches can break monotonicity by an ulp; restore ascending order.
  std::sort(out.angles.data(), out.angles.data() + k);
  return out;
}

inline double frobenius(const Matrix& m) { return m.norm(); }

}  // namespace spbounds

#endif  // SPBOUNDS_LINALG_HPP
