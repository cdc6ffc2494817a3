#ifndef SPBOUNDS_GENERATORS_HPP
#define SPBOUNDS_GENERATORS_HPP

// Seeded problem generators: the two closed-form examples (the 2x2 toy block
// with a single constraint, the 3x3/2-constraint matrix whose dominant
// eigenvector lies in range(B^T)), and three synthetic families with
// controlled rank structure.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the standard. Gaussians are drawn with Box-Muller on raw 53-bit uniforms
// rather than std::normal_distribution, whose algorithm is unspecified, so a
// seed yields bit-identical matrices on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spbounds/error.hpp"
#include "spbounds/linalg.hpp"
#include "spbounds/problem.hpp"

namespace spbounds {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1).
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    return r * std::cos(t);
  }

  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) g(i, j) = gaussian();
    }
    return g;
  }

  /// Haar-distributed orthogonal matrix: Q of a Gaussian QR with diag(R) > 0.
  Matrix orthogonal(Index n) {
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
  }

  /// k distinct indices from [0, n), in increasing order.
  std::vector<Index> subset(Index n, Index k) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < k; ++i) {
      const auto span = static_cast<std::uint64_t>(n - i);
      const Index j = i + static_cast<Index>(engine_() % span);
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Family parameters.

struct ToyParams {
  double b1 = 0.6;
  double b2 = 0.8;
  bool testMode = false;  // admits the boundary values b1, b2 in {0, 1}
};

struct RemarkParams {
  double alpha = 0.5;
};

struct AnglesParams {
  Index n = 6;
  Index m = 2;
  std::vector<double> aEigs;      // n - m positives
  std::vector<double> bSingVals;  // m positives
  std::vector<double> thetas;     // m angles in (0, pi/2], ascending
};

struct IpmParams {
  Index n = 12;
  Index m = 4;
  double delta = 0.0;
};

struct RandomParams {
  Index n = 8;
  Index m = 3;
};

using FamilyParams = std::variant<ToyParams, RemarkParams, AnglesParams, IpmParams, RandomParams>;

struct GeneratorSpec {
  FamilyParams params;
  std::uint64_t seed = 0;
};

inline std::string_view family_name(const FamilyParams& p) {
  struct Visitor {
    std::string_view operator()(const ToyParams&) const { return "toy"; }
    std::string_view operator()(const RemarkParams&) const { return "remark"; }
    std::string_view operator()(const AnglesParams&) const { return "angles"; }
    std::string_view operator()(const IpmParams&) const { return "ipm"; }
    std::string_view operator()(const RandomParams&) const { return "random"; }
  };
  return std::visit(Visitor{}, p);
}

// ---------------------------------------------------------------------------

/// A = diag(1, 0), B = [b1 b2] with b1^2 + b2^2 = 1. The characteristic
/// polynomial of K is lambda^3 - lambda^2 - lambda + b2^2.
inline SaddleProblem gen_toy(const ToyParams& tp, Tolerances tol = {}) {
  const double b1 = tp.b1;
  const double b2 = tp.b2;
  if (b2 == 0.0) throw Error(ErrorCode::SingularK, "b2 = 0 makes ker(A) and ker(B) overlap");
  if (std::abs(b1 * b1 + b2 * b2 - 1.0) > 1e-12) {
    throw Error(ErrorCode::ParameterOutOfRange, "toy family needs b1^2 + b2^2 = 1");
  }
  const bool interior = b1 > 0.0 && b2 > 0.0;
  const bool boundary = tp.testMode && b1 >= 0.0 && b2 > 0.0;
  if (!interior && !boundary) {
    throw Error(ErrorCode::ParameterOutOfRange, "toy family needs b1, b2 > 0");
  }
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  Matrix b(1, 2);
  b << b1, b2;
  return SaddleProblem::create(SymmetricMatrix(a), RectMatrix(b), tol);
}

/// A = diag(1, alpha, 0), B = [e3^T; e1^T]. Positive eigenvalues of K are
/// alpha, 1 and (1 + sqrt 5) / 2, but the dominant eigenvector of A lies in
/// range(B^T).
inline SaddleProblem gen_remark(const RemarkParams& rp, Tolerances tol = {}) {
  const double alpha = rp.alpha;
  if (!(alpha > 0.0) || alpha > 1.0 - 1e-12) {
    throw Error(ErrorCode::ParameterOutOfRange, "remark family needs 0 < alpha < 1");
  }
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = alpha;
  Matrix b = Matrix::Zero(2, 3);
  b(0, 2) = 1.0;
  b(1, 0) = 1.0;
  return SaddleProblem::create(SymmetricMatrix(a), RectMatrix(b), tol);
}

/// Problem whose range(A) and range(B^T) meet at the requested principal
/// angles. With orthonormal frames E, F (n x m) and G (n x (n - 2m)),
/// V = E and U = [E cos(theta) + F sin(theta) | G]; then A = U diag(aEigs) U^T
/// and B = R diag(bSingVals) V^T for a seeded m x m rotation R.
inline SaddleProblem gen_prescribed_angles(const AnglesParams& ap, std::uint64_t seed, Tolerances tol = {}) {
  const Index n = ap.n;
  const Index m = ap.m;
  if (m < 1 || n <= m) throw Error(ErrorCode::DimensionMismatch, "need 1 <= m < n");
  if (n < 2 * m) {
    throw Error(ErrorCode::InfeasibleDimensions, "prescribed angles need n >= 2m, got n=" +
                                                     std::to_string(n) + " m=" + std::to_string(m));
  }
  if (static_cast<Index>(ap.aEigs.size()) != n - m || static_cast<Index>(ap.bSingVals.size()) != m ||
      static_cast<Index>(ap.thetas.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "angles family needs n-m aEigs, m bSingVals, m thetas");
  }
  for (double v : ap.aEigs) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ParameterOutOfRange, "aEigs must be positive");
  }
  for (double v : ap.bSingVals) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::ParameterOutOfRange, "bSingVals must be positive");
    }
  }
  for (std::size_t i = 0; i < ap.thetas.size(); ++i) {
    const double t = ap.thetas[i];
    if (!(t > 0.0) || t > std::numbers::pi / 2 + 1e-15) {
      throw Error(ErrorCode::ParameterOutOfRange, "thetas must lie in (0, pi/2]");
    }
    if (i > 0 && t < ap.thetas[i - 1]) throw Error(ErrorCode::ParameterOutOfRange, "thetas must ascend");
  }

  SeededRng rng(seed);
  const Matrix q = rng.orthogonal(n);
  const auto e = q.leftCols(m);
  const auto f = q.middleCols(m, m);
  const auto g = q.rightCols(n - 2 * m);

  Vector c(m), s(m);
  for (Index i = 0; i < m; ++i) {
    c(i) = std::cos(ap.thetas[static_cast<std::size_t>(i)]);
    s(i) = std::sin(ap.thetas[static_cast<std::size_t>(i)]);
  }
  Matrix u(n, n - m);
  u.leftCols(m) = e * c.asDiagonal() + f * s.asDiagonal();
  u.rightCols(n - 2 * m) = g;

  const Vector lambda = Eigen::Map<const Vector>(ap.aEigs.data(), n - m);
  const Vector sv = Eigen::Map<const Vector>(ap.bSingVals.data(), m);
  const Matrix a = u * lambda.asDiagonal() * u.transpose();
  const Matrix r = rng.orthogonal(m);
  const Matrix b = r * sv.asDiagonal() * e.transpose();
  return SaddleProblem::create(SymmetricMatrix(a), RectMatrix(b), tol);
}

/// Interior-point style block A = H + D: H random PSD of rank n - m, D
/// diagonal carrying `delta` on a seeded subset of ceil(m/2) positions
/// (the complementarity terms that decay as the iterates converge). The
/// Jacobian B is built like the one in gen_random_lowest_rank.
inline SaddleProblem gen_ipm_like(const IpmParams& ip, std::uint64_t seed, Tolerances tol = {}) {
  const Index n = ip.n;
  const Index m = ip.m;
  if (m < 1 || n <= m) throw Error(ErrorCode::DimensionMismatch, "need 1 <= m < n");
  if (!(ip.delta >= 0.0) || !std::isfinite(ip.delta)) {
    throw Error(ErrorCode::ParameterOutOfRange, "delta must be finite and >= 0");
  }
  SeededRng rng(seed);
  const Matrix q = rng.orthogonal(n);
  Vector h(n - m);
  for (Index i = 0; i < n - m; ++i) h(i) = rng.uniform(0.5, 2.0);
  Matrix a = q.leftCols(n - m) * h.asDiagonal() * q.leftCols(n - m).transpose();
  if (ip.delta > 0.0) {
    for (Index i : rng.subset(n, (m + 1) / 2)) a(i, i) += ip.delta;
  } else {
    (void)rng.subset(n, (m + 1) / 2);
  }
  const Matrix b = rng.orthogonal(m) * q.rightCols(m).transpose() +
                   rng.gaussian_matrix(m, n) / std::sqrt(static_cast<double>(n));
  return SaddleProblem::create(SymmetricMatrix(a), RectMatrix(b), tol);
}

/// Lowest-rank A (rank n - m exactly, eigenvalues in [0.5, 2]). B is a
/// rotated frame of ker(A) plus Gaussian noise of comparable size, so its
/// rows see the null space of A the way a discrete divergence sees the
/// gradient null space of a curl-curl operator. A draw whose K is singular is redrawn with seed + 1, up to
/// 16 attempts.
inline SaddleProblem gen_random_lowest_rank(const RandomParams& rp, std::uint64_t seed, Tolerances tol = {}) {
  const Index n = rp.n;
  const Index m = rp.m;
  if (m < 1 || n <= m) throw Error(ErrorCode::DimensionMismatch, "need n > m >= 1");
  constexpr int kAttempts = 16;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    SeededRng rng(seed + static_cast<std::uint64_t>(attempt));
    const Matrix q = rng.orthogonal(n);
    Vector lambda(n - m);
    for (Index i = 0; i < n - m; ++i) lambda(i) = rng.uniform(0.5, 2.0);
    const Matrix a = q.leftCols(n - m) * lambda.asDiagonal() * q.leftCols(n - m).transpose();
    const Matrix b = rng.orthogonal(m) * q.rightCols(m).transpose() +
                     rng.gaussian_matrix(m, n) / std::sqrt(static_cast<double>(n));
    try {
      SaddleProblem p = SaddleProblem::create(SymmetricMatrix(a), RectMatrix(b), tol);
      if (p.lowestRank()) return p;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularK && e.code() != ErrorCode::RankDeficientConstraint) throw;
    }
  }
  throw Error(ErrorCode::GenerationFailed, "no nonsingular lowest-rank draw in 16 attempts");
}

inline SaddleProblem generate(const GeneratorSpec& spec, Tolerances tol = {}) {
  struct Visitor {
    std::uint64_t seed;
    Tolerances tol;
    SaddleProblem operator()(const ToyParams& p) const { return gen_toy(p, tol); }
    SaddleProblem operator()(const RemarkParams& p) const { return gen_remark(p, tol); }
    SaddleProblem operator()(const AnglesParams& p) const { return gen_prescribed_angles(p, seed, tol); }
    SaddleProblem operator()(const IpmParams& p) const { return gen_ipm_like(p, seed, tol); }
    SaddleProblem operator()(const RandomParams& p) const { return gen_random_lowest_rank(p, seed, tol); }
  };
  return std::visit(Visitor{spec.seed, tol}, spec.params);
}

}  // namespace spbounds

#endif  // SPBOUNDS_GENERATORS_HPP
