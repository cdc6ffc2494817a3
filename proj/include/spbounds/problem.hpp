#ifndef SPBOUNDS_PROBLEM_HPP
#define SPBOUNDS_PROBLEM_HPP

#include <memory>
#include <string>

#include "spbounds/error.hpp"
#include "spbounds/linalg.hpp"

namespace spbounds {

struct Tolerances {
  double relTol = 0.0;     // rank tolerance; <= 0 selects default_rel_tol(n + m)
  double angleTol = 1e-10;  // angles at or below this are treated as exactly zero
  bool strictPsd = false;   // reject, rather than clamp, slightly negative eigenvalues of A
};

/// Assembles K = [[A, B^T], [B, 0]].
inline SymmetricMatrix assemble_saddle(const Matrix& a, const Matrix& b) {
  const Index n = a.rows();
  const Index m = b.rows();
  Matrix k = Matrix::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = a;
  k.topRightCorner(n, m) = b.transpose();
  k.bottomLeftCorner(m, n) = b;
  return SymmetricMatrix(k);
}

/// The pair (A, B) of a saddle-point matrix K = [[A, B^T], [B, 0]].
///
/// Construction validates every structural assumption the bounds rely on:
/// m < n, A positive semidefinite, B of full row rank, and K nonsingular.
/// The eigendecomposition of A and the SVD of B are computed once here and
/// shared by every bound.
class SaddleProblem {
 public:
  static SaddleProblem create(SymmetricMatrix a, RectMatrix b, Tolerances tol = {}) {
    const Index n = a.order();
    const Index m = b.rows();
    if (b.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "B has " + std::to_string(b.cols()) +
                                                    " columns but A has order " + std::to_string(n));
    }
    if (m < 1 || m >= n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "need 1 <= m < n, got n=" + std::to_string(n) + " m=" + std::to_string(m));
    }
    if (tol.relTol <= 0.0) tol.relTol = default_rel_tol(n + m);
    if (!(tol.angleTol > 0.0)) throw Error(ErrorCode::InvalidConfig, "angleTol must be positive");

    auto state = std::make_shared<State>();
    state->a = std::move(a);
    state->b = std::move(b);
    state->tol = tol;
    state->eigA = sym_eig(state->a);
    state->svdB = svd(state->b);

    const Vector& mu = state->eigA.values;
    const double muScale = mu.cwiseAbs().maxCoeff();
    const double muLowest = mu(n - 1);
    if (muLowest < 0.0) {
      if (tol.strictPsd || muLowest < -tol.relTol * muScale) {
        throw Error(ErrorCode::NotPsd, "A has eigenvalue " + std::to_string(muLowest));
      }
      state->psdClamped = true;
    }
    state->rankA = numerical_rank(mu, tol.relTol);

    const Vector& sigma = state->svdB.singularValues;
    if (!(sigma(m - 1) > tol.relTol * sigma(0))) {
      throw Error(ErrorCode::RankDeficientConstraint,
                  "B is not of full row rank (sigma_min=" + std::to_string(sigma(m - 1)) + ")");
    }

    const Vector kEigs = sym_eigenvalues(assemble_saddle(state->a.matrix(), state->b.matrix()));
    const double kScale = kEigs.cwiseAbs().maxCoeff();
    const double kSmallest = kEigs.cwiseAbs().minCoeff();
    if (!(kSmallest > tol.relTol * kScale)) {
      throw Error(ErrorCode::SingularK,
                  "K has an eigenvalue of magnitude " + std::to_string(kSmallest));
    }
    return SaddleProblem(std::move(state));
  }

  Index n() const { return state_->a.order(); }
  Index m() const { return state_->b.rows(); }
  const SymmetricMatrix& A() const { return state_->a; }
  const RectMatrix& B() const { return state_->b; }
  const Tolerances& tolerances() const { return state_->tol; }
  double relTol() const { return state_->tol.relTol; }
  double angleTol() const { return state_->tol.angleTol; }
  const EigDecomposition& eigA() const { return state_->eigA; }
  const SvdDecomposition& svdB() const { return state_->svdB; }
  Index rankA() const { return state_->rankA; }
  bool psdClamped() const { return state_->psdClamped; }
  bool lowestRank() const { return rankA() == n() - m(); }

  SymmetricMatrix K() const { return assemble_saddle(A().matrix(), B().matrix()); }

 private:
  struct State {
    SymmetricMatrix a;
    RectMatrix b;
    Tolerances tol;
    EigDecomposition eigA;
    SvdDecomposition svdB;
    Index rankA = 0;
    bool psdClamped = false;
  };

  explicit SaddleProblem(std::shared_ptr<const State> s) : state_(std::move(s)) {}

  std::shared_ptr<const State> state_;
};

}  // namespace spbounds

#endif  // SPBOUNDS_PROBLEM_HPP
