#ifndef SPBOUNDS_BOUNDS_HPP
#define SPBOUNDS_BOUNDS_HPP

// Lower bounds on the positive eigenvalues of K = [[A, B^T], [B, 0]] when the
// leading block A is only positive semidefinite.
//
// Every bound here comes from augmenting the leading block, A_W = A + B^T W B,
// and using that the positive eigenvalues of K are at least
// min{mu_min(A_W), 1/mu_max(W)}. With W = gamma*I and rank(A) = n - m,
// mu_min(A_gamma) >= (1 - cos theta_min) * min{mu_min^+(A), gamma*sigma_min^2},
// where theta_min is the smallest principal angle between range(A) and
// range(B^T); balancing 1/gamma against that estimate removes gamma entirely.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spbounds/error.hpp"
#include "spbounds/linalg.hpp"
#include "spbounds/problem.hpp"

namespace spbounds {

struct SpectralSummary {
  double muMax = 0.0;
  double muMin = 0.0;  // clamped to 0 whenever A is numerically singular
  double muMinPlus = 0.0;
  double sigmaMax = 0.0;
  double sigmaMin = 0.0;
  Index rankA = 0;
  Index nullityA = 0;
  double relTol = 0.0;
};

inline SpectralSummary spectral_summary(const SaddleProblem& p) {
  const Vector& mu = p.eigA().values;
  const Vector& sigma = p.svdB().singularValues;
  SpectralSummary s;
  s.relTol = p.relTol();
  s.rankA = p.rankA();
  s.nullityA = p.n() - s.rankA;
  s.muMax = std::max(mu(0), 0.0);
  s.muMin = s.nullityA > 0 ? 0.0 : mu(p.n() - 1);
  s.muMinPlus = s.rankA > 0 ? mu(s.rankA - 1) : 0.0;
  s.sigmaMax = sigma(0);
  s.sigmaMin = sigma(p.m() - 1);
  return s;
}

enum class BoundKind { RustenWinther, WBound, AGamma, LowestRank, KernelAngle, GeneralRank };

inline std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::RustenWinther: return "rusten-winther";
    case BoundKind::WBound: return "wbound";
    case BoundKind::AGamma: return "agamma";
    case BoundKind::LowestRank: return "lowest-rank";
    case BoundKind::KernelAngle: return "kernel-angle";
    case BoundKind::GeneralRank: return "general-rank";
  }
  return "unknown";
}

/// Which argument of the min{...} defining a bound was the smaller one.
enum class ActiveTerm {
  None,
  Eigenvalue,           // mu * (1 - cos theta)
  SingularValue,        // sigma_min * sqrt(1 - cos theta)
  AugmentedEigenvalue,  // mu_min(A_W)
  InverseWeight,        // 1 / mu_max(W)
};

inline std::string_view to_string(ActiveTerm t) {
  switch (t) {
    case ActiveTerm::None: return "none";
    case ActiveTerm::Eigenvalue: return "eigenvalue";
    case ActiveTerm::SingularValue: return "singular-value";
    case ActiveTerm::AugmentedEigenvalue: return "augmented-eigenvalue";
    case ActiveTerm::InverseWeight: return "inverse-weight";
  }
  return "unknown";
}

namespace warning {
inline constexpr std::string_view kZeroAngle = "zero-angle";
inline constexpr std::string_view kVacuousLowerEndpoint = "vacuous-lower-endpoint";
inline constexpr std::string_view kDegenerateSplit = "degenerate-split";
inline constexpr std::string_view kPsdClamped = "psd-clamped";
}  // namespace warning

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double slack) const { return x >= lo - slack && x <= hi + slack; }
};

struct BoundReport {
  BoundKind kind = BoundKind::RustenWinther;
  double value = 0.0;  // lower bound on the positive eigenvalues of K
  std::optional<Interval> negative;
  std::optional<Interval> positive;
  std::optional<double> gamma;
  std::optional<double> rho;
  std::optional<double> thetaMin;
  std::optional<double> muNm;  // (n-m)-th largest eigenvalue of A
  std::optional<double> augmentedBlockBound;  // lower bound on mu_min(A_gamma)
  std::optional<double> muMinAugmented;       // computed mu_min(A_W)
  ActiveTerm active = ActiveTerm::None;
  bool assumptionsMet = true;
  std::vector<std::string> warnings;

  bool has_warning(std::string_view w) const {
    for (const auto& x : warnings) {
      if (x == w) return true;
    }
    return false;
  }
};

// ---------------------------------------------------------------------------
// Rusten-Winther inclusion intervals.

inline BoundReport rusten_winther(const SpectralSummary& s) {
  const double muMin = s.muMin;
  const double muMax = s.muMax;
  BoundReport r;
  r.kind = BoundKind::RustenWinther;
  r.negative = Interval{0.5 * (muMin - std::sqrt(muMin * muMin + 4.0 * s.sigmaMax * s.sigmaMax)),
                        0.5 * (muMax - std::sqrt(muMax * muMax + 4.0 * s.sigmaMin * s.sigmaMin))};
  r.positive = Interval{muMin, 0.5 * (muMax + std::sqrt(muMax * muMax + 4.0 * s.sigmaMax * s.sigmaMax))};
  r.value = muMin;
  if (muMin == 0.0) r.warnings.emplace_back(warning::kVacuousLowerEndpoint);
  return r;
}

// ---------------------------------------------------------------------------
// Augmentation with a weight W (scalar gamma*I or a full PSD matrix).

class WeightMatrix {
 public:
  /// gamma * I. gamma = 0 is accepted and means "no augmentation".
  static WeightMatrix scalar(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::ParameterOutOfRange, "gamma must be finite and >= 0");
    }
    WeightMatrix w;
    w.gamma_ = gamma;
    w.muMax_ = gamma;
    return w;
  }

  static WeightMatrix full(SymmetricMatrix w, double relTol = 0.0) {
    if (relTol <= 0.0) relTol = default_rel_tol(w.order());
    WeightMatrix out;
    if (w.order() > 0) {
      const Vector eigs = sym_eigenvalues(w);
      const double scale = eigs.cwiseAbs().maxCoeff();
      if (eigs(eigs.size() - 1) < -relTol * scale) {
        throw Error(ErrorCode::NotPsd, "weight matrix has eigenvalue " +
                                           std::to_string(eigs(eigs.size() - 1)));
      }
      out.muMax_ = std::max(eigs(0), 0.0);
    }
    out.full_ = std::move(w);
    return out;
  }

  bool is_scalar() const { return !full_.has_value(); }
  double gamma() const { return gamma_; }
  double mu_max() const { return muMax_; }

  Matrix dense(Index m) const {
    if (is_scalar()) return gamma_ * Matrix::Identity(m, m);
    return full_->matrix();
  }

  Index order_or(Index m) const { return is_scalar() ? m : full_->order(); }

 private:
  WeightMatrix() = default;
  double gamma_ = 0.0;
  double muMax_ = 0.0;
  std::optional<SymmetricMatrix> full_;
};

/// A_W = A + B^T W B.
inline SymmetricMatrix assemble_augmented(const SaddleProblem& p, const WeightMatrix& w) {
  if (w.order_or(p.m()) != p.m()) {
    throw Error(ErrorCode::DimensionMismatch, "weight matrix order " +
                                                  std::to_string(w.order_or(p.m())) +
                                                  " does not match m=" + std::to_string(p.m()));
  }
  const Matrix& a = p.A().matrix();
  const Matrix& b = p.B().matrix();
  if (w.is_scalar()) {
    return SymmetricMatrix(a + w.gamma() * (b.transpose() * b));
  }
  return SymmetricMatrix(a + b.transpose() * w.dense(p.m()) * b);
}

/// min{mu_min(A_W), 1/mu_max(W)}; the second term is dropped when W = 0.
inline BoundReport wbound(const SaddleProblem& p, const WeightMatrix& w) {
  const Vector eigs = sym_eigenvalues(assemble_augmented(p, w));
  const double top = eigs(0);
  const double bottom = eigs(eigs.size() - 1);
  if (!(bottom > p.relTol() * top)) {
    throw Error(ErrorCode::AugmentedBlockSingular,
                "mu_min(A_W)=" + std::to_string(bottom) + " is not positive; W does not regularize A");
  }
  BoundReport r;
  r.kind = BoundKind::WBound;
  r.muMinAugmented = bottom;
  if (w.is_scalar()) r.gamma = w.gamma();
  const double inverseWeight =
      w.mu_max() > 0.0 ? 1.0 / w.mu_max() : std::numeric_limits<double>::infinity();
  if (bottom <= inverseWeight) {
    r.value = bottom;
    r.active = ActiveTerm::AugmentedEigenvalue;
  } else {
    r.value = inverseWeight;
    r.active = ActiveTerm::InverseWeight;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Principal-angle bounds.

struct RangeAngles {
  double rho = 0.0;       // 1 - cos(theta_min)
  double thetaMin = 0.0;  // radians; snapped to 0 when <= angleTol
  Vector cosines;
  bool rankAssumptionMet = false;
};

namespace detail {

// 1 - cos(theta) evaluated without cancellation.
inline double one_minus_cos(double theta) {
  const double s = std::sin(0.5 * theta);
  return 2.0 * s * s;
}

inline SubspaceBasis leading_eigvecs(const SaddleProblem& p, Index count, SubspaceKind kind) {
  SubspaceBasis out;
  out.ambientDim = p.n();
  out.kind = kind;
  out.rankTol = p.relTol();
  out.columns = p.eigA().vectors.leftCols(count);
  return out;
}

inline SubspaceBasis trailing_eigvecs(const SaddleProblem& p, Index count) {
  SubspaceBasis out;
  out.ambientDim = p.n();
  out.kind = SubspaceKind::Kernel;
  out.rankTol = p.relTol();
  out.columns = p.eigA().vectors.rightCols(count);
  return out;
}

inline SubspaceBasis constraint_row_space(const SaddleProblem& p) {
  SubspaceBasis out;
  out.ambientDim = p.n();
  out.kind = SubspaceKind::Range;
  out.rankTol = p.relTol();
  out.columns = p.svdB().rightVectors.leftCols(p.m());
  return out;
}

inline SubspaceBasis constraint_kernel(const SaddleProblem& p) {
  SubspaceBasis out;
  out.ambientDim = p.n();
  out.kind = SubspaceKind::Kernel;
  out.rankTol = p.relTol();
  out.columns = p.svdB().rightVectors.rightCols(p.n() - p.m());
  return out;
}

inline RangeAngles angles_between(const SubspaceBasis& x, const SubspaceBasis& y, double angleTol) {
  const PrincipalAngles pa = principal_angles(x, y);
  RangeAngles out;
  out.cosines = pa.cosines;
  out.thetaMin = pa.angles(0) <= angleTol ? 0.0 : pa.angles(0);
  out.rho = one_minus_cos(out.thetaMin);
  return out;
}

// min{mu * rho, sigma * sqrt(rho)}, exactly 0 when the angle collapsed.
inline BoundReport angle_bound(BoundKind kind, double mu, double sigmaMin, const RangeAngles& ang) {
  BoundReport r;
  r.kind = kind;
  r.rho = ang.rho;
  r.thetaMin = ang.thetaMin;
  if (ang.thetaMin == 0.0) {
    r.value = 0.0;
    r.warnings.emplace_back(warning::kZeroAngle);
    return r;
  }
  const double eigTerm = mu * ang.rho;
  const double svTerm = sigmaMin * std::sqrt(ang.rho);
  if (eigTerm <= svTerm) {
    r.value = eigTerm;
    r.active = ActiveTerm::Eigenvalue;
  } else {
    r.value = svTerm;
    r.active = ActiveTerm::SingularValue;
  }
  return r;
}

inline void require_lowest_rank(const SaddleProblem& p, const char* who) {
  if (!p.lowestRank()) {
    throw Error(ErrorCode::RankAssumptionViolated,
                std::string(who) + " requires rank(A) = n - m = " + std::to_string(p.n() - p.m()) +
                    ", got rank " + std::to_string(p.rankA()));
  }
}

}  // namespace detail

/// rho = 1 - cos(theta_min) for the angles between range(A) and range(B^T).
/// When rank(A) != n - m the angles are still computed on the numerical
/// range of A, and rankAssumptionMet is false.
inline RangeAngles rho_from_angles(const SaddleProblem& p) {
  RangeAngles out = detail::angles_between(
      detail::leading_eigvecs(p, p.rankA(), SubspaceKind::Range), detail::constraint_row_space(p),
      p.angleTol());
  out.rankAssumptionMet = p.lowestRank();
  return out;
}

/// rho * min{mu_min^+, gamma * sigma_min^2} <= mu_min(A_gamma).
inline double agamma_lower_bound(const SaddleProblem& p, double gamma) {
  detail::require_lowest_rank(p, "agamma_lower_bound");
  if (!(gamma > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "gamma must be positive");
  const SpectralSummary s = spectral_summary(p);
  const RangeAngles ang = rho_from_angles(p);
  return ang.rho * std::min(s.muMinPlus, gamma * s.sigmaMin * s.sigmaMin);
}

/// K-level bound min{1/gamma, agamma_lower_bound(gamma)}, which needs no
/// eigensolve of A_gamma.
inline BoundReport agamma_report(const SaddleProblem& p, double gamma) {
  const double blockBound = agamma_lower_bound(p, gamma);
  BoundReport r;
  r.kind = BoundKind::AGamma;
  r.gamma = gamma;
  r.augmentedBlockBound = blockBound;
  const RangeAngles ang = rho_from_angles(p);
  r.rho = ang.rho;
  r.thetaMin = ang.thetaMin;
  if (blockBound <= 1.0 / gamma) {
    r.value = blockBound;
    r.active = ActiveTerm::AugmentedEigenvalue;
  } else {
    r.value = 1.0 / gamma;
    r.active = ActiveTerm::InverseWeight;
  }
  return r;
}

/// gamma with 1/gamma = min{mu_min^+ * rho, sigma_min * sqrt(rho)}.
inline double optimal_gamma(const SaddleProblem& p) {
  detail::require_lowest_rank(p, "optimal_gamma");
  const RangeAngles ang = rho_from_angles(p);
  if (ang.thetaMin == 0.0) {
    throw Error(ErrorCode::ZeroAngle, "range(A) and range(B^T) intersect; no finite optimal gamma");
  }
  const SpectralSummary s = spectral_summary(p);
  return 1.0 / std::min(s.muMinPlus * ang.rho, s.sigmaMin * std::sqrt(ang.rho));
}

inline BoundReport lowest_rank_bound(const SaddleProblem& p) {
  detail::require_lowest_rank(p, "lowest_rank_bound");
  const SpectralSummary s = spectral_summary(p);
  return detail::angle_bound(BoundKind::LowestRank, s.muMinPlus, s.sigmaMin, rho_from_angles(p));
}

/// Same bound with the angle measured between ker(A) and ker(B).
inline BoundReport kernel_angle_bound(const SaddleProblem& p) {
  detail::require_lowest_rank(p, "kernel_angle_bound");
  const SpectralSummary s = spectral_summary(p);
  const RangeAngles ang = detail::angles_between(detail::trailing_eigvecs(p, p.n() - p.rankA()),
                                                 detail::constraint_kernel(p), p.angleTol());
  return detail::angle_bound(BoundKind::KernelAngle, s.muMinPlus, s.sigmaMin, ang);
}

// ---------------------------------------------------------------------------
// General rank: keep the n - m dominant eigenpairs of A.

struct SpectralSplit {
  SymmetricMatrix aMax;  // from the n - m largest eigenpairs
  SymmetricMatrix aMin;  // from the m smallest eigenpairs
  Matrix keptVectors;    // n x (n - m)
  double muNm = 0.0;     // (n - m)-th largest eigenvalue
  bool degenerate = false;
};

namespace detail {

inline SpectralSplit split_from(const EigDecomposition& eig, Index m, double relTol) {
  const Index n = eig.values.size();
  const Index keep = n - m;
  const Matrix& u = eig.vectors;
  const Vector& mu = eig.values;
  SpectralSplit out;
  out.keptVectors = u.leftCols(keep);
  out.aMax = SymmetricMatrix(u.leftCols(keep) * mu.head(keep).asDiagonal() * u.leftCols(keep).transpose());
  out.aMin = SymmetricMatrix(u.rightCols(m) * mu.tail(m).asDiagonal() * u.rightCols(m).transpose());
  out.muNm = mu(keep - 1);
  const double scale = std::max(std::abs(mu(0)), std::abs(mu(n - 1)));
  out.degenerate = std::abs(mu(keep - 1) - mu(keep)) <= relTol * scale;
  return out;
}

}  // namespace detail

/// A = A^max_{n-m} + A^min_m. Ties at the cut keep the first n - m positions
/// of the sorted order and set `degenerate`.
inline SpectralSplit spectral_split(const SymmetricMatrix& a, Index m, double relTol = 0.0) {
  const Index n = a.order();
  if (m <= 0 || m >= n) {
    throw Error(ErrorCode::DimensionMismatch,
                "spectral split needs 0 < m < n, got n=" + std::to_string(n) + " m=" + std::to_string(m));
  }
  if (relTol <= 0.0) relTol = default_rel_tol(n);
  return detail::split_from(sym_eig(a), m, relTol);
}

/// min{mu_{n-m} * rho~, sigma_min * sqrt(rho~)} with rho~ measured against
/// the span of the n - m dominant eigenvectors of A. A zero angle yields a
/// value of exactly 0 and the zero-angle warning.
inline BoundReport general_rank_bound(const SaddleProblem& p) {
  const Index keep = p.n() - p.m();
  if (p.rankA() < keep) {
    throw Error(ErrorCode::RankTooLow, "rank(A)=" + std::to_string(p.rankA()) + " < n - m = " +
                                           std::to_string(keep) + "; K is singular");
  }
  const SpectralSplit split = detail::split_from(p.eigA(), p.m(), p.relTol());
  const SpectralSummary s = spectral_summary(p);
  const RangeAngles ang = detail::angles_between(
      detail::leading_eigvecs(p, keep, SubspaceKind::Range), detail::constraint_row_space(p), p.angleTol());
  BoundReport r = detail::angle_bound(BoundKind::GeneralRank, split.muNm, s.sigmaMin, ang);
  r.muNm = split.muNm;
  if (split.degenerate) r.warnings.emplace_back(warning::kDegenerateSplit);
  return r;
}

// ---------------------------------------------------------------------------

struct BoundRequest {
  std::optional<double> gamma;  // explicit gamma for wbound / agamma
  bool autoGamma = false;       // use optimal_gamma (or the general-rank analogue)
};

struct BoundSet {
  std::vector<BoundReport> reports;
  std::vector<std::string> notes;
};

/// Every bound that applies to p, in a fixed order.
inline BoundSet all_bounds(const SaddleProblem& p, const BoundRequest& req = {}) {
  BoundSet out;
  const SpectralSummary s = spectral_summary(p);
  out.reports.push_back(rusten_winther(s));
  if (p.psdClamped()) out.reports.back().warnings.emplace_back(warning::kPsdClamped);

  if (p.lowestRank()) {
    out.reports.push_back(lowest_rank_bound(p));
    out.reports.push_back(kernel_angle_bound(p));
  }
  const BoundReport general = general_rank_bound(p);
  out.reports.push_back(general);

  std::optional<double> gamma = req.gamma;
  if (!gamma && req.autoGamma) {
    if (p.lowestRank()) {
      gamma = optimal_gamma(p);
    } else if (general.value > 0.0) {
      gamma = 1.0 / general.value;
      out.notes.emplace_back("rank(A) > n - m: auto-gamma taken from the general-rank bound");
    } else {
      out.notes.emplace_back("rank(A) > n - m and the general-rank bound is zero: no auto-gamma");
    }
  }
  if (gamma) {
    try {
      BoundReport w = wbound(p, WeightMatrix::scalar(*gamma));
      out.reports.push_back(std::move(w));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AugmentedBlockSingular) throw;
      out.notes.emplace_back(std::string("wbound skipped: ") + e.what());
    }
    if (p.lowestRank() && *gamma > 0.0) out.reports.push_back(agamma_report(p, *gamma));
  }
  return out;
}

}  // namespace spbounds

#endif  // SPBOUNDS_BOUNDS_HPP
