#ifndef SPBOUNDS_HARNESS_HPP
#define SPBOUNDS_HARNESS_HPP

// Ground truth and experiments: dense eigensolves of K, certification of
// bound reports against them, the inverse identity relating K and K(W), the
// eigenstructure of P^T P for P = [U V], and the gamma sweep.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spbounds/bounds.hpp"
#include "spbounds/error.hpp"
#include "spbounds/linalg.hpp"
#include "spbounds/problem.hpp"

namespace spbounds {

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Callers write
/// results into slot i, so output order never depends on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline constexpr Index kDefaultOracleCap = 2000;
inline constexpr double kCertSlack = 1e-8;

// ---------------------------------------------------------------------------

inline SymmetricMatrix assemble_K(const SaddleProblem& p) { return p.K(); }

struct OracleResult {
  Vector allEigs;  // descending
  double muMinPlusK = 0.0;
  double threshold = 0.0;  // |lambda| <= threshold counts as zero
  Index posCount = 0;
  Index negCount = 0;
  Index zeroCount = 0;
  bool inertiaOk = false;  // posCount == n and negCount == m
};

inline OracleResult oracle(const SaddleProblem& p, Index cap = kDefaultOracleCap) {
  const Index size = p.n() + p.m();
  if (size > cap) {
    throw Error(ErrorCode::SizeCapExceeded,
                "n+m=" + std::to_string(size) + " exceeds oracle cap " + std::to_string(cap));
  }
  OracleResult o;
  o.allEigs = sym_eigenvalues(assemble_K(p));
  const double scale = o.allEigs.cwiseAbs().maxCoeff();
  o.threshold = p.relTol() * scale;
  o.muMinPlusK = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < size; ++i) {
    const double v = o.allEigs(i);
    if (v > o.threshold) {
      ++o.posCount;
      o.muMinPlusK = std::min(o.muMinPlusK, v);
    } else if (v < -o.threshold) {
      ++o.negCount;
    } else {
      ++o.zeroCount;
    }
  }
  if (o.posCount == 0) o.muMinPlusK = 0.0;
  o.inertiaOk = o.posCount == p.n() && o.negCount == p.m();
  return o;
}

enum class CertStatus { Sound, Violated, Vacuous };

inline std::string_view to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Sound: return "sound";
    case CertStatus::Violated: return "violated";
    case CertStatus::Vacuous: return "vacuous";
  }
  return "unknown";
}

struct CertificationOutcome {
  CertStatus status = CertStatus::Sound;
  double slack = 0.0;  // muMinPlusK - value
};

inline CertificationOutcome certify(const BoundReport& report, const OracleResult& o,
                                    double relSlack = kCertSlack) {
  CertificationOutcome c;
  c.slack = o.muMinPlusK - report.value;
  if (report.value <= 0.0) {
    c.status = CertStatus::Vacuous;
  } else if (report.value <= o.muMinPlusK + relSlack * std::max(1.0, o.muMinPlusK)) {
    c.status = CertStatus::Sound;
  } else {
    c.status = CertStatus::Violated;
  }
  return c;
}

/// Largest distance of an eigenvalue of K outside I- u I+ (0 when contained).
inline double rw_containment_excess(const BoundReport& rw, const OracleResult& o) {
  double worst = 0.0;
  for (Index i = 0; i < o.allEigs.size(); ++i) {
    const double v = o.allEigs(i);
    auto gap = [v](const Interval& iv) {
      if (v < iv.lo) return iv.lo - v;
      if (v > iv.hi) return v - iv.hi;
      return 0.0;
    };
    worst = std::max(worst, std::min(gap(*rw.negative), gap(*rw.positive)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

struct InverseIdentityResult {
  double residual = 0.0;  // ||K^-1 - K(W)^-1 - diag(0, W)||_F / max(1, ||K^-1||_F)
  std::optional<double> schurResidual;  // (2,2) block of K^-1 vs -S_W^-1 + W; needs A_W > 0
  double conditionK = 0.0;
  double conditionKW = 0.0;
};

namespace detail {

struct SymInverse {
  Matrix inverse;
  double condition = 0.0;
  double smallest = 0.0;
  double largest = 0.0;
};

inline SymInverse sym_inverse(const SymmetricMatrix& m) {
  const EigDecomposition e = sym_eig(m);
  SymInverse out;
  out.largest = e.values.cwiseAbs().maxCoeff();
  out.smallest = e.values.cwiseAbs().minCoeff();
  out.condition = out.smallest > 0.0 ? out.largest / out.smallest : std::numeric_limits<double>::infinity();
  if (out.smallest > 0.0) {
    out.inverse = e.vectors * e.values.cwiseInverse().asDiagonal() * e.vectors.transpose();
  }
  return out;
}

}  // namespace detail

inline InverseIdentityResult inverse_identity_residual(const SaddleProblem& p, const WeightMatrix& w) {
  const Index m = p.m();
  const SymmetricMatrix aw = assemble_augmented(p, w);
  const Matrix& b = p.B().matrix();
  const Matrix wDense = w.dense(m);

  const detail::SymInverse kInv = detail::sym_inverse(assemble_K(p));
  const detail::SymInverse kwInv = detail::sym_inverse(assemble_saddle(aw.matrix(), b));
  if (!(kwInv.smallest > p.relTol() * kwInv.largest)) {
    throw Error(ErrorCode::SingularAugmented, "K(W) is numerically singular");
  }

  InverseIdentityResult r;
  r.conditionK = kInv.condition;
  r.conditionKW = kwInv.condition;
  const double scale = std::max(1.0, kInv.inverse.norm());

  Matrix diff = kInv.inverse - kwInv.inverse;
  diff.bottomRightCorner(m, m) -= wDense;
  r.residual = diff.norm() / scale;

  Eigen::LLT<Matrix> awChol(aw.matrix());
  if (awChol.info() == Eigen::Success) {
    const Matrix awInvBt = awChol.solve(b.transpose());
    const Matrix schur = b * awInvBt;
    const Matrix expected = -schur.llt().solve(Matrix::Identity(m, m)) + wDense;
    r.schurResidual = (kInv.inverse.bottomRightCorner(m, m) - expected).norm() / scale;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct PtpCheck {
  Vector observed;   // eigenvalues of P^T P, ascending
  Vector predicted;  // {1}^{|n-2m|} u {1 +- cos theta_i}, ascending
  double maxDeviation = 0.0;
  double invNormSquaredInverse = 0.0;  // ||P^-1||^-2 = sigma_min(P)^2
  double oneMinusCosMin = 0.0;
};

/// Eigenstructure of P^T P for P = [U V] with U spanning range(A) and V the
/// right singular vectors of B. Requires rank(A) = n - m.
inline PtpCheck ptp_eigenstructure(const SaddleProblem& p) {
  if (!p.lowestRank()) {
    throw Error(ErrorCode::RankAssumptionViolated, "P^T P structure needs rank(A) = n - m");
  }
  const Index n = p.n();
  const Index m = p.m();
  Matrix pm(n, n);
  pm.leftCols(n - m) = p.eigA().vectors.leftCols(n - m);
  pm.rightCols(m) = p.svdB().rightVectors.leftCols(m);

  PtpCheck out;
  out.observed = sym_eigenvalues(SymmetricMatrix(pm.transpose() * pm)).reverse();

  SubspaceBasis u{n, pm.leftCols(n - m), SubspaceKind::Range, p.relTol()};
  SubspaceBasis v{n, pm.rightCols(m), SubspaceKind::Range, p.relTol()};
  const PrincipalAngles pa = principal_angles(u, v);
  const Index pairs = pa.cosines.size();
  out.predicted.resize(n);
  Index k = 0;
  for (Index i = 0; i < n - 2 * pairs; ++i) out.predicted(k++) = 1.0;
  for (Index i = 0; i < pairs; ++i) {
    out.predicted(k++) = 1.0 + pa.cosines(i);
    out.predicted(k++) = 1.0 - pa.cosines(i);
  }
  std::sort(out.predicted.data(), out.predicted.data() + n);
  out.maxDeviation = (out.observed - out.predicted).cwiseAbs().maxCoeff();

  Eigen::JacobiSVD<Matrix> psvd(pm);
  const double sMin = psvd.singularValues()(n - 1);
  out.invNormSquaredInverse = sMin * sMin;
  out.oneMinusCosMin = 1.0 - pa.cosines(0);
  return out;
}

// ---------------------------------------------------------------------------

struct SweepRow {
  double gamma = 0.0;
  double invGamma = 0.0;
  double muMinAgamma = 0.0;
  double predictedBound = 0.0;  // min{1/gamma, mu_min(A_gamma)}
  double actualMuMinPlusK = 0.0;
  double muMaxAgamma = 0.0;  // roundoff scale for monotonicity checks
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<std::size_t> crossingIndex;  // 1/gamma - mu_min(A_gamma) changes sign in [i, i+1]
};

/// `points` log-spaced values from lo to hi inclusive.
inline std::vector<double> gamma_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points == 0) {
    throw Error(ErrorCode::InvalidConfig, "gamma grid needs 0 < min < max and at least one point");
  }
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double l0 = std::log(lo);
  const double step = (std::log(hi) - l0) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = std::exp(l0 + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> default_gamma_grid() { return gamma_grid(1e-4, 1e4, 25); }

inline SweepResult gamma_sweep(const SaddleProblem& p, const std::vector<double>& grid,
                               Index oracleCap = kDefaultOracleCap, unsigned threads = 1) {
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty gamma grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw Error(ErrorCode::InvalidConfig, "gamma grid must be positive and strictly increasing");
    }
  }
  const double actual = oracle(p, oracleCap).muMinPlusK;
  SweepResult out;
  out.rows.resize(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        const double g = grid[i];
        const Vector e = sym_eigenvalues(assemble_augmented(p, WeightMatrix::scalar(g)));
        SweepRow& row = out.rows[i];
        row.gamma = g;
        row.invGamma = 1.0 / g;
        row.muMinAgamma = e(e.size() - 1);
        row.muMaxAgamma = e(0);
        row.predictedBound = std::min(row.invGamma, row.muMinAgamma);
        row.actualMuMinPlusK = actual;
      },
      threads);
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
    const bool above = out.rows[i].invGamma - out.rows[i].muMinAgamma > 0.0;
    const bool nextAbove = out.rows[i + 1].invGamma - out.rows[i + 1].muMinAgamma > 0.0;
    if (above != nextAbove) {
      out.crossingIndex = i;
      break;
    }
  }
  return out;
}

inline std::size_t sweep_argmax(const SweepResult& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    if (s.rows[i].predictedBound > s.rows[best].predictedBound) best = i;
  }
  return best;
}

struct SweepChecks {
  bool dominance = true;    // predicted <= actual everywhere
  bool monotone = true;     // mu_min(A_gamma) nondecreasing
  bool crossingMax = true;  // argmax within one index of the crossing
  std::string detail;
};

inline SweepChecks check_sweep(const SweepResult& s, double relSlack = kCertSlack) {
  SweepChecks c;
  std::ostringstream why;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const SweepRow& r = s.rows[i];
    if (r.predictedBound > r.actualMuMinPlusK + relSlack * std::max(1.0, r.actualMuMinPlusK)) {
      c.dominance = false;
      why << "row " << i << " predicted " << r.predictedBound << " > actual " << r.actualMuMinPlusK << "; ";
    }
    if (i > 0) {
      const SweepRow& prev = s.rows[i - 1];
      const double roundoff = 1e-12 * std::max(1.0, r.muMaxAgamma);
      if (r.muMinAgamma < prev.muMinAgamma - roundoff) {
        c.monotone = false;
        why << "mu_min(A_gamma) decreases at row " << i << "; ";
      }
    }
  }
  if (!s.crossingIndex) {
    c.crossingMax = false;
    why << "no crossing of 1/gamma and mu_min(A_gamma) on the grid; ";
  } else {
    const auto argmax = static_cast<long>(sweep_argmax(s));
    const auto cross = static_cast<long>(*s.crossingIndex);
    if (std::abs(argmax - cross) > 1) {
      c.crossingMax = false;
      why << "argmax " << argmax << " far from crossing " << cross << "; ";
    }
  }
  c.detail = why.str();
  return c;
}

// ---------------------------------------------------------------------------

struct InvariantCheck {
  std::string name;
  bool passed = true;
  bool skipped = false;
  std::string detail;
};

inline constexpr double kConditionGuard = 1e12;

/// Every checkable invariant for one problem: inertia, interval containment,
/// soundness of every bound, the inverse identity for each gamma, and, for
/// lowest-rank A, the P^T P eigenstructure and kernel/range equivalence.
inline std::vector<InvariantCheck> run_invariant_suite(const SaddleProblem& p, const std::vector<double>& gammas,
                                                       Index oracleCap = kDefaultOracleCap) {
  std::vector<InvariantCheck> out;
  const OracleResult o = oracle(p, oracleCap);
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };

  out.push_back({"inertia", o.inertiaOk, false,
                 "pos=" + std::to_string(o.posCount) + " neg=" + std::to_string(o.negCount) +
                     " zero=" + std::to_string(o.zeroCount)});

  const BoundReport rw = rusten_winther(spectral_summary(p));
  const double excess = rw_containment_excess(rw, o);
  out.push_back({"rusten-winther-containment", excess <= kCertSlack, false, "excess=" + fmt(excess)});

  BoundRequest req;
  req.autoGamma = true;
  for (const BoundReport& r : all_bounds(p, req).reports) {
    const CertificationOutcome c = certify(r, o);
    out.push_back({"soundness:" + std::string(to_string(r.kind)), c.status != CertStatus::Violated, false,
                   std::string(to_string(c.status)) + " value=" + fmt(r.value) + " slack=" + fmt(c.slack)});
  }
  for (double g : gammas) {
    if (g <= 0.0) continue;
    const BoundReport w = wbound(p, WeightMatrix::scalar(g));
    const CertificationOutcome c = certify(w, o);
    out.push_back({"soundness:wbound@" + fmt(g), c.status != CertStatus::Violated, false,
                   std::string(to_string(c.status)) + " value=" + fmt(w.value)});
  }

  for (double g : gammas) {
    InvariantCheck chk;
    chk.name = "inverse-identity@" + fmt(g);
    const InverseIdentityResult r = inverse_identity_residual(p, WeightMatrix::scalar(g));
    if (r.conditionKW > kConditionGuard || r.conditionK > kConditionGuard) {
      chk.skipped = true;
      chk.detail = "skipped: cond=" + fmt(std::max(r.conditionK, r.conditionKW));
    } else {
      const double schur = r.schurResidual.value_or(0.0);
      chk.passed = r.residual <= 1e-8 && schur <= 1e-8;
      chk.detail = "residual=" + fmt(r.residual) + " schur=" + fmt(schur);
    }
    out.push_back(chk);
  }

  if (p.lowestRank()) {
    const PtpCheck ptp = ptp_eigenstructure(p);
    const double normDev = std::abs(ptp.invNormSquaredInverse - ptp.oneMinusCosMin);
    out.push_back({"ptp-eigenstructure", ptp.maxDeviation <= 1e-8 && normDev <= 1e-8, false,
                   "eig-dev=" + fmt(ptp.maxDeviation) + " norm-dev=" + fmt(normDev)});
    const double lr = lowest_rank_bound(p).value;
    const double ka = kernel_angle_bound(p).value;
    out.push_back({"kernel-range-equivalence", std::abs(lr - ka) <= 1e-8 * std::max(1.0, lr), false,
                   "lowest-rank=" + fmt(lr) + " kernel-angle=" + fmt(ka)});
  }

  const SweepChecks sc = check_sweep(gamma_sweep(p, default_gamma_grid(), oracleCap));
  out.push_back({"sweep-dominance", sc.dominance, false, sc.detail});
  out.push_back({"sweep-monotone", sc.monotone, false, sc.detail});
  return out;
}

}  // namespace spbounds

#endif  // SPBOUNDS_HARNESS_HPP
