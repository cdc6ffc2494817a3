#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spbounds/generators.hpp"
#include "spbounds/harness.hpp"
#include "spbounds/report.hpp"

namespace {

using namespace spbounds;

// Smaller positive root of lambda^3 - lambda^2 - lambda + b2^2 (40-digit
// reference) and the other two roots for b2 = 0.8.
constexpr double kRootB08 = 0.51205957644562938704;
constexpr double kNegRootB08 = -0.90030948779392771279;
constexpr double kLargeRootB08 = 1.3882499113482983258;
constexpr double kGolden = 1.6180339887498948482;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidConfig;
}

TEST(GenToy, KernelStructureAndCharacteristicPolynomial) {
  const SaddleProblem p = gen_toy({0.6, 0.8});
  const Matrix k = p.K().matrix();
  Matrix expected(3, 3);
  expected << 1, 0, 0.6, 0, 0, 0.8, 0.6, 0.8, 0;
  EXPECT_EQ(k, expected);
  // det(lambda I - K) = lambda^3 - lambda^2 - lambda + 0.64 at a few points.
  for (double lambda : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
    const double det = (lambda * Matrix::Identity(3, 3) - k).determinant();
    EXPECT_NEAR(det, lambda * lambda * lambda - lambda * lambda - lambda + 0.64, 1e-14);
  }
  const OracleResult o = oracle(p);
  EXPECT_NEAR(o.allEigs(0), kLargeRootB08, 1e-14);
  EXPECT_NEAR(o.allEigs(1), kRootB08, 1e-14);
  EXPECT_NEAR(o.allEigs(2), kNegRootB08, 1e-14);
}

TEST(GenToy, BoundaryCaseInTestMode) {
  const OracleResult o = oracle(gen_toy({0.0, 1.0, true}));
  EXPECT_NEAR(o.allEigs(0), 1.0, 1e-15);
  EXPECT_NEAR(o.allEigs(1), 1.0, 1e-15);
  EXPECT_NEAR(o.allEigs(2), -1.0, 1e-15);
}

TEST(GenToy, Errors) {
  EXPECT_EQ(code_of([] { (void)gen_toy({1.0, 0.0, true}); }), ErrorCode::SingularK);
  EXPECT_EQ(code_of([] { (void)gen_toy({0.0, 1.0, false}); }), ErrorCode::ParameterOutOfRange);
  EXPECT_EQ(code_of([] { (void)gen_toy({0.5, 0.5}); }), ErrorCode::ParameterOutOfRange);
  EXPECT_EQ(code_of([] { (void)gen_toy({-0.6, 0.8}); }), ErrorCode::ParameterOutOfRange);
}

TEST(GenToy, RootMatchesBisectionOracle) {
  for (int i = 1; i <= 9; ++i) {
    const double b2 = 0.1 * i;
    const SaddleProblem p = gen_toy({std::sqrt(1.0 - b2 * b2), b2});
    EXPECT_NEAR(oracle(p).muMinPlusK, ref::toy_cubic_small_root(b2 * b2), 1e-12);
  }
}

TEST(GenRemark, PositiveEigenvalues) {
  for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
    const OracleResult o = oracle(gen_remark({alpha}));
    EXPECT_EQ(o.posCount, 3);
    EXPECT_NEAR(o.allEigs(0), kGolden, 1e-12);
    EXPECT_NEAR(o.allEigs(1), 1.0, 1e-12);
    EXPECT_NEAR(o.allEigs(2), alpha, 1e-12);
  }
}

TEST(GenRemark, Bounds) {
  EXPECT_NO_THROW((void)gen_remark({1.0 - 1e-12}));
  EXPECT_EQ(code_of([] { (void)gen_remark({1.0}); }), ErrorCode::ParameterOutOfRange);
  EXPECT_EQ(code_of([] { (void)gen_remark({0.0}); }), ErrorCode::ParameterOutOfRange);
}

TEST(GenRemark, MatchesTheClosedFormMatrix) {
  const Matrix k = gen_remark({0.5}).K().matrix();
  Matrix expected = Matrix::Zero(5, 5);
  expected(0, 0) = 1.0;
  expected(1, 1) = 0.5;
  expected(2, 3) = expected(3, 2) = 1.0;
  expected(0, 4) = expected(4, 0) = 1.0;
  EXPECT_EQ(k, expected);
}

AnglesParams angles(Index n, Index m, std::vector<double> thetas) {
  AnglesParams ap;
  ap.n = n;
  ap.m = m;
  for (Index i = 0; i < n - m; ++i) ap.aEigs.push_back(1.0 + 0.5 * static_cast<double>(i));
  for (Index i = 0; i < m; ++i) ap.bSingVals.push_back(2.0 + static_cast<double>(i));
  ap.thetas = std::move(thetas);
  return ap;
}

TEST(GenPrescribedAngles, RoundTripsTheAngles) {
  const SaddleProblem p = gen_prescribed_angles(angles(6, 2, {std::numbers::pi / 6, std::numbers::pi / 3}), 4);
  const RangeAngles ang = rho_from_angles(p);
  ASSERT_EQ(ang.cosines.size(), 2);
  EXPECT_NEAR(ang.cosines(0), std::cos(std::numbers::pi / 6), 1e-8);
  EXPECT_NEAR(ang.cosines(1), 0.5, 1e-8);
}

TEST(GenPrescribedAngles, RoundTripOnManyInstances) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index m = 1 + static_cast<Index>(seed % 4);
    const Index n = 2 * m + static_cast<Index>(seed % 5);
    std::vector<double> thetas;
    for (Index i = 0; i < m; ++i) thetas.push_back(0.1 + 1.4 * static_cast<double>(i + 1) / static_cast<double>(m + 1));
    const SaddleProblem p = gen_prescribed_angles(angles(n, m, thetas), seed);
    const PrincipalAngles pa = principal_angles(range_basis(p.A(), p.relTol()), row_space_basis(p.B(), p.relTol()));
    for (Index i = 0; i < m; ++i) EXPECT_NEAR(pa.angles(i), thetas[static_cast<std::size_t>(i)], 1e-8);
  }
}

TEST(GenPrescribedAngles, OrthogonalAnglesGiveTheMinimumOfBothSpectra) {
  const SaddleProblem p = gen_prescribed_angles(angles(9, 3, {std::numbers::pi / 2, std::numbers::pi / 2, std::numbers::pi / 2}), 5);
  EXPECT_NEAR(lowest_rank_bound(p).value, std::min(1.0, 2.0), 1e-12);
  EXPECT_NEAR(oracle(p).muMinPlusK, 1.0, 1e-12);
}

TEST(GenPrescribedAngles, TinyAngleDegradesBoundAndEigenvalue) {
  AnglesParams ap = angles(4, 1, {1e-6});
  const SaddleProblem p = gen_prescribed_angles(ap, 9);
  const double bound = lowest_rank_bound(p).value;
  EXPECT_NEAR(bound / (1.0 - std::cos(1e-6)), 1.0, 1e-4);
  EXPECT_LT(bound, 1e-12);
  const double actual = oracle(p).muMinPlusK;
  EXPECT_LT(actual, 1e-5);
  EXPECT_GE(actual, bound - 1e-14);
}

TEST(GenPrescribedAngles, Errors) {
  EXPECT_EQ(code_of([] { (void)gen_prescribed_angles(angles(5, 3, {0.5, 0.6, 0.7}), 1); }),
            ErrorCode::InfeasibleDimensions);
  EXPECT_EQ(code_of([] { (void)gen_prescribed_angles(angles(6, 2, {0.8, 0.5}), 1); }),
            ErrorCode::ParameterOutOfRange);
  EXPECT_EQ(code_of([] { (void)gen_prescribed_angles(angles(6, 2, {0.0, 0.5}), 1); }),
            ErrorCode::ParameterOutOfRange);
  EXPECT_EQ(code_of([] { (void)gen_prescribed_angles(angles(6, 2, {0.5}), 1); }), ErrorCode::DimensionMismatch);
}

TEST(GenIpmLike, DeltaZeroIsLowestRank) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SaddleProblem p = gen_ipm_like({12, 4, 0.0}, seed);
    EXPECT_TRUE(p.lowestRank());
    EXPECT_EQ(general_rank_bound(p).value, lowest_rank_bound(p).value);
  }
}

TEST(GenIpmLike, PositiveDeltaRaisesTheRank) {
  for (double delta : {1e-8, 1e-2, 1.0}) {
    const SaddleProblem p = gen_ipm_like({12, 4, delta}, 2);
    EXPECT_GT(p.rankA(), 8) << "delta=" << delta;
    EXPECT_NE(certify(general_rank_bound(p), oracle(p)).status, CertStatus::Violated);
  }
}

TEST(GenRandomLowestRank, RankIsExact) {
  const SaddleProblem p = gen_random_lowest_rank({8, 3}, 1);
  EXPECT_EQ(numerical_rank(p.eigA().values, p.relTol()), 5);
  EXPECT_TRUE(p.lowestRank());
}

TEST(GenRandomLowestRank, MinimalCase) {
  const SaddleProblem p = gen_random_lowest_rank({2, 1}, 3);
  BoundRequest req;
  req.autoGamma = true;
  EXPECT_EQ(all_bounds(p, req).reports.size(), 6u);
}

TEST(GenRandomLowestRank, PropertySuiteScale) {
  const SaddleProblem p = gen_random_lowest_rank({60, 20}, 42);
  const OracleResult o = oracle(p);
  EXPECT_TRUE(o.inertiaOk);
  EXPECT_EQ(certify(lowest_rank_bound(p), o).status, CertStatus::Sound);
}

TEST(GenRandomLowestRank, BadDimensions) {
  EXPECT_EQ(code_of([] { (void)gen_random_lowest_rank({3, 3}, 1); }), ErrorCode::DimensionMismatch);
}

std::vector<GeneratorSpec> sample_specs() {
  return {
      {ToyParams{0.6, 0.8, false}, 0},
      {RemarkParams{0.3}, 0},
      {angles(7, 2, {0.4, 1.1}), 17},
      {IpmParams{15, 5, 1e-2}, 23},
      {RandomParams{11, 4}, 29},
  };
}

TEST(Generators, BitIdenticalForIdenticalSpecs) {
  for (const GeneratorSpec& spec : sample_specs()) {
    const SaddleProblem a = generate(spec);
    const SaddleProblem b = generate(spec);
    EXPECT_EQ(a.A().matrix(), b.A().matrix()) << family_name(spec.params);
    EXPECT_EQ(a.B().matrix(), b.B().matrix()) << family_name(spec.params);
  }
}

TEST(Generators, SeedsChangeTheDraw) {
  EXPECT_NE(generate({RandomParams{9, 3}, 1}).A().matrix(), generate({RandomParams{9, 3}, 2}).A().matrix());
}

TEST(Generators, EveryGeneratedProblemIsValid) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    for (const GeneratorSpec& base : sample_specs()) {
      GeneratorSpec spec = base;
      spec.seed = seed;
      const SaddleProblem p = generate(spec);
      const OracleResult o = oracle(p);
      EXPECT_TRUE(o.inertiaOk) << family_name(spec.params) << " seed=" << seed;
      EXPECT_GE(sym_eigenvalues(p.A()).minCoeff(), -p.relTol() * std::max(1.0, p.eigA().values(0)));
      EXPECT_EQ(numerical_rank(p.svdB().singularValues, p.relTol()), p.m());
    }
  }
}

TEST(Generators, SpecJsonRoundTrip) {
  for (const GeneratorSpec& spec : sample_specs()) {
    const Json j = to_json(spec);
    const GeneratorSpec back = generator_spec_from_json(Json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_EQ(generate(back).A().matrix(), generate(spec).A().matrix());
  }
}

TEST(Generators, SpecJsonMissingKey) {
  EXPECT_EQ(code_of([] { (void)generator_spec_from_json(Json{{"family", "ipm"}, {"params", {{"n", 4}}}}); }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { (void)generator_spec_from_json(Json{{"family", "nope"}}); }), ErrorCode::InvalidConfig);
}

TEST(SeededRng, UniformIsInsideTheOpenInterval) {
  SeededRng rng(0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SeededRng, OrthogonalIsOrthogonal) {
  SeededRng rng(8);
  const Matrix q = rng.orthogonal(12);
  EXPECT_LE((q.transpose() * q - Matrix::Identity(12, 12)).norm(), 1e-13);
}

TEST(SeededRng, SubsetIsSortedAndDistinct) {
  SeededRng rng(8);
  const std::vector<Index> s = rng.subset(20, 7);
  ASSERT_EQ(s.size(), 7u);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
}

}  // namespace
