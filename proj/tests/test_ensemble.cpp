#include <gtest/gtest.h>

#include <cmath>

#include "udbound/ensemble.hpp"

using namespace udbound;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
  return r.str().find(needle) != std::string::npos;
}

Matrix gram(const std::vector<StateVector>& vs) {
  Matrix g(vs.size(), vs.size());
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = 0; b < vs.size(); ++b) g(a, b) = inner(vs[a], vs[b]);
  return g;
}

}  // namespace

TEST(ValidateEnsemble, Example1IsValid) {
  const ExampleFixtures fx = build_example1();
  EXPECT_TRUE(validate_ensemble(fx.ensemble).ok()) << validate_ensemble(fx.ensemble).str();
  EXPECT_EQ(fx.ensemble.size(), 3u);
  EXPECT_TRUE(fx.ensemble.dims == (DimVector{2, 2}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(fx.ensemble.prior(i), 1.0 / 3.0, 1e-15);
}

TEST(ValidateEnsemble, PriorSumViolation) {
  const HermitianOperator rho = StateVector::basis(2, 0).projector();
  const Ensemble e{DimVector::single(2), {{0.5, rho}, {0.6, rho}}};
  const ValidationReport r = validate_ensemble(e);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r, "priors sum 1.1")) << r.str();
}

TEST(ValidateEnsemble, NotPsdViolation) {
  ExampleFixtures fx = build_example1();
  fx.ensemble.items[0].state = fx.ensemble.state(0) - HermitianOperator::identity(fx.ensemble.dims) * 0.01;
  const ValidationReport r = validate_ensemble(fx.ensemble);
  EXPECT_TRUE(mentions(r, "not PSD")) << r.str();
}

TEST(ValidateEnsemble, TraceAndPriorSignViolations) {
  const HermitianOperator rho = StateVector::basis(2, 0).projector();
  const Ensemble e{DimVector::single(2), {{1.5, rho * 2.0}, {-0.5, rho}}};
  const ValidationReport r = validate_ensemble(e);
  EXPECT_TRUE(mentions(r, "trace")) << r.str();
  EXPECT_GE(r.violations.size(), 2u);
}

TEST(Example1, OverlapOfNuStates) {
  EXPECT_NEAR(inner(example1::nu(+1), example1::nu(-1)).real(), -0.5, 1e-15);
  const ExampleFixtures fx = build_example1();
  EXPECT_NEAR(hs_inner(fx.ensemble.state(1), fx.ensemble.state(2)), 1.0 / 16.0, 1e-14);
}

TEST(Example1, FixturesAreMeasurements) {
  const ExampleFixtures fx = build_example1();
  EXPECT_TRUE(validate_measurement(fx.global_measurement).ok()) << validate_measurement(fx.global_measurement).str();
  EXPECT_TRUE(validate_measurement(fx.separable_measurement).ok());
  EXPECT_LT(max_abs(fx.separable_measurement.completeness_defect().matrix()), 1e-12);
  EXPECT_TRUE(validate_decompositions(fx.separable_measurement).ok()) << validate_decompositions(fx.separable_measurement).str();
  EXPECT_NEAR(fx.K.trace(), 0.75, 1e-14);
  EXPECT_NEAR(fx.H.trace(), 0.5, 1e-14);
}

TEST(Example1, ProtocolComposesSeparableMeasurement) {
  const ExampleFixtures fx = build_example1();
  ASSERT_TRUE(fx.separable_measurement.locc_protocol.has_value());
  const LoccProtocol& p = *fx.separable_measurement.locc_protocol;
  EXPECT_EQ(p.tuple_count(), 9u);
  for (std::size_t i = 0; i < fx.separable_measurement.size(); ++i)
    EXPECT_LT(max_abs(p.compose(i, fx.ensemble.dims).matrix() - fx.separable_measurement.elements[i].matrix()), 1e-12);
}

TEST(Example2, BuilderRejectsSmallDAndCap) {
  EXPECT_THROW(build_example2(2), Error);
  EXPECT_THROW(build_example2(4, 63), Error);
  EXPECT_NO_THROW(build_example2(3, 9));
}

TEST(Example2, StatesHaveTraceOneAndRankFormula) {
  for (int d : {3, 4}) {
    const ExampleFixtures fx = build_example2(d);
    EXPECT_TRUE(validate_ensemble(fx.ensemble).ok()) << validate_ensemble(fx.ensemble).str();
    EXPECT_EQ(fx.ensemble.size(), static_cast<std::size_t>(d));
    EXPECT_EQ(fx.ensemble.dims.sites(), static_cast<std::size_t>(d - 1));
    const int rank = example2::total_dimension(d) - 2 * (d - 1);
    for (std::size_t i = 0; i < fx.ensemble.size(); ++i) {
      EXPECT_NEAR(fx.ensemble.state(i).trace(), 1.0, 1e-12);
      EXPECT_EQ(support_basis(fx.ensemble.state(i)).cols(), rank);
    }
  }
  EXPECT_DOUBLE_EQ(example2::normalization(3), 5.0);
  EXPECT_DOUBLE_EQ(example2::normalization(4), 58.0);
}

TEST(Example2, LambdaOmegaFamilyIsOrthonormal) {
  for (int d : {3, 4}) {
    std::vector<StateVector> family;
    for (int j = 1; j <= d; ++j) family.push_back(example2::lambda(d, j));
    for (int j = 1; j <= d; ++j) family.push_back(example2::omega(d, j));
    const Matrix g = gram(family);
    EXPECT_LT(max_abs(g - Matrix::Identity(2 * d, 2 * d)), 1e-10) << "d=" << d;
  }
}

TEST(Example2, SuccessProbabilityOfFixture) {
  const ExampleFixtures fx = build_example2(3);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(hs_inner(fx.ensemble.state(i), fx.global_measurement.elements[i + 1]), 2.0 / 5.0, 1e-12);
}

TEST(Example2, FixturesAreMeasurements) {
  for (int d : {3, 4}) {
    const ExampleFixtures fx = build_example2(d);
    EXPECT_TRUE(is_psd(fx.global_measurement.elements[0]));
    EXPECT_LT(max_abs(fx.global_measurement.completeness_defect().matrix()), 1e-9);
    EXPECT_TRUE(validate_measurement(fx.separable_measurement).ok());
    EXPECT_TRUE(validate_decompositions(fx.separable_measurement).ok());
    EXPECT_NEAR(fx.K.trace(), 2.0 / example2::normalization(d), 1e-12);
    EXPECT_NEAR(fx.H.trace(), 1.0 / example2::normalization(d), 1e-12);
  }
}

TEST(BuildTwoPure, OverlapAndValidation) {
  const StateVector zero = StateVector::basis(2, 0), one = StateVector::basis(2, 1);
  const Ensemble orth = build_two_pure(zero, one, 0.5);
  EXPECT_NEAR(hs_inner(orth.state(0), orth.state(1)), 0.0, 1e-15);
  const StateVector plus = (zero + one) * Complex(1.0 / std::sqrt(2.0));
  const Ensemble e = build_two_pure(zero, plus, 0.5);
  EXPECT_NEAR(std::abs(inner(zero, plus)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(validate_ensemble(e).ok());
  const StateVector s00 = StateVector::basis(DimVector{2, 2}, std::vector<int>{0, 0});
  const StateVector s11 = StateVector::basis(DimVector{2, 2}, std::vector<int>{1, 1});
  EXPECT_TRUE(build_two_pure(s00, s11, 0.5).dims == (DimVector{2, 2}));
  EXPECT_THROW(build_two_pure(zero, one, 0.0), Error);
  EXPECT_THROW(build_two_pure(zero, one, 1.0), Error);
  EXPECT_THROW(build_two_pure(zero, s00, 0.5), Error);
}

TEST(ValidateMeasurement, DetectsIncompleteness) {
  const DimVector dims = DimVector::single(2);
  Measurement m;
  m.dims = dims;
  m.elements = {StateVector::basis(2, 0).projector(), StateVector::basis(2, 0).projector()};
  m.decompositions.assign(2, std::nullopt);
  EXPECT_FALSE(validate_measurement(m).ok());
}

TEST(ValidateDecompositions, DetectsMismatch) {
  ExampleFixtures fx = build_example1();
  fx.separable_measurement.elements[1] = fx.separable_measurement.elements[1] * 1.01;
  EXPECT_FALSE(validate_decompositions(fx.separable_measurement).ok());
}
