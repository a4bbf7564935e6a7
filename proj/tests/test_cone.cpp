#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "udbound/cone.hpp"

using namespace udbound;

namespace {

StateVector ket(const DimVector& dims, std::vector<int> digits) { return StateVector::basis(dims, digits); }

Matrix projector_of(const Matrix& basis) { return basis * basis.adjoint(); }

Matrix span_projector(std::initializer_list<StateVector> vs) {
  Matrix b(vs.begin()->amplitudes().size(), static_cast<Eigen::Index>(vs.size()));
  Eigen::Index k = 0;
  for (const auto& v : vs) b.col(k++) = v.amplitudes();
  const Matrix q = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  return q * q.adjoint();
}

}  // namespace

TEST(PosSupport, Example1FirstState) {
  const Ensemble e = build_example1().ensemble;
  const Matrix b = pos_support(e, 0);
  ASSERT_EQ(b.cols(), 2);
  EXPECT_LT(max_abs(projector_of(b) - span_projector({example1::phi(1), example1::bell_psi(-1)})), 1e-9);
}

TEST(PosSupport, Example2FirstState) {
  const Ensemble e = build_example2(3).ensemble;
  const Matrix b = pos_support(e, 0);
  ASSERT_EQ(b.cols(), 2);
  EXPECT_LT(max_abs(projector_of(b) - span_projector({example2::lambda(3, 1), example2::omega(3, 1)})), 1e-9);
}

TEST(PosSupport, OrthogonalPurePair) {
  const DimVector dims{2, 2};
  const Ensemble e = build_two_pure(ket(dims, {0, 0}), ket(dims, {1, 1}), 0.5);
  EXPECT_EQ(pos_support(e, 0).cols(), 3);
}

TEST(PosSupport, EmptyWhenStatesShareSupport) {
  const DimVector dims = DimVector::single(2);
  const HermitianOperator mixed = HermitianOperator::identity(dims) * 0.5;
  const Ensemble e{dims, {{0.5, mixed}, {0.5, StateVector::basis(2, 0).projector()}}};
  EXPECT_EQ(pos_support(e, 1).cols(), 0);
}

TEST(InPosDual, Example1Certificate) {
  const ExampleFixtures fx = build_example1();
  const DualTest t = in_pos_dual(fx.K - fx.ensemble.weighted_state(0), fx.ensemble, 0);
  EXPECT_TRUE(t.member);
  EXPECT_NEAR(t.residual, 0.0, 1e-12);
  EXPECT_FALSE(in_pos_dual(example1::phi(1).projector() * -1.0, fx.ensemble, 0).member);
}

TEST(InPosDual, PsdIsAlwaysInside) {
  std::mt19937_64 rng(21);
  const Ensemble e = build_example1().ensemble;
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianOperator a = oracle::random_density(e.dims, 1 + trial % 4, rng);
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_TRUE(in_pos_dual(a, e, i).member);
  }
}

TEST(InPosDual, MembershipImpliesNonnegativePairing) {
  std::mt19937_64 rng(22);
  const Ensemble e = build_example1().ensemble;
  std::normal_distribution<double> g;
  int members = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = Complex(g(rng), g(rng));
    const HermitianOperator b((m + m.adjoint()) / 2.0, e.dims);
    const std::size_t i = trial % 3;
    if (!in_pos_dual(b, e, i).member) continue;
    ++members;
    const Matrix s = pos_support(e, i);
    const Vector c = oracle::random_vector(static_cast<int>(s.cols()), rng);
    const StateVector v(s * c, e.dims);
    EXPECT_GE(hs_inner(v.projector(), b), -1e-9);
  }
  EXPECT_GT(members, 0);
}

TEST(InDualOfGenerators, Examples) {
  const ExampleFixtures fx1 = build_example1();
  const ConeGenerators c1 = sep_cone_generators_example(fx1.ensemble, ExampleKind::example1, 0);
  const DualTest t1 = in_dual_of_generators(fx1.H - fx1.ensemble.weighted_state(0), c1);
  EXPECT_TRUE(t1.member);
  EXPECT_NEAR(t1.residual, 0.0, 1e-12);

  const ExampleFixtures fx2 = build_example2(3);
  const ConeGenerators c2 = sep_cone_generators_example(fx2.ensemble, ExampleKind::example2, 0);
  const DualTest t2 = in_dual_of_generators(fx2.H - fx2.ensemble.weighted_state(0), c2);
  EXPECT_TRUE(t2.member);
  EXPECT_NEAR(t2.residual, 0.0, 1e-12);

  ConeGenerators id;
  id.dims = DimVector::single(2);
  id.add(HermitianOperator::identity(id.dims));
  EXPECT_FALSE(in_dual_of_generators(HermitianOperator::identity(id.dims) * -1.0, id).member);

  ConeGenerators empty;
  empty.dims = id.dims;
  EXPECT_TRUE(in_dual_of_generators(HermitianOperator::identity(id.dims) * -1.0, empty).member);
}

TEST(SepConeGenerators, Example1SecondCone) {
  const Ensemble e = build_example1().ensemble;
  const ConeGenerators c = sep_cone_generators_example(e, ExampleKind::example1, 1);
  ASSERT_EQ(c.size(), 2u);
  const HermitianOperator one = StateVector::basis(2, 1).projector();
  const HermitianOperator mu = example1::mu(+1).projector();
  EXPECT_LT(max_abs(c.generators[0].matrix() - tensor({mu, one}).matrix()), 1e-12);
  EXPECT_LT(max_abs(c.generators[1].matrix() - tensor({one, mu}).matrix()), 1e-12);
}

TEST(SepConeGenerators, AllGeneratorsInPosAndProduct) {
  for (ExampleKind kind : {ExampleKind::example1, ExampleKind::example2}) {
    const Ensemble e = kind == ExampleKind::example1 ? build_example1().ensemble : build_example2(3).ensemble;
    const auto cones = sep_cones_example(e, kind);
    ASSERT_EQ(cones.size(), e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      EXPECT_TRUE(validate_cone(cones[i]).ok());
      for (const auto& g : cones[i].generators)
        for (std::size_t j = 0; j < e.size(); ++j)
          if (j != i) EXPECT_NEAR(hs_inner(e.state(j), g), 0.0, 1e-12);
    }
  }
  const ConeGenerators c = sep_cone_generators_example(build_example2(3).ensemble, ExampleKind::example2, 0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_LT(max_abs(c.generators[0].matrix() - example2::lambda(3, 1).projector().matrix()), 1e-12);
}

TEST(SepConeGenerators, MismatchedEnsembleThrows) {
  const Ensemble e2 = build_example2(3).ensemble;
  EXPECT_THROW(sep_cone_generators_example(e2, ExampleKind::example1, 0), Error);
  EXPECT_THROW(sep_cone_generators_example(build_example1().ensemble, ExampleKind::example2, 0), Error);
}

TEST(Ppt, Examples) {
  const DimVector dims{2, 2};
  const Cut second{{1}};
  std::mt19937_64 rng(23);
  const HermitianOperator prod = tensor({oracle::random_density(DimVector::single(2), 2, rng),
                                         oracle::random_density(DimVector::single(2), 2, rng)});
  EXPECT_TRUE(ppt_check(prod, second).ppt);
  const PptResult singlet = ppt_check(example1::bell_psi(-1).projector(), second);
  EXPECT_FALSE(singlet.ppt);
  EXPECT_NEAR(singlet.min_eigenvalue, -0.5, 1e-12);
  EXPECT_FALSE(ppt_check(example2::omega(3, 1).projector(), Cut{{1}}).ppt);
  EXPECT_THROW(ppt_check(prod, Cut{{2}}), Error);
  EXPECT_THROW(ppt_check(prod, Cut{{}}), Error);
}

TEST(Ppt, DecomposedOperatorsPassEveryCut) {
  for (const Measurement& m : {build_example1().separable_measurement, build_example2(3).separable_measurement})
    for (std::size_t i = 0; i < m.size(); ++i) {
      ASSERT_TRUE(m.decompositions[i].has_value());
      for (const Cut& c : all_cuts(m.dims)) EXPECT_TRUE(ppt_check(m.elements[i], c).ppt);
    }
}

TEST(Ppt, AllCutsCount) {
  EXPECT_EQ(all_cuts(DimVector{2, 2}).size(), 1u);
  EXPECT_EQ(all_cuts(DimVector{2, 2, 2}).size(), 3u);
  EXPECT_EQ(all_cuts(DimVector{4, 4, 4}).size(), 3u);
  EXPECT_TRUE(all_cuts(DimVector::single(4)).empty());
}

TEST(Separability, TriState) {
  const Measurement m = build_example1().separable_measurement;
  EXPECT_EQ(classify_separability(m.elements[1], m.decompositions[1]), Separability::certified_separable);
  EXPECT_EQ(classify_separability(example1::bell_psi(-1).projector(), std::nullopt),
            Separability::certified_entangled);
  EXPECT_EQ(classify_separability(HermitianOperator::identity(DimVector{2, 2}), std::nullopt), Separability::unknown);
}

TEST(ProductState, Examples) {
  const DimVector dims{2, 2};
  EXPECT_TRUE(is_product_state(ket(dims, {0, 0})));
  EXPECT_FALSE(is_product_state(example1::bell_phi(+1)));
  EXPECT_FALSE(is_product_state(example2::omega(3, 1)));
  EXPECT_TRUE(is_product_state(example2::lambda(4, 2)));
}

TEST(UniqueProductRay, LambdaOmegaIsUnique) {
  for (int d : {3, 4}) {
    const RayCertificate c = certify_unique_product_ray(example2::lambda(d, 1), example2::omega(d, 1), 1e-9, 2000, 7);
    EXPECT_EQ(c.verdict, RayVerdict::unique) << "d=" << d;
    EXPECT_LT(c.cross_trace_residual, 1e-12);
    EXPECT_EQ(c.samples_checked, 2000u);
    EXPECT_EQ(c.samples_product, 0u);
  }
}

TEST(UniqueProductRay, ProductPairIsNotUnique) {
  const DimVector dims{2, 2};
  const RayCertificate c = certify_unique_product_ray(ket(dims, {0, 0}), ket(dims, {1, 1}));
  EXPECT_EQ(c.verdict, RayVerdict::not_unique);
  EXPECT_TRUE(c.v2_product);
}

TEST(UniqueProductRay, NonvanishingCrossTraceIsInconclusive) {
  const DimVector dims{2, 2};
  const RayCertificate c = certify_unique_product_ray(ket(dims, {0, 0}), example1::bell_psi(-1));
  EXPECT_EQ(c.verdict, RayVerdict::inconclusive);
  EXPECT_NEAR(c.cross_trace_residual, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(to_string(c.verdict), "inconclusive");
}

TEST(UniqueProductRay, PreconditionsThrow) {
  EXPECT_THROW(certify_unique_product_ray(example1::bell_psi(-1), example1::bell_phi(+1)), Error);
  const DimVector dims{2, 2};
  EXPECT_THROW(certify_unique_product_ray(ket(dims, {0, 0}), example1::bell_phi(+1)), Error);
}

TEST(UniqueProductRay, DeterministicGivenSeed) {
  const auto a = certify_unique_product_ray(example2::lambda(3, 2), example2::omega(3, 2), 1e-9, 500, 3);
  const auto b = certify_unique_product_ray(example2::lambda(3, 2), example2::omega(3, 2), 1e-9, 500, 3);
  EXPECT_EQ(a.samples_product, b.samples_product);
  EXPECT_EQ(a.verdict, b.verdict);
}

TEST(LemmaOne, SepDualElementsHavePositiveTrace) {
  std::mt19937_64 rng(24);
  const DimVector dims{2, 3};
  const std::size_t site[] = {1};
  for (int trial = 0; trial < 50; ++trial) {
    const HermitianOperator psd = oracle::random_density(dims, 1 + trial % 6, rng) * (0.01 + trial);
    EXPECT_GT(psd.trace(), 1e-12);
    const HermitianOperator pt(partial_transpose(psd.matrix(), dims, site), dims);
    EXPECT_GT(pt.trace(), 1e-12);
  }
}
