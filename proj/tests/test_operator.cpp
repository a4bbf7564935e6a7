#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "udbound/ensemble.hpp"
#include "udbound/operator.hpp"

using namespace udbound;

namespace {

HermitianOperator random_hermitian(int n, std::mt19937_64& rng) {
  Matrix g(n, n);
  for (int k = 0; k < n; ++k) g.col(k) = oracle::random_vector(n, rng);
  return HermitianOperator((g + g.adjoint()) / 2.0, DimVector::single(n));
}

HermitianOperator ket0() { return StateVector::basis(2, 0).projector(); }

}  // namespace

TEST(DimVector, TotalAndDigits) {
  const DimVector d{2, 3, 4};
  EXPECT_EQ(d.total(), 24);
  EXPECT_EQ(d.sites(), 3u);
  const std::vector<int> digits = d.digits(23);
  EXPECT_EQ(digits, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(d.index(digits), 23);
  EXPECT_EQ(d.digits(4), (std::vector<int>{0, 1, 0}));
}

TEST(DimVector, RejectsNonPositive) {
  EXPECT_THROW(DimVector({2, 0}), Error);
  EXPECT_THROW(DimVector(std::vector<int>{}), Error);
}

TEST(HermitianOperator, SymmetrizesSmallDeviation) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = Complex(0.0, 1e-9);
  const HermitianOperator a(m, DimVector::single(2));
  EXPECT_NEAR(a.input_deviation(), 1e-9, 1e-15);
  EXPECT_EQ(a.matrix(), a.matrix().adjoint());
}

TEST(HermitianOperator, RejectsLargeDeviation) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.5;
  try {
    HermitianOperator a(m, DimVector::single(2));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("hermiticity deviation"), std::string::npos);
  }
}

TEST(HermitianOperator, RejectsDimsMismatch) {
  EXPECT_THROW(HermitianOperator(Matrix::Identity(3, 3), DimVector{2, 2}), Error);
}

TEST(StateVector, NormalizedConstructor) {
  const StateVector v(Vector::Constant(4, Complex(1.0, 1.0)), DimVector{2, 2});
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}

TEST(Tensor, IdentityFactors) {
  const HermitianOperator i2 = HermitianOperator::identity(DimVector::single(2));
  const HermitianOperator t = tensor({i2, i2});
  EXPECT_TRUE(t.matrix().isApprox(Matrix::Identity(4, 4)));
  EXPECT_TRUE(t.dims() == (DimVector{2, 2}));
}

TEST(Tensor, BasisConventionSiteZeroSlowest) {
  const HermitianOperator t = tensor({ket0(), ket0()});
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  EXPECT_TRUE(t.matrix().isApprox(expected));
  const HermitianOperator p = tensor({StateVector::basis(2, 1).projector(), ket0()});
  EXPECT_NEAR(p.matrix()(2, 2).real(), 1.0, 1e-15);  // |10> is index 2
}

TEST(Tensor, MuProductEntry) {
  const HermitianOperator t = tensor({example1::mu(+1).projector(), example1::mu(-1).projector()});
  EXPECT_NEAR(t.trace(), 1.0, 1e-12);
  EXPECT_NEAR(t.matrix()(0, 0).real(), 9.0 / 16.0, 1e-12);
  EXPECT_EQ(support_basis(t).cols(), 1);
}

TEST(Tensor, EmptyListThrows) {
  const std::vector<HermitianOperator> none;
  try {
    tensor(std::span<const HermitianOperator>(none));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no factors"), std::string::npos);
  }
}

TEST(Tensor, TraceMultiplicativeAndAssociative) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator a = oracle::random_density(DimVector::single(2), 2, rng) * 3.0;
    const HermitianOperator b = oracle::random_density(DimVector::single(3), 2, rng) * 0.5;
    const HermitianOperator c = oracle::random_density(DimVector::single(2), 1, rng);
    EXPECT_NEAR(tensor({a, b}).trace(), a.trace() * b.trace(), 1e-12 * a.trace() * b.trace());
    const Matrix left = tensor({tensor({a, b}), c}).matrix();
    const Matrix right = tensor({a, tensor({b, c})}).matrix();
    EXPECT_LT(max_abs(left - right), 1e-12);
  }
}

TEST(PartialTrace, ProductFactorization) {
  std::mt19937_64 rng(2);
  const HermitianOperator a = oracle::random_density(DimVector::single(2), 2, rng);
  const HermitianOperator b = oracle::random_density(DimVector::single(3), 3, rng) * 2.0;
  const std::size_t site1[] = {1};
  const HermitianOperator r = partial_trace(tensor({a, b}), site1);
  EXPECT_LT(max_abs(r.matrix() - b.trace() * a.matrix()), 1e-12);
  EXPECT_TRUE(r.dims() == DimVector::single(2));
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  const std::size_t site0[] = {0};
  const HermitianOperator r = partial_trace(example1::bell_phi(+1).projector(), site0);
  EXPECT_LT(max_abs(r.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-12);
}

TEST(PartialTrace, TracePreservedAndAllSitesScalar) {
  std::mt19937_64 rng(3);
  const HermitianOperator a = oracle::random_density(DimVector{2, 3, 2}, 4, rng);
  const std::size_t mid[] = {1};
  EXPECT_NEAR(partial_trace(a, mid).trace(), a.trace(), 1e-12);
  const std::size_t all[] = {0, 1, 2};
  const HermitianOperator s = partial_trace(a, all);
  EXPECT_EQ(s.size(), 1);
  EXPECT_NEAR(s.trace(), 1.0, 1e-12);
}

TEST(PartialTrace, LambdaOmegaCrossTermsVanish) {
  for (int d : {3, 4})
    for (int j = 1; j <= d; ++j) {
      const Matrix cross = outer(example2::lambda(d, j), example2::omega(d, j));
      const DimVector dims = example2::lambda(d, j).dims();
      for (std::size_t s = 0; s < dims.sites(); ++s) {
        const std::size_t site[] = {s};
        EXPECT_LT(max_abs(partial_trace(cross, dims, site)), 1e-12) << "d=" << d << " j=" << j;
      }
    }
}

TEST(PartialTrace, InvalidSiteThrows) {
  const std::size_t bad[] = {2};
  EXPECT_THROW(partial_trace(HermitianOperator::identity(DimVector{2, 2}), bad), Error);
}

TEST(PartialTranspose, SingletHasNegativeEigenvalue) {
  const HermitianOperator psi = example1::bell_psi(-1).projector();
  const std::size_t site[] = {1};
  const HermitianOperator pt(partial_transpose(psi.matrix(), psi.dims(), site), psi.dims());
  EXPECT_NEAR(min_eigenvalue(pt), -0.5, 1e-12);
}

TEST(Eig, ExamplesDescending) {
  const Spectrum id = eig_hermitian(HermitianOperator::identity(DimVector::single(2)));
  EXPECT_NEAR(id.values(0), 1.0, 1e-14);
  EXPECT_NEAR(id.values(1), 1.0, 1e-14);

  const HermitianOperator psi = example1::bell_psi(-1).projector();
  const Spectrum s = eig_hermitian(psi);
  EXPECT_NEAR(s.values(0), 1.0, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(s.values(k), 0.0, 1e-12);

  const Spectrum shifted = eig_hermitian(psi - HermitianOperator::identity(psi.dims()) * 0.5);
  EXPECT_NEAR(shifted.values(0), 0.5, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(shifted.values(k), -0.5, 1e-12);
}

TEST(Eig, RandomReconstructionAndPhase) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianOperator a = random_hermitian(6, rng);
    const Spectrum s = eig_hermitian(a);
    for (int k = 1; k < s.values.size(); ++k) EXPECT_GE(s.values(k - 1), s.values(k));
    const Matrix rec = s.vectors * s.values.cast<Complex>().asDiagonal() * s.vectors.adjoint();
    EXPECT_LE(max_abs(rec - a.matrix()), 1e-10 * max_abs(a.matrix()));
    for (int c = 0; c < s.vectors.cols(); ++c) {
      int first = 0;
      while (std::abs(s.vectors(first, c)) <= 1e-12) ++first;
      EXPECT_NEAR(s.vectors(first, c).imag(), 0.0, 1e-12);
      EXPECT_GT(s.vectors(first, c).real(), 0.0);
    }
  }
}

TEST(Psd, Examples) {
  EXPECT_TRUE(is_psd(HermitianOperator::identity(DimVector{2, 2}), 1e-9));
  const HermitianOperator psi = example1::bell_psi(-1).projector();
  EXPECT_FALSE(is_psd(psi - HermitianOperator::identity(psi.dims()) * 0.5));
  EXPECT_TRUE(is_psd(build_example1().K));
}

TEST(Support, Examples) {
  const HermitianOperator id = HermitianOperator::identity(DimVector{2, 2});
  EXPECT_LT(max_abs(support_projector(id).matrix() - id.matrix()), 1e-12);
  EXPECT_LT(max_abs(support_projector(ket0()).matrix() - ket0().matrix()), 1e-12);
  const ExampleFixtures fx = build_example2(3);
  EXPECT_EQ(support_basis(fx.ensemble.state(0)).cols(), 5);
  EXPECT_EQ(kernel_basis(fx.ensemble.state(0)).cols(), 4);
}

TEST(Support, IndefiniteThrows) {
  const HermitianOperator psi = example1::bell_psi(-1).projector();
  try {
    support_projector(psi - HermitianOperator::identity(psi.dims()) * 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("support undefined for indefinite operator"), std::string::npos);
  }
}

TEST(Support, ProjectorSandwichRecoversOperator) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator a = oracle::random_density(DimVector{2, 3}, 1 + trial % 4, rng);
    const Matrix p = support_projector(a).matrix();
    EXPECT_LE(max_abs(p * a.matrix() * p - a.matrix()), tolerance::kRank * 6);
  }
}

TEST(Compress, IdentityGivesIdentity) {
  const Matrix basis = Matrix::Identity(4, 4).leftCols(3);
  const HermitianOperator c = compress(HermitianOperator::identity(DimVector{2, 2}), basis);
  EXPECT_TRUE(c.matrix().isApprox(Matrix::Identity(3, 3)));
  EXPECT_TRUE(c.dims() == DimVector::single(3));
}

TEST(Compress, ExampleCertificatesVanishOnSupports) {
  const ExampleFixtures fx1 = build_example1();
  Matrix b1(4, 2);
  b1.col(0) = example1::phi(1).amplitudes();
  b1.col(1) = example1::bell_psi(-1).amplitudes();
  EXPECT_LT(max_abs(compress(fx1.K - fx1.ensemble.weighted_state(0), b1).matrix()), 1e-12);

  for (int d : {3, 4}) {
    const ExampleFixtures fx2 = build_example2(d);
    for (int i = 1; i <= d; ++i) {
      Matrix b(example2::total_dimension(d), 2);
      b.col(0) = example2::lambda(d, i).amplitudes();
      b.col(1) = example2::omega(d, i).amplitudes();
      EXPECT_LT(max_abs(compress(fx2.K - fx2.ensemble.weighted_state(i - 1), b).matrix()), 1e-12);
    }
  }
}

TEST(Compress, NonOrthonormalThrows) {
  Matrix basis = Matrix::Identity(4, 2);
  basis(1, 0) = 1.0;
  EXPECT_THROW(compress(HermitianOperator::identity(DimVector{2, 2}), basis), Error);
}

TEST(Compress, PsdPreservedOnRandomBases) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianOperator a = oracle::random_density(DimVector{2, 2}, 2, rng);
    Matrix g(4, 2);
    g.col(0) = oracle::random_vector(4, rng);
    g.col(1) = oracle::random_vector(4, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(4, 2);
    EXPECT_TRUE(is_psd(compress(a, q)));
  }
}

TEST(HsInner, Examples) {
  const HermitianOperator id = HermitianOperator::identity(DimVector{2, 2});
  EXPECT_NEAR(hs_inner(id, id), 4.0, 1e-14);
  const ExampleFixtures fx = build_example1();
  EXPECT_NEAR(hs_inner(fx.ensemble.state(0), fx.global_measurement.elements[2]), 0.0, 1e-12);
  EXPECT_NEAR(hs_inner(fx.ensemble.state(0), fx.global_measurement.elements[1]), 0.75, 1e-12);
  EXPECT_THROW(hs_inner(id, HermitianOperator::identity(DimVector::single(2))), Error);
}

TEST(HsInner, SymmetricOnRandomPairs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator a = random_hermitian(5, rng), b = random_hermitian(5, rng);
    EXPECT_NEAR(hs_inner(a, b), hs_inner(b, a), 1e-12);
  }
}
