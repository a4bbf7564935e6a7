#pragma once

#include <optional>
#include <string>
#include <vector>

#include "udbound/operator.hpp"

namespace udbound {

struct EnsembleItem {
  double prior = 0.0;
  HermitianOperator state;
};

/// Priors eta_i and density operators rho_i, i = 1..n (stored 0-based).
struct Ensemble {
  DimVector dims;
  std::vector<EnsembleItem> items;

  std::size_t size() const { return items.size(); }
  double prior(std::size_t i) const { return items.at(i).prior; }
  const HermitianOperator& state(std::size_t i) const { return items.at(i).state; }
  /// eta_i rho_i
  HermitianOperator weighted_state(std::size_t i) const;
};

struct Violation {
  std::string message;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

/// One product term of a separable operator: site-wise PSD factors.
struct ProductTerm {
  std::vector<HermitianOperator> factors;
  HermitianOperator product() const;
};

struct SeparableDecomposition {
  std::vector<ProductTerm> terms;
  HermitianOperator reconstruct(const DimVector& dims) const;
};

/// One-round product protocol: every site applies its own local POVM and
/// the outcome tuple (site 0 slowest) is mapped to a global outcome index.
struct LoccProtocol {
  std::string description;
  std::vector<std::vector<HermitianOperator>> local_povms;
  std::vector<int> assignment;

  std::size_t tuple_count() const;
  /// Global element `outcome` as the sum of tensor products of assigned tuples.
  HermitianOperator compose(std::size_t outcome, const DimVector& dims) const;
};

/// M_0..M_n with index 0 the inconclusive outcome.
struct Measurement {
  DimVector dims;
  std::vector<HermitianOperator> elements;
  std::vector<std::optional<SeparableDecomposition>> decompositions;
  std::optional<LoccProtocol> locc_protocol;

  std::size_t size() const { return elements.size(); }
  HermitianOperator completeness_defect() const;  // sum M_i - I
};

ValidationReport validate_ensemble(const Ensemble& e);
ValidationReport validate_measurement(const Measurement& m, double tol = tolerance::kPsd);
/// Checks every attached decomposition: PSD factors, reconstruction within tol.
ValidationReport validate_decompositions(const Measurement& m, double tol = 1e-9);

/// Closed-form objects accompanying an example ensemble.
struct ExampleFixtures {
  Ensemble ensemble;
  Measurement global_measurement;  // optimal unambiguous measurement
  HermitianOperator K;             // its certificate
  HermitianOperator H;             // separable-bound certificate
  Measurement separable_measurement;  // annotated with decompositions and protocol
};

namespace example1 {
StateVector nu(int sign);
StateVector mu(int sign);
StateVector phi(int i);  // |Phi_1>, |Phi_2>, |Phi_3>
StateVector bell_phi(int sign);
StateVector bell_psi(int sign);
}  // namespace example1

namespace example2 {
inline constexpr int kDefaultDimensionCap = 1024;
/// |Lambda_j> = |j-1>^{(d-1)}, j = 1..d
StateVector lambda(int d, int j);
/// |Omega_j>: factors ordered by increasing l with the excluded l skipped.
StateVector omega(int d, int j);
int total_dimension(int d);
double normalization(int d);  // d^{d-1} - 2(d-1)
}  // namespace example2

ExampleFixtures build_example1();
ExampleFixtures build_example2(int d, int dimension_cap = example2::kDefaultDimensionCap);

Ensemble build_two_pure(const StateVector& psi1, const StateVector& psi2, double eta);

}  // namespace udbound
