#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udbound/ensemble.hpp"
#include "udbound/operator.hpp"

namespace udbound {

/// Finite list of PSD generators of a cone, optionally with site-wise
/// product factors for each generator.
struct ConeGenerators {
  DimVector dims;
  std::vector<HermitianOperator> generators;
  std::vector<std::optional<std::vector<HermitianOperator>>> product_form;

  std::size_t size() const { return generators.size(); }
  void add(HermitianOperator g);
  void add_product(std::vector<HermitianOperator> factors);
};

/// Checks the ConeGenerators invariants (PSD generators, factors matching).
ValidationReport validate_cone(const ConeGenerators& cone, double tol = 1e-10);

/// Orthonormal basis of the intersection of ker rho_j over j != i (0-based i).
/// Pos_i is the PSD cone on this subspace; an empty basis means Pos_i = {0}.
Matrix pos_support(const Ensemble& e, std::size_t i, double rank_tol = tolerance::kRank);

struct DualTest {
  bool member = false;
  /// Smallest eigenvalue of the compression, or the worst normalized pairing.
  double residual = 0.0;
  std::size_t worst = 0;
};

DualTest in_pos_dual(const HermitianOperator& a, const Ensemble& e, std::size_t i,
                     double tol = tolerance::kPsd);
DualTest in_pos_dual(const HermitianOperator& a, const Matrix& support, double tol = tolerance::kPsd);

/// Tr(A g) >= -tol * ||g|| for every generator.
DualTest in_dual_of_generators(const HermitianOperator& a, const ConeGenerators& cone,
                               double tol = tolerance::kPsd);

enum class ExampleKind { example1, example2 };

/// The explicit generator lists of SEP_i for the two worked examples (0-based i).
ConeGenerators sep_cone_generators_example(const Ensemble& e, ExampleKind which, std::size_t i);
std::vector<ConeGenerators> sep_cones_example(const Ensemble& e, ExampleKind which);

/// A bipartition given by the sites on one side; the partial transpose is
/// taken over these sites.
struct Cut {
  std::vector<std::size_t> sites;
};

struct PptResult {
  bool ppt = false;
  double min_eigenvalue = 0.0;
};

PptResult ppt_check(const HermitianOperator& a, const Cut& cut, double tol = tolerance::kPsd);
/// Every nontrivial bipartition (the cut containing site 0 is fixed on one side).
std::vector<Cut> all_cuts(const DimVector& dims);

enum class Separability { certified_separable, certified_entangled, unknown };

/// Certified-yes needs an explicit decomposition; certified-no needs a PPT violation.
Separability classify_separability(const HermitianOperator& a,
                                   const std::optional<SeparableDecomposition>& decomposition,
                                   double tol = 1e-9);

bool is_product_state(const StateVector& psi, double tol = tolerance::kRank);

enum class RayVerdict { unique, not_unique, inconclusive };
std::string to_string(RayVerdict v);

struct RayCertificate {
  RayVerdict verdict = RayVerdict::inconclusive;
  double cross_trace_residual = 0.0;  // largest entry over all proper partial traces of |v1><v2|
  bool v2_product = false;
  std::size_t samples_checked = 0;
  std::size_t samples_product = 0;  // sampled superpositions that looked product
};

/// Decides whether v1 spans the only product ray of span{v1, v2}.
RayCertificate certify_unique_product_ray(const StateVector& v1, const StateVector& v2,
                                          double tol = 1e-9, std::size_t samples = 10000,
                                          std::uint64_t seed = 0);

}  // namespace udbound
