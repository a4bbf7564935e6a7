#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "udbound/cone.hpp"
#include "udbound/conic_solver.hpp"
#include "udbound/ensemble.hpp"

namespace udbound {

/// Outcome of one of the discrimination programs.
struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  double value = 0.0;
  Measurement measurement;        // recovered POVM, M_0 first
  HermitianOperator certificate;  // K for the global program, H for the separable bound
  Residuals residuals;
  int iterations = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  /// 1-based indices of states whose no-error cone is {0}; never identified.
  std::vector<std::size_t> never_identified;
};

/// p_G: maximize sum eta_i Tr(rho_i M_i) with M_i = B_i X_i B_i^dagger on the
/// no-error subspaces and M_0 = I - sum M_i PSD. The certificate K is read
/// from the multipliers of the completeness constraints.
SolveReport compute_p_global(const Ensemble& e, const SolverOptions& options = {});

struct DualKResult {
  HermitianOperator K;
  double value = 0.0;
  SolveReport report;  // measurement recovered from the multipliers
};

/// min Tr K s.t. K PSD and B_i^dagger (K - eta_i rho_i) B_i PSD for every i.
DualKResult compute_dual_K(const Ensemble& e, const SolverOptions& options = {});

/// min Tr H s.t. H PSD and Tr[(H - eta_i rho_i) g] >= 0 for every generator g
/// of cone i. Restricting H to the PSD cone only shrinks the feasible set of
/// the SEP* program, so when every cone generates exactly SEP_i the value is
/// an upper bound on q_SEP (and hence on p_L); a verified complementary
/// certificate makes it equal. The multipliers give a separable measurement
/// M_i = sum lambda_g g returned with product decompositions when available.
SolveReport compute_q_sep_bound(const Ensemble& e, const std::vector<ConeGenerators>& cones,
                                const SolverOptions& options = {});

/// Clip eigenvalues in [-tol, 0) of each conclusive element, rescale so the
/// conclusive sum is at most I, and set M_0 = I - sum M_i.
Measurement round_measurement(const DimVector& dims, std::vector<Matrix> conclusive, double tol);

}  // namespace udbound
