#pragma once

#include <optional>
#include <string>
#include <vector>

#include "udbound/cone.hpp"
#include "udbound/ensemble.hpp"
#include "udbound/programs.hpp"

namespace udbound {

struct ConditionResidual {
  std::string id;  // e.g. "7b", "14a", "16b.2"
  double residual = 0.0;
  bool passed = false;
  std::string note;
};

struct VerificationReport {
  bool pass = false;
  double tolerance = 0.0;
  std::vector<ConditionResidual> conditions;
  /// Certified optimum when the verdict is pass.
  std::optional<double> value;
  std::vector<std::string> notes;

  void add(std::string id, double residual, std::string note = {});
  /// Marks a condition as neither passed nor failed (e.g. SEP* membership unknown).
  void add_unverified(std::string id, double residual, std::string note);
  void finalize();
  std::vector<std::string> failing_ids() const;
  const ConditionResidual* find(const std::string& id) const;
};

/// |Tr(rho_i M_j)| for i != j, i, j >= 1.
VerificationReport check_no_error(const Ensemble& e, const Measurement& m, double tol = 1e-8);

/// Optimality of an unambiguous measurement with certificate K:
/// 7a K PSD, 7b Tr(M_0 K) = 0, 7c K - eta_i rho_i in Pos_i*, 7d Tr[M_i(K - eta_i rho_i)] = 0.
VerificationReport verify_prop1(const Ensemble& e, const Measurement& m, const HermitianOperator& K,
                                double tol = 1e-8);

/// Tightness of the separable bound with certificate H:
/// 14a H in SEP* (via PSD), 14b H - eta_i rho_i in the dual of cone i,
/// 16a Tr(M_0 H) = 0, 16b Tr[M_i(H - eta_i rho_i)] = 0.
VerificationReport verify_thm3(const Ensemble& e, const Measurement& m, const HermitianOperator& H,
                               const std::vector<ConeGenerators>& cones, double tol = 1e-8);

/// verify_thm3 plus the product protocol: local POVMs complete, and their
/// composition reproduces every M_i. Pass certifies p_L = Tr H.
VerificationReport verify_cor3_equality(const Ensemble& e, const Measurement& m, const HermitianOperator& H,
                                        const std::vector<ConeGenerators>& cones, double tol = 1e-8);

struct NlweWitness {
  bool witnessed = false;
  double p_global = 0.0;
  double q_bound = 0.0;
  SolveReport global;
  SolveReport separable;
};

/// witnessed = q_bound < p_G - 2 tol.
NlweWitness nlwe_witness(const Ensemble& e, const std::vector<ConeGenerators>& cones,
                         const SolverOptions& options = {});

}  // namespace udbound
