#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "udbound/operator.hpp"

namespace udbound {

using SparseOperator = Eigen::SparseMatrix<Complex>;

SparseOperator to_sparse(const Matrix& m, double prune = 0.0);

struct BlockTerm {
  std::size_t block = 0;
  SparseOperator coeff;  // Hermitian, side equal to the block side
};

enum class Relation { equal, greater_equal, less_equal };

/// sum_b Re Tr(coeff_b X_b)  (relation)  rhs
struct AffineConstraint {
  std::vector<BlockTerm> terms;
  Relation relation = Relation::equal;
  double rhs = 0.0;
};

enum class Sense { minimize, maximize };

/// Linear program over a product of Hermitian PSD blocks.
struct ConicProgram {
  std::vector<int> block_sides;
  std::vector<SparseOperator> objective;  // per block; empty matrix means zero
  std::vector<AffineConstraint> constraints;
  Sense sense = Sense::minimize;

  std::size_t add_block(int side);
  void set_objective(std::size_t block, SparseOperator coeff);
  void add_constraint(AffineConstraint c) { constraints.push_back(std::move(c)); }
  /// Throws on inconsistent sides or non-Hermitian coefficients.
  void validate() const;
};

enum class SolveStatus { optimal, max_iterations, infeasible };
std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-7;
  int max_iter = 200000;
  double penalty = 1.0;
  bool adapt_penalty = true;
  int check_every = 10;
  std::uint64_t seed = 0;
};

struct Residuals {
  double primal = 0.0;  // ||A(X) - b|| / (1 + ||b||)
  double dual = 0.0;    // ||A*(y) + S - C|| / (1 + ||C||)
  double gap = 0.0;     // |<C,X> - b.y| / (1 + |<C,X>| + |b.y|)
};

/// Optimal primal blocks, constraint multipliers and dual slacks.
///
/// Multipliers follow the sense of the program: for minimize they solve
/// max b.y s.t. C - sum y_k A_k is PSD, for maximize they solve
/// min b.y s.t. sum y_k A_k - C is PSD. In both cases b.y equals the value
/// at optimality. `dual_slack` holds the PSD slack of that dual per block.
struct ConicSolution {
  SolveStatus status = SolveStatus::max_iterations;
  double value = 0.0;
  double dual_value = 0.0;
  std::vector<Matrix> primal;
  std::vector<Matrix> dual_slack;
  Eigen::VectorXd multipliers;
  Residuals residuals;
  int iterations = 0;
  double final_penalty = 0.0;
  std::uint64_t seed = 0;
};

/// Alternating-direction augmented Lagrangian on the dual: each sweep solves
/// the multiplier normal equations, projects every block onto the PSD cone
/// by eigenvalue clipping and updates the primal blocks. Inequalities become
/// equalities with 1x1 slack blocks. Deterministic for a given program.
ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});

/// Orthonormal basis of Hermitian n x n matrices under Re Tr(AB):
/// diagonal units, then (E_pq + E_qp)/sqrt2 and i(E_pq - E_qp)/sqrt2 for p < q.
std::vector<SparseOperator> hermitian_basis(int n);

}  // namespace udbound
