#include "udbound/programs.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace udbound {

namespace {

constexpr double kPrune = 1e-14;

Matrix clip_psd(const Matrix& m) {
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().adjoint();
}

Matrix from_basis(const std::vector<SparseOperator>& basis, const Eigen::VectorXd& coeffs, Eigen::Index offset,
                  int side) {
  Matrix out = Matrix::Zero(side, side);
  for (std::size_t k = 0; k < basis.size(); ++k) out += coeffs(offset + static_cast<Eigen::Index>(k)) * Matrix(basis[k]);
  return out;
}

// B^dagger F B for a basis element F with at most two nonzero entries
Matrix compress_basis_element(const SparseOperator& f, const Matrix& b) {
  Matrix out = Matrix::Zero(b.cols(), b.cols());
  for (int k = 0; k < f.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(f, k); it; ++it)
      out += it.value() * b.row(it.row()).adjoint() * b.row(it.col());
  return out;
}

struct Rounded {
  Measurement measurement;
  double scale = 1.0;
};

Rounded round_impl(const DimVector& dims, std::vector<Matrix> conclusive, double tol) {
  const int total = dims.total();
  Matrix sum = Matrix::Zero(total, total);
  for (auto& m : conclusive) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index k = 0; k < lam.size(); ++k)
      if (lam(k) < 0.0) lam(k) = lam(k) >= -tol ? 0.0 : lam(k);
    m = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    sum += m;
  }
  Rounded out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
  if (top > 1.0) out.scale = 1.0 / top;
  Measurement& meas = out.measurement;
  meas.dims = dims;
  meas.elements.emplace_back(Matrix::Identity(total, total) - out.scale * sum, dims);
  for (auto& m : conclusive) meas.elements.emplace_back(out.scale * m, dims);
  meas.decompositions.assign(meas.elements.size(), std::nullopt);
  return out;
}

void check_ensemble(const Ensemble& e) {
  const ValidationReport r = validate_ensemble(e);
  if (!r.ok()) throw Error("invalid ensemble: " + r.str());
}

}  // namespace

Measurement round_measurement(const DimVector& dims, std::vector<Matrix> conclusive, double tol) {
  return round_impl(dims, std::move(conclusive), tol).measurement;
}

SolveReport compute_p_global(const Ensemble& e, const SolverOptions& options) {
  check_ensemble(e);
  const std::size_t n = e.size();
  const int total = e.dims.total();

  SolveReport report;
  std::vector<Matrix> supports(n);
  std::vector<std::size_t> block_of(n, static_cast<std::size_t>(-1));
  ConicProgram prog;
  prog.sense = Sense::maximize;
  for (std::size_t i = 0; i < n; ++i) {
    supports[i] = pos_support(e, i);
    if (supports[i].cols() == 0) {
      report.never_identified.push_back(i + 1);
      continue;
    }
    block_of[i] = prog.add_block(static_cast<int>(supports[i].cols()));
    const Matrix obj = e.prior(i) * supports[i].adjoint() * e.state(i).matrix() * supports[i];
    prog.set_objective(block_of[i], to_sparse((obj + obj.adjoint()) / 2.0, kPrune));
  }
  const std::size_t slack = prog.add_block(total);

  const std::vector<SparseOperator> basis = hermitian_basis(total);
  for (const SparseOperator& f : basis) {
    AffineConstraint c;
    c.relation = Relation::equal;
    c.rhs = f.diagonal().sum().real();
    c.terms.push_back({slack, f});
    for (std::size_t i = 0; i < n; ++i) {
      if (block_of[i] == static_cast<std::size_t>(-1)) continue;
      SparseOperator coeff = to_sparse(compress_basis_element(f, supports[i]), kPrune);
      if (coeff.nonZeros() > 0) c.terms.push_back({block_of[i], std::move(coeff)});
    }
    prog.add_constraint(std::move(c));
  }

  const ConicSolution sol = solve(prog, options);

  std::vector<Matrix> conclusive;
  for (std::size_t i = 0; i < n; ++i) {
    if (block_of[i] == static_cast<std::size_t>(-1)) {
      conclusive.push_back(Matrix::Zero(total, total));
      continue;
    }
    const Matrix x = clip_psd(sol.primal[block_of[i]]);
    conclusive.push_back(supports[i] * x * supports[i].adjoint());
  }
  report.measurement = round_measurement(e.dims, std::move(conclusive), options.tol);
  report.certificate = HermitianOperator(from_basis(basis, sol.multipliers, 0, total), e.dims);
  report.status = sol.status;
  report.value = sol.value;
  report.residuals = sol.residuals;
  report.iterations = sol.iterations;
  report.seed = sol.seed;
  report.tolerance = options.tol;
  return report;
}

DualKResult compute_dual_K(const Ensemble& e, const SolverOptions& options) {
  check_ensemble(e);
  const std::size_t n = e.size();
  const int total = e.dims.total();

  ConicProgram prog;
  prog.sense = Sense::minimize;
  const std::size_t kblock = prog.add_block(total);
  prog.set_objective(kblock, to_sparse(Matrix::Identity(total, total)));

  std::vector<Matrix> supports(n);
  std::vector<std::vector<SparseOperator>> bases(n);
  std::vector<Eigen::Index> first_row(n, 0);
  SolveReport report;
  for (std::size_t i = 0; i < n; ++i) {
    supports[i] = pos_support(e, i);
    const int side = static_cast<int>(supports[i].cols());
    first_row[i] = static_cast<Eigen::Index>(prog.constraints.size());
    if (side == 0) {
      report.never_identified.push_back(i + 1);
      continue;
    }
    const std::size_t zblock = prog.add_block(side);
    const Matrix target = e.prior(i) * supports[i].adjoint() * e.state(i).matrix() * supports[i];
    bases[i] = hermitian_basis(side);
    for (const SparseOperator& f : bases[i]) {
      AffineConstraint c;
      c.relation = Relation::equal;
      const Matrix fd(f);
      c.rhs = (fd * target).trace().real();
      const Matrix lifted = supports[i] * fd * supports[i].adjoint();
      c.terms.push_back({kblock, to_sparse((lifted + lifted.adjoint()) / 2.0, kPrune)});
      c.terms.push_back({zblock, -f});
      prog.add_constraint(std::move(c));
    }
  }

  const ConicSolution sol = solve(prog, options);

  std::vector<Matrix> conclusive;
  for (std::size_t i = 0; i < n; ++i) {
    if (bases[i].empty()) {
      conclusive.push_back(Matrix::Zero(total, total));
      continue;
    }
    const int side = static_cast<int>(supports[i].cols());
    const Matrix y = clip_psd(from_basis(bases[i], sol.multipliers, first_row[i], side));
    conclusive.push_back(supports[i] * y * supports[i].adjoint());
  }

  DualKResult out;
  out.K = HermitianOperator(sol.primal[kblock], e.dims);
  out.value = sol.value;
  report.status = sol.status;
  report.value = sol.value;
  report.measurement = round_measurement(e.dims, std::move(conclusive), options.tol);
  report.certificate = out.K;
  report.residuals = sol.residuals;
  report.iterations = sol.iterations;
  report.seed = sol.seed;
  report.tolerance = options.tol;
  out.report = std::move(report);
  return out;
}

SolveReport compute_q_sep_bound(const Ensemble& e, const std::vector<ConeGenerators>& cones,
                                const SolverOptions& options) {
  check_ensemble(e);
  const std::size_t n = e.size();
  if (cones.size() != n)
    throw Error("expected one cone per state (" + std::to_string(n) + "), got " + std::to_string(cones.size()));
  const int total = e.dims.total();

  ConicProgram prog;
  prog.sense = Sense::minimize;
  const std::size_t hblock = prog.add_block(total);
  prog.set_objective(hblock, to_sparse(Matrix::Identity(total, total)));

  struct Row {
    std::size_t cone, generator;
    double norm;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cones[i].dims == e.dims)) throw Error("cone " + std::to_string(i + 1) + " has mismatched dims");
    for (std::size_t g = 0; g < cones[i].size(); ++g) {
      const Matrix& gm = cones[i].generators[g].matrix();
      const double norm = gm.norm();
      if (norm == 0.0) continue;
      AffineConstraint c;
      c.relation = Relation::greater_equal;
      c.rhs = e.prior(i) * hs_inner(e.state(i), cones[i].generators[g]) / norm;
      c.terms.push_back({hblock, to_sparse(gm / norm, kPrune)});
      prog.add_constraint(std::move(c));
      rows.push_back({i, g, norm});
    }
  }

  const ConicSolution sol = solve(prog, options);

  std::vector<Matrix> conclusive(n, Matrix::Zero(total, total));
  std::vector<double> weights(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    weights[k] = std::max(sol.multipliers(static_cast<Eigen::Index>(k)), 0.0) / rows[k].norm;
    conclusive[rows[k].cone] += weights[k] * cones[rows[k].cone].generators[rows[k].generator].matrix();
  }
  Rounded rounded = round_impl(e.dims, std::move(conclusive), options.tol);

  // product decompositions of the conclusive elements, when every generator has one
  std::vector<bool> decomposable(n, true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < cones[i].size(); ++g)
      if (g >= cones[i].product_form.size() || !cones[i].product_form[g]) decomposable[i] = false;
  for (std::size_t i = 0; i < n; ++i)
    if (decomposable[i]) rounded.measurement.decompositions[i + 1] = SeparableDecomposition{};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t i = rows[k].cone;
    if (!decomposable[i] || weights[k] == 0.0) continue;
    ProductTerm term{*cones[i].product_form[rows[k].generator]};
    term.factors[0] = term.factors[0] * (weights[k] * rounded.scale);
    rounded.measurement.decompositions[i + 1]->terms.push_back(std::move(term));
  }
  // keep each decomposition consistent with the rounded element it annotates
  for (std::size_t i = 0; i < n; ++i)
    if (decomposable[i])
      rounded.measurement.elements[i + 1] = rounded.measurement.decompositions[i + 1]->reconstruct(e.dims);
  {
    Matrix sum = Matrix::Zero(total, total);
    for (std::size_t i = 1; i <= n; ++i) sum += rounded.measurement.elements[i].matrix();
    rounded.measurement.elements[0] = HermitianOperator(Matrix::Identity(total, total) - sum, e.dims);
  }

  SolveReport report;
  report.status = sol.status;
  report.value = sol.value;
  report.measurement = std::move(rounded.measurement);
  report.certificate = HermitianOperator(sol.primal[hblock], e.dims);
  report.residuals = sol.residuals;
  report.iterations = sol.iterations;
  report.seed = sol.seed;
  report.tolerance = options.tol;
  return report;
}

}  // namespace udbound
