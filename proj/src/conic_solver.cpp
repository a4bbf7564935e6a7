#include "udbound/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace udbound {

SparseOperator to_sparse(const Matrix& m, double prune) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > prune) trips.emplace_back(r, c, m(r, c));
  SparseOperator out(m.rows(), m.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

std::size_t ConicProgram::add_block(int side) {
  if (side <= 0) throw Error("block side must be positive");
  block_sides.push_back(side);
  objective.emplace_back();
  return block_sides.size() - 1;
}

void ConicProgram::set_objective(std::size_t block, SparseOperator coeff) {
  objective.at(block) = std::move(coeff);
}

void ConicProgram::validate() const {
  if (objective.size() != block_sides.size()) throw Error("objective count does not match block count");
  auto check = [&](std::size_t b, const SparseOperator& c, const std::string& what) {
    if (b >= block_sides.size()) throw Error(what + ": block index out of range");
    if (c.rows() == 0 && c.cols() == 0) return;
    if (c.rows() != block_sides[b] || c.cols() != block_sides[b]) throw Error(what + ": coefficient side mismatch");
    const SparseOperator dev = c - SparseOperator(c.adjoint());
    for (int k = 0; k < dev.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(dev, k); it; ++it)
        if (std::abs(it.value()) > tolerance::kHermitianInput) throw Error(what + ": coefficient not Hermitian");
  };
  for (std::size_t b = 0; b < objective.size(); ++b) check(b, objective[b], "objective");
  for (std::size_t k = 0; k < constraints.size(); ++k)
    for (const auto& t : constraints[k].terms) check(t.block, t.coeff, "constraint " + std::to_string(k));
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::max_iterations:
      return "max_iterations";
    default:
      return "infeasible";
  }
}

std::vector<SparseOperator> hermitian_basis(int n) {
  std::vector<SparseOperator> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < n; ++p) {
    SparseOperator e(n, n);
    e.insert(p, p) = 1.0;
    out.push_back(std::move(e));
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      SparseOperator re(n, n), im(n, n);
      re.insert(p, q) = s;
      re.insert(q, p) = s;
      im.insert(p, q) = Complex(0.0, s);
      im.insert(q, p) = Complex(0.0, -s);
      out.push_back(std::move(re));
      out.push_back(std::move(im));
    }
  return out;
}

namespace {

using SparseReal = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

// Real isometric coordinates of Hermitian blocks:
// diagonal entries, then sqrt2*Re and sqrt2*Im of each strict upper entry.
struct Layout {
  std::vector<int> sides;
  std::vector<Eigen::Index> offsets;
  Eigen::Index total = 0;

  explicit Layout(std::vector<int> s) : sides(std::move(s)) {
    for (int n : sides) {
      offsets.push_back(total);
      total += static_cast<Eigen::Index>(n) * n;
    }
  }

  static Eigen::Index pair_index(int n, int p, int q) {
    return static_cast<Eigen::Index>(p) * n - static_cast<Eigen::Index>(p) * (p + 1) / 2 + (q - p - 1);
  }

  // append coordinates of Re Tr(C X_b) as triplets in row `row`
  void append(std::vector<Eigen::Triplet<double>>& trips, Eigen::Index row, std::size_t b,
              const SparseOperator& c, double scale) const {
    const int n = sides[b];
    const Eigen::Index off = offsets[b];
    const double r2 = std::sqrt(2.0);
    for (int k = 0; k < c.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(c, k); it; ++it) {
        const int r = static_cast<int>(it.row()), col = static_cast<int>(it.col());
        const Complex v = it.value() * scale;
        if (r == col) {
          trips.emplace_back(row, off + r, v.real());
        } else {
          const int p = std::min(r, col), q = std::max(r, col);
          const Complex u = r < col ? v : std::conj(v);
          const Eigen::Index base = off + n + 2 * pair_index(n, p, q);
          trips.emplace_back(row, base, r2 * u.real() / 2.0);
          trips.emplace_back(row, base + 1, r2 * u.imag() / 2.0);
        }
      }
  }

  Matrix unpack(const VectorXd& x, std::size_t b) const {
    const int n = sides[b];
    const Eigen::Index off = offsets[b];
    Matrix m(n, n);
    const double s = 1.0 / std::sqrt(2.0);
    for (int p = 0; p < n; ++p) m(p, p) = x(off + p);
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const Eigen::Index base = off + n + 2 * pair_index(n, p, q);
        m(p, q) = Complex(x(base), x(base + 1)) * s;
        m(q, p) = std::conj(m(p, q));
      }
    return m;
  }

  void pack(const Matrix& m, std::size_t b, VectorXd& x) const {
    const int n = sides[b];
    const Eigen::Index off = offsets[b];
    const double r2 = std::sqrt(2.0);
    for (int p = 0; p < n; ++p) x(off + p) = m(p, p).real();
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const Eigen::Index base = off + n + 2 * pair_index(n, p, q);
        const Complex v = (m(p, q) + std::conj(m(q, p))) / 2.0;
        x(base) = r2 * v.real();
        x(base + 1) = r2 * v.imag();
      }
  }
};

// v -> (positive part, negative part negated), both PSD
void split_psd(const Layout& layout, const VectorXd& v, VectorXd& pos, VectorXd& neg) {
  for (std::size_t b = 0; b < layout.sides.size(); ++b) {
    const Eigen::Index off = layout.offsets[b];
    if (layout.sides[b] == 1) {
      pos(off) = std::max(v(off), 0.0);
      neg(off) = std::max(-v(off), 0.0);
      continue;
    }
    const Matrix m = layout.unpack(v, b);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Matrix& u = es.eigenvectors();
    const Matrix p = u * lam.cwiseMax(0.0).asDiagonal() * u.adjoint();
    layout.pack(p, b, pos);
    layout.pack(p - m, b, neg);
  }
}

double min_block_eigenvalue(const Layout& layout, const VectorXd& v) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < layout.sides.size(); ++b) {
    if (layout.sides[b] == 1) {
      lo = std::min(lo, v(layout.offsets[b]));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(layout.unpack(v, b), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverOptions& options) {
  program.validate();
  if (!(options.tol > 0.0)) throw Error("solver tolerance must be positive");
  if (options.max_iter <= 0) throw Error("max_iter must be positive");

  const std::size_t user_blocks = program.block_sides.size();
  std::vector<int> sides = program.block_sides;
  std::vector<std::size_t> slack_block(program.constraints.size(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < program.constraints.size(); ++k) {
    if (program.constraints[k].relation != Relation::equal) {
      slack_block[k] = sides.size();
      sides.push_back(1);
    }
  }
  const Layout layout(sides);
  const Eigen::Index m = static_cast<Eigen::Index>(program.constraints.size());
  const Eigen::Index n = layout.total;

  std::vector<Eigen::Triplet<double>> trips;
  VectorXd b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& con = program.constraints[k];
    for (const auto& t : con.terms)
      if (t.coeff.nonZeros() > 0) layout.append(trips, k, t.block, t.coeff, 1.0);
    if (con.relation != Relation::equal)
      trips.emplace_back(k, layout.offsets[slack_block[k]], con.relation == Relation::greater_equal ? -1.0 : 1.0);
    b(k) = con.rhs;
  }
  SparseReal a(m, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.prune(0.0);

  const double sense_sign = program.sense == Sense::minimize ? 1.0 : -1.0;
  VectorXd c = VectorXd::Zero(n);
  {
    std::vector<Eigen::Triplet<double>> ct;
    for (std::size_t blk = 0; blk < user_blocks; ++blk)
      if (program.objective[blk].nonZeros() > 0) layout.append(ct, 0, blk, program.objective[blk], sense_sign);
    for (const auto& t : ct) c(t.col()) += t.value();
  }

  ConicSolution out;
  out.seed = options.seed;

  VectorXd x = VectorXd::Zero(n), s = VectorXd::Zero(n), y = VectorXd::Zero(m);
  VectorXd v(n), neg(n);

  Eigen::SimplicialLDLT<SparseReal> normal;
  const SparseReal aat = a * SparseReal(a.transpose());
  if (m > 0) {
    normal.compute(aat);
    if (normal.info() != Eigen::Success) throw Error("normal equations could not be factorized");
    const VectorXd diag = normal.vectorD();
    const double dmax = diag.cwiseAbs().maxCoeff();
    if (diag.minCoeff() <= 1e-13 * std::max(1.0, dmax)) throw Error("constraints are linearly dependent");
  }

  const double bnorm = b.norm(), cnorm = c.norm();
  double mu = options.penalty;
  int streak_primal = 0, streak_dual = 0;
  // consecutive checks on which the iterate differences form a Farkas ray
  int streak_ray = 0;
  constexpr int kRayChecks = 5;
  const double ray_tol = std::sqrt(options.tol);
  VectorXd x_check = x, y_check = y;

  double best_score = std::numeric_limits<double>::infinity();
  VectorXd best_x = x, best_s = s, best_y = y;
  Residuals best_res;
  Residuals last_res;
  SolveStatus status = SolveStatus::max_iterations;

  int iter = 0;
  for (iter = 1; iter <= options.max_iter; ++iter) {
    if (m > 0) y = normal.solve(mu * (b - a * x) + a * (c - s));
    v = c - a.transpose() * y - mu * x;
    VectorXd x_old = x;
    split_psd(layout, v, s, neg);
    x = neg / mu;

    if (iter % options.check_every != 0 && iter != options.max_iter) continue;

    Residuals res;
    res.primal = (a * x - b).norm() / (1.0 + bnorm);
    res.dual = (mu * (x - x_old)).norm() / (1.0 + cnorm);
    const double pobj = c.dot(x), dobj = b.dot(y);
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double score = std::max({res.primal, res.dual, res.gap});
    last_res = res;
    if (score < best_score) {
      best_score = score;
      best_x = x;
      best_s = s;
      best_y = y;
      best_res = res;
    }
    if (score <= options.tol) {
      status = SolveStatus::optimal;
      break;
    }
    if (!std::isfinite(score) || y.norm() > 1e10 * (1.0 + cnorm) || x.norm() > 1e10 * (1.0 + bnorm)) {
      status = SolveStatus::infeasible;
      break;
    }
    {
      // primal infeasible: b.dy > 0 with -A^T dy PSD; dual infeasible: A dx = 0, dx PSD, c.dx < 0
      bool ray = false;
      const VectorXd dy = y - y_check;
      const double ny = dy.norm();
      if (m > 0 && ny > 0.0 && b.dot(dy) / ny > ray_tol &&
          min_block_eigenvalue(layout, -(a.transpose() * dy) / ny) >= -options.tol)
        ray = true;
      const VectorXd dx = x - x_check;
      const double nx = dx.norm();
      if (!ray && nx > 0.0 && c.dot(dx) / nx < -ray_tol && (a * dx).norm() / nx <= options.tol &&
          min_block_eigenvalue(layout, dx / nx) >= -options.tol)
        ray = true;
      streak_ray = ray ? streak_ray + 1 : 0;
      x_check = x;
      y_check = y;
      if (streak_ray >= kRayChecks) {
        status = SolveStatus::infeasible;
        break;
      }
    }
    if (options.adapt_penalty) {
      if (res.primal > 5.0 * res.dual) {
        ++streak_primal;
        streak_dual = 0;
      } else if (res.dual > 5.0 * res.primal) {
        ++streak_dual;
        streak_primal = 0;
      } else {
        streak_primal = streak_dual = 0;
      }
      if (streak_primal >= 5) {
        mu = std::min(mu * 2.0, 1e6);
        streak_primal = 0;
      } else if (streak_dual >= 5) {
        mu = std::max(mu / 2.0, 1e-6);
        streak_dual = 0;
      }
    }
  }

  if (status != SolveStatus::optimal) {
    x = best_x;
    s = best_s;
    y = best_y;
  }
  out.status = status;
  out.iterations = std::min(iter, options.max_iter);
  out.residuals = status == SolveStatus::optimal ? last_res : best_res;
  out.final_penalty = mu;
  out.value = sense_sign * c.dot(x);
  out.dual_value = sense_sign * b.dot(y);
  out.multipliers = sense_sign * y;
  for (std::size_t blk = 0; blk < user_blocks; ++blk) {
    out.primal.push_back(layout.unpack(x, blk));
    out.dual_slack.push_back(layout.unpack(s, blk));
  }
  return out;
}

}  // namespace udbound
