#include "udbound/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace udbound {

DimVector::DimVector(std::initializer_list<int> dims) : DimVector(std::vector<int>(dims)) {}

DimVector::DimVector(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error("dimension vector must have at least one site");
  total_ = 1;
  for (int d : dims_) {
    if (d <= 0) throw Error("local dimensions must be positive");
    total_ *= d;
  }
}

DimVector DimVector::single(int total) {
  if (total == 0) {
    // empty space, produced by compressions onto an empty basis
    DimVector out;
    out.dims_ = {0};
    out.total_ = 0;
    return out;
  }
  return DimVector(std::vector<int>{total});
}

std::vector<int> DimVector::digits(int index) const {
  std::vector<int> out(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    out[k] = index % dims_[k];
    index /= dims_[k];
  }
  return out;
}

int DimVector::index(std::span<const int> digits) const {
  if (digits.size() != dims_.size()) throw Error("digit count does not match site count");
  int idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims_[k]) throw Error("basis digit out of range");
    idx = idx * dims_[k] + digits[k];
  }
  return idx;
}

DimVector DimVector::concat(const DimVector& other) const {
  std::vector<int> out = dims_;
  out.insert(out.end(), other.dims_.begin(), other.dims_.end());
  return DimVector(std::move(out));
}

DimVector DimVector::subset(std::span<const std::size_t> sites) const {
  std::vector<int> out;
  for (std::size_t s : sites) out.push_back(dims_.at(s));
  return DimVector(std::move(out));
}

std::string DimVector::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) os << 'x';
    os << dims_[k];
  }
  return os.str();
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

HermitianOperator::HermitianOperator(Matrix matrix, DimVector dims, double max_deviation)
    : dims_(std::move(dims)) {
  if (matrix.rows() != matrix.cols()) throw Error("operator matrix must be square");
  if (matrix.rows() != dims_.total()) {
    throw Error("operator side " + std::to_string(matrix.rows()) +
                " does not match dims " + dims_.str());
  }
  input_deviation_ = max_abs(matrix - matrix.adjoint());
  if (input_deviation_ > max_deviation) {
    std::ostringstream os;
    os << "hermiticity deviation " << input_deviation_ << " exceeds " << max_deviation;
    throw Error(os.str());
  }
  matrix_ = (matrix + matrix.adjoint()) / 2.0;
}

HermitianOperator HermitianOperator::zero(const DimVector& dims) {
  return HermitianOperator(Matrix::Zero(dims.total(), dims.total()), dims);
}

HermitianOperator HermitianOperator::identity(const DimVector& dims) {
  return HermitianOperator(Matrix::Identity(dims.total(), dims.total()), dims);
}

double HermitianOperator::trace() const { return matrix_.trace().real(); }

double HermitianOperator::norm() const {
  if (matrix_.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (!(dims_ == other.dims_)) throw Error("dimension mismatch in operator sum");
  return HermitianOperator(matrix_ + other.matrix_, dims_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (!(dims_ == other.dims_)) throw Error("dimension mismatch in operator difference");
  return HermitianOperator(matrix_ - other.matrix_, dims_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return HermitianOperator(matrix_ * scale, dims_);
}

StateVector::StateVector(Vector amplitudes, DimVector dims, bool normalize)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (amplitudes_.size() != dims_.total()) throw Error("state length does not match dims");
  if (normalize) {
    const double n = amplitudes_.norm();
    if (n == 0.0) throw Error("cannot normalize the zero vector");
    amplitudes_ /= n;
  }
}

StateVector StateVector::basis(const DimVector& dims, std::span<const int> digits) {
  Vector v = Vector::Zero(dims.total());
  v(dims.index(digits)) = 1.0;
  return StateVector(std::move(v), dims, false);
}

StateVector StateVector::basis(int dim, int k) {
  const int digit[1] = {k};
  return basis(DimVector::single(dim), digit);
}

HermitianOperator StateVector::projector() const {
  return HermitianOperator(amplitudes_ * amplitudes_.adjoint(), dims_);
}

StateVector StateVector::operator+(const StateVector& other) const {
  if (!(dims_ == other.dims_)) throw Error("dimension mismatch in state sum");
  return StateVector(amplitudes_ + other.amplitudes_, dims_, false);
}

StateVector StateVector::operator*(Complex scale) const {
  return StateVector(amplitudes_ * scale, dims_, false);
}

Complex inner(const StateVector& a, const StateVector& b) {
  return a.amplitudes().dot(b.amplitudes());  // conjugates the left argument
}

Matrix outer(const StateVector& a, const StateVector& b) {
  return a.amplitudes() * b.amplitudes().adjoint();
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void check_sites(const DimVector& dims, std::span<const std::size_t> sites) {
  std::vector<bool> seen(dims.sites(), false);
  for (std::size_t s : sites) {
    if (s >= dims.sites()) throw Error("site index " + std::to_string(s) + " out of range");
    if (seen[s]) throw Error("site index " + std::to_string(s) + " repeated");
    seen[s] = true;
  }
}

}  // namespace

HermitianOperator tensor(std::span<const HermitianOperator> factors) {
  if (factors.empty()) throw Error("no factors");
  Matrix m = factors[0].matrix();
  DimVector dims = factors[0].dims();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    m = kron(m, factors[k].matrix());
    dims = dims.concat(factors[k].dims());
  }
  return HermitianOperator(std::move(m), std::move(dims));
}

HermitianOperator tensor(std::initializer_list<HermitianOperator> factors) {
  return tensor(std::span<const HermitianOperator>(factors.begin(), factors.size()));
}

StateVector tensor(std::span<const StateVector> factors) {
  if (factors.empty()) throw Error("no factors");
  Matrix v = factors[0].amplitudes();
  DimVector dims = factors[0].dims();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    v = kron(v, factors[k].amplitudes());
    dims = dims.concat(factors[k].dims());
  }
  return StateVector(v.col(0), std::move(dims), false);
}

StateVector tensor(std::initializer_list<StateVector> factors) {
  return tensor(std::span<const StateVector>(factors.begin(), factors.size()));
}

Matrix partial_trace(const Matrix& a, const DimVector& dims,
                     std::span<const std::size_t> sites_to_trace) {
  if (a.rows() != dims.total() || a.cols() != dims.total())
    throw Error("matrix does not match dims " + dims.str());
  check_sites(dims, sites_to_trace);

  std::vector<bool> traced(dims.sites(), false);
  for (std::size_t s : sites_to_trace) traced[s] = true;
  std::vector<std::size_t> kept_sites, traced_sites;
  for (std::size_t k = 0; k < dims.sites(); ++k) (traced[k] ? traced_sites : kept_sites).push_back(k);

  int kept_total = 1, traced_total = 1;
  for (std::size_t k : kept_sites) kept_total *= dims[k];
  for (std::size_t k : traced_sites) traced_total *= dims[k];

  // full index = sum over sites of digit * stride
  std::vector<int> stride(dims.sites());
  int s = 1;
  for (std::size_t k = dims.sites(); k-- > 0;) {
    stride[k] = s;
    s *= dims[k];
  }
  auto offsets = [&](const std::vector<std::size_t>& group, int count) {
    std::vector<int> out(count);
    for (int c = 0; c < count; ++c) {
      int rem = c, off = 0;
      for (std::size_t g = group.size(); g-- > 0;) {
        const int d = dims[group[g]];
        off += (rem % d) * stride[group[g]];
        rem /= d;
      }
      out[c] = off;
    }
    return out;
  };
  const std::vector<int> kept_off = offsets(kept_sites, kept_total);
  const std::vector<int> traced_off = offsets(traced_sites, traced_total);

  Matrix out = Matrix::Zero(kept_total, kept_total);
  for (int r = 0; r < kept_total; ++r)
    for (int c = 0; c < kept_total; ++c) {
      Complex acc = 0.0;
      for (int t = 0; t < traced_total; ++t) acc += a(kept_off[r] + traced_off[t], kept_off[c] + traced_off[t]);
      out(r, c) = acc;
    }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& a,
                                std::span<const std::size_t> sites_to_trace) {
  Matrix m = partial_trace(a.matrix(), a.dims(), sites_to_trace);
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < a.dims().sites(); ++k)
    if (std::find(sites_to_trace.begin(), sites_to_trace.end(), k) == sites_to_trace.end())
      kept.push_back(k);
  DimVector dims = kept.empty() ? DimVector::single(1) : a.dims().subset(kept);
  return HermitianOperator(std::move(m), std::move(dims));
}

Matrix partial_transpose(const Matrix& a, const DimVector& dims,
                         std::span<const std::size_t> sites) {
  if (a.rows() != dims.total() || a.cols() != dims.total())
    throw Error("matrix does not match dims " + dims.str());
  check_sites(dims, sites);
  const int n = dims.total();
  Matrix out(n, n);
  std::vector<std::vector<int>> digits(n);
  for (int i = 0; i < n; ++i) digits[i] = dims.digits(i);
  std::vector<int> rd, cd;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      rd = digits[r];
      cd = digits[c];
      for (std::size_t s : sites) std::swap(rd[s], cd[s]);
      out(dims.index(rd), dims.index(cd)) = a(r, c);
    }
  return out;
}

Spectrum eig_hermitian(const Matrix& a) {
  const Matrix sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Eigen::Index n = sym.rows();
  Spectrum out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    auto col = out.vectors.col(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-12) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = std::abs(col(i));
        break;
      }
    }
  }
  return out;
}

Spectrum eig_hermitian(const HermitianOperator& a) { return eig_hermitian(a.matrix()); }

double min_eigenvalue(const HermitianOperator& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const HermitianOperator& a, double tol) { return min_eigenvalue(a) >= -tol; }

namespace {

Matrix columns_above(const Spectrum& sp, double threshold, bool above) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < sp.values.size(); ++j)
    if ((sp.values(j) > threshold) == above) keep.push_back(j);
  Matrix out(sp.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(c) = sp.vectors.col(keep[c]);
  return out;
}

void require_psd_support(const Spectrum& sp, double rank_tol) {
  if (sp.values.size() > 0 && sp.values(sp.values.size() - 1) < -rank_tol)
    throw Error("support undefined for indefinite operator");
}

}  // namespace

Matrix support_basis(const HermitianOperator& a, double rank_tol) {
  const Spectrum sp = eig_hermitian(a);
  require_psd_support(sp, rank_tol);
  return columns_above(sp, rank_tol, true);
}

Matrix kernel_basis(const HermitianOperator& a, double rank_tol) {
  const Spectrum sp = eig_hermitian(a);
  require_psd_support(sp, rank_tol);
  return columns_above(sp, rank_tol, false);
}

HermitianOperator support_projector(const HermitianOperator& a, double rank_tol) {
  const Matrix b = support_basis(a, rank_tol);
  return HermitianOperator(b * b.adjoint(), a.dims());
}

double orthonormality_residual(const Matrix& basis) {
  if (basis.cols() == 0) return 0.0;
  return max_abs(basis.adjoint() * basis - Matrix::Identity(basis.cols(), basis.cols()));
}

HermitianOperator compress(const HermitianOperator& a, const Matrix& basis) {
  if (basis.rows() != a.size()) throw Error("basis length does not match operator side");
  const double res = orthonormality_residual(basis);
  if (res > tolerance::kOrthonormal) {
    std::ostringstream os;
    os << "basis not orthonormal (residual " << res << ")";
    throw Error(os.str());
  }
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return HermitianOperator(Matrix(0, 0), DimVector::single(0));
  return HermitianOperator(basis.adjoint() * a.matrix() * basis, DimVector::single(k));
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.size() != b.size()) throw Error("dimension mismatch in trace inner product");
  // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B
  return (a.matrix().cwiseProduct(b.matrix().conjugate())).sum().real();
}

}  // namespace udbound
