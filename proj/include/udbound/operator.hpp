#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace udbound {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised for malformed input anywhere in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tolerance {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kHermitianInput = 1e-8;
inline constexpr double kPsd = 1e-9;
inline constexpr double kRank = 1e-9;
inline constexpr double kOrthonormal = 1e-10;
}  // namespace tolerance

/// Local dimensions d_1..d_m of a multipartite space. Site 0 is the
/// leftmost (slowest varying) Kronecker factor.
class DimVector {
 public:
  DimVector() = default;
  DimVector(std::initializer_list<int> dims);
  explicit DimVector(std::vector<int> dims);

  /// Single-site space of dimension D.
  static DimVector single(int total);

  std::size_t sites() const { return dims_.size(); }
  int operator[](std::size_t k) const { return dims_[k]; }
  int total() const { return total_; }
  const std::vector<int>& values() const { return dims_; }

  /// Mixed-radix digits of a composite basis index.
  std::vector<int> digits(int index) const;
  int index(std::span<const int> digits) const;

  DimVector concat(const DimVector& other) const;
  DimVector subset(std::span<const std::size_t> sites) const;

  bool operator==(const DimVector& other) const { return dims_ == other.dims_; }

  std::string str() const;

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

/// Dense complex Hermitian operator tagged with its multipartite dims.
/// Construction symmetrizes (A + A^dagger)/2; a raw deviation above
/// `max_deviation` is rejected.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  HermitianOperator(Matrix matrix, DimVector dims,
                    double max_deviation = tolerance::kHermitianInput);

  static HermitianOperator zero(const DimVector& dims);
  static HermitianOperator identity(const DimVector& dims);

  const Matrix& matrix() const { return matrix_; }
  const DimVector& dims() const { return dims_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  /// max |A - A^dagger| of the matrix handed to the constructor.
  double input_deviation() const { return input_deviation_; }

  double trace() const;
  /// Largest absolute singular value.
  double norm() const;

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;
  friend HermitianOperator operator*(double scale, const HermitianOperator& op) {
    return op * scale;
  }

 private:
  Matrix matrix_;
  DimVector dims_;
  double input_deviation_ = 0.0;
};

/// Pure state amplitudes on a multipartite space.
class StateVector {
 public:
  StateVector() = default;
  /// Normalizes unless `normalize` is false.
  StateVector(Vector amplitudes, DimVector dims, bool normalize = true);

  /// Computational basis state |digits>.
  static StateVector basis(const DimVector& dims, std::span<const int> digits);
  static StateVector basis(int dim, int k);

  const Vector& amplitudes() const { return amplitudes_; }
  const DimVector& dims() const { return dims_; }
  double norm() const { return amplitudes_.norm(); }

  /// |psi><psi|
  HermitianOperator projector() const;

  StateVector operator+(const StateVector& other) const;
  StateVector operator*(Complex scale) const;

 private:
  Vector amplitudes_;
  DimVector dims_;
};

Complex inner(const StateVector& a, const StateVector& b);
/// |a><b| as a raw matrix (generally not Hermitian).
Matrix outer(const StateVector& a, const StateVector& b);

HermitianOperator tensor(std::span<const HermitianOperator> factors);
HermitianOperator tensor(std::initializer_list<HermitianOperator> factors);
StateVector tensor(std::span<const StateVector> factors);
StateVector tensor(std::initializer_list<StateVector> factors);

/// Trace out `sites_to_trace` (0-based). Works for non-Hermitian input.
/// Tracing every site yields a 1x1 matrix.
Matrix partial_trace(const Matrix& a, const DimVector& dims,
                     std::span<const std::size_t> sites_to_trace);
HermitianOperator partial_trace(const HermitianOperator& a,
                                std::span<const std::size_t> sites_to_trace);

/// Transpose the tensor factors on `sites` only.
Matrix partial_transpose(const Matrix& a, const DimVector& dims,
                         std::span<const std::size_t> sites);

struct Spectrum {
  Eigen::VectorXd values;  // descending
  Matrix vectors;          // orthonormal columns, first nonzero entry real positive
};

Spectrum eig_hermitian(const HermitianOperator& a);
Spectrum eig_hermitian(const Matrix& a);

double min_eigenvalue(const HermitianOperator& a);
bool is_psd(const HermitianOperator& a, double tol = tolerance::kPsd);

/// Projector onto eigenvectors with eigenvalue > rank_tol.
HermitianOperator support_projector(const HermitianOperator& a,
                                    double rank_tol = tolerance::kRank);
/// Orthonormal columns spanning the support (same threshold as above).
Matrix support_basis(const HermitianOperator& a, double rank_tol = tolerance::kRank);
Matrix kernel_basis(const HermitianOperator& a, double rank_tol = tolerance::kRank);

/// B^dagger A B for orthonormal columns B. Result carries single-site dims {k}.
HermitianOperator compress(const HermitianOperator& a, const Matrix& basis);

/// max |B^dagger B - I|
double orthonormality_residual(const Matrix& basis);

/// Tr(AB)
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

double max_abs(const Matrix& a);

}  // namespace udbound
