#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lel/errors.hpp"

namespace lel {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

namespace tol {
inline constexpr double herm = 1e-12;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double pos_floor = 1e-12;
}  // namespace tol

// Strict: reject eigenvalues below pos_floor for log / negative powers.
// Lenient: clamp eigenvalues in [-tol::psd, pos_floor] up to pos_floor first.
enum class DomainMode { strict, lenient };

struct SpectralDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns

  int dim() const { return static_cast<int>(values.size()); }
  double min() const { return values(0); }
  double max() const { return values(values.size() - 1); }
  Matrix reconstruct() const;
  Matrix map(const std::function<double(double)>& f) const;
};

bool is_hermitian(const Matrix& a, double tolerance = tol::herm);
Matrix hermitian_part(const Matrix& a);

SpectralDecomposition eig_hermitian(const Matrix& a);

Matrix mat_fn(const SpectralDecomposition& s, const std::function<double(double)>& f);
Matrix mat_fn(const Matrix& a, const std::function<double(double)>& f);
Matrix mat_pow(const SpectralDecomposition& s, double p, DomainMode mode = DomainMode::strict);
Matrix mat_pow(const Matrix& a, double p, DomainMode mode = DomainMode::strict);
Matrix mat_log(const SpectralDecomposition& s, DomainMode mode = DomainMode::strict);
Matrix mat_log(const Matrix& a, DomainMode mode = DomainMode::strict);
Matrix mat_sqrt(const Matrix& a);

class DensityMatrix {
 public:
  // psd_tolerance: most negative eigenvalue accepted (default tol::psd).
  static DensityMatrix from(const Matrix& m, double psd_tolerance = tol::psd);
  static DensityMatrix maximally_mixed(int n);
  static DensityMatrix diagonal(const std::vector<double>& p);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const SpectralDecomposition& spectrum() const { return spec_; }
  double min_eigenvalue() const { return spec_.min(); }
  double max_eigenvalue() const { return spec_.max(); }
  bool strictly_positive() const { return spec_.min() >= tol::pos_floor; }

  // Throws SingularityError unless strictly positive.
  const DensityMatrix& require_strictly_positive(const char* who) const;

  Matrix power(double p, DomainMode mode = DomainMode::strict) const;
  Matrix log(DomainMode mode = DomainMode::strict) const;

 private:
  DensityMatrix(Matrix m, SpectralDecomposition s) : m_(std::move(m)), spec_(std::move(s)) {}
  Matrix m_;
  SpectralDecomposition spec_;
};

Complex hs_inner(const Matrix& a, const Matrix& b);  // tr(A* B)
Complex inner_s(const Matrix& a, const Matrix& b, const DensityMatrix& sigma, double s);
double trace_norm(const Matrix& a);

// Column-stacking: vec(A)[i + n*j] = A(i, j), so vec(XAY) = (Y^T kron X) vec(A).
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, int n);
Matrix kron(const Matrix& a, const Matrix& b);

class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(int n, Matrix m);

  static Superoperator identity(int n);
  static Superoperator zero(int n);
  static Superoperator left(const Matrix& x);   // A -> X A
  static Superoperator right(const Matrix& y);  // A -> A Y
  static Superoperator sandwich(const Matrix& x, const Matrix& y);  // A -> X A Y

  int dim() const { return n_; }
  const Matrix& matrix() const { return m_; }
  Matrix apply(const Matrix& a) const;
  Superoperator adjoint() const;  // Hilbert-Schmidt adjoint

  Superoperator operator*(const Superoperator& o) const;  // composition, this after o
  Superoperator operator+(const Superoperator& o) const;
  Superoperator operator-(const Superoperator& o) const;
  Superoperator operator*(Complex c) const;

 private:
  int n_ = 0;
  Matrix m_;
};

Superoperator superop_of(const std::function<Matrix(const Matrix&)>& map, int n);
double superop_trace_norm(const Superoperator& s);
double superop_frobenius(const Superoperator& s);

// Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian n x n matrices, n^2 - 1 elements.
std::vector<Matrix> traceless_hermitian_basis(int n);

}  // namespace lel
