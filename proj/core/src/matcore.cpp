#include "lel/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lel {

ValidationError::ValidationError(std::vector<ValidationFailure> failures)
    : Error([&] {
        std::ostringstream os;
        os << "validation failed:";
        for (const auto& f : failures) {
          os << " [" << f.condition;
          if (f.index >= 0) os << " j=" << f.index;
          os << "] " << f.message << ";";
        }
        return os.str();
      }()),
      failures_(std::move(failures)) {}

namespace {

double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

void check_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw StructuralError(std::string(who) + ": expected a non-empty square matrix");
  }
  if (!a.allFinite()) throw StructuralError(std::string(who) + ": non-finite entries");
}

double checked_value(double x, double p, bool log_like, DomainMode mode) {
  if (log_like || p < 0.0) {
    if (x >= tol::pos_floor) return x;
    if (mode == DomainMode::lenient && x >= -tol::psd) return tol::pos_floor;
    std::ostringstream os;
    os << "eigenvalue " << x << " below positivity floor " << tol::pos_floor;
    throw SingularityError(os.str(), x);
  }
  if (x >= 0.0) return x;
  if (x >= -tol::psd) return 0.0;
  std::ostringstream os;
  os << "eigenvalue " << x << " is negative";
  throw SingularityError(os.str(), x);
}

}  // namespace

Matrix SpectralDecomposition::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

Matrix SpectralDecomposition::map(const std::function<double(double)>& f) const {
  RealVector fv(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) fv(i) = f(values(i));
  return vectors * fv.cast<Complex>().asDiagonal() * vectors.adjoint();
}

bool is_hermitian(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tolerance * std::max(1.0, max_abs(a));
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

SpectralDecomposition eig_hermitian(const Matrix& a) {
  check_square(a, "eig_hermitian");
  if (!is_hermitian(a)) throw StructuralError("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw StructuralError("eig_hermitian: solver did not converge");

  const int n = static_cast<int>(a.rows());
  SpectralDecomposition s{es.eigenvalues(), es.eigenvectors()};
  for (int k = 0; k < n; ++k) {
    auto col = s.vectors.col(k);
    for (int i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-10) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = Complex(col(i).real(), 0.0);
        break;
      }
    }
  }

  // Ties: order eigenvectors lexicographically within each degenerate run.
  const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && s.values(end) - s.values(end - 1) <= 1e-12 * scale) ++end;
    if (end - start > 1) {
      std::vector<int> idx(end - start);
      std::iota(idx.begin(), idx.end(), start);
      std::sort(idx.begin(), idx.end(), [&](int x, int y) {
        return lex_less(s.vectors.col(x), s.vectors.col(y));
      });
      Matrix block(n, end - start);
      RealVector vals(end - start);
      for (int k = 0; k < end - start; ++k) {
        block.col(k) = s.vectors.col(idx[k]);
        vals(k) = s.values(idx[k]);
      }
      s.vectors.middleCols(start, end - start) = block;
      s.values.segment(start, end - start) = vals;
    }
    start = end;
  }
  return s;
}

Matrix mat_fn(const SpectralDecomposition& s, const std::function<double(double)>& f) {
  return s.map(f);
}

Matrix mat_fn(const Matrix& a, const std::function<double(double)>& f) {
  return eig_hermitian(a).map(f);
}

Matrix mat_pow(const SpectralDecomposition& s, double p, DomainMode mode) {
  if (p == 0.0) return Matrix::Identity(s.dim(), s.dim());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) checked_value(s.values(i), p, false, mode);
  return s.map([&](double x) { return std::pow(checked_value(x, p, false, mode), p); });
}

Matrix mat_pow(const Matrix& a, double p, DomainMode mode) {
  return mat_pow(eig_hermitian(a), p, mode);
}

Matrix mat_log(const SpectralDecomposition& s, DomainMode mode) {
  for (Eigen::Index i = 0; i < s.values.size(); ++i) checked_value(s.values(i), 0.0, true, mode);
  return s.map([&](double x) { return std::log(checked_value(x, 0.0, true, mode)); });
}

Matrix mat_log(const Matrix& a, DomainMode mode) { return mat_log(eig_hermitian(a), mode); }

Matrix mat_sqrt(const Matrix& a) { return mat_pow(a, 0.5); }

DensityMatrix DensityMatrix::from(const Matrix& m, double psd_tolerance) {
  check_square(m, "DensityMatrix");
  if (!is_hermitian(m)) throw ValidationError("density matrix is not Hermitian");
  const Matrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tol::trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1";
    throw ValidationError(os.str());
  }
  SpectralDecomposition s = eig_hermitian(h);
  if (s.min() < -psd_tolerance) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << s.min();
    throw ValidationError(os.str());
  }
  return DensityMatrix(h, std::move(s));
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  if (n < 1) throw StructuralError("maximally_mixed: n must be positive");
  return from(Matrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& p) {
  Matrix m = Matrix::Zero(p.size(), p.size());
  for (size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return from(m);
}

const DensityMatrix& DensityMatrix::require_strictly_positive(const char* who) const {
  if (!strictly_positive()) {
    std::ostringstream os;
    os << who << ": state is not strictly positive (min eigenvalue " << min_eigenvalue() << ")";
    throw SingularityError(os.str(), min_eigenvalue());
  }
  return *this;
}

Matrix DensityMatrix::power(double p, DomainMode mode) const { return mat_pow(spec_, p, mode); }

Matrix DensityMatrix::log(DomainMode mode) const { return mat_log(spec_, mode); }

Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

Complex inner_s(const Matrix& a, const Matrix& b, const DensityMatrix& sigma, double s) {
  sigma.require_strictly_positive("inner_s");
  if (a.rows() != sigma.dim() || b.rows() != sigma.dim()) {
    throw StructuralError("inner_s: dimension mismatch");
  }
  const Matrix ps = sigma.power(s);
  const Matrix pt = sigma.power(1.0 - s);
  return (ps * a.adjoint() * pt * b).trace();
}

double trace_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

Matrix unvec(const Vector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n) throw StructuralError("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Superoperator::Superoperator(int n, Matrix m) : n_(n), m_(std::move(m)) {
  if (m_.rows() != n * n || m_.cols() != n * n) throw StructuralError("Superoperator: size mismatch");
}

Superoperator Superoperator::identity(int n) { return {n, Matrix::Identity(n * n, n * n)}; }
Superoperator Superoperator::zero(int n) { return {n, Matrix::Zero(n * n, n * n)}; }

Superoperator Superoperator::left(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  return {n, kron(Matrix::Identity(n, n), x)};
}

Superoperator Superoperator::right(const Matrix& y) {
  const int n = static_cast<int>(y.rows());
  return {n, kron(y.transpose(), Matrix::Identity(n, n))};
}

Superoperator Superoperator::sandwich(const Matrix& x, const Matrix& y) {
  return {static_cast<int>(x.rows()), kron(y.transpose(), x)};
}

Matrix Superoperator::apply(const Matrix& a) const {
  if (a.rows() != n_ || a.cols() != n_) throw StructuralError("Superoperator::apply: size mismatch");
  return unvec(m_ * vec(a), n_);
}

Superoperator Superoperator::adjoint() const { return {n_, m_.adjoint()}; }

Superoperator Superoperator::operator*(const Superoperator& o) const {
  if (o.n_ != n_) throw StructuralError("Superoperator: dimension mismatch");
  return {n_, m_ * o.m_};
}

Superoperator Superoperator::operator+(const Superoperator& o) const {
  if (o.n_ != n_) throw StructuralError("Superoperator: dimension mismatch");
  return {n_, m_ + o.m_};
}

Superoperator Superoperator::operator-(const Superoperator& o) const {
  if (o.n_ != n_) throw StructuralError("Superoperator: dimension mismatch");
  return {n_, m_ - o.m_};
}

Superoperator Superoperator::operator*(Complex c) const { return {n_, c * m_}; }

Superoperator superop_of(const std::function<Matrix(const Matrix&)>& map, int n) {
  Matrix m(n * n, n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      m.col(i + n * j) = vec(map(e));
    }
  }
  return {n, std::move(m)};
}

double superop_trace_norm(const Superoperator& s) { return trace_norm(s.matrix()); }

double superop_frobenius(const Superoperator& s) { return s.matrix().norm(); }

std::vector<Matrix> traceless_hermitian_basis(int n) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<size_t>(n * n - 1));
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      Matrix sym = Matrix::Zero(n, n);
      sym(k, l) = r;
      sym(l, k) = r;
      basis.push_back(sym);
      Matrix asym = Matrix::Zero(n, n);
      asym(k, l) = Complex(0.0, -r);
      asym(l, k) = Complex(0.0, r);
      basis.push_back(asym);
    }
  }
  for (int d = 1; d < n; ++d) {
    Matrix diag = Matrix::Zero(n, n);
    const double c = 1.0 / std::sqrt(static_cast<double>(d) * (d + 1));
    for (int i = 0; i < d; ++i) diag(i, i) = c;
    diag(d, d) = -d * c;
    basis.push_back(diag);
  }
  return basis;
}

}  // namespace lel
