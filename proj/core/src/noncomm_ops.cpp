#include "lel/noncomm_ops.hpp"

#include <cmath>
#include <sstream>

namespace lel {

namespace {

void require_positive_spectrum(const SpectralDecomposition& x, const char* who) {
  const double floor = tol::pos_floor * std::max(1.0, std::abs(x.max()));
  if (!(x.min() >= floor)) {
    std::ostringstream os;
    os << who << ": operand is not strictly positive (min eigenvalue " << x.min() << ")";
    throw SingularityError(os.str(), x.min());
  }
}

Matrix sandwich(const Matrix& l, const Matrix& a, const Matrix& r) { return l * a * r; }

}  // namespace

KernelOperator::KernelOperator(Matrix basis, Matrix kernel) : u_(std::move(basis)), m_(std::move(kernel)) {
  if (u_.rows() != u_.cols() || m_.rows() != u_.rows() || m_.cols() != u_.cols()) {
    throw StructuralError("KernelOperator: size mismatch");
  }
}

Matrix KernelOperator::apply(const Matrix& a) const {
  if (a.rows() != m_.rows() || a.cols() != m_.cols()) throw StructuralError("KernelOperator::apply: size mismatch");
  const Matrix in = u_.adjoint() * a * u_;
  return u_ * in.cwiseProduct(m_) * u_.adjoint();
}

KernelOperator KernelOperator::inverse() const {
  if ((m_.array().abs() == 0.0).any()) throw SingularityError("KernelOperator::inverse: zero kernel entry", 0.0);
  return {u_, m_.cwiseInverse()};
}

KernelOperator KernelOperator::compose(const KernelOperator& other) const {
  if ((u_ - other.u_).norm() > 1e-12 * std::max(1.0, u_.norm())) {
    throw StructuralError("KernelOperator::compose: eigenbases differ");
  }
  return {u_, m_.cwiseProduct(other.m_)};
}

bool KernelOperator::positive() const {
  for (Eigen::Index i = 0; i < m_.size(); ++i) {
    const Complex v = m_.data()[i];
    if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-14 * v.real()) return false;
  }
  return true;
}

bool KernelOperator::hs_self_adjoint() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m_.cwiseAbs().maxCoeff());
}

Superoperator KernelOperator::to_superop() const {
  // A -> U (m o (U* A U)) U*: vec form is (conj(U) kron U) diag(vec m) (U^T kron U*).
  const Matrix w = kron(u_.conjugate(), u_);
  return {dim(), w * vec(m_).asDiagonal() * w.adjoint()};
}

Matrix gamma_pow(const DensityMatrix& sigma, double gamma, const Matrix& a) {
  if (gamma == 0.0) return a;
  sigma.require_strictly_positive("gamma_pow");
  const Matrix h = sigma.power(gamma / 2.0);
  return sandwich(h, a, h);
}

KernelOperator gamma_op(const DensityMatrix& sigma, double gamma) {
  sigma.require_strictly_positive("gamma_op");
  const auto& sp = sigma.spectrum();
  const int n = sp.dim();
  Matrix m(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) m(k, l) = std::pow(sp.values(k) * sp.values(l), gamma / 2.0);
  return {sp.vectors, m};
}

Matrix modular(const DensityMatrix& sigma, const Matrix& a) {
  sigma.require_strictly_positive("modular");
  return sigma.matrix() * a * sigma.power(-1.0);
}

KernelOperator modular_op(const DensityMatrix& sigma) {
  sigma.require_strictly_positive("modular_op");
  const auto& sp = sigma.spectrum();
  const int n = sp.dim();
  Matrix m(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) m(k, l) = sp.values(k) / sp.values(l);
  return {sp.vectors, m};
}

double mop_kernel_value(double a, double b, double omega) {
  // e^{-w/2} b (e^u - 1)/u with u = log(e^w a / b); expm1 keeps it exact near u = 0.
  const double u = omega + std::log(a) - std::log(b);
  const double pre = std::exp(-omega / 2.0) * b;
  if (std::abs(u) > 1e-8) return pre * std::expm1(u) / u;
  return pre * (1.0 + u / 2.0 + u * u / 6.0);
}

KernelOperator mop(const SpectralDecomposition& x, double omega) {
  require_positive_spectrum(x, "mop");
  const int n = x.dim();
  Matrix m(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) m(k, l) = mop_kernel_value(x.values(k), x.values(l), omega);
  return {x.vectors, m};
}

KernelOperator mop(const Matrix& x, double omega) { return mop(eig_hermitian(x), omega); }

KernelOperator mop_inv(const SpectralDecomposition& x, double omega) { return mop(x, omega).inverse(); }

KernelOperator mop_inv(const Matrix& x, double omega) { return mop(x, omega).inverse(); }

double chain_rule_residual(const Matrix& v, const Matrix& x, double omega) {
  const SpectralDecomposition sx = eig_hermitian(x);
  require_positive_spectrum(sx, "chain_rule_residual");
  const int n = sx.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix logx = mat_log(sx);
  const Matrix lhs_in = v * (logx - (omega / 2.0) * id) - (logx + (omega / 2.0) * id) * v;
  const Matrix lhs = mop(sx, omega).apply(lhs_in);
  const Matrix xm = sx.reconstruct();
  const Matrix rhs = std::exp(-omega / 2.0) * v * xm - std::exp(omega / 2.0) * xm * v;
  return (lhs - rhs).norm();
}

std::vector<Matrix> nc_gradient(const GnsGenerator& g, const Matrix& a) {
  std::vector<Matrix> out;
  out.reserve(g.terms().size());
  for (const auto& t : g.terms()) out.push_back(t.V * a - a * t.V);
  return out;
}

Matrix nc_divergence(const GnsGenerator& g, const std::vector<Matrix>& field) {
  if (field.size() != g.terms().size()) throw StructuralError("nc_divergence: field length differs from term count");
  const int n = g.dim();
  Matrix out = Matrix::Zero(n, n);
  for (size_t j = 0; j < field.size(); ++j) {
    const Matrix vs = g.terms()[j].V.adjoint();
    out += field[j] * vs - vs * field[j];
  }
  return out;
}

MopRenyi::MopRenyi(const DensityMatrix& rho, const DensityMatrix& sigma, double omega, double alpha)
    : core_(Matrix::Identity(1, 1), Matrix::Ones(1, 1)), alpha_(alpha) {
  if (!(alpha > 0.0)) throw DomainError("moprenyi: alpha must be positive");
  rho.require_strictly_positive("moprenyi");
  sigma.require_strictly_positive("moprenyi");
  const double p = (alpha - 1.0) / (2.0 * alpha);
  outer_ = sigma.power(p);
  outer_inv_ = sigma.power(-p);
  const Matrix rs = hermitian_part(outer_inv_ * rho.matrix() * outer_inv_);
  const SpectralDecomposition sp = eig_hermitian(rs);
  require_positive_spectrum(sp, "moprenyi");
  const int n = sp.dim();
  Matrix m(n, n);
  z_ = 0.0;
  for (int k = 0; k < n; ++k) {
    z_ += std::pow(sp.values(k), alpha);
    for (int l = 0; l < n; ++l) {
      const double a = sp.values(k), b = sp.values(l);
      const double num = mop_kernel_value(a, b, omega / alpha);
      const double den = mop_kernel_value(std::pow(a, alpha - 1.0), std::pow(b, alpha - 1.0),
                                          (alpha - 1.0) * omega / alpha);
      m(k, l) = num / den;
    }
  }
  core_ = KernelOperator(sp.vectors, m);
}

Matrix MopRenyi::apply(const Matrix& a) const {
  return (z_ / alpha_) * outer_ * core_.apply(outer_ * a * outer_) * outer_;
}

Matrix MopRenyi::apply_inverse(const Matrix& a) const {
  return (alpha_ / z_) * outer_inv_ * core_.inverse().apply(outer_inv_ * a * outer_inv_) * outer_inv_;
}

Superoperator MopRenyi::to_superop() const {
  return Superoperator::sandwich(outer_, outer_) * core_.to_superop() * Superoperator::sandwich(outer_, outer_) *
         Complex(z_ / alpha_, 0.0);
}

KernelOperator g_op(const Matrix& x, double omega, double s) {
  if (!(s >= 0.0 && s <= 0.5)) throw DomainError("g_op: s must lie in [0, 1/2]");
  const SpectralDecomposition sx = eig_hermitian(x);
  require_positive_spectrum(sx, "g_op");
  const int n = sx.dim();
  Matrix m(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const double lb = omega + std::log(sx.values(k)) - std::log(sx.values(l));
      m(k, l) = std::exp(s * lb) + std::exp((1.0 - s) * lb);
    }
  }
  return {sx.vectors, m};
}

double weight_kernel_value(double lk, double lj, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("weight_operator: alpha must be >= 0");
  if (std::abs(lk - lj) <= 1e-10 * std::max(lk, lj)) return lk;
  if (alpha == 0.0) return std::max(lk, lj);
  const double d = std::log(lk) - std::log(lj);
  if (std::isinf(alpha)) return lk * d / std::expm1(d);
  if (alpha == 1.0) return lj * std::expm1(d) / d;
  // (a-1)(lk^{1/a} - lj^{1/a}) / (lj^{(1-a)/a} - lk^{(1-a)/a}), rewritten with expm1.
  return lj * std::expm1(d / alpha) * (alpha - 1.0) / (-std::expm1(-(alpha - 1.0) * d / alpha));
}

KernelOperator weight_operator(const DensityMatrix& sigma, double alpha) {
  sigma.require_strictly_positive("weight_operator");
  const auto& sp = sigma.spectrum();
  const int n = sp.dim();
  Matrix m(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) m(k, j) = weight_kernel_value(sp.values(k), sp.values(j), alpha);
  return {sp.vectors, m};
}

Matrix power_op(const DensityMatrix& sigma, double beta, double alpha, const Matrix& a) {
  const Matrix b = gamma_pow(sigma, 1.0 / alpha, a);
  const Matrix abs_pow = mat_pow(hermitian_part(b.adjoint() * b), alpha / (2.0 * beta));
  return gamma_pow(sigma, -1.0 / beta, abs_pow);
}

double weighted_lp_norm(const DensityMatrix& sigma, double alpha, const Matrix& a) {
  const Matrix b = gamma_pow(sigma, 1.0 / alpha, a);
  const SpectralDecomposition s = eig_hermitian(hermitian_part(b.adjoint() * b));
  double tr = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) tr += std::pow(std::max(s.values(i), 0.0), alpha / 2.0);
  return std::pow(tr, 1.0 / alpha);
}

double ent_fun(const DensityMatrix& sigma, double alpha, const Matrix& x) {
  const SpectralDecomposition g = eig_hermitian(hermitian_part(gamma_pow(sigma, 1.0 / alpha, x)));
  require_positive_spectrum(g, "ent_fun");
  const Matrix y = g.map([&](double v) { return std::pow(v, alpha); });
  double ylogy = 0.0;
  double norm_a = 0.0;
  for (Eigen::Index i = 0; i < g.values.size(); ++i) {
    const double ya = std::pow(g.values(i), alpha);
    ylogy += ya * alpha * std::log(g.values(i));
    norm_a += ya;
  }
  const double ylogs = (y * sigma.log()).trace().real();
  return ylogy - ylogs - norm_a * std::log(norm_a);
}

double dirichlet_form(const GnsGenerator& g, double alpha, const Matrix& x) {
  if (!(alpha > 0.0)) throw DomainError("dirichlet_form: alpha must be positive");
  const DensityMatrix& sigma = g.sigma();
  const Matrix lx = -g.apply_heisenberg(x);
  if (alpha == 1.0) {
    const Matrix lg = mat_log(hermitian_part(gamma_pow(sigma, 1.0, x))) - sigma.log();
    return 0.25 * inner_s(lg, lx, sigma, 0.5).real();
  }
  const double at = alpha / (alpha - 1.0);
  return alpha * at / 4.0 * inner_s(power_op(sigma, at, alpha, x), lx, sigma, 0.5).real();
}

}  // namespace lel
