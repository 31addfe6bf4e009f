#include "lel/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "lel/divergence.hpp"
#include "lel/parallel.hpp"

namespace lel {

namespace {

constexpr double kPositivitySlack = 1e-8;

// For a linear autonomous right-hand side the four RK4 stages collapse to the
// degree-4 Taylor polynomial of exp(hL).
class StepCache {
 public:
  explicit StepCache(const Matrix& l) : l_(l) {}
  const Matrix& get(double h) {
    auto it = cache_.find(h);
    if (it != cache_.end()) return it->second;
    const Eigen::Index m = l_.rows();
    const Matrix id = Matrix::Identity(m, m);
    const Matrix hl = h * l_;
    Matrix p = id + hl / 4.0;
    p = id + hl * p / 3.0;
    p = id + hl * p / 2.0;
    p = id + hl * p;
    return cache_.emplace(h, std::move(p)).first->second;
  }

 private:
  Matrix l_;
  std::map<double, Matrix> cache_;
};

Matrix normalize_state(const Vector& v, int n) {
  Matrix m = hermitian_part(unvec(v, n));
  return m / m.trace().real();
}

}  // namespace

Trajectory integrate(const RawGenerator& g, const DensityMatrix& rho0, double t_end, double dt,
                     const IntegrateOptions& opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrate: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("integrate: t_end must be >= 0");
  if (rho0.dim() != g.dim()) throw StructuralError("integrate: state dimension differs from generator");
  const int n = g.dim();
  const int record_every = std::max(1, opts.record_every);
  const int probe_every = std::max(1, opts.richardson_every);

  StepCache steps(g.schrodinger().matrix());
  Trajectory tr;
  tr.dt = dt;
  tr.label = g.label();
  tr.times.push_back(0.0);
  tr.states.push_back(rho0);
  tr.min_eigenvalue = rho0.min_eigenvalue();

  Vector x = vec(rho0.matrix());
  const long total = t_end == 0.0 ? 0 : static_cast<long>(std::ceil(t_end / dt - 1e-9));

  double t_now = 0.0;
  // Advances x by h, halving on positivity breach. Returns the accepted state's spectrum minimum.
  std::function<double(double, int)> advance = [&](double h, int depth) -> double {
    const Matrix cand = normalize_state(steps.get(h) * x, n);
    const double lo = eig_hermitian(cand).min();
    if (lo >= -kPositivitySlack) {
      x = vec(cand);
      t_now += h;
      return lo;
    }
    if (depth >= opts.max_halvings) {
      std::ostringstream os;
      os << "positivity lost (min eigenvalue " << lo << ") at t = " << t_now << " with dt_min = " << h;
      throw IntegrationError(os.str(), t_now);
    }
    ++tr.halved_steps;
    const double a = advance(h / 2.0, depth + 1);
    const double b = advance(h / 2.0, depth + 1);
    return std::min(a, b);
  };

  for (long k = 0; k < total; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double t1 = std::min(static_cast<double>(k + 1) * dt, t_end);
    const double h = t1 - t0;
    if (k % probe_every == 0) {
      const Vector full = steps.get(h) * x;
      const Matrix& half = steps.get(h / 2.0);
      const Vector twice = half * (half * x);
      tr.error_rate = std::max(tr.error_rate, (full - twice).norm() / 15.0 / h);
    }
    t_now = t0;
    const double lo = advance(h, 0);
    tr.min_eigenvalue = std::min(tr.min_eigenvalue, lo);
    if ((k + 1) % record_every == 0 || k + 1 == total) {
      tr.times.push_back(t1);
      tr.states.push_back(DensityMatrix::from(unvec(x, n), kPositivitySlack));
    }
  }
  return tr;
}

Trajectory integrate(const GnsGenerator& g, const DensityMatrix& rho0, double t_end, double dt,
                     const IntegrateOptions& opts) {
  return integrate(g.raw(), rho0, t_end, dt, opts);
}

std::vector<TraceRow> DivergenceTrace::for_alpha(double alpha) const {
  std::vector<TraceRow> out;
  for (const auto& r : rows)
    if (r.alpha == alpha) out.push_back(r);
  return out;
}

DivergenceTrace divergence_trace(const Trajectory& traj, const GnsGenerator& g, const std::vector<double>& alphas) {
  for (double a : alphas)
    if (!(a > 0.0)) throw DomainError("divergence_trace: alpha must be positive");
  DivergenceTrace out;
  size_t first = 0;
  while (first < traj.states.size() && !traj.states[first].strictly_positive()) ++first;
  if (first > 0) {
    out.pruned = static_cast<int>(first);
    out.warnings.push_back("pruned " + std::to_string(first) + " leading rank-deficient states");
  }
  std::vector<size_t> keep;
  for (size_t i = first; i < traj.states.size(); ++i) {
    if (traj.states[i].strictly_positive()) {
      keep.push_back(i);
    } else {
      out.warnings.push_back("skipped rank-deficient state at t = " + std::to_string(traj.times[i]));
    }
  }
  const size_t na = alphas.size();
  out.rows.resize(keep.size() * na);
  parallel_for(keep.size(), [&](size_t s) {
    const size_t i = keep[s];
    const DensityMatrix& rho = traj.states[i];
    for (size_t a = 0; a < na; ++a) {
      const double alpha = alphas[a];
      out.rows[s * na + a] = {traj.times[i], alpha, sandwiched_renyi(rho, g.sigma(), alpha).value,
                              fisher_information(rho, g.sigma(), alpha, g)};
    }
  });
  return out;
}

TraceDiagnostics analyze_trace(const std::vector<TraceRow>& rows, double floor) {
  TraceDiagnostics diag;
  for (size_t k = 0; k + 1 < rows.size(); ++k) {
    const auto& a = rows[k];
    const auto& b = rows[k + 1];
    diag.max_increase = std::max(diag.max_increase, b.d - a.d);
    if (a.d <= floor || b.d <= floor) continue;
    const double rate = -(b.d - a.d) / (b.t - a.t);
    const double mid = 0.5 * (a.fisher + b.fisher);
    if (!(mid > 0.0)) continue;
    diag.max_rate_mismatch = std::max(diag.max_rate_mismatch, std::abs(rate - mid) / mid);
    ++diag.compared;
  }
  return diag;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double tail_fraction) {
  if (t.size() != d.size()) throw StructuralError("fit_decay_rate: length mismatch");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw DomainError("fit_decay_rate: tail_fraction in (0, 1]");
  DecayFit fit;
  size_t usable = 0;
  while (usable < d.size() && d[usable] > kDivergenceFloor) ++usable;
  const bool truncated = usable < d.size();
  const size_t m = std::max<size_t>(static_cast<size_t>(std::ceil(tail_fraction * static_cast<double>(usable))), 0);
  if (usable < 3 || m < 3) {
    fit.verdict = FitVerdict::stationary;
    return fit;
  }
  const size_t begin = usable - m;
  double st = 0.0, sy = 0.0;
  for (size_t i = begin; i < usable; ++i) {
    st += t[i];
    sy += std::log(d[i]);
  }
  st /= static_cast<double>(m);
  sy /= static_cast<double>(m);
  double num = 0.0, den = 0.0;
  for (size_t i = begin; i < usable; ++i) {
    num += (t[i] - st) * (std::log(d[i]) - sy);
    den += (t[i] - st) * (t[i] - st);
  }
  fit.rate = -num / den;
  fit.points = static_cast<int>(m);
  fit.verdict = truncated ? FitVerdict::truncated : FitVerdict::ok;
  return fit;
}

DecayFit fit_decay_rate(const std::vector<TraceRow>& rows, double tail_fraction) {
  std::vector<double> t, d;
  for (const auto& r : rows) {
    t.push_back(r.t);
    d.push_back(r.d);
  }
  return fit_decay_rate(t, d, tail_fraction);
}

double gradient_flow_residual(const GnsGenerator& g, const DensityMatrix& rho, double alpha) {
  rho.require_strictly_positive("gradient_flow_residual");
  const Matrix fd = functional_derivative(rho, g.sigma(), alpha);
  const std::vector<Matrix> grad = nc_gradient(g, fd);
  std::vector<Matrix> flux(grad.size());
  for (size_t j = 0; j < grad.size(); ++j) {
    flux[j] = MopRenyi(rho, g.sigma(), g.terms()[j].omega, alpha).apply(grad[j]);
  }
  const Matrix lhs = nc_divergence(g, flux);
  const Matrix rhs = g.apply_schrodinger(rho.matrix());
  const double den = rhs.norm();
  const double diff = (lhs - rhs).norm();
  return den < 1e-12 ? diff : diff / den;
}

MetricTensor::MetricTensor(const GnsGenerator& g, const DensityMatrix& rho, double alpha) {
  rho.require_strictly_positive("metric_eval");
  for (const auto& t : g.terms()) {
    jumps_.push_back(t.V);
    weights_.emplace_back(rho, g.sigma(), t.omega, alpha);
  }
  basis_ = traceless_hermitian_basis(g.dim());
  const int m = static_cast<int>(basis_.size());
  RealMatrix k(m, m);
  for (int b = 0; b < m; ++b) {
    const Matrix kb = apply(basis_[b]);
    for (int a = 0; a < m; ++a) k(a, b) = hs_inner(basis_[a], kb).real();
  }
  k = 0.5 * (k + k.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(k);
  const RealVector& ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  const double thr = 1e-10 * top;
  if (ev(0) <= thr) {
    throw ValidationError({{"metric_invertible", -1, "-div(M grad .) is singular on traceless matrices"}});
  }
  RealVector inv(m);
  for (int i = 0; i < m; ++i) inv(i) = ev(i) > thr ? 1.0 / ev(i) : 0.0;
  pinv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

Matrix MetricTensor::apply(const Matrix& u) const {
  const int n = static_cast<int>(u.rows());
  Matrix out = Matrix::Zero(n, n);
  for (size_t j = 0; j < jumps_.size(); ++j) {
    const Matrix& v = jumps_[j];
    const Matrix flux = weights_[j].apply(v * u - u * v);
    const Matrix vs = v.adjoint();
    out -= flux * vs - vs * flux;
  }
  return out;
}

Matrix MetricTensor::potential(const Matrix& nu) const {
  if (!is_hermitian(nu, 1e-10)) throw DomainError("metric: tangent vector must be Hermitian");
  if (std::abs(nu.trace()) > 1e-10 * std::max(1.0, nu.norm())) {
    throw DomainError("metric: tangent vector must be traceless");
  }
  const int m = static_cast<int>(basis_.size());
  RealVector c(m);
  for (int a = 0; a < m; ++a) c(a) = hs_inner(basis_[a], nu).real();
  const RealVector u = pinv_ * c;
  Matrix out = Matrix::Zero(nu.rows(), nu.cols());
  for (int a = 0; a < m; ++a) out += u(a) * basis_[a];
  return out;
}

double MetricTensor::operator()(const Matrix& nu1, const Matrix& nu2) const {
  const Matrix u1 = potential(nu1);
  const Matrix u2 = potential(nu2);
  double acc = 0.0;
  for (size_t j = 0; j < jumps_.size(); ++j) {
    const Matrix& v = jumps_[j];
    acc += hs_inner(v * u1 - u1 * v, weights_[j].apply(v * u2 - u2 * v)).real();
  }
  return acc;
}

double metric_eval(const GnsGenerator& g, const DensityMatrix& rho, double alpha, const Matrix& nu1, const Matrix& nu2) {
  return MetricTensor(g, rho, alpha)(nu1, nu2);
}

InequalityCheck poincare_check(const GnsGenerator& g, const Matrix& a_in, double gap) {
  const DensityMatrix& sigma = g.sigma();
  InequalityCheck out;
  Matrix a = a_in;
  const Complex mean = (sigma.matrix() * a).trace();
  if (std::abs(mean) > 1e-10 * std::max(1.0, a.norm())) {
    a -= mean * Matrix::Identity(a.rows(), a.cols());
    out.projected = true;
  }
  out.lhs = inner_s(a, -g.apply_heisenberg(a), sigma, 0.5).real();
  const double norm2 = inner_s(a, a, sigma, 0.5).real();
  out.rhs = gap * norm2;
  out.pass = out.lhs >= out.rhs - 1e-10 * std::max(1.0, norm2);
  return out;
}

InequalityCheck poincare_check(const GnsGenerator& g, const Matrix& a) {
  return poincare_check(g, a, spectral_gap(g).gap);
}

InequalityCheck fisher2_bound_check(const GnsGenerator& g, const DensityMatrix& rho, double gap) {
  InequalityCheck out;
  out.lhs = fisher_information(rho, g.sigma(), 2.0, g);
  const double d2 = sandwiched_renyi(rho, g.sigma(), 2.0).value;
  out.rhs = 2.0 * gap * -std::expm1(-d2);
  out.pass = out.lhs >= out.rhs - 1e-9;
  return out;
}

InequalityCheck fisher2_bound_check(const GnsGenerator& g, const DensityMatrix& rho) {
  return fisher2_bound_check(g, rho, spectral_gap(g).gap);
}

double d2_envelope(double d2_initial, double gap, double t) {
  return std::log1p(std::expm1(d2_initial) * std::exp(-2.0 * gap * t));
}

}  // namespace lel
