#include "lel/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "lel/divergence.hpp"
#include "lel/noncomm_ops.hpp"
#include "lel/parallel.hpp"
#include "lel/random.hpp"

namespace lel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ratio {
  double num = 0.0;
  double den = 0.0;
};

using RatioFn = std::function<Ratio(const DensityMatrix&)>;

// Nelder-Mead on R^d, fixed iteration budget.
double nelder_mead(const std::function<double(const RealVector&)>& f, RealVector x0, double step, int iterations) {
  const Eigen::Index d = x0.size();
  std::vector<RealVector> pts(d + 1, x0);
  std::vector<double> val(d + 1);
  for (Eigen::Index i = 0; i < d; ++i) pts[i + 1](i) += step;
  for (Eigen::Index i = 0; i <= d; ++i) val[i] = f(pts[i]);
  std::vector<size_t> order(d + 1);
  for (int it = 0; it < iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return val[a] < val[b]; });
    const size_t best = order.front(), worst = order.back(), second = order[d - 1];
    RealVector centroid = RealVector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(d);
    const RealVector xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < val[best]) {
      const RealVector xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const RealVector xc = outside ? RealVector(centroid + 0.5 * (xr - centroid))
                                  : RealVector(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= d; ++i) {
      if (static_cast<size_t>(i) == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i]);
    }
  }
  return *std::min_element(val.begin(), val.end());
}

// rho(x) = exp(log sigma + sum x_a B_a) / tr
std::optional<DensityMatrix> state_at(const Matrix& log_sigma, const std::vector<Matrix>& basis, const RealVector& x) {
  Matrix h = log_sigma;
  for (size_t a = 0; a < basis.size(); ++a) h += x(static_cast<Eigen::Index>(a)) * basis[a];
  const SpectralDecomposition s = eig_hermitian(hermitian_part(h));
  const double top = s.max();
  Matrix rho = s.map([&](double v) { return std::exp(v - top); });
  rho /= rho.trace().real();
  try {
    DensityMatrix out = DensityMatrix::from(hermitian_part(rho));
    if (!out.strictly_positive()) return std::nullopt;
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double sampled_min(const RatioFn& fn, const DensityMatrix& sigma, const LsiOptions& opts, std::uint64_t salt) {
  const std::vector<Matrix> basis = traceless_hermitian_basis(sigma.dim());
  const Matrix log_sigma = sigma.log();
  const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
  auto objective = [&](const RealVector& x) {
    const auto rho = state_at(log_sigma, basis, x);
    if (!rho) return kInf;
    try {
      const Ratio r = fn(*rho);
      if (!(r.den > 1e-9) || !std::isfinite(r.num)) return kInf;
      return r.num / r.den;
    } catch (const Error&) {
      return kInf;
    }
  };
  std::vector<double> best(static_cast<size_t>(std::max(1, opts.starts)), kInf);
  Rng root(opts.seed ^ (salt * 0x9E3779B97F4A7C15ULL));
  std::vector<RealVector> starts;
  for (size_t i = 0; i < best.size(); ++i) {
    Rng r = root.fork(i);
    const double scale = r.uniform(0.3, 1.5);
    RealVector x(d);
    for (Eigen::Index a = 0; a < d; ++a) x(a) = scale * r.normal();
    starts.push_back(x);
  }
  parallel_for(best.size(), [&](size_t i) { best[i] = nelder_mead(objective, starts[i], 0.5, opts.iterations); });
  return *std::min_element(best.begin(), best.end());
}

// Limit of num/den as rho -> sigma: both vanish to second order, so the limit
// over directions is the smallest generalized eigenvalue of the Hessian pair.
// Hessians come from symmetric second differences with one Richardson step.
double local_limit(const RatioFn& fn, const DensityMatrix& sigma) {
  const std::vector<Matrix> basis = traceless_hermitian_basis(sigma.dim());
  const int d = static_cast<int>(basis.size());
  const double eps = 2e-3 * sigma.min_eigenvalue();
  auto quad = [&](const Matrix& nu, double e) {
    const Ratio p = fn(DensityMatrix::from(sigma.matrix() + e * nu));
    const Ratio m = fn(DensityMatrix::from(sigma.matrix() - e * nu));
    return std::pair{(p.num + m.num) / (2 * e * e), (p.den + m.den) / (2 * e * e)};
  };
  auto form = [&](const Matrix& nu) {
    const auto a = quad(nu, eps);
    const auto b = quad(nu, eps / 2.0);
    return std::pair{(4.0 * b.first - a.first) / 3.0, (4.0 * b.second - a.second) / 3.0};
  };
  RealMatrix qn(d, d), qd(d, d);
  for (int a = 0; a < d; ++a) {
    const auto f = form(basis[a]);
    qn(a, a) = f.first;
    qd(a, a) = f.second;
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const auto plus = form(r * (basis[a] + basis[b]));
      const auto minus = form(r * (basis[a] - basis[b]));
      // q(u+v) - q(u-v) = 4 B(u, v) for the scaled directions, B(u,v) = B(a,b) / 2.
      qn(a, b) = qn(b, a) = (plus.first - minus.first) / 2.0;
      qd(a, b) = qd(b, a) = (plus.second - minus.second) / 2.0;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> es(qn, qd);
  return es.eigenvalues()(0);
}

RatioEstimate estimate(const RatioFn& fn, const DensityMatrix& sigma, const LsiOptions& opts, std::uint64_t salt) {
  RatioEstimate e;
  e.sampled = sampled_min(fn, sigma, opts, salt);
  e.local = local_limit(fn, sigma);
  e.value = std::min(e.sampled, e.local);
  return e;
}

}  // namespace

double t2_bound(double gap, double lambda_min, double eps) {
  if (!(eps > 0.0)) throw DomainError("t2_bound: eps must be positive");
  return std::max(0.0, std::log(1.0 / (lambda_min * eps * eps)) / (2.0 * gap));
}

double ConstantsReport::t2_bound(double eps) const { return lel::t2_bound(lambda_L, lambda_min, eps); }

ConstantsReport lsi_constants(const GnsGenerator& g, const LsiOptions& opts) {
  const DensityMatrix& sigma = g.sigma();
  ConstantsReport rep;
  rep.lambda_L = spectral_gap(g).gap;
  rep.lambda_min = sigma.min_eigenvalue();
  const double lm = rep.lambda_min;
  rep.K_lower = rep.lambda_L / (1.0 - std::log(std::sqrt(lm)));
  rep.K_upper = rep.lambda_L;
  // lambda_min -> 1 only for n = 1; the bound's limit there is lambda_L.
  rep.K2_lower = lm < 1.0 ? rep.lambda_L * (1.0 - lm) / std::log(1.0 / lm) : rep.lambda_L;

  const RatioFn k1 = [&](const DensityMatrix& rho) {
    return Ratio{fisher_information(rho, sigma, 1.0, g), 2.0 * relative_entropy(rho, sigma)};
  };
  const RatioFn k2 = [&](const DensityMatrix& rho) {
    return Ratio{fisher_information(rho, sigma, 2.0, g), 2.0 * sandwiched_renyi(rho, sigma, 2.0).value};
  };
  auto kappa = [&](double alpha) {
    return RatioFn([&, alpha](const DensityMatrix& rho) {
      const Matrix x = gamma_pow(sigma, -1.0, rho.matrix());
      return Ratio{dirichlet_form(g, alpha, x), ent_fun(sigma, alpha, x)};
    });
  };
  rep.K = estimate(k1, sigma, opts, 1);
  rep.K2 = estimate(k2, sigma, opts, 2);
  rep.kappa1 = estimate(kappa(1.0), sigma, opts, 1);
  rep.kappa2 = estimate(kappa(2.0), sigma, opts, 2);
  return rep;
}

ComparisonConstants comparison_constants(double alpha0, double alpha1, double eps, const DensityMatrix& sigma,
                                         const std::vector<double>& omegas, double K) {
  if (!(alpha0 > 1.0 && alpha0 <= alpha1)) throw DomainError("comparison_constants: need 1 < alpha0 <= alpha1");
  if (!(K > 0.0)) throw DomainError("comparison_constants: K must be positive");
  const double lmin = sigma.min_eigenvalue();
  const double lmax = sigma.max_eigenvalue();
  if (!(eps > 0.0 && eps < lmin * lmin / 2.0)) {
    throw DomainError("comparison_constants: eps must lie in (0, lambda_min^2 / 2)");
  }
  const double r = std::sqrt(2.0 * eps);
  ComparisonConstants c;
  c.Lambda = lmax / lmin * std::exp(alpha0 * r * (2.0 * lmin - r) / (lmin * (lmin - r)));
  c.eta = 0.5;
  for (double w : omegas) {
    const double ew = std::exp(w);
    c.eta = std::min(c.eta, 2.0 * std::sqrt(ew / c.Lambda) / (1.0 + ew * c.Lambda));
  }
  c.T = std::log((alpha1 - 1.0) / (alpha0 - 1.0)) / (2.0 * K * c.eta);
  return c;
}

TheoremConstants theorem_constants(double alpha, double eps, const DensityMatrix& rho0, const DensityMatrix& sigma,
                                   double K, double gap, const std::vector<double>& omegas) {
  if (!(alpha > 0.0)) throw DomainError("theorem_constants: alpha must be positive");
  const ComparisonConstants cc = comparison_constants(2.0, std::max(alpha, 2.0), eps, sigma, omegas, K);
  TheoremConstants t;
  t.Lambda = cc.Lambda;
  t.eta = cc.eta;
  t.T = alpha > 2.0 ? std::log(alpha - 1.0) / (2.0 * K * cc.eta) : 0.0;
  const double d2 = sandwiched_renyi(rho0, sigma, 2.0).value;
  const double da = sandwiched_renyi(rho0, sigma, alpha).value;
  if (!(da > 0.0)) throw DomainError("theorem_constants: D_alpha(rho0) = 0, the prefactor is undefined");
  const double heaviside = alpha > 2.0 ? 1.0 : 0.0;
  t.C = std::expm1(d2) / da * std::exp(heaviside * 2.0 * gap * t.T);
  t.tau = alpha <= 2.0 ? 0.0 : t.T + std::max(0.0, std::log(relative_entropy(rho0, sigma) / eps) / (2.0 * K));
  return t;
}

std::vector<double> bohr_frequencies(const GnsGenerator& g) {
  std::vector<double> w;
  for (const auto& t : g.terms()) w.push_back(t.omega);
  return w;
}

double weight_function(double s, double beta) {
  if (!(beta > 1.0)) throw DomainError("weight_function: beta must exceed 1");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("weight_function: s must lie in [0, 1]");
  const double c = beta * beta / (2.0 * (beta - 1.0));
  return std::max(0.0, c * (std::min(s, 2.0 * (beta - 1.0) / beta - s) - std::max(-s, s - 2.0 / beta)));
}

Knots f_knots(double beta) {
  if (!(beta > 1.0)) throw DomainError("f_knots: beta must exceed 1");
  const double s1 = (beta - 1.0) / (beta * beta);
  return {s1, 1.0 - s1, beta <= 2.0 ? beta : beta / (beta - 1.0)};
}

HypercontractivityTrace hypercontractivity_monitor(const GnsGenerator& g, const DensityMatrix& rho0, double alpha0,
                                                   double alpha1, double eta, double K, double dt) {
  if (!(alpha0 > 1.0 && alpha0 <= alpha1)) throw DomainError("hypercontractivity_monitor: need 1 < alpha0 <= alpha1");
  if (!(eta > 0.0 && K > 0.0)) throw DomainError("hypercontractivity_monitor: eta and K must be positive");
  HypercontractivityTrace out;
  out.T = std::log((alpha1 - 1.0) / (alpha0 - 1.0)) / (2.0 * K * eta);
  const Trajectory traj = integrate(g, rho0, out.T, dt);
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.times[i];
    const double beta = 1.0 + (alpha0 - 1.0) * std::exp(eta * 2.0 * K * t);
    const SpectralDecomposition s = eig_hermitian(sandwiched_state(traj.states[i], g.sigma(), beta));
    double z = 0.0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) z += std::pow(std::max(s.values(k), 0.0), beta);
    out.t.push_back(t);
    out.beta.push_back(beta);
    out.F.push_back(std::log(z) / beta);
  }
  for (size_t i = 0; i + 1 < out.F.size(); ++i) out.max_increase = std::max(out.max_increase, out.F[i + 1] - out.F[i]);
  return out;
}

DensityMatrix state_within_entropy(const DensityMatrix& sigma, double eps, Rng& rng) {
  if (!(eps > 0.0)) throw DomainError("state_within_entropy: eps must be positive");
  const Matrix h = random_traceless_hermitian(sigma.dim(), rng);
  const double hn = h.norm();
  if (hn == 0.0) return sigma;
  double t = 0.5 * sigma.min_eigenvalue() / hn;
  for (int k = 0; k < 200; ++k, t *= 0.7) {
    const DensityMatrix rho = DensityMatrix::from(hermitian_part(sigma.matrix() + t * h));
    if (rho.strictly_positive() && relative_entropy(rho, sigma) <= eps) return rho;
  }
  return sigma;
}

ComparisonCheck comparison_check(const GnsGenerator& g, const DensityMatrix& rho0, double alpha0, double alpha1,
                                 double eps, double K, double dt) {
  const DensityMatrix& sigma = g.sigma();
  const double lmin = sigma.min_eigenvalue();
  const double d0 = relative_entropy(rho0, sigma);
  if (!(eps > 0.0 && eps < lmin * lmin / 2.0) || d0 > eps) {
    throw ValidationError({{"ent0", -1, "requires D(rho0 || sigma) <= eps < lambda_min(sigma)^2 / 2"}});
  }
  ComparisonCheck c;
  c.constants = comparison_constants(alpha0, alpha1, eps, sigma, bohr_frequencies(g), K);
  c.monitor = hypercontractivity_monitor(g, rho0, alpha0, alpha1, c.constants.eta, K, dt);
  const Trajectory traj = integrate(g, rho0, c.constants.T, dt, {.record_every = 1 << 30});
  c.d_alpha0_initial = sandwiched_renyi(rho0, sigma, alpha0).value;
  c.d_alpha1_final = sandwiched_renyi(traj.states.back(), sigma, alpha1).value;
  c.pass = c.d_alpha1_final <= c.d_alpha0_initial + 1e-9;
  return c;
}

}  // namespace lel
