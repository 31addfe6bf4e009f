#include "lel/balance_check.hpp"

#include <cmath>

#include "lel/noncomm_ops.hpp"
#include "lel/parallel.hpp"

namespace lel {

namespace {

const DensityMatrix& stationary(const RawGenerator& g) {
  if (!g.sigma()) throw ValidationError({{"sigma", -1, "generator has no stationary state"}});
  return g.sigma()->require_strictly_positive("balance_check");
}

double srd_raw(const RawGenerator& g, const DensityMatrix& sigma, double alpha) {
  const KernelOperator w = weight_operator(sigma, alpha);
  const Superoperator ws = w.to_superop();
  const Superoperator wi = w.inverse().to_superop();
  return superop_trace_norm(ws * g.heisenberg() * wi - g.schrodinger());
}

}  // namespace

double check_kms(const RawGenerator& g) {
  const DensityMatrix& sigma = stationary(g);
  const Matrix h = sigma.power(0.5);
  const Matrix hi = sigma.power(-0.5);
  const Superoperator gam = Superoperator::sandwich(h, h);
  const Superoperator gam_inv = Superoperator::sandwich(hi, hi);
  const double diff = superop_frobenius(gam_inv * g.schrodinger() * gam - g.heisenberg());
  return diff / std::max(superop_frobenius(g.heisenberg()), 1e-300);
}

double check_gns(const RawGenerator& g) { return gns_asymmetry(g.heisenberg(), stationary(g)); }

double srd_residual_raw(const RawGenerator& g, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("srd residual: alpha must be positive");
  return srd_raw(g, stationary(g), alpha);
}

double srd_residual(const RawGenerator& g, double alpha) {
  return srd_residual_raw(g, alpha) / std::max(superop_trace_norm(g.heisenberg()), 1e-300);
}

double check_bkm(const RawGenerator& g) { return srd_residual(g, 1.0); }

std::vector<SrdEntry> check_srd(const RawGenerator& g, const std::vector<double>& alphas) {
  stationary(g);
  const double lnorm = std::max(superop_trace_norm(g.heisenberg()), 1e-300);
  std::vector<SrdEntry> out(alphas.size());
  parallel_for(alphas.size(), [&](size_t i) {
    out[i].alpha = alphas[i];
    if (!(alphas[i] > 0.0)) {
      out[i].warning = "alpha <= 0 skipped";
      return;
    }
    out[i].residual = srd_raw(g, *g.sigma(), alphas[i]) / lnorm;
  });
  return out;
}

BalanceReport balance_report(const RawGenerator& g, const std::vector<double>& alphas) {
  BalanceReport r;
  r.gns_residual = check_gns(g);
  r.kms_residual = check_kms(g);
  r.bkm_residual = check_bkm(g);
  r.srd = check_srd(g, alphas);
  r.gns = r.gns_residual <= kBalanceThreshold;
  r.kms = r.kms_residual <= kBalanceThreshold;
  r.bkm = r.bkm_residual <= kBalanceThreshold;
  r.srd_all = true;
  for (const auto& e : r.srd)
    if (e.residual && *e.residual > kBalanceThreshold) r.srd_all = false;
  return r;
}

CarlenMaasParts carlen_maas_parts() {
  const double s2 = std::sqrt(2.0), s5 = std::sqrt(5.0);
  Vector e0(2), e1(2), psi(2), phi(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  psi << 1.0 / s2, 1.0 / s2;
  phi << 1.0 / s5, 2.0 / s5;
  const Matrix k1 = psi * e0.adjoint();
  const Matrix k2 = phi * e1.adjoint();
  Matrix sm(2, 2);
  sm << 2.0, 3.0, 3.0, 5.0;
  const DensityMatrix sigma = DensityMatrix::from(sm / 7.0);
  const Matrix h = sigma.power(0.5);
  const Matrix hi = sigma.power(-0.5);
  const Matrix kt1 = h * k1.adjoint() * hi;
  const Matrix kt2 = h * k2.adjoint() * hi;
  auto heis = [](const Matrix& a, const Matrix& b) {
    return Superoperator::sandwich(a.adjoint(), a) + Superoperator::sandwich(b.adjoint(), b);
  };
  return {sigma, heis(k1, k2), heis(kt1, kt2)};
}

RawGenerator carlen_maas_counterexample() {
  const CarlenMaasParts p = carlen_maas_parts();
  const Superoperator l = p.channel_tilde * p.channel - Superoperator::identity(2);
  return RawGenerator(p.sigma, l.adjoint(), "carlen-maas");
}

std::vector<Fig1Row> fig1_sweep(const RawGenerator& g, const std::vector<double>& alphas) {
  const DensityMatrix& sigma = stationary(g);
  for (double a : alphas)
    if (!(a > 0.0)) throw DomainError("fig1_sweep: alpha grid must be strictly positive");
  std::vector<Fig1Row> rows(alphas.size());
  parallel_for(alphas.size(), [&](size_t i) { rows[i] = {alphas[i], srd_raw(g, sigma, alphas[i])}; });
  return rows;
}

}  // namespace lel
