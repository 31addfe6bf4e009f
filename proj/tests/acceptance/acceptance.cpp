// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lel/balance_check.hpp"
#include "lel/constants.hpp"
#include "lel/divergence.hpp"
#include "lel/flow.hpp"
#include "lel/noncomm_ops.hpp"
#include "lel_cli/cli.hpp"
#include "support/testing.hpp"

namespace {

using namespace lel;
using testing::max_abs;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(const Matrix& a, const Matrix& b) { return max_abs(a - b) / std::max(1.0, max_abs(b)); }

// ---- 1 -------------------------------------------------------------------

Outcome srd_sweep_check() {
  const RawGenerator g = carlen_maas_counterexample();
  std::vector<double> grid;
  for (int i = 1; i <= 24; ++i) grid.push_back(0.25 * i);
  double at_two = 1e300, min_other = 1e300;
  for (const Fig1Row& row : fig1_sweep(g, grid)) {
    if (row.alpha == 2.0) at_two = row.residual;
    else min_other = std::min(min_other, row.residual);
  }
  const double kms = check_kms(g), gns = check_gns(g);
  Outcome o;
  o.pass = at_two <= 1e-9 && min_other >= 1e-3 && kms <= 1e-10 && gns >= 1e-3;
  o.detail = "srd(2)=" + fmt("%.3g", at_two) + " min other=" + fmt("%.4g", min_other) + " kms=" + fmt("%.3g", kms) +
             " gns=" + fmt("%.4g", gns);
  return o;
}

// ---- 2 -------------------------------------------------------------------

Outcome gradient_flow_identity() {
  double worst = 0.0;
  int count = 0;
  Rng root(20);
  for (int n : {2, 3, 4}) {
    Rng gr = root.fork(static_cast<std::uint64_t>(n));
    const GnsGenerator g = n == 2 ? qubit_xz_generator() : random_gns_generator(n, gr);
    for (int i = 0; i < 100; ++i) {
      Rng r = gr.fork(static_cast<std::uint64_t>(100 + i));
      const DensityMatrix rho = random_density(n, r, 0.02);
      for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        worst = std::max(worst, gradient_flow_residual(g, rho, a));
        ++count;
      }
    }
  }
  return {worst <= 1e-8, std::to_string(count) + " cases, max residual " + fmt("%.3g", worst)};
}

// ---- 3 -------------------------------------------------------------------

Outcome chain_rule() {
  double worst = 0.0;
  Rng root(30);
  for (int i = 0; i < 1000; ++i) {
    Rng r = root.fork(static_cast<std::uint64_t>(i));
    const int n = testing::random_dim(r, 2, 5);
    const Matrix v = random_ginibre(n, r);
    const Matrix x = random_density(n, r, 0.1).matrix();
    worst = std::max(worst, chain_rule_residual(v, x, r.uniform(-3.0, 3.0)));
  }
  return {worst <= 1e-9, "1000 cases, max residual " + fmt("%.3g", worst)};
}

// ---- 4 -------------------------------------------------------------------

SpectralDecomposition spectral_power(const DensityMatrix& s, double p) {
  SpectralDecomposition out = s.spectrum();
  out.values = out.values.array().pow(p).matrix();
  return out;
}

Outcome kernel_oracles() {
  double w_mop = 0.0, w_inv = 0.0, w_weight = 0.0;
  Rng root(40);
  for (int i = 0; i < 100; ++i) {
    Rng r = root.fork(static_cast<std::uint64_t>(i));
    const int n = testing::random_dim(r, 2, 4);
    const Matrix x = testing::random_positive(n, r);
    const double w = r.uniform(-3.0, 3.0);
    const Matrix a = random_ginibre(n, r);
    w_mop = std::max(w_mop, rel_err(mop(x, w).apply(a), testing::mop_quadrature(x, w, a)));
    w_inv = std::max(w_inv, rel_err(mop_inv(x, w).apply(a), testing::mop_inv_quadrature(x, w, a)));
    // W = [sigma^{1/a}]_0 o [sigma^{(a-1)/a}]_0^{-1} o Gamma_sigma^{2(a-1)/a}
    const DensityMatrix s = random_density(n, r, 0.1);
    const double al = r.uniform(0.25, 6.0);
    const KernelOperator composed = mop(spectral_power(s, 1.0 / al), 0.0)
                                        .compose(mop_inv(spectral_power(s, (al - 1.0) / al), 0.0))
                                        .compose(gamma_op(s, 2.0 * (al - 1.0) / al));
    w_weight = std::max(w_weight, rel_err(weight_operator(s, al).apply(a), composed.apply(a)));
  }
  Outcome o;
  o.pass = w_mop <= 1e-8 && w_inv <= 1e-8 && w_weight <= 1e-8;
  o.detail = "100 cases, max rel err mop " + fmt("%.3g", w_mop) + ", inverse " + fmt("%.3g", w_inv) + ", weight " +
             fmt("%.3g", w_weight);
  return o;
}

// ---- 5 -------------------------------------------------------------------

Outcome monotonicity_and_decay() {
  const std::vector<double> alphas{0.5, 1.0, 2.0, 4.0};
  double max_increase = 0.0, rate_lo = 1e300, rate_hi = 0.0, envelope_excess = -1e300;
  int bad_fits = 0, out_of_band = 0;
  Rng root(50);
  for (int i = 0; i < 50; ++i) {
    Rng r = root.fork(static_cast<std::uint64_t>(i));
    const GnsGenerator g = random_gns_generator(2 + i % 3, r);
    const double gap = spectral_gap(g).gap;
    const double dt = 0.02 / g.raw().schrodinger().matrix().norm();
    const DensityMatrix rho0 = random_density(g.dim(), r, 0.05);
    // Long enough for D to reach the fit floor, so the tail window sits as late as precision allows.
    const Trajectory tr = integrate(g, rho0, 18.0 / gap, dt, {.record_every = 10});
    const DivergenceTrace trace = divergence_trace(tr, g, alphas);
    for (double a : alphas) {
      const auto rows = trace.for_alpha(a);
      max_increase = std::max(max_increase, analyze_trace(rows).max_increase);
      const DecayFit fit = fit_decay_rate(rows);
      if (fit.verdict == FitVerdict::stationary) {
        ++bad_fits;
        continue;
      }
      const double q = fit.rate / (2.0 * gap);
      if (q < 0.98 || q > 1.05) ++out_of_band;
      rate_lo = std::min(rate_lo, q);
      rate_hi = std::max(rate_hi, q);
      if (a == 2.0) {
        // Checked with 1e-12 absolute slack: D_2 = log(Z) carries ~1e-15 absolute roundoff.
        for (const auto& row : rows) {
          envelope_excess = std::max(envelope_excess, row.d - d2_envelope(rows.front().d, gap, row.t));
        }
      }
    }
  }
  Outcome o;
  o.pass = max_increase <= 1e-9 && bad_fits == 0 && rate_lo >= 0.98 && rate_hi <= 1.05 && envelope_excess <= 1e-12;
  o.detail = "50 flows, max increase " + fmt("%.3g", max_increase) + ", rate/2gap in [" + fmt("%.5f", rate_lo) + ", " +
             fmt("%.5f", rate_hi) + "] (" + std::to_string(out_of_band) + "/200 fits outside [0.98, 1.05])" +
             ", envelope excess " + fmt("%.3g", envelope_excess);
  if (bad_fits) o.detail += ", " + std::to_string(bad_fits) + " fits declined";
  return o;
}

// ---- 6 -------------------------------------------------------------------

Outcome constants_brackets() {
  Outcome o;
  const std::vector<std::pair<std::string, GnsGenerator>> gens{
      {"qubit-xz", qubit_xz_generator()},
      {"depolarizing", depolarizing_generator(DensityMatrix::diagonal({1.0 / 6, 2.0 / 6, 3.0 / 6}), 1.0)}};
  for (const auto& [name, g] : gens) {
    const ConstantsReport r = lsi_constants(g);
    const bool ok = r.K_lower <= r.K.value && r.K.value <= r.lambda_L + 1e-6 && r.K2.value >= r.K2_lower - 1e-6 &&
                    r.kappa1.value >= r.kappa2.value - 1e-6 && std::abs(r.kappa1.value - r.K.value / 2.0) <= 1e-4;
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += name + ": K " + fmt("%.6f", r.K_lower) + " <= " + fmt("%.6f", r.K.value) + " <= " +
                fmt("%.6f", r.lambda_L) + ", K2 " + fmt("%.6f", r.K2.value) + " >= " + fmt("%.6f", r.K2_lower) +
                ", kappa1 " + fmt("%.6f", r.kappa1.value) + " kappa2 " + fmt("%.6f", r.kappa2.value);
  }
  return o;
}

// ---- 7 -------------------------------------------------------------------

Outcome inequality_suites() {
  double eq_err = 0.0;
  int poincare_fail = 0, pinsker_fail = 0, fisher_fail = 0;
  Rng root(70);
  for (int i = 0; i < 1000; ++i) {
    Rng r = root.fork(static_cast<std::uint64_t>(i));
    const GnsGenerator g = random_gns_generator(2 + i % 3, r);
    const int n = g.dim();
    if (i < 30) {
      const SpectralGap sg = spectral_gap(g);
      const InequalityCheck c = poincare_check(g, sg.gap_eigenvector, sg.gap);
      eq_err = std::max(eq_err, std::abs(c.lhs - c.rhs));
    }
    Matrix a = random_hermitian(n, r);
    a -= (g.sigma().matrix() * a).trace() * Matrix::Identity(n, n);
    if (!poincare_check(g, a).pass) ++poincare_fail;
    const DensityMatrix rho = random_density(n, r, 0.02);
    const double tn = trace_norm(rho.matrix() - g.sigma().matrix());
    if (relative_entropy(rho, g.sigma()) < 0.5 * tn * tn - 1e-12) ++pinsker_fail;
    if (!fisher2_bound_check(g, rho).pass) ++fisher_fail;
  }
  Outcome o;
  o.pass = eq_err <= 1e-9 && poincare_fail == 0 && pinsker_fail == 0 && fisher_fail == 0;
  o.detail = "1000 samples each, Poincare equality err " + fmt("%.3g", eq_err) + ", violations poincare/pinsker/fisher2 " +
             std::to_string(poincare_fail) + "/" + std::to_string(pinsker_fail) + "/" + std::to_string(fisher_fail);
  return o;
}

// ---- 8 -------------------------------------------------------------------

Outcome comparison_theorem() {
  Outcome o;
  const std::vector<std::pair<std::string, GnsGenerator>> gens{
      {"qubit-xz", qubit_xz_generator()},
      {"depolarizing", depolarizing_generator(DensityMatrix::diagonal({1.0 / 6, 2.0 / 6, 3.0 / 6}), 1.0)}};
  double worst_f = 0.0, worst_gap = -1e300;
  Rng root(80);
  for (const auto& [name, g] : gens) {
    const ConstantsReport rep = lsi_constants(g, {.starts = 1, .iterations = 1});
    const double eps = std::pow(g.sigma().min_eigenvalue(), 2) / 8.0;
    for (auto [a0, a1] : std::vector<std::pair<double, double>>{{2.0, 3.0}, {2.0, 4.0}, {1.5, 6.0}}) {
      Rng r = root.fork(static_cast<std::uint64_t>(o.detail.size()));
      const DensityMatrix rho0 = state_within_entropy(g.sigma(), eps, r);
      const ComparisonCheck c = comparison_check(g, rho0, a0, a1, eps, rep.K_lower, 0.01);
      worst_f = std::max(worst_f, c.monitor.max_increase);
      worst_gap = std::max(worst_gap, c.d_alpha1_final - c.d_alpha0_initial);
      o.pass = o.pass && c.pass && c.monitor.max_increase <= 1e-8;
      o.detail += ".";
    }
  }
  const ComparisonConstants mm = comparison_constants(2.0, 3.0, 1.0 / 32.0, DensityMatrix::maximally_mixed(2), {0.0}, 1.0);
  const double lambda = std::exp(3.0), eta = 2.0 * std::exp(-1.5) / (1.0 + std::exp(3.0));
  const bool closed = std::abs(mm.Lambda - lambda) <= 1e-12 * lambda && std::abs(mm.eta - eta) <= 1e-15;
  o.pass = o.pass && closed;
  o.detail = "6 runs, max F increase " + fmt("%.3g", worst_f) + ", max D_a1(T)-D_a0(0) " + fmt("%.3g", worst_gap) +
             ", Lambda " + fmt("%.12f", mm.Lambda) + " eta " + fmt("%.8f", mm.eta);
  return o;
}

// ---- 9 -------------------------------------------------------------------

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lel_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::vector<std::vector<std::string>> runs{
      {"fig1", "--generator", "builtin:carlen-maas", "--alphas", "0.25:6:0.25"},
      {"simulate", "--generator", "builtin:random?n=3&seed=5", "--seed", "7", "--t-end", "2", "--dt", "0.005",
       "--record-every", "10", "--alphas", "0.5,1,2,4"},
      {"gradflow", "--generator", "builtin:random?n=4&seed=6", "--seed", "8", "--samples", "40"}};
  Outcome o;
  int idx = 0;
  for (const auto& base : runs) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path file = dir / (std::to_string(idx) + "_" + std::to_string(rep) + ".csv");
      std::vector<std::string> args{"lel"};
      args.insert(args.end(), base.begin(), base.end());
      args.insert(args.end(), {"--out", file.string()});
      std::vector<const char*> argv;
      for (const auto& s : args) argv.push_back(s.c_str());
      std::ostringstream out, err;
      const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
      const std::string bytes = slurp(file);
      if (code != 0 || bytes.empty()) o.pass = false;
      if (rep == 0) first = bytes;
      else if (bytes != first) o.pass = false;
    }
    ++idx;
  }
  fs::remove_all(dir);
  o.detail = "fig1, simulate, gradflow run twice each";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "weighted-balance sweep on the two-level counterexample", 5, srd_sweep_check},
      {2, "gradient-flow identity", 30, gradient_flow_identity},
      {3, "chain rule", 5, chain_rule},
      {4, "kernel vs quadrature and composition oracles", 20, kernel_oracles},
      {5, "monotonicity, decay rate and Renyi-2 envelope", 120, monotonicity_and_decay},
      {6, "log-Sobolev constant brackets", 60, constants_brackets},
      {7, "Poincare, Pinsker and Fisher-2 inequalities", 30, inequality_suites},
      {8, "comparison theorem", 60, comparison_theorem},
      {9, "determinism of CSV artifacts", 300, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %d %s: %s [%.2fs / %.0fs budget%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
