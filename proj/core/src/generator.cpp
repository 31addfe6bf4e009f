#include "lel/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lel {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Grouping of eigenvalues equal within rel. 1e-10; returns a group id per index.
std::vector<int> eigen_groups(const RealVector& lambda) {
  std::vector<int> group(lambda.size(), 0);
  for (Eigen::Index k = 1; k < lambda.size(); ++k) {
    const bool same = lambda(k) - lambda(k - 1) <= 1e-10 * std::max(lambda(k), lambda(k - 1));
    group[k] = same ? group[k - 1] : group[k - 1] + 1;
  }
  return group;
}

Superoperator schrodinger_term(const Matrix& v, double factor) {
  const int n = static_cast<int>(v.rows());
  const Matrix id = Matrix::Identity(n, n);
  const Matrix vv = v.adjoint() * v;
  return {n, factor * (2.0 * kron(v.conjugate(), v) - kron(id, vv) - kron(vv.transpose(), id))};
}

}  // namespace

RawGenerator::RawGenerator(std::optional<DensityMatrix> sigma, Superoperator schrodinger, std::string label)
    : sigma_(std::move(sigma)), ldag_(std::move(schrodinger)), l_(ldag_.adjoint()), label_(std::move(label)) {
  const int n = ldag_.dim();
  if (sigma_ && sigma_->dim() != n) throw StructuralError("RawGenerator: sigma dimension mismatch");
  // Trace preservation: vec(I)^* L-dagger = 0.
  const Vector id = vec(Matrix::Identity(n, n));
  const double leak = (id.adjoint() * ldag_.matrix()).norm();
  if (leak > 1e-10 * std::max(1.0, ldag_.matrix().norm())) {
    throw ValidationError({{"trace_preserving", -1, "tr L-dagger(A) != 0, residual " + fmt(leak)}});
  }
}

Superoperator modular_superop(const DensityMatrix& sigma) {
  sigma.require_strictly_positive("modular");
  return Superoperator::sandwich(sigma.matrix(), sigma.power(-1.0));
}

double gns_asymmetry(const Superoperator& heisenberg, const DensityMatrix& sigma) {
  // <A, B>_1 = tr(sigma A* B) = vec(A)^* R vec(B) with R = right multiplication by sigma.
  const Matrix r = Superoperator::right(sigma.matrix()).matrix();
  const Matrix& l = heisenberg.matrix();
  const double scale = std::max(l.norm(), 1e-300);
  return (l.adjoint() * r - r * l).cwiseAbs().maxCoeff() / scale;
}

GnsGenerator build_gns(const DensityMatrix& sigma, const std::vector<JumpTerm>& terms, std::string label) {
  std::vector<ValidationFailure> fails;
  const int n = sigma.dim();
  if (!sigma.strictly_positive()) {
    fails.push_back({"sigma_strictly_positive", -1, "min eigenvalue " + fmt(sigma.min_eigenvalue())});
    throw ValidationError(std::move(fails));
  }
  if (terms.empty()) throw ValidationError({{"nonempty", -1, "no jump terms"}});

  const int m = static_cast<int>(terms.size());
  std::vector<Matrix> unit(m);
  for (int j = 0; j < m; ++j) {
    const auto& t = terms[j];
    if (t.V.rows() != n || t.V.cols() != n) {
      throw ValidationError({{"dimension", j, "jump operator is not " + std::to_string(n) + "x" + std::to_string(n)}});
    }
    const double norm = t.V.norm();
    if (!(norm > 0.0) || !t.V.allFinite()) throw ValidationError({{"nonzero", j, "jump operator is zero"}});
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) fails.push_back({"weight", j, "weight must be positive"});
    if (!std::isfinite(t.omega)) fails.push_back({"omega", j, "omega is not finite"});
    unit[j] = t.V / norm;
    const double tr = std::abs(unit[j].trace());
    if (tr > 1e-10) fails.push_back({"i.traceless", j, "|tr V| / ||V|| = " + fmt(tr)});
  }
  for (int j = 0; j < m; ++j) {
    for (int k = j + 1; k < m; ++k) {
      const double ov = std::abs(hs_inner(unit[j], unit[k]));
      if (ov > 1e-10) fails.push_back({"i.orthogonal", k, "<V_" + std::to_string(j) + ", V_k> = " + fmt(ov)});
    }
  }
  const Matrix s = sigma.matrix();
  const Matrix sinv = sigma.power(-1.0);
  for (int j = 0; j < m; ++j) {
    const double res = (s * unit[j] * sinv - std::exp(-terms[j].omega) * unit[j]).norm();
    if (res > 1e-8) fails.push_back({"iii.modular_eigenvector", j, "||sigma V sigma^-1 - e^-omega V|| = " + fmt(res)});
  }
  for (int j = 0; j < m; ++j) {
    const Matrix adj = unit[j].adjoint();
    int partner = -1;
    for (int k = 0; k < m && partner < 0; ++k)
      if ((adj - unit[k]).norm() <= 1e-8) partner = k;
    if (partner < 0) {
      fails.push_back({"ii.adjoint_pair", j, "no term equals V_j^*"});
      continue;
    }
    const auto& a = terms[j];
    const auto& b = terms[partner];
    if (std::abs(a.weight - b.weight) > 1e-10 * std::max(a.weight, b.weight)) {
      fails.push_back({"iv.pair_weight", j, "c_j != c_j' for partner " + std::to_string(partner)});
    }
    if (std::abs(a.omega + b.omega) > 1e-8 * std::max(1.0, std::abs(a.omega))) {
      fails.push_back({"iv.pair_frequency", j, "omega_j != -omega_j' for partner " + std::to_string(partner)});
    }
  }
  if (!fails.empty()) throw ValidationError(std::move(fails));

  std::vector<JumpTerm> eff(m);
  Superoperator ldag = Superoperator::zero(n);
  for (int j = 0; j < m; ++j) {
    eff[j] = {std::sqrt(terms[j].weight) * unit[j], terms[j].omega, terms[j].weight};
    ldag = ldag + schrodinger_term(eff[j].V, std::exp(-terms[j].omega / 2.0));
  }
  RawGenerator raw(sigma, ldag, std::move(label));

  const double lnorm = std::max(1.0, ldag.matrix().norm());
  const double stat = raw.apply_schrodinger(s).norm();
  if (stat > 1e-10 * lnorm) fails.push_back({"stationary", -1, "||L-dagger(sigma)|| = " + fmt(stat)});
  const Superoperator delta = modular_superop(sigma);
  const Matrix& l = raw.heisenberg().matrix();
  const double comm = (l * delta.matrix() - delta.matrix() * l).norm() /
                      std::max(1e-300, l.norm() * delta.matrix().norm());
  if (comm > 1e-8) fails.push_back({"modular_commutation", -1, "||[L, Delta]|| = " + fmt(comm)});
  const double asym = gns_asymmetry(raw.heisenberg(), sigma);
  if (asym > 1e-10) fails.push_back({"gns_self_adjoint", -1, "asymmetry " + fmt(asym)});
  if (!fails.empty()) throw ValidationError(std::move(fails));

  return GnsGenerator(std::move(raw), std::move(eff));
}

std::vector<JumpTerm> eigen_jump_terms(const DensityMatrix& sigma) {
  sigma.require_strictly_positive("eigen_jump_terms");
  const auto& sp = sigma.spectrum();
  const int n = sigma.dim();
  const auto group = eigen_groups(sp.values);
  std::vector<JumpTerm> out;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const double omega = group[k] == group[l] ? 0.0 : std::log(sp.values(l) / sp.values(k));
      out.push_back({sp.vectors.col(k) * sp.vectors.col(l).adjoint(), omega, 1.0});
    }
  }
  for (const Matrix& d : traceless_hermitian_basis(n)) {
    if (!d.isDiagonal()) continue;
    out.push_back({sp.vectors * d * sp.vectors.adjoint(), 0.0, 1.0});
  }
  return out;
}

GnsGenerator depolarizing_generator(const DensityMatrix& sigma, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("depolarizing_generator: gamma must be positive");
  sigma.require_strictly_positive("depolarizing_generator");
  const auto& sp = sigma.spectrum();
  const RealVector& lam = sp.values;
  const Matrix& u = sp.vectors;
  const int n = sigma.dim();
  const auto group = eigen_groups(lam);

  // Transfer l -> k at rate gamma lambda_k: |a_kl|^2 = gamma sqrt(lambda_k lambda_l) / 2.
  std::vector<JumpTerm> terms;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const double omega = group[k] == group[l] ? 0.0 : std::log(lam(l) / lam(k));
      terms.push_back({u.col(k) * u.col(l).adjoint(), omega, gamma * std::sqrt(lam(k) * lam(l)) / 2.0});
    }
  }
  // Remaining coherence decay gamma (lambda_k + lambda_l) / 2 from diagonal dephasing:
  // points x_k = sqrt(gamma lambda_k / 2) e_k have exactly these squared distances.
  RealMatrix y = RealMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) y(k, k) = std::sqrt(gamma * lam(k) / 2.0);
  y.rowwise() -= y.colwise().mean();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(y.transpose() * y);
  const RealMatrix coords = y * es.eigenvectors();
  const double cut = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int c = 0; c < n; ++c) {
    if (es.eigenvalues()(c) <= cut) continue;
    Matrix d = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = coords(k, c);
    terms.push_back({u * d * u.adjoint(), 0.0, es.eigenvalues()(c)});
  }
  std::ostringstream label;
  label << "depolarizing(gamma=" << gamma << ")";
  return build_gns(sigma, terms, label.str());
}

GnsGenerator qubit_xz_generator() {
  Matrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  return build_gns(DensityMatrix::maximally_mixed(2), {{x, 0.0, 1.0}, {z, 0.0, 1.0}}, "qubit-xz");
}

GnsGenerator random_gns_generator(int n, Rng& rng) {
  const DensityMatrix sigma = random_density(n, rng, 0.3);
  std::vector<JumpTerm> terms = eigen_jump_terms(sigma);
  // Off-diagonal terms come in (k,l), (l,k) order pairs; keep pair weights equal.
  std::vector<double> pair_weight(static_cast<size_t>(n * n), 0.0);
  int idx = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const int key = std::min(k, l) * n + std::max(k, l);
      if (pair_weight[key] == 0.0) pair_weight[key] = rng.uniform(0.3, 1.5);
      terms[idx++].weight = pair_weight[key];
    }
  }
  for (; idx < static_cast<int>(terms.size()); ++idx) terms[idx].weight = rng.uniform(0.3, 1.5);
  return build_gns(sigma, terms, "random-gns(n=" + std::to_string(n) + ")");
}

namespace {

PrimitivityReport primitivity(const Superoperator& l) {
  const int n = l.dim();
  Eigen::JacobiSVD<Matrix> svd(l.matrix(), Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double thr = 1e-9 * std::max(sv(0), 1e-300);
  PrimitivityReport rep;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= thr) {
      rep.kernel_basis.push_back(unvec(svd.matrixV().col(i), n));
      ++rep.kernel_dim;
    }
  }
  const Matrix id = Matrix::Identity(n, n);
  const bool unital = l.apply(id).norm() <= 1e-9 * std::max(1.0, sv(0));
  rep.primitive = rep.kernel_dim == 1 && unital;
  return rep;
}

SpectralGap gap_of(const Superoperator& l, const DensityMatrix& sigma) {
  sigma.require_strictly_positive("spectral_gap");
  const int n = sigma.dim();
  const Matrix q = sigma.power(0.25);
  const Matrix qi = sigma.power(-0.25);
  const Matrix t = Superoperator::sandwich(q, q).matrix();
  const Matrix ti = Superoperator::sandwich(qi, qi).matrix();
  Matrix sym = -(t * l.matrix() * ti);
  sym = hermitian_part(sym);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const RealVector& ev = es.eigenvalues();
  const double thr = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev(0) < -1e-6 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
    throw ValidationError({{"gns_positive", -1, "-L has negative eigenvalue " + fmt(ev(0))}});
  }
  int zeros = 0;
  int first = -1;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= thr) {
      ++zeros;
    } else if (first < 0) {
      first = static_cast<int>(i);
    }
  }
  if (zeros != 1 || first < 0) {
    throw ValidationError({{"primitive", -1, "kernel of L has dimension " + std::to_string(zeros)}});
  }
  SpectralGap out;
  out.gap = ev(first);
  out.spectrum.assign(ev.data(), ev.data() + ev.size());
  Matrix a = unvec(ti * es.eigenvectors().col(first), n);
  Matrix h = hermitian_part(a);
  Matrix k = hermitian_part(Complex(0.0, 1.0) * a);
  a = h.norm() >= k.norm() ? h : k;
  a /= std::sqrt(inner_s(a, a, sigma, 0.5).real());
  out.gap_eigenvector = a;
  return out;
}

}  // namespace

PrimitivityReport check_primitive(const RawGenerator& g) { return primitivity(g.heisenberg()); }
PrimitivityReport check_primitive(const GnsGenerator& g) { return primitivity(g.heisenberg()); }

SpectralGap spectral_gap(const GnsGenerator& g) { return gap_of(g.heisenberg(), g.sigma()); }

SpectralGap spectral_gap(const RawGenerator& g) {
  if (!g.sigma()) throw ValidationError({{"sigma", -1, "generator has no stationary state"}});
  return gap_of(g.heisenberg(), *g.sigma());
}

}  // namespace lel
