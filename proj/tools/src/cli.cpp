#include "lel_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "lel/balance_check.hpp"
#include "lel/constants.hpp"
#include "lel/divergence.hpp"
#include "lel/flow.hpp"
#include "lel/io.hpp"
#include "lel/parallel.hpp"
#include "lel/random.hpp"

namespace lel::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::validate, "validate"},   {Command::dbcheck, "dbcheck"},     {Command::fig1, "fig1"},
    {Command::simulate, "simulate"},   {Command::gradflow, "gradflow"},   {Command::constants, "constants"},
    {Command::compare, "compare"},
};

double parse_number(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + " '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// ---- generator loading ----------------------------------------------------

Matrix real_rows(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) throw ValidationError({{"format", -1, what + ": expected a nonempty array of rows"}});
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ValidationError({{"format", -1, what + ": matrix must be square"}});
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<size_t>(j)].get<double>();
  }
  return m;
}

Matrix json_matrix(const json& v, const fs::path& base, const std::string& what) {
  if (v.is_array()) return real_rows(v, what);
  if (v.is_object() && v.contains("csv")) {
    const fs::path file = base / v.at("csv").get<std::string>();
    if (!fs::exists(file)) throw UsageError(what + ": no such file " + file.string());
    const auto blocks = read_matrix_csv_file(file.string());
    if (v.contains("name")) return find_matrix(blocks, v.at("name").get<std::string>());
    if (blocks.empty()) throw ValidationError({{"format", -1, what + ": CSV holds no matrix block"}});
    return blocks.front().value;
  }
  if (v.is_object() && v.contains("re")) {
    Matrix m = real_rows(v.at("re"), what);
    if (v.contains("im")) {
      const Matrix im = real_rows(v.at("im"), what);
      if (im.rows() != m.rows()) throw ValidationError({{"format", -1, what + ": re/im size mismatch"}});
      m += Complex(0.0, 1.0) * im;
    }
    return m;
  }
  throw ValidationError({{"format", -1, what + ": expected rows, {re, im} or {csv, name}"}});
}

LoadedGenerator from_gns(GnsGenerator g) {
  RawGenerator raw = g.raw();
  return {std::move(raw), std::move(g)};
}

LoadedGenerator load_json_generator(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open generator file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError({{"format", -1, std::string("generator file is not valid JSON: ") + e.what()}});
  }
  try {
    const fs::path base = path.parent_path();
    const DensityMatrix sigma = DensityMatrix::from(json_matrix(doc.at("sigma"), base, "sigma"));
    std::vector<JumpTerm> terms;
    int idx = 0;
    for (const json& t : doc.at("terms")) {
      JumpTerm term;
      term.V = json_matrix(t.at("V"), base, "terms[" + std::to_string(idx) + "].V");
      term.omega = t.at("omega").get<double>();
      term.weight = t.value("weight", 1.0);
      terms.push_back(std::move(term));
      ++idx;
    }
    return from_gns(build_gns(sigma, terms, doc.value("label", path.stem().string())));
  } catch (const json::exception& e) {
    throw ValidationError({{"format", -1, std::string("generator file: ") + e.what()}});
  }
}

std::map<std::string, std::string> query_params(const std::string& q) {
  std::map<std::string, std::string> out;
  for (const std::string& kv : split(q, '&')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("builtin parameter '" + kv + "' needs key=value");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

LoadedGenerator load_builtin(const std::string& spec) {
  const auto q = spec.find('?');
  const std::string name = spec.substr(0, q);
  const auto params = query_params(q == std::string::npos ? std::string{} : spec.substr(q + 1));
  auto param = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  if (name == "carlen-maas") return {carlen_maas_counterexample(), std::nullopt};
  if (name == "qubit-xz") return from_gns(qubit_xz_generator());
  if (name == "depolarizing") {
    const double gamma = param("gamma") ? parse_number(*param("gamma"), "gamma") : 1.0;
    if (const auto s = param("sigma")) {
      std::vector<double> p;
      for (const std::string& x : split(*s, ',')) p.push_back(parse_number(x, "sigma entry"));
      return from_gns(depolarizing_generator(DensityMatrix::diagonal(p), gamma));
    }
    const int n = param("n") ? static_cast<int>(parse_number(*param("n"), "n")) : 2;
    if (n < 1) throw UsageError("depolarizing: n must be positive");
    return from_gns(depolarizing_generator(DensityMatrix::maximally_mixed(n), gamma));
  }
  if (name == "random") {
    const int n = param("n") ? static_cast<int>(parse_number(*param("n"), "n")) : 3;
    const auto seed = param("seed") ? static_cast<std::uint64_t>(parse_number(*param("seed"), "seed")) : 1ULL;
    if (n < 2) throw UsageError("random: n must be at least 2");
    Rng rng(seed);
    return from_gns(random_gns_generator(n, rng));
  }
  throw UsageError("unknown builtin generator '" + name + "'");
}

// ---- output helpers ---------------------------------------------------------

void emit(const RunConfig& c, std::ostream& out, const std::string& content) {
  if (c.out.empty()) {
    out << content;
  } else {
    write_file_atomic(c.out, content);
  }
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  for (const auto& cell : cells) {
    if (!row.empty()) row += ',';
    row += cell;
  }
  return row + '\n';
}

json failures_json(const std::vector<ValidationFailure>& failures, const std::string& what) {
  json list = json::array();
  for (const auto& f : failures) list.push_back({{"condition", f.condition}, {"index", f.index}, {"message", f.message}});
  if (failures.empty()) list.push_back({{"condition", "input"}, {"index", -1}, {"message", what}});
  return {{"status", "validation_failure"}, {"failures", list}};
}

const GnsGenerator& require_gns(const LoadedGenerator& g, const char* command) {
  if (!g.gns) {
    throw ValidationError({{"gns", -1, std::string(command) + " needs a generator with GNS detailed balance; '" +
                                           g.raw.label() + "' has none"}});
  }
  return *g.gns;
}

std::vector<double> alphas_or(const RunConfig& c, std::vector<double> fallback) {
  return c.alphas.empty() ? fallback : c.alphas;
}

DensityMatrix initial_state(const RunConfig& c, const DensityMatrix& sigma, std::optional<double> eps) {
  if (c.rho0 == "sigma") return sigma;
  if (c.rho0 == "random") {
    Rng rng(c.seed);
    if (eps) return state_within_entropy(sigma, *eps, rng);
    return random_density(sigma.dim(), rng, 0.05);
  }
  if (!fs::exists(c.rho0)) throw UsageError("rho0: no such file " + c.rho0);
  const auto blocks = read_matrix_csv_file(c.rho0);
  if (blocks.empty()) throw ValidationError({{"format", -1, "rho0: CSV holds no matrix block"}});
  const auto named = std::find_if(blocks.begin(), blocks.end(), [](const NamedMatrix& b) { return b.name == "rho0"; });
  const DensityMatrix rho = DensityMatrix::from((named != blocks.end() ? *named : blocks.front()).value);
  if (rho.dim() != sigma.dim()) throw ValidationError({{"dimension", -1, "rho0 and sigma differ in dimension"}});
  return rho;
}

// ---- commands -------------------------------------------------------------------

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const LoadedGenerator g = load_generator(c.generator);
  std::ostringstream os;
  os << "label: " << g.raw.label() << "\n";
  os << "dim: " << g.raw.dim() << "\n";
  const PrimitivityReport prim = check_primitive(g.raw);
  std::vector<ValidationFailure> failures;
  if (g.gns) {
    os << "GNS: pass\n";
  } else {
    const double r = check_gns(g.raw);
    os << "GNS: fail (residual " << format_double(r) << ")\n";
    failures.push_back({"gns", -1, "generator is not GNS-symmetric"});
  }
  os << "primitive: " << (prim.primitive ? "pass" : "fail") << " (kernel dimension " << prim.kernel_dim << ")\n";
  if (!prim.primitive) failures.push_back({"primitive", -1, "kernel of L is not spanned by the identity"});
  if (g.gns && prim.primitive) os << "gap: " << format_double(spectral_gap(*g.gns).gap) << "\n";
  emit(c, out, os.str());
  if (!failures.empty()) throw ValidationError(failures);
  return kExitOk;
}

int cmd_dbcheck(const RunConfig& c, std::ostream& out) {
  const LoadedGenerator g = load_generator(c.generator);
  const BalanceReport r = balance_report(g.raw, alphas_or(c, parse_alphas("0.25:6:0.25")));
  json srd = json::array();
  for (const auto& e : r.srd) {
    json row = {{"alpha", e.alpha}, {"residual", e.residual ? json(*e.residual) : json(nullptr)}};
    if (!e.warning.empty()) row["warning"] = e.warning;
    srd.push_back(row);
  }
  const json doc = {
      {"label", g.raw.label()},
      {"gns", {{"residual", r.gns_residual}, {"pass", r.gns}}},
      {"kms", {{"residual", r.kms_residual}, {"pass", r.kms}}},
      {"bkm", {{"residual", r.bkm_residual}, {"pass", r.bkm}}},
      {"srd", srd},
      {"srd_all", r.srd_all},
  };
  emit(c, out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_fig1(const RunConfig& c, std::ostream& out) {
  const LoadedGenerator g = load_generator(c.generator);
  std::string csv = "alpha,residual\n";
  for (const Fig1Row& row : fig1_sweep(g.raw, alphas_or(c, parse_alphas("0.25:6:0.25")))) {
    csv += csv_row({format_double(row.alpha), format_double(row.residual)});
  }
  emit(c, out, csv);
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const LoadedGenerator lg = load_generator(c.generator);
  const GnsGenerator& g = require_gns(lg, "simulate");
  const DensityMatrix rho0 = initial_state(c, g.sigma(), std::nullopt);
  const Trajectory traj = integrate(g, rho0, c.t_end, c.dt, {.record_every = c.record_every});
  const DivergenceTrace trace = divergence_trace(traj, g, alphas_or(c, {1.0, 2.0}));
  for (const auto& w : trace.warnings) err << "warning: " << w << "\n";
  std::string csv = "t,alpha,D,I\n";
  for (const TraceRow& r : trace.rows) {
    csv += csv_row({format_double(r.t), format_double(r.alpha), format_double(r.d), format_double(r.fisher)});
  }
  emit(c, out, csv);
  return kExitOk;
}

int cmd_gradflow(const RunConfig& c, std::ostream& out) {
  const LoadedGenerator lg = load_generator(c.generator);
  const GnsGenerator& g = require_gns(lg, "gradflow");
  const std::vector<double> alphas = alphas_or(c, {0.5, 1.0, 1.5, 2.0, 3.0});
  const auto samples = static_cast<size_t>(std::max(0, c.samples));
  std::vector<DensityMatrix> states;
  Rng root(c.seed);
  for (size_t i = 0; i < samples; ++i) {
    Rng r = root.fork(i);
    states.push_back(random_density(g.dim(), r, 0.05));
  }
  std::vector<double> residual(samples * alphas.size());
  parallel_for(residual.size(), [&](size_t k) {
    residual[k] = gradient_flow_residual(g, states[k / alphas.size()], alphas[k % alphas.size()]);
  });
  std::string csv = "sample,alpha,residual\n";
  for (size_t k = 0; k < residual.size(); ++k) {
    csv += csv_row({std::to_string(k / alphas.size()), format_double(alphas[k % alphas.size()]),
                    format_double(residual[k])});
  }
  emit(c, out, csv);
  return kExitOk;
}

json estimate_json(const RatioEstimate& e) {
  return {{"value", e.value}, {"sampled", e.sampled}, {"local", e.local}};
}

int cmd_constants(const RunConfig& c, std::ostream& out) {
  const LoadedGenerator lg = load_generator(c.generator);
  const GnsGenerator& g = require_gns(lg, "constants");
  const ConstantsReport r =
      lsi_constants(g, {.starts = c.starts, .iterations = c.iterations, .seed = c.seed});
  json doc = {
      {"label", g.label()},
      {"lambda_L", r.lambda_L},
      {"lambda_min", r.lambda_min},
      {"K_lower", r.K_lower},
      {"K_upper", r.K_upper},
      {"K2_lower", r.K2_lower},
      {"K", estimate_json(r.K)},
      {"K2", estimate_json(r.K2)},
      {"kappa1", estimate_json(r.kappa1)},
      {"kappa2", estimate_json(r.kappa2)},
  };
  if (c.eps) doc["t2_bound"] = {{"eps", *c.eps}, {"t", r.t2_bound(*c.eps)}};
  emit(c, out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
  const LoadedGenerator lg = load_generator(c.generator);
  const GnsGenerator& g = require_gns(lg, "compare");
  const DensityMatrix& sigma = g.sigma();
  const double lmin = sigma.min_eigenvalue();
  const double eps = c.eps.value_or(lmin * lmin / 8.0);
  const double gap = spectral_gap(g).gap;
  const double K = c.K.value_or(gap / (1.0 - std::log(std::sqrt(lmin))));
  const DensityMatrix rho0 = initial_state(c, sigma, eps);
  const ComparisonCheck chk = comparison_check(g, rho0, c.alpha0, c.alpha1, eps, K, c.dt);
  json doc = {
      {"label", g.label()},
      {"alpha0", c.alpha0},
      {"alpha1", c.alpha1},
      {"eps", eps},
      {"K", K},
      {"Lambda", chk.constants.Lambda},
      {"eta", chk.constants.eta},
      {"T", chk.constants.T},
      {"F_max_increase", chk.monitor.max_increase},
      {"monitor_points", chk.monitor.t.size()},
      {"D_alpha0_initial", chk.d_alpha0_initial},
      {"D_alpha1_final", chk.d_alpha1_final},
      {"pass", chk.pass},
  };
  if (relative_entropy(rho0, sigma) > 0.0 && sandwiched_renyi(rho0, sigma, c.alpha1).value > 0.0) {
    const TheoremConstants th = theorem_constants(c.alpha1, eps, rho0, sigma, K, gap, bohr_frequencies(g));
    doc["theorem"] = {{"alpha", c.alpha1}, {"C", th.C}, {"tau", th.tau}, {"T", th.T}};
  }
  emit(c, out, doc.dump(2) + "\n");
  if (!chk.pass) throw ValidationError({{"comparison", -1, "D_alpha1(rho_T) exceeds D_alpha0(rho_0)"}});
  return kExitOk;
}

void check_config(const RunConfig& c) {
  if (c.generator.empty()) throw UsageError("--generator is required");
  if (c.generator.rfind("builtin:", 0) != 0 && !fs::exists(c.generator)) {
    throw UsageError("generator file not found: " + c.generator);
  }
  for (double a : c.alphas) {
    if (!(a > 0.0)) throw UsageError("alpha values must be positive");
  }
  if (!(c.dt > 0.0)) throw UsageError("--dt must be positive");
  if (!(c.t_end >= 0.0)) throw UsageError("--t-end must be nonnegative");
  if (c.record_every < 1) throw UsageError("--record-every must be at least 1");
  if (c.eps && !(*c.eps > 0.0)) throw UsageError("--eps must be positive");
}

// Flag values a --config file may set; command line wins.
void apply_json(RunConfig& c, const json& j, const std::set<std::string>& given) {
  auto take = [&](const char* key, auto& field) {
    if (!j.contains(key) || given.count(key)) return;
    field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  take("generator", c.generator);
  take("rho0", c.rho0);
  take("t-end", c.t_end);
  take("dt", c.dt);
  take("record-every", c.record_every);
  take("seed", c.seed);
  take("samples", c.samples);
  take("alpha0", c.alpha0);
  take("alpha1", c.alpha1);
  take("starts", c.starts);
  take("iterations", c.iterations);
  take("out", c.out);
  if (j.contains("eps") && !given.count("eps")) c.eps = j.at("eps").get<double>();
  if (j.contains("K") && !given.count("K")) c.K = j.at("K").get<double>();
  if (j.contains("alphas") && !given.count("alphas")) {
    const json& a = j.at("alphas");
    c.alphas = a.is_string() ? parse_alphas(a.get<std::string>()) : a.get<std::vector<double>>();
  }
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommands) {
    if (name == n) return cmd;
  }
  return std::nullopt;
}

const char* command_name(Command c) {
  for (const auto& [cmd, n] : kCommands) {
    if (cmd == c) return n;
  }
  return "?";
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("alpha range must be start:stop:step");
    const double start = parse_number(parts[0], "alpha start");
    const double stop = parse_number(parts[1], "alpha stop");
    const double step = parse_number(parts[2], "alpha step");
    if (!(step > 0.0) || stop < start) throw UsageError("alpha range needs step > 0 and stop >= start");
    // Index-based grid so 0.25:6:0.25 lands exactly on 2.0 and includes 6.
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
  } else {
    for (const std::string& s : split(text, ',')) {
      if (!s.empty()) out.push_back(parse_number(s, "alpha"));
    }
  }
  if (out.empty()) throw UsageError("empty alpha list");
  return out;
}

LoadedGenerator load_generator(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return load_builtin(spec.substr(8));
  return load_json_generator(spec);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check_config(config);
    switch (config.command) {
      case Command::validate: return cmd_validate(config, out);
      case Command::dbcheck: return cmd_dbcheck(config, out);
      case Command::fig1: return cmd_fig1(config, out);
      case Command::simulate: return cmd_simulate(config, out, err);
      case Command::gradflow: return cmd_gradflow(config, out);
      case Command::constants: return cmd_constants(config, out);
      case Command::compare: return cmd_compare(config, out);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << failures_json(e.failures(), e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const StructuralError& e) {
    err << failures_json({{"structure", -1, e.what()}}, e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lindblad detailed-balance and entropy-decay toolkit"};
  app.require_subcommand(1);

  RunConfig c;
  std::string alphas, config_path;
  double eps = 0.0, K = 0.0;
  std::map<std::string, CLI::Option*> opts;
  opts["generator"] = app.add_option("-g,--generator", c.generator, "generator JSON file or builtin:<name>[?k=v&...]");
  opts["rho0"] = app.add_option("--rho0", c.rho0, "initial state: random | sigma | matrix CSV path");
  opts["alphas"] = app.add_option("--alphas", alphas, "alpha grid, start:stop:step or a comma list");
  opts["t-end"] = app.add_option("--t-end", c.t_end, "integration horizon");
  opts["dt"] = app.add_option("--dt", c.dt, "time step");
  opts["record-every"] = app.add_option("--record-every", c.record_every, "keep every k-th step");
  opts["eps"] = app.add_option("--eps", eps, "entropy budget for the initial state");
  opts["seed"] = app.add_option("--seed", c.seed, "random seed");
  opts["samples"] = app.add_option("--samples", c.samples, "number of random states (gradflow)");
  opts["alpha0"] = app.add_option("--alpha0", c.alpha0, "starting order (compare)");
  opts["alpha1"] = app.add_option("--alpha1", c.alpha1, "target order (compare)");
  opts["K"] = app.add_option("--K", K, "log-Sobolev constant used by compare (default: lower bound)");
  opts["starts"] = app.add_option("--starts", c.starts, "optimizer restarts (constants)");
  opts["iterations"] = app.add_option("--iterations", c.iterations, "optimizer iterations per start (constants)");
  opts["out"] = app.add_option("-o,--out", c.out, "output file, written atomically (default stdout)");
  app.add_option("--config", config_path, "JSON file with any of the flag values");

  for (const auto& [cmd, name] : kCommands) {
    app.add_subcommand(name, std::string("run ") + name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  c.command = *parse_command(app.get_subcommands().front()->get_name());
  std::set<std::string> given;
  for (const auto& [key, opt] : opts) {
    if (opt->count() > 0) given.insert(key);
  }
  try {
    if (given.count("alphas")) c.alphas = parse_alphas(alphas);
    if (given.count("eps")) c.eps = eps;
    if (given.count("K")) c.K = K;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot open config " + config_path);
      apply_json(c, json::parse(in), given);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: bad config: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(c, out, err);
}

}  // namespace lel::cli
