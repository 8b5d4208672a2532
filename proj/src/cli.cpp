#include "hartree/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "hartree/diagnostics.hpp"
#include "hartree/greens.hpp"
#include "hartree/io.hpp"
#include "hartree/linearized.hpp"

namespace hartree {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCollapse = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitContract = 4;

struct RunConfig {
  std::string family = "limit";
  double m = 0.5;
  double c = 8.0;
  double N = 1.0;
  double L = 12.0;
  int n = 96;
  double tol = 1e-9;
  int max_iter = 3000;
  double step = 0.9;
  std::uint64_t seed = 1;
  bool symmetrize = false;
  std::string out = "out";
  std::string label = "state";
  std::string state_file;
  bool solve_inline = false;
  int kernel_eigs = 5;
  std::vector<double> c_list = {4, 8, 16, 32};
  double lambda = 0.0;
  double delta = 0.0;
  int runs = 10;
  int n_fine = 128;
};

ProblemSpec spec_from(const RunConfig& cfg) {
  if (cfg.family == "original") return ProblemSpec::original(cfg.m, cfg.N);
  if (cfg.family == "rescaled") return ProblemSpec::rescaled(cfg.m, cfg.c);
  if (cfg.family == "limit") return ProblemSpec::limit(cfg.m);
  if (cfg.family == "massless") return ProblemSpec::massless();
  throw std::invalid_argument("unknown family: " + cfg.family);
}

SolveOptions options_from(const RunConfig& cfg) {
  SolveOptions opts;
  opts.max_iterations = cfg.max_iter;
  opts.tolerance = cfg.tol;
  opts.step = cfg.step;
  opts.seed = cfg.seed;
  opts.symmetrize = cfg.symmetrize;
  return opts;
}

std::string canonical_config(const RunConfig& cfg, const std::string& command) {
  json j = {{"command", command}, {"family", cfg.family}, {"m", cfg.m},
            {"c", cfg.c},         {"N", cfg.N},           {"L", cfg.L},
            {"n", cfg.n},         {"tol", cfg.tol},       {"max_iter", cfg.max_iter},
            {"step", cfg.step},   {"seed", cfg.seed},     {"c_list", cfg.c_list},
            {"lambda", cfg.lambda}, {"delta", cfg.delta}, {"runs", cfg.runs}};
  return j.dump();
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("config file is not valid JSON");
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
  };
  get("family", cfg.family);
  get("m", cfg.m);
  get("c", cfg.c);
  get("N", cfg.N);
  get("L", cfg.L);
  get("n", cfg.n);
  get("tol", cfg.tol);
  get("max_iter", cfg.max_iter);
  get("step", cfg.step);
  get("seed", cfg.seed);
  get("symmetrize", cfg.symmetrize);
  get("out", cfg.out);
  get("label", cfg.label);
  get("c_list", cfg.c_list);
  get("lambda", cfg.lambda);
  get("delta", cfg.delta);
  get("runs", cfg.runs);
  get("n_fine", cfg.n_fine);
}

void write_profile_dump(const fs::path& dir, const std::string& label,
                        const Field& u) {
  auto bins = radial_profile(u, 2.0 * u.grid->spacing);
  fs::path csv = dir / (label + "_profile.csv");
  std::ofstream out(csv);
  out << "r,Q,logQ\n";
  char buf[96];
  for (const auto& b : bins) {
    double lq = b.mean > 0 ? std::log(b.mean) : -1e308;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", b.radius, b.mean, lq);
    out << buf;
  }
  std::ofstream gp(dir / (label + "_profile.gp"));
  gp << "set datafile separator ','\n"
     << "set logscale y\n"
     << "plot '" << csv.filename().string() << "' using 1:2 with lines title '"
     << label << "'\n";
}

int cmd_solve(const RunConfig& cfg) {
  auto grid = make_grid(cfg.L, cfg.n);
  auto spec = spec_from(cfg);
  auto opts = options_from(cfg);
  fs::create_directories(cfg.out);
  GroundStateResult result;
  try {
    if (cfg.family == "massless") {
      result = solve_massless(opts, grid);
    } else {
      result = solve_ground_state(spec, opts, grid);
    }
  } catch (const collapse_error& e) {
    std::cerr << "collapse: " << e.what() << "\n";
    return kExitCollapse;
  }
  fs::path fld = fs::path(cfg.out) / (cfg.label + ".fld");
  write_field(fld, result.state, cfg.label);
  write_result_sidecar(fs::path(cfg.out) / (cfg.label + ".json"), spec, result);
  write_profile_dump(cfg.out, cfg.label, result.state);
  auto hash = fnv1a64(canonical_config(cfg, "solve"));
  manifest_add(cfg.out, cfg.label + ".fld", hash);
  manifest_add(cfg.out, cfg.label + ".json", hash);
  std::printf("energy % .12e  multiplier % .12e  residual %.3e  iterations %d\n",
              result.energy.total, result.multiplier, result.residual_norm,
              result.iterations);
  return result.converged ? kExitOk : kExitNoConverge;
}

struct Check {
  std::string name;
  double residual;
  double tolerance;
  bool pass() const { return residual <= tolerance; }
};

// Scaling identity E(u) = c^-3 E_c(u~) on a random smooth field and its
// rescaled copy sampled on the contracted grid.
double scaling_identity_residual(const RunConfig& cfg, double cval) {
  auto g1 = share_grid(make_grid(cfg.L, cfg.n));
  auto g2 = share_grid(make_grid(cfg.L / cval, cfg.n));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.4, 1.8);
  double a1 = unif(rng), a2 = unif(rng), w1 = unif(rng), w2 = unif(rng);
  auto fn = [&](double x, double y, double z) {
    double r2 = x * x + y * y + z * z;
    double s = x * 0.3 + 0.2 * y - 0.1 * z;
    return a1 * std::exp(-r2 / (2 * w1 * w1)) + a2 * (1 + s) * std::exp(-r2 / (2 * w2 * w2));
  };
  Field u = sample_field(g1, fn);
  Field ut = sample_field(g2, [&](double x, double y, double z) {
    return cval * cval * fn(cval * x, cval * y, cval * z);
  });
  double e1 = energy(ProblemSpec::original(cfg.m, 1.0), u).total;
  double e2 = energy(ProblemSpec::rescaled(cfg.m, cval), ut).total;
  return std::abs(e1 - e2 / (cval * cval * cval)) / std::max(std::abs(e1), 1e-300);
}

int cmd_verify(const RunConfig& cfg) {
  auto grid = make_grid(cfg.L, cfg.n);
  auto spec = spec_from(cfg);
  GroundStateResult result;
  if (!cfg.state_file.empty()) {
    Field u = read_field(cfg.state_file);
    if (!(u.grid->points_per_dim == grid.points_per_dim &&
          u.grid->half_width == grid.half_width)) {
      std::cerr << "state file grid does not match the requested grid\n";
      return kExitConfig;
    }
    result.state = std::move(u);
    result.converged = true;
    result.multiplier = -lagrange_multiplier(spec, result.state);
    result.energy = energy(spec, result.state);
    result.residual_norm =
        l2_norm(el_residual(spec, result.state, -result.multiplier)) /
        l2_norm(result.state);
  } else if (cfg.solve_inline) {
    auto opts = options_from(cfg);
    result = cfg.family == "massless" ? solve_massless(opts, grid)
                                      : solve_ground_state(spec, opts, grid);
  } else {
    std::cerr << "verify: need --state <file> or --solve-inline\n";
    return kExitConfig;
  }

  std::vector<Check> checks;
  const Field& q = result.state;
  double mu_el = -result.multiplier;
  checks.push_back({"el_residual",
                    l2_norm(el_residual(spec, q, mu_el)) / l2_norm(q), 1e-8});
  if (cfg.family == "limit") {
    auto ctx = LinearizedContext::limit(q, -result.multiplier, cfg.m);
    checks.push_back({"lemma_3.1", dilation_identity_residual(ctx), 1e-4});
    if (cfg.kernel_eigs > 0) {
      auto probe = kernel_probe(ctx, cfg.kernel_eigs);
      double r = std::abs(probe.kernel_count - 3) + std::max(0.0, 0.999 - probe.span_overlap);
      checks.push_back({"kernel_eq1.12", r, 1e-3});
    }
    auto fit = decay_fit(q, 2.0, cfg.L / 2.0);
    checks.push_back({"decay_lemma_2.1", 1.0 - fit.fit_quality, 1e-2});
  } else if (cfg.family == "rescaled") {
    auto poh = pohozaev_check(q, cfg.m, cfg.c, result.energy.total);
    checks.push_back({"pohozaev_eq2.07", poh.relative_residual, 1e-6});
    auto poh2 = pohozaev_companion_check(q, cfg.m, cfg.c, result.multiplier);
    checks.push_back({"pohozaev_eq2.13", poh2.relative_residual, 1e-6});
    auto fit = decay_fit(q, 2.0, cfg.L / 2.0);
    checks.push_back({"decay_lemma_2.1", 1.0 - fit.fit_quality, 1e-2});
    checks.push_back({"scaling_G2.1", scaling_identity_residual(cfg, cfg.c), 1e-10});
  } else if (cfg.family == "massless") {
    double sat = std::abs(gn_ratio(q) * mass(q) / 2.0 - 1.0);
    checks.push_back({"gn_saturation", sat, 1e-3});
  }

  fs::create_directories(cfg.out);
  json rep;
  bool all = true;
  for (const auto& ck : checks) {
    rep["checks"].push_back({{"name", ck.name},
                             {"residual", ck.residual},
                             {"tolerance", ck.tolerance},
                             {"pass", ck.pass()}});
    all = all && ck.pass();
    std::printf("%-18s residual %.3e  tolerance %.1e  %s\n", ck.name.c_str(),
                ck.residual, ck.tolerance, ck.pass() ? "pass" : "FAIL");
  }
  std::ofstream out(fs::path(cfg.out) / "verify_report.json");
  out << rep.dump(2) << "\n";
  manifest_add(cfg.out, "verify_report.json",
               fnv1a64(canonical_config(cfg, "verify")));
  return all ? kExitOk : kExitContract;
}

int cmd_scan_convergence(const RunConfig& cfg) {
  auto grid = make_grid(cfg.L, cfg.n);
  auto study = convergence_study(cfg.m, cfg.c_list, options_from(cfg), grid);
  fs::create_directories(cfg.out);
  std::ofstream csv(fs::path(cfg.out) / "convergence.csv");
  csv << "c,sup_distance,multiplier_gap,decay_delta\n";
  char buf[160];
  bool monotone = true;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& row = study.rows[i];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", row.c,
                  row.sup_distance, row.multiplier_gap, row.decay_delta);
    csv << buf;
    if (row.failed) monotone = false;
    if (i > 0 && !study.rows[i - 1].failed && !row.failed) {
      monotone = monotone && row.sup_distance < study.rows[i - 1].sup_distance &&
                 row.multiplier_gap < study.rows[i - 1].multiplier_gap;
    }
  }
  std::printf("lambda %.8f  gap log-log slope %.3f (informational)\n", study.lambda,
              study.gap_slope);
  manifest_add(cfg.out, "convergence.csv",
               fnv1a64(canonical_config(cfg, "scan convergence")));
  return monotone ? kExitOk : kExitContract;
}

int cmd_scan_uniqueness(const RunConfig& cfg) {
  auto grid = make_grid(cfg.L, cfg.n);
  auto spec = spec_from(cfg);
  UniquenessReport rep;
  try {
    rep = multistart_uniqueness(spec, cfg.runs, options_from(cfg), grid);
  } catch (const collapse_error& e) {
    std::cerr << "collapse: " << e.what() << "\n";
    return kExitCollapse;
  }
  fs::create_directories(cfg.out);
  json j = {{"runs", cfg.runs},
            {"pairwise_distance", rep.pairwise_distance},
            {"multiplier_spread", rep.multiplier_spread},
            {"inconclusive", rep.inconclusive}};
  std::ofstream out(fs::path(cfg.out) / "uniqueness.json");
  out << j.dump(2) << "\n";
  std::printf("pairwise_distance %.3e  multiplier_spread %.3e\n",
              rep.pairwise_distance, rep.multiplier_spread);
  manifest_add(cfg.out, "uniqueness.json",
               fnv1a64(canonical_config(cfg, "scan uniqueness")));
  if (rep.inconclusive) return kExitNoConverge;
  bool ok = rep.pairwise_distance <= 1e-6 && rep.multiplier_spread <= 1e-8;
  return ok ? kExitOk : kExitContract;
}

int cmd_scan_critical_mass(const RunConfig& cfg) {
  auto est = critical_mass_estimate(options_from(cfg), cfg.L, cfg.n, cfg.n_fine);
  std::printf("critical mass %.8f +- %.2e (grids n=%d, n=%d, L=%g)\n", est.value,
              est.error_bar, cfg.n, cfg.n_fine, cfg.L);
  fs::create_directories(cfg.out);
  json j = {{"value", est.value},
            {"error_bar", est.error_bar},
            {"coarse", est.coarse},
            {"fine", est.fine}};
  std::ofstream out(fs::path(cfg.out) / "critical_mass.json");
  out << j.dump(2) << "\n";
  manifest_add(cfg.out, "critical_mass.json",
               fnv1a64(canonical_config(cfg, "scan critical-mass")));
  return est.error_bar <= 0.01 * est.value ? kExitOk : kExitContract;
}

int cmd_scan_green(const RunConfig& cfg) {
  auto grid = make_grid(cfg.L, cfg.n);
  double lam = cfg.lambda > 0 ? cfg.lambda : 1.0;
  double delta = cfg.delta > 0
                     ? cfg.delta
                     : 0.9 * std::min(cfg.m / 2.0, std::sqrt(lam * cfg.m));
  std::vector<double> radii;
  for (double r = 0.5; r <= std::min(4.0, cfg.L / 2.0) + 1e-9; r += 2.0 * grid.spacing) {
    double snapped = grid.spacing * std::lround(r / grid.spacing);
    if (radii.empty() || snapped > radii.back()) radii.push_back(snapped);
  }
  fs::create_directories(cfg.out);
  std::ofstream csv(fs::path(cfg.out) / "green.csv");
  csv << "c,z,G_quadrature,G_fourier,bound_value\n";
  char buf[200];
  double cross = 0.0;
  for (double cval : cfg.c_list) {
    auto four = green_fourier_radial(grid, cfg.m, cval, lam, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      auto quad = green_quadrature(radii[i], cfg.m, cval, lam);
      double bound = std::exp(-delta * radii[i]) / (radii[i] * radii[i]);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", cval,
                    radii[i], quad.value, four[i].value, bound);
      csv << buf;
      cross = std::max(cross, std::abs(four[i].value - quad.value) / quad.value);
    }
  }
  auto bound_rep = verify_decay_bound(cfg.m, cfg.c_list, lam, delta, 0.2, cfg.L / 2.0);
  std::printf("cross-method max relative difference %.3e; bound M %.4f violations %d\n",
              cross, bound_rep.prefactor, bound_rep.violations);
  manifest_add(cfg.out, "green.csv", fnv1a64(canonical_config(cfg, "scan green")));
  bool ok = cross <= 1e-4 && bound_rep.violations == 0;
  return ok ? kExitOk : kExitContract;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"hartree-lab: pseudo-relativistic Hartree ground states and diagnostics"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "flat JSON config file (flags override)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family);
    sub->add_option("--m", cfg.m);
    sub->add_option("--c", cfg.c);
    sub->add_option("--N", cfg.N);
    sub->add_option("--L", cfg.L);
    sub->add_option("--n", cfg.n);
    sub->add_option("--tol", cfg.tol);
    sub->add_option("--max-iter", cfg.max_iter);
    sub->add_option("--step", cfg.step);
    sub->add_option("--seed", cfg.seed);
    sub->add_flag("--symmetrize", cfg.symmetrize);
    sub->add_option("--out", cfg.out);
    sub->add_option("--label", cfg.label);
  };

  auto* solve = app.add_subcommand("solve", "compute a constrained ground state");
  add_common(solve);

  auto* verify = app.add_subcommand("verify", "verify identities on a state");
  add_common(verify);
  verify->add_option("--state", cfg.state_file, "state snapshot (.fld)");
  verify->add_flag("--solve-inline", cfg.solve_inline, "solve before verifying");
  verify->add_option("--kernel-eigs", cfg.kernel_eigs, "0 skips the kernel probe");

  auto* scan = app.add_subcommand("scan", "parameter scans");
  scan->require_subcommand(1);
  auto* conv = scan->add_subcommand("convergence", "limit of Q_c as c grows");
  add_common(conv);
  conv->add_option("--c-list", cfg.c_list)->delimiter(',');
  auto* uniq = scan->add_subcommand("uniqueness", "multi-start uniqueness");
  add_common(uniq);
  uniq->add_option("--runs", cfg.runs);
  auto* crit = scan->add_subcommand("critical-mass", "critical mass estimate");
  add_common(crit);
  crit->add_option("--n-fine", cfg.n_fine);
  auto* green = scan->add_subcommand("green", "resolvent kernel cross-checks");
  add_common(green);
  green->add_option("--c-list", cfg.c_list)->delimiter(',');
  green->add_option("--lambda", cfg.lambda);
  green->add_option("--delta", cfg.delta);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    // peel --config first so flags can override file values
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") apply_config_file(args[i + 1], cfg);
    }
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (conv->parsed()) return cmd_scan_convergence(cfg);
    if (uniq->parsed()) return cmd_scan_uniqueness(cfg);
    if (crit->parsed()) return cmd_scan_critical_mass(cfg);
    if (green->parsed()) return cmd_scan_green(cfg);
  } catch (const collapse_error& e) {
    std::cerr << "collapse: " << e.what() << "\n";
    return kExitCollapse;
  } catch (const sizing_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace hartree
