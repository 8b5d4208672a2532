#include "hartree/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <random>
#include <thread>

namespace hartree {

namespace {

Field default_gaussian(const std::shared_ptr<const GridSpec>& g, double target_mass) {
  Field u = sample_field(g, [](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z) / 2.0);
  });
  return normalize(u, target_mass);
}

Field squared(const Field& u) {
  Field rho(u.grid);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    rho.values[i] = u.values[i] * u.values[i];
  }
  return rho;
}

struct FlowEval {
  Field kinetic_term;  // T u
  Field potential;     // Phi[u^2]
  double kin = 0.0;    // <T u, u>
  double hart = 0.0;   // int Phi u^2
  double ms = 0.0;
  double energy() const { return kin - 0.5 * hart; }
  double mu() const { return (hart - kin) / ms; }
};

FlowEval evaluate(const MultiplierSymbol& T, const Field& u) {
  FlowEval e;
  e.kinetic_term = apply_multiplier(T, u);
  e.potential = coulomb_potential(squared(u));
  e.ms = mass(u);
  double kin = 0.0, hart = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    kin += e.kinetic_term.values[i] * u.values[i];
    hart += e.potential.values[i] * u.values[i] * u.values[i];
  }
  double w = u.grid->cell_volume();
  e.kin = kin * w;
  e.hart = hart * w;
  return e;
}

Field recenter(const Field& u, double target_mass) {
  auto b = barycenter(u);
  Field v = translate(u, {-b[0], -b[1], -b[2]});
  return normalize(v, target_mass);
}

}  // namespace

int worker_count(int jobs) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("HARTREE_LAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) hw = std::min(hw, cap);
  }
  return std::max(1, std::min(jobs, hw));
}

GroundStateResult solve_ground_state(const ProblemSpec& spec, const SolveOptions& opts,
                                     const GridSpec& grid,
                                     const std::optional<Field>& init) {
  if (!(opts.tolerance > 0.0) || opts.tolerance > 1e-2) {
    throw std::invalid_argument("solve_ground_state: tolerance must be in (0, 1e-2]");
  }
  auto g = share_grid(grid);
  double N = spec.constraint_mass();
  Field u = init ? normalize(*init, N) : default_gaussian(g, N);
  MultiplierSymbol T = spec.kinetic_symbol();
  double shift = opts.preconditioner_shift > 0.0 ? opts.preconditioner_shift
                                                 : 0.2 * std::max(spec.m, 1e-2);
  double amp0 = linf_norm(u);
  double step = opts.step;

  GroundStateResult res;
  res.trace.reserve(256);
  FlowEval e = evaluate(T, u);
  for (int it = 0; it < opts.max_iterations; ++it) {
    double mu = e.mu();
    Field r = e.kinetic_term;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      r.values[i] += (mu - e.potential.values[i]) * u.values[i];
    }
    double rn = l2_norm(r) / std::sqrt(e.ms);
    res.trace.push_back({e.energy(), rn});
    res.iterations = it;
    if (rn <= opts.tolerance) {
      res.converged = true;
      break;
    }
    if (linf_norm(u) > opts.collapse_amplitude_factor * amp0 ||
        e.energy() < opts.collapse_energy_floor ||
        (spec.family == ProblemSpec::Family::original &&
         e.energy() < -opts.collapse_bound_factor * std::max(1.0, spec.m * N))) {
      throw collapse_error(
          "solve_ground_state: collapse detected, mass N=" + std::to_string(N) +
              " appears supercritical",
          N);
    }
    if (opts.preconditioner_shift <= 0.0 && it % 20 == 0) {
      shift = std::max(std::abs(mu), 1e-2);
    }
    Field d = apply_multiplier(MultiplierSymbol::preconditioner(spec.m, shift), r);
    double E0 = e.energy();
    // accept energy changes below the quadrature round-off scale
    double noise = 1e-12 * (std::abs(e.kin) + std::abs(e.hart) + std::abs(E0));
    Field candidate;
    FlowEval ec;
    for (;;) {
      candidate = u;
      for (std::size_t i = 0; i < u.values.size(); ++i) {
        candidate.values[i] -= step * d.values[i];
      }
      candidate = normalize(candidate, N);
      ec = evaluate(T, candidate);
      if (ec.energy() <= E0 + noise || step < 1e-2 * opts.step) break;
      step *= 0.5;
    }
    u = std::move(candidate);
    e = ec;
    step = std::min(step * 1.1, opts.step);
    if (opts.symmetrize && it % 50 == 49) {
      u = normalize(radial_average(u), N);
      e = evaluate(T, u);
    }
    if (opts.recenter && it % 25 == 24) {
      u = recenter(u, N);
      e = evaluate(T, u);
    }
  }
  if (res.converged && opts.recenter) {
    u = recenter(u, N);
    e = evaluate(T, u);
  }
  double mu = e.mu();
  Field r = e.kinetic_term;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    r.values[i] += (mu - e.potential.values[i]) * u.values[i];
  }
  res.residual_norm = l2_norm(r) / std::sqrt(e.ms);
  res.state = std::move(u);
  res.energy = {e.kin, 0.5 * e.hart, e.energy()};
  res.multiplier = -mu;
  return res;
}

GroundStateResult solve_massless(const SolveOptions& opts, const GridSpec& grid,
                                 const std::optional<Field>& init) {
  auto g = share_grid(grid);
  Field u;
  if (init) {
    if (!(mass(*init) > 0.0)) {
      throw degenerate_field_error("solve_massless: zero initial field");
    }
    u = *init;
  } else {
    u = sample_field(g, [](double x, double y, double z) {
      return std::exp(-(x * x + y * y + z * z) / 2.0);
    });
  }
  ProblemSpec spec = ProblemSpec::massless();
  MultiplierSymbol T = MultiplierSymbol::massless();
  // Stabilized fixed-point iteration on (sqrt(-Lap) + 1) u = Phi[u^2] u: the
  // update is scaled by M^{3/2}, M = <(T+1)u, u>/<Phi[u^2]u, u>, which is the
  // classic stabilizing factor for a cubic-homogeneous right-hand side.
  GroundStateResult res;
  auto& eng = detail::engine_for(grid);
  const auto& k2 = eng.k_squared();
  const auto& w = eng.last_axis_weight();
  double cellw = grid.cell_volume();
  double n3 = static_cast<double>(grid.point_count());
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it;
    Field phi = coulomb_potential(squared(u));
    Field rhs(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      rhs.values[i] = phi.values[i] * u.values[i];
    }
    double rhs_u = inner(rhs, u);
    Complex* half = eng.scratch();
    eng.forward(u.values.data(), half);
    double lu_u = 0.0;
    for (std::size_t j = 0; j < k2.size(); ++j) {
      lu_u += w[j] * (std::sqrt(k2[j]) + 1.0) * std::norm(half[j]);
    }
    lu_u *= cellw / n3;
    double M = lu_u / rhs_u;
    // residual of the equation itself: T u + u - Phi u
    Field r(u.grid);
    eng.forward(u.values.data(), half);
    for (std::size_t j = 0; j < k2.size(); ++j) half[j] *= std::sqrt(k2[j]);
    eng.inverse(half, r.values.data());
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      r.values[i] = r.values[i] / n3 + u.values[i] - rhs.values[i];
    }
    double rn = l2_norm(r) / l2_norm(u);
    res.trace.push_back({lu_u - rhs_u, rn});
    if (rn <= opts.tolerance) {
      res.converged = true;
      break;
    }
    eng.forward(rhs.values.data(), half);
    for (std::size_t j = 0; j < k2.size(); ++j) {
      half[j] *= 1.0 / (std::sqrt(k2[j]) + 1.0);
    }
    Field un(u.grid);
    eng.inverse(half, un.values.data());
    double scale = M * std::sqrt(M) / n3;
    for (double& v : un.values) v *= scale;
    u = std::move(un);
    if (opts.recenter && it % 25 == 24) {
      auto b = barycenter(u);
      u = translate(u, {-b[0], -b[1], -b[2]});
    }
  }
  res.residual_norm = res.trace.empty() ? 1.0 : res.trace.back().residual;
  res.energy = energy(spec, u);
  res.multiplier = -lagrange_multiplier(spec, u);  // -> -1 at the solution
  res.state = std::move(u);
  return res;
}

CriticalMassEstimate critical_mass_estimate(const SolveOptions& opts, double half_width,
                                            int n_coarse, int n_fine) {
  CriticalMassEstimate est;
  auto coarse = solve_massless(opts, make_grid(half_width, n_coarse));
  if (!coarse.converged) {
    throw std::runtime_error("critical_mass_estimate: coarse massless solve failed");
  }
  est.coarse = mass(coarse.state);
  auto fine =
      solve_massless(opts, make_grid(half_width, n_fine), resample(coarse.state, share_grid(make_grid(half_width, n_fine))));
  if (!fine.converged) {
    throw std::runtime_error("critical_mass_estimate: fine massless solve failed");
  }
  est.fine = mass(fine.state);
  est.value = est.fine;
  est.error_bar = std::abs(est.fine - est.coarse);
  return est;
}

UniquenessReport multistart_uniqueness(const ProblemSpec& spec, int n_runs,
                                       const SolveOptions& opts, const GridSpec& grid) {
  if (n_runs < 2) {
    throw std::invalid_argument("multistart_uniqueness: n_runs must be >= 2");
  }
  auto g = share_grid(grid);
  std::vector<Field> inits;
  inits.reserve(n_runs);
  for (int run = 0; run < n_runs; ++run) {
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ull * (run + 1));
    std::uniform_real_distribution<double> center(-grid.half_width / 4,
                                                  grid.half_width / 4);
    std::uniform_real_distribution<double> width(0.5, 2.0);
    double cx = center(rng), cy = center(rng), cz = center(rng);
    double s2 = 2.0 * width(rng) * width(rng);
    inits.push_back(sample_field(g, [=](double x, double y, double z) {
      double dx = x - cx, dy = y - cy, dz = z - cz;
      return std::exp(-(dx * dx + dy * dy + dz * dz) / s2);
    }));
  }
  UniquenessReport report;
  report.runs.resize(n_runs);
  int workers = worker_count(n_runs);
  std::atomic<int> next{0};
  std::vector<std::future<void>> pool;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  for (int t = 0; t < workers; ++t) {
    pool.push_back(std::async(std::launch::async, [&]() {
      for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
        try {
          report.runs[i] = solve_ground_state(spec, opts, grid, inits[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    }));
  }
  for (auto& f : pool) f.get();
  if (first_error) std::rethrow_exception(first_error);

  // Align by the density barycenter rounded to the nearest grid point.
  std::vector<Field> aligned;
  aligned.reserve(n_runs);
  for (auto& r : report.runs) {
    if (!r.converged) report.inconclusive = true;
    auto b = barycenter(r.state);
    std::array<double, 3> shift;
    for (int a = 0; a < 3; ++a) {
      shift[a] = -grid.spacing * std::round(b[a] / grid.spacing);
    }
    aligned.push_back(translate(r.state, shift));
  }
  for (int i = 0; i < n_runs; ++i) {
    for (int j = i + 1; j < n_runs; ++j) {
      double d = 0.0;
      for (std::size_t p = 0; p < aligned[i].values.size(); ++p) {
        d = std::max(d, std::abs(aligned[i].values[p] - aligned[j].values[p]));
      }
      report.pairwise_distance = std::max(report.pairwise_distance, d);
      report.multiplier_spread =
          std::max(report.multiplier_spread,
                   std::abs(report.runs[i].multiplier - report.runs[j].multiplier));
    }
  }
  return report;
}

}  // namespace hartree
