#include "hartree/diagnostics.hpp"

#include <cmath>

namespace hartree {

namespace {
double resolvent_pairing(const Field& q, double m, double c) {
  // <(-c^2 Lap + m^2 c^4)^{-1/2} Q, Q> in wavenumber space
  auto& eng = detail::engine_for(*q.grid);
  Complex* half = eng.scratch();
  eng.forward(q.values.data(), half);
  const auto& k2 = eng.k_squared();
  const auto& w = eng.last_axis_weight();
  double acc = 0.0;
  for (std::size_t j = 0; j < k2.size(); ++j) {
    acc += w[j] * std::norm(half[j]) / std::sqrt(c * c * k2[j] + m * m * c * c * c * c);
  }
  return acc * q.grid->cell_volume() / static_cast<double>(q.grid->point_count());
}

double hartree_pairing(const Field& q) {
  Field rho(q.grid);
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    rho.values[i] = q.values[i] * q.values[i];
  }
  Field phi = coulomb_potential(rho);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    acc += phi.values[i] * rho.values[i];
  }
  return acc * q.grid->cell_volume();
}
}  // namespace

PohozaevReport pohozaev_check(const Field& q, double m, double c, double energy_value) {
  PohozaevReport rep;
  rep.term_resolvent = -m * m * c * c * c * c * resolvent_pairing(q, m, c);
  rep.term_mass = m * c * c * mass(q);
  rep.term_energy = energy_value;
  rep.residual = rep.term_resolvent + rep.term_mass + rep.term_energy;
  double scale = std::max({std::abs(rep.term_resolvent), std::abs(rep.term_mass),
                           std::abs(rep.term_energy)});
  rep.relative_residual = std::abs(rep.residual) / scale;
  return rep;
}

PohozaevReport pohozaev_companion_check(const Field& q, double m, double c,
                                        double mu_c) {
  PohozaevReport rep;
  rep.term_resolvent = -m * m * c * c * c * c * resolvent_pairing(q, m, c);
  rep.term_mass = (m * c * c + mu_c) * mass(q);
  rep.term_energy = 0.5 * hartree_pairing(q);
  rep.residual = rep.term_resolvent + rep.term_mass + rep.term_energy;
  double scale = std::max({std::abs(rep.term_resolvent), std::abs(rep.term_mass),
                           std::abs(rep.term_energy)});
  rep.relative_residual = std::abs(rep.residual) / scale;
  return rep;
}

namespace {
DecayFit fit_profile(const std::vector<RadialBin>& bins, const GridSpec& g,
                     double r_min, double r_max) {
  if (!(r_min < r_max) || r_max > g.half_width - 2.0) {
    throw window_error("decay_fit: window must satisfy r_min < r_max <= L - 2");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int npts = 0;
  for (const auto& b : bins) {
    if (b.radius < r_min || b.radius > r_max || b.count == 0) continue;
    if (!(b.mean > 0.0)) {
      throw window_error("decay_fit: nonpositive profile values in the window");
    }
    double x = b.radius, y = std::log(b.mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++npts;
  }
  if (npts < 3) {
    throw window_error("decay_fit: too few profile bins in the window");
  }
  double det = npts * sxx - sx * sx;
  double slope = (npts * sxy - sx * sy) / det;
  double icept = (sy * sxx - sx * sxy) / det;
  double ss_res = 0.0, ss_tot = 0.0, ymean = sy / npts;
  for (const auto& b : bins) {
    if (b.radius < r_min || b.radius > r_max || b.count == 0) continue;
    double y = std::log(b.mean);
    double f = slope * b.radius + icept;
    ss_res += (y - f) * (y - f);
    ss_tot += (y - ymean) * (y - ymean);
  }
  DecayFit fit;
  fit.delta = -slope;
  fit.prefactor = std::exp(icept);
  fit.r_min = r_min;
  fit.r_max = r_max;
  fit.fit_quality = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
  return fit;
}
}  // namespace

DecayFit decay_fit(const Field& u, double r_min, double r_max) {
  auto bins = radial_profile(u, 2.0 * u.grid->spacing);
  return fit_profile(bins, *u.grid, r_min, r_max);
}

DecayFit gradient_decay_check(const Field& u, double r_min, double r_max) {
  Field gm = gradient_magnitude(u);
  auto bins = radial_profile(gm, 2.0 * u.grid->spacing);
  return fit_profile(bins, *u.grid, r_min, r_max);
}

ConvergenceStudy convergence_study(double m, const std::vector<double>& c_list,
                                   const SolveOptions& opts, const GridSpec& grid) {
  if (c_list.size() < 3 || !std::is_sorted(c_list.begin(), c_list.end())) {
    throw std::invalid_argument(
        "convergence_study: c_list must be ascending with at least 3 entries");
  }
  ConvergenceStudy study;
  study.limit_state = solve_ground_state(ProblemSpec::limit(m), opts, grid);
  if (!study.limit_state.converged) {
    throw std::runtime_error("convergence_study: limit solve did not converge");
  }
  study.lambda = -study.limit_state.multiplier;
  const Field& q_inf = study.limit_state.state;
  double fit_lo = 2.0, fit_hi = grid.half_width / 2.0;
  for (double c : c_list) {
    ConvergenceRow row;
    row.c = c;
    try {
      auto r = solve_ground_state(ProblemSpec::rescaled(m, c), opts, grid, q_inf);
      if (!r.converged) throw std::runtime_error("row solve did not converge");
      double d = 0.0;
      for (std::size_t i = 0; i < q_inf.values.size(); ++i) {
        d = std::max(d, std::abs(r.state.values[i] - q_inf.values[i]));
      }
      row.sup_distance = d;
      row.multiplier_gap = std::abs(r.multiplier + study.lambda);
      row.decay_delta = decay_fit(r.state, fit_lo, fit_hi).delta;
    } catch (const std::exception&) {
      row.failed = true;
    }
    study.rows.push_back(row);
  }
  // informational log-log slope of the multiplier gap
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int npts = 0;
  for (const auto& row : study.rows) {
    if (row.failed || !(row.multiplier_gap > 0.0)) continue;
    double x = std::log(row.c), y = std::log(row.multiplier_gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++npts;
  }
  if (npts >= 2) {
    study.gap_slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  }
  return study;
}

}  // namespace hartree
