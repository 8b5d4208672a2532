#pragma once

#include "hartree/solver.hpp"

namespace hartree {

class window_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PohozaevReport {
  double term_resolvent = 0.0;  // -m^2 c^4 <(-c^2 Lap + m^2 c^4)^{-1/2} Q, Q>
  double term_mass = 0.0;       // m c^2 int Q^2
  double term_energy = 0.0;     // e(c)
  double residual = 0.0;        // sum of the three
  double relative_residual = 0.0;
};

PohozaevReport pohozaev_check(const Field& q, double m, double c, double energy_value);

/// Companion identity: same resolvent term, (mc^2 + mu_c) int Q^2, and half the
/// Hartree pairing must also sum to zero.
PohozaevReport pohozaev_companion_check(const Field& q, double m, double c,
                                        double mu_c);

struct DecayFit {
  double delta = 0.0;
  double prefactor = 0.0;
  double r_min = 0.0, r_max = 0.0;
  double fit_quality = 0.0;  // R^2 of the log-linear fit
};

/// Least-squares line through (r, log profile(r)) over the window.
DecayFit decay_fit(const Field& u, double r_min, double r_max);

/// Decay fit of the spectral gradient magnitude.
DecayFit gradient_decay_check(const Field& u, double r_min, double r_max);

struct ConvergenceRow {
  double c = 0.0;
  double sup_distance = 0.0;    // ||Q_c - Q_inf||_inf
  double multiplier_gap = 0.0;  // |mu_c + lambda|
  double decay_delta = 0.0;
  bool failed = false;
};

struct ConvergenceStudy {
  double lambda = 0.0;  // limit-family multiplier on the same grid
  GroundStateResult limit_state;
  std::vector<ConvergenceRow> rows;
  double gap_slope = 0.0;  // informational log-log slope of the multiplier gap
};

/// Solves the limit problem once, then each rescaled problem warm-started from
/// it; both difference columns should decrease in c.
ConvergenceStudy convergence_study(double m, const std::vector<double>& c_list,
                                   const SolveOptions& opts, const GridSpec& grid);

}  // namespace hartree
