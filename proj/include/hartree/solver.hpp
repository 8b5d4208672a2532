#pragma once

#include <cstdint>
#include <optional>

#include "hartree/energy.hpp"

namespace hartree {

class collapse_error : public std::runtime_error {
 public:
  collapse_error(const std::string& what, double suspected_mass)
      : std::runtime_error(what), suspected_mass_(suspected_mass) {}
  double suspected_mass() const { return suspected_mass_; }

 private:
  double suspected_mass_;
};

struct SolveOptions {
  int max_iterations = 3000;
  double step = 0.9;                  // in the preconditioned metric
  double tolerance = 1e-9;            // L2 residual relative to ||u||
  double preconditioner_shift = 0.0;  // <= 0: track the running |mu| estimate
  std::uint64_t seed = 1;
  bool symmetrize = false;  // radially average every 50 iterations

  // Collapse detection (engineering constants, not physical values).
  double collapse_amplitude_factor = 1e6;
  double collapse_energy_floor = -1e6;
  // A mass-subcritical flow obeys E >= -mN; energy far below that means the
  // supercritical instability has taken over.
  double collapse_bound_factor = 50.0;

  bool recenter = true;  // pin the density barycenter to the origin
};

struct TracePoint {
  double energy = 0.0;
  double residual = 0.0;
};

struct GroundStateResult {
  Field state;
  EnergyBreakdown energy;
  double multiplier = 0.0;  // mu_c (rescaled) or -lambda (limit); < 0 when bound
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

struct UniquenessReport {
  std::vector<GroundStateResult> runs;
  double pairwise_distance = 0.0;   // max L-inf distance after alignment
  double multiplier_spread = 0.0;   // max |mu_i - mu_j|
  bool inconclusive = false;        // some run failed to converge
};

struct CriticalMassEstimate {
  double value = 0.0;      // ||w||_2^2 on the fine grid
  double error_bar = 0.0;  // |fine - coarse|
  double coarse = 0.0;
  double fine = 0.0;
};

GroundStateResult solve_ground_state(const ProblemSpec& spec, const SolveOptions& opts,
                                     const GridSpec& grid,
                                     const std::optional<Field>& init = std::nullopt);

/// Solves sqrt(-Lap) w + w = Phi[w^2] w by stabilized fixed-point iteration;
/// no mass constraint, the multiplier is fixed at 1 by the equation.
GroundStateResult solve_massless(const SolveOptions& opts, const GridSpec& grid,
                                 const std::optional<Field>& init = std::nullopt);

/// N* = ||w||_2^2 from the massless solve, with a two-grid error bar.
CriticalMassEstimate critical_mass_estimate(const SolveOptions& opts,
                                            double half_width = 16.0,
                                            int n_coarse = 96, int n_fine = 128);

UniquenessReport multistart_uniqueness(const ProblemSpec& spec, int n_runs,
                                       const SolveOptions& opts, const GridSpec& grid);

/// Worker cap honoring the HARTREE_LAB_THREADS environment variable.
int worker_count(int jobs);

}  // namespace hartree
