#pragma once

#include "hartree/operators.hpp"

namespace hartree {

/// Which constrained variational problem a state belongs to.
struct ProblemSpec {
  enum class Family { original, rescaled, limit, massless };
  Family family = Family::limit;
  double m = 1.0;  // rest mass (unused for massless)
  double c = 1.0;  // light speed (rescaled family only)
  double N = 1.0;  // mass constraint (original family only; 1 otherwise)

  static ProblemSpec original(double m, double N) {
    return {Family::original, m, 1.0, N};
  }
  static ProblemSpec rescaled(double m, double c) {
    return {Family::rescaled, m, c, 1.0};
  }
  static ProblemSpec limit(double m) { return {Family::limit, m, 1.0, 1.0}; }
  static ProblemSpec massless() { return {Family::massless, 1.0, 1.0, 1.0}; }

  double constraint_mass() const { return family == Family::original ? N : 1.0; }
  MultiplierSymbol kinetic_symbol() const;
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;  // (1/2) int Phi[u^2] u^2
  double total = 0.0;      // kinetic - potential
};

EnergyBreakdown energy(const ProblemSpec& spec, const Field& u);

/// T u - Phi[u^2] u + mu u. Vanishes at a solution when mu equals
/// lagrange_multiplier(spec, u); the solver reports multiplier = -mu.
Field el_residual(const ProblemSpec& spec, const Field& u, double mu);

/// (  <Phi[u^2] u, u> - <T u, u> ) / mass(u): the value making el_residual
/// orthogonal to u.
double lagrange_multiplier(const ProblemSpec& spec, const Field& u);

/// [int Phi[u^2] u^2] / [ ||(-Lap)^{1/4} u||^2 ||u||^2 ].
double gn_ratio(const Field& u);

}  // namespace hartree
