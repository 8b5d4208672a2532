#include "hartree/energy.hpp"

namespace hartree {

MultiplierSymbol ProblemSpec::kinetic_symbol() const {
  switch (family) {
    case Family::original:
      return MultiplierSymbol::rescaled_original(m);
    case Family::rescaled:
      return MultiplierSymbol::relativistic(m, c);
    case Family::limit:
      return MultiplierSymbol::nonrelativistic(m);
    case Family::massless:
      return MultiplierSymbol::massless();
  }
  return MultiplierSymbol::nonrelativistic(m);
}

namespace {
Field squared(const Field& u) {
  Field rho(u.grid);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    rho.values[i] = u.values[i] * u.values[i];
  }
  return rho;
}
}  // namespace

EnergyBreakdown energy(const ProblemSpec& spec, const Field& u) {
  EnergyBreakdown e;
  e.kinetic = quadratic_form(spec.kinetic_symbol(), u);
  Field phi = coulomb_potential(squared(u));
  double hart = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    hart += phi.values[i] * u.values[i] * u.values[i];
  }
  e.potential = 0.5 * hart * u.grid->cell_volume();
  e.total = e.kinetic - e.potential;
  return e;
}

Field el_residual(const ProblemSpec& spec, const Field& u, double mu) {
  if (!(mass(u) > 0.0)) {
    throw degenerate_field_error("el_residual: field is identically zero");
  }
  Field out = apply_multiplier(spec.kinetic_symbol(), u);
  Field phi = coulomb_potential(squared(u));
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    out.values[i] += (mu - phi.values[i]) * u.values[i];
  }
  return out;
}

double lagrange_multiplier(const ProblemSpec& spec, const Field& u) {
  double ms = mass(u);
  if (!(ms > 0.0)) {
    throw degenerate_field_error("lagrange_multiplier: field has zero mass");
  }
  double kin = quadratic_form(spec.kinetic_symbol(), u);
  Field phi = coulomb_potential(squared(u));
  double hart = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    hart += phi.values[i] * u.values[i] * u.values[i];
  }
  hart *= u.grid->cell_volume();
  return (hart - kin) / ms;
}

double gn_ratio(const Field& u) {
  double ms = mass(u);
  if (!(ms > 0.0)) {
    throw degenerate_field_error("gn_ratio: field has zero mass");
  }
  Field phi = coulomb_potential(squared(u));
  double hart = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    hart += phi.values[i] * u.values[i] * u.values[i];
  }
  hart *= u.grid->cell_volume();
  return hart / (half_laplacian_form(u) * ms);
}

}  // namespace hartree
