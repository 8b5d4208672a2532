#pragma once

#include "hartree/grid.hpp"

namespace hartree {

/// Fourier-multiplier symbols used throughout: relativistic kinetic operators,
/// their nonrelativistic limit, the relativistic-minus-nonrelativistic
/// remainder, resolvents and the solver preconditioner.
struct MultiplierSymbol {
  enum class Kind {
    relativistic,       // sqrt(c^2 k^2 + m^2 c^4) - m c^2
    rescaled_original,  // sqrt(k^2 + m^2) - m
    nonrelativistic,    // k^2 / (2m)
    massless,           // |k|
    remainder,          // relativistic - nonrelativistic
    resolvent,          // 1 / (relativistic + shift)
    preconditioner,     // 1 / (nonrelativistic + shift)
  };
  Kind kind = Kind::nonrelativistic;
  double m = 1.0;
  double c = 1.0;
  double shift = 0.0;

  static MultiplierSymbol relativistic(double m, double c) {
    return {Kind::relativistic, m, c, 0.0};
  }
  static MultiplierSymbol rescaled_original(double m) {
    return {Kind::rescaled_original, m, 1.0, 0.0};
  }
  static MultiplierSymbol nonrelativistic(double m) {
    return {Kind::nonrelativistic, m, 1.0, 0.0};
  }
  static MultiplierSymbol massless() { return {Kind::massless, 1.0, 1.0, 0.0}; }
  static MultiplierSymbol remainder(double m, double c) {
    return {Kind::remainder, m, c, 0.0};
  }
  static MultiplierSymbol resolvent(double m, double c, double shift) {
    return {Kind::resolvent, m, c, shift};
  }
  static MultiplierSymbol preconditioner(double m, double shift) {
    return {Kind::preconditioner, m, 1.0, shift};
  }
};

/// Symbol value at squared wavenumber k2 = |k|^2. All kinetic kinds are
/// evaluated in cancellation-free form (see symbol_value_k2 in operators.cpp).
double symbol_value_k2(const MultiplierSymbol& s, double k2);

/// Symbol value at a wavevector.
double symbol_value(const MultiplierSymbol& s, const std::array<double, 3>& k);

/// inverse_transform(symbol * transform(u)); linear in u.
Field apply_multiplier(const MultiplierSymbol& s, const Field& u);

/// <apply_multiplier(s, u), u>, accumulated in wavenumber space.
double quadratic_form(const MultiplierSymbol& s, const Field& u);

/// ||(-Lap)^{1/4} u||^2 = sum |k| |uhat|^2 dk^3.
double half_laplacian_form(const Field& u);

/// Free-space Coulomb convolution |x|^{-1} * rho via zero padding to (2n)^3
/// and the transform of the kernel truncated at radius 2L.
Field coulomb_potential(const Field& rho);

struct CoulombSupBound {
  double lhs = 0.0;  // max |Phi[u^2]|
  double rhs = 0.0;  // ||u||_{L4}^2 + ||u||_{L2}^2
};
CoulombSupBound coulomb_sup_bound_check(const Field& u);

}  // namespace hartree
