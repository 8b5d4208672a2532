#include "hartree/operators.hpp"

#include <cmath>

namespace hartree {

double symbol_value_k2(const MultiplierSymbol& s, double k2) {
  using Kind = MultiplierSymbol::Kind;
  double m = s.m, c = s.c;
  switch (s.kind) {
    case Kind::relativistic: {
      // c^2 k^2 / (sqrt(c^2 k^2 + m^2 c^4) + m c^2): no cancellation at small k.
      double root = std::sqrt(c * c * k2 + m * m * c * c * c * c);
      return c * c * k2 / (root + m * c * c);
    }
    case Kind::rescaled_original: {
      double root = std::sqrt(k2 + m * m);
      return k2 / (root + m);
    }
    case Kind::nonrelativistic:
      return k2 / (2.0 * m);
    case Kind::massless:
      return std::sqrt(k2);
    case Kind::remainder: {
      // relativistic - nonrelativistic = -c^2 k^4 / (2m (root + mc^2)^2), exact.
      double root = std::sqrt(c * c * k2 + m * m * c * c * c * c);
      double d = root + m * c * c;
      return -c * c * k2 * k2 / (2.0 * m * d * d);
    }
    case Kind::resolvent: {
      double root = std::sqrt(c * c * k2 + m * m * c * c * c * c);
      return 1.0 / (c * c * k2 / (root + m * c * c) + s.shift);
    }
    case Kind::preconditioner:
      return 1.0 / (k2 / (2.0 * m) + s.shift);
  }
  return 0.0;
}

double symbol_value(const MultiplierSymbol& s, const std::array<double, 3>& k) {
  return symbol_value_k2(s, k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

Field apply_multiplier(const MultiplierSymbol& s, const Field& u) {
  const GridSpec& g = *u.grid;
  auto& eng = detail::engine_for(g);
  Complex* half = eng.scratch();
  eng.forward(u.values.data(), half);
  const auto& k2 = eng.k_squared();
  for (std::size_t j = 0; j < k2.size(); ++j) {
    half[j] *= symbol_value_k2(s, k2[j]);
  }
  Field out(u.grid);
  eng.inverse(half, out.values.data());
  double inv_n3 = 1.0 / static_cast<double>(g.point_count());
  for (double& v : out.values) v *= inv_n3;
  return out;
}

double quadratic_form(const MultiplierSymbol& s, const Field& u) {
  const GridSpec& g = *u.grid;
  auto& eng = detail::engine_for(g);
  Complex* half = eng.scratch();
  eng.forward(u.values.data(), half);
  const auto& k2 = eng.k_squared();
  const auto& w = eng.last_axis_weight();
  double acc = 0.0;
  for (std::size_t j = 0; j < k2.size(); ++j) {
    acc += w[j] * symbol_value_k2(s, k2[j]) * std::norm(half[j]);
  }
  return acc * g.cell_volume() / static_cast<double>(g.point_count());
}

double half_laplacian_form(const Field& u) {
  return quadratic_form(MultiplierSymbol::massless(), u);
}

Field coulomb_potential(const Field& rho) {
  const GridSpec& g = *rho.grid;
  auto& eng = detail::engine_for(g);
  int n = g.points_per_dim;
  int p = 2 * n;
  const auto& kernel = eng.coulomb_kernel();
  double* pad = eng.padded_real();
  std::fill(pad, pad + static_cast<std::int64_t>(p) * p * p, 0.0);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double* src = &rho.values[(static_cast<std::size_t>(ix) * n + iy) * n];
      double* dst = &pad[(static_cast<std::size_t>(ix) * p + iy) * p];
      std::copy(src, src + n, dst);
    }
  }
  Complex* spec = eng.padded_spec();
  eng.forward_padded(pad, spec);
  for (std::int64_t j = 0; j < eng.padded_half_count(); ++j) {
    spec[j] *= kernel[j];
  }
  eng.inverse_padded(spec, pad);
  Field out(rho.grid);
  double scale = 1.0 / (static_cast<double>(p) * p * p);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double* src = &pad[(static_cast<std::size_t>(ix) * p + iy) * p];
      double* dst = &out.values[(static_cast<std::size_t>(ix) * n + iy) * n];
      for (int iz = 0; iz < n; ++iz) dst[iz] = src[iz] * scale;
    }
  }
  return out;
}

CoulombSupBound coulomb_sup_bound_check(const Field& u) {
  Field rho(u.grid);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    rho.values[i] = u.values[i] * u.values[i];
  }
  Field phi = coulomb_potential(rho);
  CoulombSupBound out;
  out.lhs = linf_norm(phi);
  double q = 0.0;
  for (double v : u.values) q += v * v * v * v;
  double l4sq = std::sqrt(q * u.grid->cell_volume());
  out.rhs = l4sq + mass(u);
  return out;
}

}  // namespace hartree
