#include "hartree/greens.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace hartree {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Series for I0, I1, K0, K1 at small argument; machine precision for x <= 2.
void bessel_k01_series(double x, double& k0, double& k1) {
  double q = x * x / 4.0;
  double lg = std::log(x / 2.0);
  // I0, I1 and the companion sums with harmonic-number weights.
  double term0 = 1.0, i0 = 1.0, s0 = 0.0;
  double term1 = 0.5 * x, i1 = term1, s1 = 0.0;
  double hk = 0.0;
  for (int k = 1; k < 40; ++k) {
    hk += 1.0 / k;
    term0 *= q / (k * k);
    i0 += term0;
    s0 += term0 * hk;
    term1 *= q / (k * (k + 1));
    i1 += term1;
    // weight psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
    s1 += term1 * (2.0 * hk + 1.0 / (k + 1));
    if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1) break;
  }
  k0 = -(lg + kEulerGamma) * i0 + s0;
  k1 = 1.0 / x + (lg + kEulerGamma) * i1 - 0.25 * x - 0.5 * s1;
}

// e^x K2(x) on (2, 30) via the cosh-integral representation.
double k2_scaled_integral(double x) {
  auto f = [x](double t) {
    double em1 = std::expm1(t);
    double ch_m1 = 0.5 * em1 * em1 * std::exp(-t);  // cosh(t) - 1, stable
    return std::exp(-x * ch_m1) * std::cosh(2.0 * t);
  };
  double tmax = std::acosh(1.0 + 800.0 / x);
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, tmax, 12, 1e-14, &err);
  return v;
}

// e^x K2(x) for large x via the asymptotic series (nu = 2).
double k2_scaled_asymptotic(double x) {
  constexpr double mu = 16.0;  // 4 nu^2
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= 30; ++k) {
    double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    double next = term * num / (8.0 * x * k);
    if (std::abs(next) >= std::abs(term)) break;  // past the optimal cut
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(kPi / (2.0 * x)) * sum;
}
}  // namespace

double bessel_k2_scaled(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k2: argument must be positive");
  if (x <= 2.0) {
    double k0, k1;
    bessel_k01_series(x, k0, k1);
    return std::exp(x) * (k0 + 2.0 / x * k1);
  }
  if (x < 30.0) return k2_scaled_integral(x);
  return k2_scaled_asymptotic(x);
}

double bessel_k2(double x) {
  double s = bessel_k2_scaled(x);
  if (x > 690.0) {
    // assemble in log space so the result degrades to 0 gracefully
    double lg = std::log(s) - x;
    return lg < -745.0 ? 0.0 : std::exp(lg);
  }
  return std::exp(-x) * s;
}

GreenEval green_quadrature(double radius, double m, double c, double lambda_c) {
  if (!(radius > 0.0)) {
    throw std::domain_error("green_quadrature: radius must be positive (kernel singular)");
  }
  if (!(lambda_c > 0.0)) {
    throw std::domain_error("green_quadrature: lambda_c must be positive");
  }
  const double z = radius;
  // integrand with the K2 envelope recombined in log space:
  //   t/(t^2+z^2) * k2s(mc s) * exp(-lambda t / c - mc (s - t)),  s = sqrt(t^2+z^2)
  // where s - t = z^2/(s + t) avoids cancellation.
  auto f = [=](double t) {
    double s = std::sqrt(t * t + z * z);
    double expo = -lambda_c * t / c - m * c * (z * z / (s + t));
    if (expo < -745.0) return 0.0;
    return t / (t * t + z * z) * bessel_k2_scaled(m * c * s) * std::exp(expo);
  };
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  double e1 = 0.0, e2 = 0.0;
  double head = gk::integrate(f, 0.0, z, 12, 1e-11, &e1);
  double t_max = std::max(1000.0 * c / lambda_c, 10.0 * z);
  double s_hi = std::asinh(t_max / z);
  auto tail = [=](double s) {
    double t = z * std::sinh(s);
    return f(t) * z * std::cosh(s);
  };
  double rest = gk::integrate(tail, std::asinh(1.0), s_hi, 12, 1e-11, &e2);
  double pref = m * m * c / (2.0 * kPi * kPi);
  GreenEval out;
  out.radius = z;
  out.value = pref * (head + rest);
  out.method = GreenEval::Method::quadrature;
  out.m = m;
  out.c = c;
  out.lambda_c = lambda_c;
  out.error_estimate = pref * (e1 + e2);
  if (!(out.value > 0.0) || out.error_estimate > 1e-6 * out.value) {
    throw quadrature_error("green_quadrature: integral failed to converge");
  }
  return out;
}

namespace {
double resolvent_symbol(double k2, double m, double c, double lambda_c) {
  double root = std::sqrt(c * c * k2 + m * m * c * c * c * c);
  return 1.0 / (c * c * k2 / (root + m * c * c) + lambda_c);
}
}  // namespace

Field green_fourier(const GridSpec& grid, double m, double c, double lambda_c) {
  if (!(lambda_c > 0.0)) {
    throw std::domain_error("green_fourier: lambda_c must be positive");
  }
  auto& eng = detail::engine_for(grid);
  Complex* half = eng.scratch();
  const auto& k2 = eng.k_squared();
  for (std::size_t j = 0; j < k2.size(); ++j) {
    half[j] = resolvent_symbol(k2[j], m, c, lambda_c);
  }
  int n = grid.points_per_dim;
  std::vector<double> raw(grid.point_count());
  eng.inverse(half, raw.data());
  double box = 2.0 * grid.half_width;
  double scale = 1.0 / (box * box * box);
  Field out(share_grid(grid));
  // c2r output is origin-at-index-0; shift to the natural (origin at n/2) order.
  for (int ix = 0; ix < n; ++ix) {
    int jx = (ix + n / 2) % n;
    for (int iy = 0; iy < n; ++iy) {
      int jy = (iy + n / 2) % n;
      for (int iz = 0; iz < n; ++iz) {
        int jz = (iz + n / 2) % n;
        out.values[(static_cast<std::size_t>(ix) * n + iy) * n + iz] =
            raw[(static_cast<std::size_t>(jx) * n + jy) * n + jz] * scale;
      }
    }
  }
  return out;
}

std::vector<GreenEval> green_fourier_radial(const GridSpec& grid, double m, double c,
                                            double lambda_c,
                                            const std::vector<double>& radii) {
  auto& eng = detail::engine_for(grid);
  Complex* half = eng.scratch();
  const auto& k2 = eng.k_squared();
  double kmax = grid.max_wavenumber();
  double kf = 0.25 * kmax;
  for (std::size_t j = 0; j < k2.size(); ++j) {
    half[j] = resolvent_symbol(k2[j], m, c, lambda_c) * std::exp(-k2[j] / (kf * kf));
  }
  int n = grid.points_per_dim;
  std::vector<double> raw(grid.point_count());
  eng.inverse(half, raw.data());
  double box = 2.0 * grid.half_width;
  double scale = 1.0 / (box * box * box);

  std::vector<GreenEval> out;
  out.reserve(radii.size());
  for (double z : radii) {
    int i = static_cast<int>(std::lround(z / grid.spacing));
    if (std::abs(i * grid.spacing - z) > 1e-9 || i < 0 || i >= n / 2) {
      throw std::domain_error("green_fourier_radial: radius must sit on the lattice");
    }
    // filtered grid part, on-axis sample (wrap-ordered array, origin index 0)
    double gpart = raw[static_cast<std::size_t>(i)] * scale;
    // analytic tail: (1/2pi^2 z) int k sin(kz) f(k) (1 - chi) dk, summed between
    // the zeros of sin(kz) and accelerated by repeated averaging.
    auto piece_integrand = [=](double k) {
      double f = resolvent_symbol(k * k, m, c, lambda_c);
      return k * std::sin(k * z) * f * (-std::expm1(-k * k / (kf * kf)));
    };
    const int n_pieces = 400;
    std::vector<double> partial(n_pieces);
    double acc = 0.0;
    double period = kPi / z;
    for (int p = 0; p < n_pieces; ++p) {
      acc += boost::math::quadrature::gauss<double, 30>::integrate(
          piece_integrand, p * period, (p + 1) * period);
      partial[p] = acc;
    }
    int tail_len = 60;
    std::vector<double> t(partial.end() - tail_len, partial.end());
    for (int round = 0; round < 25; ++round) {
      for (std::size_t q = 0; q + 1 < t.size(); ++q) t[q] = 0.5 * (t[q] + t[q + 1]);
      t.pop_back();
    }
    double tail = t.back() / (2.0 * kPi * kPi * z);
    GreenEval ev;
    ev.radius = z;
    ev.value = gpart + tail;
    ev.method = GreenEval::Method::fourier;
    ev.m = m;
    ev.c = c;
    ev.lambda_c = lambda_c;
    out.push_back(ev);
  }
  return out;
}

DecayBoundReport verify_decay_bound(double m, const std::vector<double>& c_list,
                                    double lambda_c, double delta, double r_min,
                                    double r_max, int n_radii) {
  DecayBoundReport rep;
  rep.delta = delta;
  rep.single_point = c_list.size() <= 1;
  rep.delta_admissible = delta < std::min(m / 2.0, std::sqrt(lambda_c * m));
  std::vector<double> radii(n_radii);
  for (int i = 0; i < n_radii; ++i) {
    radii[i] = r_min * std::pow(r_max / r_min, i / double(n_radii - 1));
  }
  bool first = true;
  for (double c : c_list) {
    for (double r : radii) {
      double g = green_quadrature(r, m, c, lambda_c).value;
      double envelope = g * r * r * std::exp(delta * r);
      if (first) {
        rep.prefactor = std::max(rep.prefactor, envelope);
      } else if (envelope > rep.prefactor * (1.0 + 1e-9)) {
        ++rep.violations;
        rep.violating.emplace_back(c, r);
      }
    }
    first = false;
  }
  return rep;
}

}  // namespace hartree
