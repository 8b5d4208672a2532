#include <doctest.h>

#include <cmath>
#include <random>

#include "hartree/grid.hpp"

using namespace hartree;

namespace {
constexpr double kPi = 3.14159265358979323846;

Field random_smooth_field(const std::shared_ptr<const GridSpec>& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double a = unif(rng), b = unif(rng), w = 0.8 + 0.4 * unif(rng);
  return sample_field(g, [&](double x, double y, double z) {
    double r2 = x * x + y * y + z * z;
    return (a + b * x + 0.3 * y * z) * std::exp(-r2 / (2 * w * w));
  });
}
}  // namespace

TEST_CASE("make_grid basic sizing") {
  GridSpec g = make_grid(8.0, 64);
  CHECK(g.spacing == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.spacing * g.points_per_dim == doctest::Approx(16.0).epsilon(1e-15));

  GridSpec s = make_grid(8.0, 8);
  // largest wavenumber magnitude along an axis: (pi/8) * 4
  CHECK(s.max_wavenumber() == doctest::Approx(kPi / 2.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_grid(8.0, 63), sizing_error);
  CHECK_THROWS_AS(make_grid(-1.0, 64), sizing_error);
  CHECK_THROWS_AS(make_grid(8.0, 4), sizing_error);
}

TEST_CASE("wavenumber lattice symmetry") {
  GridSpec g = make_grid(6.0, 16);
  int n = g.points_per_dim;
  // k(j) for j=1..n/2-1 pairs with k(n-j) = -k(j); Nyquist j=n/2 is unpaired.
  for (int j = 1; j < n / 2; ++j) {
    CHECK(g.wavenumber(j) == doctest::Approx(-g.wavenumber(n - j)).epsilon(1e-15));
  }
  CHECK(g.wavenumber(0) == 0.0);
  CHECK(g.wavenumber(n / 2) == doctest::Approx(-g.max_wavenumber()));
}

TEST_CASE("mass examples") {
  auto g = share_grid(make_grid(6.0, 16));
  Field zero(g);
  CHECK(mass(zero) == 0.0);

  Field spike(g);
  spike.at(3, 4, 5) = 2.5;
  CHECK(mass(spike) == doctest::Approx(2.5 * 2.5 * g->cell_volume()).epsilon(1e-15));
}

TEST_CASE("gaussian mass quadrature") {
  auto g = share_grid(make_grid(12.0, 128));
  double norm = std::pow(kPi, -0.75);
  Field u = sample_field(g, [&](double x, double y, double z) {
    return norm * std::exp(-(x * x + y * y + z * z) / 2.0);
  });
  CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("normalize") {
  auto g = share_grid(make_grid(6.0, 16));
  Field u = sample_field(g, [](double x, double, double) { return 1.0 + 0.2 * x; });
  Field v = normalize(u, 1.0);
  CHECK(mass(v) == doctest::Approx(1.0).epsilon(1e-14));
  // direction unchanged
  double ratio = v.values[10] / u.values[10];
  for (std::size_t i = 0; i < u.values.size(); i += 97) {
    CHECK(v.values[i] == doctest::Approx(ratio * u.values[i]).epsilon(1e-12));
  }
  // scaling law: mass 4 -> target 1 divides values by 2
  Field w = normalize(u, 4.0 * mass(u));
  CHECK(w.values[5] == doctest::Approx(2.0 * u.values[5]).epsilon(1e-13));
  // idempotent at fixed target
  Field v2 = normalize(v, 1.0);
  for (std::size_t i = 0; i < v.values.size(); i += 131) {
    CHECK(v2.values[i] == doctest::Approx(v.values[i]).epsilon(1e-14));
  }
  Field zero(g);
  CHECK_THROWS_AS(normalize(zero, 1.0), degenerate_field_error);
}

TEST_CASE("parseval and round trip") {
  auto g = share_grid(make_grid(5.0, 32));
  Field u = random_smooth_field(g, 11);
  auto uhat = forward_transform(u);
  double dk = g->two_pi_over_box();
  double spec_mass = 0.0;
  for (const auto& z : uhat) spec_mass += std::norm(z);
  spec_mass *= dk * dk * dk;
  CHECK(spec_mass == doctest::Approx(mass(u)).epsilon(1e-12));

  Field back = inverse_transform(*g, uhat);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    err = std::max(err, std::abs(back.values[i] - u.values[i]));
    scale = std::max(scale, std::abs(u.values[i]));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("radial profile of radial exponential") {
  auto g = share_grid(make_grid(8.0, 64));
  Field u = sample_field(g, [](double x, double y, double z) {
    return std::exp(-std::sqrt(x * x + y * y + z * z));
  });
  auto bins = radial_profile(u, 2.0 * g->spacing);
  for (const auto& b : bins) {
    if (b.radius < 1.0 || b.radius > 5.0) continue;
    CHECK(b.mean == doctest::Approx(std::exp(-b.radius)).epsilon(0.05));
  }
}

TEST_CASE("radial profile flags odd functions") {
  auto g = share_grid(make_grid(8.0, 32));
  Field u = sample_field(g, [](double x, double, double) { return x; });
  auto bins = radial_profile(u, 2.0 * g->spacing);
  for (const auto& b : bins) {
    if (b.radius < 1.0 || b.radius > 6.0) continue;
    CHECK(std::abs(b.mean) < 1e-12);
    CHECK(b.deviation > 0.5 * b.radius);  // deviation about the bin radius scale
  }
  CHECK(radial_anisotropy(u) > 1.0);

  Field radial = sample_field(g, [](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z));
  });
  CHECK(radial_anisotropy(radial) <= 1e-14);
}

TEST_CASE("bin width below spacing rejected") {
  auto g = share_grid(make_grid(8.0, 32));
  Field u(g);
  u.values[0] = 1.0;
  CHECK_THROWS_AS(radial_profile(u, 0.1 * g->spacing), sizing_error);
}

TEST_CASE("translate is exact for lattice shifts") {
  auto g = share_grid(make_grid(6.0, 32));
  Field u = random_smooth_field(g, 3);
  double h = g->spacing;
  Field shifted = translate(u, {h, 2 * h, -h});
  int n = g->points_per_dim;
  double err = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        int sx = (ix - 1 + n) % n, sy = (iy - 2 + n) % n, sz = (iz + 1) % n;
        err = std::max(err, std::abs(shifted.at(ix, iy, iz) - u.at(sx, sy, sz)));
      }
    }
  }
  CHECK(err <= 1e-12 * linf_norm(u));
}

TEST_CASE("barycenter of a shifted gaussian") {
  auto g = share_grid(make_grid(8.0, 64));
  Field u = sample_field(g, [](double x, double y, double z) {
    double dx = x - 0.75, dy = y + 0.5, dz = z - 0.25;
    return std::exp(-(dx * dx + dy * dy + dz * dz));
  });
  auto b = barycenter(u);
  CHECK(b[0] == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(b[1] == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(b[2] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("gradient of plane wave") {
  auto g = share_grid(make_grid(4.0, 32));
  double k = 2.0 * g->two_pi_over_box();
  Field u = sample_field(g, [&](double x, double, double) { return std::sin(k * x); });
  Field gx = gradient_component(u, 0);
  Field gy = gradient_component(u, 1);
  double err = 0.0;
  int n = g->points_per_dim;
  for (int ix = 0; ix < n; ++ix) {
    double x = g->coordinate(ix);
    err = std::max(err, std::abs(gx.at(ix, 3, 7) - k * std::cos(k * x)));
  }
  CHECK(err <= 1e-12 * k);
  CHECK(linf_norm(gy) <= 1e-13 * k);
}

TEST_CASE("resample preserves smooth fields") {
  auto coarse = share_grid(make_grid(6.0, 32));
  auto fine = share_grid(make_grid(6.0, 64));
  Field u = sample_field(coarse, [](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z) / 2.0);
  });
  Field up = resample(u, fine);
  Field exact = sample_field(fine, [](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z) / 2.0);
  });
  double err = 0.0;
  for (std::size_t i = 0; i < up.values.size(); ++i) {
    err = std::max(err, std::abs(up.values[i] - exact.values[i]));
  }
  CHECK(err <= 1e-8);
  // mass is preserved by Fourier interpolation
  CHECK(mass(up) == doctest::Approx(mass(u)).epsilon(1e-12));
}
