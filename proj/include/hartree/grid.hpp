#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace hartree {

/// Periodic cubic sampling lattice on [-L, L)^3 together with its Fourier
/// wavenumber lattice k in (pi/L) * {-n/2, ..., n/2-1}^3.
struct GridSpec {
  double half_width = 0.0;  // L
  int points_per_dim = 0;   // n, power of two
  double spacing = 0.0;     // 2L/n

  std::int64_t point_count() const {
    auto n = static_cast<std::int64_t>(points_per_dim);
    return n * n * n;
  }
  double cell_volume() const { return spacing * spacing * spacing; }

  /// Coordinate of sample index i along any axis; index n/2 is the origin.
  double coordinate(int i) const { return (i - points_per_dim / 2) * spacing; }

  /// Signed wavenumber of FFT-ordered frequency index j along any axis.
  double wavenumber(int j) const {
    int n = points_per_dim;
    int s = (j < n / 2) ? j : j - n;
    return two_pi_over_box() * s;
  }
  double two_pi_over_box() const { return 3.14159265358979323846 / half_width; }
  double max_wavenumber() const { return two_pi_over_box() * (points_per_dim / 2); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class sizing_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class degenerate_field_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GridSpec make_grid(double half_width, int points_per_dim);

/// Real scalar function sampled on a GridSpec. Values are stored x-major:
/// values[(ix*n + iy)*n + iz], with index n/2 at the coordinate origin.
struct Field {
  std::shared_ptr<const GridSpec> grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(std::shared_ptr<const GridSpec> g)
      : grid(std::move(g)), values(grid->point_count(), 0.0) {}

  double& at(int ix, int iy, int iz) {
    int n = grid->points_per_dim;
    return values[(static_cast<std::size_t>(ix) * n + iy) * n + iz];
  }
  double at(int ix, int iy, int iz) const {
    int n = grid->points_per_dim;
    return values[(static_cast<std::size_t>(ix) * n + iy) * n + iz];
  }
};

std::shared_ptr<const GridSpec> share_grid(const GridSpec& g);

/// Builds a field by evaluating f(x, y, z) at every sample point.
template <typename F>
Field sample_field(const std::shared_ptr<const GridSpec>& g, F&& f) {
  Field u(g);
  int n = g->points_per_dim;
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    double x = g->coordinate(ix);
    for (int iy = 0; iy < n; ++iy) {
      double y = g->coordinate(iy);
      for (int iz = 0; iz < n; ++iz, ++idx) {
        u.values[idx] = f(x, y, g->coordinate(iz));
      }
    }
  }
  return u;
}

double mass(const Field& u);
double inner(const Field& a, const Field& b);  // L2 pairing with cell weights
double l2_norm(const Field& u);
double linf_norm(const Field& u);

Field normalize(const Field& u, double target_mass);

struct RadialBin {
  double radius = 0.0;      // mean sample radius in the bin
  double mean = 0.0;        // mean value over the bin
  double deviation = 0.0;   // max |value - mean| within the bin
  std::int64_t count = 0;
};

std::vector<RadialBin> radial_profile(const Field& u, double bin_width);

/// Departure from exact radial symmetry: max over equal-|x| lattice classes of
/// (max - min) within the class. Zero for any radial function.
double radial_anisotropy(const Field& u);

/// Density barycenter via the first circular harmonic (well defined on the torus).
std::array<double, 3> barycenter(const Field& u);

// --- spectral services (FFT-backed, shared by the operator modules) ---

using Complex = std::complex<double>;

/// Unitary forward transform: uhat(k) = (2pi)^(-3/2) h^3 sum u(x) e^{-ik.x},
/// frequencies FFT-ordered. Parseval: sum |u|^2 h^3 = sum |uhat|^2 dk^3.
std::vector<Complex> forward_transform(const Field& u);
Field inverse_transform(const GridSpec& g, const std::vector<Complex>& uhat);

/// Translates u by the vector a (spectral phase shift; exact for lattice shifts).
Field translate(const Field& u, const std::array<double, 3>& shift);

/// Spectral gradient component along axis (0, 1, 2).
Field gradient_component(const Field& u, int axis);
Field gradient_magnitude(const Field& u);

/// Resamples u onto another grid with the same box by Fourier interpolation.
Field resample(const Field& u, const std::shared_ptr<const GridSpec>& to);

/// Projects onto functions constant on each equal-|x| lattice class.
Field radial_average(const Field& u);

namespace detail {
/// Per-thread FFT workspace for a given grid (plans plus scratch buffers).
/// apply(fn) runs fn over the half-spectrum in place between r2c and c2r.
class SpectralEngine;
SpectralEngine& engine_for(const GridSpec& g);

class SpectralEngine {
 public:
  explicit SpectralEngine(const GridSpec& g);
  ~SpectralEngine();
  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  const GridSpec& grid() const { return grid_; }

  // Half-spectrum layout: (n, n, n/2+1), FFT frequency order on the first two
  // axes. Weight 2 applies to interior last-axis indices in quadratures.
  int half_count() const;

  void forward(const double* in, Complex* out);       // r2c, unnormalized
  void inverse(const Complex* in, double* out);       // c2r, unnormalized
  Complex* scratch();                                 // half-spectrum buffer
  double* real_scratch();                             // n^3 buffer

  /// kk2[j] = |k|^2 for half-spectrum index j; last_weight[j] in {1,2}.
  const std::vector<double>& k_squared() const { return k2_; }
  const std::vector<float>& last_axis_weight() const { return w_; }
  /// Signed wavenumber components for half-spectrum index j.
  void wavevector(std::int64_t j, double k[3]) const;

  // Padded (2n)^3 transforms for free-space convolution.
  void forward_padded(const double* in, Complex* out);
  void inverse_padded(const Complex* in, double* out);
  std::int64_t padded_half_count() const;
  double* padded_real() { ensure_padded(); return pad_real_; }
  Complex* padded_spec() { ensure_padded(); return pad_spec_; }
  /// Transform of the Coulomb kernel truncated at radius 2L, on the padded
  /// half-spectrum: 4 pi (1 - cos(2L|k|)) / |k|^2, value 8 pi L^2 at k = 0.
  const std::vector<double>& coulomb_kernel();

 private:
  void ensure_padded();
  GridSpec grid_;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  void* plan_pad_fwd_ = nullptr;
  void* plan_pad_inv_ = nullptr;
  double* real_ = nullptr;
  Complex* spec_ = nullptr;
  double* pad_real_ = nullptr;
  Complex* pad_spec_ = nullptr;
  std::vector<double> k2_;
  std::vector<float> w_;
  std::vector<double> coulomb_;
};
}  // namespace detail

}  // namespace hartree
