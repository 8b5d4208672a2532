#include "hartree/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <list>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace hartree {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
constexpr double kPi = 3.14159265358979323846;

// Power of two with one optional factor of three (8, 16, 24, ..., 96, 128,
// 192, ...): every supported lattice size is even and FFT-friendly.
bool is_admissible_size(int n) {
  if (n < 8) return false;
  if (n % 3 == 0) n /= 3;
  return n >= 4 && (n & (n - 1)) == 0;
}
}  // namespace

GridSpec make_grid(double half_width, int points_per_dim) {
  if (!(half_width > 0.0)) {
    throw sizing_error("make_grid: half_width must be positive");
  }
  if (!is_admissible_size(points_per_dim)) {
    throw sizing_error(
        "make_grid: points_per_dim must be a power of two (times an optional "
        "factor of three) and at least 8");
  }
  GridSpec g;
  g.half_width = half_width;
  g.points_per_dim = points_per_dim;
  g.spacing = 2.0 * half_width / points_per_dim;
  return g;
}

std::shared_ptr<const GridSpec> share_grid(const GridSpec& g) {
  return std::make_shared<const GridSpec>(g);
}

namespace {
// Kahan-compensated accumulation keeps the quadrature contracts (relative
// 1e-14) honest on multi-million-point lattices.
struct Accumulator {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};
}  // namespace

double mass(const Field& u) {
  Accumulator acc;
  for (double v : u.values) acc.add(v * v);
  return acc.sum * u.grid->cell_volume();
}

double inner(const Field& a, const Field& b) {
  Accumulator acc;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc.add(a.values[i] * b.values[i]);
  return acc.sum * a.grid->cell_volume();
}

double l2_norm(const Field& u) { return std::sqrt(mass(u)); }

double linf_norm(const Field& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

Field normalize(const Field& u, double target_mass) {
  if (!(target_mass > 0.0)) {
    throw degenerate_field_error("normalize: target mass must be positive");
  }
  double m = mass(u);
  if (!(m > 0.0)) {
    throw degenerate_field_error("normalize: field has zero mass");
  }
  Field out = u;
  double s = std::sqrt(target_mass / m);
  for (double& v : out.values) v *= s;
  return out;
}

std::vector<RadialBin> radial_profile(const Field& u, double bin_width) {
  const GridSpec& g = *u.grid;
  if (bin_width < g.spacing) {
    throw sizing_error("radial_profile: bin_width must be >= spacing");
  }
  int n = g.points_per_dim;
  double rmax = std::sqrt(3.0) * g.half_width;
  int nb = static_cast<int>(rmax / bin_width) + 2;
  std::vector<RadialBin> bins(nb);
  std::vector<double> rsum(nb, 0.0), vsum(nb, 0.0);
  std::vector<std::int64_t> cnt(nb, 0);
  std::vector<int> bin_of(u.values.size());
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    double x = g.coordinate(ix);
    for (int iy = 0; iy < n; ++iy) {
      double y = g.coordinate(iy);
      for (int iz = 0; iz < n; ++iz, ++idx) {
        double z = g.coordinate(iz);
        double r = std::sqrt(x * x + y * y + z * z);
        int b = std::min(static_cast<int>(r / bin_width), nb - 1);
        bin_of[idx] = b;
        rsum[b] += r;
        vsum[b] += u.values[idx];
        ++cnt[b];
      }
    }
  }
  for (int b = 0; b < nb; ++b) {
    if (cnt[b] == 0) continue;
    bins[b].radius = rsum[b] / cnt[b];
    bins[b].mean = vsum[b] / cnt[b];
    bins[b].count = cnt[b];
  }
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    int b = bin_of[i];
    bins[b].deviation = std::max(bins[b].deviation, std::abs(u.values[i] - bins[b].mean));
  }
  bins.erase(std::remove_if(bins.begin(), bins.end(),
                            [](const RadialBin& rb) { return rb.count == 0; }),
             bins.end());
  return bins;
}

namespace {
// Groups lattice points by exact integer |x/h|^2. Offsets from the origin index.
std::vector<std::int64_t> r2_class_of(const GridSpec& g) {
  int n = g.points_per_dim;
  std::vector<std::int64_t> cls(g.point_count());
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    std::int64_t dx = ix - n / 2;
    for (int iy = 0; iy < n; ++iy) {
      std::int64_t dy = iy - n / 2;
      std::int64_t dxy = dx * dx + dy * dy;
      for (int iz = 0; iz < n; ++iz, ++idx) {
        std::int64_t dz = iz - n / 2;
        cls[idx] = dxy + dz * dz;
      }
    }
  }
  return cls;
}
}  // namespace

double radial_anisotropy(const Field& u) {
  auto cls = r2_class_of(*u.grid);
  std::int64_t maxc = *std::max_element(cls.begin(), cls.end());
  std::vector<double> lo(maxc + 1, 1e300), hi(maxc + 1, -1e300);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    double v = u.values[i];
    auto c = cls[i];
    lo[c] = std::min(lo[c], v);
    hi[c] = std::max(hi[c], v);
  }
  double a = 0.0;
  for (std::int64_t c = 0; c <= maxc; ++c) {
    if (hi[c] >= lo[c]) a = std::max(a, hi[c] - lo[c]);
  }
  return a;
}

Field radial_average(const Field& u) {
  auto cls = r2_class_of(*u.grid);
  std::int64_t maxc = *std::max_element(cls.begin(), cls.end());
  std::vector<double> sum(maxc + 1, 0.0);
  std::vector<std::int64_t> cnt(maxc + 1, 0);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    sum[cls[i]] += u.values[i];
    ++cnt[cls[i]];
  }
  Field out(u.grid);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    out.values[i] = sum[cls[i]] / cnt[cls[i]];
  }
  return out;
}

std::array<double, 3> barycenter(const Field& u) {
  const GridSpec& g = *u.grid;
  int n = g.points_per_dim;
  double zr[3] = {0, 0, 0}, zi[3] = {0, 0, 0};
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    double tx = kPi * g.coordinate(ix) / g.half_width;
    double cx = std::cos(tx), sx = std::sin(tx);
    for (int iy = 0; iy < n; ++iy) {
      double ty = kPi * g.coordinate(iy) / g.half_width;
      double cy = std::cos(ty), sy = std::sin(ty);
      for (int iz = 0; iz < n; ++iz, ++idx) {
        double rho = u.values[idx] * u.values[idx];
        double tz = kPi * g.coordinate(iz) / g.half_width;
        zr[0] += rho * cx;
        zi[0] += rho * sx;
        zr[1] += rho * cy;
        zi[1] += rho * sy;
        zr[2] += rho * std::cos(tz);
        zi[2] += rho * std::sin(tz);
      }
    }
  }
  std::array<double, 3> out;
  for (int a = 0; a < 3; ++a) {
    out[a] = std::atan2(zi[a], zr[a]) * g.half_width / kPi;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SpectralEngine

namespace detail {

SpectralEngine::SpectralEngine(const GridSpec& g) : grid_(g) {
  int n = g.points_per_dim;
  std::int64_t nreal = g.point_count();
  std::int64_t nspec = static_cast<std::int64_t>(n) * n * (n / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(nreal);
  spec_ = reinterpret_cast<Complex*>(fftw_alloc_complex(nspec));
  plan_fwd_ = fftw_plan_dft_r2c_3d(n, n, n, real_,
                                   reinterpret_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(spec_),
                                   real_, FFTW_ESTIMATE);
  k2_.resize(nspec);
  w_.resize(nspec);
  std::size_t j = 0;
  for (int ix = 0; ix < n; ++ix) {
    double kx = g.wavenumber(ix);
    for (int iy = 0; iy < n; ++iy) {
      double ky = g.wavenumber(iy);
      for (int iz = 0; iz <= n / 2; ++iz, ++j) {
        double kz = g.two_pi_over_box() * iz;
        k2_[j] = kx * kx + ky * ky + kz * kz;
        w_[j] = (iz == 0 || iz == n / 2) ? 1.0f : 2.0f;
      }
    }
  }
}

SpectralEngine::~SpectralEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  if (plan_pad_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_pad_fwd_));
  if (plan_pad_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_pad_inv_));
  fftw_free(real_);
  fftw_free(spec_);
  if (pad_real_) fftw_free(pad_real_);
  if (pad_spec_) fftw_free(pad_spec_);
}

int SpectralEngine::half_count() const {
  int n = grid_.points_per_dim;
  return n * n * (n / 2 + 1);
}

void SpectralEngine::forward(const double* in, Complex* out) {
  std::copy(in, in + grid_.point_count(), real_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::copy(spec_, spec_ + half_count(), out);
}

void SpectralEngine::inverse(const Complex* in, double* out) {
  std::copy(in, in + half_count(), spec_);
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  std::copy(real_, real_ + grid_.point_count(), out);
}

Complex* SpectralEngine::scratch() { return spec_; }
double* SpectralEngine::real_scratch() { return real_; }

void SpectralEngine::wavevector(std::int64_t j, double k[3]) const {
  int n = grid_.points_per_dim;
  int nh = n / 2 + 1;
  int iz = static_cast<int>(j % nh);
  int iy = static_cast<int>((j / nh) % n);
  int ix = static_cast<int>(j / (static_cast<std::int64_t>(nh) * n));
  k[0] = grid_.wavenumber(ix);
  k[1] = grid_.wavenumber(iy);
  k[2] = grid_.two_pi_over_box() * iz;
}

std::int64_t SpectralEngine::padded_half_count() const {
  std::int64_t p = 2 * grid_.points_per_dim;
  return p * p * (p / 2 + 1);
}

void SpectralEngine::ensure_padded() {
  if (plan_pad_fwd_) return;
  int p = 2 * grid_.points_per_dim;
  std::int64_t nreal = static_cast<std::int64_t>(p) * p * p;
  std::int64_t nspec = static_cast<std::int64_t>(p) * p * (p / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  pad_real_ = fftw_alloc_real(nreal);
  pad_spec_ = reinterpret_cast<Complex*>(fftw_alloc_complex(nspec));
  plan_pad_fwd_ = fftw_plan_dft_r2c_3d(
      p, p, p, pad_real_, reinterpret_cast<fftw_complex*>(pad_spec_), FFTW_ESTIMATE);
  plan_pad_inv_ = fftw_plan_dft_c2r_3d(
      p, p, p, reinterpret_cast<fftw_complex*>(pad_spec_), pad_real_, FFTW_ESTIMATE);
}

void SpectralEngine::forward_padded(const double* in, Complex* out) {
  ensure_padded();
  std::int64_t p3 = 8 * grid_.point_count();
  if (in != pad_real_) std::copy(in, in + p3, pad_real_);
  fftw_execute(static_cast<fftw_plan>(plan_pad_fwd_));
  if (out != pad_spec_) std::copy(pad_spec_, pad_spec_ + padded_half_count(), out);
}

void SpectralEngine::inverse_padded(const Complex* in, double* out) {
  ensure_padded();
  if (in != pad_spec_) std::copy(in, in + padded_half_count(), pad_spec_);
  fftw_execute(static_cast<fftw_plan>(plan_pad_inv_));
  std::int64_t p3 = 8 * grid_.point_count();
  if (out != pad_real_) std::copy(pad_real_, pad_real_ + p3, out);
}

const std::vector<double>& SpectralEngine::coulomb_kernel() {
  if (!coulomb_.empty()) return coulomb_;
  const GridSpec& g = grid_;
  int p = 2 * g.points_per_dim;
  double dk = kPi / (2.0 * g.half_width);  // padded box has side 4L
  double radius = 2.0 * g.half_width;
  coulomb_.resize(padded_half_count());
  std::size_t j = 0;
  for (int ix = 0; ix < p; ++ix) {
    int sx = (ix < p / 2) ? ix : ix - p;
    double kx = dk * sx;
    for (int iy = 0; iy < p; ++iy) {
      int sy = (iy < p / 2) ? iy : iy - p;
      double ky = dk * sy;
      for (int iz = 0; iz <= p / 2; ++iz, ++j) {
        double kz = dk * iz;
        double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) {
          coulomb_[j] = 2.0 * kPi * radius * radius;  // analytic k->0 limit
        } else {
          double k = std::sqrt(k2);
          coulomb_[j] = 4.0 * kPi * (1.0 - std::cos(radius * k)) / k2;
        }
      }
    }
  }
  return coulomb_;
}

SpectralEngine& engine_for(const GridSpec& g) {
  // Per-thread cache; a worker reuses its engine across calls on the same grid.
  thread_local std::list<std::unique_ptr<SpectralEngine>> cache;
  for (auto it = cache.begin(); it != cache.end(); ++it) {
    if ((*it)->grid() == g) {
      cache.splice(cache.begin(), cache, it);
      return *cache.front();
    }
  }
  cache.push_front(std::make_unique<SpectralEngine>(g));
  if (cache.size() > 3) cache.pop_back();
  return *cache.front();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spectral service functions

namespace {
constexpr double kTwoPi = 2.0 * kPi;

// The forward r2c of u into the engine scratch; returns pointer to it.
Complex* raw_forward(detail::SpectralEngine& eng, const Field& u) {
  eng.forward(u.values.data(), eng.scratch());
  return eng.scratch();
}
}  // namespace

std::vector<Complex> forward_transform(const Field& u) {
  const GridSpec& g = *u.grid;
  auto& eng = detail::engine_for(g);
  int n = g.points_per_dim;
  Complex* half = raw_forward(eng, u);
  // Expand the half-spectrum to the full cube with the unitary scaling.
  double scale = g.cell_volume() / std::pow(kTwoPi, 1.5);
  std::vector<Complex> out(g.point_count());
  int nh = n / 2 + 1;
  for (int ix = 0; ix < n; ++ix) {
    int cx = (n - ix) % n;
    for (int iy = 0; iy < n; ++iy) {
      int cy = (n - iy) % n;
      for (int iz = 0; iz < n; ++iz) {
        std::size_t dst = (static_cast<std::size_t>(ix) * n + iy) * n + iz;
        if (iz <= n / 2) {
          out[dst] = scale * half[(static_cast<std::size_t>(ix) * n + iy) * nh + iz];
        } else {
          int cz = n - iz;
          out[dst] =
              scale * std::conj(half[(static_cast<std::size_t>(cx) * n + cy) * nh + cz]);
        }
      }
    }
  }
  return out;
}

Field inverse_transform(const GridSpec& g, const std::vector<Complex>& uhat) {
  // Inverse of forward_transform: u(x) = (2pi)^(-3/2) dk^3 sum uhat e^{+ik.x}.
  // Collapse the full cube back to the half-spectrum and run c2r.
  auto& eng = detail::engine_for(g);
  int n = g.points_per_dim;
  int nh = n / 2 + 1;
  Complex* half = eng.scratch();
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz <= n / 2; ++iz) {
        half[(static_cast<std::size_t>(ix) * n + iy) * nh + iz] =
            uhat[(static_cast<std::size_t>(ix) * n + iy) * n + iz];
      }
    }
  }
  double dk = g.two_pi_over_box();
  double scale = dk * dk * dk / std::pow(kTwoPi, 1.5);
  Field out(share_grid(g));
  eng.inverse(half, out.values.data());
  for (double& v : out.values) v *= scale;
  return out;
}

Field translate(const Field& u, const std::array<double, 3>& shift) {
  const GridSpec& g = *u.grid;
  auto& eng = detail::engine_for(g);
  int n = g.points_per_dim;
  int nh = n / 2 + 1;
  Complex* half = raw_forward(eng, u);
  std::size_t j = 0;
  for (int ix = 0; ix < n; ++ix) {
    double px = g.wavenumber(ix) * shift[0];
    for (int iy = 0; iy < n; ++iy) {
      double pxy = px + g.wavenumber(iy) * shift[1];
      for (int iz = 0; iz < nh; ++iz, ++j) {
        double ph = pxy + g.two_pi_over_box() * iz * shift[2];
        half[j] *= Complex(std::cos(ph), -std::sin(ph));
      }
    }
  }
  Field out(u.grid);
  eng.inverse(half, out.values.data());
  double inv_n3 = 1.0 / static_cast<double>(g.point_count());
  for (double& v : out.values) v *= inv_n3;
  return out;
}

Field gradient_component(const Field& u, int axis) {
  const GridSpec& g = *u.grid;
  auto& eng = detail::engine_for(g);
  int n = g.points_per_dim;
  int nh = n / 2 + 1;
  Complex* half = raw_forward(eng, u);
  std::size_t j = 0;
  for (int ix = 0; ix < n; ++ix) {
    // Nyquist modes carry no usable derivative sign; zero them.
    double kx = (ix == n / 2) ? 0.0 : g.wavenumber(ix);
    for (int iy = 0; iy < n; ++iy) {
      double ky = (iy == n / 2) ? 0.0 : g.wavenumber(iy);
      for (int iz = 0; iz < nh; ++iz, ++j) {
        double kz = (iz == n / 2) ? 0.0 : g.two_pi_over_box() * iz;
        double k = axis == 0 ? kx : (axis == 1 ? ky : kz);
        half[j] *= Complex(0.0, k);
      }
    }
  }
  Field out(u.grid);
  eng.inverse(half, out.values.data());
  double inv_n3 = 1.0 / static_cast<double>(g.point_count());
  for (double& v : out.values) v *= inv_n3;
  return out;
}

Field gradient_magnitude(const Field& u) {
  Field gx = gradient_component(u, 0);
  Field gy = gradient_component(u, 1);
  Field gz = gradient_component(u, 2);
  Field out(u.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::sqrt(gx.values[i] * gx.values[i] + gy.values[i] * gy.values[i] +
                              gz.values[i] * gz.values[i]);
  }
  return out;
}

Field resample(const Field& u, const std::shared_ptr<const GridSpec>& to) {
  const GridSpec& a = *u.grid;
  const GridSpec& b = *to;
  if (a.half_width != b.half_width) {
    throw sizing_error("resample: grids must share the same box");
  }
  auto ua = forward_transform(u);
  int na = a.points_per_dim, nb = b.points_per_dim;
  std::vector<Complex> ub(b.point_count(), Complex(0.0, 0.0));
  int keep = std::min(na, nb) / 2;
  auto wrap = [](int s, int n) { return s >= 0 ? s : s + n; };
  for (int sx = -keep; sx < keep; ++sx) {
    for (int sy = -keep; sy < keep; ++sy) {
      for (int sz = -keep; sz < keep; ++sz) {
        std::size_t src =
            (static_cast<std::size_t>(wrap(sx, na)) * na + wrap(sy, na)) * na +
            wrap(sz, na);
        std::size_t dst =
            (static_cast<std::size_t>(wrap(sx, nb)) * nb + wrap(sy, nb)) * nb +
            wrap(sz, nb);
        ub[dst] = ua[src];
      }
    }
  }
  return inverse_transform(b, ub);
}

}  // namespace hartree
