#include "hartree/linearized.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace hartree {

namespace {
Field squared(const Field& u) {
  Field rho(u.grid);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    rho.values[i] = u.values[i] * u.values[i];
  }
  return rho;
}

Field pointwise_product(const Field& a, const Field& b) {
  Field out(a.grid);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    out.values[i] = a.values[i] * b.values[i];
  }
  return out;
}

void axpy(Field& y, double alpha, const Field& x) {
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    y.values[i] += alpha * x.values[i];
  }
}
}  // namespace

LinearizedContext LinearizedContext::limit(Field q, double lambda, double m) {
  LinearizedContext ctx;
  ctx.family = Family::limit;
  ctx.base_potential = coulomb_potential(squared(q));
  ctx.base = std::move(q);
  ctx.lambda = lambda;
  ctx.m = m;
  return ctx;
}

LinearizedContext LinearizedContext::relativistic(Field q, double mu_c, double m,
                                                  double c) {
  LinearizedContext ctx;
  ctx.family = Family::relativistic;
  ctx.base_potential = coulomb_potential(squared(q));
  ctx.base = std::move(q);
  ctx.mu_c = mu_c;
  ctx.m = m;
  ctx.c = c;
  return ctx;
}

Field apply_lplus(const LinearizedContext& ctx, const Field& xi) {
  Field out = apply_multiplier(MultiplierSymbol::nonrelativistic(ctx.m), xi);
  Field conv = coulomb_potential(pointwise_product(ctx.base, xi));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] += (ctx.lambda - ctx.base_potential.values[i]) * xi.values[i] -
                     2.0 * conv.values[i] * ctx.base.values[i];
  }
  return out;
}

Field apply_relativistic_linearized(const LinearizedContext& ctx, const Field& xi,
                                    double k1, double k2) {
  Field out = apply_multiplier(MultiplierSymbol::relativistic(ctx.m, ctx.c), xi);
  Field conv = coulomb_potential(pointwise_product(ctx.base, xi));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] += -ctx.base_potential.values[i] * xi.values[i] -
                     2.0 * k1 * conv.values[i] * ctx.base.values[i] -
                     k2 * ctx.base.values[i];
  }
  return out;
}

Field dilation_mode(const Field& u) {
  const GridSpec& g = *u.grid;
  int n = g.points_per_dim;
  Field out(u.grid);
  for (int axis = 0; axis < 3; ++axis) {
    Field grad = gradient_component(u, axis);
    std::size_t idx = 0;
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < n; ++iy) {
        for (int iz = 0; iz < n; ++iz, ++idx) {
          int i = axis == 0 ? ix : (axis == 1 ? iy : iz);
          out.values[idx] += g.coordinate(i) * grad.values[idx];
        }
      }
    }
  }
  return out;
}

double dilation_identity_residual(const LinearizedContext& ctx) {
  Field v = dilation_mode(ctx.base);
  axpy(v, 2.0, ctx.base);
  Field lv = apply_lplus(ctx, v);
  axpy(lv, 2.0 * ctx.lambda, ctx.base);
  return l2_norm(lv) / l2_norm(ctx.base);
}

// ---------------------------------------------------------------------------
// Block shift-invert eigenprobe

namespace {

// Applies L+ with an optional restriction to the radially averaged sector.
struct OperatorClosure {
  const LinearizedContext* ctx;
  bool radial;
  Field operator()(const Field& x) const {
    if (!radial) return apply_lplus(*ctx, x);
    Field xr = radial_average(x);
    return radial_average(apply_lplus(*ctx, xr));
  }
};

// Preconditioned MINRES for the symmetric (indefinite) system A x = b with the
// SPD preconditioner (-Lap/2m + shift)^{-1}. Stops after max_iter or when the
// preconditioned residual norm estimate drops below rel_tol of its start.
Field minres_solve(const OperatorClosure& A, const Field& b, double m, double shift,
                   double rel_tol, int max_iter) {
  MultiplierSymbol P = MultiplierSymbol::preconditioner(m, shift);
  auto grid = b.grid;
  Field x(grid);
  Field v_prev(grid), v = b;
  Field z = apply_multiplier(P, v);
  double gamma = std::sqrt(inner(z, v));
  if (!(gamma > 0.0)) return x;
  double gamma_prev = 1.0, gamma0 = gamma;
  double eta = gamma;
  double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;
  Field w(grid), w_prev(grid);
  for (int it = 0; it < max_iter; ++it) {
    Field zh = z;
    for (double& t : zh.values) t /= gamma;
    Field az = A(zh);
    double delta = inner(az, zh);
    Field v_next = az;
    axpy(v_next, -delta / gamma, v);
    if (it > 0) axpy(v_next, -gamma / gamma_prev, v_prev);
    Field z_next = apply_multiplier(P, v_next);
    double gamma_next = std::sqrt(std::max(0.0, inner(z_next, v_next)));
    double a0 = c * delta - c_prev * s * gamma;
    double a1 = std::sqrt(a0 * a0 + gamma_next * gamma_next);
    double a2 = s * delta + c_prev * c * gamma;
    double a3 = s_prev * gamma;
    double c_next = a0 / a1;
    double s_next = gamma_next / a1;
    Field w_next = zh;
    axpy(w_next, -a3, w_prev);
    axpy(w_next, -a2, w);
    for (double& t : w_next.values) t /= a1;
    axpy(x, c_next * eta, w_next);
    eta = -s_next * eta;
    v_prev = std::move(v);
    v = std::move(v_next);
    z = std::move(z_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    c_prev = c;
    c = c_next;
    s_prev = s;
    s = s_next;
    w_prev = std::move(w);
    w = std::move(w_next);
    if (std::abs(eta) <= rel_tol * gamma0 || gamma <= 1e-300) break;
  }
  return x;
}

void orthonormalize(std::vector<Field>& basis) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        axpy(basis[i], -inner(basis[i], basis[j]), basis[j]);
      }
    }
    double nrm = l2_norm(basis[i]);
    for (double& v : basis[i].values) v /= nrm;
  }
}

}  // namespace

KernelProbeReport kernel_probe(const LinearizedContext& ctx, int n_eigs,
                               bool radial_sector, std::uint64_t seed) {
  KernelProbeReport report;
  if (n_eigs <= 0) return report;
  if (n_eigs > 10) {
    throw std::invalid_argument("kernel_probe: n_eigs must be <= 10");
  }
  OperatorClosure A{&ctx, radial_sector};
  auto g = ctx.base.grid;
  int block = n_eigs + 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Field> X;
  for (int i = 0; i < block; ++i) {
    Field f = sample_field(g, [&](double, double, double) { return gauss(rng); });
    // localize the probe vectors where the base state lives
    for (std::size_t p = 0; p < f.values.size(); ++p) {
      f.values[p] *= ctx.base.values[p];
    }
    if (radial_sector) f = radial_average(f);
    X.push_back(std::move(f));
  }
  orthonormalize(X);

  double shift = ctx.family == LinearizedContext::Family::limit ? ctx.lambda
                                                                : std::abs(ctx.mu_c);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(block);
  double max_resid = 1e300;
  const int max_outer = 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    std::vector<Field> Y;
    Y.reserve(block);
    for (int i = 0; i < block; ++i) {
      Y.push_back(minres_solve(A, X[i], ctx.m, shift, 1e-8, 120));
      if (radial_sector) Y.back() = radial_average(Y.back());
    }
    orthonormalize(Y);
    // Rayleigh-Ritz on span(Y)
    std::vector<Field> AY;
    AY.reserve(block);
    for (int i = 0; i < block; ++i) AY.push_back(A(Y[i]));
    Eigen::MatrixXd H(block, block);
    for (int i = 0; i < block; ++i) {
      for (int j = 0; j <= i; ++j) {
        H(i, j) = H(j, i) = 0.5 * (inner(Y[i], AY[j]) + inner(Y[j], AY[i]));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::VectorXd ev = es.eigenvalues();
    Eigen::MatrixXd V = es.eigenvectors();
    // sort by |eigenvalue|
    std::vector<int> order(block);
    for (int i = 0; i < block; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });
    std::vector<Field> Xn;
    Eigen::VectorXd theta_n(block);
    for (int r = 0; r < block; ++r) {
      int cidx = order[r];
      Field xr(g);
      for (int i = 0; i < block; ++i) axpy(xr, V(i, cidx), Y[i]);
      Xn.push_back(std::move(xr));
      theta_n(r) = ev(cidx);
    }
    // Ritz residuals for the requested pairs
    max_resid = 0.0;
    for (int r = 0; r < n_eigs; ++r) {
      Field res = A(Xn[r]);
      axpy(res, -theta_n(r), Xn[r]);
      max_resid = std::max(max_resid, l2_norm(res));
    }
    double drift = (theta_n - theta).cwiseAbs().maxCoeff();
    X = std::move(Xn);
    theta = theta_n;
    if (outer >= 2 && (max_resid < 1e-7 * std::max(1.0, shift) ||
                       drift < 1e-10 * std::max(1.0, shift))) {
      break;
    }
  }
  report.inconclusive = max_resid > 1e-4 * std::max(1.0, shift);

  for (int r = 0; r < n_eigs; ++r) {
    report.pairs.push_back({theta(r), X[r]});
  }

  // Grid-independent near-zero tolerance from the radial sector's lowest
  // nonzero magnitude.
  if (radial_sector) {
    report.radial_scale = std::abs(theta(0));
  } else {
    KernelProbeReport rad = kernel_probe(ctx, 2, true, seed + 1);
    report.radial_scale =
        rad.pairs.empty() ? shift : std::abs(rad.pairs.front().value);
  }
  report.kernel_tolerance = 1e-4 * std::max(report.radial_scale, 1e-12);
  for (const auto& p : report.pairs) {
    if (std::abs(p.value) <= report.kernel_tolerance) ++report.kernel_count;
  }

  // Overlap of the near-zero span with span{d_i Q}.
  if (report.kernel_count > 0) {
    std::vector<Field> D;
    for (int a = 0; a < 3; ++a) D.push_back(gradient_component(ctx.base, a));
    orthonormalize(D);
    std::vector<Field> K;
    for (const auto& p : report.pairs) {
      if (std::abs(p.value) <= report.kernel_tolerance) K.push_back(p.vector);
    }
    orthonormalize(K);
    Eigen::MatrixXd O(D.size(), K.size());
    for (std::size_t i = 0; i < D.size(); ++i) {
      for (std::size_t j = 0; j < K.size(); ++j) O(i, j) = inner(D[i], K[j]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(O);
    report.span_overlap = svd.singularValues().minCoeff();
  }
  return report;
}

DifferenceModeReport difference_mode_report(const Field& q_a, const Field& q_b,
                                            const LinearizedContext& ctx) {
  Field w(q_a.grid);
  double dist = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    w.values[i] = q_a.values[i] - q_b.values[i];
    dist = std::max(dist, std::abs(w.values[i]));
  }
  if (dist <= 1e-14) {
    throw degenerate_difference_error(
        "difference_mode_report: states are identical to 1e-14");
  }
  for (double& v : w.values) v /= dist;

  std::vector<Field> basis;
  Field v0 = dilation_mode(ctx.base);
  axpy(v0, 2.0, ctx.base);
  basis.push_back(std::move(v0));
  for (int a = 0; a < 3; ++a) basis.push_back(gradient_component(ctx.base, a));

  Eigen::Matrix4d G;
  Eigen::Vector4d rhs;
  for (int i = 0; i < 4; ++i) {
    rhs(i) = inner(basis[i], w);
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = inner(basis[i], basis[j]);
  }
  Eigen::Vector4d coef = G.ldlt().solve(rhs);
  Field proj(q_a.grid);
  for (int i = 0; i < 4; ++i) axpy(proj, coef(i), basis[i]);

  DifferenceModeReport rep;
  rep.b0 = coef(0);
  rep.translation = {coef(1), coef(2), coef(3)};
  Field rem = w;
  axpy(rem, -1.0, proj);
  rep.remainder_norm = l2_norm(rem) / l2_norm(w);
  for (int a = 0; a < 3; ++a) {
    rep.grad_orthogonality +=
        inner(gradient_component(w, a), gradient_component(ctx.base, a));
  }
  return rep;
}

double difference_source_coefficient(const Field& q1, const Field& q2) {
  Field w(q1.grid);
  double dist = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    w.values[i] = q1.values[i] - q2.values[i];
    dist = std::max(dist, std::abs(w.values[i]));
  }
  if (dist <= 1e-14) {
    throw degenerate_difference_error(
        "difference_source_coefficient: states are identical to 1e-14");
  }
  for (double& v : w.values) v /= dist;
  Field phi1 = coulomb_potential(squared(q1));
  Field sum_w(q1.grid);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    sum_w.values[i] = (q1.values[i] + q2.values[i]) * w.values[i];
  }
  Field conv = coulomb_potential(sum_w);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    acc += phi1.values[i] * sum_w.values[i] +
           conv.values[i] * q2.values[i] * q2.values[i];
  }
  return -0.5 * acc * q1.grid->cell_volume();
}

}  // namespace hartree
