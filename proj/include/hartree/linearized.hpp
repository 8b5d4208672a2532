#pragma once

#include "hartree/energy.hpp"

namespace hartree {

class degenerate_difference_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Holds a converged base state and the data needed to apply the linearized
/// operator around it. The Hartree potential of the base is cached.
struct LinearizedContext {
  enum class Family { limit, relativistic };
  Family family = Family::limit;
  Field base;          // Q_infinity or Q_c
  Field base_potential;  // Phi[base^2]
  double lambda = 0.0;   // limit family: multiplier of eq. -Lap/2m Q + lam Q = Phi Q
  double mu_c = 0.0;     // relativistic family: T Q - Phi Q = mu_c Q (negative)
  double m = 1.0;
  double c = 1.0;

  static LinearizedContext limit(Field q, double lambda, double m);
  static LinearizedContext relativistic(Field q, double mu_c, double m, double c);
};

/// L+ xi = (-Lap/2m + lambda - Phi[Q^2]) xi - 2 (Phi[Q xi]) Q   (limit family).
Field apply_lplus(const LinearizedContext& ctx, const Field& xi);

/// Relativistic linearization with coupling k1 and source coefficient k2:
/// returns H_c xi - Phi[Q^2] xi - 2 k1 Phi[Q xi] Q - k2 Q.
Field apply_relativistic_linearized(const LinearizedContext& ctx, const Field& xi,
                                    double k1, double k2);

/// || L+ (x . grad Q + 2 Q) + 2 lambda Q ||_2 / ||Q||_2.
double dilation_identity_residual(const LinearizedContext& ctx);

/// x . grad u, with a spectral gradient and pointwise coordinate weights.
Field dilation_mode(const Field& u);

struct EigenPair {
  double value = 0.0;
  Field vector;
};

struct KernelProbeReport {
  std::vector<EigenPair> pairs;       // ordered by |value|
  int kernel_count = 0;               // # eigenvalues with |value| <= tolerance
  double span_overlap = 0.0;          // of near-zero span vs span{d_i Q}
  double kernel_tolerance = 0.0;
  double radial_scale = 0.0;          // smallest |eigenvalue| in the radial sector
  bool inconclusive = false;
};

/// Lowest-|eigenvalue| pairs of L+ by block shift-invert iteration with a
/// preconditioned MINRES inner solve. With radial_sector = true the iteration
/// is restricted to functions constant on equal-radius lattice classes.
KernelProbeReport kernel_probe(const LinearizedContext& ctx, int n_eigs,
                               bool radial_sector = false,
                               std::uint64_t seed = 7);

struct DifferenceModeReport {
  double b0 = 0.0;                      // dilation-mode coefficient
  std::array<double, 3> translation{};  // d_i Q coefficients
  double remainder_norm = 0.0;          // relative L2 remainder
  double grad_orthogonality = 0.0;      // int grad w . grad Q
};

/// Projects the sup-normalized difference (Q_a - Q_b)/||Q_a - Q_b||_inf onto
/// span{dilation mode, translations} of the context's base state.
DifferenceModeReport difference_mode_report(const Field& q_a, const Field& q_b,
                                            const LinearizedContext& ctx);

/// Source coefficient built from two nearby states:
/// -(1/2) int { Phi[Q1^2](Q1+Q2) w + Phi[(Q1+Q2) w] Q2^2 },
/// with w the sup-normalized difference.
double difference_source_coefficient(const Field& q1, const Field& q2);

}  // namespace hartree
