#pragma once

#include <utility>

#include "fracsob/numerics.hpp"

namespace fracsob {

/// pi^{s/2} Gamma((n-s)/2) / Gamma((n+s)/2) * (Gamma(n) / Gamma(n/2))^{s/n}, 0 < s < n.
double sharp_constant_K(int n, double s);

/// omega_n / (n - s), the leading behaviour of K(n, s) as s -> n.
double K_asymptote(int n, double s);

/// Sobolev conjugate q = pn / (n - sp), for 1 < p < n/s.
double sobolev_q(double p, int n, double s);

/// Inverse map p = qn / (n + qs), for q > n / (n - s).
double inverse_p(double q, int n, double s);

/// Conformal exponent p = 2n / (n + s).
inline double conformal_p(int n, double s) { return 2.0 * n / (n + s); }

struct ExponentPair {
  double p;
  double q;
  int n;
  double s;
};

ExponentPair exponent_pair(double p, int n, double s);

/// L_alpha(p) = \int_0^1 |1 - r^{(alpha-1)/p}|^p / (1 - r)^{1+alpha} dr, p > alpha > 1.
QuadResult L_alpha(double alpha, double p, double tol = 1e-10);

/// ((alpha-1)/p)^p / (p - alpha), the p -> alpha behaviour of L_alpha.
double case_A_asymptote(double alpha, double p);

/// ((alpha-1)/p)^p Gamma(p+1), the p -> inf behaviour of L_alpha.
double case_B_asymptote(double alpha, double p);

struct CaseCBounds {
  double delta;
  double upper;
  /// ((alpha-1)/p)^p [Gamma(p+1) + 1/(p-alpha)]; the lower bound without its C(alpha)^p factor.
  double lower_shape;
};

CaseCBounds case_C_bounds(double alpha, double p, double delta = 0.5);

/// Empirical c(alpha) = min over the given p of (L_alpha(p) / lower_shape(p))^{1/p}.
/// Fitted, not a proven constant.
double empirical_c_alpha(double alpha, const double* p_begin, const double* p_end);

/// 2 pi^{(n-1)/2} Gamma((1+alpha)/2) / Gamma((n+alpha)/2) * L_alpha(p).
double D_alpha_n(double alpha, int n, double p, double tol = 1e-10);

/// D_alpha_n(p)^{-1/p}.
double g_alpha_n(double alpha, int n, double p, double tol = 1e-10);

/// Bounds (sp)^{-1} omega_n^{1+sp/n} n^{-1-sp/n} <= Z <= (sp)^{-1} omega_n^{1+sp/n} n^{-sp/n}.
std::pair<double, double> Z_bounds(int n, double s, double p);

/// \int_{|y|>=1} |y|^{-(n+sp)} dy * |B_1|^{sp/n} by radial quadrature; the
/// configuration x = 0, E = unit ball.
QuadResult Z_attainment(int n, double s, double p);

}  // namespace fracsob
