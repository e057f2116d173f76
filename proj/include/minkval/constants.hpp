#pragma once

namespace minkval {

/// Volume of the unit ball in R^p, extended to real p through the Gamma
/// function. kappa(-1) = 1/pi.
double kappa(double p);

/// Surface area of the unit sphere S^{n-1}.
double omega(int n);

/// Binomial coefficient as a double; zero when k < 0 or k > m.
double binomial(int m, int k);

/// Dimension of the space of degree-k spherical harmonics on S^{n-1}.
double harmonic_dimension(int n, int k);

/// Flag coefficient [a;b] = C(a,b) kappa_a / (kappa_b kappa_{a-b}).
double flag_coefficient(int a, int b);

/// Normalizing constant of the mean section operator M_j in R^n.
/// Requires 2 <= j <= n.
double mean_section_constant(int n, int j);

/// Crofton factor c_{n,k}, 1 <= k <= n-2.
double crofton_factor(int n, int k);

/// q_{n,i,j} = 2^i/(i! kappa_i) prod_{k=j}^{i+j-1} c_{n,k}, for
/// 1 <= j <= n-2 and 1 <= i <= n-j-1.
double crofton_minkowski_constant(int n, int i, int j);

}  // namespace minkval
