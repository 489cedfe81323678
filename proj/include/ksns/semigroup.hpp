#pragma once

#include "ksns/radial_grid.hpp"

#include <complex>

namespace ksns {

/// exp(-z) i_l(z): modified spherical Bessel of the first kind, scaled to be
/// overflow-free; enters the sector decomposition of the Gaussian kernel.
double scaled_sph_bessel_i(int ell, double z);

/// Dense matrix of the exact L0 semigroup on a radial sector,
///   (e^{-tau L0} f)(r) = e^{-tau} (G_{1-e^{-tau}} * f)(e^{-tau/2} r),
/// realized by Gauss-Legendre quadrature of the sector heat kernel on a window
/// around each rescaled target plus barycentric sampling of f. Beyond r_max
/// the field is continued as f(r_max) (r_max/r)^tail_p (rank-one correction);
/// tail_p <= 0 continues by zero.
Eigen::MatrixXd semigroup_matrix_radial(const RadialGrid& grid, int ell,
                                        double tau, double tail_p);

/// Apply the semigroup to one sector field. tau >= 0 required.
ScalarField semigroup_l0(const ScalarField& f, double tau);

/// Resolvent (L0 - lambda)^{-1} f via Laplace quadrature of the semigroup over
/// tau in [0, T_cut], T_cut adapted so the dropped tail is below 1e-10
/// relative. Requires Re lambda < 1/4 (the paper's half-plane).
/// Returns (real part, imaginary part).
std::pair<Eigen::VectorXd, Eigen::VectorXd>
resolvent_l0(const ScalarField& f, std::complex<double> lambda);

/// Nodes/weights of m-point Gauss-Legendre on [-1,1] (shared helper).
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);

} // namespace ksns
