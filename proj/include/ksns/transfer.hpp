#pragma once

#include "ksns/fourier_grid.hpp"
#include "ksns/radial_grid.hpp"

namespace ksns {

/// Real spherical harmonic Y_lm, orthonormal on the sphere
/// (int |Y|^2 dOmega = 1); m > 0 cosine branch, m < 0 sine branch.
double real_sph_harm(int ell, int m, const Eigen::Vector3d& dir);

/// Sample f(r) Y_lm on the 3D box (f continued by zero beyond its grid).
BoxField transfer_radial_to_box(const ScalarField& f, int m, const FourierGrid3& g3);

/// Project a box field back onto the (l,m) shell at radius r by spherical
/// quadrature of the trigonometric interpolant (test-grade).
double project_shell(const FourierGrid3& g3, const SpecField& fh, int ell, int m,
                     double r, int n_theta = 24, int n_phi = 48);

} // namespace ksns
