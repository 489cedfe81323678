#pragma once

#include "ksns/radial_grid.hpp"

namespace ksns {

enum class OperatorPart { L0, Lprime, L };

/// Dense realization of the linearized operator L = L0 + L' restricted to one
/// spherical-harmonic sector:
///   L0 f = -lap f + (1/2)(2f + r f'),
///   L' f = -2Q f - (grad invlap Q) . grad f - (grad Q) . grad invlap f,
/// with the inverse Laplacian embedded as a dense sector Poisson solve.
///
/// The outermost row of l0 (and hence of l) carries the far-field closure
///   r f' + closure_p f = 0 at r_max
/// matched to the tail decay r^{-closure_p} of the slowest studied mode in the
/// sector; it is flagged by boundary_row and excluded from interior accuracy
/// statements. lprime has a zero closure row so l = l0 + lprime holds exactly.
struct SectorOperator {
    int ell = 0;
    int sobolev_k = 2;
    const RadialGrid* grid = nullptr;
    MatrixXld l0, lprime, l;
    Eigen::MatrixXd gram;       // H^k Gram matrix of the sector
    Eigen::MatrixXd poisson;    // embedded inverse-Laplacian solve
    int boundary_row = 0;
    double closure_p = 0.0;
};

SectorOperator assemble_sector(int ell, const RadialGrid& grid, int sobolev_k);

/// Matrix-vector product in extended precision (nodal spectral rows cancel
/// catastrophically in double for polynomially growing fields).
Eigen::VectorXd apply(const SectorOperator& op, OperatorPart part,
                      const Eigen::VectorXd& f);

/// H^k Gram matrix: (f,g)_L2 + (D^k f, D^k g)_L2 with the homogeneous part
/// realized through the Fourier-multiplier convention |xi|^{2k} (powers of the
/// sector Laplacian, plus one gradient factor for odd k).
Eigen::MatrixXd gram_hk(const RadialGrid& grid, int ell, int k);

/// Weighted Gram of L^2_omega, omega = exp(-r^2/4), for the self-adjointness
/// checks of L0.
Eigen::VectorXd omega_weights(const RadialGrid& grid);

/// Collocation matrix of the omega-conjugated L0, the dilated harmonic
/// oscillator -lap + r^2/16 + 1/4 (plus the sector centrifugal term); its
/// low eigenvalues realize the L^2_omega spectrum of L0.
Eigen::MatrixXd oscillator_matrix(const RadialGrid& grid, int ell);

} // namespace ksns
