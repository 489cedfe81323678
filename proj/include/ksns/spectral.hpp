#pragma once

#include "ksns/sector_operator.hpp"

#include <complex>
#include <map>
#include <vector>

namespace ksns {

/// Smooth cutoff chi(t): 1 for t <= 1, 0 for t >= 2, exp(-1/t) transition.
double bump_chi(double t);

/// Sector eigendecomposition of -L with the far-field closure row eliminated
/// (f(r_max) expressed through the interior values). Eigenvalues are sorted by
/// descending real part; refinement_stable marks values reproduced within
/// 1e-3 at 1.5x resolution.
struct SectorSpectrum {
    int ell = 0;
    Eigen::VectorXcd eigenvalues;
    std::vector<bool> refinement_stable;
    Eigen::MatrixXcd right;            // reduced right eigenvectors (columns)
    Eigen::MatrixXcd left;             // reduced left eigenvectors of A
    Eigen::VectorXd elim;              // closure elimination coefficients
    Eigen::MatrixXd a_reduced;         // the reduced matrix of -L
};

SectorSpectrum eig_sector(const SectorOperator& op);

/// One unstable (or retained) mode. Fields live on the full grid; the dual is
/// represented by the pairing vector w = Gram * psi with zero closure entry so
/// (f, psi)_{H^k} = f^T w for ANY full-grid field f, and (phi_i, psi_j) = d_ij.
struct Mode {
    int ell = 0;
    std::complex<double> lambda;
    Eigen::VectorXd phi;  // right mode, real representation, H^k-normalized
    Eigen::VectorXd w;    // dual pairing vector (= G psi)
};

struct SpectralDecomposition {
    int sobolev_k = 2;
    double delta_g = 0.0;                 // measured spectral gap parameter
    double max_stable_re = 0.0;           // sup Re over refinement-stable stable set
    std::map<int, SectorSpectrum> sectors;
    std::vector<Mode> unstable;           // across sectors, biorthonormalized
    const RadialGrid* grid = nullptr;
    std::map<int, SectorOperator> ops;
};

/// Decompose sectors 0..ell_max and extract the refinement-stable unstable set
/// {Re lambda > -delta_g/2}; delta_g is measured per the gap prescription with
/// the cap delta_g < 1/16.
SpectralDecomposition decompose(const RadialGrid& grid, int ell_max, int sobolev_k);

/// Gap from a set of sector spectra: largest delta_g in (0, 1/16) such that no
/// refinement-stable eigenvalue outside the unstable set has
/// Re lambda > -delta_g/2. Returns 0 when eigenvalues accumulate at 0+.
double measure_gap(const SpectralDecomposition& d);

/// Riesz projection data: P_u f = sum_j (f, psi_j) phi_j restricted to the
/// modes of f's sector. Returns (unstable part, stable part).
std::pair<Eigen::VectorXd, Eigen::VectorXd>
riesz_project(const SpectralDecomposition& d, int ell, const Eigen::VectorXd& f);

struct ModifiedUnstableSpace {
    double R = 0.0;
    Eigen::MatrixXd m_r;                   // M_R = {(chi_R phi_i, psi_j)}
    double m_r_cond = 0.0;
    std::vector<Eigen::VectorXd> phi_tilde;  // compactly supported modes
    Eigen::MatrixXd jordan;                // J of -P~u L P_u in the adapted basis
    Eigen::MatrixXd basis_change;          // M: phi~^J_i = sum_j M(j,i) phi~_j
    Eigen::MatrixXd basis_change_inv;
    const SpectralDecomposition* decomp = nullptr;
};

/// Cutoff-localized unstable modes phi~ = M_R^{-1} (chi_R phi) with the
/// projection algebra P~u P_u = P~u, P_u P~u = P_u preserved.
/// Throws std::invalid_argument when M_R is numerically singular.
ModifiedUnstableSpace build_modified(const SpectralDecomposition& d, double R);

/// Coefficients (f, psi_j) for a sector field against all retained modes
/// (zero for modes of other sectors).
Eigen::VectorXd dual_coefficients(const SpectralDecomposition& d, int ell,
                                  const Eigen::VectorXd& f);

Eigen::VectorXd tilde_u_project(const ModifiedUnstableSpace& s, int ell,
                                const Eigen::VectorXd& f);

/// B~ inner product of two modified-span elements given by their dual
/// coefficient vectors: Euclidean pairing of Jordan-basis coordinates.
double b_inner_coeff(const ModifiedUnstableSpace& s, const Eigen::VectorXd& cf,
                     const Eigen::VectorXd& cg);

/// Full-field version; throws std::invalid_argument when f or g lies outside
/// span{phi~_j} by more than 1e-8 relative (sector ell fields).
double b_inner(const ModifiedUnstableSpace& s, int ell, const Eigen::VectorXd& f,
               const Eigen::VectorXd& g);

} // namespace ksns
