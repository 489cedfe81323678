#pragma once

#include <Eigen/Dense>

namespace ksns {

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Mapped Chebyshev collocation grid for radial functions on a ball.
///
/// Nodes follow the algebraic map r = L s/(1-s) with Chebyshev-Gauss-Lobatto
/// points in s on [0, s_max], s_max = r_max/(L+r_max). The node at s=0 (r=0)
/// is dropped so no equation row ever sits on the coordinate singularity;
/// sector regularity is carried by the smoothness of the interpolation basis.
/// The outermost node is exactly r_max and hosts the far-field closure row of
/// any operator built on the grid.
///
/// Differentiation matrices are assembled and applied in extended precision:
/// nodal spectral differentiation of functions with large far-field values
/// (r^2 and friends) cancels catastrophically in double.
class RadialGrid {
public:
    RadialGrid(int n, double map_scale = 6.0, double r_max = 54.0);

    int n() const { return n_; }
    double map_scale() const { return map_scale_; }
    double r_max() const { return r_max_; }

    const Eigen::VectorXd& nodes() const { return r_; }
    /// weights for int_0^rmax f(r) r^2 dr  (one spherical-harmonic sector)
    const Eigen::VectorXd& quad_weights() const { return w_; }

    const MatrixXld& d1() const { return d1_; }
    const MatrixXld& d2() const { return d2_; }

    Eigen::VectorXd deriv(const Eigen::VectorXd& f) const;
    Eigen::VectorXd deriv2(const Eigen::VectorXd& f) const;
    double integrate(const Eigen::VectorXd& f) const;

    /// Barycentric interpolation weights at radius rq (zero row for rq > r_max).
    Eigen::VectorXd interp_row(double rq) const;
    double interp(const Eigen::VectorXd& f, double rq) const;

    /// Sector Laplacian d2 + (2/r) d1 - l(l+1)/r^2 as a dense matrix.
    MatrixXld sector_laplacian(int ell) const;

    /// Values-to-Chebyshev-coefficients map and its inverse (modal filter support).
    const Eigen::MatrixXd& to_modal() const { return to_modal_; }
    const Eigen::MatrixXd& from_modal() const { return from_modal_; }

private:
    int n_;
    double map_scale_, r_max_, s_max_;
    Eigen::VectorXd r_, w_;
    VectorXld s_, bary_;      // nodes in s and barycentric weights
    MatrixXld d1_, d2_;       // d/dr, d^2/dr^2
    Eigen::MatrixXd to_modal_, from_modal_;
};

/// Sampled radial function on one spherical-harmonic sector.
struct ScalarField {
    const RadialGrid* grid = nullptr;
    int ell = 0;
    Eigen::VectorXd values;
};

/// Solve the sector Poisson problem  u'' + (2/r)u' - l(l+1) u / r^2 = f
/// with regularity at the origin and a far-field row matching decay plus a
/// power-law source tail f ~ f(r_max) (r_max/r)^tail_p beyond the ball:
///   r u' + (l+1) u = -r^2 f / (tail_p + l - 2)  at r = r_max.
/// For fields that decay fast at r_max the data term vanishes and the row
/// reduces to the pure decay condition u ~ r^{-(l+1)} (l=0: far constant 0).
/// Returns the dense solve matrix; apply to nodal f values.
Eigen::MatrixXd poisson_sector_matrix(const RadialGrid& grid, int ell, double tail_p);

/// One-shot solve with decay warning per the module contract.
/// Throws std::runtime_error when the system is numerically singular.
ScalarField poisson_sector(const ScalarField& f, int ell);

/// Default tail exponent used when embedding the inverse Laplacian in the
/// linearized operator (matched to the slowest-decaying studied mode).
double default_tail_exponent(int ell);

} // namespace ksns
