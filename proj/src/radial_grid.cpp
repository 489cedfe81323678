#include "ksns/radial_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ksns {

RadialGrid::RadialGrid(int n, double map_scale, double r_max)
    : n_(n), map_scale_(map_scale), r_max_(r_max) {
    if (n < 4) throw std::invalid_argument("RadialGrid: need n >= 4");
    if (map_scale <= 0 || r_max <= map_scale)
        throw std::invalid_argument("RadialGrid: need 0 < map_scale < r_max");
    const long double L = map_scale;
    s_max_ = r_max / (map_scale + r_max);
    const long double smax = s_max_;

    // CGL nodes on [0, smax] minus the s=0 endpoint; closed-form barycentric
    // weights of the subset: w_j = (-1)^j d_j (x_j - 1), x_j = cos(pi j / n).
    s_.resize(n);
    bary_.resize(n);
    VectorXld x(n);
    for (int j = 1; j <= n; ++j) {
        const long double xj = std::cos(static_cast<long double>(M_PI) * j / n);
        x(j - 1) = xj;
        s_(j - 1) = smax * (1.0L - xj) / 2.0L;
        long double dj = (j == n) ? 0.5L : 1.0L;
        bary_(j - 1) = ((j % 2 == 0) ? 1.0L : -1.0L) * dj * (xj - 1.0L);
    }

    r_.resize(n);
    for (int i = 0; i < n; ++i)
        r_(i) = static_cast<double>(L * s_(i) / (1.0L - s_(i)));

    // differentiation in s from barycentric weights, then chain rule to r
    MatrixXld Ds(n, n), D2s(n, n);
    for (int i = 0; i < n; ++i) {
        long double diag = 0.0L;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Ds(i, j) = (bary_(j) / bary_(i)) / (s_(i) - s_(j));
            diag -= Ds(i, j);
        }
        Ds(i, i) = diag;
    }
    for (int i = 0; i < n; ++i) {
        long double diag = 0.0L;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            D2s(i, j) = 2.0L * Ds(i, j) * (Ds(i, i) - 1.0L / (s_(i) - s_(j)));
            diag -= D2s(i, j);
        }
        D2s(i, i) = diag;
    }
    d1_.resize(n, n);
    d2_.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const long double u = 1.0L - s_(i);
        const long double dsdr = u * u / L;
        const long double d2sdr2 = -2.0L * u * u * u / (L * L);
        d1_.row(i) = dsdr * Ds.row(i);
        d2_.row(i) = dsdr * dsdr * D2s.row(i) + d2sdr2 * Ds.row(i);
    }

    // quadrature: Chebyshev-Vandermonde moment solve on [0, smax], then the
    // map Jacobian r^2 dr/ds folded in
    MatrixXld V(n, n);
    VectorXld mom(n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i)
            V(k, i) = std::cos(k * std::acos(2.0L * s_(i) / smax - 1.0L));
        mom(k) = (k % 2 == 0) ? smax / (1.0L - static_cast<long double>(k) * k) : 0.0L;
    }
    mom(0) = smax;
    VectorXld ws = V.fullPivLu().solve(mom);
    w_.resize(n);
    for (int i = 0; i < n; ++i) {
        const long double u = 1.0L - s_(i);
        w_(i) = static_cast<double>(ws(i) * (static_cast<long double>(r_(i)) *
                                             static_cast<long double>(r_(i))) * L / (u * u));
    }

    // modal maps: T_k(2s/smax - 1) evaluated at nodes; V above is its transpose
    Eigen::MatrixXd Vd(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            Vd(i, k) = static_cast<double>(V(k, i));
    from_modal_ = Vd;
    to_modal_ = Vd.fullPivLu().inverse();
}

Eigen::VectorXd RadialGrid::deriv(const Eigen::VectorXd& f) const {
    VectorXld g = d1_ * f.cast<long double>();
    return g.cast<double>();
}

Eigen::VectorXd RadialGrid::deriv2(const Eigen::VectorXd& f) const {
    VectorXld g = d2_ * f.cast<long double>();
    return g.cast<double>();
}

double RadialGrid::integrate(const Eigen::VectorXd& f) const {
    return w_.dot(f);
}

Eigen::VectorXd RadialGrid::interp_row(double rq) const {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n_);
    if (rq > r_max_ * (1.0 + 1e-12) || rq < 0.0) return row;
    const long double sq = rq / (map_scale_ + rq);
    long double den = 0.0L;
    VectorXld t(n_);
    for (int j = 0; j < n_; ++j) {
        const long double d = sq - s_(j);
        if (std::fabs(static_cast<double>(d)) < 1e-15) {
            row(j) = 1.0;
            return row;
        }
        t(j) = bary_(j) / d;
        den += t(j);
    }
    for (int j = 0; j < n_; ++j) row(j) = static_cast<double>(t(j) / den);
    return row;
}

double RadialGrid::interp(const Eigen::VectorXd& f, double rq) const {
    return interp_row(rq).dot(f);
}

MatrixXld RadialGrid::sector_laplacian(int ell) const {
    MatrixXld lap = d2_;
    for (int i = 0; i < n_; ++i) {
        const long double ri = r_(i);
        lap.row(i) += (2.0L / ri) * d1_.row(i);
        lap(i, i) -= static_cast<long double>(ell) * (ell + 1) / (ri * ri);
    }
    return lap;
}

double default_tail_exponent(int ell) {
    // slowest-decaying mode retained per sector: Lambda Q ~ r^-4 (ell 0),
    // dQ ~ r^-3 (ell 1); generic sectors get the translation-family guess
    if (ell == 0) return 4.0;
    return ell + 2.0;
}

Eigen::MatrixXd poisson_sector_matrix(const RadialGrid& grid, int ell, double tail_p) {
    const int n = grid.n();
    MatrixXld A = grid.sector_laplacian(ell);
    const double rm = grid.r_max();
    // far-field row with tail-sourced Robin data folded into the rhs operator
    A.row(n - 1) = static_cast<long double>(rm) * grid.d1().row(n - 1);
    A(n - 1, n - 1) += static_cast<long double>(ell + 1);
    MatrixXld E = MatrixXld::Identity(n, n);
    E(n - 1, n - 1) = -static_cast<long double>(rm) * rm / (tail_p + ell - 2.0);
    Eigen::PartialPivLU<MatrixXld> lu(A);
    MatrixXld P = lu.solve(E);
    if (!P.allFinite()) throw std::runtime_error("poisson_sector: singular system");
    return P.cast<double>();
}

ScalarField poisson_sector(const ScalarField& f, int ell) {
    const RadialGrid& g = *f.grid;
    Eigen::MatrixXd P = poisson_sector_matrix(g, ell, default_tail_exponent(ell));
    ScalarField u;
    u.grid = f.grid;
    u.ell = ell;
    u.values = P * f.values;
    if (!u.values.allFinite()) throw std::runtime_error("poisson_sector: numerical failure");
    return u;
}

} // namespace ksns
