#include "ksns/semigroup.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ksns {

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.resize(m);
    w.resize(m);
    for (int i = 0; i < m; ++i) {
        double xi = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double p1 = 0, dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            p1 = xi;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (xi * p1 - p0) / (xi * xi - 1.0);
            double dx = p1 / dp;
            xi -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        x[i] = xi;
        w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

double scaled_sph_bessel_i(int ell, double z) {
    if (z < 0) throw std::invalid_argument("scaled_sph_bessel_i: z >= 0");
    if (z < 1e-8) {
        // i_l(z) ~ z^l/(2l+1)!!, times e^{-z}
        double df = 1.0;
        for (int k = 1; k <= 2 * ell + 1; k += 2) df *= k;
        return std::pow(z, ell) / df * std::exp(-z);
    }
    const double i0 = -std::expm1(-2.0 * z) / (2.0 * z);
    if (ell == 0) return i0;
    const double i1 = ((1.0 + std::exp(-2.0 * z)) / 2.0 - i0) / z;
    if (ell == 1) return i1;
    if (z > 2.0 * ell) {
        // upward recurrence is fine when z dominates the order
        double a = i0, b = i1;
        for (int k = 1; k < ell; ++k) {
            double c = a - (2 * k + 1) / z * b;
            a = b;
            b = c;
        }
        return b;
    }
    // downward (Miller) recurrence normalized against i0
    int start = ell + 20 + static_cast<int>(z);
    double up1 = 0.0, u = 1e-30, out = 0.0;
    for (int k = start; k >= 0; --k) {
        double um1 = up1 + (2 * k + 3) / z * u;
        if (k == ell) out = u;
        up1 = u;
        u = um1;
        if (std::fabs(u) > 1e250)
        {
            up1 /= 1e250; u /= 1e250; out /= 1e250;
        }
    }
    return out * (i0 / u);
}

Eigen::MatrixXd semigroup_matrix_radial(const RadialGrid& grid, int ell,
                                        double tau, double tail_p) {
    if (tau < 0) throw std::invalid_argument("semigroup: tau >= 0 required");
    const int n = grid.n();
    if (tau == 0.0) return Eigen::MatrixXd::Identity(n, n);
    const double lam = -std::expm1(-tau);
    const double amp = std::exp(-tau);
    const double rmax = grid.r_max();

    static std::vector<double> gx, gw;
    if (gx.empty()) gauss_legendre(48, gx, gw);

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd last_row = grid.interp_row(rmax);
    const double wwidth = 12.0 * std::sqrt(lam);
    const double c0 = 1.0 / std::sqrt(4.0 * M_PI * lam);

    for (int i = 0; i < n; ++i) {
        const double rho = std::exp(-tau / 2.0) * grid.nodes()(i);
        const double a = std::max(0.0, rho - wwidth);
        const double b_in = std::min(rmax, rho + wwidth);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
        if (b_in > a) {
            for (size_t q = 0; q < gx.size(); ++q) {
                const double rq = 0.5 * (b_in - a) * gx[q] + 0.5 * (a + b_in);
                const double wq = 0.5 * (b_in - a) * gw[q];
                const double z = rho * rq / (2.0 * lam);
                // kernel c0 (rq^2/lam) exp(-(rho-rq)^2/(4 lam)) [i_l(z) e^{-z}]
                const double k = c0 * (rq * rq / lam) *
                                 std::exp(-(rho - rq) * (rho - rq) / (4.0 * lam)) *
                                 scaled_sph_bessel_i(ell, z);
                row += wq * k * grid.interp_row(rq);
            }
        }
        const double b_out = rho + wwidth;
        if (tail_p > 0 && b_out > rmax) {
            double coef = 0.0;
            for (size_t q = 0; q < gx.size(); ++q) {
                const double rq = 0.5 * (b_out - rmax) * gx[q] + 0.5 * (rmax + b_out);
                const double wq = 0.5 * (b_out - rmax) * gw[q];
                const double z = rho * rq / (2.0 * lam);
                const double k = c0 * (rq * rq / lam) *
                                 std::exp(-(rho - rq) * (rho - rq) / (4.0 * lam)) *
                                 scaled_sph_bessel_i(ell, z);
                coef += wq * k * std::pow(rmax / rq, tail_p);
            }
            row += coef * last_row;
        }
        P.row(i) = amp * row;
    }
    return P;
}

ScalarField semigroup_l0(const ScalarField& f, double tau) {
    ScalarField out;
    out.grid = f.grid;
    out.ell = f.ell;
    Eigen::MatrixXd P = semigroup_matrix_radial(*f.grid, f.ell, tau, 0.0);
    out.values = P * f.values;
    return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
resolvent_l0(const ScalarField& f, std::complex<double> lambda) {
    if (lambda.real() >= 0.25)
        throw std::domain_error("resolvent_l0: need Re lambda < 1/4");
    const RadialGrid& g = *f.grid;
    const int n = g.n();
    // tail of |e^{(lambda-1) tau}| below 1e-10 of the accumulated scale
    const double rate = 1.0 - lambda.real();
    const double t_cut = std::log(1e10) / rate + 1.0;

    static std::vector<double> gx, gw;
    if (gx.empty()) gauss_legendre(16, gx, gw);

    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
    double a = 0.0, width = 0.25;
    while (a < t_cut) {
        const double b = std::min(t_cut, a + width);
        for (size_t q = 0; q < gx.size(); ++q) {
            const double tq = 0.5 * (b - a) * gx[q] + 0.5 * (a + b);
            const double wq = 0.5 * (b - a) * gw[q];
            Eigen::MatrixXd P = semigroup_matrix_radial(g, f.ell, tq, 0.0);
            const std::complex<double> ph = std::exp(lambda * tq);
            acc += wq * ph * (P * f.values);
        }
        a = b;
        width = std::min(2.0 * width, 4.0);
    }
    return {acc.real(), acc.imag()};
}

} // namespace ksns
