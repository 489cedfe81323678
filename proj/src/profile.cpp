#include "ksns/profile.hpp"
#include "ksns/radial_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ksns {
namespace profile {

double q(double r) {
    const double s = r * r;
    const double d = 2.0 + s;
    return 4.0 * (6.0 + s) / (d * d);
}

double dq_dr(double r) {
    // d/dr of 4(6+r^2)/(2+r^2)^2 = -8r(r^2+10)/(2+r^2)^3
    const double s = r * r;
    const double d = 2.0 + s;
    return -8.0 * r * (s + 10.0) / (d * d * d);
}

double lambda_q(double r) { return 2.0 * q(r) + r * dq_dr(r); }

double inv_lap_q(double r) { return 2.0 * std::log(2.0 + r * r); }

double grad_inv_lap_q_radial(double r) { return 4.0 * r / (2.0 + r * r); }

double eval_scalar(Field kind, const Eigen::Vector3d& y) {
    const double r2 = y.squaredNorm();
    const double r = std::sqrt(r2);
    switch (kind) {
        case Field::Q: return q(r);
        case Field::LambdaQ: return lambda_q(r);
        case Field::InvLapQ: return inv_lap_q(r);
        case Field::LerayBuoyancy3: {
            const double d = 2.0 + r2;
            return 8.0 * (2.0 + y.z() * y.z()) / (d * d);
        }
        default:
            throw std::invalid_argument("eval_scalar: vector-valued kind");
    }
}

Eigen::Vector3d eval_vector(Field kind, const Eigen::Vector3d& y) {
    const double r = y.norm();
    switch (kind) {
        case Field::GradQ:
            if (r == 0.0) return Eigen::Vector3d::Zero();
            return (dq_dr(r) / r) * y;
        case Field::GradInvLapQ:
            return 4.0 / (2.0 + r * r) * y;
        default:
            throw std::invalid_argument("eval_vector: scalar-valued kind");
    }
}

double residual(const RadialGrid& grid) {
    const int n = grid.n();
    if (n < 8) throw std::invalid_argument("profile residual: grid too coarse (n < 8)");
    const Eigen::VectorXd& r = grid.nodes();
    Eigen::VectorXd Qv(n), Fp(n), lam(n);
    for (int i = 0; i < n; ++i) {
        Qv(i) = q(r(i));
        Fp(i) = grad_inv_lap_q_radial(r(i));
        lam(i) = lambda_q(r(i));
    }
    // div(Q grad F) = Q' F' + Q lap F = Q' F' + Q^2  (lap F = Q exactly)
    Eigen::VectorXd dQ = grid.deriv(Qv);
    Eigen::VectorXd lapQ = grid.deriv2(Qv) + 2.0 * grid.deriv(Qv).cwiseQuotient(r);
    Eigen::VectorXd res = lapQ + dQ.cwiseProduct(Fp) + Qv.cwiseProduct(Qv) - 0.5 * lam;
    return res.cwiseAbs().maxCoeff();
}

double truncated_mass(double R) {
    if (R <= 0.0) throw std::invalid_argument("truncated_mass: need R > 0");
    // composite 32-point Gauss-Legendre on panels graded toward the origin
    static const int m = 32;
    static double gx[m], gw[m];
    static bool init = false;
    if (!init) {
        // Newton on Legendre polynomials
        for (int i = 0; i < m; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = m * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = m * (x * p1 - p0) / (x * x - 1.0);
            gx[i] = x;
            gw[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        init = true;
    }
    const int panels = std::max(4, static_cast<int>(std::ceil(R / 10.0)));
    double total = 0.0;
    double a = 0.0;
    for (int p = 0; p < panels; ++p) {
        double b = R * (p + 1.0) / panels;
        for (int i = 0; i < m; ++i) {
            double rr = 0.5 * (b - a) * gx[i] + 0.5 * (a + b);
            total += 0.5 * (b - a) * gw[i] * q(rr) * rr * rr;
        }
        a = b;
    }
    return 4.0 * M_PI * total;
}

} // namespace profile
} // namespace ksns
