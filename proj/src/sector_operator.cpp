#include "ksns/sector_operator.hpp"
#include "ksns/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace ksns {

Eigen::MatrixXd gram_hk(const RadialGrid& grid, int ell, int k) {
    const int n = grid.n();
    const Eigen::VectorXd& w = grid.quad_weights();
    const Eigen::VectorXd& r = grid.nodes();
    MatrixXld W = MatrixXld::Zero(n, n);
    for (int i = 0; i < n; ++i) W(i, i) = w(i);
    MatrixXld G = W;
    if (k > 0) {
        MatrixXld lap = grid.sector_laplacian(ell);
        MatrixXld Am = MatrixXld::Identity(n, n);
        for (int m = 0; m < k / 2; ++m) Am = lap * Am;
        if (k % 2 == 0) {
            G += Am.transpose() * W * Am;
        } else {
            MatrixXld G1 = grid.d1().transpose() * W * grid.d1();
            for (int i = 0; i < n; ++i)
                G1(i, i) += static_cast<long double>(ell) * (ell + 1) * w(i) / (r(i) * r(i));
            G += Am.transpose() * G1 * Am;
        }
    }
    // symmetrize away assembly roundoff
    MatrixXld S = 0.5L * (G + G.transpose());
    return S.cast<double>();
}

Eigen::VectorXd omega_weights(const RadialGrid& grid) {
    const int n = grid.n();
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes()(i);
        w(i) = grid.quad_weights()(i) * std::exp(-r * r / 4.0);
    }
    return w;
}

Eigen::MatrixXd oscillator_matrix(const RadialGrid& grid, int ell) {
    const int n = grid.n();
    MatrixXld A = -grid.sector_laplacian(ell);
    for (int i = 0; i < n; ++i) {
        const long double r = grid.nodes()(i);
        A(i, i) += r * r / 16.0L + 0.25L;
    }
    return A.cast<double>();
}

SectorOperator assemble_sector(int ell, const RadialGrid& grid, int sobolev_k) {
    if (ell < 0) throw std::invalid_argument("assemble_sector: ell >= 0 required");
    const int n = grid.n();
    const Eigen::VectorXd& r = grid.nodes();

    SectorOperator op;
    op.ell = ell;
    op.sobolev_k = sobolev_k;
    op.grid = &grid;
    op.boundary_row = n - 1;
    op.closure_p = default_tail_exponent(ell);

    MatrixXld lap = grid.sector_laplacian(ell);
    op.l0 = -lap + grid.d1();
    for (int i = 0; i < n; ++i) {
        op.l0.row(i) = -lap.row(i) + 0.5L * static_cast<long double>(r(i)) * grid.d1().row(i);
        op.l0(i, i) += 1.0L;
    }

    op.poisson = poisson_sector_matrix(grid, ell, op.closure_p);
    MatrixXld P = op.poisson.cast<long double>();
    MatrixXld DP = grid.d1() * P;
    op.lprime.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const double ri = r(i);
        op.lprime.row(i) = -static_cast<long double>(profile::grad_inv_lap_q_radial(ri)) * grid.d1().row(i)
                           - static_cast<long double>(profile::dq_dr(ri)) * DP.row(i);
        op.lprime(i, i) += -2.0L * static_cast<long double>(profile::q(ri));
    }

    // far-field closure row: r f' + p f = 0 at r_max, on l0; zero on lprime
    op.l0.row(n - 1) = static_cast<long double>(r(n - 1)) * grid.d1().row(n - 1);
    op.l0(n - 1, n - 1) += static_cast<long double>(op.closure_p);
    op.lprime.row(n - 1).setZero();

    op.l = op.l0 + op.lprime;
    op.gram = gram_hk(grid, ell, sobolev_k);
    return op;
}

Eigen::VectorXd apply(const SectorOperator& op, OperatorPart part, const Eigen::VectorXd& f) {
    if (f.size() != op.grid->n())
        throw std::invalid_argument("apply: field/grid size mismatch");
    const MatrixXld* M = &op.l;
    if (part == OperatorPart::L0) M = &op.l0;
    if (part == OperatorPart::Lprime) M = &op.lprime;
    VectorXld g = (*M) * f.cast<long double>();
    return g.cast<double>();
}

} // namespace ksns
