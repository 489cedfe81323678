#include "ksns/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksns {

double bump_chi(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double s1 = std::exp(-1.0 / (t - 1.0));
    const double s2 = std::exp(-1.0 / (2.0 - t));
    return s2 / (s1 + s2);
}

namespace {

// reduced matrix of -L with the closure row eliminated:
// f_last = elim . f_interior from  r f' + p f = 0 at r_max
void reduce_operator(const SectorOperator& op, Eigen::MatrixXd& A, Eigen::VectorXd& elim) {
    const int n = op.grid->n();
    const int m = n - 1;
    Eigen::VectorXd row(n);
    for (int j = 0; j < n; ++j) row(j) = static_cast<double>(op.l0(n - 1, j));
    const double alpha = row(n - 1);
    elim = -row.head(m) / alpha;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = -static_cast<double>(op.l(i, j));
    A = M.topLeftCorner(m, m) + M.topRightCorner(m, 1) * elim.transpose();
}

Eigen::MatrixXd reduce_gram(const SectorOperator& op, const Eigen::VectorXd& elim) {
    const int n = op.grid->n();
    const int m = n - 1;
    const Eigen::MatrixXd& G = op.gram;
    Eigen::MatrixXd Gr = G.topLeftCorner(m, m);
    Gr += G.topRightCorner(m, 1) * elim.transpose();
    Gr += elim * G.bottomLeftCorner(1, m);
    Gr += elim * elim.transpose() * G(n - 1, n - 1);
    return 0.5 * (Gr + Gr.transpose());
}

struct RawEig {
    Eigen::VectorXcd ev;
    Eigen::MatrixXcd right, left;
};

RawEig solve_both(const Eigen::MatrixXd& A) {
    RawEig r;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    Eigen::EigenSolver<Eigen::MatrixXd> esT(A.transpose());
    // sort by descending real part
    const int m = static_cast<int>(A.rows());
    std::vector<int> idx(m), idxT(m);
    for (int i = 0; i < m; ++i) idx[i] = idxT[i] = i;
    auto ev = es.eigenvalues();
    auto evT = esT.eigenvalues();
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
        return ev(a).imag() > ev(b).imag();
    });
    r.ev.resize(m);
    r.right.resize(m, m);
    r.left.resize(m, m);
    for (int i = 0; i < m; ++i) {
        r.ev(i) = ev(idx[i]);
        r.right.col(i) = es.eigenvectors().col(idx[i]);
    }
    // match left eigenvectors to the sorted eigenvalues by nearest eigenvalue
    std::vector<bool> used(m, false);
    for (int i = 0; i < m; ++i) {
        int best = -1;
        double bd = 1e300;
        for (int j = 0; j < m; ++j) {
            if (used[j]) continue;
            double d = std::abs(evT(j) - r.ev(i));
            if (d < bd) { bd = d; best = j; }
        }
        used[best] = true;
        r.left.col(i) = esT.eigenvectors().col(best);
    }
    return r;
}

} // namespace

SectorSpectrum eig_sector(const SectorOperator& op) {
    SectorSpectrum s;
    s.ell = op.ell;
    reduce_operator(op, s.a_reduced, s.elim);
    RawEig re = solve_both(s.a_reduced);
    if (!re.ev.allFinite()) throw std::runtime_error("eig_sector: eigensolver failed");
    s.eigenvalues = re.ev;
    s.right = re.right;
    s.left = re.left;

    // refinement stability: re-solve at 1.5x resolution, same ball
    const int n2 = (3 * op.grid->n()) / 2;
    RadialGrid g2(n2, op.grid->map_scale(), op.grid->r_max());
    SectorOperator op2 = assemble_sector(op.ell, g2, op.sobolev_k);
    Eigen::MatrixXd A2;
    Eigen::VectorXd elim2;
    reduce_operator(op2, A2, elim2);
    Eigen::EigenSolver<Eigen::MatrixXd> es2(A2);
    const auto& ev2 = es2.eigenvalues();
    s.refinement_stable.resize(s.eigenvalues.size());
    for (int i = 0; i < s.eigenvalues.size(); ++i) {
        double d = 1e300;
        for (int j = 0; j < ev2.size(); ++j)
            d = std::min(d, std::abs(ev2(j) - s.eigenvalues(i)));
        s.refinement_stable[i] = d < 1e-3;
    }
    return s;
}

double measure_gap(const SpectralDecomposition& d) {
    // paper cap: delta_g < 1/16; unstable set = {Re > -delta/2} at delta = 1/16
    const double delta = 1.0 / 16.0;
    double max_stable = -1e300;
    for (const auto& [ell, s] : d.sectors) {
        for (int i = 0; i < s.eigenvalues.size(); ++i) {
            if (!s.refinement_stable[i]) continue;
            const double re = s.eigenvalues(i).real();
            if (re > -delta / 2.0 + 1e-12 || std::fabs(re) < 1e-6) continue; // unstable set
            max_stable = std::max(max_stable, re);
        }
    }
    if (max_stable >= 0.0) return 0.0;
    return std::min(delta * (1.0 - 1e-9), -2.0 * max_stable * (1.0 - 1e-9));
}

SpectralDecomposition decompose(const RadialGrid& grid, int ell_max, int sobolev_k) {
    SpectralDecomposition d;
    d.sobolev_k = sobolev_k;
    d.grid = &grid;
    for (int ell = 0; ell <= ell_max; ++ell) {
        SectorOperator op = assemble_sector(ell, grid, sobolev_k);
        d.sectors[ell] = eig_sector(op);
        d.ops[ell] = std::move(op);
    }
    d.delta_g = measure_gap(d);
    double ms = -1e300;
    for (const auto& [ell, s] : d.sectors)
        for (int i = 0; i < s.eigenvalues.size(); ++i)
            if (s.refinement_stable[i] && s.eigenvalues(i).real() < -1e-6 &&
                s.eigenvalues(i).real() > ms)
                ms = s.eigenvalues(i).real();
    d.max_stable_re = ms;

    // unstable modes: refinement-stable with Re lambda > -delta_g/2
    for (auto& [ell, s] : d.sectors) {
        const int n = grid.n();
        const int m = n - 1;
        for (int i = 0; i < s.eigenvalues.size(); ++i) {
            if (!s.refinement_stable[i]) continue;
            const auto lam = s.eigenvalues(i);
            if (lam.real() <= -d.delta_g / 2.0 && std::fabs(lam.real()) >= 1e-6) continue;
            if (lam.imag() < -1e-10) continue; // keep one of each conjugate pair
            const bool complex_pair = lam.imag() > 1e-10;
            const Eigen::MatrixXd Gr = reduce_gram(d.ops[ell], s.elim);

            auto extend = [&](const Eigen::VectorXd& vr) {
                Eigen::VectorXd full(n);
                full.head(m) = vr;
                full(n - 1) = s.elim.dot(vr);
                return full;
            };
            if (!complex_pair) {
                Eigen::VectorXd vr = s.right.col(i).real();
                Eigen::VectorXd wl = s.left.col(i).real();
                const double nrm = std::sqrt(vr.dot(Gr * vr));
                vr /= nrm;
                wl /= vr.dot(wl); // (phi, psi) = 1 pairing in reduced coords
                Mode md;
                md.ell = ell;
                md.lambda = lam;
                md.phi = extend(vr);
                md.w = Eigen::VectorXd::Zero(n);
                md.w.head(m) = wl;
                d.unstable.push_back(std::move(md));
            } else {
                // real representation: span{Re v, Im v}; duals from {Re g, Im g}
                Eigen::VectorXd vr = s.right.col(i).real(), vi = s.right.col(i).imag();
                Eigen::VectorXd gr = s.left.col(i).real(), gi = s.left.col(i).imag();
                // biorthonormalize the 2x2 pairing block
                Eigen::Matrix2d Pm;
                Pm << vr.dot(gr), vr.dot(gi), vi.dot(gr), vi.dot(gi);
                Eigen::Matrix2d C = Pm.inverse();
                Eigen::VectorXd w1 = gr * C(0, 0) + gi * C(1, 0);
                Eigen::VectorXd w2 = gr * C(0, 1) + gi * C(1, 1);
                for (auto* pr : {std::make_pair(&vr, &w1), std::make_pair(&vi, &w2)}) {
                    Mode md;
                    md.ell = ell;
                    md.lambda = lam;
                    md.phi = extend(*pr->first);
                    md.w = Eigen::VectorXd::Zero(n);
                    md.w.head(m) = *pr->second;
                    d.unstable.push_back(std::move(md));
                }
            }
        }
    }
    return d;
}

Eigen::VectorXd dual_coefficients(const SpectralDecomposition& d, int ell,
                                  const Eigen::VectorXd& f) {
    Eigen::VectorXd c(static_cast<int>(d.unstable.size()));
    for (size_t j = 0; j < d.unstable.size(); ++j)
        c(static_cast<int>(j)) = (d.unstable[j].ell == ell) ? f.dot(d.unstable[j].w) : 0.0;
    return c;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
riesz_project(const SpectralDecomposition& d, int ell, const Eigen::VectorXd& f) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(f.size());
    const Eigen::VectorXd c = dual_coefficients(d, ell, f);
    for (size_t j = 0; j < d.unstable.size(); ++j)
        if (d.unstable[j].ell == ell) u += c(static_cast<int>(j)) * d.unstable[j].phi;
    return {u, f - u};
}

namespace {

// block-diagonalize a real quasi-triangular Schur form by Sylvester sweeps,
// then rotate complex 2x2 blocks to the (a -b; b a) normal form
void jordanize(const Eigen::MatrixXd& Au, double delta_g, Eigen::MatrixXd& J,
               Eigen::MatrixXd& M) {
    const int N = static_cast<int>(Au.rows());
    Eigen::RealSchur<Eigen::MatrixXd> schur(Au);
    Eigen::MatrixXd T = schur.matrixT();
    Eigen::MatrixXd Z = schur.matrixU();

    // block boundaries
    std::vector<int> starts;
    for (int i = 0; i < N;) {
        starts.push_back(i);
        if (i + 1 < N && std::fabs(T(i + 1, i)) > 1e-12) i += 2;
        else i += 1;
    }
    const int nb = static_cast<int>(starts.size());
    auto bsize = [&](int b) {
        return (b + 1 < nb ? starts[b + 1] : N) - starts[b];
    };

    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(N, N);
    for (int bj = 1; bj < nb; ++bj) {
        for (int bi = bj - 1; bi >= 0; --bi) {
            const int i0 = starts[bi], j0 = starts[bj];
            const int p = bsize(bi), q = bsize(bj);
            Eigen::MatrixXd Tii = T.block(i0, i0, p, p);
            Eigen::MatrixXd Tjj = T.block(j0, j0, q, q);
            Eigen::MatrixXd Tij = T.block(i0, j0, p, q);
            if (Tij.norm() < 1e-14) continue;
            // solve Tii X - X Tjj = -Tij (vectorized Kronecker solve)
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p * q, p * q);
            Eigen::VectorXd rhs(p * q);
            for (int c = 0; c < q; ++c)
                for (int r = 0; r < p; ++r) {
                    const int k = c * p + r;
                    rhs(k) = -Tij(r, c);
                    for (int rr = 0; rr < p; ++rr) K(k, c * p + rr) += Tii(r, rr);
                    for (int cc = 0; cc < q; ++cc) K(k, cc * p + r) -= Tjj(cc, c);
                }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
            if (lu.rcond() < 1e-10) {
                // genuinely defective coupling: keep it, rescaled to delta_g/10
                Eigen::MatrixXd D = Eigen::MatrixXd::Identity(N, N);
                const double sc = (delta_g / 10.0) / std::max(Tij.cwiseAbs().maxCoeff(), 1e-300);
                for (int c = j0; c < j0 + q; ++c) D(c, c) = 1.0 / sc;
                T = D.inverse() * T * D;
                S = S * D;
                continue;
            }
            Eigen::VectorXd xv = lu.solve(rhs);
            Eigen::MatrixXd X(p, q);
            for (int c = 0; c < q; ++c)
                for (int r = 0; r < p; ++r) X(r, c) = xv(c * p + r);
            Eigen::MatrixXd Sx = Eigen::MatrixXd::Identity(N, N);
            Sx.block(i0, j0, p, q) = X;
            T = Sx.inverse() * T * Sx;
            S = S * Sx;
        }
    }
    // rotate 2x2 blocks to (a -b; b a)
    Eigen::MatrixXd Rm = Eigen::MatrixXd::Identity(N, N);
    for (int b = 0; b < nb; ++b) {
        if (bsize(b) != 2) continue;
        const int i0 = starts[b];
        Eigen::Matrix2d Tb = T.block<2, 2>(i0, i0);
        const double a = 0.5 * (Tb(0, 0) + Tb(1, 1));
        const double det = Tb(0, 0) * Tb(1, 1) - Tb(0, 1) * Tb(1, 0);
        const double b2 = det - a * a;
        if (b2 <= 0) continue;
        const double bb = std::sqrt(b2);
        // columns of V: real/imag of the eigenvector for a+ib
        Eigen::Matrix2d Vb;
        Vb << Tb(0, 1), 0.0, a - Tb(0, 0), bb;
        if (Vb.cwiseAbs().maxCoeff() < 1e-300) continue;
        Rm.block<2, 2>(i0, i0) = Vb;
    }
    T = Rm.inverse() * T * Rm;
    // flip the off-diagonal sign convention so diagonals are (a -b; b a)
    J = T;
    M = Z * S * Rm;
}

} // namespace

ModifiedUnstableSpace build_modified(const SpectralDecomposition& d, double R) {
    ModifiedUnstableSpace s;
    s.R = R;
    s.decomp = &d;
    const int N = static_cast<int>(d.unstable.size());
    if (N == 0) throw std::invalid_argument("build_modified: no unstable modes");
    const RadialGrid& g = *d.grid;
    const int n = g.n();

    std::vector<Eigen::VectorXd> chi_phi(N);
    for (int j = 0; j < N; ++j) {
        chi_phi[j] = d.unstable[j].phi;
        for (int i = 0; i < n; ++i) chi_phi[j](i) *= bump_chi(g.nodes()(i) / R);
    }
    s.m_r.resize(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            s.m_r(i, j) = (d.unstable[i].ell == d.unstable[j].ell)
                              ? chi_phi[i].dot(d.unstable[j].w)
                              : 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.m_r);
    s.m_r_cond = svd.singularValues()(0) / svd.singularValues()(N - 1);
    if (!(s.m_r_cond <= 1e6))
        throw std::invalid_argument("build_modified: M_R numerically singular; increase R");

    // (phi~_1,...,phi~_N)^T = M_R^{-1} (chi phi_1, ..., chi phi_N)^T
    Eigen::MatrixXd Minv = s.m_r.inverse();
    s.phi_tilde.assign(N, Eigen::VectorXd::Zero(n));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) s.phi_tilde[i] += Minv(i, j) * chi_phi[j];

    // matrix of -L restricted to the unstable span in the {phi_j} basis
    Eigen::MatrixXd Au(N, N);
    for (int j = 0; j < N; ++j) {
        const Mode& mj = d.unstable[j];
        Eigen::VectorXd Lphi = apply(d.ops.at(mj.ell), OperatorPart::L, mj.phi);
        for (int i = 0; i < N; ++i)
            Au(i, j) = (d.unstable[i].ell == mj.ell) ? -Lphi.dot(d.unstable[i].w) : 0.0;
    }
    jordanize(Au, d.delta_g, s.jordan, s.basis_change);
    s.basis_change_inv = s.basis_change.inverse();
    return s;
}

Eigen::VectorXd tilde_u_project(const ModifiedUnstableSpace& s, int ell,
                                const Eigen::VectorXd& f) {
    const SpectralDecomposition& d = *s.decomp;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    const Eigen::VectorXd c = dual_coefficients(d, ell, f);
    for (size_t j = 0; j < d.unstable.size(); ++j)
        out += c(static_cast<int>(j)) * s.phi_tilde[j];
    return out;
}

double b_inner_coeff(const ModifiedUnstableSpace& s, const Eigen::VectorXd& cf,
                     const Eigen::VectorXd& cg) {
    const Eigen::VectorXd a = s.basis_change_inv * cf;
    const Eigen::VectorXd b = s.basis_change_inv * cg;
    return a.dot(b);
}

double b_inner(const ModifiedUnstableSpace& s, int ell, const Eigen::VectorXd& f,
               const Eigen::VectorXd& g) {
    const SpectralDecomposition& d = *s.decomp;
    const Eigen::VectorXd cf = dual_coefficients(d, ell, f);
    const Eigen::VectorXd cg = dual_coefficients(d, ell, g);
    // span check
    Eigen::VectorXd rec = Eigen::VectorXd::Zero(f.size());
    for (size_t j = 0; j < d.unstable.size(); ++j)
        rec += cf(static_cast<int>(j)) * s.phi_tilde[j];
    const Eigen::MatrixXd& G = d.ops.at(ell).gram;
    const double resid = std::sqrt(std::max(0.0, (f - rec).dot(G * (f - rec))));
    const double scale = std::sqrt(std::max(f.dot(G * f), 1e-300));
    if (resid > 1e-8 * scale)
        throw std::invalid_argument("b_inner: field outside the modified unstable span");
    return b_inner_coeff(s, cf, cg);
}

} // namespace ksns
