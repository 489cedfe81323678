#include "ksns/dynamics_radial.hpp"
#include "ksns/profile.hpp"
#include "ksns/semigroup.hpp"
#include "ksns/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace ksns {

RadialSelfSimStepper::RadialSelfSimStepper(const RadialGrid& grid, double dt,
                                           double sponge_amplitude, bool modal_filter)
    : grid_(&grid), dt_(dt), use_filter_(modal_filter) {
    if (dt <= 0) throw std::invalid_argument("stepper: dt > 0 required");
    // Psi-fields carry the Q tail ~ r^-2 through the ball boundary
    half_prop_ = semigroup_matrix_radial(grid, 0, dt / 2.0, 2.0);
    poisson_ = poisson_sector_matrix(grid, 0, 2.0);
    d1_ = grid.d1().cast<double>();
    const int n = grid.n();
    q_.resize(n);
    sponge_factor_.resize(n);
    const double rmax = grid.r_max();
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes()(i);
        q_(i) = profile::q(r);
        const double ramp = std::max(0.0, (r - 0.8 * rmax) / (0.2 * rmax));
        sponge_factor_(i) = std::exp(-dt * sponge_amplitude * ramp * ramp);
    }
    if (use_filter_) {
        Eigen::VectorXd sigma(n);
        for (int k = 0; k < n; ++k)
            sigma(k) = std::exp(-36.0 * std::pow(static_cast<double>(k) / (n - 1), 16.0));
        filter_ = grid.from_modal() * sigma.asDiagonal() * grid.to_modal();
    }
}

Eigen::VectorXd RadialSelfSimStepper::nonlinear(const Eigen::VectorXd& psi) const {
    Eigen::VectorXd u = poisson_ * psi;
    Eigen::VectorXd du = d1_ * u;
    Eigen::VectorXd dpsi = d1_ * psi;
    return psi.cwiseProduct(psi) + dpsi.cwiseProduct(du);
}

void RadialSelfSimStepper::step(Eigen::VectorXd& psi) const {
    psi = half_prop_ * psi;
    const Eigen::VectorXd k1 = nonlinear(psi);
    const Eigen::VectorXd k2 = nonlinear(psi + dt_ * k1);
    psi += 0.5 * dt_ * (k1 + k2);
    psi = half_prop_ * psi;
    psi = q_ + sponge_factor_.cwiseProduct(psi - q_);
    if (use_filter_) psi = filter_ * psi;
}

Eigen::VectorXd shooting_initial_stable_part(const SpectralDecomposition& d,
                                             const ModifiedUnstableSpace& mod,
                                             double R0) {
    const RadialGrid& g = *d.grid;
    const int n = g.n();
    Eigen::VectorXd tail(n);
    for (int i = 0; i < n; ++i) {
        const double r = g.nodes()(i);
        tail(i) = (1.0 - bump_chi(r / R0)) * profile::q(r);
    }
    // eps~_s0 = -P~s((1-chi_R0) Q) = -(tail - P~u tail)
    return -(tail - tilde_u_project(mod, 0, tail));
}

namespace {

struct NormPack {
    Eigen::MatrixXd gram_k;    // H^k
    Eigen::MatrixXd gram_k1h;  // Hdot^{k+1} homogeneous part
};

NormPack make_norms(const RadialGrid& g, int k) {
    NormPack p;
    p.gram_k = gram_hk(g, 0, k);
    // Hdot^{k+1}: difference of full H^{k+1} and L2 parts
    Eigen::MatrixXd gk1 = gram_hk(g, 0, k + 1);
    Eigen::MatrixXd W = g.quad_weights().asDiagonal();
    p.gram_k1h = gk1 - W;
    return p;
}

double norm_of(const Eigen::MatrixXd& G, const Eigen::VectorXd& f) {
    return std::sqrt(std::max(0.0, f.dot(G * f)));
}

} // namespace

std::vector<RadialTrajectoryRow>
run_radial_trajectory(const SpectralDecomposition& d, const ModifiedUnstableSpace& mod,
                      const RadialGrid& grid, const Eigen::VectorXd& stable_init,
                      double a1, const ShootConfig& cfg, std::optional<double>* exit_flux) {
    const int n = grid.n();
    Eigen::VectorXd qv(n);
    for (int i = 0; i < n; ++i) qv(i) = profile::q(grid.nodes()(i));

    RadialSelfSimStepper stepper(grid, cfg.dt);
    NormPack norms = make_norms(grid, d.sobolev_k);

    // locate the radial unstable mode index
    int j1 = -1;
    for (size_t j = 0; j < d.unstable.size(); ++j)
        if (d.unstable[j].ell == 0) j1 = static_cast<int>(j);
    if (j1 < 0) throw std::runtime_error("run_radial_trajectory: no radial unstable mode");

    Eigen::VectorXd psi = qv + stable_init + a1 * mod.phi_tilde[j1];
    std::vector<RadialTrajectoryRow> rows;
    const int nstep = static_cast<int>(std::llround(cfg.tau_end / cfg.dt));
    double prev_flux_q = -1.0, prev_tau = 0.0;
    const double delta_g = d.delta_g;

    auto record = [&](double tau, const Eigen::VectorXd& ps) {
        RadialTrajectoryRow row;
        row.tau = tau;
        Eigen::VectorXd eps = ps - qv;
        Eigen::VectorXd cu = dual_coefficients(d, 0, eps);
        row.a_u = cu(j1);
        row.b_norm = std::sqrt(std::max(0.0, b_inner_coeff(mod, cu, cu)));
        Eigen::VectorXd eps_s = eps - tilde_u_project(mod, 0, eps);
        row.hs_norm = norm_of(norms.gram_k, eps_s);
        row.hs1_norm = norm_of(norms.gram_k1h, eps_s);
        row.max_psi = ps.maxCoeff();
        row.min_psi = ps.minCoeff();
        row.mass = 4.0 * M_PI * grid.integrate(ps);
        return row;
    };
    rows.push_back(record(0.0, psi));

    for (int m = 1; m <= nstep; ++m) {
        stepper.step(psi);
        if (!psi.allFinite()) break;
        const double tau = m * cfg.dt;
        Eigen::VectorXd cu = dual_coefficients(d, 0, psi - qv);
        const double bn2 = b_inner_coeff(mod, cu, cu);
        // outgoing-flux quantity e^{(7/5) dg tau} ||eps~_u||_B~^2
        const double fluxq = std::exp(1.4 * delta_g * tau) * bn2;
        if (m % cfg.sample_every == 0 || m == nstep) rows.push_back(record(tau, psi));
        if (std::fabs(cu(j1)) > cfg.exit_threshold) {
            rows.push_back(record(tau, psi));
            if (exit_flux && prev_flux_q >= 0.0)
                *exit_flux = (fluxq - prev_flux_q) / (tau - prev_tau);
            break;
        }
        prev_flux_q = fluxq;
        prev_tau = tau;
    }
    return rows;
}

ShootResult shoot_unstable(const SpectralDecomposition& d, const ModifiedUnstableSpace& mod,
                           const RadialGrid& grid, const Eigen::VectorXd& stable_init,
                           const ShootConfig& cfg) {
    ShootResult res;
    auto endpoint = [&](double a1) {
        auto rows = run_radial_trajectory(d, mod, grid, stable_init, a1, cfg, nullptr);
        return rows.back().a_u;
    };
    double lo = -cfg.bracket, hi = cfg.bracket;
    double alo = endpoint(lo), ahi = endpoint(hi);
    if (alo * ahi > 0.0)
        throw std::runtime_error("shoot_unstable: bracket does not straddle the stable manifold");
    for (int it = 0; it < cfg.max_iterations && (hi - lo) > cfg.tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double am = endpoint(mid);
        res.bisection_log.push_back({it, lo, hi, am > 0 ? 1 : -1});
        if ((am > 0) == (alo > 0)) {
            lo = mid;
            alo = am;
        } else {
            hi = mid;
        }
        res.iterations = it + 1;
    }
    res.a1 = 0.5 * (lo + hi);
    res.converged = true;
    res.trajectory = run_radial_trajectory(d, mod, grid, stable_init, res.a1, cfg, nullptr);
    return res;
}

BootstrapReport monitor_bootstrap(const std::vector<RadialTrajectoryRow>& rows,
                                  const DeltaBudget& deltas, double delta_g) {
    BootstrapReport rep;
    auto check = [&](const char* name, auto value, double coef, double rate,
                     double required_rate) {
        BootstrapReport::Bound b;
        b.name = name;
        b.required_exponent = required_rate;
        std::vector<double> ts, ys;
        for (const auto& r : rows) {
            const double bound = coef * std::exp(-rate * r.tau);
            const double v = value(r);
            if (v > bound && b.first_violation < 0) b.first_violation = r.tau;
            if (v > 0) {
                ts.push_back(r.tau);
                ys.push_back(v);
            }
        }
        b.fitted_exponent = (ts.size() >= 2) ? fitted_decay_exponent(ts, ys) : 0.0;
        if (b.first_violation >= 0) rep.all_hold = false;
        rep.bounds.push_back(b);
    };
    check("stable_hk", [](const RadialTrajectoryRow& r) { return r.hs_norm; },
          deltas.d1, 0.5 * delta_g, 0.5 * delta_g);
    check("stable_hk1", [](const RadialTrajectoryRow& r) { return r.hs1_norm; },
          deltas.d2, 0.5 * delta_g, 0.5 * delta_g);
    check("unstable_b", [](const RadialTrajectoryRow& r) { return r.b_norm; },
          deltas.d3, 0.7 * delta_g, 0.7 * delta_g);
    check("flow", [](const RadialTrajectoryRow&) { return 0.0; },
          deltas.d4, 0.125, 0.125);
    return rep;
}

} // namespace ksns
