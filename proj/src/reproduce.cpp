#include "ksns/reproduce.hpp"
#include "ksns/profile.hpp"
#include "ksns/transfer.hpp"
#include "ksns/diagnostics.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace ksns {
namespace reproduce {

BoxField cutoff_profile_density(const FourierGrid3& g, double R0) {
    BoxField f = g.make_field();
    const int n = g.n();
    size_t id = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz, ++id) {
                const double x = g.coord(ix), y = g.coord(iy), z = g.coord(iz);
                const double r = std::sqrt(x * x + y * y + z * z);
                f.v[id] = bump_chi(r / R0) * profile::q(r);
            }
    return f;
}

BoxVectorField smooth_divfree_velocity(const FourierGrid3& g, double mu0,
                                       double amplitude, double sigma) {
    // U0(y) = mu0 u0(mu0 y) with u0 = curl(psi e3), psi = A exp(-|x|^2/2s^2)
    BoxVectorField u;
    u.x = g.make_field();
    u.y = g.make_field();
    u.z = g.make_field();
    const int n = g.n();
    size_t id = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz, ++id) {
                const double x = mu0 * g.coord(ix), y = mu0 * g.coord(iy),
                             z = mu0 * g.coord(iz);
                const double e = amplitude * std::exp(-(x * x + y * y + z * z) /
                                                      (2.0 * sigma * sigma));
                u.x.v[id] = mu0 * (-y / (sigma * sigma)) * e;
                u.y.v[id] = mu0 * (x / (sigma * sigma)) * e;
                u.z.v[id] = 0.0;
            }
    u.divergence_free = false; // projected on ingest
    return u;
}

std::unique_ptr<RadialMachinery> make_radial_machinery(int n, int k, double r_mod) {
    auto m = std::make_unique<RadialMachinery>();
    m->grid = std::make_unique<RadialGrid>(n);
    m->decomp = decompose(*m->grid, 1, k);
    m->mod = build_modified(m->decomp, r_mod);
    // re-point internal references after the move above
    m->mod.decomp = &m->decomp;
    for (size_t j = 0; j < m->decomp.unstable.size(); ++j)
        if (m->decomp.unstable[j].ell == 0) m->mode_index = static_cast<int>(j);
    if (m->mode_index < 0) throw std::runtime_error("no radial unstable mode found");
    return m;
}

namespace {

double box_hk_pairing(const FourierGrid3& g, const SpecField& a, const SpecField& b,
                      int k) {
    const int n = g.n();
    const int nz = n / 2 + 1;
    const double vol = std::pow(2.0 * g.B(), 3);
    double acc = 0.0;
    size_t idx = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < nz; ++iz, ++idx) {
                const double w = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
                acc += w * (1.0 + std::pow(g.k2()[idx], k)) *
                       (a[idx] * std::conj(b[idx])).real();
            }
    return acc * vol;
}

} // namespace

BoxModePack make_box_mode_pack(const RadialMachinery& m, const FourierGrid3& g) {
    BoxModePack pack;
    pack.sobolev_k = m.decomp.sobolev_k;
    const Mode& md = m.decomp.unstable[m.mode_index];
    const RadialGrid& rg = *m.grid;

    // psi on the radial grid from the pairing vector: psi = G^{-1} w
    Eigen::MatrixXd G = m.decomp.ops.at(0).gram;
    Eigen::VectorXd psi_r = G.ldlt().solve(md.w);

    const double y00 = 1.0 / std::sqrt(4.0 * M_PI);
    ScalarField fphi{&rg, 0, m.mod.phi_tilde[m.mode_index] * y00};
    ScalarField fpsi{&rg, 0, psi_r * y00};
    BoxField phib = transfer_radial_to_box(fphi, 0, g);
    BoxField psib = transfer_radial_to_box(fpsi, 0, g);
    pack.phi_tilde_hat = g.fft(phib);
    pack.psi_hat = g.fft(psib);
    const double pr = box_hk_pairing(g, pack.phi_tilde_hat, pack.psi_hat, pack.sobolev_k);
    for (auto& c : pack.psi_hat) c /= pr;

    // ||a phi~||_B~ per the radial Jordan coordinates
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<int>(m.decomp.unstable.size()));
    e(m.mode_index) = 1.0;
    pack.b_scale = std::sqrt(std::max(0.0, b_inner_coeff(m.mod, e, e)));
    return pack;
}

RadialStabilityResult radial_stability(const Config& cfg) {
    RadialStabilityResult out;
    const int n = cfg.get("grid.n", 128);
    const int k = cfg.get("model.k", 2);
    const double r_mod = cfg.get("modified.R", 5.0);
    auto mach = make_radial_machinery(n, k, r_mod);
    out.delta_g = mach->decomp.delta_g;

    ShootConfig sc;
    sc.tau_end = cfg.get("sim.tau_end", 8.0);
    sc.dt = cfg.get("sim.dt", 0.004);
    sc.R0 = cfg.get("init.R0", 15.0);
    sc.bracket = cfg.get("shoot.bracket", 1e-2);
    sc.tol = cfg.get("shoot.tol", 1e-12);
    sc.max_iterations = cfg.get("shoot.max_iterations", 48);

    out.budget.d0 = cfg.get("delta.0", 1e-6);
    out.budget.d4 = cfg.get("delta.4", 1e-4);
    out.budget.d3 = cfg.get("delta.3", 1e-3);
    out.budget.d1 = cfg.get("delta.1", 2.0);
    out.budget.d2 = cfg.get("delta.2", 6.0);

    Eigen::VectorXd stable0 = shooting_initial_stable_part(mach->decomp, mach->mod, sc.R0);
    out.shoot = shoot_unstable(mach->decomp, mach->mod, *mach->grid, stable0, sc);
    out.report = monitor_bootstrap(out.shoot.trajectory, out.budget, out.delta_g);

    {
        std::vector<double> ts, ys;
        for (const auto& r : out.shoot.trajectory)
            if (r.tau >= 1.0 && r.hs_norm > 0) {
                ts.push_back(r.tau);
                ys.push_back(r.hs_norm);
            }
        out.fitted_eps_decay = fitted_decay_exponent(ts, ys);
    }

    // wrong-sign control: push the coefficient outside the B~ ball
    {
        std::optional<double> flux;
        const double wrong = out.shoot.a1 + out.budget.d3 * 5.0;
        auto rows = run_radial_trajectory(mach->decomp, mach->mod, *mach->grid, stable0,
                                          wrong, sc, &flux);
        out.wrong_sign_exited = std::fabs(rows.back().a_u) > sc.exit_threshold * 0.99;
        out.wrong_sign_flux = flux.value_or(0.0);
    }

    // diagnostics rows in the simulate CSV schema (pure KS: flow columns 0)
    const double mu0 = cfg.get("model.mu0", 0.0);
    const double T = mu0 * mu0;
    for (const auto& r : out.shoot.trajectory) {
        DiagnosticsRow d;
        d.tau = r.tau;
        const double mu = mu0 * std::exp(-r.tau / 2.0);
        d.t = T - mu * mu;
        d.h_k_stable = r.hs_norm;
        d.b_unstable = r.b_norm;
        d.u_h1hk1 = 0.0;
        const double mu2 = (mu0 > 0) ? mu * mu : 1.0;
        d.max_rho = r.max_psi / mu2;
        d.min_rho = r.min_psi / mu2;
        d.max_u = 0.0;
        d.max_gradpi = 0.0;
        d.mass = r.mass * ((mu0 > 0) ? mu : 1.0);
        out.diag_rows.push_back(d);
    }
    return out;
}

AppendixBResult appendix_b(const Config& cfg, const std::string& out_dir) {
    AppendixBResult out;
    const int nbox = cfg.get("grid.n", 96);
    const double B = cfg.get("grid.box", 40.0);
    const double mu0 = cfg.get("model.mu0", 0.05);
    const double R0 = cfg.get("init.R0", B / 4.0);
    const double dt = cfg.get("sim.dt", 0.006);
    const double tau_end = cfg.get("sim.tau_end", 7.5);
    const double tau_probe = cfg.get("shoot.probe_tau", 3.5);
    const int n_probe = cfg.get("shoot.probes", 2);
    const int k = cfg.get("model.k", 2);
    const int sample_every = cfg.get("sim.sample_every", 5);

    auto mach = make_radial_machinery(cfg.get("radial.n", 128), k, cfg.get("modified.R", 5.0));
    FourierGrid3 g(nbox, B);
    BoxModePack pack = make_box_mode_pack(*mach, g);

    // Leray closed-form cross-check at the origin
    {
        BoxField qe3 = g.make_field();
        const int n = g.n();
        size_t id = 0;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz, ++id) {
                    const double x = g.coord(ix), y = g.coord(iy), z = g.coord(iz);
                    qe3.v[id] = profile::q(std::sqrt(x * x + y * y + z * z));
                }
        BoxVectorField u;
        u.x = g.make_field();
        u.y = g.make_field();
        u.z = qe3;
        BoxVectorField pu = g.leray_project(u);
        const int c = n / 2;
        out.leray_origin = pu.z.at(c, c, c);
    }

    // radial seed for the blowup-time coefficient
    double a1 = 0.0;
    {
        ShootConfig sc;
        sc.R0 = R0;
        sc.dt = cfg.get("radial.dt", 0.004);
        sc.tau_end = cfg.get("radial.tau_end", 8.0);
        Eigen::VectorXd stable0 = shooting_initial_stable_part(mach->decomp, mach->mod, sc.R0);
        ShootResult sr = shoot_unstable(mach->decomp, mach->mod, *mach->grid, stable0, sc);
        a1 = sr.a1;
    }

    BoxField q_cut = cutoff_profile_density(g, R0);
    SpecField q_hat = g.fft(q_cut);
    const double y00 = 1.0 / std::sqrt(4.0 * M_PI);

    auto make_initial = [&](double a) {
        BoxField f = q_cut;
        ScalarField fphi{mach->grid.get(), 0, mach->mod.phi_tilde[mach->mode_index] * y00};
        BoxField pb = transfer_radial_to_box(fphi, 0, g);
        for (size_t i = 0; i < f.v.size(); ++i) f.v[i] += a * pb.v[i];
        return f;
    };

    BoxSelfSimStepper::Params bp;
    bp.mu0 = mu0;
    bp.dt = dt;
    bp.sponge_amplitude = cfg.get("sim.sponge", 2.0);
    bp.with_fluid = true;

    auto run = [&](double a, double tend, int sample, std::vector<DiagnosticsRow>* rows,
                   std::vector<std::pair<double, double>>* au) {
        BoxSelfSimStepper st(g, bp);
        st.set_density(make_initial(a));
        st.set_velocity(smooth_divfree_velocity(g, mu0, cfg.get("init.u0_amplitude", 0.5),
                                                cfg.get("init.u0_sigma", 0.5)));
        const int nstep = static_cast<int>(std::llround(tend / dt));
        for (int m = 1; m <= nstep; ++m) {
            st.step();
            if (m % sample == 0 || m == nstep) {
                if (au) au->push_back({st.tau(), st.unstable_coefficient(pack, q_hat)});
                if (rows) rows->push_back(st.diagnostics(q_hat, &pack));
            }
        }
    };

    // probe runs: fit a(tau) = c0 e^tau + c1 over tau >= 1 and cancel c0
    for (int p = 0; p < n_probe; ++p) {
        std::vector<std::pair<double, double>> au;
        run(a1, tau_probe, sample_every, nullptr, &au);
        double s_ee = 0, s_e1 = 0, s_11 = 0, s_ey = 0, s_1y = 0;
        for (const auto& [tq, aq] : au) {
            if (tq < 1.0) continue;
            const double e = std::exp(tq);
            s_ee += e * e;
            s_e1 += e;
            s_11 += 1.0;
            s_ey += e * aq;
            s_1y += aq;
        }
        const double den = s_ee * s_11 - s_e1 * s_e1;
        const double c0 = (s_ey * s_11 - s_e1 * s_1y) / den;
        a1 -= c0;
        ++out.probes;
    }
    out.a1 = a1;

    run(a1, tau_end, sample_every, &out.rows, nullptr);
    out.fits = fluid_blowup_rates(out.rows);

    double mn = 1e300, mx = -1e300;
    for (const auto& r : out.rows) {
        mn = std::min(mn, r.min_rho / std::max(r.max_rho, 1e-300));
        mx = std::max(mx, r.max_rho);
    }
    out.min_rho_ratio = mn;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_diagnostics_csv(out_dir + "/diagnostics.csv", out.rows);
    }
    return out;
}

WellPosednessResult well_posedness(const Config& cfg) {
    WellPosednessResult out;
    const int n = cfg.get("grid.n", 48);
    const double B = cfg.get("grid.box", 40.0);
    FourierGrid3 g(n, B);

    // mass conservation + positivity: pure KS physical run from chi_R0 Q
    {
        BoxPhysicalStepper::Params pp;
        pp.dt = cfg.get("sim.dt", 2e-4);
        pp.with_fluid = false;
        BoxPhysicalStepper st(g, pp);
        st.set_density(cutoff_profile_density(g, cfg.get("init.R0", B / 4.0)));
        const double m0 = st.mass();
        double worst_drift = 0.0, min_ratio = 0.0;
        double prev = m0;
        const int nstep = cfg.get("sim.steps", 400);
        for (int m = 0; m < nstep; ++m) {
            st.step();
            const double cur = st.mass();
            worst_drift = std::max(worst_drift, std::fabs(cur - prev) / std::fabs(m0));
            prev = cur;
            if (m % 50 == 49 || m == nstep - 1) {
                BoxField rho = st.density();
                double mn = 1e300, mxv = -1e300;
                for (double v : rho.v) {
                    mn = std::min(mn, v);
                    mxv = std::max(mxv, v);
                }
                min_ratio = std::min(min_ratio, mn / mxv);
            }
        }
        out.mass_drift_per_step = worst_drift;
        out.min_rho_ratio = min_ratio;
    }

    // frame consistency: same physical problem integrated in both frames
    {
        const double mu0 = 1.0;
        const double tau_cmp = cfg.get("frame.tau", 0.05);
        const double t_cmp = mu0 * mu0 * (1.0 - std::exp(-tau_cmp));
        const double amp = cfg.get("frame.amplitude", 0.1);

        BoxField rho0 = g.make_field();
        {
            BoxField base = cutoff_profile_density(g, B / 4.0);
            for (size_t i = 0; i < rho0.v.size(); ++i) rho0.v[i] = amp * base.v[i];
        }
        BoxVectorField u0 = smooth_divfree_velocity(g, 1.0, 0.05, 2.0);

        BoxPhysicalStepper::Params pp;
        pp.dt = t_cmp / cfg.get("frame.steps", 128);
        BoxPhysicalStepper phys(g, pp);
        phys.set_density(rho0);
        phys.set_velocity(u0);
        while (phys.time() < t_cmp - 1e-12) phys.step();

        BoxSelfSimStepper::Params sp;
        sp.mu0 = mu0;
        sp.dt = tau_cmp / cfg.get("frame.steps", 128);
        sp.sponge_amplitude = 0.0;
        BoxSelfSimStepper ss(g, sp);
        ss.set_density(rho0); // mu0 = 1: frames coincide at tau = 0
        ss.set_velocity(u0);
        while (ss.tau() < tau_cmp - 1e-12) ss.step();

        // compare max rho, center value, L2 norm and mass through the exact
        // change of variables (mu0 = 1 makes the boxes coincide at tau = 0;
        // the residual domain mismatch is exponentially small for compact data)
        const double mu = ss.mu();
        BoxField rp = phys.density();
        BoxField rs = ss.density();
        double mxp = -1e300, mxs = -1e300, l2p = 0, l2s = 0, msp = 0, mss = 0;
        for (double v : rp.v) {
            mxp = std::max(mxp, v);
            l2p += v * v;
            msp += v;
        }
        for (double v : rs.v) {
            mxs = std::max(mxs, v);
            l2s += v * v;
            mss += v;
        }
        const int c = g.n() / 2;
        const double center_p = rp.at(c, c, c);
        const double center_s = rs.at(c, c, c) / (mu * mu);
        double err = std::fabs(mxp - mxs / (mu * mu)) / std::fabs(mxp);
        err = std::max(err, std::fabs(center_p - center_s) / std::max(std::fabs(center_p), 1e-300));
        // mass: int rho dx = mu * int Psi dy
        err = std::max(err, std::fabs(msp - mu * mss) /
                                std::max(std::fabs(msp), 1e-300));
        out.frame_rel_err = err;
    }
    return out;
}

} // namespace reproduce
} // namespace ksns
