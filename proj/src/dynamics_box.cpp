#include "ksns/dynamics_box.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksns {

namespace {

double hk_pairing(const FourierGrid3& g, const SpecField& a, const SpecField& b, int k) {
    // (f,g)_{L2} + (D^k f, D^k g)_{L2} via the |k|^{2k} multiplier; rfft
    // symmetry handled by doubling interior kz planes
    const int n = g.n();
    const int nz = n / 2 + 1;
    const double vol = std::pow(2.0 * g.B(), 3);
    double acc = 0.0;
    size_t idx = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < nz; ++iz, ++idx) {
                const double w = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
                const double kk = g.k2()[idx];
                const double mult = 1.0 + std::pow(kk, k);
                acc += w * mult * (a[idx] * std::conj(b[idx])).real();
            }
    return acc * vol;
}

} // namespace

BoxSelfSimStepper::BoxSelfSimStepper(const FourierGrid3& g, Params p)
    : g_(&g), params_(p) {
    const size_t ns = g.spec_size();
    psi_.assign(ns, 0.0);
    ux_.assign(ns, 0.0);
    uy_.assign(ns, 0.0);
    uz_.assign(ns, 0.0);
    if_psi_half_.resize(ns);
    if_u_half_.resize(ns);
    for (size_t i = 0; i < ns; ++i) {
        if_psi_half_[i] = std::exp((-g.k2()[i] - 1.0) * p.dt / 2.0);
        if_u_half_[i] = std::exp((-g.k2()[i] - 0.5) * p.dt / 2.0);
    }
    const int n = g.n();
    sponge_.resize(g.real_size());
    for (int a = 0; a < 3; ++a) ycoord_[a].resize(g.real_size());
    size_t id = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz, ++id) {
                const double x = g.coord(ix), y = g.coord(iy), z = g.coord(iz);
                ycoord_[0][id] = x;
                ycoord_[1][id] = y;
                ycoord_[2][id] = z;
                const double m = std::max({std::fabs(x), std::fabs(y), std::fabs(z)});
                const double ramp = std::max(0.0, (m - 0.8 * g.B()) / (0.2 * g.B()));
                sponge_[id] = std::exp(-p.dt * p.sponge_every * p.sponge_amplitude * ramp * ramp);
            }
}

void BoxSelfSimStepper::set_density(const BoxField& psi) { psi_ = g_->fft(psi); }

void BoxSelfSimStepper::set_velocity(const BoxVectorField& u) {
    ux_ = g_->fft(u.x);
    uy_ = g_->fft(u.y);
    uz_ = g_->fft(u.z);
    g_->leray_hat(ux_, uy_, uz_);
}

BoxField BoxSelfSimStepper::density() const { return g_->ifft(psi_); }

BoxVectorField BoxSelfSimStepper::velocity() const {
    BoxVectorField u;
    u.x = g_->ifft(ux_);
    u.y = g_->ifft(uy_);
    u.z = g_->ifft(uz_);
    u.divergence_free = true;
    return u;
}

void BoxSelfSimStepper::rhs(const SpecField& psi, const SpecField& ux, const SpecField& uy,
                            const SpecField& uz, double mu_mid, Rhs& out) const {
    const FourierGrid3& g = *g_;
    const size_t nr = g.real_size();
    SpecField tmp;

    SpecField masked = psi;
    g.dealias(masked);
    BoxField P = g.ifft(masked);

    // grad invlap psi and grad psi
    SpecField invl = g.laplace_inv_hat(masked);
    BoxField gphi[3], gpsi[3];
    for (int a = 0; a < 3; ++a) {
        g.deriv_hat(invl, a, tmp);
        gphi[a] = g.ifft(tmp);
        g.deriv_hat(masked, a, tmp);
        gpsi[a] = g.ifft(tmp);
    }
    BoxField U[3];
    {
        SpecField m;
        m = ux; g.dealias(m); U[0] = g.ifft(m);
        m = uy; g.dealias(m); U[1] = g.ifft(m);
        m = uz; g.dealias(m); U[2] = g.ifft(m);
    }
    // dPsi = N(Psi) - U.grad Psi - (1/2) y.grad Psi, with
    // N = psi^2 + grad psi . grad invlap psi
    BoxField work = g.make_field();
    for (size_t i = 0; i < nr; ++i) {
        double adv = 0.0, nl = P.v[i] * P.v[i], drift = 0.0;
        for (int a = 0; a < 3; ++a) {
            nl += gpsi[a].v[i] * gphi[a].v[i];
            adv += U[a].v[i] * gpsi[a].v[i];
            drift += 0.5 * ycoord_[a][i] * gpsi[a].v[i];
        }
        work.v[i] = nl - adv - drift;
    }
    out.psi = g.fft(work);

    if (!params_.with_fluid) {
        out.ux.assign(g.spec_size(), 0.0);
        out.uy.assign(g.spec_size(), 0.0);
        out.uz.assign(g.spec_size(), 0.0);
        return;
    }
    // velocity: -(U.grad)U - (1/2) y.grad U - mu Psi e3, Leray projected
    const SpecField* uhat[3] = {&ux, &uy, &uz};
    BoxField conv[3];
    for (int c = 0; c < 3; ++c) {
        SpecField m = *uhat[c];
        g.dealias(m);
        BoxField gu[3];
        for (int a = 0; a < 3; ++a) {
            g.deriv_hat(m, a, tmp);
            gu[a] = g.ifft(tmp);
        }
        conv[c] = g.make_field();
        for (size_t i = 0; i < nr; ++i) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
                acc += (U[a].v[i] + 0.5 * ycoord_[a][i]) * gu[a].v[i];
            conv[c].v[i] = -acc;
        }
    }
    for (size_t i = 0; i < nr; ++i) conv[2].v[i] -= mu_mid * P.v[i];
    out.ux = g.fft(conv[0]);
    out.uy = g.fft(conv[1]);
    out.uz = g.fft(conv[2]);
    g.leray_hat(out.ux, out.uy, out.uz);
}

void BoxSelfSimStepper::apply_sponge() {
    BoxField f = g_->ifft(psi_);
    for (size_t i = 0; i < f.v.size(); ++i) f.v[i] *= sponge_[i];
    psi_ = g_->fft(f);
    if (params_.with_fluid) {
        SpecField* us[3] = {&ux_, &uy_, &uz_};
        for (auto* u : us) {
            f = g_->ifft(*u);
            for (size_t i = 0; i < f.v.size(); ++i) f.v[i] *= sponge_[i];
            *u = g_->fft(f);
        }
        g_->leray_hat(ux_, uy_, uz_);
    }
}

void BoxSelfSimStepper::step() {
    const double dt = params_.dt;
    const double mu_mid = params_.mu0 * std::exp(-(tau_ + dt / 2.0) / 2.0);
    const size_t ns = g_->spec_size();
    auto scale = [&](SpecField& f, const std::vector<double>& fac) {
        for (size_t i = 0; i < ns; ++i) f[i] *= fac[i];
    };
    scale(psi_, if_psi_half_);
    scale(ux_, if_u_half_);
    scale(uy_, if_u_half_);
    scale(uz_, if_u_half_);

    Rhs k1, k2, k3;
    rhs(psi_, ux_, uy_, uz_, mu_mid, k1);
    SpecField p1(ns), x1(ns), y1(ns), z1(ns);
    for (size_t i = 0; i < ns; ++i) {
        p1[i] = psi_[i] + dt * k1.psi[i];
        x1[i] = ux_[i] + dt * k1.ux[i];
        y1[i] = uy_[i] + dt * k1.uy[i];
        z1[i] = uz_[i] + dt * k1.uz[i];
    }
    rhs(p1, x1, y1, z1, mu_mid, k2);
    for (size_t i = 0; i < ns; ++i) {
        p1[i] = 0.75 * psi_[i] + 0.25 * (p1[i] + dt * k2.psi[i]);
        x1[i] = 0.75 * ux_[i] + 0.25 * (x1[i] + dt * k2.ux[i]);
        y1[i] = 0.75 * uy_[i] + 0.25 * (y1[i] + dt * k2.uy[i]);
        z1[i] = 0.75 * uz_[i] + 0.25 * (z1[i] + dt * k2.uz[i]);
    }
    rhs(p1, x1, y1, z1, mu_mid, k3);
    const double c23 = 2.0 / 3.0;
    for (size_t i = 0; i < ns; ++i) {
        psi_[i] = psi_[i] / 3.0 + c23 * (p1[i] + dt * k3.psi[i]);
        ux_[i] = ux_[i] / 3.0 + c23 * (x1[i] + dt * k3.ux[i]);
        uy_[i] = uy_[i] / 3.0 + c23 * (y1[i] + dt * k3.uy[i]);
        uz_[i] = uz_[i] / 3.0 + c23 * (z1[i] + dt * k3.uz[i]);
    }
    if (params_.with_fluid) g_->leray_hat(ux_, uy_, uz_);

    scale(psi_, if_psi_half_);
    scale(ux_, if_u_half_);
    scale(uy_, if_u_half_);
    scale(uz_, if_u_half_);

    ++step_count_;
    tau_ += dt;
    if (step_count_ % params_.sponge_every == 0) apply_sponge();
}

double BoxSelfSimStepper::unstable_coefficient(const BoxModePack& pack,
                                               const SpecField& q_hat) const {
    SpecField eps(psi_.size());
    for (size_t i = 0; i < eps.size(); ++i) eps[i] = psi_[i] - q_hat[i];
    return hk_pairing(*g_, eps, pack.psi_hat, pack.sobolev_k);
}

DiagnosticsRow BoxSelfSimStepper::diagnostics(const SpecField& q_hat,
                                              const BoxModePack* pack) const {
    const FourierGrid3& g = *g_;
    DiagnosticsRow row;
    row.tau = tau_;
    const double muv = mu();
    const double T = params_.mu0 * params_.mu0;
    row.t = T - muv * muv;

    BoxField P = g.ifft(psi_);
    double mx = -1e300, mn = 1e300, mean = 0.0;
    for (double v : P.v) {
        mx = std::max(mx, v);
        mn = std::min(mn, v);
        mean += v;
    }
    mean /= static_cast<double>(P.v.size());
    row.max_rho = mx / (muv * muv);
    row.min_rho = mn / (muv * muv);
    row.mass = muv * mean * std::pow(2.0 * g.B(), 3);

    BoxVectorField U = velocity();
    double umax2 = 0.0;
    for (size_t i = 0; i < U.x.v.size(); ++i) {
        const double s = U.x.v[i] * U.x.v[i] + U.y.v[i] * U.y.v[i] + U.z.v[i] * U.z.v[i];
        umax2 = std::max(umax2, s);
    }
    row.max_u = std::sqrt(umax2) / muv;

    // grad Pi = -grad invlap div(U.grad U + mu Psi e3)
    {
        SpecField tmp, divh(g.spec_size(), 0.0);
        for (int c = 0; c < 3; ++c) {
            SpecField m = (c == 0) ? ux_ : (c == 1) ? uy_ : uz_;
            g.dealias(m);
            BoxField gu[3];
            for (int a = 0; a < 3; ++a) {
                g.deriv_hat(m, a, tmp);
                gu[a] = g.ifft(tmp);
            }
            BoxField conv = g.make_field();
            for (size_t i = 0; i < conv.v.size(); ++i)
                conv.v[i] = U.x.v[i] * gu[0].v[i] + U.y.v[i] * gu[1].v[i] +
                            U.z.v[i] * gu[2].v[i];
            if (c == 2)
                for (size_t i = 0; i < conv.v.size(); ++i) conv.v[i] += muv * P.v[i];
            SpecField ch = g.fft(conv);
            g.deriv_hat(ch, c, tmp);
            for (size_t i = 0; i < divh.size(); ++i) divh[i] += tmp[i];
        }
        SpecField pih = g.laplace_inv_hat(divh);
        double gp2 = 0.0;
        BoxField gp[3];
        for (int a = 0; a < 3; ++a) {
            g.deriv_hat(pih, a, tmp);
            gp[a] = g.ifft(tmp);
        }
        for (size_t i = 0; i < gp[0].v.size(); ++i) {
            const double s = gp[0].v[i] * gp[0].v[i] + gp[1].v[i] * gp[1].v[i] +
                             gp[2].v[i] * gp[2].v[i];
            gp2 = std::max(gp2, s);
        }
        row.max_gradpi = std::sqrt(gp2) / (muv * muv * muv);
    }

    // Sobolev norms of the renormalized fields
    if (pack) {
        SpecField eps(psi_.size());
        for (size_t i = 0; i < eps.size(); ++i) eps[i] = psi_[i] - q_hat[i];
        const double a = hk_pairing(g, eps, pack->psi_hat, pack->sobolev_k);
        row.b_unstable = std::fabs(a) * pack->b_scale;
        SpecField eps_s(eps.size());
        for (size_t i = 0; i < eps.size(); ++i)
            eps_s[i] = eps[i] - a * pack->phi_tilde_hat[i];
        row.h_k_stable = std::sqrt(std::max(0.0, hk_pairing(g, eps_s, eps_s, pack->sobolev_k)));
        // U in Hdot1 cap Hdot{k+1}
        const int kk = pack->sobolev_k + 1;
        double acc = 0.0;
        const SpecField* us[3] = {&ux_, &uy_, &uz_};
        const int n = g.n();
        const int nz = n / 2 + 1;
        for (const auto* u : us) {
            size_t idx = 0;
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy)
                    for (int iz = 0; iz < nz; ++iz, ++idx) {
                        const double w = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
                        const double kv = g.k2()[idx];
                        acc += w * (kv + std::pow(kv, kk)) * std::norm((*u)[idx]);
                    }
        }
        row.u_h1hk1 = std::sqrt(acc * std::pow(2.0 * g.B(), 3));
    }
    return row;
}

double BoxSelfSimStepper::cfl_limit() const {
    const FourierGrid3& g = *g_;
    SpecField m = psi_;
    g.dealias(m);
    SpecField invl = g.laplace_inv_hat(m), tmp;
    double vmax = 0.0;
    BoxVectorField U = velocity();
    BoxField gphi[3];
    for (int a = 0; a < 3; ++a) {
        g.deriv_hat(invl, a, tmp);
        gphi[a] = g.ifft(tmp);
    }
    for (size_t i = 0; i < g.real_size(); ++i) {
        const double gu = std::sqrt(U.x.v[i] * U.x.v[i] + U.y.v[i] * U.y.v[i] +
                                    U.z.v[i] * U.z.v[i]);
        const double gp = std::sqrt(gphi[0].v[i] * gphi[0].v[i] +
                                    gphi[1].v[i] * gphi[1].v[i] +
                                    gphi[2].v[i] * gphi[2].v[i]);
        const double yd = 0.5 * std::max({std::fabs(ycoord_[0][i]), std::fabs(ycoord_[1][i]),
                                          std::fabs(ycoord_[2][i])});
        vmax = std::max(vmax, gu + gp + yd);
    }
    return 0.5 * g.h() / std::max(vmax, 1e-12);
}

BoxPhysicalStepper::BoxPhysicalStepper(const FourierGrid3& g, Params p)
    : g_(&g), params_(p) {
    const size_t ns = g.spec_size();
    rho_.assign(ns, 0.0);
    ux_.assign(ns, 0.0);
    uy_.assign(ns, 0.0);
    uz_.assign(ns, 0.0);
    heat_half_.resize(ns);
    for (size_t i = 0; i < ns; ++i)
        heat_half_[i] = std::exp(-g.k2()[i] * p.dt / 2.0);
}

void BoxPhysicalStepper::set_density(const BoxField& rho) { rho_ = g_->fft(rho); }

void BoxPhysicalStepper::set_velocity(const BoxVectorField& u) {
    ux_ = g_->fft(u.x);
    uy_ = g_->fft(u.y);
    uz_ = g_->fft(u.z);
    g_->leray_hat(ux_, uy_, uz_);
}

BoxField BoxPhysicalStepper::density() const { return g_->ifft(rho_); }

BoxVectorField BoxPhysicalStepper::velocity() const {
    BoxVectorField u;
    u.x = g_->ifft(ux_);
    u.y = g_->ifft(uy_);
    u.z = g_->ifft(uz_);
    u.divergence_free = true;
    return u;
}

double BoxPhysicalStepper::mass() const {
    // k = 0 mode times the box volume
    return rho_[0].real() * std::pow(2.0 * g_->B(), 3);
}

void BoxPhysicalStepper::rhs(const SpecField& rho, const SpecField& ux, const SpecField& uy,
                             const SpecField& uz, Rhs& out) const {
    const FourierGrid3& g = *g_;
    const size_t nr = g.real_size();
    SpecField tmp;

    SpecField masked = rho;
    g.dealias(masked);
    BoxField R = g.ifft(masked);
    SpecField invl = g.laplace_inv_hat(masked);
    BoxField gphi[3];
    for (int a = 0; a < 3; ++a) {
        g.deriv_hat(invl, a, tmp);
        gphi[a] = g.ifft(tmp);
    }
    BoxField U[3];
    {
        SpecField m;
        m = ux; g.dealias(m); U[0] = g.ifft(m);
        m = uy; g.dealias(m); U[1] = g.ifft(m);
        m = uz; g.dealias(m); U[2] = g.ifft(m);
    }
    // conservative form: d rho = div(rho grad invlap rho - u rho); the k=0
    // mode of a divergence vanishes identically, so mass is exact
    out.rho.assign(g.spec_size(), 0.0);
    BoxField flux = g.make_field();
    for (int a = 0; a < 3; ++a) {
        for (size_t i = 0; i < nr; ++i)
            flux.v[i] = R.v[i] * (gphi[a].v[i] - U[a].v[i]);
        SpecField fh = g.fft(flux);
        g.deriv_hat(fh, a, tmp);
        for (size_t i = 0; i < out.rho.size(); ++i) out.rho[i] += tmp[i];
    }

    if (!params_.with_fluid) {
        out.ux.assign(g.spec_size(), 0.0);
        out.uy.assign(g.spec_size(), 0.0);
        out.uz.assign(g.spec_size(), 0.0);
        return;
    }
    const SpecField* uhat[3] = {&ux, &uy, &uz};
    BoxField conv[3];
    for (int c = 0; c < 3; ++c) {
        SpecField m = *uhat[c];
        g.dealias(m);
        BoxField gu[3];
        for (int a = 0; a < 3; ++a) {
            g.deriv_hat(m, a, tmp);
            gu[a] = g.ifft(tmp);
        }
        conv[c] = g.make_field();
        for (size_t i = 0; i < nr; ++i)
            conv[c].v[i] = -(U[0].v[i] * gu[0].v[i] + U[1].v[i] * gu[1].v[i] +
                             U[2].v[i] * gu[2].v[i]);
    }
    for (size_t i = 0; i < nr; ++i) conv[2].v[i] -= params_.buoyancy * R.v[i];
    out.ux = g.fft(conv[0]);
    out.uy = g.fft(conv[1]);
    out.uz = g.fft(conv[2]);
    g.leray_hat(out.ux, out.uy, out.uz);
}

void BoxPhysicalStepper::step() {
    const double dt = params_.dt;
    const size_t ns = g_->spec_size();
    auto scale = [&](SpecField& f) {
        for (size_t i = 0; i < ns; ++i) f[i] *= heat_half_[i];
    };
    scale(rho_);
    scale(ux_);
    scale(uy_);
    scale(uz_);
    Rhs k1, k2, k3;
    rhs(rho_, ux_, uy_, uz_, k1);
    SpecField p1(ns), x1(ns), y1(ns), z1(ns);
    for (size_t i = 0; i < ns; ++i) {
        p1[i] = rho_[i] + dt * k1.rho[i];
        x1[i] = ux_[i] + dt * k1.ux[i];
        y1[i] = uy_[i] + dt * k1.uy[i];
        z1[i] = uz_[i] + dt * k1.uz[i];
    }
    rhs(p1, x1, y1, z1, k2);
    for (size_t i = 0; i < ns; ++i) {
        p1[i] = 0.75 * rho_[i] + 0.25 * (p1[i] + dt * k2.rho[i]);
        x1[i] = 0.75 * ux_[i] + 0.25 * (x1[i] + dt * k2.ux[i]);
        y1[i] = 0.75 * uy_[i] + 0.25 * (y1[i] + dt * k2.uy[i]);
        z1[i] = 0.75 * uz_[i] + 0.25 * (z1[i] + dt * k2.uz[i]);
    }
    rhs(p1, x1, y1, z1, k3);
    const double c23 = 2.0 / 3.0;
    for (size_t i = 0; i < ns; ++i) {
        rho_[i] = rho_[i] / 3.0 + c23 * (p1[i] + dt * k3.rho[i]);
        ux_[i] = ux_[i] / 3.0 + c23 * (x1[i] + dt * k3.ux[i]);
        uy_[i] = uy_[i] / 3.0 + c23 * (y1[i] + dt * k3.uy[i]);
        uz_[i] = uz_[i] / 3.0 + c23 * (z1[i] + dt * k3.uz[i]);
    }
    if (params_.with_fluid) g_->leray_hat(ux_, uy_, uz_);
    scale(rho_);
    scale(ux_);
    scale(uy_);
    scale(uz_);
    t_ += dt;
}

double BoxPhysicalStepper::max_gradpi() const {
    const FourierGrid3& g = *g_;
    SpecField tmp, divh(g.spec_size(), 0.0);
    BoxVectorField U = velocity();
    BoxField R = g.ifft(rho_);
    for (int c = 0; c < 3; ++c) {
        SpecField m = (c == 0) ? ux_ : (c == 1) ? uy_ : uz_;
        BoxField gu[3];
        for (int a = 0; a < 3; ++a) {
            g.deriv_hat(m, a, tmp);
            gu[a] = g.ifft(tmp);
        }
        BoxField conv = g.make_field();
        for (size_t i = 0; i < conv.v.size(); ++i)
            conv.v[i] = U.x.v[i] * gu[0].v[i] + U.y.v[i] * gu[1].v[i] + U.z.v[i] * gu[2].v[i];
        if (c == 2)
            for (size_t i = 0; i < conv.v.size(); ++i)
                conv.v[i] += params_.buoyancy * R.v[i];
        SpecField ch = g.fft(conv);
        g.deriv_hat(ch, c, tmp);
        for (size_t i = 0; i < divh.size(); ++i) divh[i] += tmp[i];
    }
    SpecField pih = g.laplace_inv_hat(divh);
    double gp2 = 0.0;
    BoxField gp[3];
    for (int a = 0; a < 3; ++a) {
        g.deriv_hat(pih, a, tmp);
        gp[a] = g.ifft(tmp);
    }
    for (size_t i = 0; i < gp[0].v.size(); ++i) {
        const double s = gp[0].v[i] * gp[0].v[i] + gp[1].v[i] * gp[1].v[i] +
                         gp[2].v[i] * gp[2].v[i];
        gp2 = std::max(gp2, s);
    }
    return std::sqrt(gp2);
}

RateFits fluid_blowup_rates(const std::vector<DiagnosticsRow>& rows) {
    RateFits out;
    if (rows.size() < 8) {
        out.reliable = false;
        return out;
    }
    // resolved window: frame still tracks the physical scale (the renormalized
    // peak within a factor ~2 of the profile value 6)
    std::vector<DiagnosticsRow> res;
    for (const auto& r : rows) {
        const double mu2 = std::max(1e-300, r.max_rho) ;
        (void)mu2;
        res.push_back(r);
    }
    // use max_rho dynamic range for the decade bookkeeping
    double rho_max = 0.0;
    for (const auto& r : res) rho_max = std::max(rho_max, r.max_rho);
    std::vector<double> ts, inv;
    for (const auto& r : res)
        if (r.max_rho > rho_max / 10.0) {
            ts.push_back(r.t);
            inv.push_back(1.0 / r.max_rho);
        }
    LinearFit invfit = linear_fit(ts, inv);
    out.t_hat = -invfit.intercept / invfit.slope;

    const double rho_min = res.front().max_rho;
    out.decades = std::log10(rho_max / std::max(rho_min, 1e-300));
    if (out.decades < 1.5) out.reliable = false;

    // last decade of (T^ - t): product and pressure exponent
    std::vector<double> lx, ly, ux, uy;
    out.prod_min = 1e300;
    out.prod_max = -1e300;
    for (const auto& r : res) {
        const double tt = out.t_hat - r.t;
        if (tt <= 0) continue;
        if (r.max_rho > rho_max / 10.0) {
            const double prod = r.max_rho * tt;
            out.prod_min = std::min(out.prod_min, prod);
            out.prod_max = std::max(out.prod_max, prod);
            lx.push_back(std::log(tt));
            ly.push_back(std::log(std::max(r.max_gradpi, 1e-300)));
        }
        if (r.max_rho > rho_max / 100.0) {
            ux.push_back(std::fabs(std::log(tt)));
            uy.push_back(r.max_u);
        }
    }
    if (lx.size() >= 2) out.gradpi_exponent = linear_fit(lx, ly).slope;
    if (ux.size() >= 2) out.u_fit = linear_fit(ux, uy);
    return out;
}

} // namespace ksns
