#pragma once

#include "ksns/fourier_grid.hpp"
#include "ksns/radial_grid.hpp"
#include "ksns/fit.hpp"

#include <functional>
#include <vector>

namespace ksns {

/// Diagnostics row with the simulate CSV column order:
/// tau, t, h_k_stable, b_unstable, u_h1hk1, max_rho, min_rho, max_u,
/// max_gradpi, mass. Physical-frame quantities are reported in physical
/// variables regardless of the integration frame.
struct DiagnosticsRow {
    double tau = 0, t = 0;
    double h_k_stable = 0, b_unstable = 0, u_h1hk1 = 0;
    double max_rho = 0, min_rho = 0, max_u = 0, max_gradpi = 0, mass = 0;
};

/// Radial mode data transferred to the box for unstable-coefficient tracking:
/// the pairing is renormalized on the box so (phi~, psi)_{H^k} = 1 there.
struct BoxModePack {
    SpecField phi_tilde_hat;
    SpecField psi_hat;          // normalized dual
    double b_scale = 1.0;       // ||a phi~||_B~ = b_scale * |a|
    int sobolev_k = 2;
};

/// Coupled Keller-Segel--Navier-Stokes dynamics in the self-similar frame on
/// the periodic box, integrated in perturbation form Psi = Q + eps with the
/// profile fields Q, grad Q, grad invlap Q entering as exact closed forms, so
/// eps = 0, U = 0 is a fixed point of the scheme to roundoff. The diagonal
/// linear part (diffusion plus the amplitude terms of (1/2)Lambda) advances
/// exactly by integrating factor; the scaling drift (1/2) y.grad, the
/// quadratic terms and the buoyancy -mu Psi e3 advance explicitly (SSP-RK3),
/// with the pressure eliminated by Leray projection. A sponge annulus near the
/// box faces absorbs the outward drift flux that periodicity would otherwise
/// wrap around.
class BoxSelfSimStepper {
public:
    struct Params {
        double mu0 = 0.05;
        double dt = 0.006;
        double sponge_amplitude = 2.0;
        bool with_fluid = true;
        int sponge_every = 1;
    };

    BoxSelfSimStepper(const FourierGrid3& g, Params p);

    /// state ingest: either the perturbation or the full density
    void set_epsilon(const BoxField& eps);
    void set_density(const BoxField& psi);
    void set_velocity(const BoxVectorField& u);

    void step();                       // advances tau by dt
    double tau() const { return tau_; }
    double mu() const { return params_.mu0 * std::exp(-tau_ / 2.0); }

    BoxField epsilon() const { return g_->ifft(eps_); }
    BoxField density() const;          // Q + eps
    BoxVectorField velocity() const;
    const SpecField& epsilon_hat() const { return eps_; }
    const BoxField& profile_field() const { return qb_; }

    double unstable_coefficient(const BoxModePack& pack) const;
    DiagnosticsRow diagnostics(const BoxModePack* pack) const;

    /// advective CFL estimate: 0.5 h / max(|U| + |grad invlap Psi| + |y|/2)
    double cfl_limit() const;

    const FourierGrid3& grid() const { return *g_; }

private:
    struct Rhs {
        SpecField eps;
        SpecField ux, uy, uz;
    };
    void rhs(const SpecField& eps, const SpecField& ux, const SpecField& uy,
             const SpecField& uz, double mu_mid, Rhs& out) const;
    void apply_sponge();

    const FourierGrid3* g_;
    Params params_;
    double tau_ = 0.0;
    long step_count_ = 0;
    SpecField eps_, ux_, uy_, uz_;
    std::vector<double> if_eps_half_, if_u_half_;
    std::vector<double> sponge_;
    std::vector<double> ycoord_[3];
    BoxField qb_;                  // Q sampled
    BoxField gq_[3], fq_[3];       // grad Q, grad invlap Q closed forms
};

/// Physical-frame KS-NS on the box (Duhamel embodiment): exact heat
/// propagator for the stiff part, dealiased divergence-form transport so the
/// density mass is conserved to roundoff, Leray projection for the momentum
/// equation.
class BoxPhysicalStepper {
public:
    struct Params {
        double dt = 1e-3;
        bool with_fluid = true;
        double buoyancy = 1.0; // coefficient of -rho e3 forcing
    };

    BoxPhysicalStepper(const FourierGrid3& g, Params p);

    void set_density(const BoxField& rho);
    void set_velocity(const BoxVectorField& u);
    void step();
    double time() const { return t_; }

    BoxField density() const;
    BoxVectorField velocity() const;
    double mass() const; // int rho dx
    double max_gradpi() const;

private:
    struct Rhs {
        SpecField rho, ux, uy, uz;
    };
    void rhs(const SpecField& rho, const SpecField& ux, const SpecField& uy,
             const SpecField& uz, Rhs& out) const;

    const FourierGrid3* g_;
    Params params_;
    double t_ = 0.0;
    SpecField rho_, ux_, uy_, uz_;
    std::vector<double> heat_half_;
};

struct RateFits {
    double t_hat = 0.0;            // blowup time from the 1/max_rho fit
    double decades = 0.0;          // resolved dynamic range used for fits
    double prod_min = 0.0, prod_max = 0.0; // max_rho (T^ - t) over last decade
    double gradpi_exponent = 0.0;
    LinearFit u_fit;               // max_u against |log(T^-t)|
    bool reliable = true;          // false when < 1.5 decades resolved
};

/// Appendix-style rate fits from a physical-frame diagnostics series.
RateFits fluid_blowup_rates(const std::vector<DiagnosticsRow>& rows);

} // namespace ksns
