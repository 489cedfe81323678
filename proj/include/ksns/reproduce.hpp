#pragma once

#include "ksns/config.hpp"
#include "ksns/dynamics_box.hpp"
#include "ksns/dynamics_radial.hpp"
#include "ksns/spectral.hpp"

#include <memory>
#include <string>

namespace ksns {
namespace reproduce {

/// Radial stability experiment (pure Keller-Segel, sector 0): the paper's
/// initial datum with the unstable coefficient selected by bisection, four
/// bootstrap bounds monitored, plus a wrong-sign control run.
struct RadialStabilityResult {
    double delta_g = 0.0;
    DeltaBudget budget;
    ShootResult shoot;
    BootstrapReport report;
    double fitted_eps_decay = 0.0;   // exponent of ||eps_s||_Hk over tau >= 1
    bool wrong_sign_exited = false;
    double wrong_sign_flux = 0.0;    // d/dtau e^{(7/5) dg tau} ||.||^2 at exit
    std::vector<DiagnosticsRow> diag_rows;
};

RadialStabilityResult radial_stability(const Config& cfg);

/// Coupled 3D experiment in the self-similar frame reproducing the fluid
/// blowup rates. The unstable (blowup-time) coefficient is seeded from radial
/// shooting and refined by short probe runs that fit the e^tau growth of the
/// box unstable coefficient.
struct AppendixBResult {
    RateFits fits;
    std::vector<DiagnosticsRow> rows;
    double a1 = 0.0;
    int probes = 0;
    double leray_origin = 0.0;       // third component of P(Q e3) at y = 0
    double min_rho_ratio = 0.0;      // min rho / max rho over the run
};

AppendixBResult appendix_b(const Config& cfg, const std::string& out_dir);

/// Well-posedness embodiment: physical-frame mass conservation and
/// non-negativity, and the physical/self-similar frame consistency check.
struct WellPosednessResult {
    double mass_drift_per_step = 0.0;    // relative
    double min_rho_ratio = 0.0;          // min rho / max rho (>= -1e-8 wanted)
    double frame_rel_err = 0.0;          // cross-frame comparison
};

WellPosednessResult well_posedness(const Config& cfg);

/// Shared helpers for box initial data.
BoxField cutoff_profile_density(const FourierGrid3& g, double R0);
BoxVectorField smooth_divfree_velocity(const FourierGrid3& g, double mu0,
                                       double amplitude, double sigma);

/// Radial unstable machinery bundle reused across experiments.
struct RadialMachinery {
    std::unique_ptr<RadialGrid> grid;
    SpectralDecomposition decomp;
    ModifiedUnstableSpace mod;
    int mode_index = -1; // radial unstable mode
};

std::unique_ptr<RadialMachinery> make_radial_machinery(int n, int k, double r_mod);

/// Transfer the radial modified mode and its dual to the box, renormalized so
/// the box pairing is exactly biorthonormal there.
BoxModePack make_box_mode_pack(const RadialMachinery& m, const FourierGrid3& g);

} // namespace reproduce
} // namespace ksns
