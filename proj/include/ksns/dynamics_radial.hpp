#pragma once

#include "ksns/spectral.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ksns {

struct DeltaBudget {
    double d0 = 1e-6, d4 = 1e-4, d3 = 1e-3, d1 = 1e-2, d2 = 3e-2;
    /// true when the asymptotic ordering d0 << d4 << d3 << d1 << d2 holds
    bool ordering_ok() const { return d0 < d4 && d4 < d3 && d3 < d1 && d1 < d2; }
};

struct RadialTrajectoryRow {
    double tau = 0;
    double a_u = 0;          // modified unstable coefficient (single mode)
    double b_norm = 0;       // ||eps~_u||_B~
    double hs_norm = 0;      // ||eps~_s||_{H^k}
    double hs1_norm = 0;     // ||eps~_s||_{Hdot^{k+1}}
    double max_psi = 0;
    double min_psi = 0;
    double mass = 0;         // 4 pi int Psi r^2 dr on the ball
};

/// Pure Keller-Segel dynamics in the self-similar frame on the radial sector
/// l = 0: exact L0 propagator (rescaled heat kernel) Strang-split with an
/// explicit SSP-RK2 nonlinear substep, plus outflow treatment for the ball
/// truncation (power-law continuation of the kernel window, a sponge annulus
/// acting on Psi - Q, and a high-order modal filter).
class RadialSelfSimStepper {
public:
    RadialSelfSimStepper(const RadialGrid& grid, double dt,
                         double sponge_amplitude = 2.0, bool modal_filter = true);

    double dt() const { return dt_; }
    const RadialGrid& grid() const { return *grid_; }

    void step(Eigen::VectorXd& psi) const;

    /// nonlinear term div(psi grad invlap psi) = psi^2 + psi' (invlap psi)'
    Eigen::VectorXd nonlinear(const Eigen::VectorXd& psi) const;

private:
    const RadialGrid* grid_;
    double dt_;
    Eigen::MatrixXd half_prop_;   // exact e^{-dt/2 L0}
    Eigen::MatrixXd poisson_;
    Eigen::MatrixXd d1_;
    Eigen::VectorXd q_, sponge_factor_;
    Eigen::MatrixXd filter_;
    bool use_filter_;
};

struct ShootConfig {
    double tau_end = 8.0;
    double dt = 0.004;
    double R0 = 15.0;          // initial-data cutoff radius
    double bracket = 1e-2;     // initial coefficient bracket half-width
    double exit_threshold = 0.5;
    int max_iterations = 48;
    double tol = 1e-12;
    int sample_every = 25;
};

struct ShootResult {
    double a1 = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<RadialTrajectoryRow> trajectory;
    struct Iteration {
        int index;
        double lo, hi;
        int exit_side; // sign of the unstable coefficient at exit
    };
    std::vector<Iteration> bisection_log;
};

/// Paper-style initial datum for the radial shooting problem:
/// Psi_0 = chi_{R0} Q + P~u((1-chi_{R0})Q) + a1 phi~_1.
Eigen::VectorXd shooting_initial_stable_part(const SpectralDecomposition& d,
                                             const ModifiedUnstableSpace& mod,
                                             double R0);

/// Bisection on the single radial unstable coefficient using the exit
/// dichotomy. stable_init is eps~_s(0); throws std::runtime_error when no
/// sign change brackets the stable manifold.
ShootResult shoot_unstable(const SpectralDecomposition& d, const ModifiedUnstableSpace& mod,
                           const RadialGrid& grid, const Eigen::VectorXd& stable_init,
                           const ShootConfig& cfg);

/// Run one trajectory (fixed a1) collecting diagnostics rows.
std::vector<RadialTrajectoryRow>
run_radial_trajectory(const SpectralDecomposition& d, const ModifiedUnstableSpace& mod,
                      const RadialGrid& grid, const Eigen::VectorXd& stable_init,
                      double a1, const ShootConfig& cfg,
                      std::optional<double>* exit_flux = nullptr);

struct BootstrapReport {
    struct Bound {
        const char* name;
        double first_violation = -1.0; // tau, or -1 when the bound holds
        double fitted_exponent = 0.0;
        double required_exponent = 0.0;
    };
    std::vector<Bound> bounds;
    bool all_hold = true;
};

/// Check the four bootstrap bounds against a trajectory; pure reporting.
/// Fluid rows absent in pure-KS runs are treated as identically zero.
BootstrapReport monitor_bootstrap(const std::vector<RadialTrajectoryRow>& rows,
                                  const DeltaBudget& deltas, double delta_g);

} // namespace ksns
