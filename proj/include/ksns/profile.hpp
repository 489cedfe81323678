#pragma once

#include <Eigen/Dense>

namespace ksns {

class RadialGrid;

/// Closed forms around the stationary self-similar density profile
///   Q(y) = 4(6+|y|^2)/(2+|y|^2)^2.
/// All companion fields are exact expressions; the chosen gauge for the
/// inverse Laplacian is inv_lap_q = 2 log(2+|y|^2) (no additive constant),
/// so only gradients of it are physically meaningful.
namespace profile {

enum class Field {
    Q,              // scalar
    GradQ,          // 3-vector
    LambdaQ,        // scalar, 2Q + y.grad Q
    InvLapQ,        // scalar, solves lap F = Q, F(0) = 2 log 2
    GradInvLapQ,    // 3-vector, 4y/(2+|y|^2)
    LerayBuoyancy3, // scalar, third component of P(Q e3)
};

// radial forms, r = |y|
double q(double r);
double dq_dr(double r);
double lambda_q(double r);
double inv_lap_q(double r);
double grad_inv_lap_q_radial(double r); // d/dr of inv_lap_q = 4r/(2+r^2)

double eval_scalar(Field kind, const Eigen::Vector3d& y);
Eigen::Vector3d eval_vector(Field kind, const Eigen::Vector3d& y);

/// Max-norm residual of lap Q + div(Q grad invlap Q) - (1/2) Lambda Q
/// evaluated with the grid's differentiation matrices; the analytic residual
/// vanishes identically, so this measures pure discretization error.
/// Throws std::invalid_argument when the grid is too coarse (n < 8).
double residual(const RadialGrid& grid);

/// Mass of Q inside the ball of radius R via composite Gauss-Legendre
/// quadrature (independent of any RadialGrid). M(R)/R -> 16*pi.
double truncated_mass(double R);

} // namespace profile
} // namespace ksns
