#include "ksns/transfer.hpp"
#include "ksns/semigroup.hpp"

#include <cmath>
#include <stdexcept>

namespace ksns {

namespace {

// associated Legendre P_l^m(x) without Condon-Shortley phase
double assoc_legendre_plain(int ell, int m, double x) {
    double pmm = 1.0;
    if (m > 0) {
        const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
        double fact = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= fact * somx2;
            fact += 2.0;
        }
    }
    if (ell == m) return pmm;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (ell == m + 1) return pmmp1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= ell; ++ll) {
        pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

double norm_klm(int ell, int m) {
    double num = (2.0 * ell + 1.0) / (4.0 * M_PI);
    for (int i = ell - m + 1; i <= ell + m; ++i) num /= i;
    return std::sqrt(num);
}

} // namespace

double real_sph_harm(int ell, int m, const Eigen::Vector3d& dir) {
    if (ell < 0 || std::abs(m) > ell)
        throw std::invalid_argument("real_sph_harm: bad (l, m)");
    const double r = dir.norm();
    if (r == 0.0) return (ell == 0) ? norm_klm(0, 0) : 0.0;
    const double ct = dir.z() / r;
    const double phi = std::atan2(dir.y(), dir.x());
    const int ma = std::abs(m);
    const double p = assoc_legendre_plain(ell, ma, ct);
    if (m == 0) return norm_klm(ell, 0) * p;
    const double k = std::sqrt(2.0) * norm_klm(ell, ma);
    return (m > 0) ? k * p * std::cos(ma * phi) : k * p * std::sin(ma * phi);
}

BoxField transfer_radial_to_box(const ScalarField& f, int m, const FourierGrid3& g3) {
    BoxField out = g3.make_field();
    const RadialGrid& g = *f.grid;
    const int n = g3.n();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const Eigen::Vector3d p(g3.coord(ix), g3.coord(iy), g3.coord(iz));
                const double r = p.norm();
                const double fr = (r <= g.r_max()) ? g.interp(f.values, r) : 0.0;
                out.at(ix, iy, iz) = fr * real_sph_harm(f.ell, m, p);
            }
    return out;
}

double project_shell(const FourierGrid3& g3, const SpecField& fh, int ell, int m,
                     double r, int n_theta, int n_phi) {
    std::vector<double> gx, gw;
    gauss_legendre(n_theta, gx, gw);
    double acc = 0.0;
    for (int it = 0; it < n_theta; ++it) {
        const double ct = gx[it];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int ip = 0; ip < n_phi; ++ip) {
            const double phi = 2.0 * M_PI * ip / n_phi;
            const Eigen::Vector3d p(r * st * std::cos(phi), r * st * std::sin(phi), r * ct);
            acc += gw[it] * (2.0 * M_PI / n_phi) * g3.eval_at(fh, p) *
                   real_sph_harm(ell, m, p);
        }
    }
    return acc;
}

} // namespace ksns
