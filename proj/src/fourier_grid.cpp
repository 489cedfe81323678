#include "ksns/fourier_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ksns {

FourierGrid3::FourierGrid3(int n, double B) : n_(n), B_(B) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("FourierGrid3: need even n >= 4");
    if (B <= 0) throw std::invalid_argument("FourierGrid3: need B > 0");
    k1_.resize(n);
    const double dk = M_PI / B;
    for (int i = 0; i < n; ++i) k1_[i] = dk * (i <= n / 2 ? i : i - n);
    k1_[n / 2] = dk * (n / 2); // fully symmetric fields: Nyquist sign immaterial

    const int nz = n / 2 + 1;
    k2_.resize(spec_size());
    mask_.resize(spec_size());
    const double kcut = (2.0 / 3.0) * dk * (n / 2);
    size_t idx = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < nz; ++iz, ++idx) {
                const double kx = k1_[ix], ky = k1_[iy], kz = dk * iz;
                k2_[idx] = kx * kx + ky * ky + kz * kz;
                mask_[idx] = (std::fabs(kx) <= kcut && std::fabs(ky) <= kcut &&
                              std::fabs(kz) <= kcut)
                                 ? 1
                                 : 0;
            }

    work_real_ = fftw_alloc_real(real_size());
    work_spec_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spec_size()));
    plan_fwd_ = fftw_plan_dft_r2c_3d(n, n, n, work_real_,
                                     reinterpret_cast<fftw_complex*>(work_spec_),
                                     FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r_3d(n, n, n,
                                     reinterpret_cast<fftw_complex*>(work_spec_),
                                     work_real_, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("FourierGrid3: fftw plan failed");
}

FourierGrid3::~FourierGrid3() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(work_real_);
    fftw_free(work_spec_);
}

BoxField FourierGrid3::make_field() const {
    BoxField f;
    f.n = n_;
    f.B = B_;
    f.v.assign(real_size(), 0.0);
    return f;
}

SpecField FourierGrid3::fft(const BoxField& f) const {
    std::memcpy(work_real_, f.v.data(), real_size() * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    SpecField out(spec_size());
    const double scale = 1.0 / static_cast<double>(real_size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = work_spec_[i] * scale;
    return out;
}

BoxField FourierGrid3::ifft(const SpecField& fh) const {
    std::memcpy(work_spec_, fh.data(), spec_size() * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    BoxField out = make_field();
    std::memcpy(out.v.data(), work_real_, real_size() * sizeof(double));
    return out;
}

void FourierGrid3::deriv_hat(const SpecField& fh, int axis, SpecField& out) const {
    out.resize(spec_size());
    const int nz = n_ / 2 + 1;
    const double dk = M_PI / B_;
    size_t idx = 0;
    for (int ix = 0; ix < n_; ++ix) {
        const double kx = k1_[ix];
        for (int iy = 0; iy < n_; ++iy) {
            const double ky = k1_[iy];
            for (int iz = 0; iz < nz; ++iz, ++idx) {
                const double k = (axis == 0) ? kx : (axis == 1) ? ky : dk * iz;
                out[idx] = std::complex<double>(0.0, k) * fh[idx];
            }
        }
    }
}

SpecField FourierGrid3::laplace_inv_hat(const SpecField& fh) const {
    SpecField out(spec_size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = (k2_[i] > 0.0) ? -fh[i] / k2_[i] : 0.0;
    return out;
}

void FourierGrid3::dealias(SpecField& fh) const {
    for (size_t i = 0; i < fh.size(); ++i)
        if (!mask_[i]) fh[i] = 0.0;
}

void FourierGrid3::leray_hat(SpecField& ux, SpecField& uy, SpecField& uz) const {
    const int nz = n_ / 2 + 1;
    const double dk = M_PI / B_;
    size_t idx = 0;
    for (int ix = 0; ix < n_; ++ix) {
        const double kx = k1_[ix];
        for (int iy = 0; iy < n_; ++iy) {
            const double ky = k1_[iy];
            for (int iz = 0; iz < nz; ++iz, ++idx) {
                const double kz = dk * iz;
                const double kk = k2_[idx];
                if (kk == 0.0) continue; // mean flow passes through
                const std::complex<double> div =
                    kx * ux[idx] + ky * uy[idx] + kz * uz[idx];
                const std::complex<double> c = div / kk;
                ux[idx] -= kx * c;
                uy[idx] -= ky * c;
                uz[idx] -= kz * c;
            }
        }
    }
}

BoxVectorField FourierGrid3::leray_project(const BoxVectorField& u) const {
    SpecField ux = fft(u.x), uy = fft(u.y), uz = fft(u.z);
    leray_hat(ux, uy, uz);
    BoxVectorField out;
    out.x = ifft(ux);
    out.y = ifft(uy);
    out.z = ifft(uz);
    out.divergence_free = true;
    return out;
}

double FourierGrid3::max_divergence(const BoxVectorField& u) const {
    SpecField ux = fft(u.x), uy = fft(u.y), uz = fft(u.z), d;
    SpecField div(spec_size());
    deriv_hat(ux, 0, d);
    for (size_t i = 0; i < div.size(); ++i) div[i] = d[i];
    deriv_hat(uy, 1, d);
    for (size_t i = 0; i < div.size(); ++i) div[i] += d[i];
    deriv_hat(uz, 2, d);
    for (size_t i = 0; i < div.size(); ++i) div[i] += d[i];
    BoxField dv = ifft(div);
    double m = 0.0;
    for (double x : dv.v) m = std::max(m, std::fabs(x));
    return m;
}

double FourierGrid3::eval_at(const SpecField& fh, const Eigen::Vector3d& p) const {
    // separable evaluation: sum_k fh_k exp(i k . p), honoring r2c symmetry
    const int nz = n_ / 2 + 1;
    const double dk = M_PI / B_;
    std::vector<std::complex<double>> ex(n_), ey(n_), ez(nz);
    for (int i = 0; i < n_; ++i) {
        ex[i] = std::polar(1.0, k1_[i] * p.x());
        ey[i] = std::polar(1.0, k1_[i] * p.y());
    }
    for (int iz = 0; iz < nz; ++iz) ez[iz] = std::polar(1.0, dk * iz * p.z());
    double acc = 0.0;
    size_t idx = 0;
    for (int ix = 0; ix < n_; ++ix)
        for (int iy = 0; iy < n_; ++iy) {
            const std::complex<double> exy = ex[ix] * ey[iy];
            for (int iz = 0; iz < nz; ++iz, ++idx) {
                const double w = (iz == 0 || iz == n_ / 2) ? 1.0 : 2.0;
                // real-field symmetry: conj modes add the complex conjugate
                acc += w * (exy * ez[iz] * fh[idx]).real();
            }
        }
    return acc;
}

} // namespace ksns
