#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ksns {

/// Real scalar field sampled on the periodic box [-B, B)^3, row-major
/// (x fastest ordering: index = (ix*n + iy)*n + iz).
struct BoxField {
    int n = 0;
    double B = 0.0;
    std::vector<double> v;
    double& at(int ix, int iy, int iz) { return v[(static_cast<size_t>(ix) * n + iy) * n + iz]; }
    double at(int ix, int iy, int iz) const { return v[(static_cast<size_t>(ix) * n + iy) * n + iz]; }
};

struct BoxVectorField {
    BoxField x, y, z;
    bool divergence_free = false;
};

using SpecField = std::vector<std::complex<double>>;

/// Periodic pseudo-spectral box: real-to-complex FFTW transforms, wavenumber
/// tables, 2/3-rule dealias mask, inverse Laplacian (zero mode gauged to 0)
/// and the Leray projection. Plans use FFTW_ESTIMATE and a single thread so
/// results are bit-reproducible across runs.
class FourierGrid3 {
public:
    FourierGrid3(int n, double B);
    ~FourierGrid3();
    FourierGrid3(const FourierGrid3&) = delete;
    FourierGrid3& operator=(const FourierGrid3&) = delete;

    int n() const { return n_; }
    double B() const { return B_; }
    double h() const { return 2.0 * B_ / n_; }
    size_t real_size() const { return static_cast<size_t>(n_) * n_ * n_; }
    size_t spec_size() const { return static_cast<size_t>(n_) * n_ * (n_ / 2 + 1); }

    double coord(int i) const { return -B_ + h() * i; }
    double wavenumber(int i) const { return k1_[i]; }

    BoxField make_field() const;
    SpecField fft(const BoxField& f) const;   // forward, unnormalized / n^3
    BoxField ifft(const SpecField& fh) const;

    void deriv_hat(const SpecField& fh, int axis, SpecField& out) const;
    SpecField laplace_inv_hat(const SpecField& fh) const; // zero mode -> 0
    void dealias(SpecField& fh) const;
    void leray_hat(SpecField& ux, SpecField& uy, SpecField& uz) const;
    BoxVectorField leray_project(const BoxVectorField& u) const;

    double max_divergence(const BoxVectorField& u) const;

    const std::vector<double>& k2() const { return k2_; }
    const std::vector<unsigned char>& dealias_mask() const { return mask_; }

    /// Direct spectral evaluation at arbitrary points (test-grade, O(n^3) per
    /// point); exact trigonometric interpolation of the sampled field.
    double eval_at(const SpecField& fh, const Eigen::Vector3d& p) const;

private:
    int n_;
    double B_;
    std::vector<double> k1_, k2_;
    std::vector<unsigned char> mask_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    double* work_real_ = nullptr;
    std::complex<double>* work_spec_ = nullptr;
};

} // namespace ksns
