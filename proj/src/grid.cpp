#include "twophase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace twophase {

FrequencyGrid::FrequencyGrid(int n, double half_width) : n_(n), L_(half_width)
{
    if (n < 32 || n % 2 != 0) throw std::invalid_argument("grid: n must be even and >= 32");
    if (!(half_width > 0.0)) throw std::invalid_argument("grid: L must be positive");
}

double FrequencyGrid::nyquist() const noexcept { return std::numbers::pi * n_ / (2.0 * L_); }

double FrequencyGrid::wavenumber(int k) const noexcept { return std::numbers::pi * k / L_; }

double SpatialField::max_abs() const
{
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double SpatialField::integral() const
{
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

RadialProfile radial_average(const SpatialField& f, double dr, double r_max)
{
    if (!(dr > 0.0)) throw std::invalid_argument("radial_average: dr must be positive");
    const int n = f.grid.n();
    const int nb = int(std::ceil(r_max / dr));
    std::vector<double> sum(nb, 0.0), rsum(nb, 0.0);
    std::vector<int> cnt(nb, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x = f.grid.coordinate(i), y = f.grid.coordinate(j), z = f.grid.coordinate(k);
                const double r = std::sqrt(x * x + y * y + z * z);
                const int b = int(r / dr);
                if (b >= nb) continue;
                sum[b] += f(i, j, k);
                rsum[b] += r;
                ++cnt[b];
            }
    RadialProfile p;
    for (int b = 0; b < nb; ++b) {
        if (cnt[b] == 0) continue;
        p.r.push_back(rsum[b] / cnt[b]);
        p.value.push_back(sum[b] / cnt[b]);
        p.count.push_back(cnt[b]);
    }
    return p;
}

void set_fft_threads(int threads)
{
    static bool init = false;
    if (!init) {
        fftw_init_threads();
        init = true;
    }
    fftw_plan_with_nthreads(std::max(1, threads));
}

struct RealFft3::Impl {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::size_t nreal = 0;
    std::size_t ncplx = 0;

    ~Impl()
    {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
};

RealFft3::RealFft3(int n) : n_(n), impl_(std::make_unique<Impl>())
{
    impl_->nreal = std::size_t(n) * n * n;
    impl_->ncplx = std::size_t(n) * n * (n / 2 + 1);
    impl_->real = fftw_alloc_real(impl_->nreal);
    impl_->cplx = fftw_alloc_complex(impl_->ncplx);
    if (!impl_->real || !impl_->cplx) throw std::bad_alloc();
    impl_->fwd = fftw_plan_dft_r2c_3d(n, n, n, impl_->real, impl_->cplx, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_c2r_3d(n, n, n, impl_->cplx, impl_->real, FFTW_ESTIMATE);
}

RealFft3::~RealFft3() = default;

void RealFft3::forward(std::span<const double> in, std::span<std::complex<double>> out)
{
    if (in.size() != impl_->nreal || out.size() != impl_->ncplx) throw std::invalid_argument("fft: size mismatch");
    std::memcpy(impl_->real, in.data(), in.size_bytes());
    fftw_execute(impl_->fwd);
    std::memcpy(static_cast<void*>(out.data()), impl_->cplx, out.size_bytes());
}

void RealFft3::backward(std::span<const std::complex<double>> in, std::span<double> out)
{
    if (out.size() != impl_->nreal || in.size() != impl_->ncplx) throw std::invalid_argument("fft: size mismatch");
    std::memcpy(static_cast<void*>(impl_->cplx), in.data(), in.size_bytes());
    fftw_execute(impl_->bwd);
    std::memcpy(out.data(), impl_->real, out.size_bytes());
}

double imaginary_residual(int n, std::span<const std::complex<double>> full)
{
    const std::size_t total = std::size_t(n) * n * n;
    if (full.size() != total) throw std::invalid_argument("imaginary_residual: size mismatch");
    fftw_complex* buf = fftw_alloc_complex(total);
    std::memcpy(static_cast<void*>(buf), full.data(), full.size_bytes());
    fftw_plan p = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        re = std::max(re, std::abs(buf[i][0]));
        im = std::max(im, std::abs(buf[i][1]));
    }
    fftw_destroy_plan(p);
    fftw_free(buf);
    return re > 0.0 ? im / re : im;
}

}  // namespace twophase
