#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace twophase {

// Periodic cube [-L, L)^3 with n points per axis; wavenumbers pi k / L, k in [-n/2, n/2).
class FrequencyGrid {
public:
    FrequencyGrid(int n, double half_width);

    int n() const noexcept { return n_; }
    double half_width() const noexcept { return L_; }
    double spacing() const noexcept { return 2.0 * L_ / n_; }
    double nyquist() const noexcept;
    double wavenumber(int k) const noexcept;
    // FFT storage index -> signed k
    int signed_index(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
    double coordinate(int i) const noexcept { return -L_ + i * spacing(); }
    std::size_t size() const noexcept { return std::size_t(n_) * n_ * n_; }
    std::size_t half_size() const noexcept { return std::size_t(n_) * n_ * (n_ / 2 + 1); }
    double cell_volume() const noexcept { return spacing() * spacing() * spacing(); }
    double volume() const noexcept { return 8.0 * L_ * L_ * L_; }

    bool resolves(double eta2) const noexcept { return nyquist() >= eta2; }
    bool wrap_safe(double c, double t_max, double pad) const noexcept { return L_ >= c * t_max + pad; }

private:
    int n_;
    double L_;
};

// Real field on the lattice, natural order: value(i,j,k) at (x_i, x_j, x_k), index (i*n + j)*n + k.
struct SpatialField {
    FrequencyGrid grid;
    std::vector<double> values;
    std::string tag;
    double time = 0.0;
    double sigma = 0.0;
    double imag_residual = 0.0;
    bool wrap_warning = false;

    explicit SpatialField(const FrequencyGrid& g) : grid(g), values(g.size(), 0.0) {}

    std::size_t index(int i, int j, int k) const noexcept { return (std::size_t(i) * grid.n() + j) * grid.n() + k; }
    double operator()(int i, int j, int k) const noexcept { return values[index(i, j, k)]; }
    double max_abs() const;
    double integral() const;
};

void set_fft_threads(int threads);

// Unnormalized 3-D real transforms with FFTW; owns aligned buffers and plans.
class RealFft3 {
public:
    explicit RealFft3(int n);
    ~RealFft3();
    RealFft3(const RealFft3&) = delete;
    RealFft3& operator=(const RealFft3&) = delete;

    // half-spectrum layout: (kx, ky, kz) with kz in [0, n/2], index (i*n + j)*(n/2+1) + kz
    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    void backward(std::span<const std::complex<double>> in, std::span<double> out);

    int n() const noexcept { return n_; }

private:
    struct Impl;
    int n_;
    std::unique_ptr<Impl> impl_;
};

// Shell averages over bins of width dr around the origin cell (x = 0 sits at index n/2).
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> value;
    std::vector<int> count;
};
RadialProfile radial_average(const SpatialField& f, double dr, double r_max);

// max |imag| / max |real| of the full complex inverse transform of a lattice spectrum
double imaginary_residual(int n, std::span<const std::complex<double>> full_spectrum);

}  // namespace twophase
