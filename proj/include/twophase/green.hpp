#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "twophase/grid.hpp"
#include "twophase/quadrature.hpp"
#include "twophase/spectral.hpp"

namespace twophase {

// e^{tA(xi)} e^{-sigma^2 |xi|^2 / 2}
CMat8 green_symbol(const DerivedParams& dp, const Vec3& xi, double t, double sigma);

// One scalar entry of a Green block; i, j pick the vector components of m or w blocks.
struct GreenComponent {
    GreenBlockSelector sel{Block::rho, Block::rho};
    int i = 0;
    int j = 0;
};
std::string component_tag(const GreenComponent& c);
GreenComponent parse_component(const std::string& tag);

// symbol entry rebuilt from the axial blocks for direction dir
cd green_entry(const AxialPropagator& ap, const GreenComponent& c, const Vec3& dir);

// Axial propagators for every distinct integer |k|^2 on the lattice.
class AxialCache {
public:
    AxialCache(const DerivedParams& dp, const FrequencyGrid& grid, double t);
    const AxialPropagator& at(int k2) const { return table_[k2]; }
    double time() const noexcept { return t_; }

private:
    double t_;
    std::vector<AxialPropagator> table_;
};

struct SynthesisOptions {
    // also form the full complex inverse transform and record its imaginary residual
    bool check_real = false;
};

using LatticeSymbol = std::function<cd(int kx, int ky, int kz, const Vec3& xi)>;

// Inverse DFT of a Hermitian symbol sampled on the lattice (signed k), field in natural order.
SpatialField synthesize_symbol(const FrequencyGrid& grid, const LatticeSymbol& symbol, const std::string& tag,
                               const SynthesisOptions& opt = {});

bool wrap_hazard(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma, double support = 0.0);

SpatialField synthesize(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma,
                        const GreenComponent& c, const SynthesisOptions& opt = {});
std::vector<SpatialField> synthesize(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma,
                                     std::span<const GreenComponent> cs, const SynthesisOptions& opt = {});

// Longitudinal part of G_{row, m_j} - G_{row, w_j}; for a vector row, component (i, j).
SpatialField column_difference(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma,
                               Block row, int i, int j, const SynthesisOptions& opt = {});

struct OracleOptions {
    double abs_tol = 1e-8;
    int panels = 32;
    int max_refinements = 5;
    // Gaussian tail cut: integrate while e^{-sigma^2 rho^2 / 2} > e^{-cut}
    double cut = 40.0;
    double rho_max = 60.0;
};

struct OracleResult {
    std::vector<double> r;
    std::vector<double> value;
    double error = 0.0;
};

// Radial profile of a Green entry from one-dimensional quadrature of the compressible propagator.
// Scalar pairs give g(r); scalar-vector pairs give h(r) with G_{a, b_j}(x) = h(r) x_j / r.
OracleResult radial_oracle(const DerivedParams& dp, GreenBlockSelector sel, std::span<const double> radii, double t,
                           double sigma, const OracleOptions& opt = {});

// Little-endian dump: "TPGF", u32 version, i32 n, f64 L, f64 t, f64 sigma, u32 tag length, tag bytes,
// then n^3 f64 values in row-major (i, j, k) order.
void write_field(std::ostream& os, const SpatialField& f);
SpatialField read_field(std::istream& is);

}  // namespace twophase
