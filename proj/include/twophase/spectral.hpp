#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twophase/model.hpp"

namespace twophase {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using CMat2 = Eigen::Matrix<cd, 2, 2>;
using CMat4 = Eigen::Matrix<cd, 4, 4>;
using CMat8 = Eigen::Matrix<cd, 8, 8>;

// Ordering of the full state: rho, m1..m3, n, w1..w3.
namespace idx {
inline constexpr int rho = 0;
inline constexpr int m = 1;
inline constexpr int n = 4;
inline constexpr int w = 5;
}  // namespace idx

class FrequencyPoint {
public:
    explicit FrequencyPoint(const Vec3& xi) : xi_(xi), magnitude_(xi.norm()) {}
    const Vec3& xi() const noexcept { return xi_; }
    double magnitude() const noexcept { return magnitude_; }
    // unit direction; e1 at the origin
    Vec3 direction() const;

private:
    Vec3 xi_;
    double magnitude_;
};

struct SpectrumOptions {
    double collision_tol = 1e-4;
    double seed_s = 1e-3;
};

struct CompressibleSpectrum {
    std::array<cd, 4> r{};
    double gap = 0.0;
    bool labeled = true;
};

struct IncompressibleSpectrum {
    cd kappa1;
    cd kappa2;
    double gap = 0.0;
};

class EigenvalueCollision : public std::runtime_error {
public:
    EigenvalueCollision(double s, double gap)
        : std::runtime_error("eigenvalue collision at s=" + std::to_string(s) +
                             " (gap " + std::to_string(gap) + ")"),
          s_(s), gap_(gap) {}
    double s() const noexcept { return s_; }
    double gap() const noexcept { return gap_; }

private:
    double s_;
    double gap_;
};

template <int N>
using ProjectorSet = std::array<Eigen::Matrix<cd, N, N>, N>;

Mat4 symbol_compressible(const DerivedParams& dp, double s);
Mat2 symbol_incompressible(const DerivedParams& dp, double s);
CMat8 symbol_full(const DerivedParams& dp, const FrequencyPoint& xi);

// monic quartic r^4 + a[3] r^3 + a[2] r^2 + a[1] r + a[0]
std::array<double, 4> characteristic_coefficients(const DerivedParams& dp, double s);
std::array<cd, 4> quartic_roots(const std::array<double, 4>& a);

CompressibleSpectrum compressible_spectrum(const DerivedParams& dp, double s,
                                           const SpectrumOptions& opt = {});
// same labels as compressible_spectrum, one continuation pass over an ascending grid
std::vector<CompressibleSpectrum> compressible_spectrum_scan(const DerivedParams& dp,
                                                             std::span<const double> s_sorted,
                                                             const SpectrumOptions& opt = {});
IncompressibleSpectrum incompressible_spectrum(const DerivedParams& dp, double s);

// true when every pair is farther apart than tol * max(1, |r|)
bool well_separated(std::span<const cd> r, double tol);

ProjectorSet<4> compressible_projectors(const DerivedParams& dp, double s,
                                        const CompressibleSpectrum& sp,
                                        const SpectrumOptions& opt = {});
ProjectorSet<4> compressible_projectors(const DerivedParams& dp, double s,
                                        const SpectrumOptions& opt = {});
ProjectorSet<2> incompressible_projectors(const DerivedParams& dp, double s,
                                          const SpectrumOptions& opt = {});

template <class Derived>
auto matrix_exp(const Eigen::MatrixBase<Derived>& a) -> typename Derived::PlainObject;

CMat4 propagator_compressible(const DerivedParams& dp, double s, double t,
                              const SpectrumOptions& opt = {});
CMat2 propagator_incompressible(const DerivedParams& dp, double s, double t,
                                const SpectrumOptions& opt = {});
CMat4 propagator_compressible_robust(const DerivedParams& dp, double s, double t);
CMat2 propagator_incompressible_robust(const DerivedParams& dp, double s, double t);

// e^{tA(xi)} from the full polynomial symbol; closed form at xi = 0
CMat8 propagator_full(const DerivedParams& dp, const FrequencyPoint& xi, double t);
// oracle: recombination of the compressible and incompressible propagators
CMat8 propagator_full_hodge(const DerivedParams& dp, const FrequencyPoint& xi, double t);

// e^{tA(s e1)} reduced to its longitudinal (rho, m1, n, w1) and transverse (m2, w2) blocks.
// Rotation covariance rebuilds e^{tA(xi)} for any xi with |xi| = s.
struct AxialPropagator {
    CMat4 longitudinal;
    CMat2 transverse;

    CMat8 assemble(const Vec3& dir) const;
    static AxialPropagator from_full(const CMat8& e);
};
AxialPropagator axial_propagator(const DerivedParams& dp, double s, double t);

enum class Block { rho, m, n, w };
enum class Part { scalar, longitudinal, transverse };

constexpr bool is_vector(Block b) { return b == Block::m || b == Block::w; }
constexpr int block_offset(Block b)
{
    return b == Block::rho ? idx::rho : b == Block::m ? idx::m : b == Block::n ? idx::n : idx::w;
}
// position of a block inside AxialPropagator::longitudinal (0..3) or ::transverse (0..1)
constexpr int axial_slot(Block b) { return static_cast<int>(b); }

struct GreenBlockSelector {
    Block row;
    Block col;
};

// Validates the (row, col, part) combination and returns the axial symbol entry.
// Scalar-vector entries carry the direction factor: g_{a,b_j}(xi) = entry * dir_j.
cd axial_entry(const AxialPropagator& ap, GreenBlockSelector sel, Part part);
Part default_part(GreenBlockSelector sel);
Block parse_block(const std::string& name);
std::string block_name(Block b);

// D = diag(1, i, 1, i): compressible coordinates (rho, i dir.m, n, i dir.w)
Eigen::Matrix<cd, 4, 1> compressible_coordinates(const Eigen::Matrix<cd, 8, 1>& u, const Vec3& dir);

struct StabilityRow {
    double s;
    double max_re_compressible;
    double max_re_incompressible;
    bool flagged;
};
std::vector<StabilityRow> stability_scan(const DerivedParams& dp, std::span<const double> s_grid);

}  // namespace twophase

#include <unsupported/Eigen/MatrixFunctions>

template <class Derived>
auto twophase::matrix_exp(const Eigen::MatrixBase<Derived>& a) -> typename Derived::PlainObject
{
    return a.eval().exp();
}
