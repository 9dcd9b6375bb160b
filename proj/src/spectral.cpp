#include "twophase/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace twophase {

namespace {

constexpr cd I1{0.0, 1.0};

cd horner(const std::array<double, 4>& a, cd z)
{
    return (((z + a[3]) * z + a[2]) * z + a[1]) * z + a[0];
}

cd horner_prime(const std::array<double, 4>& a, cd z)
{
    return ((4.0 * z + 3.0 * a[3]) * z + 2.0 * a[2]) * z + a[1];
}

double scale_of(cd a, cd b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

std::array<cd, 4> classify_small(std::array<cd, 4> r, double alpha2)
{
    std::array<cd, 4> out{};
    auto it1 = std::min_element(r.begin(), r.end(), [&](cd a, cd b) {
        return std::abs(a + (alpha2 + 1.0)) < std::abs(b + (alpha2 + 1.0));
    });
    out[0] = *it1;
    std::array<cd, 3> rest{};
    int k = 0;
    for (auto it = r.begin(); it != r.end(); ++it)
        if (it != it1) rest[k++] = *it;
    std::sort(rest.begin(), rest.end(), [](cd a, cd b) { return std::abs(a.imag()) < std::abs(b.imag()); });
    out[1] = rest[0];
    if (rest[1].imag() >= rest[2].imag()) {
        out[2] = rest[1];
        out[3] = rest[2];
    } else {
        out[2] = rest[2];
        out[3] = rest[1];
    }
    return out;
}

double min_gap(std::span<const cd> r)
{
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j) g = std::min(g, std::abs(r[i] - r[j]));
    return g;
}

// Continuation of labeled roots along increasing s.
class BranchTracker {
public:
    BranchTracker(const DerivedParams& dp, const SpectrumOptions& opt) : dp_(dp), opt_(opt) {}

    CompressibleSpectrum at(double s)
    {
        if (s <= opt_.seed_s || !ok_) {
            if (s <= opt_.seed_s) return direct(s);
            return unlabeled(s);
        }
        if (!started_) {
            cur_s_ = opt_.seed_s;
            cur_ = classify_small(quartic_roots(characteristic_coefficients(dp_, cur_s_)), dp_.alpha2);
            prev_ = cur_;
            prev_s_ = cur_s_;
            step_ = std::log(1.2);
            started_ = true;
        }
        while (cur_s_ < s && ok_) advance(s);
        if (!ok_) return unlabeled(s);
        CompressibleSpectrum sp;
        sp.r = cur_;
        sp.gap = min_gap(sp.r);
        orient(sp.r);
        return sp;
    }

private:
    CompressibleSpectrum direct(double s) const
    {
        CompressibleSpectrum sp;
        if (s == 0.0) {
            sp.r = {cd(-(dp_.alpha2 + 1.0)), 0.0, 0.0, 0.0};
            sp.gap = 0.0;
            return sp;
        }
        sp.r = classify_small(quartic_roots(characteristic_coefficients(dp_, s)), dp_.alpha2);
        sp.gap = min_gap(sp.r);
        return sp;
    }

    CompressibleSpectrum unlabeled(double s) const
    {
        CompressibleSpectrum sp;
        sp.r = quartic_roots(characteristic_coefficients(dp_, s));
        std::sort(sp.r.begin(), sp.r.end(), [](cd a, cd b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        sp.gap = min_gap(sp.r);
        sp.labeled = false;
        return sp;
    }

    static void orient(std::array<cd, 4>& r)
    {
        if (r[2].imag() < r[3].imag()) std::swap(r[2], r[3]);
    }

    void advance(double target)
    {
        for (;;) {
            double next = std::min(target, cur_s_ * std::exp(step_));
            const auto roots = quartic_roots(characteristic_coefficients(dp_, next));
            std::array<cd, 4> pred{};
            const double ds_prev = cur_s_ - prev_s_;
            for (int i = 0; i < 4; ++i)
                pred[i] = ds_prev > 0.0 ? cur_[i] + (cur_[i] - prev_[i]) * ((next - cur_s_) / ds_prev) : cur_[i];
            std::array<int, 4> perm{0, 1, 2, 3};
            std::array<int, 4> best{};
            double best_cost = std::numeric_limits<double>::infinity();
            double second = best_cost;
            do {
                double cost = 0.0;
                for (int i = 0; i < 4; ++i) cost = std::max(cost, std::abs(roots[perm[i]] - pred[i]));
                if (cost < best_cost) {
                    second = best_cost;
                    best_cost = cost;
                    best = perm;
                } else if (cost < second) {
                    second = cost;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            const double gap = min_gap(roots);
            if (!well_separated(roots, opt_.collision_tol)) {
                ok_ = false;
                return;
            }
            if (best_cost < 0.25 * gap) {
                prev_ = cur_;
                prev_s_ = cur_s_;
                for (int i = 0; i < 4; ++i) cur_[i] = roots[best[i]];
                cur_s_ = next;
                step_ = std::min(step_ * 1.5, std::log(2.0));
                return;
            }
            step_ *= 0.5;
            if (step_ < 1e-10) {
                ok_ = false;
                return;
            }
        }
    }

    DerivedParams dp_;
    SpectrumOptions opt_;
    bool started_ = false;
    bool ok_ = true;
    double cur_s_ = 0.0;
    double prev_s_ = 0.0;
    double step_ = 0.0;
    std::array<cd, 4> cur_{};
    std::array<cd, 4> prev_{};
};

template <int N>
Eigen::Matrix<cd, N, N> adjugate(const Eigen::Matrix<cd, N, N>& m)
{
    Eigen::Matrix<cd, N, N> adj;
    if constexpr (N == 2) {
        adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    } else {
        Eigen::Matrix<cd, N - 1, N - 1> minor;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                for (int a = 0, ra = 0; a < N; ++a) {
                    if (a == i) continue;
                    for (int b = 0, cb = 0; b < N; ++b) {
                        if (b == j) continue;
                        minor(ra, cb++) = m(a, b);
                    }
                    ++ra;
                }
                adj(j, i) = ((i + j) % 2 ? -1.0 : 1.0) * minor.determinant();
            }
    }
    return adj;
}

// P_i = adj(r_i - A) / prod_{j != i}(r_i - r_j). The cofactors cancel far less than the
// product of (A - r_j) factors when several roots cluster near zero.
template <int N>
ProjectorSet<N> product_projectors(const Eigen::Matrix<cd, N, N>& a, std::span<const cd> r)
{
    ProjectorSet<N> p;
    using M = Eigen::Matrix<cd, N, N>;
    for (int i = 0; i < N; ++i) {
        cd den = 1.0;
        for (int j = 0; j < N; ++j)
            if (j != i) den *= r[i] - r[j];
        p[i] = adjugate<N>(r[i] * M::Identity() - a) / den;
    }
    return p;
}

}  // namespace

Vec3 FrequencyPoint::direction() const
{
    if (magnitude_ == 0.0) return Vec3::UnitX();
    return xi_ / magnitude_;
}

Mat4 symbol_compressible(const DerivedParams& dp, double s)
{
    Mat4 a;
    a << 0.0, -s, 0.0, 0.0,
         s, -1.0, 0.0, dp.alpha2,
         0.0, 0.0, 0.0, -s,
         0.0, 1.0, dp.alpha1 * s, -dp.nu * s * s - dp.alpha2;
    return a;
}

Mat2 symbol_incompressible(const DerivedParams& dp, double s)
{
    Mat2 a;
    a << -1.0, dp.alpha2,
         1.0, -dp.alpha2 - dp.mu_bar * s * s;
    return a;
}

CMat8 symbol_full(const DerivedParams& dp, const FrequencyPoint& fp)
{
    const Vec3& xi = fp.xi();
    const double s2 = fp.magnitude() * fp.magnitude();
    CMat8 a = CMat8::Zero();
    for (int j = 0; j < 3; ++j) {
        a(idx::rho, idx::m + j) = -I1 * xi[j];
        a(idx::m + j, idx::rho) = -I1 * xi[j];
        a(idx::m + j, idx::m + j) = -1.0;
        a(idx::m + j, idx::w + j) = dp.alpha2;
        a(idx::n, idx::w + j) = -I1 * xi[j];
        a(idx::w + j, idx::m + j) = 1.0;
        a(idx::w + j, idx::n) = -dp.alpha1 * I1 * xi[j];
        for (int k = 0; k < 3; ++k) {
            double v = -(dp.mu_bar + dp.lambda_bar) * xi[j] * xi[k];
            if (j == k) v -= dp.mu_bar * s2 + dp.alpha2;
            a(idx::w + j, idx::w + k) = v;
        }
    }
    return a;
}

std::array<double, 4> characteristic_coefficients(const DerivedParams& dp, double s)
{
    const double s2 = s * s;
    return {dp.alpha1 * s2 * s2,
            dp.nu * s2 * s2 + (dp.alpha1 + dp.alpha2) * s2,
            (dp.nu + dp.alpha1 + 1.0) * s2,
            dp.nu * s2 + dp.alpha2 + 1.0};
}

std::array<cd, 4> quartic_roots(const std::array<double, 4>& a)
{
    Mat4 comp = Mat4::Zero();
    comp(0, 3) = -a[0];
    comp(1, 3) = -a[1];
    comp(2, 3) = -a[2];
    comp(3, 3) = -a[3];
    comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
    Eigen::EigenSolver<Mat4> es(comp, false);
    std::array<cd, 4> r{};
    for (int i = 0; i < 4; ++i) r[i] = es.eigenvalues()[i];
    for (cd& z : r) {
        double res = std::abs(horner(a, z));
        for (int it = 0; it < 8 && res > 0.0; ++it) {
            const cd d = horner_prime(a, z);
            if (d == 0.0) break;
            const cd zn = z - horner(a, z) / d;
            const double rn = std::abs(horner(a, zn));
            if (!(rn < res)) break;
            z = zn;
            res = rn;
        }
    }
    return r;
}

bool well_separated(std::span<const cd> r, double tol)
{
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j)
            if (std::abs(r[i] - r[j]) <= tol * scale_of(r[i], r[j])) return false;
    return true;
}

CompressibleSpectrum compressible_spectrum(const DerivedParams& dp, double s, const SpectrumOptions& opt)
{
    if (s < 0.0) throw std::invalid_argument("spectrum: s must be >= 0");
    BranchTracker tr(dp, opt);
    return tr.at(s);
}

std::vector<CompressibleSpectrum> compressible_spectrum_scan(const DerivedParams& dp,
                                                             std::span<const double> s_sorted,
                                                             const SpectrumOptions& opt)
{
    if (!std::is_sorted(s_sorted.begin(), s_sorted.end()))
        throw std::invalid_argument("spectrum scan: grid must be ascending");
    BranchTracker tr(dp, opt);
    std::vector<CompressibleSpectrum> out;
    out.reserve(s_sorted.size());
    for (double s : s_sorted) out.push_back(tr.at(s));
    return out;
}

IncompressibleSpectrum incompressible_spectrum(const DerivedParams& dp, double s)
{
    if (s < 0.0) throw std::invalid_argument("spectrum: s must be >= 0");
    const double q = dp.mu_bar * s * s;
    const double b = dp.alpha2 + 1.0 + q;
    const double disc = std::sqrt(b * b - 4.0 * q);
    IncompressibleSpectrum sp;
    sp.kappa1 = -(b + disc) / 2.0;
    sp.kappa2 = q / sp.kappa1.real();
    sp.gap = std::abs(sp.kappa1 - sp.kappa2);
    return sp;
}

ProjectorSet<4> compressible_projectors(const DerivedParams& dp, double s,
                                        const CompressibleSpectrum& sp, const SpectrumOptions& opt)
{
    if (!well_separated(sp.r, opt.collision_tol)) throw EigenvalueCollision(s, sp.gap);
    const CMat4 a = symbol_compressible(dp, s).cast<cd>();
    return product_projectors<4>(a, sp.r);
}

ProjectorSet<4> compressible_projectors(const DerivedParams& dp, double s, const SpectrumOptions& opt)
{
    return compressible_projectors(dp, s, compressible_spectrum(dp, s, opt), opt);
}

ProjectorSet<2> incompressible_projectors(const DerivedParams& dp, double s, const SpectrumOptions& opt)
{
    const auto sp = incompressible_spectrum(dp, s);
    const std::array<cd, 2> k{sp.kappa1, sp.kappa2};
    if (!well_separated(k, opt.collision_tol)) throw EigenvalueCollision(s, sp.gap);
    return product_projectors<2>(symbol_incompressible(dp, s).cast<cd>(), k);
}

CMat4 propagator_compressible_robust(const DerivedParams& dp, double s, double t)
{
    const CMat4 a = (t * symbol_compressible(dp, s)).cast<cd>();
    return matrix_exp(a);
}

CMat2 propagator_incompressible_robust(const DerivedParams& dp, double s, double t)
{
    const CMat2 a = (t * symbol_incompressible(dp, s)).cast<cd>();
    return matrix_exp(a);
}

CMat4 propagator_compressible(const DerivedParams& dp, double s, double t, const SpectrumOptions& opt)
{
    if (t < 0.0) throw std::invalid_argument("propagator: t must be >= 0");
    if (t == 0.0) return CMat4::Identity();
    // the spectral sum does not depend on branch labels
    CompressibleSpectrum sp;
    sp.r = quartic_roots(characteristic_coefficients(dp, s));
    if (s == 0.0 || !well_separated(sp.r, opt.collision_tol)) return propagator_compressible_robust(dp, s, t);
    const auto p = compressible_projectors(dp, s, sp, opt);
    CMat4 e = CMat4::Zero();
    for (int i = 0; i < 4; ++i) e += std::exp(sp.r[i] * t) * p[i];
    return e;
}

CMat2 propagator_incompressible(const DerivedParams& dp, double s, double t, const SpectrumOptions& opt)
{
    if (t < 0.0) throw std::invalid_argument("propagator: t must be >= 0");
    if (t == 0.0) return CMat2::Identity();
    const auto sp = incompressible_spectrum(dp, s);
    const std::array<cd, 2> k{sp.kappa1, sp.kappa2};
    if (!well_separated(k, opt.collision_tol)) return propagator_incompressible_robust(dp, s, t);
    const auto q = incompressible_projectors(dp, s, opt);
    return std::exp(k[0] * t) * q[0] + std::exp(k[1] * t) * q[1];
}

CMat8 propagator_full(const DerivedParams& dp, const FrequencyPoint& xi, double t)
{
    if (t < 0.0) throw std::invalid_argument("propagator: t must be >= 0");
    if (t == 0.0) return CMat8::Identity();
    if (xi.magnitude() == 0.0) {
        const double a2 = dp.alpha2;
        const double e = std::exp(-(1.0 + a2) * t);
        CMat8 g = CMat8::Zero();
        g(idx::rho, idx::rho) = 1.0;
        g(idx::n, idx::n) = 1.0;
        for (int j = 0; j < 3; ++j) {
            g(idx::m + j, idx::m + j) = (a2 + e) / (1.0 + a2);
            g(idx::m + j, idx::w + j) = a2 * (1.0 - e) / (1.0 + a2);
            g(idx::w + j, idx::m + j) = (1.0 - e) / (1.0 + a2);
            g(idx::w + j, idx::w + j) = (1.0 + a2 * e) / (1.0 + a2);
        }
        return g;
    }
    const CMat8 a = t * symbol_full(dp, xi);
    return matrix_exp(a);
}

CMat8 propagator_full_hodge(const DerivedParams& dp, const FrequencyPoint& xi, double t)
{
    const double s = xi.magnitude();
    const Vec3 d = xi.direction();
    const CMat4 ec = propagator_compressible(dp, s, t);
    const CMat2 ei = propagator_incompressible(dp, s, t);
    // 8 -> 4: (rho, i d.m, n, i d.w); 4 -> 8: m = -i d phi, w = -i d psi
    Eigen::Matrix<cd, 4, 8> down = Eigen::Matrix<cd, 4, 8>::Zero();
    Eigen::Matrix<cd, 8, 4> up = Eigen::Matrix<cd, 8, 4>::Zero();
    down(0, idx::rho) = 1.0;
    down(2, idx::n) = 1.0;
    up(idx::rho, 0) = 1.0;
    up(idx::n, 2) = 1.0;
    for (int j = 0; j < 3; ++j) {
        down(1, idx::m + j) = I1 * d[j];
        down(3, idx::w + j) = I1 * d[j];
        up(idx::m + j, 1) = -I1 * d[j];
        up(idx::w + j, 3) = -I1 * d[j];
    }
    CMat8 g = up * ec * down;
    const Eigen::Matrix3d tr = Eigen::Matrix3d::Identity() - d * d.transpose();
    const int blocks[2] = {idx::m, idx::w};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            g.block<3, 3>(blocks[a], blocks[b]) += ei(a, b) * tr.cast<cd>();
    return g;
}

CMat8 AxialPropagator::assemble(const Vec3& d) const
{
    const int lidx[4] = {idx::rho, idx::m, idx::n, idx::w};
    const bool vec[4] = {false, true, false, true};
    const Eigen::Matrix3d dd = d * d.transpose();
    const Eigen::Matrix3d tr = Eigen::Matrix3d::Identity() - dd;
    CMat8 g = CMat8::Zero();
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const cd l = longitudinal(a, b);
            if (!vec[a] && !vec[b]) {
                g(lidx[a], lidx[b]) = l;
            } else if (!vec[a]) {
                for (int j = 0; j < 3; ++j) g(lidx[a], lidx[b] + j) = l * d[j];
            } else if (!vec[b]) {
                for (int i = 0; i < 3; ++i) g(lidx[a] + i, lidx[b]) = l * d[i];
            } else {
                const cd tv = transverse(a / 2, b / 2);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) g(lidx[a] + i, lidx[b] + j) = l * dd(i, j) + tv * tr(i, j);
            }
        }
    }
    return g;
}

AxialPropagator AxialPropagator::from_full(const CMat8& e)
{
    const int lidx[4] = {idx::rho, idx::m, idx::n, idx::w};
    const int tidx[2] = {idx::m + 1, idx::w + 1};
    AxialPropagator ap;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) ap.longitudinal(a, b) = e(lidx[a], lidx[b]);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) ap.transverse(a, b) = e(tidx[a], tidx[b]);
    return ap;
}

AxialPropagator axial_propagator(const DerivedParams& dp, double s, double t)
{
    return AxialPropagator::from_full(propagator_full(dp, FrequencyPoint(Vec3(s, 0.0, 0.0)), t));
}

cd axial_entry(const AxialPropagator& ap, GreenBlockSelector sel, Part part)
{
    const bool vr = is_vector(sel.row), vc = is_vector(sel.col);
    if (!vr && !vc && part != Part::scalar) throw std::invalid_argument("scalar block pair takes the scalar part");
    if ((vr || vc) && part == Part::scalar) throw std::invalid_argument("vector block needs longitudinal or transverse part");
    if (vr != vc && part == Part::transverse) throw std::invalid_argument("mixed block has no transverse part");
    if (part == Part::transverse) return ap.transverse(axial_slot(sel.row) / 2, axial_slot(sel.col) / 2);
    return ap.longitudinal(axial_slot(sel.row), axial_slot(sel.col));
}

Part default_part(GreenBlockSelector sel)
{
    return is_vector(sel.row) || is_vector(sel.col) ? Part::longitudinal : Part::scalar;
}

Block parse_block(const std::string& name)
{
    if (name == "rho" || name == "1") return Block::rho;
    if (name == "m" || name == "2") return Block::m;
    if (name == "n" || name == "3") return Block::n;
    if (name == "w" || name == "4") return Block::w;
    throw std::invalid_argument("unknown block '" + name + "' (expected rho, m, n, w)");
}

std::string block_name(Block b)
{
    switch (b) {
    case Block::rho: return "rho";
    case Block::m: return "m";
    case Block::n: return "n";
    case Block::w: return "w";
    }
    return "?";
}

Eigen::Matrix<cd, 4, 1> compressible_coordinates(const Eigen::Matrix<cd, 8, 1>& u, const Vec3& d)
{
    Eigen::Matrix<cd, 4, 1> v;
    v(0) = u(idx::rho);
    v(2) = u(idx::n);
    v(1) = I1 * (d[0] * u(idx::m) + d[1] * u(idx::m + 1) + d[2] * u(idx::m + 2));
    v(3) = I1 * (d[0] * u(idx::w) + d[1] * u(idx::w + 1) + d[2] * u(idx::w + 2));
    return v;
}

std::vector<StabilityRow> stability_scan(const DerivedParams& dp, std::span<const double> s_grid)
{
    std::vector<StabilityRow> rows;
    rows.reserve(s_grid.size());
    for (double s : s_grid) {
        const auto r = quartic_roots(characteristic_coefficients(dp, s));
        double mc = -std::numeric_limits<double>::infinity();
        for (cd z : r) mc = std::max(mc, z.real());
        const auto k = incompressible_spectrum(dp, s);
        const double mi = std::max(k.kappa1.real(), k.kappa2.real());
        rows.push_back({s, mc, mi, s > 0.0 && (mc >= 0.0 || mi >= 0.0)});
    }
    return rows;
}

}  // namespace twophase
