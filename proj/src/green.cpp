#include "twophase/green.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace twophase {

namespace {

double mollifier(double s2, double sigma) { return std::exp(-0.5 * sigma * sigma * s2); }

Vec3 lattice_direction(const Vec3& xi)
{
    const double s = xi.norm();
    return s > 0.0 ? Vec3(xi / s) : Vec3::UnitX();
}

int sign_of(int k) { return (k & 1) ? -1 : 1; }

double sph_j1(double x)
{
    if (std::abs(x) < 1e-3) return x / 3.0 - x * x * x / 30.0;
    return std::sin(x) / (x * x) - std::cos(x) / x;
}

template <class T>
void put(std::ostream& os, T v)
{
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), bytes.size());
}

template <class T>
T get(std::istream& is)
{
    std::array<char, sizeof(T)> bytes{};
    if (!is.read(bytes.data(), bytes.size())) throw std::runtime_error("field dump: truncated input");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

constexpr char kMagic[4] = {'T', 'P', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

CMat8 green_symbol(const DerivedParams& dp, const Vec3& xi, double t, double sigma)
{
    if (t < 0.0 || sigma < 0.0) throw std::invalid_argument("green_symbol: t and sigma must be >= 0");
    return propagator_full(dp, FrequencyPoint(xi), t) * mollifier(xi.squaredNorm(), sigma);
}

std::string component_tag(const GreenComponent& c)
{
    std::string tag = block_name(c.sel.row);
    if (is_vector(c.sel.row)) tag += std::to_string(c.i + 1);
    tag += "-" + block_name(c.sel.col);
    if (is_vector(c.sel.col)) tag += std::to_string(c.j + 1);
    return tag;
}

GreenComponent parse_component(const std::string& tag)
{
    const auto dash = tag.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("component '" + tag + "': expected row-col");
    GreenComponent c;
    auto one = [&](std::string part, Block& b, int& k) {
        k = 0;
        if (part.size() > 1 && std::isdigit(static_cast<unsigned char>(part.back()))) {
            k = part.back() - '1';
            part.pop_back();
            if (k < 0 || k > 2) throw std::invalid_argument("component '" + tag + "': index must be 1..3");
        }
        b = parse_block(part);
        if (!is_vector(b) && k != 0) throw std::invalid_argument("component '" + tag + "': scalar block has no index");
    };
    one(tag.substr(0, dash), c.sel.row, c.i);
    one(tag.substr(dash + 1), c.sel.col, c.j);
    return c;
}

cd green_entry(const AxialPropagator& ap, const GreenComponent& c, const Vec3& d)
{
    const int a = axial_slot(c.sel.row), b = axial_slot(c.sel.col);
    const cd l = ap.longitudinal(a, b);
    const bool va = is_vector(c.sel.row), vb = is_vector(c.sel.col);
    if (!va && !vb) return l;
    if (!va) return l * d[c.j];
    if (!vb) return l * d[c.i];
    const double dd = d[c.i] * d[c.j];
    return l * dd + ap.transverse(a / 2, b / 2) * ((c.i == c.j ? 1.0 : 0.0) - dd);
}

AxialCache::AxialCache(const DerivedParams& dp, const FrequencyGrid& grid, double t) : t_(t)
{
    const int kmax = grid.n() / 2;
    const int k2max = 3 * kmax * kmax;
    table_.resize(k2max + 1);
    const double dk = std::numbers::pi / grid.half_width();
#pragma omp parallel for schedule(dynamic, 16)
    for (int k2 = 0; k2 <= k2max; ++k2) table_[k2] = axial_propagator(dp, dk * std::sqrt(double(k2)), t);
}

SpatialField synthesize_symbol(const FrequencyGrid& grid, const LatticeSymbol& symbol, const std::string& tag,
                               const SynthesisOptions& opt)
{
    const int n = grid.n(), nh = n / 2 + 1;
    std::vector<cd> half(grid.half_size(), cd{});
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
        const int kx = grid.signed_index(i);
        if (kx == -n / 2) continue;
        for (int j = 0; j < n; ++j) {
            const int ky = grid.signed_index(j);
            if (ky == -n / 2) continue;
            for (int kz = 0; kz < n / 2; ++kz) {
                const Vec3 xi(grid.wavenumber(kx), grid.wavenumber(ky), grid.wavenumber(kz));
                half[(std::size_t(i) * n + j) * nh + kz] = double(sign_of(kx + ky + kz)) * symbol(kx, ky, kz, xi);
            }
        }
    }
    SpatialField f(grid);
    f.tag = tag;
    RealFft3 fft(n);
    fft.backward(half, f.values);
    const double scale = 1.0 / grid.volume();
    for (double& v : f.values) v *= scale;

    if (opt.check_real) {
        std::vector<cd> full(grid.size(), cd{});
        for (int i = 0; i < n; ++i) {
            const int kx = grid.signed_index(i);
            for (int j = 0; j < n; ++j) {
                const int ky = grid.signed_index(j);
                for (int k = 0; k < n; ++k) {
                    const int kz = grid.signed_index(k);
                    if (kx == -n / 2 || ky == -n / 2 || kz == -n / 2) continue;
                    const Vec3 xi(grid.wavenumber(kx), grid.wavenumber(ky), grid.wavenumber(kz));
                    full[(std::size_t(i) * n + j) * n + k] = double(sign_of(kx + ky + kz)) * symbol(kx, ky, kz, xi);
                }
            }
        }
        f.imag_residual = imaginary_residual(n, full);
    }
    return f;
}

bool wrap_hazard(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma, double support)
{
    return dp.c * t + 6.0 * sigma + support > grid.half_width();
}

std::vector<SpatialField> synthesize(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma,
                                     std::span<const GreenComponent> cs, const SynthesisOptions& opt)
{
    if (t < 0.0 || sigma < 0.0) throw std::invalid_argument("synthesize: t and sigma must be >= 0");
    if (t < 1.0 && sigma < 2.0 * grid.spacing())
        throw std::invalid_argument("synthesize: sigma must be at least two grid spacings when t < 1");
    const AxialCache cache(dp, grid, t);
    std::vector<SpatialField> out;
    for (const auto& c : cs) {
        auto f = synthesize_symbol(
            grid,
            [&](int kx, int ky, int kz, const Vec3& xi) {
                const Vec3 d = lattice_direction(xi);
                return green_entry(cache.at(kx * kx + ky * ky + kz * kz), c, d) * mollifier(xi.squaredNorm(), sigma);
            },
            component_tag(c), opt);
        f.time = t;
        f.sigma = sigma;
        f.wrap_warning = wrap_hazard(dp, grid, t, sigma);
        out.push_back(std::move(f));
    }
    return out;
}

SpatialField synthesize(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma,
                        const GreenComponent& c, const SynthesisOptions& opt)
{
    return std::move(synthesize(dp, grid, t, sigma, std::span(&c, 1), opt).front());
}

SpatialField column_difference(const DerivedParams& dp, const FrequencyGrid& grid, double t, double sigma, Block row,
                               int i, int j, const SynthesisOptions& opt)
{
    if (t < 1.0 && sigma < 2.0 * grid.spacing())
        throw std::invalid_argument("column_difference: sigma must be at least two grid spacings when t < 1");
    if (i < 0 || i > 2 || j < 0 || j > 2) throw std::invalid_argument("column_difference: index must be 0..2");
    const AxialCache cache(dp, grid, t);
    const int a = axial_slot(row);
    const bool vec = is_vector(row);
    auto f = synthesize_symbol(
        grid,
        [&](int kx, int ky, int kz, const Vec3& xi) {
            const Vec3 d = lattice_direction(xi);
            const auto& ap = cache.at(kx * kx + ky * ky + kz * kz);
            const cd l = ap.longitudinal(a, axial_slot(Block::m)) - ap.longitudinal(a, axial_slot(Block::w));
            const double geo = vec ? d[i] * d[j] : d[j];
            return l * geo * mollifier(xi.squaredNorm(), sigma);
        },
        "diff-" + block_name(row) + (vec ? std::to_string(i + 1) : "") + "-" + std::to_string(j + 1), opt);
    f.time = t;
    f.sigma = sigma;
    f.wrap_warning = wrap_hazard(dp, grid, t, sigma);
    return f;
}

OracleResult radial_oracle(const DerivedParams& dp, GreenBlockSelector sel, std::span<const double> radii, double t,
                           double sigma, const OracleOptions& opt)
{
    if (!(t > 0.0)) throw std::invalid_argument("radial_oracle: t must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("radial_oracle: needs a mollifier sigma > 0");
    const bool va = is_vector(sel.row), vb = is_vector(sel.col);
    if (va && vb) throw std::invalid_argument("radial_oracle: vector-vector blocks are not radial scalars");
    const int a = axial_slot(sel.row), b = axial_slot(sel.col);
    // longitudinal entry = factor * compressible entry; scalar pairs have factor 1
    const double sign = va ? -1.0 : 1.0;
    const bool scalar = !va && !vb;
    const double rho_max = std::min(opt.rho_max, std::sqrt(2.0 * opt.cut) / sigma);
    const double pref = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);

    OracleResult res;
    res.r.assign(radii.begin(), radii.end());
    int panels = opt.panels;
    for (int pass = 0; pass <= opt.max_refinements; ++pass, panels *= 2) {
        const auto rule = gauss_kronrod_panels(0.0, rho_max, panels);
        std::vector<double> g(rule.x.size());
#pragma omp parallel for
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            const double rho = rule.x[q];
            const CMat4 e = propagator_compressible(dp, rho, t);
            g[q] = sign * e(a, b).real() * mollifier(rho * rho, sigma) * rho * rho;
        }
        res.value.assign(radii.size(), 0.0);
        res.error = 0.0;
        for (std::size_t m = 0; m < radii.size(); ++m) {
            const double r = radii[m];
            double k = 0.0, gs = 0.0;
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double x = rule.x[q] * r;
                double ker;
                if (scalar) ker = r > 0.0 ? (std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x) : 1.0;
                else ker = -sph_j1(x);
                k += rule.kronrod[q] * g[q] * ker;
                gs += rule.gauss[q] * g[q] * ker;
            }
            res.value[m] = pref * k;
            res.error = std::max(res.error, pref * std::abs(k - gs));
        }
        if (res.error <= opt.abs_tol) return res;
    }
    throw QuadratureError("radial_oracle: panel refinement did not reach tolerance", res.error);
}

void write_field(std::ostream& os, const SpatialField& f)
{
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::int32_t>(os, f.grid.n());
    put<double>(os, f.grid.half_width());
    put<double>(os, f.time);
    put<double>(os, f.sigma);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.tag.size()));
    os.write(f.tag.data(), std::streamsize(f.tag.size()));
    for (double v : f.values) put<double>(os, v);
    if (!os) throw std::runtime_error("field dump: write failed");
}

SpatialField read_field(std::istream& is)
{
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("field dump: bad magic");
    if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("field dump: unsupported version");
    const int n = get<std::int32_t>(is);
    const double L = get<double>(is);
    SpatialField f{FrequencyGrid(n, L)};
    f.time = get<double>(is);
    f.sigma = get<double>(is);
    f.tag.resize(get<std::uint32_t>(is));
    if (!is.read(f.tag.data(), std::streamsize(f.tag.size()))) throw std::runtime_error("field dump: truncated tag");
    for (double& v : f.values) v = get<double>(is);
    return f;
}

}  // namespace twophase
