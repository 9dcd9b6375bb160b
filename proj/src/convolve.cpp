#include "twophase/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace twophase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_v^inf (1 + w^2)^{-n} dw for v >= 0, n > 1/2
double cauchy_tail(double v, double n)
{
    if (std::isinf(v)) return 0.0;
    return 0.5 * boost::math::beta(n - 0.5, 0.5, 1.0 / (1.0 + v * v));
}

// int_lo^hi (1 + w^2)^{-n} dw, written through tails so far-out segments keep their digits
double cauchy_segment(double lo, double hi, double n)
{
    if (lo >= 0.0) return cauchy_tail(lo, n) - cauchy_tail(hi, n);
    if (hi <= 0.0) return cauchy_tail(-hi, n) - cauchy_tail(-lo, n);
    return boost::math::beta(0.5, n - 0.5) - cauchy_tail(-lo, n) - cauchy_tail(hi, n);
}

// int_lo^hi (u) (1 + u^2 / tau)^{-n} du
double odd_moment(double lo, double hi, double tau, double n)
{
    auto prim = [&](double u) {
        if (std::isinf(u)) return 0.0;
        return n == 1.0 ? 0.5 * tau * std::log1p(u * u / tau) : -tau / (2.0 * (n - 1.0)) * std::pow(1.0 + u * u / tau, 1.0 - n);
    };
    return prim(hi) - prim(lo);
}

// closed forms lose digits on intervals short against the kernel width; a fixed Gauss rule is exact there
template <class F>
double short_moment(const F& f, double lo, double hi)
{
    return boost::math::quadrature::gauss<double, 20>::integrate([&](double s) { return s * f(s); }, lo, hi);
}

std::vector<double> breakpoints(std::vector<double> pts)
{
    std::vector<double> out = {0.0};
    for (double p : pts)
        if (p > 0.0 && std::isfinite(p)) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
              out.end());
    return out;
}

QuadResult integrate_to_infinity(const std::function<double(double)>& h, const std::vector<double>& breaks,
                                 const QuadOptions& opt)
{
    auto r = integrate_pieces(h, breaks, opt);
    const auto tail = integrate(h, breaks.back(), kInf, opt);
    r.value += tail.value;
    r.error += tail.error;
    r.converged = r.converged && tail.converged;
    return r;
}

}  // namespace

RadialKernel diffusion_kernel(double amp, double tau, double n)
{
    if (!(tau > 0.0) || !(n > 0.5)) throw std::invalid_argument("diffusion_kernel: need tau > 0, n > 1/2");
    RadialKernel k;
    k.f = [=](double r) { return amp * std::pow(1.0 + r * r / tau, -n); };
    k.moment = [=](double a, double b) {
        if (b - a <= std::sqrt(tau)) return amp * short_moment([&](double s) { return std::pow(1.0 + s * s / tau, -n); }, a, b);
        return amp * odd_moment(a, b, tau, n);
    };
    k.peaks = {0.0};
    k.width = std::sqrt(tau);
    return k;
}

RadialKernel huygens_kernel(double amp, double a, double tau, double n)
{
    if (!(tau > 0.0) || !(n > 0.5)) throw std::invalid_argument("huygens_kernel: need tau > 0, n > 1/2");
    RadialKernel k;
    k.f = [=](double r) { return amp * std::pow(1.0 + (r - a) * (r - a) / tau, -n); };
    k.moment = [=](double lo, double hi) {
        const double st = std::sqrt(tau);
        auto prof = [&](double s) { return std::pow(1.0 + (s - a) * (s - a) / tau, -n); };
        if (hi - lo <= st) return amp * short_moment(prof, lo, hi);
        const double shifted = odd_moment(lo - a, hi - a, tau, n);
        const double level = a * st * cauchy_segment((lo - a) / st, (hi - a) / st, n);
        if (std::abs(shifted) + std::abs(level) <= 1e6 * std::abs(shifted + level)) return amp * (shifted + level);
        // deep cancellation below the peak: integrate directly
        QuadOptions o;
        o.rel_tol = 1e-13;
        const double cuts[] = {lo, std::clamp(a, lo, hi), hi};
        auto q = integrate_pieces([&](double s) { return s * prof(s); }, cuts, o);
        return amp * q.value;
    };
    k.peaks = {a};
    k.width = std::sqrt(tau);
    return k;
}

QuadResult radial_product_integral(const RadialKernel& f, const RadialKernel& g, double r0, const QuadOptions& opt)
{
    if (r0 < 0.0) throw std::invalid_argument("radial_product_integral: r0 must be >= 0");
    std::vector<double> pts;
    for (double p : g.peaks)
        for (double k : {-2.0, 0.0, 2.0}) pts.push_back(p + k * g.width);
    const double scale = std::max({1.0, f.width, g.width});
    if (r0 <= 1e-10 * scale) {
        for (double p : f.peaks)
            for (double k : {-2.0, 0.0, 2.0}) pts.push_back(p + k * f.width);
        auto h = [&](double r) { return r * r * f.f(r) * g.f(r); };
        auto res = integrate_to_infinity(h, breakpoints(pts), opt);
        res.value *= 4.0 * std::numbers::pi;
        res.error *= 4.0 * std::numbers::pi;
        return res;
    }
    for (double p : f.peaks)
        for (double k : {-2.0, 0.0, 2.0}) {
            pts.push_back(r0 - (p + k * f.width));
            pts.push_back(p + k * f.width - r0);
            pts.push_back(r0 + p + k * f.width);
        }
    pts.push_back(r0);
    QuadOptions inner_opt = opt;
    inner_opt.rel_tol = opt.rel_tol * 0.1;
    bool inner_ok = true;
    auto shell = [&](double lo, double hi) {
        if (f.moment) return f.moment(lo, hi);
        std::vector<double> cuts = {lo};
        for (double p : f.peaks)
            if (p > lo && p < hi) cuts.push_back(p);
        cuts.push_back(hi);
        auto q = integrate_pieces([&](double s) { return s * f.f(s); }, cuts, inner_opt);
        inner_ok = inner_ok && q.converged;
        return q.value;
    };
    auto h = [&](double r) { return r * g.f(r) * shell(std::abs(r - r0), r + r0); };
    auto res = integrate_to_infinity(h, breakpoints(pts), opt);
    const double pref = 2.0 * std::numbers::pi / r0;
    res.value *= pref;
    res.error *= pref;
    res.converged = res.converged && inner_ok;
    return res;
}

std::string conv_name(ConvKind k)
{
    switch (k) {
    case ConvKind::L52a: return "L52a";
    case ConvKind::L52b: return "L52b";
    case ConvKind::K1: return "K1";
    case ConvKind::K2: return "K2";
    case ConvKind::K3: return "K3";
    }
    return "?";
}

ConvKind parse_conv(const std::string& name)
{
    for (auto k : {ConvKind::L52a, ConvKind::L52b, ConvKind::K1, ConvKind::K2, ConvKind::K3})
        if (conv_name(k) == name) return k;
    throw std::invalid_argument("unknown convolution spec '" + name + "' (expected L52a, L52b, K1, K2, K3)");
}

void ConvSpec::validate() const
{
    if (!(c > 0.0)) throw std::invalid_argument("conv spec: c must be positive");
    switch (which) {
    case ConvKind::L52a:
        if (!(n1 > 1.5) || !(n2 > 1.5)) throw std::invalid_argument("L52a: n1, n2 must exceed 3/2");
        break;
    case ConvKind::L52b:
        if (!(r1 > 2.1) || !(N >= r1)) throw std::invalid_argument("L52b: need N >= r1 > 21/10");
        break;
    case ConvKind::K3:
        if (!(N > 0.5)) throw std::invalid_argument("K3: N must exceed 1/2");
        break;
    default: break;
    }
}

namespace {

double dwave(double x, double t, double p) { return std::pow(1.0 + x * x / (1.0 + t), -p); }
double hwave(double x, double t, double c, double p) { return std::pow(1.0 + (x - c * t) * (x - c * t) / (1.0 + t), -p); }

// lhs only matters through lhs / rhs, so rhs sets the absolute floor
QuadOptions with_floor(QuadOptions opt, double rhs)
{
    opt.abs_tol = std::max(opt.abs_tol, opt.rel_tol * rhs);
    return opt;
}

ConvValue finish(double lhs, double rhs, const QuadResult& q)
{
    return {lhs, rhs, lhs / rhs, q.error, q.converged};
}

}  // namespace

ConvValue lemma52_eval(const ConvSpec& spec, double x, double t, const QuadOptions& opt)
{
    spec.validate();
    if (x < 0.0 || t < 0.0) throw std::invalid_argument("lemma52_eval: |x|, t must be >= 0");
    if (spec.which == ConvKind::L52a) {
        const double rhs = dwave(x, t, spec.n3());
        const auto q = radial_product_integral(diffusion_kernel(1.0, 1.0 + t, spec.n1), diffusion_kernel(1.0, 1.0, spec.n2), x,
                                               with_floor(opt, rhs));
        return finish(q.value, rhs, q);
    }
    if (spec.which == ConvKind::L52b) {
        const double rhs = hwave(x, t, spec.c, 1.5);
        const auto q = radial_product_integral(huygens_kernel(1.0, spec.c * t, 1.0 + t, spec.N),
                                               diffusion_kernel(1.0, 1.0, spec.r1), x, with_floor(opt, rhs));
        return finish(q.value, rhs, q);
    }
    throw std::invalid_argument("lemma52_eval: spec is not L52a/L52b");
}

ConvValue k_eval(const ConvSpec& spec, double x, double t, const QuadOptions& opt)
{
    spec.validate();
    if (x < 0.0 || t < 0.0) throw std::invalid_argument("k_eval: |x|, t must be >= 0");
    const double c = spec.c;
    double rhs = std::pow(1.0 + t, -2.0) * dwave(x, t, 1.5);
    if (spec.which != ConvKind::K1) rhs += std::pow(1.0 + t, -2.0) * hwave(x, t, c, 1.5);
    if (t == 0.0) return {0.0, rhs, 0.0, 0.0, true};

    const QuadOptions outer = with_floor(opt, rhs);
    QuadOptions inner = outer;
    inner.rel_tol = outer.rel_tol * 0.1;
    inner.abs_tol = outer.abs_tol * 0.1 / t;
    bool ok = true;
    auto integrand = [&](double s) {
        const double a = 1.0 + t - s, b = 1.0 + s;
        RadialKernel f, g;
        switch (spec.which) {
        case ConvKind::K1:
            f = diffusion_kernel(std::pow(a, -2.0), a, 2.0);
            g = diffusion_kernel(std::pow(b, -3.0), b, 3.0);
            break;
        case ConvKind::K2:
            f = diffusion_kernel(std::pow(a, -2.0), a, 2.0);
            g = huygens_kernel(std::pow(b, -4.0), c * s, b, 3.0);
            break;
        case ConvKind::K3:
            f = huygens_kernel(std::pow(a, -2.5), c * (t - s), a, spec.N);
            g = huygens_kernel(std::pow(b, -4.0), c * s, b, 3.0);
            break;
        default: throw std::invalid_argument("k_eval: spec is not K1/K2/K3");
        }
        const auto q = radial_product_integral(f, g, x, inner);
        ok = ok && q.converged;
        return q.value;
    };
    // the integrand concentrates at both ends of [0, t]
    const double breaks[] = {0.0, 0.5 * t, t};
    auto q = integrate_pieces(integrand, breaks, outer);
    q.converged = q.converged && ok;
    return finish(q.value, rhs, q);
}

ConvValue conv_eval(const ConvSpec& spec, double x, double t, const QuadOptions& opt)
{
    if (spec.which == ConvKind::L52a || spec.which == ConvKind::L52b) return lemma52_eval(spec, x, t, opt);
    return k_eval(spec, x, t, opt);
}

ConstantEstimate constant_estimate(const ConvSpec& spec, const SampleGrid& grid, const QuadOptions& opt)
{
    if (grid.x_over_ct.empty() || grid.times.empty()) throw std::invalid_argument("constant_estimate: empty sample grid");
    ConstantEstimate est;
    for (double t : grid.times)
        for (double q : grid.x_over_ct) {
            const double x = q * spec.c * t;
            const auto v = conv_eval(spec, x, t, opt);
            est.rows.push_back({x, t, v});
            if (v.ratio > est.c_max) {
                est.c_max = v.ratio;
                est.x_at = x;
                est.t_at = t;
            }
        }
    return est;
}

}  // namespace twophase
