#include "twophase/asymptotics.hpp"

#include <cmath>
#include <limits>

namespace twophase {

namespace {

constexpr cd I1{0.0, 1.0};

double r3_low_coeff(const DerivedParams& d)
{
    const double a1 = d.alpha1, a2 = d.alpha2;
    return (d.nu * (a1 + a2) * (a2 + 1.0) + a2 * (a1 - 1.0) * (a1 - 1.0)) /
           (2.0 * (a1 + a2) * (a2 + 1.0) * (a2 + 1.0));
}

double r1_low_coeff(const DerivedParams& d)
{
    const double a1 = d.alpha1, a2 = d.alpha2;
    return (-a2 * (a2 + 1.0) * d.nu + a1 * a2 + 1.0) / ((a2 + 1.0) * (a2 + 1.0));
}

std::vector<ExpansionSpec> build_catalog()
{
    using F = std::function<cd(const DerivedParams&, double)>;
    std::vector<ExpansionSpec> c;
    auto add = [&](std::string b, Family f, int i, Regime r, Component comp, double ord, F e) {
        c.push_back({std::move(b), f, i, r, comp, ord, std::move(e)});
    };
    const auto C = Family::compressible;
    const auto K = Family::incompressible;
    const auto lo = Regime::low, hi = Regime::high;

    add("r1", C, 0, lo, Component::value, 4.0,
        [](const DerivedParams& d, double s) { return cd(-d.alpha2 - 1.0 + r1_low_coeff(d) * s * s); });
    add("r2", C, 1, lo, Component::value, 4.0,
        [](const DerivedParams& d, double s) { return cd(-d.alpha1 / (d.alpha1 + d.alpha2) * s * s); });
    for (int k = 0; k < 2; ++k) {
        const double sign = k == 0 ? 1.0 : -1.0;
        const std::string b = k == 0 ? "r3" : "r4";
        const F low = [sign](const DerivedParams& d, double s) {
            return cd(-r3_low_coeff(d) * s * s, sign * d.c * s);
        };
        add(b + ".re", C, 2 + k, lo, Component::real, 4.0, low);
        add(b + ".im", C, 2 + k, lo, Component::imag, 3.0, low);
    }
    add("kappa1", K, 0, lo, Component::value, 4.0, [](const DerivedParams& d, double s) {
        return cd(-d.alpha2 - 1.0 - d.alpha2 * d.mu_bar / (d.alpha2 + 1.0) * s * s);
    });
    add("kappa2", K, 1, lo, Component::value, 4.0,
        [](const DerivedParams& d, double s) { return cd(-d.mu_bar / (d.alpha2 + 1.0) * s * s); });

    add("r1", C, 0, hi, Component::value, 2.0, [](const DerivedParams& d, double) { return cd(-d.alpha1 / d.nu); });
    add("r2", C, 1, hi, Component::value, 2.0, [](const DerivedParams& d, double s) {
        return cd(-d.nu * s * s + d.alpha1 / d.nu - d.alpha2);
    });
    for (int k = 0; k < 2; ++k) {
        const double sign = k == 0 ? 1.0 : -1.0;
        const std::string b = k == 0 ? "r3" : "r4";
        add(b + ".re", C, 2 + k, hi, Component::real, 2.0,
            [sign](const DerivedParams&, double s) { return cd(-0.5, sign * s); });
        add(b + ".im", C, 2 + k, hi, Component::imag, 1.0,
            [sign](const DerivedParams&, double s) { return cd(-0.5, sign * s); });
    }
    add("kappa1", K, 0, hi, Component::value, 2.0, [](const DerivedParams&, double) { return cd(-1.0); });
    add("kappa2", K, 1, hi, Component::value, 2.0,
        [](const DerivedParams& d, double s) { return cd(-d.mu_bar * s * s - d.alpha2); });
    return c;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double component_of(cd z, Component c)
{
    switch (c) {
    case Component::real: return z.real();
    case Component::imag: return z.imag();
    default: return 0.0;
    }
}

}  // namespace

const std::vector<ExpansionSpec>& expansion_catalog()
{
    static const std::vector<ExpansionSpec> cat = build_catalog();
    return cat;
}

const ExpansionSpec& find_expansion(const std::string& branch, Regime regime)
{
    for (const auto& e : expansion_catalog())
        if (e.branch == branch && e.regime == regime) return e;
    throw std::invalid_argument("no expansion for branch " + branch);
}

RegimeBounds scaled_bounds(const DerivedParams& d, const RegimeBounds& base)
{
    const double a = d.alpha2 + 1.0;
    const double lo = std::min({1.0, a / d.c, std::sqrt(a / d.nu), std::sqrt(a / d.mu_bar)});
    const double hi = std::max({1.0, std::sqrt(d.alpha1) / d.nu, std::sqrt(d.alpha1 / d.nu), 1.0 / std::sqrt(d.nu),
                                1.0 / std::sqrt(d.mu_bar), std::sqrt(d.alpha2 / d.mu_bar),
                                std::sqrt(d.alpha1 / d.alpha2) / d.nu});
    return {base.eta1 * lo, base.eta2 * hi};
}

std::string regime_name(Regime r) { return r == Regime::low ? "low" : "high"; }

cd expansion_eval(const ExpansionSpec& spec, const DerivedParams& dp, double s, const RegimeBounds& b)
{
    if (spec.regime == Regime::low && !(s >= 0.0 && s <= b.eta1))
        throw RegimeError("low-frequency expansion evaluated outside s <= eta1");
    if (spec.regime == Regime::high && !(s >= b.eta2))
        throw RegimeError("high-frequency expansion evaluated outside s >= eta2");
    return spec.evaluate(dp, s);
}

cd exact_branch(const ExpansionSpec& spec, const DerivedParams& dp, double s)
{
    if (spec.family == Family::incompressible) {
        const auto k = incompressible_spectrum(dp, s);
        const std::array<cd, 2> r{k.kappa1, k.kappa2};
        if (spec.regime == Regime::low) return r[spec.index];
        const cd target = spec.evaluate(dp, s);
        return std::abs(r[0] - target) <= std::abs(r[1] - target) ? r[0] : r[1];
    }
    if (spec.regime == Regime::low) return compressible_spectrum(dp, s).r[spec.index];
    const auto r = quartic_roots(characteristic_coefficients(dp, s));
    const cd target = spec.evaluate(dp, s);
    cd best = r[0];
    for (cd z : r)
        if (std::abs(z - target) < std::abs(best - target)) best = z;
    return best;
}

OrderResult fit_order(std::span<const double> s, std::span<const double> errors, Regime regime, double claimed,
                      std::span<const double> scales)
{
    if (s.size() < 4 || errors.size() != s.size()) throw std::invalid_argument("order fit needs >= 4 points");
    OrderResult res;
    res.errors.assign(errors.begin(), errors.end());
    // points whose error is at rounding level carry no order information
    std::vector<double> x, y;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (errors[i] < 4.0 * std::numeric_limits<double>::epsilon() * scales[i]) {
            res.degenerate = true;
            continue;
        }
        x.push_back(regime == Regime::low ? std::log(s[i]) : -std::log(s[i]));
        y.push_back(std::log(errors[i]));
    }
    if (x.size() < 3) {
        res.passed = true;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (errors[i] > 1e-12 * scales[i]) res.passed = false;
        res.slope = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    res.slope = least_squares_slope(x, y);
    res.passed = res.slope >= claimed - order_tolerance;
    return res;
}

std::vector<double> default_sequence(Regime regime, const RegimeBounds& b)
{
    if (regime == Regime::low) return {b.eta1, b.eta1 / 2, b.eta1 / 4, b.eta1 / 8};
    return {b.eta2, 2 * b.eta2, 4 * b.eta2, 8 * b.eta2};
}

OrderResult remainder_order_check(const ExpansionSpec& spec, const DerivedParams& dp,
                                  std::span<const double> seq, const RegimeBounds& bounds)
{
    std::vector<double> err, scale;
    for (double s : seq) {
        const cd approx = expansion_eval(spec, dp, s, bounds);
        const cd exact = exact_branch(spec, dp, s);
        const double e = spec.component == Component::value
                             ? std::abs(exact - approx)
                             : std::abs(component_of(exact, spec.component) - component_of(approx, spec.component));
        err.push_back(e);
        scale.push_back(std::max(1.0, std::abs(exact)));
    }
    return fit_order(seq, err, spec.regime, spec.claimed_order, scale);
}

CMat4 projector_leading(const DerivedParams& d, int i)
{
    const double a1 = d.alpha1, a2 = d.alpha2, q = d.c, g = (a1 + a2) / (a2 + 1.0);
    CMat4 p;
    switch (i) {
    case 0:
        p << 0, 0, 0, 0, 0, -1, 0, a2, 0, 0, 0, 0, 0, 1, 0, -a2;
        return -p / (a2 + 1.0);
    case 1:
        p << a1, 0, -a1 * a2, 0, 0, 0, 0, 0, -1, 0, a2, 0, 0, 0, 0, 0;
        return p / (a1 + a2);
    default: {
        const double sg = i == 2 ? 1.0 : -1.0;
        const cd iq = sg * I1 * q;
        p << -a2, -a2 * iq, -a1 * a2, -a2 * iq,
             a2 * iq, -a2 * g, a1 * a2 * iq, -a2 * g,
             -1.0, -iq, -a1, -iq,
             iq, -g, a1 * iq, -g;
        return -p / (2.0 * (a1 + a2));
    }
    }
}

CMat2 incompressible_projector_leading(const DerivedParams& d, int i)
{
    const double a2 = d.alpha2;
    CMat2 q;
    if (i == 0) {
        q << -1, a2, 1, -a2;
        return -q / (a2 + 1.0);
    }
    q << a2, a2, 1, 1;
    return q / (a2 + 1.0);
}

std::vector<ProjectorOrder> projector_leading_check(const DerivedParams& dp, std::span<const double> seq)
{
    std::vector<ProjectorOrder> out;
    std::vector<std::vector<double>> dev(6);
    for (double s : seq) {
        const auto p = compressible_projectors(dp, s);
        for (int i = 0; i < 4; ++i) dev[i].push_back((p[i] - projector_leading(dp, i)).cwiseAbs().maxCoeff());
        const auto q = incompressible_projectors(dp, s);
        for (int i = 0; i < 2; ++i)
            dev[4 + i].push_back((q[i] - incompressible_projector_leading(dp, i)).cwiseAbs().maxCoeff());
    }
    const char* names[6] = {"P1", "P2", "P3", "P4", "Q1", "Q2"};
    std::vector<double> x;
    for (double s : seq) x.push_back(std::log(s));
    for (int i = 0; i < 6; ++i) {
        std::vector<double> y;
        for (double v : dev[i]) y.push_back(std::log(std::max(v, 1e-300)));
        const double slope = least_squares_slope(x, y);
        out.push_back({names[i], slope, slope >= 0.7, dev[i]});
    }
    return out;
}

double low_expansion_sum_defect(const DerivedParams& dp, double s)
{
    cd sum = 0.0;
    sum += find_expansion("r1", Regime::low).evaluate(dp, s);
    sum += find_expansion("r2", Regime::low).evaluate(dp, s);
    sum += find_expansion("r3.re", Regime::low).evaluate(dp, s);
    sum += find_expansion("r4.re", Regime::low).evaluate(dp, s);
    return std::abs(sum + (dp.nu * s * s + dp.alpha2 + 1.0));
}

SingularWeight singular_weight(const DerivedParams& dp, GreenBlockSelector sel, Part part, double t, double s0)
{
    if (!(t > 0.0)) throw std::invalid_argument("singular weight needs t > 0");
    SingularWeight w{};
    std::array<cd, 4> f{};
    for (int k = 0; k < 4; ++k) {
        const double s = s0 * std::pow(2.0, k);
        const CMat4 ec = propagator_compressible(dp, s, t);
        const CMat2 ei = propagator_incompressible(dp, s, t);
        // longitudinal entries in Cartesian form at xi = s e1: D^{-1} E D with D = diag(1, i, 1, i)
        AxialPropagator ap;
        const cd dg[4] = {1.0, I1, 1.0, I1};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) ap.longitudinal(a, b) = ec(a, b) * dg[b] / dg[a];
        ap.transverse = ei;
        f[k] = axial_entry(ap, sel, part);
        if (k < 3) w.samples[k] = f[k];
    }
    const cd d1 = f[1] - f[0];
    const cd d2 = f[2] - f[1];
    const cd d3 = f[3] - f[2];
    const double floor = 1e-14 * std::max(1.0, std::abs(f[2]));
    if (std::abs(d2) <= floor && std::abs(d3) <= floor) {
        w.value = f[2];
        w.converged = true;
        return w;
    }
    const cd q = d2 / d1;
    // geometric contraction with a real ratio in (0, 1); the fourth sample confirms the ratio
    const bool contracting = std::abs(q.imag()) < 0.1 * std::abs(q) && q.real() > 0.0 && q.real() < 0.9;
    w.value = f[2] + d2 * q / (1.0 - q);
    const double confirm = std::abs(f[3] - w.value) / std::max(std::abs(f[2] - w.value), floor);
    w.converged = contracting && confirm < 0.9;
    if (!w.converged) w.value = f[2];
    return w;
}

}  // namespace twophase
