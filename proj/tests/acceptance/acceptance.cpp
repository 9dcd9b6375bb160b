// Acceptance suite: one PASS/FAIL line per criterion. Arguments select criteria (default: all).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "twophase/asymptotics.hpp"
#include "twophase/convolve.hpp"
#include "twophase/evolve.hpp"
#include "twophase/green.hpp"
#include "twophase/spectral.hpp"
#include "twophase/waves.hpp"

using namespace twophase;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<double> logspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, double(i) / (n - 1));
    return v;
}

template <class M>
double maxabs(const M& m)
{
    return m.cwiseAbs().maxCoeff();
}

double rel(cd a, double b) { return std::abs(a - b) / std::abs(b); }

const DerivedParams& canon()
{
    static const DerivedParams d = derive(canonical_params());
    return d;
}

std::vector<ModelParams> random_sets(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<ModelParams> v;
    for (int k = 0; k < count; ++k) v.push_back(random_admissible(rng));
    return v;
}

// ---------------------------------------------------------------------------

Outcome spectral_identities()
{
    const auto grid = logspace(1e-3, 1e2, 500);
    double vieta = 0.0, proj = 0.0;
    long checked = 0, skipped = 0;
    for (const auto& mp : random_sets(20, 2024)) {
        const auto dp = derive(mp);
        const auto specs = compressible_spectrum_scan(dp, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double s = grid[i], s2 = s * s;
            const auto& r = specs[i].r;
            cd e1 = 0, e2 = 0, e3 = 0, e4 = 1;
            for (int a = 0; a < 4; ++a) {
                e1 += r[a];
                e4 *= r[a];
                for (int b = a + 1; b < 4; ++b) {
                    e2 += r[a] * r[b];
                    for (int c = b + 1; c < 4; ++c) e3 += r[a] * r[b] * r[c];
                }
            }
            const auto k = incompressible_spectrum(dp, s);
            vieta = std::max({vieta, rel(e1, -(dp.nu * s2 + dp.alpha2 + 1.0)), rel(e2, (dp.nu + dp.alpha1 + 1.0) * s2),
                              rel(e3, -(dp.nu * s2 * s2 + (dp.alpha1 + dp.alpha2) * s2)), rel(e4, dp.alpha1 * s2 * s2),
                              rel(k.kappa1 + k.kappa2, -(dp.alpha2 + 1.0 + dp.mu_bar * s2)),
                              rel(k.kappa1 * k.kappa2, dp.mu_bar * s2)});

            if (!well_separated(r, 1e-4)) {
                ++skipped;
                continue;
            }
            ++checked;
            const auto p = compressible_projectors(dp, s, specs[i]);
            CMat4 sum = CMat4::Zero();
            for (int a = 0; a < 4; ++a) {
                sum += p[a];
                for (int b = 0; b < 4; ++b) {
                    const CMat4 target = a == b ? p[a] : CMat4::Zero();
                    proj = std::max(proj, maxabs(p[a] * p[b] - target));
                }
            }
            proj = std::max(proj, maxabs(sum - CMat4::Identity()));
            const auto q = incompressible_projectors(dp, s);
            proj = std::max({proj, maxabs(q[0] + q[1] - CMat2::Identity()), maxabs(q[0] * q[0] - q[0]),
                             maxabs(q[1] * q[1] - q[1]), maxabs(q[0] * q[1])});
        }
    }
    return {vieta < 1e-10 && proj < 1e-8,
            fmt::format("worst Vieta defect {:.2e} (< 1e-10); projector algebra {:.2e} (< 1e-8) at {} separated points, {} "
                        "near-collision points skipped",
                        vieta, proj, checked, skipped)};
}

Outcome expansion_lemmas()
{
    std::vector<ModelParams> sets = {canonical_params()};
    for (const auto& p : random_sets(20, 77)) sets.push_back(p);
    int bad = 0, rows = 0, bad_proj = 0, proj_rows = 0;
    double worst = -1e9;  // largest shortfall claimed - slope
    std::string first;
    for (const auto& mp : sets) {
        const auto dp = derive(mp);
        const auto b = scaled_bounds(dp);
        for (const auto& e : expansion_catalog()) {
            const auto r = remainder_order_check(e, dp, default_sequence(e.regime, b), b);
            ++rows;
            if (!r.degenerate) worst = std::max(worst, e.claimed_order - r.slope);
            if (!r.passed) {
                if (first.empty()) first = fmt::format("; first miss {} {} slope {:.3f}", e.branch, regime_name(e.regime), r.slope);
                ++bad;
            }
        }
        for (const auto& p : projector_leading_check(dp, default_sequence(Regime::low, b))) {
            ++proj_rows;
            bad_proj += !p.passed;
        }
    }
    return {bad == 0 && bad_proj == 0,
            fmt::format("{} parameter sets: {}/{} branch fits reach the claimed order - 0.3 (worst "
                        "shortfall {:.3f}); projector leading terms {}/{} at order >= 1{}",
                        sets.size(), rows - bad, rows, worst, proj_rows - bad_proj, proj_rows, first)};
}

Outcome propagators()
{
    using state = std::array<double, 4>;
    namespace ode = boost::numeric::odeint;
    std::vector<ModelParams> sets = {canonical_params()};
    for (const auto& p : random_sets(9, 31)) sets.push_back(p);
    double paths = 0.0, semi = 0.0, oracle = 0.0, hodge = 0.0;
    for (const auto& mp : sets) {
        const auto dp = derive(mp);
        for (double s : {0.01, 0.1, 0.5, 1.0, 2.0, 8.0, 25.0})
            for (double t : {0.1, 1.0, 5.0}) {
                paths = std::max({paths, maxabs(propagator_compressible(dp, s, t) - propagator_compressible_robust(dp, s, t)),
                                  maxabs(propagator_incompressible(dp, s, t) - propagator_incompressible_robust(dp, s, t))});
                semi = std::max({semi,
                                 maxabs(CMat4(propagator_compressible(dp, s, t) * propagator_compressible(dp, s, 0.5 * t)) -
                                        propagator_compressible(dp, s, 1.5 * t)),
                                 maxabs(CMat2(propagator_incompressible(dp, s, t) * propagator_incompressible(dp, s, 0.5 * t)) -
                                        propagator_incompressible(dp, s, 1.5 * t))});
                const FrequencyPoint xi(Vec3(0.6, -0.48, 0.64) * s);
                const CMat8 full = propagator_full(dp, xi, t);
                hodge = std::max(hodge, maxabs(full - propagator_full_hodge(dp, xi, t)));
                semi = std::max(semi, maxabs(CMat8(propagator_full(dp, xi, 0.5 * t) * propagator_full(dp, xi, 0.5 * t)) - full));
            }
        for (double s : {0.2, 1.0, 3.0}) {
            const Mat4 a = symbol_compressible(dp, s);
            const double t = 2.0;
            const CMat4 e = propagator_compressible(dp, s, t);
            for (int col = 0; col < 4; ++col) {
                state x{};
                x[col] = 1.0;
                auto rhs = [&](const state& u, state& du, double) {
                    for (int i = 0; i < 4; ++i) {
                        du[i] = 0.0;
                        for (int j = 0; j < 4; ++j) du[i] += a(i, j) * u[j];
                    }
                };
                ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-12, 1e-12), rhs, x, 0.0, t, 1e-3);
                for (int i = 0; i < 4; ++i) oracle = std::max(oracle, std::abs(e(i, col) - x[i]));
            }
        }
    }
    return {paths < 1e-8 && semi < 1e-8 && oracle < 1e-6 && hodge < 1e-8,
            fmt::format("spectral vs scaling-and-squaring {:.2e}; semigroup {:.2e}; full vs Hodge {:.2e} (all < 1e-8); ODE "
                        "oracle {:.2e} (< 1e-6)",
                        paths, semi, hodge, oracle)};
}

Outcome green_cross_validation()
{
    const FrequencyGrid g(128, 32.0);
    const double sigma = 1.0;
    std::vector<GreenComponent> cs;
    for (auto [a, b] : {std::pair{Block::rho, Block::rho}, std::pair{Block::rho, Block::n}, std::pair{Block::n, Block::rho},
                        std::pair{Block::n, Block::n}})
        cs.push_back({{a, b}, 0, 0});
    std::vector<double> radii;
    for (int k = 0; k < 20; ++k) radii.push_back(k * g.spacing());
    const int o = g.n() / 2;
    double worst = 0.0;
    for (double t : {5.0, 10.0, 20.0}) {
        const auto fields = synthesize(canon(), g, t, sigma, cs);
        for (std::size_t c = 0; c < cs.size(); ++c) {
            const auto ref = radial_oracle(canon(), cs[c].sel, radii, t, sigma);
            const double scale = fields[c].max_abs();
            for (int k = 0; k < 20; ++k) worst = std::max(worst, std::abs(fields[c](o + k, o, o) - ref.value[k]) / scale);
        }
    }
    return {worst < 1e-3, fmt::format("rho-rho, rho-n, n-rho, n-n at 20 radii, t = 5, 10, 20 (n=128, L=32, sigma=1): max "
                                      "|DFT - oracle| / max|G| = {:.2e} (< 1e-3)",
                                      worst)};
}

// fronts of G12 and of G12 - G14 on the large box, shared by two criteria
struct FrontData {
    std::vector<FrontPoint> g12, diff;
};

const FrequencyGrid& front_grid()
{
    static const FrequencyGrid g(256, 160.0);
    return g;
}
constexpr double kFrontSigma = 2.5;
const std::vector<double> kFrontTimes = {25.0, 35.0, 50.0, 70.0, 100.0};

std::vector<FrontPoint> fronts(const DerivedParams& dp, GreenComponent c, bool difference)
{
    const auto& g = front_grid();
    std::vector<FrontPoint> pts;
    for (double t : kFrontTimes) {
        const auto f = difference ? column_difference(dp, g, t, kFrontSigma, c.sel.row, c.i, c.j) : synthesize(dp, g, t, kFrontSigma, c);
        const auto p = projected_profile(f, 0, 0.5 * g.spacing(), g.half_width());
        FrontOptions fo;
        if (difference) fo.search_from = 0.8;
        pts.push_back(locate_front(p, t, dp.c, default_exclusion(f), fo));
    }
    return pts;
}

const FrontData& front_data()
{
    static const FrontData d = [] {
        const GreenComponent g12{{Block::rho, Block::m}, 0, 0};
        return FrontData{fronts(canon(), g12, false), fronts(canon(), g12, true)};
    }();
    return d;
}

Outcome huygens_structure()
{
    const auto& d = front_data();
    const auto fs = front_speed(d.g12);
    const double speed = std::abs(fs.c_est / canon().c - 1.0);
    const double a = amplitude_exponent(d.g12);

    const WaveEnvelope env[2] = {{WaveKind::diffusion, 1.5, 1.5, 0.0}, {WaveKind::huygens, 2.0, 1.5, canon().c}};
    const GreenComponent g11{{Block::rho, Block::rho}, 0, 0};
    double drift = 0.0, cmax = 0.0;
    for (double t : {5.0, 10.0, 20.0}) {
        double prev = 0.0;
        for (int n : {128, 256}) {
            const FrequencyGrid g(n, 32.0);
            const auto f = synthesize(canon(), g, t, 0.5, g11);
            const double r = bound_ratio(f, env, default_exclusion(f)).ratio;
            if (prev > 0.0) drift = std::max(drift, std::abs(r / prev - 1.0));
            prev = r;
            cmax = std::max(cmax, r);
        }
    }
    return {speed <= 0.03 && std::abs(a + 2.0) <= 0.15 && drift <= 0.1,
            fmt::format("G12 front speed {:.5f} = {:.4f} c (within 3%); amplitude exponent {:.3f} (-2 +- 0.15); G11 envelope "
                        "ratio (max {:.4f}) moves {:.2f}% under grid doubling (<= 10%)",
                        fs.c_est, fs.c_est / canon().c, a, cmax, 100.0 * drift)};
}

Outcome cancellation_gain()
{
    const auto& d = front_data();
    const double a = amplitude_exponent(d.g12);
    const double b = amplitude_exponent(d.diff);
    return {std::abs(b + 2.5) <= 0.15 && a - b >= 0.3,
            fmt::format("(G12 - G14) front amplitude exponent {:.3f} (-2.5 +- 0.15), steeper than G12 ({:.3f}) by {:.3f} (>= 0.3)",
                        b, a, a - b)};
}

Outcome convolution_lemmas()
{
    QuadOptions q;
    q.rel_tol = 1e-8;
    QuadOptions tight;
    tight.rel_tol = 1e-9;
    bool ok = true;
    std::string text;
    for (auto k : {ConvKind::L52a, ConvKind::L52b, ConvKind::K1, ConvKind::K2, ConvKind::K3}) {
        ConvSpec spec;
        spec.which = k;
        spec.c = canon().c;
        const auto a = constant_estimate(spec, SampleGrid{}, q);
        const auto b = constant_estimate(spec, SampleGrid{}, tight);
        bool finite = std::isfinite(a.c_max) && std::isfinite(b.c_max);
        for (const auto& r : a.rows) finite = finite && std::isfinite(r.v.ratio) && r.v.converged;
        for (const auto& r : b.rows) finite = finite && std::isfinite(r.v.ratio) && r.v.converged;
        const double change = std::abs(b.c_max / a.c_max - 1.0);
        ok = ok && finite && change <= 0.05;
        text += fmt::format("{}{} C_max {:.6g} ({:.1e})", text.empty() ? "" : "; ", conv_name(k), a.c_max, change);
    }
    return {ok, text + " [relative change under 1e-8 -> 1e-9, limit 5%]"};
}

Outcome nonlinear_solver()
{
    const Model model(canonical_params());
    const FrequencyGrid g(32, 8.0);

    InitialDataSpec spec;
    spec.eps0 = 1e-3;
    spec.seed = 3;
    const auto s0 = init_localized(spec, g, model);
    SolverOptions lin;
    lin.nonlinear = false;
    Solver solver(model, g, 0.05, lin);
    SimState s = s0;
    for (int k = 0; k < 40; ++k) solver.step(s);
    const double exact = relative_l2_difference(s, linear_reference(model.derived(), s0, 2.0));

    InitialDataSpec big;
    big.eps0 = 5e-2;
    big.width = 1.5;
    big.seed = 5;
    const double dt = 0.05;
    std::vector<double> snaps;
    for (int k = 0; k <= 20; ++k) snaps.push_back(k * dt);
    const auto r = run(model, big, g, 1.0, dt, snaps);
    double mass = 0.0, mom = 0.0;
    for (std::size_t k = 1; k < r.series.size(); ++k) {
        const auto& a = r.series[k - 1];
        const auto& b = r.series[k];
        mass = std::max({mass, std::abs(b.mass_rho - a.mass_rho), std::abs(b.mass_n - a.mass_n)});
        for (int j = 0; j < 3; ++j) mom = std::max(mom, std::abs(b.momentum[j] - a.momentum[j]) / dt);
    }
    const auto nt = nonlinear_rhs(model, init_localized(big, g, model));
    double cancel = 0.0;
    for (int j = 0; j < 3; ++j)
        for (std::size_t q = 0; q < nt.f1_last[j].size(); ++q) cancel = std::max(cancel, std::abs(nt.f1_last[j][q] + nt.f2_last[j][q]));

    InitialDataSpec small;
    small.width = 1.5;
    small.seed = 9;
    std::vector<double> corr;
    for (double eps : {1e-3, 2e-3}) {
        small.eps0 = eps;
        const auto init = init_localized(small, g, model);
        const auto fin = run_from(model, init, 0.5, 0.05, {}).final_state;
        const auto ref = linear_reference(model.derived(), init, 0.5);
        double d = 0.0;
        for (int c = 0; c < kComponents; ++c)
            for (std::size_t q = 0; q < fin.u[c].size(); ++q) d += std::pow(fin.u[c][q] - ref.u[c][q], 2);
        corr.push_back(std::sqrt(d));
    }
    const double ratio = corr[1] / corr[0];
    return {!r.abort && exact < 1e-10 && mass < 1e-12 && mom < 1e-10 && cancel == 0.0 && ratio >= 3.5 && ratio <= 4.5,
            fmt::format("linear steps vs exact propagation {:.2e} (< 1e-10); mass drift {:.2e}/step (< 1e-12); total momentum "
                        "drift {:.2e}/unit time (< 1e-10); non-divergence terms cancel to {:.1e}; quadratic ratio {:.3f} (in [3.5, 4.5])",
                        exact, mass, mom, cancel, ratio)};
}

struct Slopes {
    std::array<double, 4> l2{}, linf{};
    bool wrap = false;
    std::optional<RunAbort> abort;
};

Slopes decay_run(bool nonlinear, double dt)
{
    const Model model(canonical_params());
    const FrequencyGrid g(96, 24.0);
    InitialDataSpec spec;  // generic localized data: eps0 1e-3, r 2.2, width 1, default weights
    std::vector<double> snaps;
    for (int k = 0; k <= 20; ++k) snaps.push_back(k);
    RunOptions opt;
    opt.solver.nonlinear = nonlinear;
    const auto r = run(model, spec, g, 20.0, dt, snaps, opt);
    Slopes s;
    s.wrap = r.wrap_warning;
    s.abort = r.abort;
    std::vector<double> t;
    for (const auto& d : r.series) t.push_back(d.t);
    for (int c = 0; c < 4; ++c) {
        std::vector<double> a, b;
        for (const auto& d : r.series) {
            a.push_back(d.l2_fluct[c]);
            b.push_back(d.linf_fluct[c]);
        }
        s.l2[c] = decay_slope(t, a, 5.0, 20.0);
        s.linf[c] = decay_slope(t, b, 5.0, 20.0);
    }
    return s;
}

Outcome decay_rates()
{
    const char* names[4] = {"rho", "m", "n", "w"};
    const auto lin = decay_run(false, 0.5);
    // dt 0.1: a nonlinear step at n = 96 costs most of a second
    const auto nl = decay_run(true, 0.1);
    bool ok = !nl.abort;
    std::string lin_text, nl_text;
    for (int c = 0; c < 4; ++c) {
        ok = ok && std::abs(lin.l2[c] + 0.75) <= 0.1 && std::abs(lin.linf[c] + 1.5) <= 0.15;
        ok = ok && std::abs(nl.l2[c] - lin.l2[c]) <= 0.2 && std::abs(nl.linf[c] - lin.linf[c]) <= 0.2;
        lin_text += fmt::format(" {} {:.3f}/{:.3f}", names[c], lin.l2[c], lin.linf[c]);
        nl_text += fmt::format(" {} {:.3f}/{:.3f}", names[c], nl.l2[c], nl.linf[c]);
    }
    const std::vector<double> ps = {1.25, 1.5, 2.0, 4.0, std::numeric_limits<double>::infinity()};
    const auto table = rate_table(ps);
    std::string rates;
    for (const auto& r : table)
        rates += fmt::format(" p={}: {:.4g}", std::isinf(r.p) ? std::string("inf") : fmt::format("{}", r.p), r.rate);
    return {ok, fmt::format("L2/Linf slopes on [5, 20], targets -0.75 +- 0.1 / -1.5 +- 0.15. linear:{}; nonlinear "
                            "eps0=1e-3:{}{}. Rate table (branches equal at p=2):{}",
                            lin_text, nl_text, lin.wrap ? " (box shorter than c t_end + pad)" : "", rates)};
}

Outcome ns_limit()
{
    const GreenComponent gnw{{Block::n, Block::w}, 0, 0};
    std::vector<double> gaps;
    std::string text;
    double target = 0.0;
    for (double rb : {1.0, 0.1, 0.01}) {
        auto mp = canonical_params();
        mp.rho_bar = rb;
        const Model m(mp);
        target = std::sqrt(m.pressure_prime(mp.n_bar));
        const double c = front_speed(fronts(m.derived(), gnw, false)).c_est;
        gaps.push_back(std::abs(c / target - 1.0));
        text += fmt::format(" rho_bar={}: {:.5f} ({:.2f}%)", rb, c, 100.0 * gaps.back());
    }
    const bool monotone = gaps[1] < gaps[0] && gaps[2] < gaps[1];
    return {monotone && gaps[2] <= 0.03,
            fmt::format("G_n,w front speed vs sqrt(P'(n_bar)) = {:.5f}:{}; {} (final within 3%)", target, text,
                        monotone ? "monotone" : "not monotone")};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "spectral identities", spectral_identities},
        {2, "expansion lemmas", expansion_lemmas},
        {3, "propagator correctness", propagators},
        {4, "Green's function cross-validation", green_cross_validation},
        {5, "generalized Huygens structure", huygens_structure},
        {6, "cancellation gain", cancellation_gain},
        {7, "convolution lemmas", convolution_lemmas},
        {8, "nonlinear solver", nonlinear_solver},
        {9, "decay rates", decay_rates},
        {10, "Navier-Stokes limit of the front speed", ns_limit},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

    int passed = 0, ran = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        passed += o.pass;
        std::printf("criterion %2d %s  %s: %s  (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%d criteria passed\n", passed, ran);
    return passed == ran ? 0 : 1;
}
