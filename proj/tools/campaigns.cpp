#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "cli.hpp"
#include "twophase/asymptotics.hpp"
#include "twophase/convolve.hpp"
#include "twophase/evolve.hpp"
#include "twophase/green.hpp"
#include "twophase/spectral.hpp"
#include "twophase/waves.hpp"

namespace cli {

using namespace twophase;
using nlohmann::json;

namespace {

std::vector<double> logspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, double(i) / (n - 1));
    return v;
}

std::string row(std::initializer_list<std::string> fields)
{
    std::string s;
    for (const auto& f : fields) {
        if (!s.empty()) s += ',';
        s += f;
    }
    return s + "\n";
}

std::string yes(bool b) { return b ? "1" : "0"; }

// file-name friendly time label
std::string tlabel(double t) { return fmt::format("t{}", t); }

double rel_to(double v, double target) { return std::abs(v / target - 1.0); }

GreenComponent component_or_config_error(const std::string& tag)
{
    try {
        return parse_component(tag);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

// the vector index that carries the radial direction of a scalar-vector entry
int radial_axis(const GreenComponent& c) { return is_vector(c.sel.col) ? c.j : c.i; }

bool scalar_vector(const GreenComponent& c) { return is_vector(c.sel.row) != is_vector(c.sel.col); }

std::size_t axis_index(const FrequencyGrid& g, int axis, int k)
{
    const int o = g.n() / 2;
    int ijk[3] = {o, o, o};
    ijk[axis] += k;
    return (std::size_t(ijk[0]) * g.n() + ijk[1]) * g.n() + ijk[2];
}

}  // namespace

void run_spectrum(Session& s)
{
    s.guarded("spectrum", [&] {
        const auto& o = s.config().spectrum;
        if (!(o.s_min > 0.0 && o.s_max > o.s_min && o.points >= 2))
            throw ConfigError("spectrum: need 0 < s-min < s-max and at least two points");
        const auto& dp = s.model().derived();
        const auto grid = logspace(o.s_min, o.s_max, o.points);
        const auto specs = compressible_spectrum_scan(dp, grid);
        const auto stab = stability_scan(dp, grid);

        auto os = s.csv("spectrum.csv", "spectrum",
                        {"s", "r1_re", "r1_im", "r2_re", "r2_im", "r3_re", "r3_im", "r4_re", "r4_im", "kappa1_re",
                         "kappa1_im", "kappa2_re", "kappa2_im", "gap", "max_re"});
        int unstable = 0;
        double vieta = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid[i], x2 = x * x;
            const auto& r = specs[i].r;
            const auto k = incompressible_spectrum(dp, x);
            const double max_re = std::max(stab[i].max_re_compressible, stab[i].max_re_incompressible);
            unstable += !(max_re < 0.0);
            os << num(x);
            for (const auto& z : r) os << ',' << num(z.real()) << ',' << num(z.imag());
            os << ',' << num(k.kappa1.real()) << ',' << num(k.kappa1.imag()) << ',' << num(k.kappa2.real()) << ','
               << num(k.kappa2.imag()) << ',' << num(specs[i].gap) << ',' << num(max_re) << '\n';

            // sum and product identities of both characteristic polynomials
            cd e1 = 0.0, e4 = 1.0;
            for (const auto& z : r) e1 += z, e4 *= z;
            const double want1 = -(dp.nu * x2 + dp.alpha2 + 1.0), want4 = dp.alpha1 * x2 * x2;
            vieta = std::max({vieta, std::abs(e1 - want1) / std::abs(want1), std::abs(e4 - want4) / want4,
                              std::abs(k.kappa1 + k.kappa2 + dp.alpha2 + 1.0 + dp.mu_bar * x2) /
                                  (dp.alpha2 + 1.0 + dp.mu_bar * x2),
                              std::abs(k.kappa1 * k.kappa2 - dp.mu_bar * x2) / (dp.mu_bar * x2)});
        }
        s.check("spectrum.stability", unstable == 0,
                fmt::format("{} of {} frequencies with max Re >= 0", unstable, grid.size()));
        s.check("spectrum.vieta", vieta < 1e-10, fmt::format("worst relative defect {:.3e}", vieta));
        s.set_section("spectrum", {{"s_min", o.s_min}, {"s_max", o.s_max}, {"points", o.points}});
    });
}

void run_expansion(Session& s)
{
    s.guarded("expansion-check", [&] {
        const auto& o = s.config().expansion;
        if (o.random_sets < 0) throw ConfigError("expansion-check: --random-sets must be >= 0");
        std::mt19937_64 rng(s.config().seed.value_or(0));
        std::vector<ModelParams> sets = {s.model().params()};
        for (int k = 0; k < o.random_sets; ++k) sets.push_back(random_admissible(rng));

        auto os = s.csv("expansion.csv", "expansion-check",
                        {"set", "branch", "regime", "claimed_order", "fitted_slope", "degenerate", "pass"});
        int bad = 0, bad_proj = 0, rows = 0;
        for (std::size_t k = 0; k < sets.size(); ++k) {
            const auto dp = derive(sets[k]);
            const auto b = scaled_bounds(dp);
            for (const auto& e : expansion_catalog()) {
                const auto res = remainder_order_check(e, dp, default_sequence(e.regime, b), b);
                bad += !res.passed;
                ++rows;
                os << row({std::to_string(k), e.branch, regime_name(e.regime), num(e.claimed_order), num(res.slope),
                           yes(res.degenerate), yes(res.passed)});
            }
            for (const auto& p : projector_leading_check(dp, default_sequence(Regime::low, b))) {
                bad_proj += !p.passed;
                os << row({std::to_string(k), p.name, "low", "1", num(p.slope), "0", yes(p.passed)});
            }
        }
        s.check("expansion.orders", bad == 0, fmt::format("{} of {} branches off their claimed order", bad, rows));
        s.check("expansion.projector_leading", bad_proj == 0, fmt::format("{} projector rows failed", bad_proj));
        s.set_section("expansion-check", {{"parameter_sets", sets.size()}, {"order_tolerance", order_tolerance}});
    });
}

void run_green(Session& s)
{
    s.guarded("green", [&] {
        const auto& cfg = s.config();
        const auto& o = cfg.green;
        const auto& dp = s.model().derived();
        const FrequencyGrid g(cfg.n.value_or(128), cfg.L.value_or(32.0));
        const double sigma = cfg.sigma.value_or(0.5);
        const auto times = cfg.t.empty() ? std::vector<double>{5.0, 10.0, 20.0} : cfg.t;
        std::vector<GreenComponent> comps;
        for (const auto& tag : o.components) comps.push_back(component_or_config_error(tag));
        if (o.oracle_radii < 1 || o.oracle_radii > g.n() / 2) throw ConfigError("green: --oracle-radii must lie in [1, n/2]");

        auto prof = s.csv("green_profile.csv", "green-profile", {"component", "t", "r", "value", "count"});
        auto orc = s.csv("green_oracle.csv", "green-oracle", {"component", "t", "r", "lattice", "oracle", "rel_err"});
        bool wrap = false, finite = true;
        std::vector<double> worst(comps.size(), 0.0);
        std::vector<bool> compared(comps.size(), false);
        for (double t : times) {
            const auto fields = synthesize(dp, g, t, sigma, comps);
            for (std::size_t c = 0; c < comps.size(); ++c) {
                const auto& f = fields[c];
                const auto tag = component_tag(comps[c]);
                wrap = wrap || f.wrap_warning;
                for (double v : f.values) finite = finite && std::isfinite(v);
                if (o.dump) {
                    auto os = s.binary(fmt::format("green_{}_{}.bin", tag, tlabel(t)));
                    write_field(os, f);
                }
                const auto p = scalar_vector(comps[c]) ? projected_profile(f, radial_axis(comps[c]), g.spacing(), g.half_width())
                                                       : radial_average(f, g.spacing(), g.half_width());
                for (std::size_t b = 0; b < p.r.size(); ++b)
                    if (p.count[b] > 0) prof << row({tag, num(t), num(p.r[b]), num(p.value[b]), std::to_string(p.count[b])});

                if (is_vector(comps[c].sel.row) && is_vector(comps[c].sel.col)) continue;
                // lattice values along one axis against the one-dimensional oracle
                const int axis = scalar_vector(comps[c]) ? radial_axis(comps[c]) : 0;
                std::vector<double> radii;
                for (int k = 0; k < o.oracle_radii; ++k) radii.push_back(k * g.spacing());
                const auto ref = radial_oracle(dp, comps[c].sel, radii, t, sigma);
                const double scale = f.max_abs();
                for (int k = 0; k < o.oracle_radii; ++k) {
                    const double v = f.values[axis_index(g, axis, k)];
                    const double e = std::abs(v - ref.value[k]) / scale;
                    worst[c] = std::max(worst[c], e);
                    orc << row({tag, num(t), num(radii[k]), num(v), num(ref.value[k]), num(e)});
                }
                compared[c] = true;
            }
        }
        s.check("green.finite", finite, finite ? "all synthesized values finite" : "non-finite values in a synthesized field");
        // the lattice sum drops the mollified symbol beyond Nyquist; the oracle does not
        const double tail = std::exp(-0.5 * sigma * sigma * g.nyquist() * g.nyquist());
        const bool resolved = tail <= 1e-6;
        for (std::size_t c = 0; c < comps.size(); ++c)
            if (compared[c] && resolved)
                s.check("green.oracle." + component_tag(comps[c]), worst[c] < 1e-3,
                        fmt::format("max |lattice - oracle| / max|G| = {:.3e}", worst[c]));
        s.set_section("green", {{"n", g.n()}, {"L", g.half_width()}, {"sigma", sigma}, {"t", times},
                                {"components", o.components}, {"wrap_warning", wrap}, {"resolves_eta2", g.resolves(10.0)},
                                {"mollifier_tail_at_nyquist", tail},
                                {"oracle_check", resolved ? "enabled" : "informational only: mollifier tail at Nyquist above 1e-6"},
                                {"dump_layout", "TPGF little-endian: u32 version, i32 n, f64 L, f64 t, f64 sigma, u32 tag length, tag, n^3 f64 row-major"}});
    });
}

namespace {

std::vector<FrontPoint> track(const DerivedParams& dp, const FrequencyGrid& g, double sigma,
                              std::span<const double> times, const GreenComponent& comp, const std::string& label,
                              std::ofstream& os, bool difference)
{
    std::vector<FrontPoint> pts;
    for (double t : times) {
        const auto f = difference ? column_difference(dp, g, t, sigma, comp.sel.row, comp.i, comp.j)
                                  : synthesize(dp, g, t, sigma, comp);
        const auto p = projected_profile(f, radial_axis(comp), 0.5 * g.spacing(), g.half_width());
        FrontOptions fo;
        // past 0.5 c t the leftover diffusion bump of the difference still outweighs its front
        if (difference) fo.search_from = 0.8;
        pts.push_back(locate_front(p, t, dp.c, default_exclusion(f), fo));
        os << row({label, num(t), num(pts.back().r_front), num(pts.back().amplitude)});
    }
    return pts;
}

}  // namespace

void run_waves(Session& s)
{
    const auto& cfg = s.config();
    const auto& o = cfg.waves;
    const auto& dp = s.model().derived();
    const FrequencyGrid g(cfg.n.value_or(256), cfg.L.value_or(160.0));
    const double sigma = cfg.sigma.value_or(2.5);
    const auto times = cfg.t.empty() ? std::vector<double>{25.0, 35.0, 50.0, 70.0, 100.0} : cfg.t;
    const auto comp = component_or_config_error(o.front_component);
    if (!scalar_vector(comp) || is_vector(comp.sel.row))
        throw ConfigError("waves: --front-component must be a scalar-row, vector-column entry such as rho-m1");
    json section = {{"n", g.n()}, {"L", g.half_width()}, {"sigma", sigma}, {"t", times}, {"front_component", o.front_component},
                    {"wrap_warning", wrap_hazard(dp, g, times.back(), sigma)}};

    auto fronts = s.csv("waves_fronts.csv", "waves-fronts", {"field", "t", "r_front", "amplitude"});
    auto summary = s.csv("waves_summary.csv", "waves-summary", {"quantity", "value", "target", "tolerance", "pass"});
    auto emit = [&](const std::string& name, double value, double target, double tol, bool pass, const std::string& detail) {
        summary << row({name, num(value), num(target), num(tol), yes(pass)});
        s.check("waves." + name, pass, detail);
    };

    s.guarded("waves.fronts", [&] {
        const auto tag = component_tag(comp);
        const auto pts = track(dp, g, sigma, times, comp, tag, fronts, false);
        const auto fs = front_speed(pts);
        emit("front_speed", fs.c_est, dp.c, 0.03, rel_to(fs.c_est, dp.c) <= 0.03,
             fmt::format("c_est {:.6f} vs c {:.6f}, fit residual {:.3e}", fs.c_est, dp.c, fs.residual));
        const double a = amplitude_exponent(pts);
        emit("front_exponent", a, -2.0, 0.15, std::abs(a + 2.0) <= 0.15, fmt::format("amplitude exponent {:.4f}", a));

        const std::string dtag = fmt::format("{}-minus-{}w{}", tag, block_name(comp.sel.row), comp.j + 1);
        const auto dpts = track(dp, g, sigma, times, comp, dtag, fronts, true);
        const double ad = amplitude_exponent(dpts);
        emit("cancellation_exponent", ad, -2.5, 0.15, std::abs(ad + 2.5) <= 0.15, fmt::format("amplitude exponent {:.4f}", ad));
        emit("cancellation_gain", a - ad, 0.5, 0.2, a - ad >= 0.3, fmt::format("difference steeper by {:.4f}", a - ad));
    });

    s.guarded("waves.ratio", [&] {
        const WaveEnvelope env[2] = {{WaveKind::diffusion, 1.5, 1.5, 0.0}, {WaveKind::huygens, 2.0, 1.5, dp.c}};
        auto os = s.csv("waves_ratios.csv", "waves-ratios", {"field", "n", "t", "ratio", "r_at"});
        const GreenComponent g11{{Block::rho, Block::rho}, 0, 0};
        double drift = 0.0, cmax = 0.0;
        for (double t : o.ratio_t) {
            double prev = 0.0;
            for (int n : {o.ratio_n, 2 * o.ratio_n}) {
                const FrequencyGrid gr(n, o.ratio_L);
                const auto f = synthesize(dp, gr, t, o.ratio_sigma, g11);
                const auto r = bound_ratio(f, env, default_exclusion(f));
                os << row({"rho-rho", std::to_string(n), num(t), num(r.ratio), num(r.r_at)});
                if (prev > 0.0) drift = std::max(drift, rel_to(r.ratio, prev));
                prev = r.ratio;
                cmax = std::max(cmax, r.ratio);
            }
        }
        emit("ratio_refinement", drift, 0.0, 0.1, drift <= 0.1,
             fmt::format("G11 envelope ratio changes by at most {:.2f}% under grid doubling; max ratio {:.4g}", 100 * drift, cmax));
    });

    if (!o.rho_bar_sweep.empty())
        s.guarded("waves.rho_bar_sweep", [&] {
            auto os = s.csv("waves_sweep.csv", "waves-sweep", {"rho_bar", "c_model", "c_est", "c_ns", "rel_to_c_ns"});
            const GreenComponent gnw{{Block::n, Block::w}, 0, 0};
            std::vector<double> gaps;
            double c_ns = 0.0;
            for (double rb : o.rho_bar_sweep) {
                auto mp = s.model().params();
                mp.rho_bar = rb;
                const Model m(mp);
                c_ns = std::sqrt(m.pressure_prime(mp.n_bar));
                const auto pts = track(m.derived(), g, sigma, times, gnw, fmt::format("n-w1 rho_bar={}", rb), fronts, false);
                const double c = front_speed(pts).c_est;
                gaps.push_back(rel_to(c, c_ns));
                os << row({num(rb), num(m.derived().c), num(c), num(c_ns), num(gaps.back())});
            }
            bool monotone = true;
            for (std::size_t k = 1; k < gaps.size(); ++k) monotone = monotone && gaps[k] < gaps[k - 1];
            emit("rho_bar_limit", gaps.back(), 0.0, 0.03, monotone && gaps.back() <= 0.03,
                 fmt::format("front speed within {:.2f}% of sqrt(P'(n_bar)) = {:.6f} at the last rho_bar, {}", 100 * gaps.back(),
                             c_ns, monotone ? "approached monotonically" : "not monotone"));
        });

    if (o.rates)
        s.guarded("waves.rates", [&] {
            const std::vector<double> ps = {1.25, 1.5, 1.75, 2.0, 3.0, 4.0, 8.0, std::numeric_limits<double>::infinity()};
            const auto rows = rate_table(ps);
            auto os = s.csv("waves_rates.csv", "waves-rates", {"p", "diffusive", "huygens", "rate"});
            double at2 = std::numeric_limits<double>::infinity();
            for (const auto& r : rows) {
                os << row({std::isinf(r.p) ? "inf" : num(r.p), num(r.diffusive), num(r.huygens), num(r.rate)});
                if (r.p == 2.0) at2 = std::abs(r.diffusive - r.huygens);
            }
            emit("rate_branches_at_p2", at2, 0.0, 1e-15, at2 <= 1e-15, "both closed-form rates equal 3/4 at p = 2");
        });
    s.set_section("waves", section);
}

void run_convolve(Session& s)
{
    s.guarded("convolve", [&] {
        const auto& cfg = s.config();
        const auto& o = cfg.convolve;
        std::vector<ConvKind> kinds;
        for (const auto& name : o.specs) {
            try {
                kinds.push_back(parse_conv(name));
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
        SampleGrid grid;
        grid.times = o.times;
        grid.x_over_ct = o.x_over_ct;
        if (grid.times.empty() || grid.x_over_ct.empty()) throw ConfigError("convolve: empty sample grid");
        QuadOptions q;
        q.rel_tol = cfg.tol_quad;
        QuadOptions tight = q;
        tight.rel_tol = cfg.tol_quad / 10.0;
        const double c = o.c.value_or(s.model().derived().c);

        auto os = s.csv("convolve.csv", "convolve", {"spec", "x", "t", "lhs", "rhs", "ratio"});
        auto sum = s.csv("convolve_summary.csv", "convolve-summary", {"spec", "c_max", "x_at", "t_at", "c_max_tight", "rel_change"});
        for (auto kind : kinds) {
            ConvSpec spec;
            spec.which = kind;
            spec.c = c;
            spec.validate();
            const auto est = constant_estimate(spec, grid, q);
            bool finite = std::isfinite(est.c_max);
            int unconverged = 0;
            for (const auto& r : est.rows) {
                os << row({conv_name(kind), num(r.x), num(r.t), num(r.v.lhs), num(r.v.rhs), num(r.v.ratio)});
                finite = finite && std::isfinite(r.v.ratio);
                unconverged += !r.v.converged;
            }
            os << row({conv_name(kind) + ":C_max", num(est.x_at), num(est.t_at), "", "", num(est.c_max)});
            s.check("convolve." + conv_name(kind) + ".bounded", finite && unconverged == 0,
                    fmt::format("C_max {:.6g} at |x|={:.4g}, t={:.4g}; {} unconverged samples", est.c_max, est.x_at, est.t_at,
                                unconverged));
            if (o.tighten) {
                const auto t2 = constant_estimate(spec, grid, tight);
                const double change = rel_to(t2.c_max, est.c_max);
                sum << row({conv_name(kind), num(est.c_max), num(est.x_at), num(est.t_at), num(t2.c_max), num(change)});
                s.check("convolve." + conv_name(kind) + ".stable", change <= 0.05,
                        fmt::format("C_max moves by {:.3e} when the tolerance is tightened tenfold", change));
            } else {
                sum << row({conv_name(kind), num(est.c_max), num(est.x_at), num(est.t_at), "", ""});
            }
        }
        s.set_section("convolve", {{"specs", o.specs}, {"c", c}, {"times", o.times}, {"x_over_ct", o.x_over_ct}, {"tighten", o.tighten}});
    });
}

void run_evolve(Session& s)
{
    s.guarded("evolve", [&] {
        const auto& cfg = s.config();
        const auto& o = cfg.evolve;
        const FrequencyGrid g(cfg.n.value_or(96), cfg.L.value_or(24.0));
        const double dt = cfg.dt.value_or(0.01);
        const double t_end = cfg.t.empty() ? 20.0 : cfg.t.back();
        InitialDataSpec spec;
        spec.eps0 = cfg.eps0.value_or(1e-3);
        spec.r = o.r;
        spec.width = o.width;
        spec.seed = cfg.seed;
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        auto on_lattice = [&](double v) { return std::abs(std::round(v / dt) * dt - v) <= 1e-9 * std::max(1.0, v); };
        if (!on_lattice(t_end)) throw ConfigError("evolve: t_end is not a multiple of dt");
        if (!(o.snapshot_every > 0.0) || !on_lattice(o.snapshot_every))
            throw ConfigError("evolve: --snapshot-every must be a positive multiple of dt");
        if (o.dump_every < 0.0 || (o.dump_every > 0.0 && !on_lattice(o.dump_every)))
            throw ConfigError("evolve: --dump-every must be a multiple of dt");

        std::vector<double> snaps;
        const long every = std::lround(o.snapshot_every / dt), total = std::lround(t_end / dt);
        for (long k = 0; k <= total; k += every) snaps.push_back(k * dt);
        if (snaps.back() != total * dt) snaps.push_back(total * dt);

        RunOptions ro;
        ro.solver.nonlinear = !o.linear;
        const long dump_k = o.dump_every > 0.0 ? std::lround(o.dump_every / dt) : 0;
        if (dump_k > 0)
            ro.on_snapshot = [&](const SimState& st) {
                const long k = std::lround(st.time / dt);
                if (k % dump_k) return;
                for (int c = 0; c < kComponents; ++c) {
                    auto os = s.binary(fmt::format("evolve_{}_{}.bin", component_name(c), tlabel(k * dt)));
                    write_field(os, st.field(c));
                }
            };
        const auto res = run(s.model(), spec, g, t_end, dt, snaps, ro);

        auto os = s.csv("evolve_diagnostics.csv", "evolve-diagnostics",
                        {"t", "mass_rho", "mass_n", "momentum_total_x", "momentum_total_y", "momentum_total_z", "L2_rho", "L2_m",
                         "L2_n", "L2_w", "Linf_rho", "Linf_m", "Linf_n", "Linf_w", "L2_fluct_rho", "L2_fluct_m", "L2_fluct_n",
                         "L2_fluct_w", "Linf_fluct_rho", "Linf_fluct_m", "Linf_fluct_n", "Linf_fluct_w"});
        for (const auto& d : res.series) {
            os << num(d.t) << ',' << num(d.mass_rho) << ',' << num(d.mass_n);
            for (double v : d.momentum) os << ',' << num(v);
            for (const auto* a : {&d.l2, &d.linf, &d.l2_fluct, &d.linf_fluct})
                for (double v : *a) os << ',' << num(v);
            os << '\n';
        }

        s.check("evolve.completed", !res.abort,
                res.abort ? fmt::format("aborted at t={}: {}", res.abort->t, res.abort->what) : "reached t_end");
        double mass = 0.0, mom = 0.0;
        for (std::size_t k = 1; k < res.series.size(); ++k) {
            const auto& a = res.series[k - 1];
            const auto& b = res.series[k];
            const double steps = std::max(1.0, std::round((b.t - a.t) / dt));
            mass = std::max({mass, std::abs(b.mass_rho - a.mass_rho) / steps, std::abs(b.mass_n - a.mass_n) / steps});
            for (int j = 0; j < 3; ++j) mom = std::max(mom, std::abs(b.momentum[j] - a.momentum[j]) / (b.t - a.t));
        }
        s.check("evolve.mass_conservation", mass < 1e-12, fmt::format("max mass drift per step {:.3e}", mass));
        s.check("evolve.momentum_conservation", mom < 1e-10, fmt::format("max total momentum drift per unit time {:.3e}", mom));

        // decay slopes of the mean-removed norms
        std::vector<double> ts;
        for (const auto& d : res.series) ts.push_back(d.t);
        auto rates = s.csv("evolve_rates.csv", "evolve-rates", {"component", "norm", "slope", "target", "tolerance", "pass"});
        const char* names[4] = {"rho", "m", "n", "w"};
        int off = 0;
        std::string worst;
        try {
            for (int c = 0; c < 4; ++c)
                for (bool inf : {false, true}) {
                    std::vector<double> v;
                    for (const auto& d : res.series) v.push_back(inf ? d.linf_fluct[c] : d.l2_fluct[c]);
                    const double slope = decay_slope(ts, v, o.fit_from, o.fit_to);
                    const double target = inf ? -1.5 : -0.75, tol = inf ? 0.15 : 0.1;
                    const bool pass = std::abs(slope - target) <= tol;
                    off += !pass;
                    if (!pass) worst += fmt::format(" {} {} {:.3f};", names[c], inf ? "Linf" : "L2", slope);
                    rates << row({names[c], inf ? "Linf" : "L2", num(slope), num(target), num(tol), yes(pass)});
                }
            if (o.check_rates) s.check("evolve.decay_rates", off == 0, off ? "off target:" + worst : "all slopes on target");
        } catch (const FitError& e) {
            if (o.check_rates) s.check("evolve.decay_rates", false, e.what());
        }
        s.set_section("evolve", {{"n", g.n()}, {"L", g.half_width()}, {"dt", dt}, {"t_end", t_end}, {"eps0", spec.eps0},
                                 {"r", spec.r}, {"width", spec.width}, {"linear", o.linear}, {"weights", spec.effective_weights()},
                                 {"wrap_warning", res.wrap_warning}, {"fit_window", {o.fit_from, o.fit_to}}});
    });
}

}  // namespace cli
