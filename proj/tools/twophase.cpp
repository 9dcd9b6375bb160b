#include <cstdlib>
#include <iostream>
#include <map>

#include <omp.h>
#include <yaml-cpp/yaml.h>

#include "CLI11.hpp"
#include "cli.hpp"
#include "twophase/grid.hpp"

namespace {

using cli::ConfigError;
using cli::RunConfig;

struct Flags {
    std::optional<double> rho_bar, n_bar, a_coef, gamma, mu, lambda;
    std::optional<int> n;
    std::optional<double> L, sigma, dt, eps0, tol_quad;
    std::vector<double> t;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> params;
};

// params file: model keys plus optional defaults for the run flags
void apply_params_file(RunConfig& cfg, const std::filesystem::path& file)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(file.string());
    } catch (const YAML::Exception& e) {
        throw ConfigError("params file " + file.string() + ": " + e.what());
    }
    if (!root.IsMap()) throw ConfigError("params file " + file.string() + ": expected a key/value map");
    auto& p = cfg.params;
    const std::map<std::string, double*> model = {{"rho_bar", &p.rho_bar}, {"n_bar", &p.n_bar},
                                                  {"a_coef", &p.a_coef},   {"gamma", &p.gamma},
                                                  {"mu", &p.mu},           {"lambda", &p.lambda}};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        try {
            if (auto it = model.find(key); it != model.end())
                *it->second = kv.second.as<double>();
            else if (key == "n")
                cfg.n = kv.second.as<int>();
            else if (key == "L")
                cfg.L = kv.second.as<double>();
            else if (key == "sigma")
                cfg.sigma = kv.second.as<double>();
            else if (key == "dt")
                cfg.dt = kv.second.as<double>();
            else if (key == "eps0")
                cfg.eps0 = kv.second.as<double>();
            else if (key == "tol_quad")
                cfg.tol_quad = kv.second.as<double>();
            else if (key == "threads")
                cfg.threads = kv.second.as<int>();
            else if (key == "seed")
                cfg.seed = kv.second.as<std::uint64_t>();
            else if (key == "t")
                cfg.t = kv.second.IsSequence() ? kv.second.as<std::vector<double>>()
                                               : std::vector<double>{kv.second.as<double>()};
            else
                throw ConfigError("params file " + file.string() + ": unknown key '" + key + "'");
        } catch (const YAML::Exception& e) {
            throw ConfigError("params file " + file.string() + ": key '" + key + "': " + e.what());
        }
    }
}

void merge(RunConfig& cfg, const Flags& f)
{
    auto over = [](auto& dst, const auto& src) {
        if (src) dst = *src;
    };
    over(cfg.params.rho_bar, f.rho_bar);
    over(cfg.params.n_bar, f.n_bar);
    over(cfg.params.a_coef, f.a_coef);
    over(cfg.params.gamma, f.gamma);
    over(cfg.params.mu, f.mu);
    over(cfg.params.lambda, f.lambda);
    if (f.n) cfg.n = f.n;
    if (f.L) cfg.L = f.L;
    if (f.sigma) cfg.sigma = f.sigma;
    if (f.dt) cfg.dt = f.dt;
    if (f.eps0) cfg.eps0 = f.eps0;
    if (f.seed) cfg.seed = f.seed;
    over(cfg.tol_quad, f.tol_quad);
    over(cfg.threads, f.threads);
    if (!f.t.empty()) cfg.t = f.t;

    if (f.out)
        cfg.out = *f.out;
    else if (const char* env = std::getenv("TWOPHASE_OUT"))
        cfg.out = env;
    else
        cfg.out = "twophase-out";

    if (cfg.L && !(*cfg.L > 0.0)) throw ConfigError("--L must be positive");
    if (cfg.sigma && !(*cfg.sigma > 0.0)) throw ConfigError("--sigma must be positive");
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("--dt must be positive");
    if (cfg.eps0 && !(*cfg.eps0 >= 0.0)) throw ConfigError("--eps0 must be nonnegative");
    if (!(cfg.tol_quad > 0.0 && cfg.tol_quad < 1.0)) throw ConfigError("--tol-quad must lie in (0, 1)");
    if (cfg.threads < 1) throw ConfigError("--threads must be at least 1");
    for (double t : cfg.t)
        if (!(t > 0.0)) throw ConfigError("--t values must be positive");
}

void add_global_flags(CLI::App& app, Flags& f)
{
    app.add_option("--params", f.params, "structured-text (YAML) parameter file")->check(CLI::ExistingFile);
    app.add_option("--out", f.out, "output directory (default $TWOPHASE_OUT or ./twophase-out)");
    app.add_option("--n", f.n, "grid points per axis");
    app.add_option("--L", f.L, "box half width, domain [-L, L)^3");
    app.add_option("--sigma", f.sigma, "Gaussian mollifier width");
    app.add_option("--t", f.t, "time list, comma separated (evolve: last entry is t_end)")->delimiter(',');
    app.add_option("--dt", f.dt, "time step");
    app.add_option("--eps0", f.eps0, "initial data amplitude");
    app.add_option("--threads", f.threads, "worker cap for FFTW and OpenMP");
    app.add_option("--seed", f.seed, "seed for random draws (initial weights, random parameter sets)");
    app.add_option("--tol-quad", f.tol_quad, "quadrature tolerance");
    app.add_option("--rho-bar", f.rho_bar, "background density of the Euler phase");
    app.add_option("--n-bar", f.n_bar, "background density of the NS phase");
    app.add_option("--a-coef", f.a_coef, "pressure coefficient A in P(n) = A n^gamma");
    app.add_option("--gamma", f.gamma, "adiabatic exponent");
    app.add_option("--mu", f.mu, "shear viscosity");
    app.add_option("--lambda", f.lambda, "bulk viscosity");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"twophase: verification campaigns for the linearized and nonlinear two-phase fluid model"};
    app.fallthrough();
    app.require_subcommand(1, 1);

    Flags flags;
    add_global_flags(app, flags);

    RunConfig cfg;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalue scan, CSV s, Re/Im r1..r4, kappa1, kappa2, gap, max_re");
    spectrum->add_option("--s-min", cfg.spectrum.s_min, "smallest |xi|");
    spectrum->add_option("--s-max", cfg.spectrum.s_max, "largest |xi|");
    spectrum->add_option("--points", cfg.spectrum.points, "log-spaced frequencies");

    auto* expansion = app.add_subcommand("expansion-check", "fitted remainder orders of every low/high frequency expansion");
    expansion->add_option("--random-sets", cfg.expansion.random_sets, "extra random admissible parameter sets (uses --seed)");

    auto* green = app.add_subcommand("green", "mollified Green's function on the lattice: dumps and radial profiles");
    green->add_option("--component", cfg.green.components, "entries such as rho-rho, rho-m1, w2-n (repeatable)");
    green->add_flag("!--no-dump", cfg.green.dump, "skip the binary field dumps");
    green->add_option("--oracle-radii", cfg.green.oracle_radii, "lattice radii compared with the radial oracle");

    auto* waves = app.add_subcommand("waves", "front speed, amplitude exponents, envelope ratios, rate table");
    waves->add_option("--front-component", cfg.waves.front_component, "scalar-vector entry used for front tracking");
    waves->add_option("--ratio-n", cfg.waves.ratio_n, "coarse grid for the envelope ratio (doubled for stability)");
    waves->add_option("--ratio-L", cfg.waves.ratio_L, "box half width for the envelope ratio");
    waves->add_option("--ratio-sigma", cfg.waves.ratio_sigma, "mollifier for the envelope ratio");
    waves->add_option("--ratio-t", cfg.waves.ratio_t, "times for the envelope ratio")->delimiter(',');
    waves->add_option("--rho-bar-sweep", cfg.waves.rho_bar_sweep,
                      "front speed of G_{n,w} for each rho_bar (small rho_bar approaches sqrt(P'(n_bar)))")
        ->delimiter(',');
    waves->add_flag("!--no-rates", cfg.waves.rates, "skip the L^p rate table");

    auto* convolve = app.add_subcommand("convolve", "lhs/rhs ratios of the convolution inequalities");
    convolve->add_option("--spec", cfg.convolve.specs, "L52a, L52b, K1, K2, K3 (repeatable)");
    convolve->add_option("--c", cfg.convolve.c, "wave speed (default: model sound speed)");
    convolve->add_option("--times", cfg.convolve.times, "sample times")->delimiter(',');
    convolve->add_option("--x-over-ct", cfg.convolve.x_over_ct, "sample |x| / (c t)")->delimiter(',');
    convolve->add_flag("--tighten", cfg.convolve.tighten, "repeat at tol-quad / 10 and require C_max within 5%");

    auto* evolve = app.add_subcommand("evolve", "pseudospectral run from localized data, diagnostics CSV");
    evolve->add_flag("--linear", cfg.evolve.linear, "drop the nonlinear terms");
    evolve->add_option("--width", cfg.evolve.width, "bump width");
    evolve->add_option("--r", cfg.evolve.r, "algebraic decay exponent of the bump (> 2)");
    evolve->add_option("--snapshot-every", cfg.evolve.snapshot_every, "diagnostic interval (multiple of dt)");
    evolve->add_option("--dump-every", cfg.evolve.dump_every, "field dump interval, 0 disables");
    evolve->add_flag("--check-rates", cfg.evolve.check_rates, "turn the decay-rate targets into checks");
    evolve->add_option("--fit-from", cfg.evolve.fit_from, "start of the slope window");
    evolve->add_option("--fit-to", cfg.evolve.fit_to, "end of the slope window");

    auto* all = app.add_subcommand("all", "every campaign in sequence with its defaults");

    for (auto* sub : {spectrum, expansion, green, waves, convolve, evolve, all}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        if (flags.params) {
            cfg.params_file = *flags.params;
            apply_params_file(cfg, cfg.params_file);
        }
        merge(cfg, flags);
        omp_set_num_threads(cfg.threads);
        twophase::set_fft_threads(cfg.threads);

        cli::Session session(cfg);
        const auto& sub = cfg.subcommand;
        const bool every = sub == "all";
        if (every || sub == "spectrum") cli::run_spectrum(session);
        if (every || sub == "expansion-check") cli::run_expansion(session);
        if (every || sub == "green") cli::run_green(session);
        if (every || sub == "waves") cli::run_waves(session);
        if (every || sub == "convolve") cli::run_convolve(session);
        if (every || sub == "evolve") cli::run_evolve(session);
        session.write_manifest();

        int failed = 0;
        for (const auto& c : session.checks())
            if (!c.passed) {
                std::cerr << "FAILED " << c.name << ": " << c.detail << "\n";
                ++failed;
            }
        std::cout << session.checks().size() - failed << "/" << session.checks().size() << " checks passed, artifacts in "
                  << cfg.out.string() << "\n";
        return failed ? 1 : 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const twophase::ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
}
