#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "twophase/model.hpp"

namespace cli {

// bad flags, bad params file, unwritable output: exit 2
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectrumOptions {
    double s_min = 1e-3;
    double s_max = 50.0;
    int points = 500;
};

struct ExpansionOptions {
    int random_sets = 0;
};

struct GreenOptions {
    std::vector<std::string> components = {"rho-rho"};
    bool dump = true;
    int oracle_radii = 20;
};

struct WavesOptions {
    std::string front_component = "rho-m1";
    int ratio_n = 128;
    double ratio_L = 32.0;
    double ratio_sigma = 0.5;
    std::vector<double> ratio_t = {5.0, 10.0, 20.0};
    std::vector<double> rho_bar_sweep;
    bool rates = true;
};

struct ConvolveOptions {
    std::vector<std::string> specs = {"L52a", "L52b", "K1", "K2", "K3"};
    std::optional<double> c;
    std::vector<double> times = {1.0, 4.0, 16.0, 64.0, 256.0};
    std::vector<double> x_over_ct = {0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0};
    bool tighten = false;
};

struct EvolveOptions {
    bool linear = false;
    double width = 1.0;
    double r = 2.2;
    double snapshot_every = 1.0;
    double dump_every = 0.0;
    bool check_rates = false;
    double fit_from = 5.0;
    double fit_to = 20.0;
};

// Everything that determines the artifacts; recorded verbatim in the manifest.
struct RunConfig {
    std::string subcommand;
    std::filesystem::path params_file;
    twophase::ModelParams params;
    std::filesystem::path out;
    std::optional<int> n;
    std::optional<double> L;
    std::optional<double> sigma;
    std::vector<double> t;
    std::optional<double> dt;
    std::optional<double> eps0;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    double tol_quad = 1e-8;

    SpectrumOptions spectrum;
    ExpansionOptions expansion;
    GreenOptions green;
    WavesOptions waves;
    ConvolveOptions convolve;
    EvolveOptions evolve;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Collects artifacts and checks of one invocation.
class Session {
public:
    explicit Session(const RunConfig& cfg);

    const RunConfig& config() const noexcept { return cfg_; }
    const twophase::Model& model() const noexcept { return model_; }

    // opens <out>/<name> and writes the versioned schema line and the column header
    std::ofstream csv(const std::string& name, const std::string& schema, const std::vector<std::string>& columns);
    std::ofstream binary(const std::string& name);

    void check(std::string name, bool passed, std::string detail);
    // runs one campaign; an exception becomes a failed check named after the campaign
    template <class F>
    void guarded(const std::string& campaign, F&& f);

    void set_section(const std::string& key, nlohmann::json value) { sections_[key] = std::move(value); }
    bool all_passed() const;
    const std::vector<Check>& checks() const noexcept { return checks_; }
    void write_manifest() const;

private:
    RunConfig cfg_;
    twophase::Model model_;
    std::vector<std::string> files_;
    std::vector<Check> checks_;
    nlohmann::json sections_ = nlohmann::json::object();
};

template <class F>
void Session::guarded(const std::string& campaign, F&& f)
{
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        // rejected inputs (grid sizes, parameter records, sample grids) are configuration errors
        throw ConfigError(campaign + ": " + e.what());
    } catch (const std::exception& e) {
        check(campaign + ".completed", false, e.what());
    }
}

// CSV field formatting: shortest round-trip form, '.' decimal point
std::string num(double v);

void run_spectrum(Session& s);
void run_expansion(Session& s);
void run_green(Session& s);
void run_waves(Session& s);
void run_convolve(Session& s);
void run_evolve(Session& s);

}  // namespace cli
