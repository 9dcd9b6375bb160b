#include <fftw3.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>

#include "cli.hpp"

#ifndef TWOPHASE_VERSION
#define TWOPHASE_VERSION "dev"
#endif
#ifndef TWOPHASE_YAML_CPP_VERSION
#define TWOPHASE_YAML_CPP_VERSION "unknown"
#endif

namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) { return fmt::format("{}", v); }

Session::Session(const RunConfig& cfg) : cfg_(cfg), model_(cfg.params)
{
    std::error_code ec;
    fs::create_directories(cfg_.out, ec);
    if (ec || !fs::is_directory(cfg_.out)) throw ConfigError("cannot create output directory " + cfg_.out.string());
    const auto probe = cfg_.out / ".twophase-probe";
    {
        std::ofstream os(probe);
        if (!os) throw ConfigError("output directory " + cfg_.out.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

std::ofstream Session::csv(const std::string& name, const std::string& schema, const std::vector<std::string>& columns)
{
    std::ofstream os(cfg_.out / name);
    if (!os) throw ConfigError("cannot write " + (cfg_.out / name).string());
    files_.push_back(name);
    os << "# twophase-csv v1 " << schema << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    return os;
}

std::ofstream Session::binary(const std::string& name)
{
    std::ofstream os(cfg_.out / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (cfg_.out / name).string());
    files_.push_back(name);
    return os;
}

void Session::check(std::string name, bool passed, std::string detail)
{
    checks_.push_back({std::move(name), passed, std::move(detail)});
}

bool Session::all_passed() const
{
    for (const auto& c : checks_)
        if (!c.passed) return false;
    return true;
}

namespace {

template <class T>
json opt(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

}  // namespace

void Session::write_manifest() const
{
    const auto& p = cfg_.params;
    const auto& d = model_.derived();
    json m;
    m["tool"] = "twophase";
    m["version"] = TWOPHASE_VERSION;
    m["subcommand"] = cfg_.subcommand;
    m["inputs"] = {
        {"params_file", cfg_.params_file.empty() ? json(nullptr) : json(cfg_.params_file.string())},
        {"model", {{"rho_bar", p.rho_bar}, {"n_bar", p.n_bar}, {"a_coef", p.a_coef}, {"gamma", p.gamma}, {"mu", p.mu}, {"lambda", p.lambda}}},
        {"derived", {{"alpha1", d.alpha1}, {"alpha2", d.alpha2}, {"mu_bar", d.mu_bar}, {"lambda_bar", d.lambda_bar}, {"nu", d.nu}, {"c", d.c}}},
        {"flags", {{"n", opt(cfg_.n)}, {"L", opt(cfg_.L)}, {"sigma", opt(cfg_.sigma)}, {"t", cfg_.t}, {"dt", opt(cfg_.dt)},
                   {"eps0", opt(cfg_.eps0)}, {"seed", opt(cfg_.seed)}, {"threads", cfg_.threads}}},
    };
    m["tolerances"] = {{"tol_quad", cfg_.tol_quad}};
    m["libraries"] = {
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
        {"boost", std::string(BOOST_LIB_VERSION)},
        {"fftw", std::string(fftw_version)},
        {"yaml-cpp", TWOPHASE_YAML_CPP_VERSION},
        {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
        {"fmt", FMT_VERSION},
    };
    m["campaigns"] = sections_;
    m["artifacts"] = files_;
    json checks = json::array();
    int failed = 0;
    for (const auto& c : checks_) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        failed += !c.passed;
    }
    m["checks"] = checks;
    std::vector<std::string> failing;
    for (const auto& c : checks_)
        if (!c.passed) failing.push_back(c.name);
    m["summary"] = {{"checks", checks_.size()}, {"failed", failed}, {"failing", failing}, {"all_passed", failed == 0}};

    std::ofstream os(cfg_.out / "manifest.json");
    if (!os) throw ConfigError("cannot write manifest in " + cfg_.out.string());
    os << m.dump(2) << "\n";
}

}  // namespace cli
