#include "twophase/model.hpp"

#include <cmath>

namespace twophase {

void validate(const ModelParams& p)
{
    if (!(p.rho_bar > 0.0)) throw ParameterError("rho_bar", "rho_bar > 0");
    if (!(p.n_bar > 0.0)) throw ParameterError("n_bar", "n_bar > 0");
    if (!(p.a_coef > 0.0)) throw ParameterError("a_coef", "a_coef > 0");
    if (!(p.gamma >= 1.0)) throw ParameterError("gamma", "gamma >= 1");
    if (!(p.mu > 0.0)) throw ParameterError("mu", "mu > 0");
    if (!std::isfinite(p.lambda) || !(2.0 * p.mu / 3.0 + p.lambda >= 0.0))
        throw ParameterError("lambda", "(2/3) mu + lambda >= 0");
    for (double v : {p.rho_bar, p.n_bar, p.a_coef, p.gamma, p.mu})
        if (!std::isfinite(v)) throw ParameterError("record", "finite values");
}

DerivedParams derive(const ModelParams& p)
{
    validate(p);
    DerivedParams d{};
    d.alpha1 = p.a_coef * p.gamma * std::pow(p.n_bar, p.gamma - 1.0);
    d.alpha2 = p.rho_bar / p.n_bar;
    d.mu_bar = p.mu / p.n_bar;
    d.lambda_bar = p.lambda / p.n_bar;
    d.nu = 2.0 * d.mu_bar + d.lambda_bar;
    d.c = std::sqrt((d.alpha1 + d.alpha2) / (d.alpha2 + 1.0));
    return d;
}

double sound_speed_physical(const ModelParams& p)
{
    const double dp = p.a_coef * p.gamma * std::pow(p.n_bar, p.gamma - 1.0);
    return std::sqrt((p.n_bar * dp + p.rho_bar) / (p.n_bar + p.rho_bar));
}

ModelParams canonical_params() { return ModelParams{}; }

ModelParams random_admissible(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto logu = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * u(rng)); };
    ModelParams p;
    p.rho_bar = logu(-1.0, 1.0);
    p.n_bar = logu(-1.0, 1.0);
    p.a_coef = logu(-0.5, 0.5);
    p.gamma = 1.0 + 2.0 * u(rng);
    p.mu = logu(-1.0, 0.7);
    p.lambda = p.mu * (-2.0 / 3.0 + (2.0 + 2.0 / 3.0) * u(rng));
    return p;
}

double Model::pressure(double density) const
{
    return params_.a_coef * std::pow(density, params_.gamma);
}

double Model::pressure_prime(double density) const
{
    return params_.a_coef * params_.gamma * std::pow(density, params_.gamma - 1.0);
}

}  // namespace twophase
