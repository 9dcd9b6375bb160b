#pragma once

#include <random>
#include <stdexcept>
#include <string>

namespace twophase {

struct ModelParams {
    double rho_bar = 1.0;
    double n_bar = 1.0;
    double a_coef = 1.0;
    double gamma = 2.0;
    double mu = 1.0;
    double lambda = 0.0;
};

struct DerivedParams {
    double alpha1;
    double alpha2;
    double mu_bar;
    double lambda_bar;
    double nu;
    double c;
};

class ParameterError : public std::invalid_argument {
public:
    ParameterError(std::string field, const std::string& condition)
        : std::invalid_argument("inadmissible parameter " + field + ": requires " + condition),
          field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

void validate(const ModelParams& p);
DerivedParams derive(const ModelParams& p);

// c from the physical form sqrt((n P'(n) + rho)/(n + rho)) at the background state
double sound_speed_physical(const ModelParams& p);

ModelParams canonical_params();
ModelParams random_admissible(std::mt19937_64& rng);

// Immutable record of raw and derived constants; the only validation point.
class Model {
public:
    explicit Model(const ModelParams& p) : params_(p), derived_(derive(p)) {}

    const ModelParams& params() const noexcept { return params_; }
    const DerivedParams& derived() const noexcept { return derived_; }

    double pressure(double density) const;
    double pressure_prime(double density) const;

private:
    ModelParams params_;
    DerivedParams derived_;
};

}  // namespace twophase
