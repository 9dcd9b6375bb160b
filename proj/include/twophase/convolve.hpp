#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twophase/quadrature.hpp"

namespace twophase {

// Nonnegative radial profile f(|x|). `moment(a, b)` = int_a^b s f(s) ds when known in closed form;
// `peaks` are radii where f concentrates (used as quadrature breakpoints).
struct RadialKernel {
    std::function<double(double)> f;
    std::function<double(double, double)> moment;
    std::vector<double> peaks;
    double width = 1.0;
};

// amp (1 + r^2 / tau)^{-n}
RadialKernel diffusion_kernel(double amp, double tau, double n);
// amp (1 + (r - a)^2 / tau)^{-n}
RadialKernel huygens_kernel(double amp, double a, double tau, double n);

// int_{R^3} f(|x - y|) g(|y|) dy at |x| = r0
QuadResult radial_product_integral(const RadialKernel& f, const RadialKernel& g, double r0,
                                   const QuadOptions& opt = {});

enum class ConvKind { L52a, L52b, K1, K2, K3 };
std::string conv_name(ConvKind k);
ConvKind parse_conv(const std::string& name);

struct ConvSpec {
    ConvKind which = ConvKind::L52a;
    double n1 = 2.0;
    double n2 = 2.0;
    double N = 3.0;
    double r1 = 2.2;
    double c = 1.0;

    void validate() const;
    double n3() const { return n1 < n2 ? n1 : n2; }
};

struct ConvValue {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double error = 0.0;
    bool converged = true;
};

ConvValue lemma52_eval(const ConvSpec& spec, double x_mag, double t, const QuadOptions& opt = {});
ConvValue k_eval(const ConvSpec& spec, double x_mag, double t, const QuadOptions& opt = {});
// dispatches on spec.which
ConvValue conv_eval(const ConvSpec& spec, double x_mag, double t, const QuadOptions& opt = {});

struct SampleGrid {
    std::vector<double> x_over_ct = {0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0};
    std::vector<double> times = {1.0, 4.0, 16.0, 64.0, 256.0};
};

struct SampleRow {
    double x;
    double t;
    ConvValue v;
};

struct ConstantEstimate {
    double c_max = 0.0;
    double x_at = 0.0;
    double t_at = 0.0;
    std::vector<SampleRow> rows;
};

ConstantEstimate constant_estimate(const ConvSpec& spec, const SampleGrid& grid, const QuadOptions& opt = {});

}  // namespace twophase
