#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "twophase/spectral.hpp"

namespace twophase {

enum class Regime { low, high };
enum class Family { compressible, incompressible };
enum class Component { value, real, imag };

struct RegimeBounds {
    double eta1 = 0.1;
    double eta2 = 10.0;
};

struct ExpansionSpec {
    std::string branch;  // r1..r4, kappa1, kappa2 with an optional .re/.im suffix
    Family family;
    int index;  // continuation label 0..3 (compressible) or 0..1
    Regime regime;
    Component component;
    // low regime: |exact - expansion| = O(s^order); high regime: O(s^-order)
    double claimed_order;
    std::function<cd(const DerivedParams&, double)> evaluate;
};

// base bounds rescaled by the crossover frequencies of dp (factor 1 at canonical parameters)
RegimeBounds scaled_bounds(const DerivedParams& dp, const RegimeBounds& base = {});

class RegimeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const std::vector<ExpansionSpec>& expansion_catalog();
const ExpansionSpec& find_expansion(const std::string& branch, Regime regime);

cd expansion_eval(const ExpansionSpec& spec, const DerivedParams& dp, double s,
                  const RegimeBounds& bounds = {});

// exact root matched to the spec: continuation label at low frequency,
// nearest root to the printed expansion at high frequency
cd exact_branch(const ExpansionSpec& spec, const DerivedParams& dp, double s);

struct OrderResult {
    double slope = 0.0;
    bool passed = false;
    bool degenerate = false;
    std::vector<double> errors;
};

inline constexpr double order_tolerance = 0.3;

OrderResult fit_order(std::span<const double> s, std::span<const double> errors, Regime regime,
                      double claimed, std::span<const double> scales);
OrderResult remainder_order_check(const ExpansionSpec& spec, const DerivedParams& dp,
                                  std::span<const double> s_sequence, const RegimeBounds& bounds = {});
std::vector<double> default_sequence(Regime regime, const RegimeBounds& bounds = {});

struct ProjectorOrder {
    std::string name;  // P1..P4, Q1, Q2
    double slope;
    bool passed;
    std::vector<double> deviations;
};

CMat4 projector_leading(const DerivedParams& dp, int i);
CMat2 incompressible_projector_leading(const DerivedParams& dp, int i);
std::vector<ProjectorOrder> projector_leading_check(const DerivedParams& dp, std::span<const double> s_sequence);

// sum of the four low-frequency expansions minus the trace identity
double low_expansion_sum_defect(const DerivedParams& dp, double s);

struct SingularWeight {
    cd value;
    bool converged;
    std::array<cd, 3> samples;
};

// bounded high-frequency limit of one symbol entry; samples at s0 * {1, 2, 4}
SingularWeight singular_weight(const DerivedParams& dp, GreenBlockSelector sel, Part part, double t,
                               double s0 = 50.0);

std::string regime_name(Regime r);

}  // namespace twophase
