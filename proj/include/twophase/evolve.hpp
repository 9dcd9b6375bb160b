#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "twophase/green.hpp"
#include "twophase/grid.hpp"
#include "twophase/model.hpp"

namespace twophase {

// Component slots of the state, same order as the full symbol.
inline constexpr int kComponents = 8;

struct InitialDataSpec {
    double eps0 = 1e-3;
    double r = 2.2;
    // bump profile eps0 * w_c * (1 + |x|^2 / width^2)^{-r}
    double width = 1.0;
    std::array<double, kComponents> weights = {1.0, 0.8, -0.6, 0.5, 0.7, -0.4, 0.9, 0.3};
    // when set, weights are redrawn uniformly from [-1, 1]
    std::optional<std::uint64_t> seed;
    bool zero_mean_momentum = false;

    void validate() const;
    std::array<double, kComponents> effective_weights() const;
};

class PositivityError : public std::runtime_error {
public:
    PositivityError(const std::string& which, double x, double y, double z, double value);
};

class SimState {
public:
    explicit SimState(const FrequencyGrid& g);

    const FrequencyGrid& grid() const noexcept { return grid_; }
    double time = 0.0;
    // unnormalized r2c coefficients of each component
    std::array<std::vector<std::complex<double>>, kComponents> hat;
    // physical values, natural order; Solver::step leaves them stale until sync_physical
    std::array<std::vector<double>, kComponents> u;

    SpatialField field(int comp, const std::string& tag = {}) const;

private:
    FrequencyGrid grid_;
};

std::string component_name(int comp);

// builds hat from physical values (Nyquist planes dropped, u re-synthesized)
SimState state_from_physical(const FrequencyGrid& grid, std::array<std::vector<double>, kComponents> u, double time = 0.0);

SimState init_localized(const InitialDataSpec& spec, const FrequencyGrid& grid, const Model& model);

struct NonlinearTerms {
    std::array<std::vector<double>, 3> f1;
    std::array<std::vector<double>, 3> f2;
    // the non-divergence pieces alone
    std::array<std::vector<double>, 3> f1_last;
    std::array<std::vector<double>, 3> f2_last;
};

struct Diagnostics {
    double t = 0.0;
    double mass_rho = 0.0;
    double mass_n = 0.0;
    std::array<double, 3> momentum{};
    // rho, |m|, n, |w|; raw and with the box mean removed
    std::array<double, 4> l2{};
    std::array<double, 4> linf{};
    std::array<double, 4> l2_fluct{};
    std::array<double, 4> linf_fluct{};
};

struct SolverOptions {
    bool nonlinear = true;
};

// Exponential Euler: U <- e^{dt A}(U + dt N(U)), linear part applied mode by mode from an axial cache.
class Solver {
public:
    Solver(const Model& model, const FrequencyGrid& grid, double dt, const SolverOptions& opt = {});
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    double dt() const noexcept { return dt_; }
    const FrequencyGrid& grid() const noexcept { return grid_; }

    void step(SimState& s);
    NonlinearTerms nonlinear_rhs(const SimState& s);
    Diagnostics diagnostics(const SimState& s) const;
    // recompute u from hat
    void sync_physical(SimState& s);

private:
    struct Impl;
    Model model_;
    FrequencyGrid grid_;
    double dt_;
    SolverOptions opt_;
    std::unique_ptr<Impl> impl_;
};

NonlinearTerms nonlinear_rhs(const Model& model, const SimState& s);
SimState step(const Model& model, const SimState& s, double dt, const SolverOptions& opt = {});

// exact linear evolution of a state by per-mode e^{tA(xi)} from the full symbol
SimState linear_reference(const DerivedParams& dp, const SimState& s0, double t);
// ||a - b||_2 / ||b||_2 over all eight components
double relative_l2_difference(const SimState& a, const SimState& b);

struct RunAbort {
    double t;
    std::string what;
};

struct RunResult {
    std::vector<Diagnostics> series;
    std::optional<RunAbort> abort;
    bool wrap_warning = false;
    SimState final_state;
};

struct RunOptions {
    SolverOptions solver;
    double wrap_pad = 0.0;
    // called at every snapshot with the current state
    std::function<void(const SimState&)> on_snapshot;
};

RunResult run(const Model& model, const InitialDataSpec& spec, const FrequencyGrid& grid, double t_end, double dt,
              std::span<const double> snapshots, const RunOptions& opt = {});
// evolve a given state instead of fresh initial data
RunResult run_from(const Model& model, SimState s, double t_end, double dt, std::span<const double> snapshots,
                   const RunOptions& opt = {});

// least-squares slope of log norm against log(1 + t) over t in [t0, t1]
double decay_slope(std::span<const double> t, std::span<const double> norm, double t0, double t1);

}  // namespace twophase
