#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "twophase/grid.hpp"

namespace twophase {

enum class WaveKind { diffusion, huygens };

struct WaveEnvelope {
    WaveKind kind = WaveKind::diffusion;
    double a = 1.5;
    double N = 1.5;
    double c = 1.0;  // huygens only

    void validate() const;
};

double envelope_eval(const WaveEnvelope& env, double r, double t);

struct RatioResult {
    double ratio = 0.0;
    double r_at = 0.0;
    std::size_t points = 0;
};

// sup over lattice points with r_min <= r <= L of |field| / sum of envelopes at the field time
RatioResult bound_ratio(const SpatialField& field, std::span<const WaveEnvelope> envs, double r_min);
double default_exclusion(const SpatialField& field);

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms
};
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
Fit linear_fit(std::span<const double> x, std::span<const double> y);
// slope of log(y) against log(1 + t)
Fit log_log_fit(std::span<const double> t, std::span<const double> y);

// Shell average of 3 (x_axis / r) f for a field holding the axis component of a longitudinal
// scalar-vector entry; by the cubic symmetry of lattice and symbol this is the average of x.G / r.
RadialProfile projected_profile(const SpatialField& f, int axis, double dr, double r_max);

enum class FrontEstimator { peak, lobe_midpoint };

struct FrontPoint {
    double t = 0.0;
    double r_front = 0.0;
    double amplitude = 0.0;
};

class NoFrontError : public std::runtime_error {
public:
    NoFrontError(double t, double separation)
        : std::runtime_error("no separated front at t=" + std::to_string(t) + " (separation " +
                             std::to_string(separation) + ")"),
          separation_(separation) {}
    double separation() const noexcept { return separation_; }

private:
    double separation_;
};

struct FrontOptions {
    FrontEstimator estimator = FrontEstimator::lobe_midpoint;
    // front search starts at this fraction of c_guess t
    double search_from = 0.5;
    // amplitude window [lo c_guess t, hi c_guess t + pad]
    double window_lo = 0.8;
    double window_hi = 1.25;
    double window_pad = 10.0;
    double min_separation = 2.0;
};

// Front location and amplitude from a radial profile at time t.
FrontPoint locate_front(const RadialProfile& p, double t, double c_guess, double r_exclude,
                        const FrontOptions& opt = {});

struct FrontSpeed {
    double c_est = 0.0;
    double residual = 0.0;
    std::vector<FrontPoint> points;
};
FrontSpeed front_speed(std::span<const FrontPoint> points);

// time exponent of front amplitudes; needs >= 4 times spanning a factor >= 4
double amplitude_exponent(std::span<const FrontPoint> points);

double lp_norm(const SpatialField& f, double p);
double lp_norm(std::span<const double> values, double cell_volume, double p);

struct RateRow {
    double p;
    double diffusive;  // (3/2)(1 - 1/p)
    double huygens;    // 2 - 5/(2p), relevant for p in (1, 2]
    double rate;       // the slower of the two for p < 2, diffusive otherwise
};
// p = infinity is encoded as +inf; asserts that both branches coincide at p = 2
std::vector<RateRow> rate_table(std::span<const double> ps);

}  // namespace twophase
