#include "test_main.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "twophase/green.hpp"
#include "twophase/waves.hpp"

using namespace twophase;

namespace {

SpatialField heat_kernel(const FrequencyGrid& g, double t)
{
    auto f = synthesize_symbol(g, [t](int, int, int, const Vec3& xi) { return cd(std::exp(-xi.squaredNorm() * t)); },
                               "heat");
    f.time = t;
    return f;
}

std::vector<double> heat_profile_values(double t, std::span<const double> r)
{
    std::vector<double> v;
    for (double x : r) v.push_back(std::pow(4.0 * std::numbers::pi * t, -1.5) * std::exp(-x * x / (4.0 * t)));
    return v;
}

}  // namespace

TEST_CASE("envelope values")
{
    const WaveEnvelope d{WaveKind::diffusion, 1.5, 1.5, 0.0};
    const WaveEnvelope h{WaveKind::huygens, 2.0, 1.5, 1.3};
    CHECK(envelope_eval(d, 0.0, 0.0) == 1.0);
    for (double t : {0.5, 3.0, 10.0}) {
        CHECK(envelope_eval(h, h.c * t, t) == doctest::Approx(std::pow(1.0 + t, -2.0)));
        CHECK(envelope_eval(d, std::sqrt(1.0 + t), t) == doctest::Approx(std::pow(1.0 + t, -1.5) * std::pow(2.0, -1.5)));
        // huygens envelope peaks on the front
        CHECK(envelope_eval(h, h.c * t + 0.1, t) < envelope_eval(h, h.c * t, t));
        CHECK(envelope_eval(h, h.c * t - 0.1, t) < envelope_eval(h, h.c * t, t));
    }
    CHECK_THROWS(envelope_eval(d, -1.0, 1.0));
    CHECK_THROWS(WaveEnvelope{WaveKind::huygens, 2.0, 1.5, 0.0}.validate());
}

TEST_CASE("heat kernel ratio against its own envelope")
{
    const FrequencyGrid g(64, 24.0);
    const WaveEnvelope d{WaveKind::diffusion, 1.5, 1.5, 0.0};
    for (double t : {4.0, 8.0}) {
        const auto f = heat_kernel(g, t);
        const auto res = bound_ratio(f, std::span(&d, 1), 0.0);
        // closed form: sup_r (4 pi t)^{-3/2} e^{-r^2/4t} / envelope
        double exact = 0.0;
        for (double r = 0.0; r < 24.0; r += 1e-3)
            exact = std::max(exact, std::pow(4.0 * std::numbers::pi * t, -1.5) * std::exp(-r * r / (4.0 * t)) /
                                        envelope_eval(d, r, t));
        CHECK(res.ratio == doctest::Approx(exact).epsilon(0.02));
        CHECK(res.ratio * std::pow(4.0 * std::numbers::pi, 1.5) == doctest::Approx(exact * std::pow(4.0 * std::numbers::pi, 1.5)).epsilon(0.02));
    }
}

TEST_CASE("heat kernel decay exponents")
{
    const FrequencyGrid g(64, 64.0);
    std::vector<FrontPoint> center;
    std::vector<double> ts, l2;
    for (double t : {20.0, 40.0, 80.0, 160.0}) {
        const auto f = heat_kernel(g, t);
        center.push_back({t, 0.0, f.max_abs()});
        ts.push_back(t - 1.0);  // log(1 + (t-1)) = log t
        l2.push_back(lp_norm(f, 2.0));
    }
    CHECK(amplitude_exponent(center) == doctest::Approx(-1.5).epsilon(0.03));
    CHECK(log_log_fit(ts, l2).slope == doctest::Approx(-0.75).epsilon(0.02));
    // radial average against the closed form
    const FrequencyGrid gs(64, 24.0);
    const auto f = heat_kernel(gs, 4.0);
    const auto p = radial_average(f, gs.spacing(), 10.0);
    const auto exact = heat_profile_values(4.0, p.r);
    for (std::size_t b = 0; b < p.r.size(); ++b) CHECK(p.value[b] == doctest::Approx(exact[b]).epsilon(0.05).scale(f.max_abs() * 1e-2));
}

TEST_CASE("pure wave symbol recovers its speed")
{
    const FrequencyGrid g(64, 32.0);
    const double c = 1.1, sigma = 1.0;
    FrontOptions opt;
    opt.estimator = FrontEstimator::peak;
    std::vector<FrontPoint> pts;
    for (double t : {8.0, 12.0, 16.0, 20.0}) {
        auto f = synthesize_symbol(
            g,
            [&](int, int, int, const Vec3& xi) {
                const double s = xi.norm();
                const double k = s > 0.0 ? std::sin(c * s * t) / (c * s) : t;
                return cd(k * std::exp(-0.5 * sigma * sigma * s * s));
            },
            "wave");
        f.time = t;
        f.sigma = sigma;
        const auto p = radial_average(f, 0.5 * g.spacing(), 31.0);
        pts.push_back(locate_front(p, t, 1.0, default_exclusion(f), opt));
    }
    const auto fs = front_speed(pts);
    CHECK(fs.c_est == doctest::Approx(c).epsilon(0.01));
}

TEST_CASE("no front in a pure diffusion field")
{
    const FrequencyGrid g(64, 24.0);
    const auto f = heat_kernel(g, 8.0);
    const auto p = radial_average(f, g.spacing(), 20.0);
    CHECK_THROWS_AS(locate_front(p, 8.0, 1.0, 2.0), NoFrontError);
    RadialProfile empty;
    CHECK_THROWS_AS(locate_front(empty, 8.0, 1.0, 2.0), NoFrontError);
}

TEST_CASE("projected profile of a longitudinal entry matches the oracle")
{
    const auto dp = derive(canonical_params());
    const FrequencyGrid g(64, 24.0);
    const double t = 6.0, sigma = 1.0;
    const auto f = synthesize(dp, g, t, sigma, GreenComponent{{Block::rho, Block::m}, 0, 0});
    const auto p = projected_profile(f, 0, g.spacing(), 16.0);
    const auto o = radial_oracle(dp, {Block::rho, Block::m}, p.r, t, sigma);
    double scale = 0.0;
    for (double v : o.value) scale = std::max(scale, std::abs(v));
    for (std::size_t b = 1; b < p.r.size(); ++b) CHECK(std::abs(p.value[b] - o.value[b]) < 0.03 * scale);
}

TEST_CASE("lp norms")
{
    const FrequencyGrid g(32, 3.0);
    SpatialField one(g);
    std::fill(one.values.begin(), one.values.end(), 1.0);
    CHECK(lp_norm(one, 2.0) == doctest::Approx(std::pow(6.0, 1.5)));
    CHECK(lp_norm(one, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS(lp_norm(one, 1.0));
}

TEST_CASE("fits")
{
    std::vector<double> t = {5, 8, 12, 20}, y;
    for (double x : t) y.push_back(3.0 * std::pow(1.0 + x, -0.75));
    CHECK(log_log_fit(t, y).slope == doctest::Approx(-0.75).epsilon(1e-12));
    const std::vector<double> same = {2, 2, 2};
    CHECK_THROWS_AS(linear_fit(same, same), FitError);
    std::vector<FrontPoint> narrow = {{5, 0, 1}, {6, 0, 1}, {7, 0, 1}, {8, 0, 1}};
    CHECK_THROWS_AS(amplitude_exponent(narrow), FitError);
    std::vector<FrontPoint> two = {{5, 1, 1}, {6, 2, 1}};
    CHECK_THROWS_AS(front_speed(two), FitError);
}

TEST_CASE("rate table")
{
    const std::vector<double> ps = {1.25, 1.5, 2.0, 4.0, std::numeric_limits<double>::infinity()};
    const auto rows = rate_table(ps);
    CHECK(rows[2].diffusive == doctest::Approx(0.75));
    CHECK(rows[2].huygens == doctest::Approx(0.75));
    CHECK(rows[0].rate == doctest::Approx(0.0));
    CHECK(rows[4].rate == doctest::Approx(1.5));
    CHECK(rows[3].rate == doctest::Approx(1.125));
}
