#include "test_main.hpp"

#include <cmath>
#include <random>

#include "twophase/asymptotics.hpp"

using namespace twophase;

namespace {
const DerivedParams canon = derive(canonical_params());
}

TEST_CASE("printed coefficients at canonical parameters")
{
    const double s = 0.05;
    CHECK(expansion_eval(find_expansion("r2", Regime::low), canon, s).real() == doctest::Approx(-2.0 / 3.0 * s * s));
    const cd r3 = expansion_eval(find_expansion("r3.re", Regime::low), canon, s);
    CHECK(r3.real() == doctest::Approx(-13.0 / 24.0 * s * s));
    CHECK(r3.imag() == doctest::Approx(canon.c * s));
    CHECK(expansion_eval(find_expansion("r1", Regime::high), canon, 20.0).real() == doctest::Approx(-1.0));
    CHECK(expansion_eval(find_expansion("r2", Regime::high), canon, 20.0).real() == doctest::Approx(-800.0));
    CHECK(expansion_eval(find_expansion("kappa2", Regime::low), canon, s).real() == doctest::Approx(-0.5 * s * s));
}

TEST_CASE("scaled bounds reduce to the defaults at canonical parameters")
{
    const auto b = scaled_bounds(canon);
    CHECK(b.eta1 == doctest::Approx(0.1));
    CHECK(b.eta2 == doctest::Approx(10.0));
}

TEST_CASE("regime violations are rejected")
{
    CHECK_THROWS_AS(expansion_eval(find_expansion("r2", Regime::low), canon, 1.0), RegimeError);
    CHECK_THROWS_AS(expansion_eval(find_expansion("r2", Regime::high), canon, 1.0), RegimeError);
}

TEST_CASE("every expansion reaches its claimed order")
{
    std::mt19937_64 rng(21);
    for (int set = 0; set <= 20; ++set) {
        const auto dp = derive(set == 0 ? canonical_params() : random_admissible(rng));
        for (const auto& e : expansion_catalog()) {
            const auto b = scaled_bounds(dp);
            const auto seq = default_sequence(e.regime, b);
            const auto res = remainder_order_check(e, dp, seq, b);
            INFO("set " << set << " branch " << e.branch << " regime " << regime_name(e.regime) << " slope "
                        << res.slope);
            CHECK(res.passed);
        }
    }
}

TEST_CASE("canonical slopes sit near the claimed values")
{
    const auto r2 = remainder_order_check(find_expansion("r2", Regime::low), canon, default_sequence(Regime::low));
    CHECK(r2.slope == doctest::Approx(4.0).epsilon(0.05));
    const auto im = remainder_order_check(find_expansion("r3.im", Regime::low), canon, default_sequence(Regime::low));
    CHECK(im.slope == doctest::Approx(3.0).epsilon(0.05));
    const auto k2 = remainder_order_check(find_expansion("kappa2", Regime::low), canon, default_sequence(Regime::low));
    CHECK(k2.slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("degenerate fit falls back to an absolute check")
{
    const std::vector<double> s{1, 2, 4, 8}, e{0, 0, 0, 0}, sc{1, 1, 1, 1};
    const auto r = fit_order(s, e, Regime::high, 2.0, sc);
    CHECK(r.degenerate);
    CHECK(r.passed);
}

TEST_CASE("low expansions are consistent with the trace")
{
    std::vector<double> s{0.1, 0.05, 0.025, 0.0125}, e, sc(4, 1.0);
    for (double v : s) e.push_back(low_expansion_sum_defect(canon, v));
    // the printed s^2 coefficients sum exactly to -nu, so the defect is at rounding level
    for (double v : e) CHECK(v < 1e-13);
}

TEST_CASE("projector leading terms")
{
    CHECK(projector_leading(canon, 1)(2, 0) == cd(-1.0 / 3.0));
    CHECK(projector_leading(canon, 1)(2, 2) == cd(1.0 / 3.0));
    std::mt19937_64 rng(4);
    for (int set = 0; set < 10; ++set) {
        const auto dp = derive(set == 0 ? canonical_params() : random_admissible(rng));
        const auto res = projector_leading_check(dp, default_sequence(Regime::low));
        for (const auto& r : res) {
            INFO(r.name << " slope " << r.slope);
            CHECK(r.passed);
        }
    }
}

TEST_CASE("singular weights")
{
    const auto w33 = singular_weight(canon, {Block::n, Block::n}, Part::scalar, 1.0);
    CHECK(w33.converged);
    CHECK(std::abs(w33.value - std::exp(-1.0)) < 1e-6);
    const auto w13 = singular_weight(canon, {Block::rho, Block::n}, Part::scalar, 1.0);
    CHECK(w13.converged);
    CHECK(std::abs(w13.value) < 1e-4);
    const auto w22 = singular_weight(canon, {Block::m, Block::m}, Part::transverse, 1.0);
    CHECK(w22.converged);
    CHECK(std::abs(w22.value - std::exp(-1.0)) < 1e-6);
    const auto w11 = singular_weight(canon, {Block::rho, Block::rho}, Part::scalar, 1.0);
    CHECK(!w11.converged);
}
