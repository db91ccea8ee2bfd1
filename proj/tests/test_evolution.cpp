#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "support.hpp"
#include "vstab/errors.hpp"
#include "vstab/evolution.hpp"
#include "vstab/roots.hpp"

using namespace vstab;
using testing::maxwellian;
using testing::two_stream;

namespace {

constexpr double kRoot02 = 0.24094977278914395;  // two_stream u = 2, k = 0.2

std::vector<double> grid_times(double T, double dt) {
    std::vector<double> t;
    for (int i = 0; i * dt <= T + 1e-12; ++i) t.push_back(i * dt);
    return t;
}

// Smooth random initial perturbation: a few shifted Gaussians with seeded weights.
std::function<cplx(double)> random_smooth(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> a(-1.0, 1.0), c(-3.0, 3.0), s(0.5, 1.5);
    std::vector<std::tuple<cplx, double, double>> parts;
    for (int i = 0; i < 4; ++i) parts.emplace_back(cplx(a(rng), a(rng)), c(rng), s(rng));
    return [parts](double v) {
        cplx acc{};
        for (const auto& [w, cc, ss] : parts) acc += w * std::exp(-(v - cc) * (v - cc) / (2 * ss * ss));
        return acc;
    };
}

}  // namespace

TEST_CASE("fit_growth") {
    const auto t = grid_times(20.0, 0.01);
    std::vector<double> exact, wobble, flat(t.size(), 3.0);
    for (double x : t) {
        exact.push_back(std::exp(0.37 * x));
        wobble.push_back(std::exp(0.37 * x) * (1 + 0.01 * std::sin(5 * x)));
    }
    const auto e = fit_growth(t, exact, {10.0, 20.0});
    CHECK(std::abs(e.rate - 0.37) < 1e-12);
    CHECK(e.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fit_growth(t, wobble, {10.0, 20.0}).rate - 0.37) < 5e-3);
    const auto f = fit_growth(t, flat, {10.0, 20.0});
    CHECK(f.rate == 0.0);
    CHECK(f.r2 == 1.0);
    std::vector<double> holed = exact;
    holed[1500] = 0.0;
    CHECK_THROWS_AS(fit_growth(t, holed, {10.0, 20.0}), InvalidInput);
    CHECK_THROWS_AS(fit_growth(t, exact, {10.0, 30.0}), InvalidInput);
    CHECK_THROWS_AS(fit_growth(t, exact, {12.0, 11.0}), InvalidInput);
}

TEST_CASE("decoupled transport leaves the field unchanged initially") {
    const auto grid = make_velocity_grid(maxwellian(), 1024);
    std::vector<double> phi(grid.v.size(), 0.0);
    std::vector<cplx> f(grid.v.size()), df;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-grid.v[i] * grid.v[i]);
    cplx dg;
    mode_rhs(grid, phi, 0.7, f, cplx(1.0, 2.0), df, dg);
    CHECK(std::abs(dg) < 1e-14);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(df[i] == cplx(0.0, -0.7 * grid.v[i]) * f[i]);
    CHECK(std::abs(poisson_field(grid, 2.0, f) - cplx(0.0, 0.5 * std::sqrt(M_PI))) < 1e-12);
    CHECK_THROWS_AS(make_velocity_grid(maxwellian(), 100), InvalidInput);
}

TEST_CASE("stable maxwellian field does not grow") {
    const auto r = evolve_mode(maxwellian(), 1.0, default_initial, 40.0, 0.005);
    CHECK(r.fitted_rate <= 1e-3);
    CHECK_FALSE(r.overflow);
    CHECK(r.charge_residual < 1e-10);
    CHECK(r.fit_window.lo == doctest::Approx(20.0));
}

TEST_CASE("two-stream growth rate matches the dispersion root") {
    const auto start = std::chrono::steady_clock::now();
    const auto p = two_stream(2.0);
    EvolveOptions opt;
    opt.expected_rate = kRoot02;
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto r = evolve_mode(p, 0.2, random_smooth(seed), 100.0, 0.01, opt);
        CHECK(std::abs(r.fitted_rate / kRoot02 - 1.0) < 0.02);
        CHECK(r.fit_r2 > 0.999);
        CHECK_FALSE(r.inconclusive);
        CHECK(r.charge_residual < 1e-10);
    }
    const auto roots = find_roots(p, 0.2, default_search_box(p, 0.2));
    REQUIRE(roots.size() == 1);
    const auto r = evolve_mode(p, 0.2, default_initial, 100.0, 0.01);
    CHECK(std::abs(r.fitted_rate / roots[0].lambda.real() - 1.0) < 0.02);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 30.0);
}

TEST_CASE("time stepping is fourth order") {
    // Self-convergence of g(T): differences between successive halvings shrink by 2^4.
    const auto p = two_stream(2.0);
    auto g_end = [&](double dt) { return evolve_mode(p, 0.2, default_initial, 20.0, dt).g_hat.back(); };
    const cplx a = g_end(0.04), b = g_end(0.02), c = g_end(0.01);
    const double ratio = std::abs(a - b) / std::abs(b - c);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("velocity refinement barely moves the rate") {
    const auto p = two_stream(2.0);
    EvolveOptions fine;
    fine.n_v = 4096;
    const double r1 = evolve_mode(p, 0.2, default_initial, 100.0, 0.01).fitted_rate;
    const double r2 = evolve_mode(p, 0.2, default_initial, 100.0, 0.01, fine).fitted_rate;
    CHECK(std::abs(r2 / r1 - 1.0) < 0.005);
}

TEST_CASE("volterra form with a zero kernel returns the free field") {
    const auto zero = testing::custom([](double) { return 0.0; }, [](double, int) { return 0.0; }, {-5.0, 5.0});
    const auto r = volterra_mode(zero, 0.5, [](double t) { return default_free_field(0.5, t); }, 4.0, 0.01, 10);
    REQUIRE(r.values.size() == 401);
    for (std::size_t i = 0; i < r.values.size(); ++i) CHECK(r.values[i] == default_free_field(0.5, r.times[i]));
    CHECK_FALSE(r.diverged);
}

TEST_CASE("volterra form agrees with time stepping") {
    for (const auto& [p, k] : std::vector<std::pair<VelocityProfile, double>>{{two_stream(2.0), 0.2}, {maxwellian(), 1.0}}) {
        const double T = 5.0, dt = 1e-3;
        const auto v = volterra_mode(p, k, [k](double t) { return default_free_field(k, t); }, T, dt, 200);
        const auto e = evolve_mode(p, k, default_initial, T, dt);
        REQUIRE_FALSE(v.diverged);
        REQUIRE(v.values.size() == e.g_hat.size());
        double sup = 0.0;
        for (std::size_t i = 0; i < v.values.size(); ++i) sup = std::max(sup, std::abs(v.values[i] - e.g_hat[i]));
        CHECK(sup < 1e-4);
    }
}

TEST_CASE("neumann series stalls on an unstable mode over long times") {
    const auto r = volterra_mode(two_stream(2.0), 0.2, [](double t) { return default_free_field(0.2, t); }, 100.0, 0.1, 30);
    CHECK(r.diverged);
    CHECK(r.terms == 30);
    CHECK(r.last_ratio > 1e-10);
}

TEST_CASE("evolution preconditions") {
    const auto p = two_stream(2.0);
    CHECK_THROWS_AS(evolve_mode(p, 0.2, default_initial, 10.0, 0.5), InvalidInput);
    CHECK_THROWS_AS(evolve_mode(p, 0.2, default_initial, 5000.0, 0.01), InvalidInput);
    CHECK_THROWS_AS(evolve_mode(p, 0.0, default_initial, 10.0, 0.01), InvalidInput);
    EvolveOptions early;
    early.fit_start = 0.1;
    CHECK_THROWS_AS(evolve_mode(p, 0.2, default_initial, 10.0, 0.01, early), InvalidInput);
    CHECK_THROWS_AS(volterra_mode(testing::signed_synthetic(), 0.2, default_initial, 1.0, 0.01, 5), InvalidInput);
    CHECK_THROWS_AS(volterra_mode(p, 0.2, default_initial, 1.005, 0.01, 5), InvalidInput);
    CHECK_THROWS_AS(volterra_mode(p, 0.2, default_initial, 1.0, 0.01, 0), InvalidInput);
}

TEST_CASE("overflow stops the run early") {
    const auto huge = [](double v) { return cplx(1e285, 0.0) * default_initial(v); };
    const auto r = evolve_mode(two_stream(2.0), 0.2, huge, 100.0, 0.01);
    CHECK(r.overflow);
    CHECK(r.times.back() < 100.0);
    CHECK(r.times.back() > 20.0);
    CHECK(std::abs(r.fitted_rate / kRoot02 - 1.0) < 0.05);
    CHECK(std::isfinite(r.g_abs.back()));
}
