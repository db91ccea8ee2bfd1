#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "vstab/errors.hpp"
#include "vstab/quadrature.hpp"

using namespace vstab;
using testing::maxwellian;
using testing::two_stream;

namespace {
const double kSqrtPi = std::sqrt(M_PI);
}

TEST_CASE("gaussian integrals") {
    const auto r = integrate_line([](double v) { return cplx(std::exp(-v * v), 0.0); }, {-12.0, 12.0}, 1e-14);
    CHECK(std::abs(r.value - kSqrtPi) < 1e-13);
    CHECK(r.abs_err < 1e-13);

    QuadOptions opt;
    opt.abs_tol = 1e-13;
    const auto m2 = integrate([](double v) { return cplx(v * v * std::exp(-v * v), 0.0); }, -12.0, 12.0, opt);
    CHECK(std::abs(m2.value - 0.5 * kSqrtPi) < 1e-13);
    const auto shifted = integrate([](double v) { return std::exp(cplx(-v * v, 2.0 * v)); }, -12.0, 12.0, opt);
    CHECK(std::abs(shifted.value - kSqrtPi * std::exp(-1.0)) < 1e-13);
}

TEST_CASE("complex integrand against a fine trapezoid") {
    const cplx z(1.0, 1.0);
    auto g = [z](double v) { return std::exp(-v * v) / (v - z); };
    const cplx ref = testing::trapezoid(g, -12.0, 12.0, 1000000);
    const auto r = integrate_line(g, {-12.0, 12.0}, 1e-13);
    CHECK(std::abs(r.value - ref) < 1e-12);
}

TEST_CASE("budget exhaustion and oversized tails fail loudly") {
    QuadOptions opt;
    opt.max_panels = 8;
    opt.abs_tol = 1e-14;
    auto spike = [](double v) { return cplx(1.0 / (1e-8 + v * v), 0.0); };
    try {
        integrate(spike, -1.0, 1.0, opt);
        FAIL("expected NumericalFailure");
    } catch (const NumericalFailure& e) {
        CHECK(std::string(e.what()).find("panel") != std::string::npos);
    }
    QuadOptions tail;
    tail.abs_tol = 1e-10;
    tail.tail_bound = 1e-6;
    CHECK_THROWS_AS(integrate([](double) { return cplx(1.0, 0.0); }, 0.0, 1.0, tail), NumericalFailure);
    CHECK_THROWS_AS(integrate([](double v) { return cplx(1.0 / v, 0.0); }, 0.0, 1.0, QuadOptions{}), NumericalFailure);
}

TEST_CASE("cauchy integral matches the trapezoid oracle") {
    const auto p = maxwellian();
    for (cplx z : {cplx(1.0, 1.0), cplx(-0.5, 2.0), cplx(2.0, -0.7), cplx(0.0, 3.0)}) {
        auto g = [&](double v) { return p.phi(v) / (v - z); };
        const cplx ref = testing::trapezoid(g, -12.0, 12.0, 1000000);
        CHECK(std::abs(cauchy_integral(p, z) - ref) < 1e-12);
    }
}

TEST_CASE("cauchy integral frozen value") {
    // Faddeeva-function oracle: integral phi/(v - z) = -2 (1 + z w-tilde(z)).
    const cplx c = cauchy_integral(maxwellian(), cplx(1.0, 0.5));
    CHECK(std::abs(c - cplx(-0.15550694044018412, -0.65036462441706167)) < 1e-12);
}

TEST_CASE("cauchy integral far from the axis and its symmetries") {
    const auto p = maxwellian();
    const double l1 = 2.0 / kSqrtPi;
    CHECK(std::abs(cauchy_integral(p, cplx(0.3, 1e3))) <= l1 / 1e3);
    for (double t : {0.01, 0.5, 3.0, -2.0}) {
        const cplx c = cauchy_integral(p, cplx(0.0, t));
        CHECK(std::abs(c.imag()) < 1e-14);
    }
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> re(-4.0, 4.0), im(0.01, 4.0);
    const auto b = testing::bump_on_tail();
    for (int i = 0; i < 20; ++i) {
        const cplx z(re(rng), im(rng));
        CHECK(std::abs(cauchy_integral(b, std::conj(z)) - std::conj(cauchy_integral(b, z))) < 1e-13);
    }
}

TEST_CASE("property: cauchy integral obeys the L1 bound on a grid") {
    for (const auto& p : {maxwellian(), two_stream(2.0), testing::bump_on_tail()}) {
        const double l1 = moment(p, MomentKind::int_absphi);
        for (double y : {0.01, 0.1, 1.0, 10.0}) {
            for (double x = -6.0; x <= 6.0; x += 0.5) {
                CHECK(std::abs(cauchy_integral(p, cplx(x, y))) <= l1 / y * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("cauchy derivative matches finite differences") {
    const auto p = two_stream(2.0);
    const double h = 1e-5;
    for (cplx z : {cplx(0.2, 0.3), cplx(-1.0, 0.05), cplx(2.5, 1.5)}) {
        const cplx fd = (cauchy_integral(p, z + h) - cauchy_integral(p, z - h)) / (2 * h);
        CHECK(std::abs(cauchy_integral_dz(p, z) - fd) < 1e-7 * (1 + std::abs(fd)));
    }
    CHECK_THROWS_AS(cauchy_integral_dz(p, cplx(1.0, 0.0)), InvalidInput);
    CHECK_THROWS_AS(cauchy_integral(p, cplx(1.0, 0.0)), InvalidInput);
}

TEST_CASE("principal values") {
    const auto p = maxwellian();
    CHECK(pv_cauchy(p, 0.0) == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(std::abs(pv_cauchy(p, 0.7) - (-0.57058863883415101)) < 1e-12);
    CHECK(std::abs(pv_cauchy(testing::bump_on_tail(), 1.5) - 0.1338753979179246) < 1e-12);

    // Even phi integrates to zero against the odd kernel 1/v.
    const auto even = testing::custom(nullptr, [](double v, int order) {
        const double e = std::exp(-v * v);
        if (order == 0) return (1 - 2 * v * v) * e;
        if (order == 1) return (4 * v * v * v - 6 * v) * e;
        return (-8 * v * v * v * v + 24 * v * v - 6) * e;
    });
    CHECK(std::abs(pv_cauchy(even, 0.0)) < 1e-14);
}

TEST_CASE("two-stream valley principal values") {
    const struct {
        double u, ref;
    } cases[] = {{1.5, 0.5694944265123919}, {2.0, 0.41072311139033574}, {3.0, 0.13925236732669943}};
    for (const auto& c : cases) {
        const auto p = two_stream(c.u);
        const double pv = pv_cauchy(p, 0.0);
        CHECK(std::abs(pv - c.ref) < 1e-12);
        const double sym = testing::symmetric_pv([&](double v) { return p.phi(v); }, 0.0, 14.0, 200000);
        CHECK(std::abs(pv - sym) < 1e-8);
    }
}

TEST_CASE("property: pv agrees with the symmetric oracle off the critical points") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> s(-4.0, 4.0);
    const auto p = testing::bump_on_tail();
    for (int i = 0; i < 10; ++i) {
        const double x = s(rng);
        const double sym = testing::symmetric_pv([&](double v) { return p.phi(v); }, x, 16.0, 400000);
        CHECK(std::abs(pv_cauchy(p, x) - sym) < 1e-8);
    }
}

TEST_CASE("plemelj boundary values") {
    const auto p = two_stream(2.0);
    const double k = 0.4;
    const cplx at_c = plemelj_boundary(p, k, 0.0, Side::plus);
    CHECK(at_c.imag() == 0.0);
    CHECK(at_c.real() == doctest::Approx(1.0 - 0.41072311139033574 / (k * k)).epsilon(1e-12));

    for (double s : {-1.3, 0.6, 2.2}) {
        const cplx up = plemelj_boundary(p, k, s, Side::plus);
        const cplx dn = plemelj_boundary(p, k, s, Side::minus);
        CHECK(up.real() == dn.real());
        CHECK(std::abs((up - dn) - cplx(0.0, -2.0 * M_PI * p.phi(s) / (k * k))) < 1e-13);
        // Approach from either half-plane; Neville extrapolation to t = 0.
        auto limit = [&](double sign) {
            const double t[3] = {1e-2, 1e-3, 1e-4};
            cplx f[3];
            for (int i = 0; i < 3; ++i) f[i] = 1.0 - cauchy_integral(p, cplx(s, sign * t[i])) / (k * k);
            for (int m = 1; m < 3; ++m)
                for (int i = 0; i + m < 3; ++i) f[i] = (t[i + m] * f[i] - t[i] * f[i + 1]) / (t[i + m] - t[i]);
            return f[0];
        };
        const cplx above = limit(1.0), below = limit(-1.0);
        CHECK(std::abs(above - up) < 1e-6);
        CHECK(std::abs(below - dn) < 1e-6);
    }
    CHECK_THROWS_AS(plemelj_boundary(p, 0.0, 0.0, Side::plus), InvalidInput);
}

TEST_CASE("results are deterministic") {
    const auto p = testing::bump_on_tail();
    const cplx a = cauchy_integral(p, cplx(0.37, 0.011));
    const cplx b = cauchy_integral(p, cplx(0.37, 0.011));
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
    CHECK(pv_cauchy(p, 3.1) == pv_cauchy(p, 3.1));
}

TEST_CASE("near-axis points converge across the subtraction window") {
    // Points just above the axis where the subtracted integrand cancels
    // terms of size |phi(s)|/|v - s|.
    const auto p = two_stream(2.0);
    const double t = 1e-6 / 0.15;
    for (double s : {4.6478, 5.1209, 5.1210, 5.3093, 5.3094, 5.8411}) {
        CHECK_NOTHROW(cauchy_integral(p, cplx(s, t)));
        CHECK_NOTHROW(cauchy_integral(p, cplx(s, -t)));
    }
    for (double s = -8.0; s <= 8.0; s += 0.00731) CHECK_NOTHROW(cauchy_integral(p, cplx(s, t)));
}
