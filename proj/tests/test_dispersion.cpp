#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "vstab/dispersion.hpp"
#include "vstab/errors.hpp"

using namespace vstab;
using testing::maxwellian;
using testing::two_stream;

namespace {

const cplx kI(0.0, 1.0);

std::vector<VelocityProfile> battery() {
    return {maxwellian(), two_stream(2.0), testing::bump_on_tail(), testing::signed_synthetic()};
}

std::vector<cplx> sample_lambdas(unsigned seed, int n) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> re(0.01, 2.0), im(-3.0, 3.0), sg(-1.0, 1.0);
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i) out.emplace_back((sg(rng) < 0 ? -1.0 : 1.0) * re(rng), im(rng));
    return out;
}

}  // namespace

TEST_CASE("delta tends to one far from the axis") {
    for (const auto& p : battery()) {
        const double c = zone(p).c;
        for (double k : {0.3, 1.0, 4.0}) {
            for (cplx lam : {cplx(1e3, 0.0), cplx(1e3, 50.0), cplx(-1e3, 7.0)}) {
                CHECK(std::abs(delta(p, k, lam) - 1.0) < c / (std::abs(lam) * std::abs(lam.real())));
            }
        }
    }
}

TEST_CASE("reflection symmetry about the imaginary axis") {
    for (const auto& p : battery()) {
        for (double k : {0.2, 0.9, -0.5}) {
            for (cplx lam : sample_lambdas(3, 10)) {
                const cplx a = delta(p, k, -std::conj(lam));
                const cplx b = std::conj(delta(p, k, lam));
                CHECK(std::abs(a - b) < 1e-11 * (1 + std::abs(b)));
            }
        }
    }
}

TEST_CASE("direct and cauchy paths agree") {
    const auto m = maxwellian();
    CHECK(std::abs(delta(m, 1.0, cplx(0.5, 0.0)) - 1.9087172784699065) < 1e-12);
    CHECK(std::abs(delta_direct(m, 1.0, cplx(0.5, 0.0)) - 1.9087172784699065) < 1e-12);

    const auto p = testing::bump_on_tail();
    const auto lams = sample_lambdas(21, 25);
    for (double k : {0.15, 0.5, 1.3, -0.7}) {
        for (cplx lam : lams) {
            const cplx a = delta(p, k, lam), b = delta_direct(p, k, lam);
            CHECK(std::abs(a - b) < 1e-9 * (1 + std::abs(a)));
        }
    }
}

TEST_CASE("k = 0 value and continuity in both half-planes") {
    const auto s = testing::signed_synthetic();
    // integral v phi = -1 for a unit-mass profile; the synthetic sign flips it.
    CHECK(std::abs(delta_k0(s, cplx(std::pow(M_PI, 0.25), 0.0))) < 1e-12);
    CHECK(delta_k0(maxwellian(), cplx(1.0, 0.0)).real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(delta_k0(maxwellian(), cplx(0.0, 0.0)), InvalidInput);

    for (const auto& p : battery()) {
        for (cplx lam : {cplx(1.0, 0.5), cplx(1.0, -0.5), cplx(-0.7, 1.2), cplx(0.4, -2.0)}) {
            const cplx d0 = delta_k0(p, lam);
            const double ref = std::abs(delta(p, 0.1, lam) - d0) / std::sqrt(0.1);
            for (double k : {0.01, 0.001}) {
                const double diff = std::abs(delta(p, k, lam) - d0);
                CHECK(diff <= ref * std::sqrt(k) + 1e-12);
            }
        }
    }
}

TEST_CASE("phi_fun bound and decay") {
    for (const auto& p : battery()) {
        const double c = zone(p).c;
        for (double k : {0.2, 1.0, 3.0}) {
            for (cplx lam : sample_lambdas(9, 15)) {
                CHECK(std::abs(phi_fun(p, k, lam, 0)) <= c / (std::abs(lam) * std::abs(lam.real())) * (1 + 1e-10));
            }
        }
        std::vector<double> scaled;
        for (double k : {10.0, 20.0, 40.0, 80.0}) {
            const cplx lam(1.0, 1.0);
            const double sum = std::abs(phi_fun(p, k, lam, 0)) + std::abs(phi_fun(p, k, lam, 1)) +
                               std::abs(phi_fun(p, k, lam, 2));
            scaled.push_back(sum * std::pow(k, 1.5));
        }
        for (double v : scaled) CHECK(v <= 2.0 * scaled.front());
    }
}

TEST_CASE("phi_fun k-derivatives match finite differences") {
    const auto p = two_stream(2.0);
    const double h = 1e-4;
    for (double k : {0.3, 0.8}) {
        for (cplx lam : {cplx(0.2, 0.1), cplx(-0.5, 1.0), cplx(1.5, -0.4)}) {
            const cplx d1 = (phi_fun(p, k + h, lam, 0) - phi_fun(p, k - h, lam, 0)) / (2 * h);
            const cplx d2 = (phi_fun(p, k + h, lam, 1) - phi_fun(p, k - h, lam, 1)) / (2 * h);
            CHECK(std::abs(phi_fun(p, k, lam, 1) - d1) < 1e-6 * (1 + std::abs(d1)));
            CHECK(std::abs(phi_fun(p, k, lam, 2) - d2) < 1e-6 * (1 + std::abs(d2)));
        }
    }
}

TEST_CASE("property: rewritten forms of phi_fun agree") {
    for (const auto& p : battery()) {
        for (double k : {0.25, 1.0, -2.0}) {
            for (cplx lam : sample_lambdas(13, 8)) {
                for (int order = 0; order <= 2; ++order) {
                    const cplx a = phi_fun(p, k, lam, order), b = phi_fun_alt(p, k, lam, order);
                    CHECK(std::abs(a - b) < 1e-7 * (1 + std::abs(a)));
                }
            }
        }
    }
    CHECK_THROWS_AS(phi_fun(maxwellian(), 1.0, cplx(1.0, 0.0), 3), InvalidInput);
}

TEST_CASE("derivative in lambda") {
    const auto p = testing::bump_on_tail();
    const double h = 1e-5;
    for (double k : {0.3, 1.1}) {
        for (cplx lam : {cplx(0.2, 0.3), cplx(0.05, -1.0), cplx(-0.4, 0.6)}) {
            const cplx fd = (delta(p, k, lam + h) - delta(p, k, lam - h)) / (2 * h);
            CHECK(std::abs(delta_dlambda(p, k, lam) - fd) < 1e-6 * (1 + std::abs(fd)));
        }
    }
}

TEST_CASE("spectrum-free zone") {
    const ZoneSpec z{4.0};
    CHECK_FALSE(zone_contains(z, cplx(2.0, 0.0)));
    CHECK_FALSE(zone_contains(z, cplx(-2.0, 0.0)));
    CHECK(zone_contains(z, cplx(2.0 + 1e-12, 0.0)));
    CHECK(zone_sigma(z, 0.0) == 2.0);
    for (double tau : {0.5, 3.0, 40.0}) {
        const double s = zone_sigma(z, tau);
        CHECK(s * s * (s * s + tau * tau) == doctest::Approx(16.0).epsilon(1e-14));
    }
    const double tau = 100.0 * std::sqrt(z.c);
    CHECK(std::abs(zone_sigma(z, tau) / (z.c / tau) - 1.0) < 0.01);
    const auto curve = zone_boundary(z, {-1.0, 0.0, 1.0});
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].first == curve[2].first);
    CHECK(curve[1].second == 0.0);

    const auto m = zone(maxwellian());
    CHECK(m.c == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("property: inside the zone delta stays within one of one") {
    for (const auto& p : battery()) {
        const auto z = zone(p);
        std::mt19937 rng(29);
        std::uniform_real_distribution<double> tau(-5.0, 5.0), bump(1.01, 3.0);
        for (int i = 0; i < 20; ++i) {
            const double t = tau(rng);
            const cplx lam(zone_sigma(z, t) * bump(rng), t);
            REQUIRE(zone_contains(z, lam));
            for (double k : {0.05, 0.3, 1.0, 5.0}) CHECK(std::abs(delta(p, k, lam) - 1.0) < 1.0);
        }
    }
}

TEST_CASE("stable wavenumber bound") {
    const double ks = stable_wavenumber_bound(maxwellian());
    CHECK(ks == doctest::Approx(std::pow(32.0 / M_PI, 0.25)).epsilon(1e-10));
    const auto p = testing::bump_on_tail();
    // k*^4 is quadratic in phi, so k* is homogeneous of degree 1/2.
    CHECK(stable_wavenumber_bound(p.scaled(4.0)) == doctest::Approx(2.0 * stable_wavenumber_bound(p)).epsilon(1e-10));
    CHECK(stable_wavenumber_bound(p.scaled(2.0)) == doctest::Approx(std::sqrt(2.0) * stable_wavenumber_bound(p)).epsilon(1e-10));
}

TEST_CASE("refusals") {
    const auto p = maxwellian();
    CHECK_THROWS_AS(delta(p, 1.0, cplx(0.0, 1.0)), InvalidInput);
    CHECK_THROWS_AS(delta(p, 1.0, cplx(5e-7, 1.0)), InvalidInput);
    CHECK_THROWS_AS(delta(p, 0.0, cplx(1.0, 1.0)), InvalidInput);
    CHECK_THROWS_AS(delta_direct(p, 1.0, cplx(0.0, 2.0)), InvalidInput);
    CHECK_THROWS_AS(delta(p, 1.0, cplx(NAN, 1.0)), InvalidInput);
    CHECK_NOTHROW(delta(p, 1.0, cplx(2e-6, 1.0)));
}
