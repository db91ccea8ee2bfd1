#include <doctest.h>

#include <cmath>
#include <vector>

#include "vstab/errors.hpp"
#include "vstab/spline.hpp"

using vstab::QuinticSpline;

TEST_CASE("quintic spline interpolates the nodes") {
    std::vector<double> x, y;
    for (int i = 0; i <= 40; ++i) {
        x.push_back(-2.0 + 0.1 * i + 0.01 * std::sin(i));
        y.push_back(std::cos(x.back()) * std::exp(-x.back() * x.back()));
    }
    QuinticSpline s(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(s.eval(x[i])[0] == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("quadratics are reproduced with all derivatives") {
    // The end conditions s''' = s'''' = 0 hold for every quadratic.
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(0.25 * i);
        y.push_back(1.0 + 2.0 * x.back() - 3.0 * x.back() * x.back());
    }
    QuinticSpline s(x, y);
    for (double t = 0.0; t <= 5.0; t += 0.0371) {
        const auto d = s.eval(t);
        CHECK(d[0] == doctest::Approx(1.0 + 2.0 * t - 3.0 * t * t).epsilon(1e-11));
        CHECK(d[1] == doctest::Approx(2.0 - 6.0 * t).epsilon(1e-10));
        CHECK(d[2] == doctest::Approx(-6.0).epsilon(1e-9));
        CHECK(std::abs(d[3]) < 1e-7);
    }
}

TEST_CASE("derivatives match finite differences of the spline") {
    std::vector<double> x, y;
    for (int i = 0; i <= 60; ++i) {
        x.push_back(-3.0 + 0.1 * i);
        y.push_back(std::exp(-x.back() * x.back()));
    }
    QuinticSpline s(x, y);
    const double h = 1e-5;
    for (double t = -2.5; t <= 2.5; t += 0.173) {
        const auto d = s.eval(t);
        CHECK(d[1] == doctest::Approx((s.eval(t + h)[0] - s.eval(t - h)[0]) / (2 * h)).epsilon(1e-7));
        CHECK(d[2] == doctest::Approx((s.eval(t + h)[1] - s.eval(t - h)[1]) / (2 * h)).epsilon(1e-6));
        CHECK(d[3] == doctest::Approx((s.eval(t + h)[2] - s.eval(t - h)[2]) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("invalid abscissae are rejected") {
    std::vector<double> x{0, 1, 2, 3, 3, 4, 5, 6, 7}, y(9, 1.0);
    CHECK_THROWS_AS(QuinticSpline(x, y), vstab::InvalidInput);
    std::vector<double> few{0, 1, 2}, fy{0, 1, 0};
    CHECK_THROWS_AS(QuinticSpline(few, fy), vstab::InvalidInput);
}
