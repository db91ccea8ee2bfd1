#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "vstab/profiles.hpp"
#include "vstab/quadrature.hpp"

namespace testing {

using vstab::cplx;

inline vstab::VelocityProfile preset(vstab::ProfileKind kind, std::map<std::string, double> params = {}) {
    vstab::ProfileSpec spec;
    spec.kind = kind;
    spec.params = std::move(params);
    return vstab::build_profile(spec);
}

inline vstab::VelocityProfile maxwellian() { return preset(vstab::ProfileKind::maxwellian); }
inline vstab::VelocityProfile two_stream(double u) { return preset(vstab::ProfileKind::two_stream, {{"u", u}}); }
inline vstab::VelocityProfile bump_on_tail() { return preset(vstab::ProfileKind::bump_on_tail); }
inline vstab::VelocityProfile signed_synthetic() { return preset(vstab::ProfileKind::signed_synthetic); }

/// Profile defined by arbitrary callables, for degenerate cases.
class LambdaModel final : public vstab::ProfileModel {
public:
    LambdaModel(std::function<double(double)> f0, std::function<double(double, int)> phi)
        : f0_(std::move(f0)), phi_(std::move(phi)) {}
    bool has_f0() const override { return static_cast<bool>(f0_); }
    double f0(double v) const override { return f0_ ? f0_(v) : NAN; }
    double phi(double v, int order) const override { return phi_(v, order); }
    double tail_bound(double, double, int, int) const override { return 0.0; }

private:
    std::function<double(double)> f0_;
    std::function<double(double, int)> phi_;
};

inline vstab::VelocityProfile custom(std::function<double(double)> f0, std::function<double(double, int)> phi,
                                     vstab::Interval support = {-10.0, 10.0}, double scale = 1.0) {
    return vstab::VelocityProfile(std::make_shared<LambdaModel>(std::move(f0), std::move(phi)), support, scale, "custom");
}

/// Composite trapezoid rule with n intervals.
template <class G>
auto trapezoid(G g, double a, double b, long n) {
    const double h = (b - a) / n;
    auto acc = 0.5 * (g(a) + g(b));
    for (long i = 1; i < n; ++i) acc += g(a + h * i);
    return acc * h;
}

/// Principal value of phi(v)/(v - s) from the pole-free symmetric form
/// integral_0^L (phi(s+t) - phi(s-t))/t dt, trapezoid with n intervals.
template <class Phi>
double symmetric_pv(Phi phi, double s, double L, long n) {
    auto g = [&](double t) {
        if (t == 0.0) return 0.0;
        return (phi(s + t) - phi(s - t)) / t;
    };
    // The t = 0 limit is 2 phi'(s); approximate it from the first node.
    const double h = L / n;
    double acc = 0.5 * (2.0 * (phi(s + 1e-7) - phi(s - 1e-7)) / 2e-7 + g(L));
    for (long i = 1; i < n; ++i) acc += g(h * i);
    return acc * h;
}

}  // namespace testing
