#include "vstab/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vstab/errors.hpp"

namespace vstab {
namespace {

constexpr cplx kI(0.0, 1.0);

void check_point(const char* op, double k, cplx lambda) {
    if (k == 0.0) throw InvalidInput(op, "k must be nonzero; use delta_k0");
    if (!std::isfinite(k) || !std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
        throw InvalidInput(op, "non-finite argument");
    }
    if (std::abs(lambda.real()) < kAxisGuard) {
        std::ostringstream os;
        os << "|Re lambda| = " << std::abs(lambda.real()) << " is within " << kAxisGuard
           << " of the imaginary axis; use plemelj_boundary";
        throw InvalidInput(op, os.str());
    }
}

// Integral of v^n phi(v) / (ikv + lambda)^m over the real line.
cplx direct_moment(const VelocityProfile& p, double k, cplx lambda, int n, int m, const char* op) {
    const cplx pole = kI * lambda / k;  // zero of ikv + lambda
    const double c = pole.real(), d = std::abs(pole.imag());
    QuadOptions opt;
    opt.operation = op;
    opt.rel_tol = 1e-12;
    const double reach = 1.0 + std::max(std::abs(p.support().lo), std::abs(p.support().hi));
    const double weight = std::pow(reach, n) / std::pow(std::abs(lambda.real()), m);
    opt.breakpoints = {c, 0.0};
    for (double f : {1.0, 10.0, 100.0}) {
        opt.breakpoints.push_back(c - f * d);
        opt.breakpoints.push_back(c + f * d);
    }
    // |ikv + lambda| >= |Re lambda| everywhere on the line.
    opt.tail_bound = p.tail_bound(n, 0) / std::pow(std::abs(lambda.real()), m);
    opt.abs_tol = 1e-16 * p.max_abs_phi() * p.support().width() * weight + 2.0 * opt.tail_bound;
    auto g = [&p, k, lambda, n, m](double v) -> cplx {
        const cplx den = cplx(0.0, k * v) + lambda;
        cplx q = 1.0;
        for (int j = 0; j < m; ++j) q *= den;
        return std::pow(v, n) * p.phi(v) / q;
    };
    return integrate(g, p.support().lo, p.support().hi, opt).value;
}

}  // namespace

cplx w_function(const VelocityProfile& p, double k, cplx z) {
    if (k == 0.0) throw InvalidInput("w_function", "k must be nonzero");
    return 1.0 - cauchy_integral(p, z) / (k * k);
}

cplx delta(const VelocityProfile& p, double k, cplx lambda) {
    check_point("delta", k, lambda);
    return w_function(p, k, kI * lambda / k);
}

cplx delta_direct(const VelocityProfile& p, double k, cplx lambda) {
    check_point("delta_direct", k, lambda);
    return 1.0 + direct_moment(p, k, lambda, 0, 1, "delta_direct") / (kI * k);
}

cplx delta_k0(const VelocityProfile& p, cplx lambda) {
    if (lambda == 0.0) throw InvalidInput("delta_k0", "lambda must be nonzero");
    return 1.0 - moment(p, MomentKind::int_v_phi) / (lambda * lambda);
}

cplx delta_dlambda(const VelocityProfile& p, double k, cplx lambda) {
    check_point("delta_dlambda", k, lambda);
    return -kI / (k * k * k) * cauchy_integral_dz(p, kI * lambda / k);
}

cplx phi_fun(const VelocityProfile& p, double k, cplx lambda, int order) {
    check_point("phi_fun", k, lambda);
    switch (order) {
        case 0: return direct_moment(p, k, lambda, 0, 1, "phi_fun") / (kI * k);
        case 1: return kI / lambda * direct_moment(p, k, lambda, 2, 2, "phi_fun");
        case 2: return 2.0 / lambda * direct_moment(p, k, lambda, 3, 3, "phi_fun");
        default: throw InvalidInput("phi_fun", "order must be 0, 1 or 2");
    }
}

cplx phi_fun_alt(const VelocityProfile& p, double k, cplx lambda, int order) {
    check_point("phi_fun_alt", k, lambda);
    switch (order) {
        case 0: return -direct_moment(p, k, lambda, 1, 1, "phi_fun_alt") / lambda;
        case 1:
            return -direct_moment(p, k, lambda, 0, 1, "phi_fun_alt") / (kI * k * k) -
                   direct_moment(p, k, lambda, 1, 2, "phi_fun_alt") / k;
        case 2:
            return 2.0 / (kI * k * k * k) * direct_moment(p, k, lambda, 0, 1, "phi_fun_alt") +
                   2.0 / (k * k) * direct_moment(p, k, lambda, 1, 2, "phi_fun_alt") +
                   2.0 * kI / k * direct_moment(p, k, lambda, 2, 3, "phi_fun_alt");
        default: throw InvalidInput("phi_fun_alt", "order must be 0, 1 or 2");
    }
}

ZoneSpec zone(const VelocityProfile& p) { return {moment(p, MomentKind::int_absv_absphi)}; }

bool zone_contains(const ZoneSpec& z, cplx lambda) { return std::abs(lambda.real()) * std::abs(lambda) > z.c; }

double zone_sigma(const ZoneSpec& z, double tau) {
    // sigma^2 = (-tau^2 + sqrt(tau^4 + 4c^2))/2, written without cancellation.
    const double t2 = tau * tau;
    const double root = std::sqrt(t2 * t2 + 4.0 * z.c * z.c);
    return std::sqrt(2.0 * z.c * z.c / (t2 + root));
}

std::vector<std::pair<double, double>> zone_boundary(const ZoneSpec& z, const std::vector<double>& tau_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) out.emplace_back(zone_sigma(z, tau), tau);
    return out;
}

double stable_wavenumber_bound(const VelocityProfile& p) {
    return std::pow(8.0 * moment(p, MomentKind::max_abs_phi1) * moment(p, MomentKind::int_absphi), 0.25);
}

}  // namespace vstab
