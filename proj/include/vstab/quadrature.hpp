#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "vstab/profiles.hpp"

namespace vstab {

using cplx = std::complex<double>;

struct QuadratureResult {
    cplx value{};
    double abs_err = 0.0;
    int subdivisions = 0;
};

using Integrand = std::function<cplx(double)>;

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 0.0;
    int max_panels = 1 << 16;
    /// Extra panel boundaries inside (lo, hi); out-of-range entries are ignored.
    std::vector<double> breakpoints;
    /// Certified bound of the neglected integral outside [lo, hi].
    double tail_bound = 0.0;
    /// Optional size of the terms that cancel inside the integrand at v; sets
    /// the roundoff floor of a panel when it exceeds |g(v)|.
    std::function<double(double)> cancellation;
    std::string operation = "integrate";
};

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand on [lo, hi].
/// Throws NumericalFailure with the worst panel when the budget runs out.
QuadratureResult integrate(const Integrand& g, double lo, double hi, const QuadOptions& opt);

/// Integral over `support` to absolute tolerance `tol`, with `tail_bound`
/// folded into the error estimate.
QuadratureResult integrate_line(const Integrand& g, Interval support, double tol, double tail_bound = 0.0);

/// A real density for Cauchy transforms: values and two derivatives.
struct CauchyDensity {
    std::function<double(double, int)> f;
    Interval support;
    /// Integral of |f| outside the support (bound).
    double tail_abs = 0.0;
    /// Typical magnitude of the transform, for the absolute tolerance.
    double abs_scale = 1.0;
};

CauchyDensity phi_density(const VelocityProfile& p);
CauchyDensity phi1_density(const VelocityProfile& p);

/// Integral of f(v)/(v - z). For Im z = 0 it is the principal value.
QuadratureResult cauchy_transform(const CauchyDensity& d, cplx z, const std::string& operation = "cauchy_transform");

QuadratureResult cauchy_integral_result(const VelocityProfile& p, cplx z);
/// Integral of phi(v)/(v - z) for Im z != 0.
cplx cauchy_integral(const VelocityProfile& p, cplx z);
/// Integral of phi(v)/(v - z)^2, via phi'(v)/(v - z) after integration by parts.
cplx cauchy_integral_dz(const VelocityProfile& p, cplx z);

QuadratureResult pv_cauchy_result(const VelocityProfile& p, double s);
/// Principal value of the integral of phi(v)/(v - s).
double pv_cauchy(const VelocityProfile& p, double s);

enum class Side { plus, minus };

/// Boundary value of w(z) = 1 - (1/k^2) * integral of phi/(v - z) at s +- i0.
cplx plemelj_boundary(const VelocityProfile& p, double k, double s, Side side);

}  // namespace vstab
