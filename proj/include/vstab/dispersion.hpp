#pragma once

#include <utility>
#include <vector>

#include "vstab/profiles.hpp"
#include "vstab/quadrature.hpp"

namespace vstab {

struct SpectralPoint {
    double k = 0.0;
    cplx lambda{};
    double sigma() const { return lambda.real(); }
    double tau() const { return lambda.imag(); }
};

/// Points with |Re lambda| below this are refused: the dispersion function
/// jumps across the imaginary axis.
inline constexpr double kAxisGuard = 1e-6;

/// w(z) = 1 - (1/k^2) * integral of phi/(v - z), Im z != 0.
cplx w_function(const VelocityProfile& p, double k, cplx z);

/// Dispersion function via the substitution z = i lambda / k.
cplx delta(const VelocityProfile& p, double k, cplx lambda);
/// Same function by direct quadrature of 1 + (1/(ik)) integral phi/(lambda + ikv).
cplx delta_direct(const VelocityProfile& p, double k, cplx lambda);
/// Value at k = 0, defined by continuity: 1 - (integral of v phi)/lambda^2.
cplx delta_k0(const VelocityProfile& p, cplx lambda);
/// d(delta)/d(lambda) = -(i/k^3) * integral of phi'(v)/(v - i lambda/k).
cplx delta_dlambda(const VelocityProfile& p, double k, cplx lambda);

/// delta - 1 (order 0) and its first two k-derivatives by direct quadrature.
cplx phi_fun(const VelocityProfile& p, double k, cplx lambda, int order);
/// Algebraically equivalent rewritings of phi_fun, used as a cross-check.
cplx phi_fun_alt(const VelocityProfile& p, double k, cplx lambda, int order);

struct ZoneSpec {
    double c = 0.0;  ///< integral of |phi| |v|
};

ZoneSpec zone(const VelocityProfile& p);
/// True when |Re lambda| * |lambda| > c: no dispersion roots there.
bool zone_contains(const ZoneSpec& z, cplx lambda);
/// sigma > 0 on the zone boundary sigma^2 (sigma^2 + tau^2) = c^2.
double zone_sigma(const ZoneSpec& z, double tau);
std::vector<std::pair<double, double>> zone_boundary(const ZoneSpec& z, const std::vector<double>& tau_grid);

/// k* = (8 max|phi'| * integral |phi|)^(1/4); no unstable modes for |k| > k*.
double stable_wavenumber_bound(const VelocityProfile& p);

}  // namespace vstab
