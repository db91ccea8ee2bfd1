#pragma once

#include <optional>
#include <vector>

#include "vstab/profiles.hpp"
#include "vstab/quadrature.hpp"

namespace vstab {

/// Penrose values closer to zero than this put a root on the imaginary axis.
inline constexpr double kEmbeddedTol = 1e-9;

struct IndexPoint {
    CriticalPoint cp;
    double penrose_value = 0.0;
    bool counts = false;  ///< penrose_value < 0
};

struct IndexReport {
    double k = 0.0;
    std::vector<IndexPoint> points;
    int n_plus = 0;
    int n_minus = 0;
    int n = 0;
};

/// 1 - pv(s)/k^2 at a zero s of phi.
double penrose_value(const VelocityProfile& p, double k, double s);

/// Number of unstable roots, n = n_plus - n_minus. Negative k is handled by
/// mirroring the profile (v -> -v) and using |k|. Throws HypothesisViolation
/// on a degenerate critical point or an embedded mode.
IndexReport instability_index(const VelocityProfile& p, double k);

struct K0Index {
    bool unstable = false;
    std::optional<cplx> root;
    double int_v_phi = 0.0;
};

/// At k = 0 there is an unstable root iff integral v phi > 0; it is sqrt of that.
K0Index index_at_k0(const VelocityProfile& p);

/// Critical points whose Penrose value is within kEmbeddedTol of zero.
std::vector<double> embedded_modes(const VelocityProfile& p, double k);

/// Wave number in [k_lo, k_hi] where penrose_value(p, k, s) changes sign,
/// by bisection to relative width `rel_tol`.
double penrose_threshold(const VelocityProfile& p, double s, double k_lo, double k_hi, double rel_tol = 1e-14);

struct TwoStreamGeometry {
    double a = 0.0;  ///< left maximum of f0
    double c = 0.0;  ///< interior minimum
    double b = 0.0;  ///< right maximum
    double M = 0.0;  ///< min(f0(a), f0(b))
};

/// Requires exactly three critical points (max, min, max).
TwoStreamGeometry two_stream_geometry(const VelocityProfile& p);

/// pv(c) > k^2.
bool two_stream_criterion(const VelocityProfile& p, const TwoStreamGeometry& g, double k);

/// Lower bound of pv(c) built from f0 alone. `displayed` is the bound that
/// drops every f0(c) term; `lhs` subtracts the valley correction and is the
/// value compared against k^2. The two agree when f0(c) = 0.
struct CriterionCheck {
    double displayed = 0.0;
    double valley_correction = 0.0;
    double lhs = 0.0;
    double k2 = 0.0;
    bool holds = false;
};

/// Bound from the hump widths at levels xi (left) and eta (right).
CriterionCheck width_criterion(const VelocityProfile& p, const TwoStreamGeometry& g, double k, double xi, double eta);

/// Bound from f0 at a + sigma and b - tau on the inner flanks of the humps.
CriterionCheck shoulder_criterion(const VelocityProfile& p, const TwoStreamGeometry& g, double k, double sigma, double tau);

}  // namespace vstab
