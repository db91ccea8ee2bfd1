#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vstab/errors.hpp"
#include "vstab/profiles.hpp"
#include "vstab/quadrature.hpp"

namespace vstab {

/// The function being wound vanishes (to 1e-8) on the contour.
class RootOnContour : public HypothesisViolation {
public:
    using HypothesisViolation::HypothesisViolation;
};

enum class ContourShape { semicircle_halfplane, rectangle };

/// Axis-aligned box in the lambda-plane, lo = (min Re, min Im).
struct Box {
    cplx lo{};
    cplx hi{};
    double diameter() const { return std::abs(hi - lo); }
    cplx center() const { return 0.5 * (lo + hi); }
};

struct ContourSpec {
    ContourShape shape = ContourShape::semicircle_halfplane;
    /// Semicircle radius in the z-plane, z = i lambda / k.
    double R = 1e3;
    /// Rectangle in the lambda-plane.
    Box box{};
    /// Initial sample count along the whole contour.
    int samples = 512;
    /// The semicircle base runs at Re lambda = axis_margin (Im z = axis_margin/|k|).
    double axis_margin = 1e-6;
};

/// Smallest allowed Re lambda on a search rectangle.
inline constexpr double kRectMargin = 1e-4;

/// One piece of a closed contour, t in [0, 1].
struct ContourPiece {
    std::function<cplx(double)> point;
    int samples = 64;
};

struct WindingDetail {
    int winding = 0;
    int evaluations = 0;
    double min_abs = 0.0;
};

/// Winding number of f around 0 along the closed path formed by `pieces`,
/// with adaptive refinement until every phase step is below pi/4.
/// Throws HypothesisViolation when |f| < 1e-8 on the path (root on contour)
/// and NumericalFailure when refinement cannot resolve the phase.
WindingDetail winding_of(const std::function<cplx(cplx)>& f, const std::vector<ContourPiece>& pieces,
                         const char* operation = "winding_number");

/// Count of dispersion roots with Re lambda > 0 inside the contour.
int winding_number(const VelocityProfile& p, double k, const ContourSpec& contour);
WindingDetail winding_number_detail(const VelocityProfile& p, double k, const ContourSpec& contour);

struct RootCertificate {
    cplx lambda{};
    double residual = 0.0;  ///< |delta(k, lambda)|
    int box_winding = 0;    ///< winding over a square of side 1e-4 around lambda
    int newton_iters = 0;
    bool near_marginal = false;  ///< Re lambda below the search margin
};

/// Default search rectangle: Re in [1e-4, 1.05 sqrt(c)], |Im| <= |k| V.
Box default_search_box(const VelocityProfile& p, double k);

/// Roots inside `region`, sorted by Re then Im.
std::vector<RootCertificate> find_roots(const VelocityProfile& p, double k, const Box& region);

/// Newton iteration from `start`, then certification. Empty when Newton
/// does not converge or the certificate fails.
std::optional<RootCertificate> polish_root(const VelocityProfile& p, double k, cplx start);

struct GrowthPoint {
    double k = 0.0;
    int n = 0;
    std::optional<cplx> lambda_max;
    bool near_marginal = false;
};

/// Fastest-growing root per k; seeds Newton from the previous k's root.
std::vector<GrowthPoint> growth_curve(const VelocityProfile& p, const std::vector<double>& k_grid);

}  // namespace vstab
