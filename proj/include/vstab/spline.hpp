#pragma once

#include <array>
#include <span>
#include <vector>

namespace vstab {

/// Quintic interpolating B-spline on strictly increasing abscissae.
///
/// End conditions s''' = s'''' = 0 at both ends (the quintic analogue of the
/// natural cubic spline). The interpolant is C^4, so the first three
/// derivatives are continuous and available in closed form.
class QuinticSpline {
public:
    QuinticSpline(std::span<const double> x, std::span<const double> y);

    double lo() const { return knots_.front(); }
    double hi() const { return knots_.back(); }

    /// Value and derivatives up to order 3 at `x`. `x` is clamped to [lo, hi].
    std::array<double, 4> eval(double x) const;

private:
    static constexpr int kDegree = 5;

    int find_span(double x) const;
    void basis_derivs(int span, double x, int nderiv,
                      std::array<std::array<double, kDegree + 1>, 5>& ders) const;

    std::vector<double> knots_;
    std::vector<double> coef_;
};

}  // namespace vstab
