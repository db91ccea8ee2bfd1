#include "vstab/spline.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>

#include "vstab/errors.hpp"

namespace vstab {

QuinticSpline::QuinticSpline(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    if (n < 8 || y.size() != x.size()) {
        throw InvalidInput("quintic_spline", "need at least 8 samples of matching length");
    }
    for (int i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) throw InvalidInput("quintic_spline", "abscissae not strictly increasing");
    }
    knots_.assign(kDegree + 1, x.front());
    knots_.insert(knots_.end(), x.begin() + 1, x.end() - 1);
    knots_.insert(knots_.end(), kDegree + 1, x.back());
    const int ncoef = n + kDegree - 1;

    // Rows: s'''(x0) = s''''(x0) = 0, interpolation at every node, then the
    // same two conditions at the right end.
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ncoef);
    std::array<std::array<double, kDegree + 1>, 5> ders{};
    auto add_row = [&](int row, double at, int order) {
        const int span = find_span(at);
        basis_derivs(span, at, order, ders);
        for (int j = 0; j <= kDegree; ++j) {
            if (ders[order][j] != 0.0) trips.emplace_back(row, span - kDegree + j, ders[order][j]);
        }
    };
    int row = 0;
    add_row(row++, x.front(), 3);
    add_row(row++, x.front(), 4);
    for (int i = 0; i < n; ++i) {
        rhs[row] = y[i];
        add_row(row++, x[i], 0);
    }
    add_row(row++, x.back(), 3);
    add_row(row++, x.back(), 4);

    Eigen::SparseMatrix<double> a(ncoef, ncoef);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericalFailure("quintic_spline", "collocation matrix is singular");
    Eigen::VectorXd c = lu.solve(rhs);
    coef_.assign(c.data(), c.data() + ncoef);
}

int QuinticSpline::find_span(double x) const {
    const int last = static_cast<int>(knots_.size()) - kDegree - 2;
    if (x >= knots_[last + 1]) return last;
    if (x <= knots_[kDegree]) return kDegree;
    auto it = std::upper_bound(knots_.begin() + kDegree, knots_.begin() + last + 1, x);
    return static_cast<int>(it - knots_.begin()) - 1;
}

// B-spline basis functions and derivatives (de Boor / Cox recursion with
// the triangular derivative table).
void QuinticSpline::basis_derivs(int span, double x, int nderiv,
                                 std::array<std::array<double, kDegree + 1>, 5>& ders) const {
    constexpr int p = kDegree;
    double ndu[p + 1][p + 1];
    double left[p + 1], right[p + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - knots_[span + 1 - j];
        right[j] = knots_[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];

    double a[2][p + 1];
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= nderiv; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double fac = p;
    for (int k = 1; k <= nderiv; ++k) {
        for (int j = 0; j <= p; ++j) ders[k][j] *= fac;
        fac *= (p - k);
    }
}

std::array<double, 4> QuinticSpline::eval(double x) const {
    x = std::clamp(x, lo(), hi());
    const int span = find_span(x);
    std::array<std::array<double, kDegree + 1>, 5> ders{};
    basis_derivs(span, x, 3, ders);
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= kDegree; ++j) acc += ders[k][j] * coef_[span - kDegree + j];
        out[k] = acc;
    }
    return out;
}

}  // namespace vstab
