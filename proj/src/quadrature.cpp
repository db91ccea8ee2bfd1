#include "vstab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vstab/errors.hpp"

namespace vstab {
namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo, hi;
    cplx value;
    double err;
    double floor;  // roundoff level of the panel
};

Panel gk15(const Integrand& g, const std::function<double(double)>& cancel, double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    auto mag = [&cancel](double v, cplx f) { return cancel ? std::max(std::abs(f), cancel(v)) : std::abs(f); };
    const cplx fc = g(c);
    cplx kron = fc * kWgk[7];
    cplx gauss = fc * kWg[3];
    double resabs = mag(c, fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const cplx f1 = g(c - dx), f2 = g(c + dx);
        kron += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (mag(c - dx, f1) + mag(c + dx, f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    Panel p{lo, hi, kron * h, std::abs((kron - gauss) * h), 0.0};
    p.floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs * std::abs(h);
    p.err = std::max(p.err, p.floor);
    if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag())) p.err = std::numeric_limits<double>::infinity();
    return p;
}

struct WorseFirst {
    bool operator()(const Panel& a, const Panel& b) const {
        if (a.err != b.err) return a.err < b.err;
        return a.lo > b.lo;
    }
};

}  // namespace

QuadratureResult integrate(const Integrand& g, double lo, double hi, const QuadOptions& opt) {
    if (!(hi > lo)) {
        if (hi == lo) return {};
        throw InvalidInput(opt.operation, "integration interval is reversed");
    }
    std::vector<double> cuts{lo};
    for (double b : opt.breakpoints) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> heap;  // max-heap on error
    std::vector<Panel> frozen;
    cplx total{};
    double err = 0.0, floor = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(gk15(g, opt.cancellation, cuts[i], cuts[i + 1]));
        std::push_heap(heap.begin(), heap.end(), WorseFirst{});
    }
    // Running sums drift under repeated add/subtract; the stop test always
    // uses a fresh sum in panel order.
    auto resum = [&] {
        std::vector<Panel> all(frozen);
        all.insert(all.end(), heap.begin(), heap.end());
        std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
        total = 0.0;
        err = floor = 0.0;
        for (const Panel& p : all) {
            total += p.value;
            err += p.err;
            floor += p.floor;
        }
        return all;
    };
    resum();
    int panels = static_cast<int>(heap.size());
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    if (opt.tail_bound > target()) {
        std::ostringstream os;
        os << "tail bound " << opt.tail_bound << " exceeds tolerance " << target();
        throw NumericalFailure(opt.operation, os.str());
    }
    auto done = [&] { return heap.empty() || err + opt.tail_bound <= target() || err <= 2.0 * floor; };
    while (!done() || (resum(), !done())) {
        std::pop_heap(heap.begin(), heap.end(), WorseFirst{});
        Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (panels >= opt.max_panels) {
            std::ostringstream os;
            os << "panel budget " << opt.max_panels << " exhausted; worst panel [" << worst.lo << ", " << worst.hi
               << "] error " << worst.err;
            throw NumericalFailure(opt.operation, os.str());
        }
        if (!(mid > worst.lo && mid < worst.hi)) {
            frozen.push_back(worst);
            continue;
        }
        Panel a = gk15(g, opt.cancellation, worst.lo, mid), b = gk15(g, opt.cancellation, mid, worst.hi);
        total += a.value + b.value - worst.value;
        err += a.err + b.err - worst.err;
        floor += a.floor + b.floor - worst.floor;
        for (const Panel& p : {a, b}) {
            heap.push_back(p);
            std::push_heap(heap.begin(), heap.end(), WorseFirst{});
        }
        ++panels;
    }
    const std::vector<Panel> all = resum();
    QuadratureResult r;
    r.value = total;
    r.abs_err = err + opt.tail_bound;
    r.subdivisions = panels;
    if (!std::isfinite(r.abs_err)) throw NumericalFailure(opt.operation, "integrand is not finite");
    const double tgt = std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value));
    if (r.abs_err > tgt && err > 2.0 * floor) {
        const Panel& worst = *std::max_element(all.begin(), all.end(),
                                               [](const Panel& a, const Panel& b) { return a.err < b.err; });
        std::ostringstream os;
        os << "no convergence; worst panel [" << worst.lo << ", " << worst.hi << "] error " << worst.err;
        throw NumericalFailure(opt.operation, os.str());
    }
    return r;
}

QuadratureResult integrate_line(const Integrand& g, Interval support, double tol, double tail_bound) {
    if (!(tol > 0)) throw InvalidInput("integrate_line", "tolerance must be positive");
    QuadOptions opt;
    opt.abs_tol = tol;
    opt.tail_bound = tail_bound;
    opt.operation = "integrate_line";
    return integrate(g, support.lo, support.hi, opt);
}

CauchyDensity phi_density(const VelocityProfile& p) {
    CauchyDensity d;
    d.f = [prof = p](double v, int order) { return prof.phi_d(v, order); };
    d.support = p.support();
    d.tail_abs = p.tail_bound(0, 0);
    d.abs_scale = p.max_abs_phi() * p.support().width();
    return d;
}

CauchyDensity phi1_density(const VelocityProfile& p) {
    CauchyDensity d;
    const double h = 1e-4 * p.scale();
    d.f = [prof = p, h](double v, int order) {
        if (order < 2) return prof.phi_d(v, order + 1);
        return (prof.phi2(v + h) - prof.phi2(v - h)) / (2.0 * h);
    };
    d.support = p.support();
    d.tail_abs = p.tail_bound(0, 1);
    double m = 0.0;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(p.phi1(p.support().lo + p.support().width() * i / n)));
    d.abs_scale = m * p.support().width();
    return d;
}

QuadratureResult cauchy_transform(const CauchyDensity& d, cplx z, const std::string& operation) {
    constexpr double kWindow = 1.0;   // half-width of the subtraction window
    constexpr double kTaylor = 1e-6;  // below this |v - s| the subtracted integrand uses its Taylor limit
    const double s = z.real(), t = z.imag();
    QuadOptions opt;
    opt.operation = operation;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-15 * std::max(d.abs_scale, 1e-300);

    double lo = d.support.lo, hi = d.support.hi;
    const bool windowed = std::abs(t) < kWindow;
    cplx exact{};
    Integrand g;
    if (windowed) {
        const double f_s = d.f(s, 0), f1_s = d.f(s, 1), f2_s = d.f(s, 2);
        lo = std::min(lo, s - kWindow);
        hi = std::max(hi, s + kWindow);
        const cplx it(0.0, t);
        cplx lw{};
        if (t != 0.0) lw = std::log(kWindow - it) - std::log(-kWindow - it);
        exact = f_s * lw + f1_s * (2.0 * kWindow + it * lw);
        g = [&d, z, s, t, f_s, f1_s, f2_s](double v) -> cplx {
            const double u = v - s;
            if (std::abs(u) >= kWindow) return d.f(v, 0) / (v - z);
            if (std::abs(u) < kTaylor) {
                if (t == 0.0) return 0.5 * f2_s * u;
                return 0.5 * f2_s * u * u / cplx(u, -t);
            }
            return (d.f(v, 0) - f_s - f1_s * u) / cplx(u, -t);
        };
        opt.cancellation = [s, t, f_s, f1_s](double v) {
            const double u = v - s;
            if (std::abs(u) >= kWindow) return 0.0;
            return (std::abs(f_s) + std::abs(f1_s * u)) / std::hypot(u, t);
        };
        opt.breakpoints = {s, s - kWindow, s + kWindow};
        for (double m : {1.0, 10.0, 100.0}) {
            if (t != 0.0 && std::abs(m * t) < kWindow) {
                opt.breakpoints.push_back(s - m * std::abs(t));
                opt.breakpoints.push_back(s + m * std::abs(t));
            }
        }
    } else {
        g = [&d, z](double v) -> cplx { return d.f(v, 0) / (v - z); };
        opt.breakpoints = {s};
    }
    // Everything outside [lo, hi] lies outside the density support, at
    // distance at least `dist` from z.
    double dist;
    if (s >= lo && s <= hi) dist = std::hypot(std::min(s - lo, hi - s), t);
    else dist = std::abs(t);
    opt.tail_bound = d.tail_abs > 0 ? d.tail_abs / dist : 0.0;
    QuadratureResult r = integrate(g, lo, hi, opt);
    r.value += exact;
    r.abs_err += 1e-15 * std::abs(exact);
    return r;
}

QuadratureResult cauchy_integral_result(const VelocityProfile& p, cplx z) {
    if (z.imag() == 0.0) throw InvalidInput("cauchy_integral", "z is real; use pv_cauchy for boundary values");
    return cauchy_transform(phi_density(p), z, "cauchy_integral");
}

cplx cauchy_integral(const VelocityProfile& p, cplx z) { return cauchy_integral_result(p, z).value; }

cplx cauchy_integral_dz(const VelocityProfile& p, cplx z) {
    if (z.imag() == 0.0) throw InvalidInput("cauchy_integral_dz", "z is real");
    return cauchy_transform(phi1_density(p), z, "cauchy_integral_dz").value;
}

QuadratureResult pv_cauchy_result(const VelocityProfile& p, double s) {
    if (!std::isfinite(s)) throw InvalidInput("pv_cauchy", "s is not finite");
    return cauchy_transform(phi_density(p), cplx(s, 0.0), "pv_cauchy");
}

double pv_cauchy(const VelocityProfile& p, double s) { return pv_cauchy_result(p, s).value.real(); }

cplx plemelj_boundary(const VelocityProfile& p, double k, double s, Side side) {
    if (k == 0.0) throw InvalidInput("plemelj_boundary", "k must be nonzero");
    const double k2 = k * k;
    const double jump = M_PI * p.phi(s) / k2;
    return {1.0 - pv_cauchy(p, s) / k2, side == Side::plus ? -jump : jump};
}

}  // namespace vstab
