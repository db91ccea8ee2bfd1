#include "vstab/penrose.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vstab/errors.hpp"

namespace vstab {
namespace {

void check_geometry(const VelocityProfile& p, const TwoStreamGeometry& g, const char* op) {
    if (!p.has_f0()) throw InvalidInput(op, "profile has no f0");
    if (!(g.a < g.c && g.c < g.b)) throw InvalidInput(op, "geometry must satisfy a < c < b");
    const double tol = 1e-8 * p.max_abs_phi();
    for (double s : {g.a, g.c, g.b}) {
        if (std::abs(p.phi(s)) > tol) {
            std::ostringstream os;
            os << "geometry point " << s << " is not a zero of phi";
            throw InvalidInput(op, os.str());
        }
    }
}

}  // namespace

double penrose_value(const VelocityProfile& p, double k, double s) {
    if (k == 0.0 || !std::isfinite(k)) throw InvalidInput("penrose_value", "k must be finite and nonzero");
    if (std::abs(p.phi(s)) > 1e-8 * p.max_abs_phi()) {
        std::ostringstream os;
        os << "s = " << s << " is not a zero of phi";
        throw InvalidInput("penrose_value", os.str());
    }
    return 1.0 - pv_cauchy(p, s) / (k * k);
}

IndexReport instability_index(const VelocityProfile& p, double k) {
    if (k == 0.0 || !std::isfinite(k)) throw InvalidInput("instability_index", "k must be finite and nonzero; use index_at_k0");
    const bool mirror = k < 0;
    const VelocityProfile q = mirror ? p.reflected() : p;
    const double kk = std::abs(k);
    IndexReport rep;
    rep.k = k;
    for (const CriticalPoint& cp : critical_points(q)) {
        const double value = penrose_value(q, kk, cp.s);
        if (std::abs(value) < kEmbeddedTol) {
            std::ostringstream os;
            os << "Penrose value " << value << " at s = " << (mirror ? -cp.s : cp.s) << ", k = " << k
               << " is within " << kEmbeddedTol << " of zero (embedded mode); the index needs it nonzero";
            throw HypothesisViolation("instability_index", os.str());
        }
        IndexPoint pt{cp, value, value < 0};
        if (mirror) pt.cp.s = -cp.s;  // phi'(s) and the extremum kind are unchanged
        if (pt.counts) (cp.slope > 0 ? rep.n_plus : rep.n_minus) += 1;
        rep.points.push_back(pt);
    }
    if (mirror) std::reverse(rep.points.begin(), rep.points.end());
    rep.n = rep.n_plus - rep.n_minus;
    if (rep.n < 0) {
        std::ostringstream os;
        os << "negative index " << rep.n << " at k = " << k;
        throw NumericalFailure("instability_index", os.str());
    }
    return rep;
}

K0Index index_at_k0(const VelocityProfile& p) {
    K0Index r;
    r.int_v_phi = moment(p, MomentKind::int_v_phi);
    r.unstable = r.int_v_phi > 0;
    if (r.unstable) r.root = cplx(std::sqrt(r.int_v_phi), 0.0);
    return r;
}

std::vector<double> embedded_modes(const VelocityProfile& p, double k) {
    if (k == 0.0) throw InvalidInput("embedded_modes", "k must be nonzero");
    std::vector<double> out;
    for (const CriticalPoint& cp : critical_points(p)) {
        if (std::abs(penrose_value(p, k, cp.s)) < kEmbeddedTol) out.push_back(cp.s);
    }
    return out;
}

double penrose_threshold(const VelocityProfile& p, double s, double k_lo, double k_hi, double rel_tol) {
    if (!(k_lo > 0 && k_hi > k_lo)) throw InvalidInput("penrose_threshold", "need 0 < k_lo < k_hi");
    double f_lo = penrose_value(p, k_lo, s);
    const double f_hi = penrose_value(p, k_hi, s);
    if ((f_lo < 0) == (f_hi < 0)) throw InvalidInput("penrose_threshold", "no sign change of the Penrose value in [k_lo, k_hi]");
    double a = k_lo, b = k_hi;
    while (b - a > rel_tol * b) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = penrose_value(p, m, s);
        if ((fm < 0) == (f_lo < 0)) {
            a = m;
            f_lo = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

TwoStreamGeometry two_stream_geometry(const VelocityProfile& p) {
    if (!p.has_f0()) throw InvalidInput("two_stream_geometry", "profile has no f0");
    const auto cps = critical_points(p);
    if (cps.size() != 3 || cps[0].kind != CriticalKind::f0_max || cps[1].kind != CriticalKind::f0_min ||
        cps[2].kind != CriticalKind::f0_max) {
        std::ostringstream os;
        os << "expected critical points (max, min, max), found " << cps.size();
        throw InvalidInput("two_stream_geometry", os.str());
    }
    return {cps[0].s, cps[1].s, cps[2].s, std::min(p.f0(cps[0].s), p.f0(cps[2].s))};
}

bool two_stream_criterion(const VelocityProfile& p, const TwoStreamGeometry& g, double k) {
    check_geometry(p, g, "two_stream_criterion");
    if (k == 0.0) throw InvalidInput("two_stream_criterion", "k must be nonzero");
    return pv_cauchy(p, g.c) > k * k;
}

CriterionCheck width_criterion(const VelocityProfile& p, const TwoStreamGeometry& g, double k, double xi, double eta) {
    check_geometry(p, g, "width_criterion");
    if (!(xi > 0 && xi < p.f0(g.a))) throw InvalidInput("width_criterion", "xi must lie in (0, f0(a))");
    if (!(eta > 0 && eta < p.f0(g.b))) throw InvalidInput("width_criterion", "eta must lie in (0, f0(b))");
    const LevelWidths wa = level_widths(p, {g.a, p.phi1(g.a), CriticalKind::f0_max}, xi);
    const LevelWidths wb = level_widths(p, {g.b, p.phi1(g.b), CriticalKind::f0_max}, eta);
    if (!(wa.x_gt < g.c && g.c < wb.x_lt)) {
        throw InvalidInput("width_criterion", "level sets cross the valley point c");
    }
    const double c = g.c, fc = p.f0(c);
    CriterionCheck r;
    r.displayed = (wa.x_gt - wa.x_lt) * xi / ((c - wa.x_gt) * (c - wa.x_lt)) +
                  (wb.x_gt - wb.x_lt) * eta / ((wb.x_lt - c) * (wb.x_gt - c));
    r.valley_correction = fc * (1.0 / (c - wa.x_gt) + 1.0 / (wb.x_lt - c));
    r.lhs = r.displayed - r.valley_correction;
    r.k2 = k * k;
    r.holds = r.lhs > r.k2;
    return r;
}

CriterionCheck shoulder_criterion(const VelocityProfile& p, const TwoStreamGeometry& g, double k, double sigma, double tau) {
    check_geometry(p, g, "shoulder_criterion");
    const double a = g.a, b = g.b, c = g.c;
    if (!(sigma > 0 && sigma < c - a)) throw InvalidInput("shoulder_criterion", "sigma must lie in (0, c - a)");
    if (!(tau > 0 && tau < b - c)) throw InvalidInput("shoulder_criterion", "tau must lie in (0, b - c)");
    const double fa = p.f0(a + sigma), fb = p.f0(b - tau), fc = p.f0(c);
    const double wl = sigma / ((c - a - sigma) * (c - a)), wr = tau / ((b - c - tau) * (b - c));
    CriterionCheck r;
    r.displayed = wl * fa + wr * fb;
    r.lhs = wl * (fa - fc) + wr * (fb - fc) - fc * (1.0 / (c - a) + 1.0 / (b - c));
    r.valley_correction = r.displayed - r.lhs;
    r.k2 = k * k;
    r.holds = r.lhs > r.k2;
    return r;
}

}  // namespace vstab
