#include "vstab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vstab/dispersion.hpp"
#include "vstab/penrose.hpp"

namespace vstab {
namespace {

constexpr double kOnContour = 1e-8;
constexpr double kMaxPhaseStep = M_PI / 4;
constexpr int kMaxEvaluations = 400000;

struct Sample {
    double t;
    cplx f;
};

std::vector<ContourPiece> rectangle_pieces(const Box& b, int per_edge) {
    const cplx c0 = b.lo, c1(b.hi.real(), b.lo.imag()), c2 = b.hi, c3(b.lo.real(), b.hi.imag());
    auto edge = [](cplx a, cplx e) { return [a, e](double t) { return a + (e - a) * t; }; };
    return {{edge(c0, c1), per_edge}, {edge(c1, c2), per_edge}, {edge(c2, c3), per_edge}, {edge(c3, c0), per_edge}};
}

int rectangle_winding(const VelocityProfile& p, double k, const Box& b, int per_edge) {
    auto f = [&p, k](cplx lambda) { return delta(p, k, lambda); };
    return winding_of(f, rectangle_pieces(b, per_edge), "rectangle_winding").winding;
}

bool inside(const Box& b, cplx z, double slack) {
    return z.real() >= b.lo.real() - slack && z.real() <= b.hi.real() + slack && z.imag() >= b.lo.imag() - slack &&
           z.imag() <= b.hi.imag() + slack;
}

void subdivide(const VelocityProfile& p, double k, const Box& b, int wind, std::vector<RootCertificate>& out) {
    if (wind == 0) return;
    if (wind < 0) throw NumericalFailure("find_roots", "negative winding over a sub-box");
    const double diam = b.diameter();
    if (diam < 1e-3 && wind == 1) {
        auto cert = polish_root(p, k, b.center());
        if (!cert || !inside(b, cert->lambda, 1e-3)) {
            std::ostringstream os;
            os << "Newton failed to converge inside the box around " << b.center().real() << "+" << b.center().imag() << "i";
            throw NumericalFailure("find_roots", os.str());
        }
        out.push_back(*cert);
        return;
    }
    if (diam < 1e-7) {
        std::ostringstream os;
        os << "winding " << wind << " persists in a box of diameter " << diam << " near " << b.center().real() << "+"
           << b.center().imag() << "i (possible multiple root)";
        throw NumericalFailure("find_roots", os.str());
    }
    // Off-centre splits keep the cut lines away from the real axis and from
    // symmetry lines where roots of symmetric profiles sit.
    static constexpr double kSplits[][2] = {{0.5127, 0.4871}, {0.5311, 0.4693}, {0.4417, 0.5583}, {0.6021, 0.3803}};
    for (const auto& fr : kSplits) {
        const double xm = b.lo.real() + fr[0] * (b.hi.real() - b.lo.real());
        const double ym = b.lo.imag() + fr[1] * (b.hi.imag() - b.lo.imag());
        const Box kids[4] = {{b.lo, cplx(xm, ym)},
                             {cplx(xm, b.lo.imag()), cplx(b.hi.real(), ym)},
                             {cplx(b.lo.real(), ym), cplx(xm, b.hi.imag())},
                             {cplx(xm, ym), b.hi}};
        int w[4];
        try {
            for (int i = 0; i < 4; ++i) w[i] = rectangle_winding(p, k, kids[i], 24);
        } catch (const RootOnContour&) {
            continue;
        }
        if (w[0] + w[1] + w[2] + w[3] != wind) continue;
        for (int i = 0; i < 4; ++i) subdivide(p, k, kids[i], w[i], out);
        return;
    }
    throw NumericalFailure("find_roots", "could not split a box without crossing a root");
}

}  // namespace

WindingDetail winding_of(const std::function<cplx(cplx)>& f, const std::vector<ContourPiece>& pieces, const char* operation) {
    WindingDetail d;
    d.min_abs = std::numeric_limits<double>::infinity();
    auto eval = [&](const ContourPiece& piece, double t) {
        const cplx z = piece.point(t);
        const cplx v = f(z);
        ++d.evaluations;
        const double a = std::abs(v);
        d.min_abs = std::min(d.min_abs, a);
        if (!(a >= kOnContour)) {
            std::ostringstream os;
            os << "|f| = " << a << " at z = " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag()
               << "i: root on the contour";
            throw RootOnContour(operation, os.str());
        }
        return v;
    };
    double total = 0.0;
    for (const ContourPiece& piece : pieces) {
        const int m = std::max(piece.samples, 2);
        std::vector<Sample> s(m + 1);
        for (int i = 0; i <= m; ++i) {
            s[i].t = static_cast<double>(i) / m;
            s[i].f = eval(piece, s[i].t);
        }
        for (;;) {
            std::vector<Sample> next;
            next.reserve(2 * s.size());
            bool refined = false;
            for (std::size_t i = 0; i + 1 < s.size(); ++i) {
                next.push_back(s[i]);
                const cplx a = s[i].f, b = s[i + 1].f;
                const double step = std::abs(std::arg(b / a));
                if (step > kMaxPhaseStep || std::abs(b - a) > 0.5 * std::min(std::abs(a), std::abs(b))) {
                    const double tm = 0.5 * (s[i].t + s[i + 1].t);
                    if (!(tm > s[i].t && tm < s[i + 1].t) || s[i + 1].t - s[i].t < 1e-13) {
                        throw NumericalFailure(operation, "contour too coarse: phase not resolved at the finest spacing");
                    }
                    next.push_back({tm, eval(piece, tm)});
                    refined = true;
                }
            }
            next.push_back(s.back());
            s.swap(next);
            if (!refined) break;
            if (d.evaluations > kMaxEvaluations) throw NumericalFailure(operation, "contour too coarse: evaluation budget exhausted");
        }
        for (std::size_t i = 0; i + 1 < s.size(); ++i) total += std::arg(s[i + 1].f / s[i].f);
    }
    const double turns = total / (2.0 * M_PI);
    const double r = std::round(turns);
    if (std::abs(turns - r) > 1e-6) {
        std::ostringstream os;
        os << "open contour: argument change " << turns << " turns";
        throw NumericalFailure(operation, os.str());
    }
    d.winding = static_cast<int>(r);
    return d;
}

WindingDetail winding_number_detail(const VelocityProfile& p, double k, const ContourSpec& c) {
    if (k == 0.0 || !std::isfinite(k)) throw InvalidInput("winding_number", "k must be finite and nonzero");
    if (c.samples < 256) throw InvalidInput("winding_number", "samples must be >= 256");
    if (c.shape == ContourShape::rectangle) {
        if (c.box.lo.real() < kRectMargin) {
            throw InvalidInput("winding_number", "rectangle must keep Re lambda >= 1e-4");
        }
        if (!(c.box.hi.real() > c.box.lo.real() && c.box.hi.imag() > c.box.lo.imag())) {
            throw InvalidInput("winding_number", "rectangle corners must be ordered lo < hi");
        }
        auto f = [&p, k](cplx lambda) { return delta(p, k, lambda); };
        return winding_of(f, rectangle_pieces(c.box, c.samples / 4), "winding_number");
    }
    if (!(c.axis_margin > 0)) throw InvalidInput("winding_number", "axis_margin must be > 0");
    // Work with k > 0; a negative k mirrors the profile.
    const VelocityProfile q = k < 0 ? p.reflected() : p;
    const double kk = std::abs(k);
    const double delta_z = c.axis_margin / kk;
    const double V = std::max(std::abs(q.support().lo), std::abs(q.support().hi)) + 1.0;
    if (!(c.R > 2.0 * V)) {
        std::ostringstream os;
        os << "R = " << c.R << " must exceed twice the padded support " << V;
        throw InvalidInput("winding_number", os.str());
    }
    auto w = [&q, kk](cplx z) { return w_function(q, kk, z); };
    // |w - 1| < 1/2 on the arc keeps its contribution to the winding zero.
    for (int i = 0; i <= 64; ++i) {
        const cplx z = cplx(0.0, delta_z) + std::polar(c.R, M_PI * i / 64.0);
        const double dev = std::abs(w(z) - 1.0);
        if (!(dev < 0.5)) {
            std::ostringstream os;
            os << "|w - 1| = " << dev << " on the arc; R = " << c.R << " too small";
            throw NumericalFailure("winding_number", os.str());
        }
    }
    const double R = c.R;
    const cplx shift(0.0, delta_z);
    std::vector<ContourPiece> pieces = {
        {[=](double t) { return shift - R * std::pow(V / R, t); }, std::max(c.samples / 8, 16)},
        {[=](double t) { return shift + (-V + 2.0 * V * t); }, std::max(c.samples / 2, 128)},
        {[=](double t) { return shift + V * std::pow(R / V, t); }, std::max(c.samples / 8, 16)},
        {[=](double t) { return shift + std::polar(R, M_PI * t); }, std::max(c.samples / 4, 32)},
    };
    return winding_of(w, pieces, "winding_number");
}

int winding_number(const VelocityProfile& p, double k, const ContourSpec& contour) {
    return winding_number_detail(p, k, contour).winding;
}

Box default_search_box(const VelocityProfile& p, double k) {
    const double c = zone(p).c;
    const double V = std::max(std::abs(p.support().lo), std::abs(p.support().hi));
    const double h = std::abs(k) * V;
    return {cplx(kRectMargin, -h), cplx(1.05 * std::sqrt(c), h)};
}

std::optional<RootCertificate> polish_root(const VelocityProfile& p, double k, cplx start) {
    RootCertificate cert;
    cplx lambda = start;
    try {
        cplx d = delta(p, k, lambda);
        for (int it = 0; it < 60; ++it) {
            const cplx dd = delta_dlambda(p, k, lambda);
            // An absolute stop keeps the residual under the certificate bound
            // even when |delta'| is large (small k).
            if (std::abs(d) < 1e-12) break;
            if (dd == 0.0) return std::nullopt;
            const cplx step = d / dd;
            cplx trial = lambda - step;
            double scale = 1.0;
            cplx dt{};
            bool improved = false;
            for (int h = 0; h < 30; ++h) {
                if (trial.real() > 2.0 * kAxisGuard) {
                    dt = delta(p, k, trial);
                    if (std::abs(dt) < std::abs(d)) {
                        improved = true;
                        break;
                    }
                }
                scale *= 0.5;
                trial = lambda - scale * step;
            }
            cert.newton_iters = it + 1;
            if (!improved) break;  // at the noise floor of delta
            lambda = trial;
            d = dt;
            if (std::abs(scale * step) < 1e-15 * (1.0 + std::abs(lambda))) break;
        }
        cert.lambda = lambda;
        cert.residual = std::abs(d);
        if (!(cert.residual < 1e-10)) return std::nullopt;
        const double half = 5e-5;
        const double left = std::max(lambda.real() - half, 0.5 * lambda.real());
        const Box sq{cplx(left, lambda.imag() - half), cplx(lambda.real() + half, lambda.imag() + half)};
        cert.box_winding = rectangle_winding(p, k, sq, 16);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (cert.box_winding != 1) return std::nullopt;
    cert.near_marginal = cert.lambda.real() < kRectMargin;
    return cert;
}

std::vector<RootCertificate> find_roots(const VelocityProfile& p, double k, const Box& region) {
    if (k == 0.0 || !std::isfinite(k)) throw InvalidInput("find_roots", "k must be finite and nonzero");
    if (region.lo.real() < kRectMargin) throw InvalidInput("find_roots", "region must keep Re lambda >= 1e-4");
    if (!(region.hi.real() > region.lo.real() && region.hi.imag() > region.lo.imag())) {
        throw InvalidInput("find_roots", "region corners must be ordered lo < hi");
    }
    const int total = rectangle_winding(p, k, region, 64);
    std::vector<RootCertificate> out;
    subdivide(p, k, region, total, out);
    int sum = 0;
    for (const auto& c : out) sum += c.box_winding;
    if (sum != total) {
        std::ostringstream os;
        os << "certificates account for " << sum << " of " << total << " roots";
        throw NumericalFailure("find_roots", os.str());
    }
    std::sort(out.begin(), out.end(), [](const RootCertificate& a, const RootCertificate& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

std::vector<GrowthPoint> growth_curve(const VelocityProfile& p, const std::vector<double>& k_grid) {
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0)) throw InvalidInput("growth_curve", "k grid must be positive");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1])) throw InvalidInput("growth_curve", "k grid must be increasing");
    }
    std::vector<GrowthPoint> out;
    std::optional<cplx> prev;
    for (double k : k_grid) {
        GrowthPoint g;
        g.k = k;
        g.n = instability_index(p, k).n;
        if (g.n == 0) {
            prev.reset();
            out.push_back(g);
            continue;
        }
        std::optional<RootCertificate> best;
        if (prev && g.n == 1) best = polish_root(p, k, *prev);
        if (!best) {
            Box box = default_search_box(p, k);
            std::vector<RootCertificate> roots = find_roots(p, k, box);
            for (int grow = 0; grow < 3 && static_cast<int>(roots.size()) < g.n; ++grow) {
                box.lo = cplx(box.lo.real(), 2.0 * box.lo.imag());
                box.hi = cplx(box.hi.real(), 2.0 * box.hi.imag());
                roots = find_roots(p, k, box);
            }
            for (const auto& r : roots) {
                if (!best || r.lambda.real() > best->lambda.real()) best = r;
            }
        }
        if (best) {
            g.lambda_max = best->lambda;
            g.near_marginal = best->near_marginal;
            prev = best->lambda;
        } else {
            // Index positive but every root sits closer to the axis than the
            // search margin.
            g.near_marginal = true;
            prev.reset();
        }
        out.push_back(g);
    }
    return out;
}

}  // namespace vstab
