#include "vstab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vstab/errors.hpp"

namespace vstab {
namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kOverflow = 1e290;

double sup_norm(const std::vector<cplx>& x) {
    double m = 0.0;
    for (const cplx& v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

VelocityGrid make_velocity_grid(const VelocityProfile& p, int n_v, double pad_widths) {
    if (n_v < 256) throw InvalidInput("make_velocity_grid", "n_v must be >= 256");
    const double lo = p.support().lo - pad_widths * p.scale(), hi = p.support().hi + pad_widths * p.scale();
    VelocityGrid g;
    g.dv = (hi - lo) / (n_v - 1);
    g.v.resize(n_v);
    g.w.assign(n_v, g.dv);
    for (int i = 0; i < n_v; ++i) g.v[i] = lo + g.dv * i;
    g.w.front() = g.w.back() = 0.5 * g.dv;
    return g;
}

void mode_rhs(const VelocityGrid& grid, const std::vector<double>& phi, double k, const std::vector<cplx>& f, cplx g,
              std::vector<cplx>& df, cplx& dg) {
    const std::size_t n = grid.v.size();
    df.resize(n);
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) {
        df[i] = cplx(0.0, -k * grid.v[i]) * f[i] + phi[i] * g;
        acc += grid.w[i] * grid.v[i] * f[i];
    }
    dg = acc;
}

cplx poisson_field(const VelocityGrid& grid, double k, const std::vector<cplx>& f) {
    cplx acc{};
    for (std::size_t i = 0; i < f.size(); ++i) acc += grid.w[i] * f[i];
    return kI / k * acc;
}

cplx default_initial(double v) { return std::exp(-v * v); }

cplx default_free_field(double k, double t) { return kI / k * std::sqrt(M_PI) * std::exp(-0.25 * k * k * t * t); }

ModeEvolution evolve_mode(const VelocityProfile& p, double k, const std::function<cplx(double)>& f0_hat, double T,
                          double dt, const EvolveOptions& opt) {
    if (k == 0.0 || !std::isfinite(k)) throw InvalidInput("evolve_mode", "k must be finite and nonzero");
    if (!(T > 0) || !(dt > 0) || dt > T) throw InvalidInput("evolve_mode", "need 0 < dt <= T");
    if (!(opt.fit_start >= 0.2 && opt.fit_start < 1.0)) {
        throw InvalidInput("evolve_mode", "fit_start must lie in [0.2, 1) to skip the initial transient");
    }
    const VelocityGrid grid = make_velocity_grid(p, opt.n_v, opt.pad_widths);
    const double vmax = std::max(std::abs(grid.v.front()), std::abs(grid.v.back()));
    if (dt > 0.1 / (std::abs(k) * vmax)) {
        std::ostringstream os;
        os << "dt = " << dt << " exceeds 0.1/(|k| v_max) = " << 0.1 / (std::abs(k) * vmax);
        throw InvalidInput("evolve_mode", os.str());
    }
    const double recurrence = 2.0 * M_PI / (std::abs(k) * grid.dv);
    if (T >= recurrence) {
        std::ostringstream os;
        os << "T = " << T << " reaches the grid recurrence time " << recurrence << "; refine n_v";
        throw InvalidInput("evolve_mode", os.str());
    }
    const std::size_t n = grid.v.size();
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = p.phi(grid.v[i]);

    std::vector<cplx> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = f0_hat(grid.v[i]);
    cplx g = poisson_field(grid, k, f);

    ModeEvolution out;
    out.n_v = opt.n_v;
    const long steps = std::lround(std::ceil(T / dt - 1e-9));
    out.times.reserve(steps + 1);
    out.g_hat.reserve(steps + 1);
    auto record = [&](double t) {
        out.times.push_back(t);
        out.g_hat.push_back(g);
        out.g_abs.push_back(std::abs(g));
    };
    auto charge_check = [&] {
        // Rounding in the charge sum scales with the mass of |f|, which
        // phase mixing does not shrink.
        cplx rho{};
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rho += grid.w[i] * f[i];
            mass += grid.w[i] * std::abs(f[i]);
        }
        const double scale = std::max({mass, std::abs(k * g), 1e-300});
        out.charge_residual = std::max(out.charge_residual, std::abs(cplx(0.0, k) * g + rho) / scale);
    };
    record(0.0);
    charge_check();

    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
    cplx g1, g2, g3, g4;
    for (long s = 1; s <= steps; ++s) {
        const double h = std::min(dt, T - out.times.back());
        mode_rhs(grid, phi, k, f, g, k1, g1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
        mode_rhs(grid, phi, k, tmp, g + 0.5 * h * g1, k2, g2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
        mode_rhs(grid, phi, k, tmp, g + 0.5 * h * g2, k3, g3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + h * k3[i];
        mode_rhs(grid, phi, k, tmp, g + h * g3, k4, g4);
        for (std::size_t i = 0; i < n; ++i) f[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        g += h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
        if (!std::isfinite(std::abs(g)) || std::abs(g) > kOverflow) {
            out.overflow = true;
            break;
        }
        record(s == steps ? T : s * dt);
        if (s % opt.diagnostic_every == 0) charge_check();
    }
    const double t_end = out.times.back();
    out.fit_window = {opt.fit_start * t_end, t_end};
    const FitResult fit = fit_growth(out.times, out.g_abs, out.fit_window);
    out.fitted_rate = fit.rate;
    out.fit_r2 = fit.r2;
    out.inconclusive = opt.expected_rate && *opt.expected_rate > 0 && fit.r2 < 0.999;
    return out;
}

VolterraResult volterra_mode(const VelocityProfile& p, double k, const std::function<cplx(double)>& e0_hat, double T,
                             double dt, int max_terms, int n_v) {
    if (!p.has_f0()) throw InvalidInput("volterra_mode", "profile has no f0");
    if (k == 0.0 || !std::isfinite(k)) throw InvalidInput("volterra_mode", "k must be finite and nonzero");
    if (!(T > 0) || !(dt > 0) || dt > T) throw InvalidInput("volterra_mode", "need 0 < dt <= T");
    if (max_terms < 1) throw InvalidInput("volterra_mode", "max_terms must be >= 1");
    const long steps = std::lround(T / dt);
    if (std::abs(steps * dt - T) > 1e-9 * T) throw InvalidInput("volterra_mode", "T must be a multiple of dt");
    const VelocityGrid grid = make_velocity_grid(p, n_v);
    const std::size_t nv = grid.v.size();

    // kernel[j] = s_j F(s_j) with F(s) = sum_i w_i f0(v_i) exp(-i k v_i s).
    std::vector<cplx> rot(nv), cur(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        rot[i] = std::exp(cplx(0.0, -k * grid.v[i] * dt));
        cur[i] = grid.w[i] * p.f0(grid.v[i]);
    }
    std::vector<cplx> kernel(steps + 1);
    for (long j = 0; j <= steps; ++j) {
        if (j % 256 == 0) {
            // Re-seed the rotation to keep the recurrence exact to rounding.
            for (std::size_t i = 0; i < nv; ++i) {
                cur[i] = grid.w[i] * p.f0(grid.v[i]) * std::exp(cplx(0.0, -k * grid.v[i] * dt * j));
            }
        }
        cplx F{};
        for (std::size_t i = 0; i < nv; ++i) F += cur[i];
        kernel[j] = (j * dt) * F;
        for (std::size_t i = 0; i < nv; ++i) cur[i] *= rot[i];
    }

    VolterraResult out;
    out.times.resize(steps + 1);
    std::vector<cplx> term(steps + 1);
    for (long j = 0; j <= steps; ++j) {
        out.times[j] = j * dt;
        term[j] = e0_hat(out.times[j]);
    }
    out.values = term;
    out.terms = 1;
    std::vector<cplx> next(steps + 1);
    for (;;) {
        if (out.terms >= max_terms) {
            out.diverged = true;
            break;
        }
        // (K e)(t_i) = -trapz_{s in [0, t_i]} s F(s) e(t_i - s); kernel[0] = 0.
        for (long i = 0; i <= steps; ++i) {
            cplx acc{};
            for (long j = 1; j < i; ++j) acc += kernel[j] * term[i - j];
            if (i > 0) acc += 0.5 * kernel[i] * term[0];
            next[i] = -dt * acc;
        }
        term.swap(next);
        for (long j = 0; j <= steps; ++j) out.values[j] += term[j];
        ++out.terms;
        const double tn = sup_norm(term), sn = sup_norm(out.values);
        if (!std::isfinite(tn) || !std::isfinite(sn)) {
            out.diverged = true;
            break;
        }
        out.last_ratio = sn > 0 ? tn / sn : 0.0;
        if (out.last_ratio < 1e-10) break;
    }
    return out;
}

FitResult fit_growth(const std::vector<double>& times, const std::vector<double>& g_abs, Interval window) {
    if (times.size() != g_abs.size()) throw InvalidInput("fit_growth", "times and g_abs differ in length");
    if (times.empty() || window.lo < times.front() - 1e-12 || window.hi > times.back() + 1e-12 || !(window.hi > window.lo)) {
        throw InvalidInput("fit_growth", "window must lie within the sampled times");
    }
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    int m = 0;
    // Logs are taken relative to the first window sample so constant data
    // gives exact zeros.
    double y0 = NAN;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.lo || times[i] > window.hi) continue;
        if (!(g_abs[i] > 0)) {
            std::ostringstream os;
            os << "g_abs = " << g_abs[i] << " at t = " << times[i] << " inside the window";
            throw InvalidInput("fit_growth", os.str());
        }
        if (std::isnan(y0)) y0 = std::log(g_abs[i]);
        const double y = std::log(g_abs[i]) - y0;
        st += times[i];
        sy += y;
        ++m;
    }
    if (m < 2) throw InvalidInput("fit_growth", "fewer than two samples in the window");
    const double tm = st / m, ym = sy / m;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.lo || times[i] > window.hi) continue;
        const double dt = times[i] - tm, dy = (std::log(g_abs[i]) - y0) - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    FitResult r;
    r.rate = sty / stt;
    const double ss_res = std::max(syy - r.rate * sty, 0.0);
    r.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return r;
}

}  // namespace vstab
