#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vstab/profiles.hpp"
#include "vstab/quadrature.hpp"

namespace vstab {

/// Uniform velocity grid with trapezoid weights.
struct VelocityGrid {
    std::vector<double> v;
    std::vector<double> w;
    double dv = 0.0;
};

/// Grid over the profile support padded by `pad_widths` * scale on each side.
VelocityGrid make_velocity_grid(const VelocityProfile& p, int n_v, double pad_widths = 4.0);

/// Right-hand side of the single-mode system:
/// df/dt = -ikv f + phi g,  dg/dt = integral of v f.
void mode_rhs(const VelocityGrid& grid, const std::vector<double>& phi, double k, const std::vector<cplx>& f, cplx g,
              std::vector<cplx>& df, cplx& dg);

/// Field consistent with Poisson's equation: g = (i/k) * integral of f.
cplx poisson_field(const VelocityGrid& grid, double k, const std::vector<cplx>& f);

struct EvolveOptions {
    int n_v = 2048;
    double pad_widths = 4.0;
    /// The fit uses t in [fit_start * t_end, t_end].
    double fit_start = 0.5;
    /// When set and positive, a poor fit marks the run inconclusive.
    std::optional<double> expected_rate;
    int diagnostic_every = 100;
};

struct ModeEvolution {
    std::vector<double> times;
    std::vector<cplx> g_hat;
    std::vector<double> g_abs;
    double fitted_rate = 0.0;
    Interval fit_window;
    double fit_r2 = 0.0;
    bool overflow = false;
    bool inconclusive = false;
    /// Largest relative violation of the charge identity seen at the checks.
    double charge_residual = 0.0;
    int n_v = 0;
};

/// Default initial perturbation exp(-v^2).
cplx default_initial(double v);
/// Free-streaming field of the default initial perturbation: (i/k) sqrt(pi) exp(-k^2 t^2 / 4).
cplx default_free_field(double k, double t);

/// Classical RK4 integration of one Fourier mode up to time T.
ModeEvolution evolve_mode(const VelocityProfile& p, double k, const std::function<cplx(double)>& f0_hat, double T,
                          double dt, const EvolveOptions& opt = {});

struct VolterraResult {
    std::vector<double> times;
    std::vector<cplx> values;
    int terms = 0;
    bool diverged = false;
    /// Sup-norm of the last term relative to the partial sum.
    double last_ratio = 0.0;
};

/// Neumann iteration for g(t) = g0(t) - integral_0^t s F(s) g(t - s) ds with
/// F(s) = integral of f0(v) exp(-ikvs), on the grid t_j = j dt.
VolterraResult volterra_mode(const VelocityProfile& p, double k, const std::function<cplx(double)>& e0_hat, double T,
                             double dt, int max_terms, int n_v = 2048);

struct FitResult {
    double rate = 0.0;
    double r2 = 0.0;
};

/// Least-squares slope of log(g_abs) against t over `window`.
FitResult fit_growth(const std::vector<double>& times, const std::vector<double>& g_abs, Interval window);

}  // namespace vstab
