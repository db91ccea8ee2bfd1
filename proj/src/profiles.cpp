#include "vstab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "vstab/errors.hpp"
#include "vstab/quadrature.hpp"
#include "vstab/spline.hpp"

namespace vstab {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kTailSigmas = 9.0;

struct Gaussian {
    double n, u, sigma;
};

// Bound of the integral of y^j exp(-y^2/2) over [L, inf), valid for L^2 > j - 1.
double gauss_tail(double L, int j) {
    const double q = 1.0 - (j - 1) / (L * L);
    if (L <= 0 || q <= 0) return std::numeric_limits<double>::infinity();
    return std::pow(L, j - 1) * std::exp(-0.5 * L * L) / q;
}

// |phi^(r)| <= c_r y^(r+1) ... once y >= sqrt(3).
constexpr double kDerivConst[3] = {1.0, 1.0, 2.0};

class GaussianMixtureModel final : public ProfileModel {
public:
    explicit GaussianMixtureModel(std::vector<Gaussian> parts) : parts_(std::move(parts)) {}

    bool has_f0() const override { return true; }

    double f0(double v) const override {
        double acc = 0.0;
        for (const Gaussian& g : parts_) {
            const double x = (v - g.u) / g.sigma;
            acc += g.n * std::exp(-0.5 * x * x) / (kSqrt2Pi * g.sigma);
        }
        return acc;
    }

    double phi(double v, int order) const override {
        double acc = 0.0;
        for (const Gaussian& g : parts_) {
            const double x = v - g.u, s2 = g.sigma * g.sigma;
            const double e = g.n * std::exp(-0.5 * x * x / s2) / (kSqrt2Pi * g.sigma);
            switch (order) {
                case 0: acc += -x / s2 * e; break;
                case 1: acc += (x * x / (s2 * s2) - 1.0 / s2) * e; break;
                default: acc += (3.0 * x / (s2 * s2) - x * x * x / (s2 * s2 * s2)) * e; break;
            }
        }
        return acc;
    }

    double tail_bound(double lo, double hi, int m, int order) const override {
        double acc = 0.0;
        for (const Gaussian& g : parts_) {
            if (g.n == 0.0) continue;
            const double L = std::min(g.u - lo, hi - g.u) / g.sigma;
            if (L < std::sqrt(3.0)) return std::numeric_limits<double>::infinity();
            const double a = 1.0 + std::abs(g.u);
            acc += 2.0 * kDerivConst[order] * g.n * std::pow(a / L + g.sigma, m) /
                   (kSqrt2Pi * std::pow(g.sigma, order + 1)) * gauss_tail(L, m + order + 1);
        }
        return acc;
    }

private:
    std::vector<Gaussian> parts_;
};

// phi(v) = a (v-u) exp(-(v-u)^2 / (2 sigma^2)); no underlying f0.
class SignedSyntheticModel final : public ProfileModel {
public:
    SignedSyntheticModel(double a, double u, double sigma) : a_(a), u_(u), sigma_(sigma) {}

    bool has_f0() const override { return false; }
    double f0(double) const override { return std::numeric_limits<double>::quiet_NaN(); }

    double phi(double v, int order) const override {
        const double x = v - u_, s2 = sigma_ * sigma_;
        const double e = a_ * std::exp(-0.5 * x * x / s2);
        switch (order) {
            case 0: return x * e;
            case 1: return (1.0 - x * x / s2) * e;
            default: return (x * x * x / (s2 * s2) - 3.0 * x / s2) * e;
        }
    }

    double tail_bound(double lo, double hi, int m, int order) const override {
        const double L = std::min(u_ - lo, hi - u_) / sigma_;
        if (L < std::sqrt(3.0)) return std::numeric_limits<double>::infinity();
        const double a = 1.0 + std::abs(u_);
        return 2.0 * kDerivConst[order] * std::abs(a_) * std::pow(sigma_, 2 - order) *
               std::pow(a / L + sigma_, m) * gauss_tail(L, m + order + 1);
    }

private:
    double a_, u_, sigma_;
};

class TabulatedModel final : public ProfileModel {
public:
    TabulatedModel(const std::vector<double>& v, const std::vector<double>& f) : spline_(v, f) {}

    bool has_f0() const override { return true; }
    double f0(double v) const override {
        if (v < spline_.lo() || v > spline_.hi()) return 0.0;
        return spline_.eval(v)[0];
    }
    double phi(double v, int order) const override {
        if (v < spline_.lo() || v > spline_.hi()) return 0.0;
        return spline_.eval(v)[order + 1];
    }
    double tail_bound(double lo, double hi, int, int) const override {
        return (lo <= spline_.lo() && hi >= spline_.hi()) ? 0.0 : std::numeric_limits<double>::infinity();
    }

private:
    QuinticSpline spline_;
};

class ReflectedModel final : public ProfileModel {
public:
    explicit ReflectedModel(std::shared_ptr<const ProfileModel> inner) : inner_(std::move(inner)) {}
    bool has_f0() const override { return inner_->has_f0(); }
    double f0(double v) const override { return inner_->f0(-v); }
    double phi(double v, int order) const override {
        const double val = inner_->phi(-v, order);
        return order == 1 ? val : -val;
    }
    double tail_bound(double lo, double hi, int m, int order) const override {
        return inner_->tail_bound(-hi, -lo, m, order);
    }

private:
    std::shared_ptr<const ProfileModel> inner_;
};

class ScaledModel final : public ProfileModel {
public:
    ScaledModel(std::shared_ptr<const ProfileModel> inner, double alpha) : inner_(std::move(inner)), alpha_(alpha) {}
    bool has_f0() const override { return inner_->has_f0(); }
    double f0(double v) const override { return alpha_ * inner_->f0(v); }
    double phi(double v, int order) const override { return alpha_ * inner_->phi(v, order); }
    double tail_bound(double lo, double hi, int m, int order) const override {
        return std::abs(alpha_) * inner_->tail_bound(lo, hi, m, order);
    }

private:
    std::shared_ptr<const ProfileModel> inner_;
    double alpha_;
};

double param(const ProfileSpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

void check_keys(const ProfileSpec& spec, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : spec.params) {
        if (!allowed.count(key)) throw InvalidInput("build_profile", "unknown parameter '" + key + "' for kind " + to_string(spec.kind));
        if (!std::isfinite(value)) throw InvalidInput("build_profile", "parameter '" + key + "' is not finite");
    }
}

VelocityProfile gaussian_profile(std::vector<Gaussian> parts, const std::vector<std::string>& names, const std::string& kind) {
    bool any = false;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& tag = names[i];
        if (!(parts[i].sigma > 0)) throw InvalidInput("build_profile", "sigma" + tag + " must be > 0");
        if (!(parts[i].n >= 0)) throw InvalidInput("build_profile", "n" + tag + " must be >= 0");
        any = any || parts[i].n > 0;
    }
    if (!any) throw InvalidInput("build_profile", "at least one density must be > 0");
    Interval sup{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    double scale = 0.0;
    std::vector<Gaussian> active;
    for (const Gaussian& g : parts) {
        if (g.n == 0.0) continue;
        active.push_back(g);
        sup.lo = std::min(sup.lo, g.u - kTailSigmas * g.sigma);
        sup.hi = std::max(sup.hi, g.u + kTailSigmas * g.sigma);
        scale = std::max(scale, g.sigma);
    }
    return VelocityProfile(std::make_shared<GaussianMixtureModel>(std::move(active)), sup, scale, kind);
}

// Root of phi in [a, b] with a sign change, by safeguarded Newton.
double refine_zero(const VelocityProfile& p, double a, double b, double ftol) {
    double fa = p.phi(a);
    if (fa == 0.0) return a;
    if (p.phi(b) == 0.0) return b;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double fx = p.phi(x);
        if (std::abs(fx) < ftol && b - a < 1e-9 * (1.0 + std::abs(x))) return x;
        if (fx == 0.0) return x;
        if ((fx < 0) == (fa < 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        const double d = p.phi1(x);
        double nx = d != 0.0 ? x - fx / d : 0.5 * (a + b);
        if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
        if (nx == x || b - a < 4 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) return x;
        x = nx;
    }
    return x;
}

}  // namespace

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::maxwellian: return "maxwellian";
        case ProfileKind::two_stream: return "two_stream";
        case ProfileKind::bump_on_tail: return "bump_on_tail";
        case ProfileKind::gaussian_mixture: return "gaussian_mixture";
        case ProfileKind::tabulated: return "tabulated";
        case ProfileKind::signed_synthetic: return "signed_synthetic";
    }
    return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
    for (ProfileKind k : {ProfileKind::maxwellian, ProfileKind::two_stream, ProfileKind::bump_on_tail,
                          ProfileKind::gaussian_mixture, ProfileKind::tabulated, ProfileKind::signed_synthetic}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidInput("parse_profile", "unknown kind '" + name + "'");
}

ProfileSpec parse_profile_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InvalidInput("parse_profile", "profile document must be a JSON object");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw InvalidInput("parse_profile", "field 'kind' missing or not a string");
    ProfileSpec spec;
    spec.kind = profile_kind_from_string(doc["kind"].get<std::string>());
    for (const auto& [key, value] : doc.items()) {
        if (key != "kind" && key != "params" && key != "table") throw InvalidInput("parse_profile", "unknown field '" + key + "'");
    }
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw InvalidInput("parse_profile", "field 'params' must be an object");
        for (const auto& [key, value] : doc["params"].items()) {
            if (!value.is_number()) throw InvalidInput("parse_profile", "params." + key + " must be a number");
            spec.params[key] = value.get<double>();
        }
    }
    if (doc.contains("table")) {
        if (!doc["table"].is_array()) throw InvalidInput("parse_profile", "field 'table' must be an array");
        for (const auto& row : doc["table"]) {
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
                throw InvalidInput("parse_profile", "table rows must be [v, f0] number pairs");
            }
            spec.table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    }
    return spec;
}

ProfileSpec load_profile_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("load_profile", "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("load_profile", "malformed JSON in '" + path + "': " + e.what());
    }
    return parse_profile_spec(doc);
}

nlohmann::json to_json(const ProfileSpec& spec) {
    nlohmann::json doc;
    doc["kind"] = to_string(spec.kind);
    doc["params"] = nlohmann::json::object();
    for (const auto& [k, v] : spec.params) doc["params"][k] = v;
    if (!spec.table.empty()) {
        doc["table"] = nlohmann::json::array();
        for (const auto& [v, f] : spec.table) doc["table"].push_back({v, f});
    }
    return doc;
}

VelocityProfile::VelocityProfile(std::shared_ptr<const ProfileModel> model, Interval support, double scale, std::string name)
    : model_(std::move(model)), support_(support), scale_(scale), max_abs_phi_(0.0), name_(std::move(name)) {
    if (!(support_.hi > support_.lo)) throw InvalidInput("build_profile", "empty support");
    if (!(scale_ > 0)) throw InvalidInput("build_profile", "scale must be > 0");
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        max_abs_phi_ = std::max(max_abs_phi_, std::abs(phi(support_.lo + support_.width() * i / n)));
    }
}

VelocityProfile VelocityProfile::reflected() const {
    return VelocityProfile(std::make_shared<ReflectedModel>(model_), Interval{-support_.hi, -support_.lo}, scale_,
                           name_ + ":reflected");
}

VelocityProfile VelocityProfile::scaled(double alpha) const {
    return VelocityProfile(std::make_shared<ScaledModel>(model_, alpha), support_, scale_, name_ + ":scaled");
}

VelocityProfile build_profile(const ProfileSpec& spec) {
    const double s0 = 1.0 / std::sqrt(2.0);
    switch (spec.kind) {
        case ProfileKind::maxwellian: {
            check_keys(spec, {"n", "u", "sigma"});
            return gaussian_profile({{param(spec, "n", 1.0), param(spec, "u", 0.0), param(spec, "sigma", s0)}}, {""},
                                    "maxwellian");
        }
        case ProfileKind::two_stream: {
            check_keys(spec, {"n", "u", "sigma"});
            const double n = param(spec, "n", 1.0), u = param(spec, "u", 2.0), s = param(spec, "sigma", s0);
            return gaussian_profile({{0.5 * n, -u, s}, {0.5 * n, u, s}}, {"", ""}, "two_stream");
        }
        case ProfileKind::bump_on_tail: {
            check_keys(spec, {"n_core", "u_core", "sigma_core", "n_beam", "u_beam", "sigma_beam"});
            return gaussian_profile({{param(spec, "n_core", 0.9), param(spec, "u_core", 0.0), param(spec, "sigma_core", 1.0)},
                                     {param(spec, "n_beam", 0.1), param(spec, "u_beam", 4.0), param(spec, "sigma_beam", 0.5)}},
                                    {"_core", "_beam"}, "bump_on_tail");
        }
        case ProfileKind::gaussian_mixture: {
            std::vector<Gaussian> parts;
            std::vector<std::string> names;
            std::set<std::string> allowed;
            for (int i = 0;; ++i) {
                const std::string t = std::to_string(i);
                if (!spec.params.count("n" + t) && !spec.params.count("u" + t) && !spec.params.count("sigma" + t)) break;
                if (!spec.params.count("n" + t) || !spec.params.count("sigma" + t)) {
                    throw InvalidInput("build_profile", "component " + t + " needs n" + t + " and sigma" + t);
                }
                parts.push_back({spec.params.at("n" + t), param(spec, "u" + t, 0.0), spec.params.at("sigma" + t)});
                names.push_back(t);
                allowed.insert({"n" + t, "u" + t, "sigma" + t});
            }
            check_keys(spec, allowed);
            if (parts.empty()) throw InvalidInput("build_profile", "gaussian_mixture needs components n0, u0, sigma0, ...");
            return gaussian_profile(std::move(parts), names, "gaussian_mixture");
        }
        case ProfileKind::signed_synthetic: {
            check_keys(spec, {"a", "u", "sigma"});
            const double a = param(spec, "a", 2.0), u = param(spec, "u", 0.0), s = param(spec, "sigma", s0);
            if (!(s > 0)) throw InvalidInput("build_profile", "sigma must be > 0");
            if (a == 0.0) throw InvalidInput("build_profile", "a must be nonzero");
            return VelocityProfile(std::make_shared<SignedSyntheticModel>(a, u, s),
                                   Interval{u - kTailSigmas * s, u + kTailSigmas * s}, s, "signed_synthetic");
        }
        case ProfileKind::tabulated: {
            check_keys(spec, {});
            if (spec.table.size() < 8) throw InvalidInput("build_profile", "table needs at least 8 rows");
            std::vector<double> v, f;
            double fmax = 0.0;
            for (std::size_t i = 0; i < spec.table.size(); ++i) {
                const auto [vi, fi] = spec.table[i];
                if (!std::isfinite(vi) || !std::isfinite(fi)) throw InvalidInput("build_profile", "table row " + std::to_string(i) + " is not finite");
                if (i > 0 && !(vi > v.back())) throw InvalidInput("build_profile", "table v not strictly increasing at row " + std::to_string(i));
                if (fi < 0) throw InvalidInput("build_profile", "table f0 negative at row " + std::to_string(i));
                v.push_back(vi);
                f.push_back(fi);
                fmax = std::max(fmax, fi);
            }
            if (!(fmax > 0)) throw InvalidInput("build_profile", "table f0 is identically zero");
            if (f.front() > 1e-12 * fmax || f.back() > 1e-12 * fmax) {
                throw InvalidInput("build_profile", "table endpoints must satisfy f0 <= 1e-12 * max(f0)");
            }
            // Width from the second moment of the table (trapezoid).
            double m0 = 0, m1 = 0, m2 = 0;
            for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                const double h = v[i + 1] - v[i];
                m0 += 0.5 * h * (f[i] + f[i + 1]);
                m1 += 0.5 * h * (v[i] * f[i] + v[i + 1] * f[i + 1]);
                m2 += 0.5 * h * (v[i] * v[i] * f[i] + v[i + 1] * v[i + 1] * f[i + 1]);
            }
            const double mean = m1 / m0;
            const double scale = std::sqrt(std::max(m2 / m0 - mean * mean, 1e-300));
            return VelocityProfile(std::make_shared<TabulatedModel>(v, f), Interval{v.front(), v.back()}, scale, "tabulated");
        }
    }
    throw InvalidInput("build_profile", "unsupported kind");
}

std::string to_string(MomentKind kind) {
    switch (kind) {
        case MomentKind::int_phi: return "int_phi";
        case MomentKind::int_v_phi: return "int_v_phi";
        case MomentKind::int_absv_absphi: return "int_absv_absphi";
        case MomentKind::int_absphi: return "int_absphi";
        case MomentKind::int_absv3_absphi: return "int_absv3_absphi";
        case MomentKind::max_abs_phi1: return "max_abs_phi1";
    }
    return "unknown";
}

std::string to_string(CriticalKind kind) { return kind == CriticalKind::f0_max ? "f0_max" : "f0_min"; }

double max_abs_phi1(const VelocityProfile& p) {
    const Interval s = p.support();
    const int n = 20000;
    const double h = s.width() / n;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double val = std::abs(p.phi1(s.lo + h * i));
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    // Golden-section polish on the bracketing cells.
    double a = s.lo + h * std::max(best - 1, 0), b = s.lo + h * std::min(best + 1, n);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = std::abs(p.phi1(x1)), f2 = std::abs(p.phi1(x2));
    for (int it = 0; it < 80; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = std::abs(p.phi1(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = std::abs(p.phi1(x2));
        }
    }
    return std::max({best_val, f1, f2});
}

MomentResult moment_with_error(const VelocityProfile& p, MomentKind kind) {
    if (kind == MomentKind::max_abs_phi1) return {max_abs_phi1(p), 0.0};
    Integrand g;
    int m = 0;
    switch (kind) {
        case MomentKind::int_phi: g = [&p](double v) { return cplx(p.phi(v)); }; break;
        case MomentKind::int_v_phi: g = [&p](double v) { return cplx(v * p.phi(v)); }; m = 1; break;
        case MomentKind::int_absv_absphi: g = [&p](double v) { return cplx(std::abs(v * p.phi(v))); }; m = 1; break;
        case MomentKind::int_absphi: g = [&p](double v) { return cplx(std::abs(p.phi(v))); }; break;
        case MomentKind::int_absv3_absphi:
            g = [&p](double v) { return cplx(std::abs(v * v * v * p.phi(v))); };
            m = 3;
            break;
        default: break;
    }
    QuadOptions opt;
    opt.operation = "moment(" + to_string(kind) + ")";
    opt.abs_tol = 2e-11;
    opt.rel_tol = 2e-11;
    opt.tail_bound = p.tail_bound(m, 0);
    opt.breakpoints.push_back(0.0);
    try {
        for (const CriticalPoint& cp : critical_points(p)) opt.breakpoints.push_back(cp.s);
    } catch (const HypothesisViolation&) {
        // Kinks of |phi| are then left to adaptivity.
    }
    const QuadratureResult r = integrate(g, p.support().lo, p.support().hi, opt);
    return {r.value.real(), r.abs_err};
}

double moment(const VelocityProfile& p, MomentKind kind) { return moment_with_error(p, kind).value; }

std::vector<CriticalPoint> critical_points(const VelocityProfile& p) {
    const double scale_phi = p.max_abs_phi();
    if (scale_phi == 0.0) return {};
    const Interval sup = p.support();
    const int n = 20000;
    const double h = sup.width() / n;
    std::vector<double> v(n + 1), f(n + 1);
    for (int i = 0; i <= n; ++i) {
        v[i] = sup.lo + h * i;
        f[i] = p.phi(v[i]);
    }
    // Runs of constant sign. Runs at either end whose peak is at the level of
    // interpolation noise are tails, not lobes, and are dropped.
    struct Run {
        int first, last, sign;
        double peak;
    };
    std::vector<Run> runs;
    for (int i = 0; i <= n; ++i) {
        if (f[i] == 0.0) continue;
        const int sg = f[i] > 0 ? 1 : -1;
        if (runs.empty() || runs.back().sign != sg) runs.push_back({i, i, sg, 0.0});
        runs.back().last = i;
        runs.back().peak = std::max(runs.back().peak, std::abs(f[i]));
    }
    const double noise = 1e-8 * scale_phi;
    while (!runs.empty() && runs.front().peak < noise) runs.erase(runs.begin());
    while (!runs.empty() && runs.back().peak < noise) runs.pop_back();

    double max_phi1 = 0.0;
    for (int i = 0; i <= n; i += 4) max_phi1 = std::max(max_phi1, std::abs(p.phi1(v[i])));
    const double degeneracy_tol = 1e-8 * max_phi1;

    std::vector<CriticalPoint> out;
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        const double a = v[runs[r].last], b = v[runs[r + 1].first];
        const double s = refine_zero(p, a, b, 1e-12 * scale_phi);
        const double slope = p.phi1(s);
        if (std::abs(slope) <= degeneracy_tol) {
            std::ostringstream os;
            os << "degenerate zero of phi at s = " << s << " (|phi'| = " << std::abs(slope)
               << "); every zero must be non-degenerate";
            throw HypothesisViolation("critical_points", os.str());
        }
        out.push_back({s, slope, slope < 0 ? CriticalKind::f0_max : CriticalKind::f0_min});
    }
    // A zero where phi touches 0 without changing sign is degenerate.
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (int i = runs[r].first; i <= runs[r].last; ++i) {
            if (f[i] == 0.0 && std::abs(p.phi1(v[i])) <= degeneracy_tol) {
                std::ostringstream os;
                os << "degenerate zero of phi at s = " << v[i];
                throw HypothesisViolation("critical_points", os.str());
            }
        }
    }
    return out;
}

LevelWidths level_widths(const VelocityProfile& p, const CriticalPoint& cp, double mu) {
    if (!p.has_f0()) throw InvalidInput("level_widths", "profile has no f0");
    if (cp.kind != CriticalKind::f0_max) throw InvalidInput("level_widths", "critical point is not a maximum of f0");
    const double top = p.f0(cp.s);
    if (!(mu > 0 && mu < top)) {
        std::ostringstream os;
        os << "mu = " << mu << " outside (0, f0(s)) = (0, " << top << ")";
        throw InvalidInput("level_widths", os.str());
    }
    const double step = 1e-3 * p.scale();
    const double reach = p.support().width() + 20.0 * p.scale();
    auto walk = [&](double dir) {
        double inside = cp.s, x = cp.s;
        for (;;) {
            x += dir * step;
            if (std::abs(x - cp.s) > reach) throw NumericalFailure("level_widths", "level set not found inside the support");
            if (p.f0(x) <= mu) break;
            inside = x;
        }
        double a = inside, b = x;  // f0(a) > mu >= f0(b)
        for (int it = 0; it < 200 && std::abs(b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            if (p.f0(m) > mu) a = m;
            else b = m;
        }
        return b;
    };
    return {walk(-1.0), walk(1.0)};
}

std::vector<ValidationCheck> validate_profile(const VelocityProfile& p) {
    std::vector<ValidationCheck> out;
    auto add = [&](std::string name, bool ok, double value, double limit, std::string detail) {
        out.push_back({std::move(name), ok, value, limit, std::move(detail)});
    };
    const MomentResult ip = moment_with_error(p, MomentKind::int_phi);
    add("int_phi_zero", std::abs(ip.value) <= 1e-10, std::abs(ip.value), 1e-10, "integral of phi vanishes");

    const MomentResult m1 = moment_with_error(p, MomentKind::int_absphi);
    const MomentResult m2 = moment_with_error(p, MomentKind::int_absv_absphi);
    const double c8 = m1.value + m2.value;
    add("weighted_l1_finite", std::isfinite(c8) && m1.abs_err + m2.abs_err < 1e-9 * (1.0 + c8), c8,
        std::numeric_limits<double>::infinity(), "integral of (1+|v|)|phi| is finite and certified");
    const MomentResult m3 = moment_with_error(p, MomentKind::int_absv3_absphi);
    add("third_moment_finite", std::isfinite(m3.value) && m3.abs_err < 1e-9 * (1.0 + m3.value), m3.value,
        std::numeric_limits<double>::infinity(), "integral of |v|^3 |phi| is finite and certified");

    const double tail = std::max(std::abs(p.phi(p.support().lo)), std::abs(p.phi(p.support().hi)));
    add("tail_decay", tail <= p.tail_eps(), tail, p.tail_eps(), "|phi| at the support ends is below tail_eps");
    const double tb = p.tail_bound(1, 0);
    add("tail_bound", tb <= 1e-12 * (1.0 + c8), tb, 1e-12 * (1.0 + c8), "neglected tail of (1+|v|)|phi|");

    if (p.has_f0()) {
        auto residual = [&](double h) {
            double r = 0.0;
            const int n = 2000;
            for (int i = 0; i <= n; ++i) {
                const double v = p.support().lo + p.support().width() * i / n;
                r = std::max(r, std::abs(p.phi(v) - (p.f0(v + h) - p.f0(v - h)) / (2 * h)));
            }
            return r;
        };
        const double h1 = 1e-3 * p.scale(), h2 = 1e-4 * p.scale();
        const double r1 = residual(h1), r2 = residual(h2);
        const double order = std::log(r1 / r2) / std::log(h1 / h2);
        add("phi_is_f0_derivative", order >= 1.9 || r1 < 1e-12 * p.max_abs_phi(), order, 1.9,
            "observed order of the central-difference residual");
    }
    try {
        const auto cps = critical_points(p);
        add("critical_points_nondegenerate", true, static_cast<double>(cps.size()), 0, "all zeros of phi are simple");
    } catch (const HypothesisViolation& e) {
        add("critical_points_nondegenerate", false, 0, 0, e.what());
    }
    return out;
}

}  // namespace vstab
