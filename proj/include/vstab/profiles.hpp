#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace vstab {

enum class ProfileKind { maxwellian, two_stream, bump_on_tail, gaussian_mixture, tabulated, signed_synthetic };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// Declarative description of an equilibrium, as read from a profile file.
struct ProfileSpec {
    ProfileKind kind = ProfileKind::maxwellian;
    std::map<std::string, double> params;
    std::vector<std::pair<double, double>> table;
};

ProfileSpec parse_profile_spec(const nlohmann::json& doc);
ProfileSpec load_profile_spec(const std::string& path);
nlohmann::json to_json(const ProfileSpec& spec);

/// Pointwise model behind a profile. Implementations must be reentrant.
class ProfileModel {
public:
    virtual ~ProfileModel() = default;
    virtual bool has_f0() const = 0;
    virtual double f0(double v) const = 0;
    /// phi(v) and its derivatives; order in 0..2.
    virtual double phi(double v, int order) const = 0;
    /// Upper bound of the integral of (1+|v|)^m |phi^(order)| outside [lo, hi].
    virtual double tail_bound(double lo, double hi, int m, int order) const = 0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// Immutable equilibrium: f0, phi = f0', phi', phi'' and a support interval
/// outside which |phi| is below tail_eps.
class VelocityProfile {
public:
    /// `scale` is a typical velocity width, used to pad grids.
    VelocityProfile(std::shared_ptr<const ProfileModel> model, Interval support, double scale, std::string name);

    bool has_f0() const { return model_->has_f0(); }
    double f0(double v) const { return model_->f0(v); }
    double phi(double v) const { return model_->phi(v, 0); }
    double phi1(double v) const { return model_->phi(v, 1); }
    double phi2(double v) const { return model_->phi(v, 2); }
    double phi_d(double v, int order) const { return model_->phi(v, order); }

    const Interval& support() const { return support_; }
    double scale() const { return scale_; }
    double max_abs_phi() const { return max_abs_phi_; }
    double tail_eps() const { return 1e-14 * max_abs_phi_; }
    /// Bound of the integral of (1+|v|)^m |phi^(order)| outside the support.
    double tail_bound(int m, int order = 0) const { return model_->tail_bound(support_.lo, support_.hi, m, order); }
    const std::string& name() const { return name_; }

    /// Profile of f0(-v); phi maps to -phi(-v).
    VelocityProfile reflected() const;
    /// Profile with f0 and phi multiplied by alpha.
    VelocityProfile scaled(double alpha) const;

    const std::shared_ptr<const ProfileModel>& model() const { return model_; }

private:
    std::shared_ptr<const ProfileModel> model_;
    Interval support_;
    double scale_;
    double max_abs_phi_;
    std::string name_;
};

VelocityProfile build_profile(const ProfileSpec& spec);

enum class MomentKind { int_phi, int_v_phi, int_absv_absphi, int_absphi, int_absv3_absphi, max_abs_phi1 };

std::string to_string(MomentKind kind);

struct MomentResult {
    double value = 0.0;
    double abs_err = 0.0;
};

MomentResult moment_with_error(const VelocityProfile& p, MomentKind kind);
double moment(const VelocityProfile& p, MomentKind kind);

enum class CriticalKind { f0_max, f0_min };

struct CriticalPoint {
    double s = 0.0;
    double slope = 0.0;
    CriticalKind kind = CriticalKind::f0_max;
};

std::string to_string(CriticalKind kind);

/// Maximum of |phi'| over the support, by scan plus golden-section polish.
double max_abs_phi1(const VelocityProfile& p);

/// Zeros of phi, ascending. Throws HypothesisViolation on a degenerate zero.
std::vector<CriticalPoint> critical_points(const VelocityProfile& p);

struct LevelWidths {
    double x_lt = 0.0;
    double x_gt = 0.0;
};

/// Extent of the hump around a maximum of f0 at level mu.
LevelWidths level_widths(const VelocityProfile& p, const CriticalPoint& cp, double mu);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

/// Runs the profile invariant suite: normalization of phi, finiteness of the
/// weighted moments, derivative consistency and tail decay.
std::vector<ValidationCheck> validate_profile(const VelocityProfile& p);

}  // namespace vstab
