#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/profile.hpp"

namespace horizonlab {

/// Inverse-metric components driving the radial characteristic equation
/// g00 S_x0^2 + 2 gr0 S_x0 S_r + grr S_r^2 = 0.
struct RadialComponents {
    double g00 = 1.0;
    double gr0 = 0.0;
    double grr = -1.0;

    /// Discriminant (gr0)^2 - g00 grr; positive under strict hyperbolicity.
    double q() const { return gr0 * gr0 - g00 * grr; }
};

/// Axis-aligned rectangle in (x0, r).
struct Window {
    double x0_min = -10.0;
    double x0_max = 10.0;
    double r_min = 0.1;
    double r_max = 10.0;
};

/// Radial flow v = A(x0)/r rhat + B(x0,r,theta)/r thetahat.  The angular part
/// never enters radial characteristics; it is kept for the Cartesian metric.
struct AcousticFlow {
    TimeProfile radial = TimeProfile::constant(-1.0);
    std::function<double(double x0, double r, double theta)> angular;

    double angular_at(double x0, double r, double theta) const {
        return angular ? angular(x0, r, theta) : 0.0;
    }

    /// Full 3x3 inverse metric g^{jk} in Cartesian (x0, x1, x2):
    /// g00 = 1, g0j = v^j, gjk = -delta_jk + v^j v^k.
    Eigen::Matrix3d inverse_metric_cartesian(double x0, double x1, double x2) const;
};

class RadialMetric {
public:
    enum class Provenance { acoustic, custom };
    using Field = std::function<RadialComponents(double x0, double r)>;

    /// Custom metric.  `b1` is the near-origin coefficient in gr0 = b1/r + O(r^2);
    /// `length_scale` sets default escape radii (use sup |b1| when unsure).
    static RadialMetric custom(Field field, TimeProfile b1, double length_scale,
                               std::string label = "custom");

    RadialComponents at(double x0, double r) const { return field_(x0, r); }
    const TimeProfile& b1() const { return b1_; }
    Provenance provenance() const { return provenance_; }
    double length_scale() const { return length_scale_; }
    const std::string& label() const { return label_; }

    /// The radial velocity profile A for acoustic metrics.
    const TimeProfile* acoustic_profile() const {
        return provenance_ == Provenance::acoustic ? &b1_ : nullptr;
    }

private:
    friend RadialMetric acoustic_to_radial(const AcousticFlow& flow);
    RadialMetric() = default;

    Field field_;
    TimeProfile b1_ = TimeProfile::constant(0.0);
    Provenance provenance_ = Provenance::custom;
    double length_scale_ = 1.0;
    std::string label_;
};

/// g00 = 1, gr0 = A(x0)/r, grr = A(x0)^2/r^2 - 1, b1 = A.
RadialMetric acoustic_to_radial(const AcousticFlow& flow);
RadialMetric acoustic_to_radial(const TimeProfile& A);
/// g00 = 1, gr0 = 0, grr = -1.
RadialMetric minkowski_radial();

struct Violation {
    enum class Invariant { positivity, hyperbolicity, asymptotics, near_origin };
    Invariant invariant;
    double x0;
    double r;
    double margin;  ///< signed: negative means violated by that amount
    std::string detail;
};

std::string to_string(Violation::Invariant inv);

struct ValidationOptions {
    int n_x0 = 200;
    int n_r = 200;
    double r_far = 50.0;
    int n_far = 64;
    /// Allowed growth of r*|deviation| across the far window before the
    /// O(1/r) decay is declared violated.
    double far_growth = 2.0;
    double r_near_min = 1e-3;
    double r_near_max = 1e-1;
    int n_near = 32;
    double near_growth = 4.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    double observed_c0_g00 = 0.0;   ///< inf g00 over the sampled window
    double observed_c0_q = 0.0;     ///< inf of (gr0)^2 - g00 grr
    double observed_far_ratio = 0.0;
    double observed_g2rr_sup = 0.0; ///< sup of grr - b1^2/r^2 near the origin

    bool passed() const { return violations.empty(); }
    std::size_t count(Violation::Invariant inv) const;
};

/// Samples the RadialMetric invariants on an n_x0 x n_r grid over `window`,
/// plus the far-field and near-origin asymptotic forms.  Grid spacing is
/// uniform with inclusive end points, so n -> 2n-1 refinements are nested.
ValidationReport validate(const RadialMetric& metric, const Window& window,
                          const ValidationOptions& options = {});

/// Stationary inverse-metric components in polar form, using the orthonormal
/// angular slot: H = g00 xi0^2 + 2 gr0 xi0 xir + 2 gt0 xi0 xit/r + grr xir^2
///                  + 2 grt xir xit/r + gtt xit^2/r^2.
struct PolarComponents {
    double g00 = 1.0;
    double gr0 = 0.0;
    double gt0 = 0.0;
    double grr = -1.0;
    double grt = 0.0;
    double gtt = -1.0;
};

/// Components and their partial derivatives in r and theta.
struct PolarSample {
    PolarComponents value;
    PolarComponents d_r;
    PolarComponents d_theta;
};

class PolarMetric2D {
public:
    using Field = std::function<PolarComponents(double r, double theta)>;
    using Coefficient = std::function<double(double theta)>;

    /// Acoustic metric of v = A/r rhat + B/r thetahat with constant A, B.
    static PolarMetric2D acoustic(double A, double B);
    /// Custom metric.  Derivatives are taken by central differences.
    static PolarMetric2D custom(Field field, Coefficient b1, Coefficient b2,
                                std::string label = "custom");

    PolarComponents at(double r, double theta) const;
    PolarSample sample(double r, double theta) const;

    double b1(double theta) const { return b1_(theta); }
    double b2(double theta) const { return b2_(theta); }

    /// Delta = g11 g22 - (g12)^2 (rotation invariant, so computed in the frame).
    double delta(double r, double theta) const;

    /// Coordinate-basis g^{theta theta} = gtt / r^2.
    double coordinate_gtt(double r, double theta) const { return at(r, theta).gtt / (r * r); }

    bool is_acoustic() const { return acoustic_.has_value(); }
    /// (A, B) for acoustic metrics.
    std::optional<std::pair<double, double>> acoustic_constants() const { return acoustic_; }
    const std::string& label() const { return label_; }

private:
    PolarMetric2D() = default;

    Field field_;
    Coefficient b1_;
    Coefficient b2_;
    std::optional<std::pair<double, double>> acoustic_;
    std::string label_;
};

PolarMetric2D acoustic_to_polar2d(double A, double B);

/// Check of the singular decomposition g = g1 + g2 near the origin.
struct DecompositionReport {
    double min_abs_b1 = 0.0;
    double observed_c0 = 0.0;     ///< -(largest eigenvalue of [g2^{jk}]) at the probe radii
    double max_g2_variation = 0.0;///< max change of g2 between the probe radii
    bool negative_definite = false;
    bool b1_nonzero = false;
    bool passed(double tolerance) const {
        return negative_definite && b1_nonzero && max_g2_variation <= tolerance;
    }
};

DecompositionReport check_decomposition(const PolarMetric2D& metric, double r_probe = 1e-2,
                                        int n_theta = 64);

}  // namespace horizonlab
