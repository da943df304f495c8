#include "horizonlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "horizonlab/error.hpp"

namespace horizonlab {

Eigen::Matrix3d AcousticFlow::inverse_metric_cartesian(double x0, double x1, double x2) const {
    const double r = std::hypot(x1, x2);
    if (!(r > 0.0)) throw PreconditionError("acoustic metric is singular at r = 0");
    const double theta = std::atan2(x2, x1);
    const double vr = radial.value(x0) / r;
    const double vt = angular_at(x0, r, theta) / r;
    const double c = x1 / r, s = x2 / r;
    const Eigen::Vector2d v(vr * c - vt * s, vr * s + vt * c);

    Eigen::Matrix3d g;
    g(0, 0) = 1.0;
    g.block<2, 1>(1, 0) = v;
    g.block<1, 2>(0, 1) = v.transpose();
    g.block<2, 2>(1, 1) = -Eigen::Matrix2d::Identity() + v * v.transpose();
    return g;
}

RadialMetric RadialMetric::custom(Field field, TimeProfile b1, double length_scale,
                                  std::string label) {
    if (!field) throw PreconditionError("custom radial metric needs a component field");
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
        throw PreconditionError("length scale must be positive and finite");
    RadialMetric m;
    m.field_ = std::move(field);
    m.b1_ = std::move(b1);
    m.provenance_ = Provenance::custom;
    m.length_scale_ = length_scale;
    m.label_ = std::move(label);
    return m;
}

RadialMetric acoustic_to_radial(const AcousticFlow& flow) {
    RadialMetric m;
    const TimeProfile A = flow.radial;
    m.field_ = [A](double x0, double r) {
        const double a = A.value(x0) / r;
        return RadialComponents{1.0, a, a * a - 1.0};
    };
    m.b1_ = A;
    m.provenance_ = RadialMetric::Provenance::acoustic;
    m.length_scale_ = std::max(1.0, A.sup_abs());
    m.label_ = "acoustic";
    return m;
}

RadialMetric acoustic_to_radial(const TimeProfile& A) { return acoustic_to_radial(AcousticFlow{A, {}}); }

RadialMetric minkowski_radial() { return acoustic_to_radial(TimeProfile::constant(0.0)); }

std::string to_string(Violation::Invariant inv) {
    switch (inv) {
        case Violation::Invariant::positivity: return "positivity";
        case Violation::Invariant::hyperbolicity: return "hyperbolicity";
        case Violation::Invariant::asymptotics: return "asymptotics";
        case Violation::Invariant::near_origin: return "near_origin";
    }
    return "unknown";
}

std::size_t ValidationReport::count(Violation::Invariant inv) const {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [inv](const Violation& v) { return v.invariant == inv; }));
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    out.back() = b;
    return out;
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> out = linspace(std::log(a), std::log(b), n);
    for (double& v : out) v = std::exp(v);
    out.front() = a;
    out.back() = b;
    return out;
}

// The asymptotic checks use a fixed time sampling independent of the grid
// resolution, so refining the grid can only add violations.
constexpr int kAsymptoticTimes = 21;

}  // namespace

ValidationReport validate(const RadialMetric& metric, const Window& window,
                          const ValidationOptions& options) {
    const bool finite = std::isfinite(window.x0_min) && std::isfinite(window.x0_max) &&
                        std::isfinite(window.r_min) && std::isfinite(window.r_max);
    if (!finite) throw PreconditionError("validation window must be bounded");
    if (!(window.r_min > 0.0))
        throw PreconditionError("validation window touches the singular locus r = 0");
    if (window.x0_max < window.x0_min || window.r_max < window.r_min)
        throw PreconditionError("validation window has inverted bounds");
    if (options.n_x0 < 1 || options.n_r < 1 || options.n_far < 2 || options.n_near < 2)
        throw PreconditionError("validation sampling counts too small");
    if (!(options.r_far > 0.0) || !(options.r_near_min > 0.0) ||
        !(options.r_near_max > options.r_near_min))
        throw PreconditionError("invalid asymptotic sampling radii");

    ValidationReport report;
    report.observed_c0_g00 = std::numeric_limits<double>::infinity();
    report.observed_c0_q = std::numeric_limits<double>::infinity();
    report.observed_g2rr_sup = -std::numeric_limits<double>::infinity();

    const auto x0s = linspace(window.x0_min, window.x0_max, options.n_x0);
    const auto rs = linspace(window.r_min, window.r_max, options.n_r);
    for (double x0 : x0s) {
        for (double r : rs) {
            const RadialComponents c = metric.at(x0, r);
            const double q = c.q();
            if (!std::isfinite(c.g00) || !std::isfinite(q)) {
                report.violations.push_back({Violation::Invariant::positivity, x0, r,
                                             -std::numeric_limits<double>::infinity(),
                                             "non-finite metric component"});
                continue;
            }
            report.observed_c0_g00 = std::min(report.observed_c0_g00, c.g00);
            report.observed_c0_q = std::min(report.observed_c0_q, q);
            if (!(c.g00 > 0.0))
                report.violations.push_back(
                    {Violation::Invariant::positivity, x0, r, c.g00, "g00 <= 0"});
            if (!(q > 0.0))
                report.violations.push_back({Violation::Invariant::hyperbolicity, x0, r, q,
                                             "(gr0)^2 - g00 grr <= 0"});
        }
    }

    const auto times = linspace(window.x0_min, window.x0_max, std::min(kAsymptoticTimes, options.n_x0));

    // Far field: r * deviation from Minkowski must stay bounded on [r_far, 10 r_far].
    const auto far = geomspace(options.r_far, 10.0 * options.r_far, options.n_far);
    report.observed_far_ratio = 0.0;
    for (double x0 : times) {
        auto weighted = [&](double r) {
            const RadialComponents c = metric.at(x0, r);
            const double dev = std::max({std::abs(c.g00 - 1.0), std::abs(c.gr0), std::abs(c.grr + 1.0)});
            return r * dev;
        };
        const double base = std::max(weighted(far.front()), 1e-12 * options.r_far);
        double worst = 0.0, worst_r = far.front();
        for (double r : far) {
            const double k = weighted(r);
            if (!(k <= worst) || !std::isfinite(k)) {
                worst = k;
                worst_r = r;
            }
        }
        const double ratio = worst / base;
        report.observed_far_ratio = std::max(report.observed_far_ratio, ratio);
        if (!(ratio <= options.far_growth))
            report.violations.push_back({Violation::Invariant::asymptotics, x0, worst_r,
                                         options.far_growth - ratio,
                                         "r * |g - minkowski| grows across the far-field window"});
    }

    // Near origin: gr0 = b1/r + O(r^2), g00 = 1 + O(r^3), grr - b1^2/r^2 <= -C0.
    const auto near = geomspace(options.r_near_min, options.r_near_max, options.n_near);
    for (double x0 : times) {
        const double b1 = metric.b1().value(x0);
        const double floor = 1e-6 * (1.0 + std::abs(b1));
        double k_r0_small = 0.0, k_00_small = 0.0, k_r0_ref = 0.0, k_00_ref = 0.0;
        for (double r : near) {
            const RadialComponents c = metric.at(x0, r);
            const double g2rr = c.grr - b1 * b1 / (r * r);
            report.observed_g2rr_sup = std::max(report.observed_g2rr_sup, g2rr);
            if (!(g2rr < 0.0))
                report.violations.push_back({Violation::Invariant::near_origin, x0, r, -g2rr,
                                             "grr - b1^2/r^2 is not negative"});
            const double k_r0 = std::abs(c.gr0 - b1 / r) / (r * r);
            const double k_00 = std::abs(c.g00 - 1.0) / (r * r * r);
            if (r == near.front()) {
                k_r0_small = k_r0;
                k_00_small = k_00;
            }
            if (r == near.back()) {
                k_r0_ref = k_r0;
                k_00_ref = k_00;
            }
        }
        const double r_small = near.front();
        if (!(k_r0_small <= options.near_growth * std::max(k_r0_ref, floor)))
            report.violations.push_back({Violation::Invariant::near_origin, x0, r_small,
                                         options.near_growth * std::max(k_r0_ref, floor) - k_r0_small,
                                         "gr0 - b1/r is not O(r^2)"});
        if (!(k_00_small <= options.near_growth * std::max(k_00_ref, floor)))
            report.violations.push_back({Violation::Invariant::near_origin, x0, r_small,
                                         options.near_growth * std::max(k_00_ref, floor) - k_00_small,
                                         "g00 - 1 is not O(r^3)"});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Polar 2D metrics

PolarMetric2D PolarMetric2D::acoustic(double A, double B) {
    if (A == 0.0 || !std::isfinite(A) || !std::isfinite(B))
        throw PreconditionError("acoustic polar metric needs A != 0 (b1 must not vanish)");
    PolarMetric2D m;
    m.field_ = [A, B](double r, double) {
        const double vr = A / r, vt = B / r;
        return PolarComponents{1.0, vr, vt, vr * vr - 1.0, vr * vt, vt * vt - 1.0};
    };
    m.b1_ = [A](double) { return A; };
    m.b2_ = [B](double) { return B; };
    m.acoustic_ = std::make_pair(A, B);
    m.label_ = "acoustic";
    return m;
}

PolarMetric2D PolarMetric2D::custom(Field field, Coefficient b1, Coefficient b2, std::string label) {
    if (!field || !b1 || !b2) throw PreconditionError("custom polar metric needs field, b1 and b2");
    PolarMetric2D m;
    m.field_ = std::move(field);
    m.b1_ = std::move(b1);
    m.b2_ = std::move(b2);
    m.label_ = std::move(label);
    return m;
}

PolarComponents PolarMetric2D::at(double r, double theta) const { return field_(r, theta); }

namespace {

PolarComponents combine(const PolarComponents& a, const PolarComponents& b, double wa, double wb) {
    return {wa * a.g00 + wb * b.g00, wa * a.gr0 + wb * b.gr0, wa * a.gt0 + wb * b.gt0,
            wa * a.grr + wb * b.grr, wa * a.grt + wb * b.grt, wa * a.gtt + wb * b.gtt};
}

}  // namespace

PolarSample PolarMetric2D::sample(double r, double theta) const {
    PolarSample s;
    s.value = at(r, theta);
    if (acoustic_) {
        const auto [A, B] = *acoustic_;
        const double r2 = r * r, r3 = r2 * r;
        s.d_r = {0.0, -A / r2, -B / r2, -2.0 * A * A / r3, -2.0 * A * B / r3, -2.0 * B * B / r3};
        s.d_theta = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        return s;
    }
    const double hr = 1e-6 * std::max(r, 1e-3);
    const double ht = 1e-6;
    s.d_r = combine(at(r + hr, theta), at(r - hr, theta), 0.5 / hr, -0.5 / hr);
    s.d_theta = combine(at(r, theta + ht), at(r, theta - ht), 0.5 / ht, -0.5 / ht);
    return s;
}

double PolarMetric2D::delta(double r, double theta) const {
    const PolarComponents c = at(r, theta);
    return c.grr * c.gtt - c.grt * c.grt;
}

PolarMetric2D acoustic_to_polar2d(double A, double B) { return PolarMetric2D::acoustic(A, B); }

DecompositionReport check_decomposition(const PolarMetric2D& metric, double r_probe, int n_theta) {
    if (!(r_probe > 0.0) || n_theta < 1) throw PreconditionError("invalid decomposition probe");
    DecompositionReport rep;
    rep.min_abs_b1 = std::numeric_limits<double>::infinity();
    rep.observed_c0 = std::numeric_limits<double>::infinity();

    auto regular_part = [&](double r, double theta) {
        const PolarComponents c = metric.at(r, theta);
        const double b1 = metric.b1(theta), b2 = metric.b2(theta);
        const double r2 = r * r;
        return PolarComponents{c.g00 - 1.0,         c.gr0 - b1 / r,      c.gt0 - b2 / r,
                               c.grr - b1 * b1 / r2, c.grt - b1 * b2 / r2, c.gtt - b2 * b2 / r2};
    };

    for (int i = 0; i < n_theta; ++i) {
        const double theta = 2.0 * M_PI * i / n_theta;
        rep.min_abs_b1 = std::min(rep.min_abs_b1, std::abs(metric.b1(theta)));
        const PolarComponents g2 = regular_part(r_probe, theta);
        const PolarComponents g2_half = regular_part(0.5 * r_probe, theta);
        Eigen::Matrix2d m;
        m << g2.grr, g2.grt, g2.grt, g2.gtt;
        const double top = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().maxCoeff();
        rep.observed_c0 = std::min(rep.observed_c0, -top);
        const double variation =
            std::max({std::abs(g2.g00 - g2_half.g00), std::abs(g2.gr0 - g2_half.gr0),
                      std::abs(g2.gt0 - g2_half.gt0), std::abs(g2.grr - g2_half.grr),
                      std::abs(g2.grt - g2_half.grt), std::abs(g2.gtt - g2_half.gtt)});
        rep.max_g2_variation = std::max(rep.max_g2_variation, variation);
    }
    rep.negative_definite = rep.observed_c0 > 0.0;
    rep.b1_nonzero = rep.min_abs_b1 > 0.0;
    return rep;
}

}  // namespace horizonlab
