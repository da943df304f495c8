#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace horizonlab {

/// A scalar function of time x0 with finite limits at +-infinity.
///
/// Closed-form kinds:
///   constant       A(x0) = offset
///   tanh-ramp      A(x0) = offset + amplitude * tanh((x0 - center) / width)
///   rational-bump  A(x0) = offset + amplitude / (1 + ((x0 - center) / width)^2)
/// The tabulated kind is a clamped cubic spline with zero end slopes, extended
/// by constants outside the table so the derivative stays continuous.  The
/// custom kind wraps user callables and is available from the library API only.
class TimeProfile {
public:
    enum class Kind { constant, tanh_ramp, rational_bump, tabulated, custom };

    static TimeProfile constant(double value);
    static TimeProfile tanh_ramp(double offset, double amplitude, double center = 0.0,
                                 double width = 1.0);
    static TimeProfile rational_bump(double offset, double amplitude, double center = 0.0,
                                     double width = 1.0);
    static TimeProfile tabulated(std::vector<double> x0, std::vector<double> values);
    static TimeProfile custom(std::string name, std::function<double(double)> value,
                              std::function<double(double)> derivative, double limit_minus,
                              double limit_plus);

    double value(double x0) const;
    double derivative(double x0) const;
    double operator()(double x0) const { return value(x0); }

    double limit_minus() const { return limit_minus_; }
    double limit_plus() const { return limit_plus_; }

    /// Supremum of |A| over the real line (exact for closed forms, sampled
    /// for custom profiles).
    double sup_abs() const;
    /// Supremum and infimum of A over the real line.
    double sup() const;
    double inf() const;

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    std::span<const double> params() const { return params_; }

private:
    struct Spline;

    TimeProfile() = default;

    Kind kind_ = Kind::constant;
    std::vector<double> params_;
    double limit_minus_ = 0.0;
    double limit_plus_ = 0.0;
    double sup_ = 0.0;
    double inf_ = 0.0;
    std::shared_ptr<const Spline> spline_;
    std::function<double(double)> custom_value_;
    std::function<double(double)> custom_derivative_;
    std::string custom_name_;
};

std::string to_string(TimeProfile::Kind kind);

}  // namespace horizonlab
