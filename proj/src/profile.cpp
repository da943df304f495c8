#include "horizonlab/profile.hpp"

#include <algorithm>
#include <cmath>

#include "horizonlab/error.hpp"

namespace horizonlab {

struct TimeProfile::Spline {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> m;  // second derivatives at the knots

    std::size_t interval(double t) const {
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = static_cast<std::size_t>(it - x.begin());
        return std::clamp<std::size_t>(i, 1, x.size() - 1) - 1;
    }

    double value(double t) const {
        if (t <= x.front()) return y.front();
        if (t >= x.back()) return y.back();
        std::size_t i = interval(t);
        double h = x[i + 1] - x[i];
        double a = (x[i + 1] - t) / h;
        double b = (t - x[i]) / h;
        return a * y[i] + b * y[i + 1] +
               ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    }

    double derivative(double t) const {
        if (t <= x.front() || t >= x.back()) return 0.0;
        std::size_t i = interval(t);
        double h = x[i + 1] - x[i];
        double a = (x[i + 1] - t) / h;
        double b = (t - x[i]) / h;
        return (y[i + 1] - y[i]) / h - (3.0 * a * a - 1.0) * h * m[i] / 6.0 +
               (3.0 * b * b - 1.0) * h * m[i + 1] / 6.0;
    }
};

namespace {

// Clamped spline with zero slope at both ends (Thomas algorithm).
std::vector<double> clamped_second_derivatives(const std::vector<double>& x,
                                               const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> diag(n), upper(n, 0.0), lower(n, 0.0), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            double h = x[1] - x[0];
            diag[0] = h / 3.0;
            upper[0] = h / 6.0;
            rhs[0] = (y[1] - y[0]) / h;
        } else if (i == n - 1) {
            double h = x[n - 1] - x[n - 2];
            lower[i] = h / 6.0;
            diag[i] = h / 3.0;
            rhs[i] = -(y[n - 1] - y[n - 2]) / h;
        } else {
            double h0 = x[i] - x[i - 1];
            double h1 = x[i + 1] - x[i];
            lower[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> m(n);
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    return m;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw PreconditionError(std::string("profile parameter ") + what +
                                                   " must be finite");
}

}  // namespace

TimeProfile TimeProfile::constant(double value) {
    require_finite(value, "value");
    TimeProfile p;
    p.kind_ = Kind::constant;
    p.params_ = {value};
    p.limit_minus_ = p.limit_plus_ = p.sup_ = p.inf_ = value;
    return p;
}

TimeProfile TimeProfile::tanh_ramp(double offset, double amplitude, double center,
                                   double width) {
    for (double v : {offset, amplitude, center, width}) require_finite(v, "tanh-ramp");
    if (!(width > 0.0)) throw PreconditionError("tanh-ramp width must be positive");
    TimeProfile p;
    p.kind_ = Kind::tanh_ramp;
    p.params_ = {offset, amplitude, center, width};
    p.limit_minus_ = offset - amplitude;
    p.limit_plus_ = offset + amplitude;
    p.sup_ = std::max(p.limit_minus_, p.limit_plus_);
    p.inf_ = std::min(p.limit_minus_, p.limit_plus_);
    return p;
}

TimeProfile TimeProfile::rational_bump(double offset, double amplitude, double center,
                                       double width) {
    for (double v : {offset, amplitude, center, width}) require_finite(v, "rational-bump");
    if (!(width > 0.0)) throw PreconditionError("rational-bump width must be positive");
    TimeProfile p;
    p.kind_ = Kind::rational_bump;
    p.params_ = {offset, amplitude, center, width};
    p.limit_minus_ = p.limit_plus_ = offset;
    p.sup_ = std::max(offset, offset + amplitude);
    p.inf_ = std::min(offset, offset + amplitude);
    return p;
}

TimeProfile TimeProfile::tabulated(std::vector<double> x0, std::vector<double> values) {
    if (x0.size() != values.size())
        throw PreconditionError("tabulated profile: x0 and value arrays differ in length");
    if (x0.size() < 2) throw PreconditionError("tabulated profile needs at least two points");
    for (std::size_t i = 0; i < x0.size(); ++i) {
        require_finite(x0[i], "x0");
        require_finite(values[i], "value");
        if (i > 0 && !(x0[i] > x0[i - 1]))
            throw PreconditionError("tabulated profile: x0 must be strictly increasing");
    }
    auto spline = std::make_shared<Spline>();
    spline->m = clamped_second_derivatives(x0, values);
    spline->x = std::move(x0);
    spline->y = std::move(values);

    TimeProfile p;
    p.kind_ = Kind::tabulated;
    p.limit_minus_ = spline->y.front();
    p.limit_plus_ = spline->y.back();
    // Spline extrema: dense sampling per interval is enough for sup/inf bounds.
    double lo = spline->y.front(), hi = lo;
    for (std::size_t i = 0; i + 1 < spline->x.size(); ++i) {
        for (int k = 0; k <= 32; ++k) {
            double t = spline->x[i] + (spline->x[i + 1] - spline->x[i]) * k / 32.0;
            double v = spline->value(t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    p.sup_ = hi;
    p.inf_ = lo;
    p.params_ = spline->y;
    p.spline_ = std::move(spline);
    return p;
}

TimeProfile TimeProfile::custom(std::string name, std::function<double(double)> value,
                                std::function<double(double)> derivative, double limit_minus,
                                double limit_plus) {
    if (!value || !derivative) throw PreconditionError("custom profile needs both callables");
    require_finite(limit_minus, "limit_minus");
    require_finite(limit_plus, "limit_plus");
    TimeProfile p;
    p.kind_ = Kind::custom;
    p.custom_name_ = std::move(name);
    p.custom_value_ = std::move(value);
    p.custom_derivative_ = std::move(derivative);
    p.limit_minus_ = limit_minus;
    p.limit_plus_ = limit_plus;
    double lo = std::min(limit_minus, limit_plus), hi = std::max(limit_minus, limit_plus);
    for (int k = -4000; k <= 4000; ++k) {
        double v = p.custom_value_(k * 0.025);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    p.sup_ = hi;
    p.inf_ = lo;
    return p;
}

double TimeProfile::value(double x0) const {
    switch (kind_) {
        case Kind::constant:
            return params_[0];
        case Kind::tanh_ramp:
            return params_[0] + params_[1] * std::tanh((x0 - params_[2]) / params_[3]);
        case Kind::rational_bump: {
            double z = (x0 - params_[2]) / params_[3];
            return params_[0] + params_[1] / (1.0 + z * z);
        }
        case Kind::tabulated:
            return spline_->value(x0);
        case Kind::custom:
            return custom_value_(x0);
    }
    return 0.0;
}

double TimeProfile::derivative(double x0) const {
    switch (kind_) {
        case Kind::constant:
            return 0.0;
        case Kind::tanh_ramp: {
            double c = std::cosh((x0 - params_[2]) / params_[3]);
            return params_[1] / (params_[3] * c * c);
        }
        case Kind::rational_bump: {
            double z = (x0 - params_[2]) / params_[3];
            double d = 1.0 + z * z;
            return -2.0 * params_[1] * z / (params_[3] * d * d);
        }
        case Kind::tabulated:
            return spline_->derivative(x0);
        case Kind::custom:
            return custom_derivative_(x0);
    }
    return 0.0;
}

double TimeProfile::sup_abs() const { return std::max(std::abs(sup_), std::abs(inf_)); }
double TimeProfile::sup() const { return sup_; }
double TimeProfile::inf() const { return inf_; }

std::string TimeProfile::kind_name() const {
    return kind_ == Kind::custom ? "custom:" + custom_name_ : to_string(kind_);
}

std::string to_string(TimeProfile::Kind kind) {
    switch (kind) {
        case TimeProfile::Kind::constant: return "constant";
        case TimeProfile::Kind::tanh_ramp: return "tanh-ramp";
        case TimeProfile::Kind::rational_bump: return "rational-bump";
        case TimeProfile::Kind::tabulated: return "tabulated";
        case TimeProfile::Kind::custom: return "custom";
    }
    return "unknown";
}

}  // namespace horizonlab
