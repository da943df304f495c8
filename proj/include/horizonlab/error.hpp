#pragma once

#include <stdexcept>
#include <string>

namespace horizonlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// (g^{r0})^2 - g^{00} g^{rr} <= 0, or g^{00} <= 0, at the queried point.
class HyperbolicityError : public Error {
public:
    HyperbolicityError(const std::string& what, double x0, double r)
        : Error(what), x0_(x0), r_(r) {}
    double x0() const noexcept { return x0_; }
    double r() const noexcept { return r_; }

private:
    double x0_;
    double r_;
};

/// Numerical failure of an otherwise valid computation (step collapse,
/// invariant drift, non-convergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

class StepSizeCollapse : public NumericalError {
public:
    StepSizeCollapse(const std::string& what, double t, double step)
        : NumericalError(what), t_(t), step_(step) {}
    double t() const noexcept { return t_; }
    double step() const noexcept { return step_; }

private:
    double t_;
    double step_;
};

/// No bracket between the two fate classes exists on the probed range.
class NoHorizonError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The configured window is too short for fates or crossings to resolve.
class WindowTooShortError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Fixed-point iteration could not be shown to contract.
class ContractionError : public NumericalError {
public:
    ContractionError(const std::string& what, double lipschitz, double int_abs_derivative,
                     double int_t_abs_derivative)
        : NumericalError(what),
          lipschitz_(lipschitz),
          int_abs_derivative_(int_abs_derivative),
          int_t_abs_derivative_(int_t_abs_derivative) {}
    double lipschitz() const noexcept { return lipschitz_; }
    double int_abs_derivative() const noexcept { return int_abs_derivative_; }
    double int_t_abs_derivative() const noexcept { return int_t_abs_derivative_; }

private:
    double lipschitz_;
    double int_abs_derivative_;
    double int_t_abs_derivative_;
};

/// Sampled fates are not ordered by initial radius.
class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A surface classification matched no sign pattern.
class DegenerateClassificationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Delta does not change sign along some ray theta = const.
class PartialErgosphereError : public PreconditionError {
public:
    PartialErgosphereError(const std::string& what, double theta) : PreconditionError(what), theta_(theta) {}
    double theta() const noexcept { return theta_; }

private:
    double theta_;
};

/// The transverse-family vote on a closed orbit has no majority.
class OrbitClassificationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Wave-solver setup violates a stability or geometry requirement (CFL,
/// truncation radius inside the horizon).
class ConfigurationError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// The characteristic coordinate map has a Jacobian below threshold.
class DegenerateCoordinatesError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace horizonlab
