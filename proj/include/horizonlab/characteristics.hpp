#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "horizonlab/metric.hpp"

namespace horizonlab {

/// Roots of g00 S_x0^2 + 2 gr0 S_x0 + grr = 0 for a radial gradient with S_r = 1.
struct CharRoots {
    double s_minus;
    double s_plus;
    double q;
};

/// Radial signal speeds dr/dx0 of the two characteristic families.
struct CharSpeeds {
    double c_plus;
    double c_minus;
};

/// b_pm = gr0 +- sqrt(q): the transport fields g00 d/dx0 + b_pm d/dr.
struct FactorSpeeds {
    double b_plus;
    double b_minus;
};

CharRoots radial_char_roots(const RadialMetric& metric, double x0, double r);

/// c_pm = gr0/g00 +- sqrt(q)/g00, evaluated in the cancellation-free form.
CharSpeeds char_speeds(const RadialMetric& metric, double x0, double r);
CharSpeeds char_speeds(const RadialComponents& c, double x0 = 0.0, double r = 0.0);

FactorSpeeds factor_speeds_bpm(const RadialMetric& metric, double x0, double r);

enum class SurfaceVerdict { trapped, outermost_trapped, antitrapped, outermost_antitrapped, untrapped };

std::string to_string(SurfaceVerdict v);

struct SurfaceClassification {
    double xi0_plus;
    double xi0_minus;
    SurfaceVerdict verdict;
};

/// Classifies the sphere r = r_s at frozen time t by the signs of the initial
/// xi0 of the two null bicharacteristics leaving it along the outward normal.
/// A root counts as zero when |root| <= 1e-8 (1 + |other root|).
SurfaceClassification classify_surface(const RadialMetric& metric, double t, double r_s);

/// Inverse metric [[g00, gr0], [gr0, grr]] of the radial (x0, r) reduction.
Eigen::Matrix2d radial_inverse_metric(const RadialMetric& metric, double x0, double r);

struct ConePairingReport {
    std::size_t n_vectors = 0;
    std::size_t n_covectors = 0;
    std::size_t n_pairs = 0;
    std::size_t violations = 0;
    double min_pairing = 0.0;  ///< over unit-normalized samples
    std::optional<Eigen::VectorXd> counter_vector;
    std::optional<Eigen::VectorXd> counter_covector;
    bool passed() const { return violations == 0; }
};

/// Samples n forward time-like vectors (g_jk v^j v^k > 0, v^0 > 0) and n
/// covectors in the dual half-cone containing (1, 0, ..., 0)
/// (g^jk xi_j xi_k > 0, g^0k xi_k > 0), then checks every pairing
/// sum_k v^k xi_k > 0.  Sampling is Gaussian rejection with a mt19937_64
/// stream seeded by `seed`.
ConePairingReport cone_pairing_check(const Eigen::MatrixXd& inverse_metric, std::size_t n_samples,
                                     std::uint64_t seed);

}  // namespace horizonlab
