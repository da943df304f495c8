#include "horizonlab/characteristics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "horizonlab/error.hpp"

namespace horizonlab {

namespace {

void require_hyperbolic(const RadialComponents& c, double x0, double r) {
    if (!(c.g00 > 0.0)) {
        std::ostringstream os;
        os << "g00 = " << c.g00 << " is not positive at (x0, r) = (" << x0 << ", " << r << ")";
        throw HyperbolicityError(os.str(), x0, r);
    }
    const double q = c.q();
    if (!(q > 0.0)) {
        std::ostringstream os;
        os << "strict hyperbolicity fails (q = " << q << ") at (x0, r) = (" << x0 << ", " << r << ")";
        throw HyperbolicityError(os.str(), x0, r);
    }
}

void require_radius(double r) {
    if (!(r > 0.0)) throw PreconditionError("radial characteristics need r > 0");
}

}  // namespace

CharRoots radial_char_roots(const RadialMetric& metric, double x0, double r) {
    require_radius(r);
    const RadialComponents c = metric.at(x0, r);
    require_hyperbolic(c, x0, r);
    const CharSpeeds s = char_speeds(c, x0, r);
    // s_pm = -c_mp for a unit outward gradient.
    return {-s.c_plus, -s.c_minus, c.q()};
}

CharSpeeds char_speeds(const RadialComponents& c, double x0, double r) {
    require_hyperbolic(c, x0, r);
    const double sq = std::sqrt(c.q());
    // Pick the non-cancelling branch; the other root follows from the product
    // of roots, c_plus * c_minus = grr / g00.
    if (c.gr0 >= 0.0) {
        const double big = (c.gr0 + sq) / c.g00;
        return {big, c.grr / (c.gr0 + sq)};
    }
    const double small = (c.gr0 - sq) / c.g00;
    return {c.grr / (c.gr0 - sq), small};
}

CharSpeeds char_speeds(const RadialMetric& metric, double x0, double r) {
    require_radius(r);
    return char_speeds(metric.at(x0, r), x0, r);
}

FactorSpeeds factor_speeds_bpm(const RadialMetric& metric, double x0, double r) {
    require_radius(r);
    const RadialComponents c = metric.at(x0, r);
    require_hyperbolic(c, x0, r);
    const double sq = std::sqrt(c.q());
    const FactorSpeeds b{c.gr0 + sq, c.gr0 - sq};
    const CharSpeeds s = char_speeds(c, x0, r);
    const double scale = (std::abs(c.gr0) + sq) / c.g00;
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    if (std::abs(b.b_plus / c.g00 - s.c_plus) > tol || std::abs(b.b_minus / c.g00 - s.c_minus) > tol)
        throw NumericalError("b_pm / g00 disagrees with the characteristic speeds");
    return b;
}

std::string to_string(SurfaceVerdict v) {
    switch (v) {
        case SurfaceVerdict::trapped: return "trapped";
        case SurfaceVerdict::outermost_trapped: return "outermost-trapped";
        case SurfaceVerdict::antitrapped: return "antitrapped";
        case SurfaceVerdict::outermost_antitrapped: return "outermost-antitrapped";
        case SurfaceVerdict::untrapped: return "untrapped";
    }
    return "unknown";
}

SurfaceClassification classify_surface(const RadialMetric& metric, double t, double r_s) {
    const CharRoots roots = radial_char_roots(metric, t, r_s);
    const double sp = roots.s_plus, sm = roots.s_minus;
    const double band_minus = 1e-8 * (1.0 + std::abs(sp));
    const double band_plus = 1e-8 * (1.0 + std::abs(sm));
    const bool minus_zero = std::abs(sm) <= band_minus;
    const bool plus_zero = std::abs(sp) <= band_plus;

    SurfaceClassification out{sp, sm, SurfaceVerdict::untrapped};
    if (minus_zero && plus_zero) {
        std::ostringstream os;
        os << "both xi0 roots vanish at r_s = " << r_s << " (xi0+ = " << sp << ", xi0- = " << sm << ")";
        throw DegenerateClassificationError(os.str());
    }
    if (minus_zero) {
        out.verdict = SurfaceVerdict::outermost_trapped;
    } else if (plus_zero) {
        out.verdict = SurfaceVerdict::outermost_antitrapped;
    } else if (sm > 0.0) {
        out.verdict = SurfaceVerdict::trapped;
    } else if (sp < 0.0) {
        out.verdict = SurfaceVerdict::antitrapped;
    }
    return out;
}

Eigen::Matrix2d radial_inverse_metric(const RadialMetric& metric, double x0, double r) {
    require_radius(r);
    const RadialComponents c = metric.at(x0, r);
    Eigen::Matrix2d g;
    g << c.g00, c.gr0, c.gr0, c.grr;
    return g;
}

ConePairingReport cone_pairing_check(const Eigen::MatrixXd& inverse_metric, std::size_t n_samples,
                                     std::uint64_t seed) {
    const Eigen::Index dim = inverse_metric.rows();
    if (dim < 2 || inverse_metric.cols() != dim)
        throw PreconditionError("cone check needs a square inverse metric of dimension >= 2");
    if (!inverse_metric.isApprox(inverse_metric.transpose(), 1e-12))
        throw PreconditionError("inverse metric must be symmetric");
    if (!(inverse_metric(0, 0) > 0.0)) throw PreconditionError("cone check needs g00 > 0");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inverse_metric);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const auto positive = (ev.array() > 0.0).count();
    const auto negative = (ev.array() < 0.0).count();
    if (positive != 1 || negative != dim - 1)
        throw PreconditionError("inverse metric is not strictly hyperbolic (signature + - ... -)");

    const Eigen::MatrixXd lower = inverse_metric.inverse();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&] {
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
        return Eigen::VectorXd(v / v.norm());
    };

    const std::size_t max_attempts = 2000 * std::max<std::size_t>(n_samples, 1);
    auto sample = [&](auto&& accept) {
        std::vector<Eigen::VectorXd> out;
        out.reserve(n_samples);
        std::size_t attempts = 0;
        while (out.size() < n_samples) {
            if (++attempts > max_attempts)
                throw NumericalError("cone sampling acceptance rate too low");
            Eigen::VectorXd v = draw();
            // Both half-cones are symmetric under v -> -v.
            if (accept(v)) out.push_back(v);
            else if (accept(Eigen::VectorXd(-v))) out.push_back(-v);
        }
        return out;
    };
    const auto vectors = sample([&](const Eigen::VectorXd& v) {
        return v.dot(lower * v) > 0.0 && v(0) > 0.0;
    });
    const auto covectors = sample([&](const Eigen::VectorXd& xi) {
        return xi.dot(inverse_metric * xi) > 0.0 && inverse_metric.row(0).dot(xi) > 0.0;
    });

    ConePairingReport rep;
    rep.n_vectors = vectors.size();
    rep.n_covectors = covectors.size();
    rep.min_pairing = std::numeric_limits<double>::infinity();
    for (const auto& v : vectors) {
        for (const auto& xi : covectors) {
            ++rep.n_pairs;
            const double p = v.dot(xi);
            if (p < rep.min_pairing) rep.min_pairing = p;
            if (!(p > 0.0)) {
                if (rep.violations == 0) {
                    rep.counter_vector = v;
                    rep.counter_covector = xi;
                }
                ++rep.violations;
            }
        }
    }
    return rep;
}

}  // namespace horizonlab
