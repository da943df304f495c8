#pragma once

#include <algorithm>
#include <array>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "horizonlab/error.hpp"

namespace horizonlab::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
    double atol = 1e-10;
    double rtol = 1e-9;
    double h_initial = 0.0;  ///< 0 selects a starting step automatically
    double h_max = std::numeric_limits<double>::infinity();
    /// A step below h_min_rel * max(1, |t|) is a collapse.
    double h_min_rel = 1e-13;
    std::int64_t max_steps = 5'000'000;
    bool record = true;  ///< keep every accepted step in the result
};

template <std::size_t N>
struct EventHit {
    std::size_t index;
    double t;
    State<N> y;
};

/// Zero crossing g(t, y) = 0.  direction > 0 only counts rising crossings,
/// direction < 0 only falling ones (in the sense of increasing t).
/// `action` decides whether a crossing terminates the run; without one the
/// `terminal` flag decides.
template <std::size_t N>
struct Event {
    std::function<double(double, const State<N>&)> g;
    int direction = 0;
    bool terminal = true;
    std::function<bool(const EventHit<N>&)> action;
};

template <std::size_t N>
struct Result {
    std::vector<double> t;
    std::vector<State<N>> y;
    std::vector<EventHit<N>> hits;
    int terminal_event = -1;  ///< index of the event that stopped the run, or -1
    bool reached_end = false;
    std::int64_t steps = 0;
    std::int64_t rejected = 0;
    double t_final = 0.0;
    State<N> y_final{};
    /// Dense-output values at the requested sample times reached by the run.
    std::vector<double> dense_t;
    std::vector<State<N>> dense_y;
};

/// Dormand-Prince 5(4) with the 4th-order continuous extension, adaptive
/// steps, and event location on the dense output.  Integrates from t0 towards
/// t1 in either direction.  Non-finite right-hand sides reject the step.
/// `dense_times` must be ordered along the direction of integration.
template <std::size_t N, typename Rhs>
Result<N> integrate(Rhs&& rhs, double t0, const State<N>& y0, double t1, const Options& opt,
                    const std::vector<Event<N>>& events = {},
                    const std::vector<double>& dense_times = {}) {
    using S = State<N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    auto finite = [](const S& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    auto axpy = [](const S& y, double h, std::initializer_list<std::pair<double, const S*>> terms) {
        S out = y;
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            out[i] += h * acc;
        }
        return out;
    };

    Result<N> res;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double t = t0;
    S y = y0;
    if (!finite(y)) throw PreconditionError("non-finite initial state");
    S k1 = rhs(t, y);
    if (!finite(k1)) throw PreconditionError("non-finite right-hand side at the initial state");
    if (opt.record) {
        res.t.push_back(t);
        res.y.push_back(y);
    }
    std::size_t next_dense = 0;
    while (next_dense < dense_times.size() && dir * (dense_times[next_dense] - t0) < 0.0) ++next_dense;
    while (next_dense < dense_times.size() && dense_times[next_dense] == t0) {
        res.dense_t.push_back(t0);
        res.dense_y.push_back(y0);
        ++next_dense;
    }
    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t, y);

    auto error_norm = [&](const S& a, const S& b, const S& err) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            s += (err[i] / sc) * (err[i] / sc);
        }
        return std::sqrt(s / N);
    };

    double span = std::abs(t1 - t0);
    double h = opt.h_initial;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic.
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, span);
        S y1 = axpy(y, dir * h0, {{1.0, &k1}});
        S f1 = rhs(t + dir * h0, y1);
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d2 += ((f1[i] - k1[i]) / sc) * ((f1[i] - k1[i]) / sc);
        }
        d2 = std::isfinite(d2) ? std::sqrt(d2 / N) / h0 : 1e300;
        const double m = std::max(d1n, d2);
        double hh = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
        h = std::min(100.0 * h0, hh);
    }
    h = std::min({h, opt.h_max, std::max(span, 1e-300)});

    while (dir * (t1 - t) > 0.0) {
        if (res.steps >= opt.max_steps)
            throw StepSizeCollapse("step budget exhausted", t, h);
        const double h_min = opt.h_min_rel * std::max(1.0, std::abs(t));
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        if (h < h_min && !last) throw StepSizeCollapse("step size collapsed", t, h);

        const double hs = dir * h;
        S k2 = rhs(t + c2 * hs, axpy(y, hs, {{a21, &k1}}));
        S k3 = rhs(t + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
        S k4 = rhs(t + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        S k5 = rhs(t + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        S k6 = rhs(t + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        S ynew = axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const double tnew = last ? t1 : t + hs;
        S k7 = rhs(tnew, ynew);

        double err = std::numeric_limits<double>::infinity();
        if (finite(ynew) && finite(k7)) {
            S est;
            for (std::size_t i = 0; i < N; ++i)
                est[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
            err = error_norm(y, ynew, est);
        }
        if (!(err <= 1.0)) {
            ++res.rejected;
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            h *= fac;
            if (h < h_min) throw StepSizeCollapse("step size collapsed", t, h);
            continue;
        }
        ++res.steps;

        // Dense output coefficients.
        std::array<S, 5> rc;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = hs * k1[i] - ydiff;
            rc[0][i] = y[i];
            rc[1][i] = ydiff;
            rc[2][i] = bspl;
            rc[3][i] = ydiff - hs * k7[i] - bspl;
            rc[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * k7[i]);
        }
        const double told = t;
        auto dense = [&](double tt) {
            const double th = (tt - told) / hs;
            const double th1 = 1.0 - th;
            S out;
            for (std::size_t i = 0; i < N; ++i)
                out[i] = rc[0][i] +
                         th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
            return out;
        };

        // Events: earliest crossing in the step wins.
        int stop_event = -1;
        double t_stop = tnew;
        S y_stop = ynew;
        std::vector<EventHit<N>> step_hits;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double ga = g_prev[e];
            const double gb = events[e].g(tnew, ynew);
            const bool rising = ga < 0.0 && gb >= 0.0;
            const bool falling = ga > 0.0 && gb <= 0.0;
            const bool hit = (events[e].direction >= 0 && rising) ||
                             (events[e].direction <= 0 && falling);
            if (hit) {
                auto gfun = [&](double tt) { return events[e].g(tt, dense(tt)); };
                double te = tnew;
                if (gb != 0.0) {
                    double lo = std::min(told, tnew), hi = std::max(told, tnew);
                    double glo = gfun(lo), ghi = gfun(hi);
                    if (glo == 0.0) {
                        te = lo;
                    } else if (ghi == 0.0) {
                        te = hi;
                    } else if ((glo < 0.0) != (ghi < 0.0)) {
                        std::uintmax_t iters = 100;
                        auto tol = [](double a, double b) {
                            return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a));
                        };
                        auto br = boost::math::tools::toms748_solve(gfun, lo, hi, glo, ghi, tol, iters);
                        // Report the end of the bracket on the far side of the crossing,
                        // so the returned state satisfies the event inequality.
                        te = dir > 0.0 ? br.second : br.first;
                    }
                }
                EventHit<N> eh{e, te, dense(te)};
                step_hits.push_back(eh);
            }
            g_prev[e] = gb;
        }
        std::sort(step_hits.begin(), step_hits.end(),
                  [dir](const EventHit<N>& a, const EventHit<N>& b) { return dir * a.t < dir * b.t; });
        for (const auto& eh : step_hits) {
            res.hits.push_back(eh);
            const auto& ev = events[eh.index];
            const bool terminate = ev.action ? ev.action(eh) : ev.terminal;
            if (terminate) {
                stop_event = static_cast<int>(eh.index);
                t_stop = eh.t;
                y_stop = eh.y;
                break;
            }
        }

        const double t_reach = stop_event >= 0 ? t_stop : tnew;
        while (next_dense < dense_times.size() && dir * (dense_times[next_dense] - t_reach) <= 0.0) {
            const double td = dense_times[next_dense++];
            res.dense_t.push_back(td);
            res.dense_y.push_back(td == tnew ? ynew : dense(td));
        }

        if (stop_event >= 0) {
            if (opt.record) {
                res.t.push_back(t_stop);
                res.y.push_back(y_stop);
            }
            res.terminal_event = stop_event;
            res.t_final = t_stop;
            res.y_final = y_stop;
            return res;
        }

        t = tnew;
        y = ynew;
        k1 = k7;
        if (opt.record) {
            res.t.push_back(t);
            res.y.push_back(y);
        }
        const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
        h = std::min(h * fac, opt.h_max);
    }
    res.reached_end = true;
    res.t_final = t;
    res.y_final = y;
    return res;
}

}  // namespace horizonlab::ode
