"""Independent reference values for the radial horizon tests.

The outer black-hole separatrix attracts solutions of dr/dx0 = A(x0)/r + 1
when integrated backward in x0, so starting at r = |A(+inf)| far in the
future and integrating backward converges onto it.  The values printed here
are frozen into the C++ tests; rerun with `python3 radial_oracles.py`.
"""
import numpy as np
from scipy.integrate import solve_ivp

RTOL, ATOL = 1e-13, 1e-15


def tanh_ramp(x):
    return -2.0 + 0.5 * np.tanh(x)


def minus_tanh(x):
    return -np.tanh(x)


def backward_separatrix(A, x_start, r_start, x_eval):
    sol = solve_ivp(lambda t, r: A(t) / r + 1.0, (x_start, min(x_eval)), [r_start],
                    method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)
    return {x: float(sol.sol(x)[0]) for x in x_eval}


def appearance_time():
    # r-phase until r = 0.05, then w = r^2/2 with dw/dx0 = A + r.
    hit = lambda t, r: r[0] - 0.05
    hit.terminal = True
    s1 = solve_ivp(lambda t, r: minus_tanh(t) / r + 1.0, (40.0, -40.0), [1.0],
                   method="DOP853", rtol=RTOL, atol=ATOL, events=hit)
    t1 = s1.t_events[0][0]
    zero = lambda t, w: w[0]
    zero.terminal = True
    s2 = solve_ivp(lambda t, w: minus_tanh(t) + np.sqrt(2.0 * max(w[0], 0.0)),
                   (t1, -40.0), [0.5 * 0.05 ** 2], method="DOP853", rtol=RTOL,
                   atol=1e-18, events=zero)
    return float(s2.t_events[0][0])


def disappearance_time():
    hit = lambda t, r: r[0] - 0.05
    hit.terminal = True
    s1 = solve_ivp(lambda t, r: minus_tanh(t) / r - 1.0, (-40.0, 40.0), [1.0],
                   method="DOP853", rtol=RTOL, atol=ATOL, events=hit)
    t1 = s1.t_events[0][0]
    zero = lambda t, w: w[0]
    zero.terminal = True
    s2 = solve_ivp(lambda t, w: minus_tanh(t) - np.sqrt(2.0 * max(w[0], 0.0)),
                   (t1, 40.0), [0.5 * 0.05 ** 2], method="DOP853", rtol=RTOL,
                   atol=1e-18, events=zero)
    return float(s2.t_events[0][0])


if __name__ == "__main__":
    xs = [-50.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 50.0]
    for x, r in backward_separatrix(tanh_ramp, 80.0, 1.5, xs).items():
        print(f"tanh-ramp R+({x:+.1f}) = {r:.15f}")
    print(f"appearance x0(1)    = {appearance_time():.15f}")
    print(f"disappearance x0(2) = {disappearance_time():.15f}")
