"""Compiled inner loops for the coupled ECG/PPG oscillator."""
import math

import numba
import numpy as np

TWO_PI = 2.0 * math.pi


@numba.njit(cache=True)
def wrap_angle(d):
    """Map an angle to (-pi, pi]."""
    r = (d + math.pi) % TWO_PI - math.pi
    if r == -math.pi:
        r = math.pi
    return r


@numba.njit(cache=True)
def rhs(u, t, omega, a, b, th, A, f0, B0, B1, B2, out):
    x, y, z, v, w = u[0], u[1], u[2], u[3], u[4]
    alpha = 1.0 - math.sqrt(x * x + y * y)
    theta = math.atan2(y, x)
    forcing = 0.0
    for i in range(a.shape[0]):
        d = wrap_angle(theta - th[i])
        forcing += a[i] * d * math.exp(-d * d / (2.0 * b[i] * b[i]))
    z0 = A * math.sin(TWO_PI * f0 * t)
    out[0] = alpha * x - omega * y
    out[1] = alpha * y + omega * x
    out[2] = -forcing - (z - z0)
    out[3] = -B0 * v + B1 * w
    out[4] = z * z - B2 * w


@numba.njit(cache=True)
def rk4_step(u, t, h, omega, a, b, th, A, f0, B0, B1, B2, k1, k2, k3, k4, tmp):
    rhs(u, t, omega, a, b, th, A, f0, B0, B1, B2, k1)
    for j in range(5):
        tmp[j] = u[j] + 0.5 * h * k1[j]
    rhs(tmp, t + 0.5 * h, omega, a, b, th, A, f0, B0, B1, B2, k2)
    for j in range(5):
        tmp[j] = u[j] + 0.5 * h * k2[j]
    rhs(tmp, t + 0.5 * h, omega, a, b, th, A, f0, B0, B1, B2, k3)
    for j in range(5):
        tmp[j] = u[j] + h * k3[j]
    rhs(tmp, t + h, omega, a, b, th, A, f0, B0, B1, B2, k4)
    for j in range(5):
        u[j] += h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0


@numba.njit(cache=True)
def integrate(u0, n_samples, oversample, dt_sample, switch_at, omegas, a, b, th, A, f0, B0, B1, B2):
    """Fixed-step RK4 on the sample grid.

    ``switch_at[k]`` is the time (in samples) at which the angular frequency
    changes from ``omegas[k]`` to ``omegas[k + 1]``; steps are split so every
    switch lands exactly on a step boundary. Returns the state at each sample
    and the index of the first non-finite sample (-1 when none).
    """
    states = np.empty((n_samples, 5))
    u = u0.copy()
    k1 = np.empty(5)
    k2 = np.empty(5)
    k3 = np.empty(5)
    k4 = np.empty(5)
    tmp = np.empty(5)
    seg = 0
    n_switch = switch_at.shape[0]
    eps = 1e-12
    for i in range(n_samples):
        for j in range(5):
            states[i, j] = u[j]
        if not (math.isfinite(u[0]) and math.isfinite(u[1]) and math.isfinite(u[2])
                and math.isfinite(u[3]) and math.isfinite(u[4])):
            return states, i
        if i == n_samples - 1:
            break
        for s in range(oversample):
            ta = i + s / oversample
            tb = i + (s + 1) / oversample
            while seg < n_switch and switch_at[seg] < tb - eps:
                ts = switch_at[seg]
                if ts > ta + eps:
                    rk4_step(u, ta * dt_sample, (ts - ta) * dt_sample, omegas[seg],
                             a, b, th, A, f0, B0, B1, B2, k1, k2, k3, k4, tmp)
                    ta = ts
                seg += 1
            rk4_step(u, ta * dt_sample, (tb - ta) * dt_sample, omegas[seg],
                     a, b, th, A, f0, B0, B1, B2, k1, k2, k3, k4, tmp)
            if seg < n_switch and switch_at[seg] <= tb + eps:
                seg += 1
    return states, -1
