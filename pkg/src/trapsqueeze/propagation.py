"""Covariance-matrix propagation under time-dependent quadratic Hamiltonians.

The covariance matrix obeys ``dsigma/dt = A sigma + sigma A^T`` with drift
``A = J G(t)``.  Two independent integrators are provided:

``rk4``
    classical fourth-order Runge-Kutta on the matrix equation above;
``expm``
    piecewise exponentiation ``sigma -> S sigma S^T`` with ``S`` the
    exponential of a fourth-order (two-point Gauss) Magnus generator, which
    keeps every step exactly symplectic;
``expm-midpoint``
    the same with ``S = exp(dt A(t + dt/2))``, second order in ``dt``.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceDetected
from .gaussian import n_modes_of, symplectic_form
from .trap import TrapField, quad_form

DEFAULT_DT = 1e-3
DIVERGENCE_CAP = 1e9
STABILITY_TOL = 1e-6
METHODS = ("rk4", "expm", "expm-midpoint")

_TAYLOR_DEGREE = 16
_TAYLOR_THETA = 0.5
_CHUNK = 4096
_GAUSS = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)


def expm(a):
    """Matrix exponential by scaling and squaring with a Taylor core.

    Works on a single matrix or a stack ``(..., n, n)``.  Each matrix is
    scaled by ``2**-s`` until its 1-norm is at most 0.5, where the degree-16
    Taylor remainder is below 1e-19, then squared back ``s`` times.
    """
    a = np.asarray(a, dtype=float)
    shape = a.shape
    n = shape[-1]
    x = a.reshape((-1, n, n))
    norms = np.abs(x).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.ceil(np.log2(norms / _TAYLOR_THETA))
    s = np.where(np.isfinite(s) & (s > 0), s, 0).astype(int)
    x = x / np.ldexp(1.0, s)[:, None, None]
    eye = np.eye(n)
    r = np.broadcast_to(eye, x.shape).copy()
    for k in range(_TAYLOR_DEGREE, 0, -1):
        r = eye + (x @ r) / k
    for i in range(int(s.max(initial=0))):
        sel = s > i
        if sel.all():
            r = r @ r
        else:
            r[sel] = r[sel] @ r[sel]
    return r.reshape(shape)


def drift_matrix(G):
    """Drift ``A = J G``; accepts a single form or a stack of forms."""
    G = np.asarray(G, dtype=float)
    n = G.shape[-1] // 2
    return symplectic_form(n) @ G


def _lyap(A, s):
    m = A @ s
    return m + m.T


def _rk4_update(s, a0, am, a1, dt):
    k1 = _lyap(a0, s)
    k2 = _lyap(am, s + 0.5 * dt * k1)
    k3 = _lyap(am, s + 0.5 * dt * k2)
    k4 = _lyap(a1, s + dt * k3)
    s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (s + s.T)


def _check_finite(s, t):
    if not np.all(np.isfinite(s)):
        raise DivergenceDetected(t)
    return s


def rk4_step(sigma, t, dt, field):
    """One classical Runge-Kutta step of the covariance equation.

    ``field`` maps a time to the quadratic form ``G`` and is evaluated at
    ``t``, ``t + dt/2`` and ``t + dt``.  The result is symmetrised.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    s = np.asarray(sigma, dtype=float)
    a0, am, a1 = (drift_matrix(field(t + c * dt)) for c in (0.0, 0.5, 1.0))
    return _check_finite(_rk4_update(s, a0, am, a1, dt), t)


def _generators(field, t, dt, scheme):
    """Exponent of the one-step propagator(s) starting at time(s) ``t``."""
    if scheme == "midpoint":
        return dt * drift_matrix(field(t + 0.5 * dt))
    if scheme != "magnus4":
        raise ValueError(f"unknown exponentiation scheme {scheme!r}")
    a1 = drift_matrix(field(t + _GAUSS[0] * dt))
    a2 = drift_matrix(field(t + _GAUSS[1] * dt))
    return 0.5 * dt * (a1 + a2) + (math.sqrt(3.0) / 12.0) * dt * dt * (a2 @ a1 - a1 @ a2)


def step_propagator(t, dt, field, scheme="magnus4"):
    """Symplectic one-step propagator ``S`` for a step of length ``dt`` from ``t``."""
    return expm(_generators(field, t, dt, scheme))


def expm_step(sigma, t, dt, field, scheme="magnus4"):
    """One piecewise-exponentiation step ``sigma -> S sigma S^T``.

    ``scheme="magnus4"`` samples ``G`` at the two Gauss points of the step and
    includes the commutator correction (fourth order); ``"midpoint"`` uses
    ``S = exp(dt J G(t + dt/2))`` (second order).  Both are exactly
    symplectic up to rounding.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    s = np.asarray(sigma, dtype=float)
    S = step_propagator(t, dt, field, scheme)
    out = S @ s @ S.T
    return _check_finite(0.5 * (out + out.T), t)


@dataclass(frozen=True)
class PropagationResult:
    """Sampled covariance-matrix trajectory.

    ``states[i]`` is the covariance matrix at ``times[i]``.  When ``diverged``
    is set, ``divergence_time`` is the first time at which an entry exceeded
    the cap (or became non-finite) and nothing beyond it is stored.
    """

    times: np.ndarray
    states: np.ndarray
    method: str
    dt: float
    diverged: bool = False
    divergence_time: Optional[float] = None

    @property
    def n_modes(self):
        return self.states.shape[-1] // 2

    @property
    def final(self):
        return self.states[-1]


def _scheme_for(method):
    if method == "expm":
        return "magnus4"
    if method == "expm-midpoint":
        return "midpoint"
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def propagate(sigma0, params, schedule, t_end, dt=DEFAULT_DT, method="rk4",
              sample_every=100, cap=DIVERGENCE_CAP):
    """Integrate the covariance matrix from ``t = 0`` to ``t_end``.

    Parameters
    ----------
    sigma0 : array_like
        Initial covariance matrix (rescaled quadratures).
    params : TrapParams
    schedule : RampSchedule
    t_end : float
        Final time in units of ``1/Omega``.
    dt : float
        Step size.  It is shrunk if needed so that a whole number of steps
        spans ``t_end``.
    method : {"rk4", "expm", "expm-midpoint"}
    sample_every : int
        Store every ``sample_every``-th state; the initial and final states
        are always stored.
    cap : float
        Divergence threshold on ``max |sigma_jk|``.

    Returns
    -------
    PropagationResult
        Divergence does not raise; it is flagged on the result and the
        trajectory up to that point is kept.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if int(sample_every) < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    sample_every = int(sample_every)
    s = np.array(sigma0, dtype=float)
    n_modes_of(s)
    field = TrapField(params, schedule)

    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / n_steps
    times, states = [0.0], [s.copy()]
    diverged, t_div = False, None

    for k0 in range(0, n_steps, _CHUNK):
        k1 = min(k0 + _CHUNK, n_steps)
        t0 = np.arange(k0, k1) * h
        if method == "rk4":
            grid = drift_matrix(field(np.arange(k0, k1 + 1) * h))
            mid = drift_matrix(field(t0 + 0.5 * h))
        else:
            props = expm(_generators(field, t0, h, _scheme_for(method)))
        for i in range(k1 - k0):
            if method == "rk4":
                s = _rk4_update(s, grid[i], mid[i], grid[i + 1], h)
            else:
                S = props[i]
                s = S @ s @ S.T
                s = 0.5 * (s + s.T)
            if not np.abs(s).max() <= cap:
                diverged, t_div = True, (k0 + i + 1) * h
                break
            k = k0 + i + 1
            if k % sample_every == 0 or k == n_steps:
                times.append(k * h)
                states.append(s.copy())
        if diverged:
            break

    return PropagationResult(
        times=np.array(times),
        states=np.array(states),
        method=method,
        dt=h,
        diverged=diverged,
        divergence_time=t_div,
    )


def _chain_product(mats):
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    mats = np.asarray(mats)
    while len(mats) > 1:
        tail = mats[-1:] if len(mats) % 2 else mats[:0]
        even = mats[: len(mats) - len(tail)]
        mats = np.concatenate([even[1::2] @ even[0::2], tail])
    return mats[0]


def monodromy(params, a, q, dt=None, steps=2048):
    """One-RF-period propagator at fixed Mathieu parameters.

    The period ``2 pi / Omega`` is cut into ``steps`` pieces (or into
    ``round(2 pi / dt)`` if ``dt`` is given; at least 1000 either way) and the
    exact symplectic step propagators are multiplied together.  Unscaled
    quadratures are used; the spectrum does not depend on that choice.
    """
    period = 2.0 * math.pi
    if dt is not None:
        steps = int(round(period / dt))
    if steps < 1000:
        raise ValueError(f"monodromy needs at least 1000 steps per period, got {steps}")
    h = period / steps
    omega_ref = params.omega_rf

    def field(t):
        return quad_form(params, a, q, t, omega_ref)

    t0 = np.arange(steps) * h
    return _chain_product(expm(_generators(field, t0, h, "magnus4")))


def spectral_radius(m):
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def is_stable(params, a, q, dt=None, steps=2048):
    """True iff every Floquet multiplier has modulus at most ``1 + 1e-6``."""
    return spectral_radius(monodromy(params, a, q, dt=dt, steps=steps)) <= 1.0 + STABILITY_TOL

