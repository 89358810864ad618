"""Paul-trap quadratic forms, ramp schedules and potential-well initial states.

Times are measured in units of ``1/Omega`` (``Omega`` the RF drive frequency)
and the quadratures are rescaled once, at ``t = 0``, with the secular
frequency of the initial trap settings:

    x = sqrt(m w_pw) X,   p = P / sqrt(m w_pw).

In these variables the ion mass drops out and the single-ion Hamiltonian
``P**2/2m + m Omega**2 (a + 2q cos Omega t) X**2 / 8`` becomes, in units of
``Omega``, ``G = diag((a + 2q cos t) / (4 w), w)`` with ``w = w_pw / Omega``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSchedule, NoSecularWell, UnsupportedDimension
from .gaussian import ground_state_cm


@dataclass(frozen=True)
class TrapParams:
    """Physical constants of the trap.

    ``omega_rf`` and ``omega_long`` share one (arbitrary) frequency unit.
    ``xi`` is the dimensionless Coulomb factor, about 0.5 for two ions.
    ``omega_long`` and ``xi`` are ignored for a single ion.
    """

    omega_rf: float = 1.0
    omega_long: float = 0.0
    xi: float = 0.0
    mass: float = 1.0
    n_ions: int = 1

    def __post_init__(self):
        if not self.omega_rf > 0:
            raise ValueError(f"omega_rf must be positive, got {self.omega_rf}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.xi >= 0:
            raise ValueError(f"xi must be non-negative, got {self.xi}")
        if not self.omega_long >= 0:
            raise ValueError(f"omega_long must be non-negative, got {self.omega_long}")
        if self.n_ions not in (1, 2):
            raise ValueError(f"n_ions must be 1 or 2, got {self.n_ions}")

    @property
    def coupling(self):
        """Coulomb scale ``xi * omega_long**2 / omega_rf**2``."""
        if self.n_ions == 1:
            return 0.0
        return self.xi * (self.omega_long / self.omega_rf) ** 2

    @classmethod
    def pair(cls, coupling=0.05, xi=0.5, omega_rf=1.0, mass=1.0):
        """Two-ion parameters with ``xi * omega_long**2 / omega_rf**2 = coupling``."""
        if coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {coupling}")
        if coupling > 0 and xi <= 0:
            raise ValueError("a positive coupling needs xi > 0")
        omega_long = omega_rf * math.sqrt(coupling / xi) if coupling > 0 else 0.0
        return cls(omega_rf=omega_rf, omega_long=omega_long, xi=xi, mass=mass, n_ions=2)


@dataclass(frozen=True)
class RampSchedule:
    """Piecewise-linear ``(a(t), q(t))`` through ``(t, a, q)`` breakpoints.

    Breakpoint times must be non-decreasing.  Repeating a time encodes an
    instantaneous switch: the schedule is right-continuous there and takes
    the value of the last breakpoint sharing that time.
    """

    breakpoints: tuple

    def __post_init__(self):
        try:
            bps = tuple((float(t), float(a), float(q)) for t, a, q in self.breakpoints)
        except (TypeError, ValueError) as exc:
            raise InvalidSchedule(f"breakpoints must be (t, a, q) triples: {exc}") from None
        if not bps:
            raise InvalidSchedule("schedule needs at least one breakpoint")
        arr = np.array(bps)
        if not np.all(np.isfinite(arr)):
            raise InvalidSchedule("schedule contains non-finite values")
        bad = np.nonzero(np.diff(arr[:, 0]) < 0)[0]
        if bad.size:
            raise InvalidSchedule(f"breakpoint {bad[0] + 1} has a time earlier than its predecessor")
        object.__setattr__(self, "breakpoints", bps)

    @property
    def times(self):
        return np.array([b[0] for b in self.breakpoints])

    @property
    def initial(self):
        """``(a, q)`` of the first breakpoint, used for the potential-well reference."""
        return self.breakpoints[0][1], self.breakpoints[0][2]

    @property
    def end_time(self):
        return self.breakpoints[-1][0]

    def coeffs_at(self, t):
        return coeffs_at(self, t)

    def scaled(self, factor):
        """Copy with every breakpoint time multiplied by ``factor``."""
        if not factor >= 0:
            raise InvalidSchedule(f"time scale must be non-negative, got {factor}")
        return RampSchedule(tuple((t * factor, a, q) for t, a, q in self.breakpoints))

    def shifted(self, da=0.0, dq=0.0):
        """Copy with ``da`` added to every ``a`` and ``dq`` to every ``q``."""
        return RampSchedule(tuple((t, a + da, q + dq) for t, a, q in self.breakpoints))


def coeffs_at(schedule, t):
    """Interpolated ``(a, q)`` at time(s) ``t``.

    Linear between breakpoints, constant before the first and after the last.
    Accepts scalars or arrays; returns floats for scalar ``t``.
    """
    if not isinstance(schedule, RampSchedule):
        schedule = RampSchedule(schedule)
    bp = np.asarray(schedule.breakpoints)
    ts, av, qv = bp[:, 0], bp[:, 1], bp[:, 2]
    t_arr = np.asarray(t, dtype=float)
    right = np.searchsorted(ts, t_arr, side="right")
    left = np.clip(right - 1, 0, len(ts) - 1)
    right = np.clip(right, 0, len(ts) - 1)
    span = ts[right] - ts[left]
    # span is zero only when clamped to an end (or t sits before the first point)
    frac = np.where(span > 0, (t_arr - ts[left]) / np.where(span > 0, span, 1.0), 0.0)
    a = av[left] + frac * (av[right] - av[left])
    q = qv[left] + frac * (qv[right] - qv[left])
    if t_arr.ndim == 0:
        return float(a), float(q)
    return a, q


def secular_frequency(a, q, omega_rf=1.0):
    """Lowest-order secular frequency ``(omega_rf / 2) sqrt(a + q**2 / 2)``."""
    well = a + 0.5 * q * q
    if not well > 0:
        raise NoSecularWell(f"a + q^2/2 = {well:.6g} <= 0: no pseudo-potential well")
    return 0.5 * omega_rf * math.sqrt(well)


def _ref(params, omega_ref):
    w = omega_ref / params.omega_rf
    if not w > 0:
        raise ValueError(f"reference frequency must be positive, got {omega_ref}")
    return w


def quad_form_single(params, a, q, t, omega_ref):
    """Single-ion quadratic form in the rescaled quadratures.

    Parameters
    ----------
    params : TrapParams
    a, q : float or array_like
        Instantaneous Mathieu parameters.
    t : float or array_like
        Time in units of ``1/Omega``; ``a``, ``q`` and ``t`` broadcast.
    omega_ref : float
        Frequency used to rescale the quadratures (same unit as
        ``params.omega_rf``), normally the initial secular frequency.

    Returns
    -------
    ndarray, shape (..., 2, 2)
        ``G`` in units of ``Omega``.
    """
    if params.n_ions != 1:
        raise UnsupportedDimension("quad_form_single needs n_ions = 1")
    w = _ref(params, omega_ref)
    a, q, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, q, t)))
    G = np.zeros(a.shape + (2, 2))
    G[..., 0, 0] = (a + 2.0 * q * np.cos(t)) / (4.0 * w)
    G[..., 1, 1] = w
    return G


def quad_form_pair(params, a, q, t, omega_ref):
    """Two-ion quadratic form with linearised Coulomb coupling.

    Position block ``[[d, c], [c, d]] / w`` with
    ``d = (a + 2q cos t)/4 - kappa`` and ``c = kappa``, where
    ``kappa = xi omega_long**2 / omega_rf**2``; momentum block ``w * I``.
    The centre-of-mass mode therefore feels the bare trap and the stretch
    mode is softened by ``2 kappa``.
    """
    if params.n_ions != 2:
        raise UnsupportedDimension("quad_form_pair needs n_ions = 2")
    w = _ref(params, omega_ref)
    kappa = params.coupling
    a, q, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, q, t)))
    diag = ((a + 2.0 * q * np.cos(t)) / 4.0 - kappa) / w
    G = np.zeros(a.shape + (4, 4))
    G[..., 0, 0] = G[..., 1, 1] = diag
    G[..., 0, 1] = G[..., 1, 0] = kappa / w
    G[..., 2, 2] = G[..., 3, 3] = w
    return G


def quad_form(params, a, q, t, omega_ref):
    """Dispatch to the single-ion or two-ion form."""
    if params.n_ions == 1:
        return quad_form_single(params, a, q, t, omega_ref)
    return quad_form_pair(params, a, q, t, omega_ref)


def reference_frequency(params, schedule):
    """Secular frequency at the schedule's first breakpoint."""
    a0, q0 = schedule.initial
    return secular_frequency(a0, q0, params.omega_rf)


def secular_form(params, schedule):
    """Time-averaged quadratic form at ``t = 0``.

    The AC term is replaced by its secular contribution, i.e. ``a`` by
    ``a + q**2/2`` with ``q = 0``.
    """
    a0, q0 = schedule.initial
    omega_ref = reference_frequency(params, schedule)
    return quad_form(params, a0 + 0.5 * q0 * q0, 0.0, 0.0, omega_ref)


def initial_state(params, schedule):
    """Potential-well ground state used as the starting covariance matrix.

    One ion gives the identity exactly.  Two ions give the ground state of
    :func:`secular_form`, which includes the Coulomb terms.
    """
    if params.n_ions == 1:
        reference_frequency(params, schedule)
        return np.eye(2)
    return ground_state_cm(secular_form(params, schedule))


@dataclass(frozen=True)
class TrapField:
    """Callable ``t -> G(t)`` for a trap driven along a schedule.

    The quadrature rescaling is frozen at the schedule's initial settings.
    Accepts scalar or array times.
    """

    params: TrapParams
    schedule: RampSchedule

    @property
    def omega_ref(self):
        return reference_frequency(self.params, self.schedule)

    def __call__(self, t):
        a, q = coeffs_at(self.schedule, t)
        return quad_form(self.params, a, q, t, self.omega_ref)
