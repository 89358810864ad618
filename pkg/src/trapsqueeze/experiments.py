"""Named scenarios: the ramp schedules of the reference squeezing and entanglement studies.

Single-ion presets (``fig1_*``, ``fig2_*``) squeeze one radial mode; two-ion
presets (``fig3_*``, ``fig4_*``) entangle the radial modes of an ion pair
with Coulomb factor ``xi = 0.5`` and coupling scale
``xi * omega_long**2 / omega_rf**2 = DEFAULT_COUPLING``.
"""

from dataclasses import dataclass, replace

from .analysis import series_from
from .errors import UnknownPreset
from .propagation import DEFAULT_DT, propagate
from .trap import RampSchedule, TrapParams, initial_state

DEFAULT_COUPLING = 0.05
XI = 0.5


@dataclass(frozen=True)
class Preset:
    name: str
    params: TrapParams
    schedule: RampSchedule
    t_end: float
    description: str

    def with_coupling(self, coupling):
        """Same scenario with a different Coulomb coupling scale (two ions only)."""
        if self.params.n_ions != 2:
            raise ValueError("coupling only applies to two-ion presets")
        return replace(self, params=TrapParams.pair(coupling, xi=self.params.xi))


def _fmt(x):
    return f"{x:g}"


def _catalog():
    single = TrapParams()
    pair = TrapParams.pair(DEFAULT_COUPLING, xi=XI)
    presets = [
        Preset(
            "fig1_red", single,
            RampSchedule([(0, -0.001, 0.1), (4, -0.1, 0.1), (8, -0.001, 0.1)]), 60.0,
            "a: -0.001 -> -0.1 -> -0.001 over 4/Omega each, q = 0.1; crosses an unstable region",
        ),
        Preset(
            "fig1_blue", single,
            RampSchedule([(0, 0.0001, 0.01), (4, 0.01, 0.01), (8, 0.0001, 0.01)]), 60.0,
            "a: 0.0001 -> 0.01 -> 0.0001 over 4/Omega each, q = 0.01; stable throughout",
        ),
        Preset(
            "fig2_left", single,
            RampSchedule([(0, 1, 0), (4, 1, 0), (14, 1, 0.5), (24, 1, 0)]), 60.0,
            "a = 1; q held at 0 until 4/Omega, up to 0.5 by 14/Omega, back to 0 by 24/Omega",
        ),
        Preset(
            "fig2_right", single,
            RampSchedule([(0, 1, 0), (10, 0.1, 0), (20, 0.1, 0.5), (30, 1, 0.5), (40, 1, 0)]), 60.0,
            "joint ramp: a 1 -> 0.1 on [0, 10], q 0 -> 0.5 on [10, 20], a 0.1 -> 1 on [20, 30], "
            "q 0.5 -> 0 on [30, 40]",
        ),
    ]
    for dt in (0, 0.2, 1, 2, 4):
        presets.append(Preset(
            f"fig3_dt{_fmt(dt)}", pair,
            RampSchedule([(0, 200, 0), (dt, 2, 0)]), 50.0,
            f"two ions, q = 0, a: 200 -> 2 linearly over {_fmt(dt)}/Omega" if dt
            else "two ions, q = 0, a switched instantly from 200 to 2",
        ))
    for q in (0, 0.1, 0.5):
        presets.append(Preset(
            f"fig3_ac_q{_fmt(q)}", pair,
            RampSchedule([(0, 200, q), (0.1, 2, q)]), 50.0,
            f"two ions, q = {_fmt(q)} constant, a: 200 -> 2 linearly over 0.1/Omega",
        ))
    for dt in (0.2, 1, 1.3):
        presets.append(Preset(
            f"fig4_dt{_fmt(dt)}", pair,
            RampSchedule([(0, 10, 0), (dt, 10, 100), (2 * dt, 10, 0)]), 200.0,
            f"two ions, a = 10, q: 0 -> 100 -> 0 linearly over {_fmt(dt)}/Omega each way",
        ))
    return {p.name: p for p in presets}


CATALOG = _catalog()


def preset_names():
    return tuple(CATALOG)


def preset(name):
    """Look up a preset by name; raises :class:`UnknownPreset` otherwise."""
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownPreset(name, CATALOG) from None


def run_preset(p, method="rk4", dt=DEFAULT_DT, sample_every=100, t_end=None):
    """Propagate a preset (or preset name) from its initial state.

    Returns ``(result, rows)`` with ``rows`` from :func:`series_from`.
    """
    if isinstance(p, str):
        p = preset(p)
    sigma0 = initial_state(p.params, p.schedule)
    result = propagate(sigma0, p.params, p.schedule, t_end or p.t_end, dt=dt,
                       method=method, sample_every=sample_every)
    return result, series_from(result, p.schedule)
