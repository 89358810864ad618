"""Line-oriented run configuration files.

Grammar::

    # comment (also allowed after a value)
    [trap]                      optional; defaults to one ion
    n_ions = 2
    omega_rf = 1
    omega_long = 0.316227766
    xi = 0.5
    mass = 1
    coupling = 0.05             two ions only; sets omega_long from xi

    [schedule]                  one "t a q" triple per line, t non-decreasing
    0    200  0
    0.2  2    0

    [run]                       keys before any section also belong here
    preset = fig3_dt0.2         excludes [schedule]
    dt = 1e-3
    t_end = 50
    sample_every = 100
    method = rk4                rk4 | expm | expm-midpoint | both
    out = fig3.csv
    jobs = 4

    [sweep]
    axis = time_scale           time_scale | q_shift | a_shift | coupling | preset
    values = 0 0.2 1 2 4
    series_dir = sweep_out      optional, one CSV per value

    [stability]
    a_range = -0.2 0.2
    q_range = 0 1
    resolution = 50 50

Section and key names are case-sensitive.  Unknown keys are errors.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, InvalidSchedule, UnknownPreset
from .experiments import preset as lookup_preset
from .propagation import DEFAULT_DT, METHODS
from .trap import RampSchedule, TrapParams

RUN_METHODS = METHODS + ("both",)
SWEEP_AXES = ("time_scale", "q_shift", "a_shift", "coupling", "preset")

_KEYS = {
    "trap": {"n_ions", "omega_rf", "omega_long", "xi", "mass", "coupling"},
    "run": {"preset", "dt", "t_end", "sample_every", "method", "out", "jobs"},
    "sweep": {"axis", "values", "series_dir"},
    "stability": {"a_range", "q_range", "resolution"},
}


@dataclass
class RunConfig:
    params: TrapParams = field(default_factory=TrapParams)
    preset: Optional[str] = None
    schedule: Optional[RampSchedule] = None
    t_end: Optional[float] = None
    dt: float = DEFAULT_DT
    sample_every: int = 100
    method: str = "rk4"
    out: Optional[str] = None
    jobs: Optional[int] = None
    axis: Optional[str] = None
    values: tuple = ()
    series_dir: Optional[str] = None
    a_range: tuple = (-0.2, 0.2)
    q_range: tuple = (0.0, 1.0)
    resolution: tuple = (50, 50)

    @property
    def n_ions(self):
        return self.params.n_ions

    def validate(self):
        """Check the invariants; raises :class:`ConfigError`."""
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end is not None and not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.sample_every < 1:
            raise ConfigError(f"sample_every must be >= 1, got {self.sample_every}")
        if self.method not in RUN_METHODS:
            raise ConfigError(f"method must be one of {', '.join(RUN_METHODS)}, got {self.method!r}")
        if self.preset is not None and self.schedule is not None:
            raise ConfigError("preset and [schedule] are mutually exclusive")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.axis is not None and self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}, got {self.axis!r}")
        if any(n < 1 for n in self.resolution):
            raise ConfigError("resolution must be positive")
        for lo_hi in (self.a_range, self.q_range):
            if not all(math.isfinite(v) for v in lo_hi):
                raise ConfigError("stability ranges must be finite")
        return self

    def resolved(self):
        """``(params, schedule, t_end)`` for a single trajectory."""
        if self.preset is not None:
            p = lookup_preset(self.preset)
            return p.params, p.schedule, self.t_end or p.t_end
        if self.schedule is None:
            raise ConfigError("no preset and no [schedule] given")
        if self.t_end is None:
            raise ConfigError("t_end is required with an inline [schedule]")
        return self.params, self.schedule, self.t_end


def _strip(line):
    return line.split("#", 1)[0].strip()


def _float(value, key, lineno):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}", lineno) from None


def _int(value, key, lineno):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}", lineno) from None


def _floats(value, key, lineno, count=None):
    parts = value.split()
    if count is not None and len(parts) != count:
        raise ConfigError(f"{key}: expected {count} numbers, got {len(parts)}", lineno)
    return tuple(_float(v, key, lineno) for v in parts)


def parse_config(text):
    """Parse configuration text into a validated :class:`RunConfig`."""
    section = "run"
    trap = {}
    run = {}
    sweep = {}
    stab = {}
    rows = []
    targets = {"trap": trap, "run": run, "sweep": sweep, "stability": stab}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in targets and section != "schedule":
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if section == "schedule":
            parts = line.split()
            if len(parts) != 3:
                raise ConfigError(f"schedule lines need 't a q', got {line!r}", lineno)
            t, a, q = (_float(v, "schedule", lineno) for v in parts)
            if not all(math.isfinite(v) for v in (t, a, q)):
                raise ConfigError("schedule values must be finite", lineno)
            if rows and t < rows[-1][1][0]:
                raise ConfigError(
                    f"breakpoint time {t:g} is earlier than the previous one ({rows[-1][1][0]:g})", lineno
                )
            rows.append((lineno, (t, a, q)))
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if key in targets[section]:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        targets[section][key] = (value, lineno)

    cfg = RunConfig()
    cfg.params = _build_params(trap)
    if rows:
        try:
            cfg.schedule = RampSchedule([r for _, r in rows])
        except InvalidSchedule as exc:
            raise ConfigError(str(exc), rows[0][0]) from None

    for key, (value, lineno) in run.items():
        if key == "preset":
            try:
                lookup_preset(value)
            except UnknownPreset as exc:
                raise ConfigError(str(exc), lineno) from None
            if cfg.schedule is not None:
                raise ConfigError("preset and [schedule] are mutually exclusive", lineno)
            cfg.preset = value
        elif key in ("dt", "t_end"):
            v = _float(value, key, lineno)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{key} must be positive, got {value}", lineno)
            setattr(cfg, key, v)
        elif key in ("sample_every", "jobs"):
            v = _int(value, key, lineno)
            if v < 1:
                raise ConfigError(f"{key} must be >= 1, got {value}", lineno)
            setattr(cfg, key, v)
        elif key == "method":
            if value not in RUN_METHODS:
                raise ConfigError(f"method must be one of {', '.join(RUN_METHODS)}", lineno)
            cfg.method = value
        elif key == "out":
            cfg.out = value

    if "axis" in sweep:
        value, lineno = sweep["axis"]
        if value not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}", lineno)
        cfg.axis = value
    if "values" in sweep:
        value, lineno = sweep["values"]
        if cfg.axis == "preset":
            cfg.values = tuple(value.split())
        else:
            cfg.values = _floats(value, "values", lineno)
            if not all(math.isfinite(v) for v in cfg.values):
                raise ConfigError("sweep values must be finite", lineno)
        if not cfg.values:
            raise ConfigError("sweep needs at least one value", lineno)
    if "series_dir" in sweep:
        cfg.series_dir = sweep["series_dir"][0]

    for key in ("a_range", "q_range"):
        if key in stab:
            value, lineno = stab[key]
            lo_hi = _floats(value, key, lineno, count=2)
            if not all(math.isfinite(v) for v in lo_hi):
                raise ConfigError(f"{key} must be finite", lineno)
            setattr(cfg, key, lo_hi)
    if "resolution" in stab:
        value, lineno = stab["resolution"]
        res = tuple(_int(v, "resolution", lineno) for v in value.split())
        if len(res) not in (1, 2) or min(res) < 1:
            raise ConfigError("resolution takes one or two positive integers", lineno)
        cfg.resolution = res * 2 if len(res) == 1 else res

    return cfg.validate()


def _build_params(trap):
    values = {}
    for key, (value, lineno) in trap.items():
        values[key] = (_int if key == "n_ions" else _float)(value, key, lineno)
    n_ions = values.pop("n_ions", 1)
    coupling = values.pop("coupling", None)
    try:
        if coupling is not None:
            if n_ions != 2:
                raise ConfigError("coupling needs n_ions = 2", trap["coupling"][1])
            if "omega_long" in values:
                raise ConfigError("give either coupling or omega_long, not both", trap["coupling"][1])
            return TrapParams.pair(coupling, xi=values.get("xi", 0.5),
                                   omega_rf=values.get("omega_rf", 1.0), mass=values.get("mass", 1.0))
        if n_ions == 2 and "xi" not in values:
            values["xi"] = 0.5
        return TrapParams(n_ions=n_ions, **values)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        first = min((ln for _, ln in trap.values()), default=None)
        raise ConfigError(f"[trap]: {exc}", first) from None


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
