"""Experiment description and its flat key=value configuration grammar.

A scenario bundles the coupling constants of the system

    Box u           = b00 * (d_t u)(d_t v) + bd * (d_r u)(d_r v),
    Box v + c^2 v   = u * (p00 * d_t^2 v + pd * Delta v),

the Klein-Gordon mass c, the data amplitude eps, four radial profiles
supported in the unit ball, the grid parameters, and monitor settings.

The configuration format is a flat list of ``section.key = value`` lines
with ``#`` comments; sections are couplings, mass, data, grid, monitors.
Errors carry line numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .profiles import Profile, ProfileError

__all__ = ["Scenario", "ScenarioError", "parse_scenario", "serialize_scenario"]


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    b00: float = 1.0
    bd: float = 1.0
    p00: float = 1.0
    pd: float = 1.0
    c: float = 1.0
    eps: float = 1e-3
    u0: Profile = field(default_factory=lambda: Profile("zero"))
    u1: Profile = field(default_factory=lambda: Profile("bump", k=4))
    v0: Profile = field(default_factory=lambda: Profile("zero"))
    v1: Profile = field(default_factory=lambda: Profile("bump", k=4))
    dr: float = 0.01
    r_max: float = 60.0
    t_end: float = 52.0
    cfl: float = 0.5
    delta: float = 0.05
    eta: float = 0.6

    def __post_init__(self):
        if self.c <= 0:
            raise ScenarioError(f"Klein-Gordon mass must be positive, got c={self.c}")
        if self.dr <= 0:
            raise ScenarioError(f"grid spacing must be positive, got dr={self.dr}")
        if not (0 < self.cfl <= 0.5):
            raise ScenarioError(f"time-step ratio must satisfy 0 < cfl <= 0.5, got {self.cfl}")
        if self.t_end <= 2.0:
            raise ScenarioError(f"final time must exceed the initial time 2, got t_end={self.t_end}")
        if self.r_max < self.t_end:
            raise ScenarioError(
                f"outer radius r_max={self.r_max} must be >= t_end={self.t_end} "
                "so the support cone never reaches the boundary")
        for name in ("u0", "u1", "v0", "v1"):
            prof = getattr(self, name)
            if not prof.is_zero and prof.radius > 1.0:
                raise ScenarioError(
                    f"profile {name} has support radius {prof.radius} > 1; "
                    "data must be supported in the unit ball")

    @property
    def is_free(self):
        return self.b00 == self.bd == self.p00 == self.pd == 0.0

    def free(self):
        """The same scenario with all couplings switched off."""
        return replace(self, b00=0.0, bd=0.0, p00=0.0, pd=0.0)

    def with_grid(self, **kwargs):
        return replace(self, **kwargs)


_SCHEMA = {
    "couplings.b00": ("b00", float),
    "couplings.bd": ("bd", float),
    "couplings.p00": ("p00", float),
    "couplings.pd": ("pd", float),
    "mass.c": ("c", float),
    "data.eps": ("eps", float),
    "data.u0": ("u0", Profile.parse),
    "data.u1": ("u1", Profile.parse),
    "data.v0": ("v0", Profile.parse),
    "data.v1": ("v1", Profile.parse),
    "grid.dr": ("dr", float),
    "grid.r_max": ("r_max", float),
    "grid.t_end": ("t_end", float),
    "grid.cfl": ("cfl", float),
    "monitors.delta": ("delta", float),
    "monitors.eta": ("eta", float),
}


def parse_scenario(text):
    """Parse a configuration document into a Scenario.

    Unknown keys, malformed lines, and range violations raise
    ScenarioError with the offending line number.
    """
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        attr, conv = _SCHEMA[key]
        if attr in kwargs:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        try:
            kwargs[attr] = conv(value)
        except (ValueError, ProfileError) as exc:
            raise ScenarioError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    try:
        return Scenario(**kwargs)
    except ScenarioError as exc:
        raise ScenarioError(str(exc)) from exc


def serialize_scenario(scn):
    """Render a Scenario back to the configuration grammar."""
    lines = []
    for key, (attr, _) in _SCHEMA.items():
        value = getattr(scn, attr)
        if isinstance(value, Profile):
            value = value.describe()
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
