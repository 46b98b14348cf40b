"""Numerical laboratory for a coupled wave/Klein-Gordon system.

Radial finite-difference evolution on a hyperboloidal foliation, with
closed-form and spectral oracles, energy functionals, inequality
checkers, the oscillator reduction along rays, and two independent
radiation-field extractions.
"""

__version__ = "0.1.0"

from .geometry import (GeometryError, HyperbolaCurve, RadialFrame,
                       SpacetimePoint, asymptote_gap, entry_point,
                       from_hyperboloidal, hyperbola_through, lambda0,
                       to_hyperboloidal)
from .oracles import (DalembertField, KGSpectralField, OracleSampler,
                      dalembert_radial, duhamel_radial, free_wave_radiation,
                      kg_spectral)
from .profiles import Profile, ProfileError
from .scenario import Scenario, ScenarioError, parse_scenario, serialize_scenario
from .sliceio import SliceIOError, slice_dump, slice_load
from .solver import (HistorySampler, SliceHistory, SolverError, evolve,
                     sample_along_curve, sample_on_hyperboloid)

__all__ = [
    "__version__",
    "Profile", "ProfileError",
    "Scenario", "ScenarioError", "parse_scenario", "serialize_scenario",
    "GeometryError", "SpacetimePoint", "RadialFrame", "HyperbolaCurve",
    "to_hyperboloidal", "from_hyperboloidal", "hyperbola_through",
    "entry_point", "asymptote_gap", "lambda0",
    "DalembertField", "KGSpectralField", "OracleSampler",
    "dalembert_radial", "kg_spectral", "duhamel_radial",
    "free_wave_radiation",
    "SolverError", "SliceHistory", "HistorySampler", "evolve",
    "sample_on_hyperboloid", "sample_along_curve",
    "SliceIOError", "slice_dump", "slice_load",
]
