"""Adaptive Lipschitz elimination on the torus.

PAC-style global optimization of periodic, Lipschitz cost landscapes
under bounded shot noise: randomized low-dimensional geodesic flats,
confidence-certified elimination, and analytic / quantum-circuit oracles
for end-to-end verification.
"""

__version__ = "0.1.0"

from .engine import EngineConfig, FlatResult, run_flat
from .errors import CertificateAnomalyError, ConfigurationError, ResourceLimitError
from .landscapes import BandDentLandscape, DentLandscape, TubeDentSet
from .multiflat import GlobalConfig, GlobalResult, run_global
from .noise import NoiseSpec, NoisyEstimate
from .torus import FlatSpec, geodesic_dist, grid_net, refine_net, wrap

__all__ = [
    "__version__",
    "BandDentLandscape",
    "CertificateAnomalyError",
    "ConfigurationError",
    "DentLandscape",
    "EngineConfig",
    "FlatResult",
    "FlatSpec",
    "GlobalConfig",
    "GlobalResult",
    "NoiseSpec",
    "NoisyEstimate",
    "ResourceLimitError",
    "TubeDentSet",
    "geodesic_dist",
    "grid_net",
    "refine_net",
    "run_flat",
    "run_global",
    "wrap",
]
