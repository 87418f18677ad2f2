"""Single-shot chiral discrimination of molecules in a driven microwave cavity."""

__version__ = "0.1.0"

from .config import RunConfig, build_config, parse_config
from .dynamics import integrate
from .estimator import ChiralDiscriminator
from .molecule import PROPANEDIOL, Chirality, MoleculeSpec

__all__ = [
    "ChiralDiscriminator",
    "Chirality",
    "MoleculeSpec",
    "PROPANEDIOL",
    "RunConfig",
    "build_config",
    "integrate",
    "parse_config",
]
