"""Enhanced qualitative probabilistic networks.

Signs that carry a strength (strong, weak or ambiguous relative to a cut-off
delta) plus a multiplication index, abstraction of binary Bayesian networks
into such networks, sign propagation, and a brute-force oracle to check the
results against exact inference.
"""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path of a bundled network file, e.g. ``data_path("antibiotics.qpn")``."""
    return Path(str(resources.files("eqpn") / "data" / name))
