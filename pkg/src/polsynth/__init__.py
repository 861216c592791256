"""Policy-enforced privacy-preserving synthetic tabular data."""

__version__ = "0.1.0"

from polsynth.errors import PolsynthError

__all__ = ["PolsynthError", "__version__"]
