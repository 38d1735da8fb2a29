"""Slow decorrelation in KPZ growth models: simulators, reference laws and harnesses."""

from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
