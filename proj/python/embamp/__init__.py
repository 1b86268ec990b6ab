"""Gaussian simulator for embedded-amplification qubit readout."""

from ._impl import *  # noqa: F401,F403
from ._impl import __doc__  # noqa: F401
