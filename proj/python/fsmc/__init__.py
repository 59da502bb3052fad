"""Finite-state Markov channels: construction, mixing/degradation operators,
and mutual-information rate estimation under iid inputs."""

from fsmc._core import *  # noqa: F401,F403
from fsmc._core import __version__  # noqa: F401
