"""Clairvoyant demon laboratory: random walks on K_m, oriented percolation,
delay schedules, and the multi-scale structure built on top of them."""

from ._core import *  # noqa: F401,F403
