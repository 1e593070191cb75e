"""Bounded-contention coding and an additive radio network simulator."""

__version__ = "0.1.0"
