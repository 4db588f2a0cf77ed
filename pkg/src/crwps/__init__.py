"""Orbifold cohomology rings of weighted projective spaces, in exact arithmetic."""

from .fan import build_fan, normalize_weights
from .sectors import enumerate_twisted_sectors, enumerate_triples
from .cohomology import betti_table, ordinary_ring

__all__ = ["build_fan", "normalize_weights", "enumerate_twisted_sectors",
           "enumerate_triples", "betti_table", "ordinary_ring"]
