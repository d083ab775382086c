"""Steiner-point bounding strategies.

A tree minimising the flow-weighted quadratic cost only exists when the
number of Steiner points is bounded somehow; these are the three supported
ways of bounding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class DegreeBound:
    """Require every Steiner point to have degree at least phi (phi >= 3)."""

    phi: int

    def __post_init__(self) -> None:
        if self.phi < 3:
            raise ValueError(f"degree bound requires phi >= 3, got {self.phi}")


@dataclass(frozen=True, slots=True)
class ExplicitBound:
    """Cap the number of Steiner points at k (k >= 0)."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"explicit bound requires k >= 0, got {self.k}")


@dataclass(frozen=True, slots=True)
class NodeWeighted:
    """Charge a fixed cost c > 0 per Steiner point in the objective."""

    c: float

    def __post_init__(self) -> None:
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"node weight must be positive and finite, got {self.c}")


BoundStrategy = Union[DegreeBound, ExplicitBound, NodeWeighted]


def max_steiner_count(n_sources: int, phi: int) -> int:
    """Largest Steiner count a tree on n sources plus a sink can host when
    every Steiner degree is at least phi.

    A tree on n + 1 + j nodes has n + j edges, so counting degrees,
    2(n + j) >= (n + 1) + phi*j, i.e. j <= (n - 1) / (phi - 2).
    """
    return max(0, (n_sources - 1) // (phi - 2))
