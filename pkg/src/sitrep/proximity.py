"""Temporal, spatial and semantic proximity between observations.

Temporal and spatial proximity share one bell-shaped sigmoid,
``4*exp(-u) / (1 + exp(-u))**2`` (identically ``sech**2(u/2)``): continuous,
differentiable, defined on all of R, symmetric in zero, with range (0, 1].
The total proximity is the plain product ``p_t * p_e * p_s`` and lands in
[-1, 1]: 1 means same fact, -1 opposite facts, 0 unrelated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .ontology import SemanticTable

if TYPE_CHECKING:  # pragma: no cover
    from .fsf import FSF

# exp(u) overflows just above 709; beyond 700 the bump is < 4e-304 anyway.
_OVERFLOW_GUARD = 700.0


@dataclass(frozen=True)
class ProximityConfig:
    """Normalization scales for the raw time/distance differences.

    Raw world units feed the sigmoid after division by the scale, so the
    measure stays usable on coordinate systems of any magnitude.
    """

    temporal_scale: float = 1.0
    spatial_scale: float = 10_000.0
    prune_epsilon: float = 0.001

    def __post_init__(self) -> None:
        if not self.temporal_scale > 0:
            raise ValueError(f"temporal_scale {self.temporal_scale} must be > 0")
        if not self.spatial_scale > 0:
            raise ValueError(f"spatial_scale {self.spatial_scale} must be > 0")
        if not 0.0 <= self.prune_epsilon < 1.0:
            raise ValueError(f"prune_epsilon {self.prune_epsilon} must be in [0,1)")


@dataclass(frozen=True, slots=True)
class ProximityBreakdown:
    p_t: float
    p_e: float
    p_s: float
    total: float


def sigmoid_bump(u: float) -> float:
    """4e^{-u}/(1+e^{-u})^2, evaluated overflow-free as 4/(e^u + 2 + e^-u)."""
    if not math.isfinite(u):
        raise ValueError(f"non-finite input {u!r}")
    u = abs(u)
    if u > _OVERFLOW_GUARD:
        return 0.0
    return 4.0 / (math.exp(u) + 2.0 + math.exp(-u))


def sigmoid_bump_array(u: np.ndarray) -> np.ndarray:
    u = np.abs(np.asarray(u, dtype=np.float64))
    with np.errstate(over="ignore"):
        out = 4.0 / (np.exp(u) + 2.0 + np.exp(-u))
    return np.where(u > _OVERFLOW_GUARD, 0.0, out)


def temporal_proximity(dt: float, cfg: ProximityConfig) -> float:
    """Proximity of two instants separated by ``dt`` cycles (sign ignored)."""
    return sigmoid_bump(dt / cfg.temporal_scale)


def spatial_proximity(a_loc: tuple[int, int], b_loc: tuple[int, int], cfg: ProximityConfig) -> float:
    """Proximity of two points at euclidean distance, in world units."""
    return sigmoid_bump(math.dist(a_loc, b_loc) / cfg.spatial_scale)


def total_proximity(
    a: "FSF",
    b: "FSF",
    table: SemanticTable,
    cfg: ProximityConfig,
    at_cycle: Optional[int] = None,
) -> ProximityBreakdown:
    """Product of the three measures, exactly symmetric in (a, b).

    With ``at_cycle`` given, a pair is additionally discounted by the age of
    its staler member: dt = max(|a.time - b.time|, |a.time - at_cycle|,
    |b.time - at_cycle|).
    """
    dt: float = abs(a.time - b.time)
    if at_cycle is not None:
        dt = max(dt, abs(a.time - at_cycle), abs(b.time - at_cycle))
    p_t = temporal_proximity(dt, cfg)
    p_e = spatial_proximity(a.localisation, b.localisation, cfg)
    p_s = table.lookup(a, b)
    return ProximityBreakdown(p_t, p_e, p_s, p_t * p_e * p_s)
