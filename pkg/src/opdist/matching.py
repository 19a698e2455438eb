"""Subject mapping between two opinions via exact optimal transport."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import _backend
from .semantics import IdentityProvider, semantic_distance

FLOW_EPS = 1e-9
DEFAULT_TAU = 0.3


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def transport(cost, a, b, kernel=None) -> np.ndarray:
    """Optimal plan between integer masses ``a`` and ``b``, each normalized to total 1.

    Masses are rescaled to a common integer total so the kernel works in exact
    integer flow units.
    """
    cost = np.asarray(cost, dtype=np.float64)
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    if cost.shape != (len(a), len(b)):
        raise ValueError(f"cost shape {cost.shape} does not match masses ({len(a)}, {len(b)})")
    if min(a, default=0) < 0 or min(b, default=0) < 0 or not sum(a) or not sum(b):
        raise ValueError("masses must be nonnegative with positive totals")
    sa, sb = sum(a), sum(b)
    total = _lcm(sa, sb)
    supply = [x * (total // sa) for x in a]
    demand = [x * (total // sb) for x in b]
    g = 0
    for x in supply + demand:
        g = gcd(g, x)
    supply = [x // g for x in supply]
    demand = [x // g for x in demand]
    units = (kernel or _backend.min_cost_transport)(cost, supply, demand)
    return units / (total // g)


def solve_transport(cost, kernel=None) -> np.ndarray:
    """Optimal plan between uniform masses ``1/n1`` (rows) and ``1/n2`` (columns)."""
    cost = np.asarray(cost, dtype=np.float64)
    n1, n2 = cost.shape
    if n1 < 1 or n2 < 1:
        raise ValueError("cost matrix must be at least 1x1")
    return transport(cost, [1] * n1, [1] * n2, kernel=kernel)


def transport_objective(flow, cost) -> float:
    return float((np.asarray(flow) * np.asarray(cost)).sum())


@dataclass(frozen=True)
class MappedPair:
    i: int
    j: int
    flow: float
    cost: float


@dataclass(frozen=True)
class SubjectMapping:
    pairs: tuple[MappedPair, ...]

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def index_pairs(self) -> set[tuple[int, int]]:
        return {(p.i, p.j) for p in self.pairs}


def flow_to_mapping(flow, cost, tau: float = DEFAULT_TAU, eps: float = FLOW_EPS) -> SubjectMapping:
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    flow = np.asarray(flow)
    cost = np.asarray(cost)
    pairs = [
        MappedPair(i, j, float(flow[i, j]), float(cost[i, j]))
        for i, j in zip(*np.nonzero((flow > eps) & (cost <= tau)))
    ]
    return SubjectMapping(tuple(pairs))


def cost_matrix(subjects1, subjects2, provider=None) -> np.ndarray:
    """Semantic distances between two subject lists.

    Subjects with the same concept id cost 0. Otherwise the provider's vectors
    are compared; a subject without a vector costs 1 to everything else.
    """
    if not subjects1 or not subjects2:
        raise ValueError("both subject lists must be non-empty")
    provider = provider or IdentityProvider()
    v1 = [provider.vector(s) for s in subjects1]
    v2 = [provider.vector(s) for s in subjects2]
    out = np.ones((len(subjects1), len(subjects2)))
    for i, (s, u) in enumerate(zip(subjects1, v1)):
        for j, (t, v) in enumerate(zip(subjects2, v2)):
            if s.concept_id == t.concept_id:
                out[i, j] = 0.0
            elif u is not None and v is not None:
                out[i, j] = semantic_distance(u, v)
    return out
