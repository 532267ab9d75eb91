"""Prior-weighted packings and Hamming separations, with verifiers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnsupportedMetric
from .losses import L1

# relative slack so that a packing built at its exact maximal delta verifies
_REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Packing:
    """Candidate ``(delta, pi)``-packing: balls of radius ``delta / pi(theta_v)`` must be disjoint."""

    members: np.ndarray
    delta: float
    prior_values: np.ndarray
    metric: str = "abs"

    def __post_init__(self):
        members = np.array(self.members, dtype=float)
        prior = np.array(self.prior_values, dtype=float)
        if prior.shape != (members.shape[0],):
            raise ValueError("need one prior value per member")
        if np.any(prior <= 0):
            raise ValueError("member prior values must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "prior_values", prior)

    def __len__(self):
        return self.members.shape[0]

    @classmethod
    def from_prior(cls, members, delta, prior, metric="abs") -> "Packing":
        members = np.asarray(members, dtype=float)
        return cls(members, delta, prior(members), metric)


@dataclass(frozen=True)
class PackingCheck:
    valid: bool
    pair: Optional[tuple] = None
    overlap: float = 0.0

    def __bool__(self):
        return self.valid


def verify_packing(candidate: Packing) -> PackingCheck:
    """Check ``|theta_u - theta_v| >= delta/pi_u + delta/pi_v`` for every pair.

    Returns the first violating pair (in index order) and by how much the
    two balls overlap.
    """
    if candidate.metric != "abs" or candidate.members.ndim != 1:
        raise UnsupportedMetric(f"no packing verifier for metric {candidate.metric!r}")
    radii = candidate.delta / candidate.prior_values
    m = candidate.members
    for u, v in itertools.combinations(range(len(m)), 2):
        gap = abs(m[u] - m[v])
        need = radii[u] + radii[v]
        if gap < need * (1 - _REL_TOL):
            return PackingCheck(False, (u, v), float(need - gap))
    return PackingCheck(True)


def max_delta_two_point(theta0: float, theta1: float, prior) -> float:
    """Largest delta for which ``{theta0, theta1}`` is a ``(delta, pi)``-packing.

    ``prior`` is a callable or a pair ``(pi(theta0), pi(theta1))``.
    """
    if theta0 == theta1:
        raise ValueError("packing members must differ")
    p0, p1 = prior if not callable(prior) else (float(prior(theta0)), float(prior(theta1)))
    if p0 <= 0 or p1 <= 0:
        return 0.0
    return abs(theta1 - theta0) / (1.0 / p0 + 1.0 / p1)


def max_delta(members, prior_values) -> float:
    """Largest feasible delta for a scalar packing with more than two members."""
    members = np.asarray(members, dtype=float)
    prior_values = np.asarray(prior_values, dtype=float)
    best = np.inf
    for u, v in itertools.combinations(range(len(members)), 2):
        best = min(best, max_delta_two_point(members[u], members[v],
                                             (prior_values[u], prior_values[v])))
    return float(best)


def hypercube_vertices(d: int) -> np.ndarray:
    """Rows of ``{-1, +1}^d`` in lexicographic order (``-1`` first)."""
    return np.array(list(itertools.product((-1, 1), repeat=d)), dtype=int)


def sign_decoder(theta) -> np.ndarray:
    """Coordinate signs with zero mapped to ``+1``."""
    theta = np.asarray(theta, dtype=float)
    return np.where(theta >= 0, 1, -1)


@dataclass(frozen=True, eq=False)
class HammingSeparation:
    """Hypercube-indexed members ``theta_v`` claimed to be a ``(2 delta, pi)``-Hamming separation.

    ``members[k]`` belongs to ``vertices[k]``; decoding uses coordinate signs.
    """

    vertices: np.ndarray
    members: np.ndarray
    delta: float
    prior_values: np.ndarray

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=int)
        members = np.array(self.members, dtype=float)
        if vertices.ndim == 1:
            vertices = vertices[:, None]
        if members.ndim == 1:
            members = members[:, None]
        d = vertices.shape[1]
        if d > 20 or vertices.shape[0] != 2**d:
            raise ValueError("need all 2^d vertices, d <= 20")
        if members.shape != vertices.shape:
            raise ValueError("members must align with vertices")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "prior_values", np.array(self.prior_values, dtype=float))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def coordinate_split(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Member indices with ``v_j = +1`` and with ``v_j = -1``."""
        plus = np.flatnonzero(self.vertices[:, j] == 1)
        minus = np.flatnonzero(self.vertices[:, j] == -1)
        return plus, minus

    def flip_partner(self, k: int, j: int) -> int:
        """Index of the vertex equal to ``vertices[k]`` except in coordinate ``j``."""
        target = self.vertices[k].copy()
        target[j] = -target[j]
        return int(np.flatnonzero(np.all(self.vertices == target, axis=1))[0])


def scaled_hypercube(d: int, delta: float, prior_values=None) -> HammingSeparation:
    """Members ``theta_v = (2 delta / pi_v) v``, which separate under L1 and sign decoding.

    With ``pi`` constant this is the hypercube used for logistic regression.
    """
    vertices = hypercube_vertices(d)
    if prior_values is None:
        prior_values = np.full(len(vertices), 0.5)
    prior_values = np.broadcast_to(np.asarray(prior_values, dtype=float), (len(vertices),))
    members = (2.0 * delta / prior_values)[:, None] * vertices
    return HammingSeparation(vertices, members, delta, prior_values)


@dataclass(frozen=True)
class HammingCheck:
    valid: bool
    vertex: Optional[int] = None
    theta: Optional[np.ndarray] = None
    shortfall: float = 0.0

    def __bool__(self):
        return self.valid


def verify_hamming_separation(candidate: HammingSeparation, grid_points) -> HammingCheck:
    """Exhaustive check of ``||theta_v - theta||_1 >= (2 delta / pi_v) * Hamming(sign(theta), v)``."""
    pts = np.asarray(grid_points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != candidate.dim:
        raise ValueError("grid dimension does not match the hypercube")
    decoded = sign_decoder(pts)  # (G, d)
    for k, (v, member, pk) in enumerate(zip(candidate.vertices, candidate.members,
                                            candidate.prior_values)):
        dist = L1(member, pts)
        hamming = (decoded != v).sum(axis=1)
        need = 2.0 * candidate.delta / pk * hamming
        bad = np.flatnonzero(dist < need * (1 - _REL_TOL))
        if bad.size:
            g = bad[0]
            return HammingCheck(False, k, pts[g], float(need[g] - dist[g]))
    return HammingCheck(True)


def max_separation_delta(vertices, members, prior_values, grid_points) -> float:
    """Largest delta for which the given members form a ``(2 delta, pi)``-Hamming separation.

    The condition is checked against every point in ``grid_points`` (the
    possible estimates), so the result is ``min pi_v ||theta_v - theta||_1 / (2 H)``
    over pairs with Hamming distance ``H > 0``.
    """
    vertices = np.atleast_2d(np.asarray(vertices, dtype=int).reshape(len(vertices), -1))
    members = np.asarray(members, dtype=float).reshape(vertices.shape)
    pts = np.asarray(grid_points, dtype=float).reshape(-1, vertices.shape[1])
    decoded = sign_decoder(pts)
    best = np.inf
    for v, member, pk in zip(vertices, members, np.asarray(prior_values, dtype=float)):
        hamming = (decoded != v).sum(axis=1)
        far = hamming > 0
        if np.any(far):
            dist = L1(member, pts[far])
            best = min(best, float(np.min(pk * dist / (2.0 * hamming[far]))))
    return best
