"""Deterministic grid nets of the unit disk power D^L and of contraction balls."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, InvalidArgument
from .matrices import project_to_contraction

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class NetSpec:
    space: str                 # "disk-power" or "matrix-ball"
    mesh: float
    covering_radius: float
    cardinality: int
    metric: str
    shape: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"space": self.space, "mesh": self.mesh, "covering_radius": self.covering_radius,
                "cardinality": self.cardinality, "metric": self.metric, **self.shape}


def grid_values(mesh) -> list[float]:
    """Nested 1-d grid ``{j * mesh} ∩ [-1, 1]`` with the endpoints added.

    Halving the mesh yields a superset, so refined nets contain coarse ones.
    """
    mesh = Fraction(mesh)
    if mesh <= 0:
        raise InvalidArgument(f"mesh must be positive, got {mesh}")
    k = math.floor(1 / mesh)
    vals = {j * mesh for j in range(-k, k + 1)} | {Fraction(-1), Fraction(1)}
    return [float(v) for v in sorted(vals)]


def _half_gap(vals) -> float:
    return max(b - a for a, b in zip(vals, vals[1:])) / 2 if len(vals) > 1 else 1.0


def _check_budget(cardinality: int, budget: int) -> None:
    if cardinality > budget:
        raise BudgetExceeded(cardinality, budget)


class MatrixBallNet:
    """Grid over the real and imaginary parts of every entry, projected to
    contractions. Iterating yields lists of ``n`` matrices of size ``p``.

    Covering radius (l1 over variables of the trace 2-norm): each coordinate
    is within ``h`` (half the largest grid gap) of a grid value, so the
    Frobenius error is at most ``h * sqrt(2 p^2)``; clipping singular values
    is the Frobenius projection onto the convex contraction ball and cannot
    increase it. Dividing by ``sqrt(p)`` and summing over ``n`` variables
    gives ``n * h * sqrt(2 p)``.
    """

    def __init__(self, p: int, n: int, mesh, budget: int = DEFAULT_BUDGET):
        if p < 1 or n < 1:
            raise InvalidArgument(f"need p >= 1 and n >= 1, got p={p}, n={n}")
        self.p, self.n = p, n
        self.values = grid_values(mesh)
        self.n_params = 2 * p * p * n
        cardinality = len(self.values) ** self.n_params
        _check_budget(cardinality, budget)
        radius = n * _half_gap(self.values) * math.sqrt(2 * p)
        self.spec = NetSpec("matrix-ball", float(Fraction(mesh)), radius, cardinality,
                            "l1-of-2-norm", {"p": p, "n": n})

    def __len__(self):
        return self.spec.cardinality

    def __iter__(self):
        p, n = self.p, self.n
        vals = np.asarray(self.values)
        for idx in itertools.product(range(len(vals)), repeat=self.n_params):
            flat = vals[list(idx)].reshape(n, 2, p, p)
            yield [project_to_contraction(flat[k, 0] + 1j * flat[k, 1]) for k in range(n)]


def matrix_ball_net(p: int, n: int, mesh, budget: int = DEFAULT_BUDGET):
    net = MatrixBallNet(p, n, mesh, budget)
    return net, net.spec


def disk_points(eps) -> np.ndarray:
    """Square grid of spacing ``eps * sqrt(2)`` projected radially into the disk."""
    eps = float(Fraction(eps))
    if eps <= 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    s = eps * math.sqrt(2)
    k = math.floor(1 / s)
    vals = sorted({j * s for j in range(-k, k + 1)} | {-1.0, 1.0})
    pts = []
    seen = set()
    for a in vals:
        for b in vals:
            z = complex(a, b)
            if abs(z) > 1:
                z /= abs(z)
            key = (round(z.real, 12), round(z.imag, 12))
            if key not in seen:
                seen.add(key)
                pts.append(z)
    return np.asarray(pts), _half_gap(vals) * math.sqrt(2)


def disk_net(L: int, eps, budget: int = DEFAULT_BUDGET):
    """Product net of ``D^L`` with covering radius ``<= eps`` in the l-infinity
    (max over coordinates of the complex modulus) metric.

    Returns ``(points, spec)``; ``points`` has shape ``(cardinality, L)``.
    """
    if L < 1:
        raise InvalidArgument(f"L must be >= 1, got {L}")
    pts, radius = disk_points(eps)
    cardinality = len(pts) ** L
    _check_budget(cardinality, budget)
    grid = np.array(list(itertools.product(pts, repeat=L)), dtype=np.complex128).reshape(-1, L)
    spec = NetSpec("disk-power", float(Fraction(eps)), radius, cardinality, "l-infinity",
                   {"L": L, "points_per_disk": len(pts)})
    return grid, spec
