"""Dense complex matrices with the normalized trace of M_p(C).

All numerics are double-precision complex. Random generators take an
explicit seed (an int or a ``numpy.random.Generator``); there is no
module-level random state.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidArgument, InvalidPVM, NotHermitian

VALIDATION_TOL = 1e-8
IDENTITY_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a square complex128 array, checking shape and finiteness."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument("matrix has non-finite entries")
    return arr


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise InvalidArgument("an explicit seed is required")
    return np.random.default_rng(seed)


def normalized_trace(a) -> complex:
    a = np.asarray(a)
    return complex(np.trace(a) / a.shape[0])


def two_norm(a) -> float:
    """Trace 2-norm ``sqrt(tau(a* a))`` (Frobenius norm over sqrt(p))."""
    a = np.asarray(a)
    return float(np.sqrt(np.vdot(a, a).real / a.shape[0]))


def operator_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a), 2))


def adjoint(a) -> np.ndarray:
    return np.asarray(a).conj().T


def project_to_contraction(a) -> np.ndarray:
    """Clip singular values at 1.

    This is the nearest contraction in operator norm and also the Frobenius
    projection onto the (convex) operator-norm unit ball. Contractions are
    returned unchanged.
    """
    a = as_matrix(a)
    u, s, vh = np.linalg.svd(a)
    if s[0] <= 1.0:
        return a.copy()
    return (u * np.minimum(s, 1.0)) @ vh


def hermitian_eig(a, tol: float = VALIDATION_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, V)`` with eigenvalues descending and each column
    of ``V`` scaled so its first non-negligible component is real positive.
    """
    a = as_matrix(a)
    if two_norm(a - a.conj().T) > tol:
        raise NotHermitian(f"matrix is not Hermitian (2-norm residual > {tol})")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            z = col[idx[0]]
            v[:, k] = col * (abs(z) / z)
    return w, v


def random_unitary(p: int, seed) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Gaussian, phase corrected."""
    rng = _rng(seed)
    z = (rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_contraction(p: int, seed) -> np.ndarray:
    """Random matrix with singular values uniform in [0, 1]."""
    rng = _rng(seed)
    u = random_unitary(p, rng)
    v = random_unitary(p, rng)
    s = rng.uniform(0.0, 1.0, size=p)
    return (u * s) @ v


def random_hermitian(p: int, seed, scale: float = 1.0) -> np.ndarray:
    rng = _rng(seed)
    z = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    h = (z + z.conj().T) / 2
    return scale * h / two_norm(h)


def compositions(p: int, m: int) -> list[tuple[int, ...]]:
    """All compositions of ``p`` into ``m`` non-negative parts, lexicographic."""
    out = []
    for bars in itertools.combinations(range(p + m - 1), m - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(p + m - 1 - prev - 1)
        out.append(tuple(parts))
    return sorted(out, reverse=True)


def composition_count(p: int, m: int) -> int:
    return math.comb(p + m - 1, m - 1)


def random_composition(p: int, m: int, seed) -> tuple[int, ...]:
    """Uniform composition of ``p`` into ``m`` non-negative parts (stars and bars)."""
    rng = _rng(seed)
    bars = sorted(rng.choice(p + m - 1, size=m - 1, replace=False).tolist())
    parts, prev = [], -1
    for b in bars:
        parts.append(b - prev - 1)
        prev = b
    parts.append(p + m - 2 - prev)
    return tuple(parts)


def pvm_from_unitary(u: np.ndarray, ranks: Sequence[int]) -> list[np.ndarray]:
    """Projections onto consecutive column blocks of ``u``."""
    out, start = [], 0
    for r in ranks:
        cols = u[:, start:start + r]
        out.append(cols @ cols.conj().T)
        start += r
    return out


def random_pvm(p: int, m: int, ranks: Sequence[int] | None = None, seed=0) -> list[np.ndarray]:
    """``m`` orthogonal projections of dimension ``p`` summing to the identity."""
    if p < 1 or m < 1:
        raise InvalidArgument(f"need p >= 1 and m >= 1, got p={p}, m={m}")
    rng = _rng(seed)
    if ranks is None:
        ranks = random_composition(p, m, rng)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != m or any(r < 0 for r in ranks) or sum(ranks) != p:
        raise InvalidArgument(f"ranks {ranks} are not {m} non-negative parts summing to {p}")
    return pvm_from_unitary(random_unitary(p, rng), ranks)


def pvm_residuals(group: Sequence[np.ndarray]) -> tuple[float, float, float]:
    """Largest 2-norm residuals of ``x^2 - x``, ``x* - x`` and ``sum - 1``."""
    p = group[0].shape[0]
    sq = max(two_norm(x @ x - x) for x in group)
    herm = max(two_norm(x.conj().T - x) for x in group)
    total = two_norm(sum(group) - np.eye(p))
    return sq, herm, total


def is_pvm(group: Sequence[np.ndarray], tol: float = VALIDATION_TOL) -> bool:
    return max(pvm_residuals(group)) <= tol


def validate_pvm_tuple(groups, tol: float = VALIDATION_TOL) -> None:
    dims = {x.shape for g in groups for x in g}
    if len(dims) != 1:
        raise DimensionMismatch(f"PVM tuple mixes shapes {sorted(dims)}")
    for v, g in enumerate(groups):
        res = max(pvm_residuals(g))
        if res > tol:
            raise InvalidPVM(f"group {v} is not a PVM (residual {res:.3g} > {tol})")


def block_embed(a, q: int) -> np.ndarray:
    """Trace-preserving unital embedding ``a -> a (x) 1_q`` of M_p into M_pq."""
    return np.kron(np.asarray(a), np.eye(q))


# --------------------------------------------------------------------------
# JSON


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {"p": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise InvalidArgument(f"malformed matrix JSON: {exc}") from None
    a = as_matrix(re + 1j * im)
    if "p" in obj and int(obj["p"]) != a.shape[0]:
        raise DimensionMismatch(f"declared p={obj['p']} but matrix is {a.shape[0]}x{a.shape[0]}")
    return a
