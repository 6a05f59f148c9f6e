"""Nonlocal games, their PVM and value formulas, and synchronous-value
lower bounds from finite-dimensional projection-valued measures."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import formula as F
from .errors import BudgetExceeded, ConfigInvalid, InvalidArgument, TooFar
from .evaluator import (
    LOWER_BOUND_OF_SUP, EvalResult, OptimizerConfig, eval_qf, maximize_over_contractions,
)
from .matrices import (
    VALIDATION_TOL, block_embed, composition_count, compositions, hermitian_eig,
    matrix_from_json, matrix_to_json, pvm_from_unitary, pvm_residuals, random_composition,
    random_unitary, two_norm, validate_pvm_tuple,
)
from .terms import Adjoint, CRational, One, Prod, Scale, Sum, Var, sum_terms

CLASSICAL_BUDGET = 1_000_000
PATTERN_LIMIT = 512
ROUNDING_COEFFS_OFFSET = Fraction(1, 7)


# --------------------------------------------------------------------------
# games


@dataclass(eq=False)
class NonlocalGame:
    """``n`` questions, ``m`` answers, rational question distribution ``mu``
    (n x n) and boolean decision table ``D[v, w, i, j]``."""

    n: int
    m: int
    mu: tuple
    D: np.ndarray
    name: str = "game"

    def __post_init__(self):
        n, m = self.n, self.m
        if n < 1 or m < 1:
            raise InvalidArgument(f"need n, m >= 1, got n={n}, m={m}")
        mu = tuple(tuple(Fraction(x) for x in row) for row in self.mu)
        if len(mu) != n or any(len(row) != n for row in mu):
            raise InvalidArgument(f"mu must be {n}x{n}")
        if any(x < 0 for row in mu for x in row):
            raise InvalidArgument("mu has negative entries")
        if sum(x for row in mu for x in row) != 1:
            raise InvalidArgument("mu does not sum to 1")
        self.mu = mu
        D = np.asarray(self.D, dtype=bool)
        if D.shape != (n, n, m, m):
            raise InvalidArgument(f"D must have shape {(n, n, m, m)}, got {D.shape}")
        self.D = D
        self.D.setflags(write=False)

    @property
    def proper(self) -> bool:
        return all(x > 0 for row in self.mu for x in row)

    @property
    def synchronous(self) -> bool:
        off = ~np.eye(self.m, dtype=bool)
        return not any(self.D[v, v][off].any() for v in range(self.n))

    @cached_property
    def weights(self) -> np.ndarray:
        """``W[(v,i), (w,j)] = mu(v,w) D(v,w,i,j)`` as floats, shape (nm, nm)."""
        mu = np.array([[float(x) for x in row] for row in self.mu])
        w = mu[:, :, None, None] * self.D
        return w.transpose(0, 2, 1, 3).reshape(self.n * self.m, self.n * self.m)

    def var(self, v: int, i: int) -> int:
        """Variable index of ``x_{v,i}`` (0-based question and answer)."""
        return v * self.m + i + 1

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "name": self.name,
                "mu": [[str(x) for x in row] for row in self.mu],
                "D": self.D.astype(int).tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "NonlocalGame":
        try:
            return cls(int(obj["n"]), int(obj["m"]),
                       [[Fraction(x) for x in row] for row in obj["mu"]],
                       np.asarray(obj["D"], dtype=int).astype(bool), obj.get("name", "game"))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"malformed game JSON: {exc}") from None


def coloring_game(adjacency, m: int, weights=None, name: str = "coloring") -> NonlocalGame:
    """Synchronous graph-coloring game.

    Questions are vertices; ``mu`` is uniform over ordered pairs unless
    ``weights`` is given. Equal questions require equal answers, adjacent
    vertices require different answers, other pairs always win.
    """
    adjacency = [sorted(set(int(u) for u in nbrs)) for nbrs in adjacency]
    k = len(adjacency)
    if k == 0:
        raise InvalidArgument("graph must have at least one vertex")
    if m < 1:
        raise InvalidArgument("need at least one color")
    adj = np.zeros((k, k), dtype=bool)
    for v, nbrs in enumerate(adjacency):
        for u in nbrs:
            if not 0 <= u < k or u == v:
                raise InvalidArgument(f"bad neighbor {u} of vertex {v}")
            adj[v, u] = adj[u, v] = True
    eq = np.eye(m, dtype=bool)
    D = np.ones((k, k, m, m), dtype=bool)
    for v in range(k):
        for w in range(k):
            if v == w:
                D[v, w] = eq
            elif adj[v, w]:
                D[v, w] = ~eq
    if weights is None:
        mu = [[Fraction(1, k * k)] * k for _ in range(k)]
    else:
        w = [[Fraction(x) for x in row] for row in weights]
        total = sum(sum(row) for row in w)
        mu = [[x / total for x in row] for row in w]
    return NonlocalGame(k, m, mu, D, name)


def complete_graph(k: int) -> list[list[int]]:
    return [[u for u in range(k) if u != v] for v in range(k)]


def random_synchronous_game(n: int, m: int, seed, name: str | None = None) -> NonlocalGame:
    """Proper synchronous game with integer-weighted ``mu`` and random ``D``."""
    rng = np.random.default_rng(seed)
    w = rng.integers(1, 10, size=(n, n))
    total = int(w.sum())
    mu = [[Fraction(int(x), total) for x in row] for row in w]
    D = rng.random((n, n, m, m)) < 0.5
    for v in range(n):
        D[v, v] = np.eye(m, dtype=bool) & (rng.random((m, m)) < 0.8)
    return NonlocalGame(n, m, mu, D, name or f"random-{n}-{m}-{seed}")


# --------------------------------------------------------------------------
# formulas


def build_pvm_formula(n: int, m: int) -> F.Formula:
    """max of the idempotence, self-adjointness and completeness residuals."""
    if n < 1 or m < 1:
        raise InvalidArgument(f"need n, m >= 1, got n={n}, m={m}")
    xs = [[Var(v * m + i + 1) for i in range(m)] for v in range(n)]
    minus_one = CRational(-1)
    idem = [F.Norm2(Sum(Prod(x, x), Scale(minus_one, x))) for row in xs for x in row]
    herm = [F.Norm2(Sum(Adjoint(x), Scale(minus_one, x))) for row in xs for x in row]
    total = [F.Norm2(Sum(sum_terms(row), Scale(minus_one, One()))) for row in xs]
    return F.Max(F.Max(F.max_of(idem), F.max_of(herm)), F.max_of(total))


def build_game_formula(g: NonlocalGame) -> F.Formula:
    """Sum of ``mu(v,w) trRe(x_{v,i} x_{w,j})`` over winning ``(v,w,i,j)``."""
    atoms = []
    for v, w in itertools.product(range(g.n), repeat=2):
        if g.mu[v][w] == 0:
            continue
        for i, j in itertools.product(range(g.m), repeat=2):
            if g.D[v, w, i, j]:
                atom = F.TraceRe(Prod(Var(g.var(v, i)), Var(g.var(w, j))))
                atoms.append(F.Scaled(g.mu[v][w], atom))
    return F.sum_of(atoms)


def groups_to_assignment(groups) -> dict[int, np.ndarray]:
    m = len(groups[0])
    return {v * m + i + 1: np.asarray(x) for v, g in enumerate(groups) for i, x in enumerate(g)}


def assignment_to_groups(a, n: int, m: int) -> list[list[np.ndarray]]:
    if not isinstance(a, dict):
        a = {k + 1: x for k, x in enumerate(a)}
    return [[np.asarray(a[v * m + i + 1]) for i in range(m)] for v in range(n)]


def _stack(groups) -> np.ndarray:
    return np.stack([x for g in groups for x in g])


def fast_game_value(weights: np.ndarray, stacked: np.ndarray) -> float:
    """``sum W[a,b] Re tau(X_a X_b)`` for a stack of matrices (nm, p, p)."""
    p = stacked.shape[-1]
    flat = stacked.reshape(len(stacked), -1)
    flat_t = stacked.transpose(0, 2, 1).reshape(len(stacked), -1)
    gram = (flat @ flat_t.T).real / p
    return float(np.sum(weights * gram))


# --------------------------------------------------------------------------
# correlations


@dataclass
class SynchronousCorrelation:
    """``values[v, w, i, j] = tau(x_{v,i} x_{w,j})``."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[2]

    def row_sums(self) -> np.ndarray:
        return self.values.sum(axis=(2, 3))

    def synchronicity_residual(self) -> float:
        off = ~np.eye(self.m, dtype=bool)
        return float(max(self.values[v, v][off].max(initial=0.0) for v in range(self.n)))

    def game_value(self, g: NonlocalGame) -> float:
        mu = np.array([[float(x) for x in row] for row in g.mu])
        return float(np.sum(mu[:, :, None, None] * g.D * self.values))

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "p": self.values.tolist(),
                "synchronicity_residual": self.synchronicity_residual()}


def correlation_from_pvms(groups, tol: float = VALIDATION_TOL) -> SynchronousCorrelation:
    groups = [[np.asarray(x, dtype=np.complex128) for x in g] for g in groups]
    validate_pvm_tuple(groups, tol)
    n, m = len(groups), len(groups[0])
    stacked = _stack(groups)
    p = stacked.shape[-1]
    flat = stacked.reshape(n * m, -1)
    flat_t = stacked.transpose(0, 2, 1).reshape(n * m, -1)
    gram = (flat @ flat_t.T).real / p
    values = gram.reshape(n, m, n, m).transpose(0, 2, 1, 3)
    return SynchronousCorrelation(np.clip(values, 0.0, None))


# --------------------------------------------------------------------------
# classical value


def deterministic_value(g: NonlocalGame, budget: int = CLASSICAL_BUDGET, return_assignment: bool = False):
    """Exact best winning probability over deterministic answer functions."""
    total = g.m ** g.n
    if total > budget:
        raise BudgetExceeded(total, budget)
    den = math.lcm(*(x.denominator for row in g.mu for x in row))
    num = np.array([[int(x * den) for x in row] for row in g.mu], dtype=np.int64)
    best, best_c = -1, None
    for chunk in _assignment_chunks(g.n, g.m):
        score = np.zeros(len(chunk), dtype=np.int64)
        for v in range(g.n):
            for w in range(g.n):
                if num[v, w]:
                    score += num[v, w] * g.D[v, w][chunk[:, v], chunk[:, w]]
        k = int(np.argmax(score))
        if score[k] > best:
            best, best_c = int(score[k]), tuple(int(c) for c in chunk[k])
    value = Fraction(best, den)
    return (value, best_c) if return_assignment else value


def _assignment_chunks(n: int, m: int, size: int = 65536):
    it = itertools.product(range(m), repeat=n)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield np.asarray(chunk, dtype=np.int64).reshape(len(chunk), n)


def deterministic_pvm(assignment: Sequence[int], m: int, p: int = 1) -> list[list[np.ndarray]]:
    """The PVM tuple of an answer function, lifted to dimension ``p``."""
    eye, zero = np.eye(p, dtype=np.complex128), np.zeros((p, p), dtype=np.complex128)
    return [[eye.copy() if i == c else zero.copy() for i in range(m)] for c in assignment]


# --------------------------------------------------------------------------
# rounding


@dataclass
class RoundingResult:
    groups: list
    distance: float          # l1-of-2-norm distance from the input
    residual: float          # pvm formula value at the input
    warnings: list = field(default_factory=list)

    @property
    def constant(self) -> float | None:
        """Empirical ratio ``distance / residual`` (None at exact input)."""
        return self.distance / self.residual if self.residual > 0 else None

    def to_json(self) -> dict:
        return {"groups": [[matrix_to_json(x) for x in g] for g in self.groups],
                "distance": self.distance, "residual": self.residual,
                "constant": self.constant, "warnings": self.warnings}


def pvm_formula_value(groups) -> float:
    """``phi_{n,m}`` evaluated directly."""
    return max(max(pvm_residuals(g)) for g in groups)


def _round_group(group, coeffs, warnings, v):
    p = group[0].shape[0]
    ys = [(x + x.conj().T) / 2 for x in group]
    s = sum(c * y for c, y in zip(coeffs, ys))
    w, vecs = hermitian_eig(s)
    # <y_i u, u> for every (i, eigenvector u)
    scores = np.stack([np.einsum("ki,kl,li->i", vecs.conj(), y, vecs).real for y in ys])
    owner = np.argmax(scores, axis=0)   # lowest index wins ties
    for k in range(p - 1):
        if abs(w[k] - w[k + 1]) < 1e-8 and owner[k] != owner[k + 1]:
            warnings.append(f"group {v}: degenerate eigenvalue {w[k]:.3g} split between "
                            f"indices {owner[k]} and {owner[k + 1]}")
    out = []
    for i in range(len(group)):
        cols = vecs[:, owner == i]
        out.append(cols @ cols.conj().T)
    return out


def round_to_pvm(groups, tol: float = 0.25) -> RoundingResult:
    """Round a near-PVM tuple (n groups of m matrices) to an exact PVM tuple.

    Per group: symmetrize, diagonalize ``sum_i (i + 1/7) y_i``, and give each
    eigenvector to the index maximizing ``<y_i u, u>``. Exact PVMs are fixed.
    """
    groups = [[np.asarray(x, dtype=np.complex128) for x in g] for g in groups]
    if not groups or not groups[0]:
        raise InvalidArgument("empty PVM tuple")
    residual = pvm_formula_value(groups)
    if residual > tol:
        raise TooFar(f"pvm residual {residual:.3g} exceeds tolerance {tol}")
    m = len(groups[0])
    coeffs = [float(i + 1 + ROUNDING_COEFFS_OFFSET) for i in range(m)]
    warnings: list = []
    out = [_round_group(g, coeffs, warnings, v) for v, g in enumerate(groups)]
    distance = sum(two_norm(a - b) for g, r in zip(groups, out) for a, b in zip(g, r))
    return RoundingResult(out, distance, residual, warnings)


# --------------------------------------------------------------------------
# synchronous value lower bound


@dataclass
class GameValueReport:
    game_id: str
    p: int
    lower_bound: float
    certificate: list
    classical_value: Fraction | None
    synchronicity_residual: float
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "game_id": self.game_id, "p": self.p, "lower_bound": self.lower_bound,
            "classical_value": None if self.classical_value is None else str(self.classical_value),
            "synchronicity_residual": self.synchronicity_residual,
            "certificate": [[matrix_to_json(x) for x in g] for g in self.certificate],
            "diagnostics": self.diagnostics,
        }


def rank_patterns(p: int, m: int, n: int, seed, limit: int = PATTERN_LIMIT):
    """Per-group rank compositions: all of them when there are at most
    ``limit``, otherwise ``limit`` distinct seeded samples. Returns
    ``(patterns, exhaustive)``."""
    per_group = composition_count(p, m)
    if per_group ** n <= limit:
        return list(itertools.product(compositions(p, m), repeat=n)), True
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    seen, out = set(), []
    for _ in range(50 * limit):
        pat = tuple(random_composition(p, m, rng) for _ in range(n))
        if pat not in seen:
            seen.add(pat)
            out.append(pat)
            if len(out) == limit:
                break
    return out, False


def _small_unitary(p: int, step: float, rng) -> np.ndarray:
    z = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    h = (z + z.conj().T) / 2
    h *= step / max(two_norm(h), 1e-300)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def _reorthonormalize(u: np.ndarray) -> np.ndarray:
    a, _, bh = np.linalg.svd(u)
    return a @ bh


class _PatternClimber:
    """Hill climbing over ``U_v`` for a fixed rank pattern, where group ``v``
    is ``U_v diag(blocks) U_v*``."""

    revalidate_every = 50

    def __init__(self, weights, pattern, p, rng, step0, decay, unitaries=None):
        self.weights, self.pattern, self.p = weights, pattern, p
        self.rng, self.step0 = rng, step0
        self.shrink = decay ** 0.25
        self.grow = 1 / decay
        self.free = [v for v, ranks in enumerate(pattern) if sum(1 for r in ranks if r) > 1]
        if unitaries is None:
            unitaries = [random_unitary(p, rng) if v in self.free else np.eye(p, dtype=np.complex128)
                         for v in range(len(pattern))]
        self.us = list(unitaries)
        self.groups = [pvm_from_unitary(u, r) for u, r in zip(self.us, pattern)]
        self.value = fast_game_value(weights, _stack(self.groups))
        self.step = step0
        self.accepted = 0

    def run(self, n_iter: int):
        if not self.free:
            return
        for _ in range(n_iter):
            if len(self.free) > 1 and self.rng.random() < 0.5:
                targets = list(self.free)
            else:
                targets = [self.free[int(self.rng.integers(len(self.free)))]]
            us, groups = list(self.us), list(self.groups)
            for v in targets:
                us[v] = _small_unitary(self.p, self.step, self.rng) @ us[v]
                groups[v] = pvm_from_unitary(us[v], self.pattern[v])
            val = fast_game_value(self.weights, _stack(groups))
            if val > self.value:
                self.us, self.groups, self.value = us, groups, val
                self.accepted += 1
                self.step = min(self.step0, self.step * self.grow)
                if self.accepted % self.revalidate_every == 0:
                    self._revalidate()
            else:
                self.step *= self.shrink
                if self.step < self.step0 * 1e-9:
                    self.step = self.step0

    def _revalidate(self):
        self.us = [_reorthonormalize(u) for u in self.us]
        self.groups = [pvm_from_unitary(u, r) for u, r in zip(self.us, self.pattern)]
        self.value = fast_game_value(self.weights, _stack(self.groups))


def synchronous_value_lower_bound(g: NonlocalGame, p: int, cfg: OptimizerConfig | None = None,
                                  warm_start=None, pattern_limit: int = PATTERN_LIMIT,
                                  screen_iterations: int = 60,
                                  classical_budget: int = 4096) -> GameValueReport:
    """Best value of the game formula found over PVM tuples of dimension ``p``.

    Every rank pattern is first climbed for ``screen_iterations`` steps; the
    ``cfg.restarts`` best are then climbed for ``cfg.max_iterations`` more.
    The optimal deterministic strategy lifted to dimension ``p`` (when
    ``m**n <= classical_budget``) and an optional ``warm_start`` PVM tuple
    of dimension ``p`` are scored as extra candidates. Every candidate is
    an honest PVM tuple, so the result is a lower bound on the synchronous
    value.
    """
    cfg = (cfg or OptimizerConfig(p=p)).validate()
    if p < 1:
        raise ConfigInvalid("p must be >= 1")
    weights = g.weights
    patterns, exhaustive = rank_patterns(p, g.m, g.n, cfg.seed, pattern_limit)
    children = np.random.SeedSequence(cfg.seed).spawn(len(patterns))
    climbers = []
    for k, pat in enumerate(patterns):
        c = _PatternClimber(weights, pat, p, np.random.default_rng(children[k]), cfg.step, cfg.decay)
        c.run(screen_iterations)
        climbers.append(c)
    order = sorted(range(len(climbers)), key=lambda k: (-climbers[k].value, k))
    for k in order[:cfg.restarts]:
        climbers[k].run(cfg.max_iterations)

    candidates = [(c.value, k, c.groups) for k, c in enumerate(climbers)]
    classical, lifted = None, None
    if g.m ** g.n <= classical_budget:
        classical, assignment = deterministic_value(g, return_assignment=True)
        lifted = deterministic_pvm(assignment, g.m, p)
        candidates.append((fast_game_value(weights, _stack(lifted)), len(climbers), lifted))
    if warm_start is not None:
        warm = [[np.asarray(x, dtype=np.complex128) for x in grp] for grp in warm_start]
        validate_pvm_tuple(warm)
        if warm[0][0].shape[0] != p:
            raise InvalidArgument(f"warm start has dimension {warm[0][0].shape[0]}, expected {p}")
        candidates.append((fast_game_value(weights, _stack(warm)), len(climbers) + 1, warm))
    best_val, best_idx, best_groups = max(candidates, key=lambda c: (c[0], -c[1]))

    validate_pvm_tuple(best_groups, VALIDATION_TOL)
    psi = build_game_formula(g)
    value = eval_qf(psi, groups_to_assignment(best_groups))
    corr = correlation_from_pvms(best_groups)
    diagnostics = {
        "seed": cfg.seed, "patterns": len(patterns), "exhaustive_patterns": exhaustive,
        "refined": min(cfg.restarts, len(patterns)), "screen_iterations": screen_iterations,
        "max_iterations": cfg.max_iterations, "best_candidate": best_idx,
        "best_pattern": [list(r) for r in patterns[best_idx]] if best_idx < len(patterns) else None,
        "accepted": sum(c.accepted for c in climbers),
        "pvm_residual": pvm_formula_value(best_groups),
    }
    return GameValueReport(g.name, p, value, best_groups, classical,
                           corr.synchronicity_residual(), diagnostics)


def embed_pvm_tuple(groups, q: int) -> list[list[np.ndarray]]:
    return [[block_embed(x, q) for x in grp] for grp in groups]


# --------------------------------------------------------------------------
# penalized relaxation


def relaxed_game_value(g: NonlocalGame, p: int, beta, cfg: OptimizerConfig | None = None) -> EvalResult:
    """Maximize ``psi ∸ beta * phi`` over unconstrained contraction tuples,
    then round the maximizer to a PVM tuple and re-score it.

    The climb runs on the untruncated ``psi - beta * phi``: its sup is the
    same once positive, and unlike the truncated body it is not flat (zero)
    on the large region where the penalty dominates. Half of the proposals
    are rounded to the nearest PVM tuple before scoring; the search domain is
    still all contraction tuples.
    """
    beta = Fraction(beta)
    if beta <= 0:
        raise ConfigInvalid("beta must be positive")
    cfg = (cfg or OptimizerConfig(p=p)).with_(p=p).validate()
    n, m = g.n, g.m
    weights = g.weights
    beta_f = float(beta)
    eye = np.eye(p)

    def objective(xs):
        x = np.stack(xs)
        psi = fast_game_value(weights, x)
        idem = np.sqrt(np.sum(np.abs(x @ x - x) ** 2, axis=(1, 2)) / p).max()
        herm = np.sqrt(np.sum(np.abs(x.conj().transpose(0, 2, 1) - x) ** 2, axis=(1, 2)) / p).max()
        tot = x.reshape(n, m, p, p).sum(axis=1) - eye
        total = np.sqrt(np.sum(np.abs(tot) ** 2, axis=(1, 2)) / p).max()
        return psi - beta_f * max(idem, herm, total)

    def repair(xs):
        rounded = round_to_pvm([xs[v * m:(v + 1) * m] for v in range(n)], tol=math.inf)
        return [x for grp in rounded.groups for x in grp]

    xs, _, diag = maximize_over_contractions(objective, n * m, cfg, repair=repair)
    body = F.DotMinus(build_game_formula(g), F.Scaled(beta, build_pvm_formula(n, m)))
    cert = {k + 1: x for k, x in enumerate(xs)}
    value = eval_qf(body, cert)
    groups = assignment_to_groups(cert, n, m)
    rounded = round_to_pvm(groups, tol=math.inf)
    rounded_value = eval_qf(build_game_formula(g), groups_to_assignment(rounded.groups))
    diag = dict(diag, beta=str(beta), penalty=pvm_formula_value(groups),
                rounding_distance=rounded.distance)
    extra = {"rounded_value": rounded_value,
             "rounded_certificate": [[matrix_to_json(x) for x in grp] for grp in rounded.groups]}
    result = EvalResult(value, LOWER_BOUND_OF_SUP, cert, diag, extra=extra)
    result.rounded = rounded
    return result


# --------------------------------------------------------------------------
# JSON helpers


def groups_from_json(obj) -> list[list[np.ndarray]]:
    if isinstance(obj, dict):
        obj = obj.get("groups", obj.get("certificate"))
    try:
        groups = [[matrix_from_json(x) for x in grp] for grp in obj]
    except TypeError:
        raise InvalidArgument("PVM tuple JSON must be a list of groups of matrices") from None
    if not groups or len({len(g) for g in groups}) != 1:
        raise InvalidArgument("every group must contain the same number of matrices")
    return groups
