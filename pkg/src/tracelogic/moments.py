"""Trace moments of matrix tuples, grid nets, and the net lower bound for
universal sentences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import formula as F
from .errors import DimensionMismatch, InvalidArgument, UnsupportedError, ConfigInvalid
from .evaluator import OptimizerConfig, as_assignment, maximize_over_contractions, net_eval
from .matrices import block_embed, random_contraction
from .nets import DEFAULT_BUDGET, NetSpec, disk_net, matrix_ball_net  # noqa: F401
from .terms import CRational, One, Scale, StarMonomial, Sum, enumerate_monomials, monomial_adjoint, \
    monomial_count, term_from_monomial

DEFAULT_DEGREE = 4


@lru_cache(maxsize=64)
def _monomials(n: int, d: int) -> tuple[StarMonomial, ...]:
    return tuple(enumerate_monomials(n, d))


@lru_cache(maxsize=64)
def adjoint_permutation(n: int, d: int) -> np.ndarray:
    """``perm[k]`` is the position of the adjoint of monomial ``k``."""
    mons = _monomials(n, d)
    index = {m: k for k, m in enumerate(mons)}
    return np.array([index[monomial_adjoint(m)] for m in mons])


@dataclass
class MomentVector:
    n: int
    d: int
    values: np.ndarray

    @property
    def monomials(self) -> tuple[StarMonomial, ...]:
        return _monomials(self.n, self.d)

    def __len__(self):
        return len(self.values)

    def distance(self, other) -> float:
        """l-infinity distance (max complex modulus over coordinates)."""
        o = other.values if isinstance(other, MomentVector) else np.asarray(other)
        return float(np.max(np.abs(self.values - o)))

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "L": len(self.values),
                "monomials": [str(m) for m in self.monomials],
                "values": [[float(z.real), float(z.imag)] for z in self.values]}


def _moment_values(xs: np.ndarray, d: int) -> np.ndarray:
    """Normalized traces of all words of degree 1..d in the letters
    ``x_1, x_1*, x_2, ...`` for a stack ``xs`` of shape (n, p, p)."""
    n, p, _ = xs.shape
    letters = np.empty((2 * n, p, p), dtype=np.complex128)
    letters[0::2] = xs
    letters[1::2] = xs.conj().transpose(0, 2, 1)
    out = []
    words = letters
    for degree in range(1, d + 1):
        if degree > 1:
            words = np.matmul(words[:, None], letters[None]).reshape(-1, p, p)
        out.append(np.trace(words, axis1=1, axis2=2) / p)
    return np.concatenate(out)


def moment_map(t, d: int) -> MomentVector:
    """Trace moments of every *-monomial of degree 1..d at the tuple ``t``,
    in canonical monomial order."""
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    assignment = as_assignment(t)
    n = len(assignment)
    if n == 0:
        raise InvalidArgument("empty matrix tuple")
    if sorted(assignment) != list(range(1, n + 1)):
        raise DimensionMismatch(f"tuple must assign x1..x{n}, got {sorted(assignment)}")
    xs = np.stack([assignment[k] for k in range(1, n + 1)])
    return MomentVector(n, d, _moment_values(xs, d))


def moment_distance_formula(n: int, d: int, target) -> F.Formula:
    """Quantifier-free formula for ``max_i max(|Re(mu_i - s_i)|, |Im(mu_i - s_i)|)``.

    Built from restricted atoms only: ``|Re tau(t)| = max(trRe(t), trRe(-t))``.
    It is within a factor ``sqrt(2)`` of the l-infinity complex distance.
    """
    target = np.asarray(target, dtype=np.complex128)
    mons = _monomials(n, d)
    if len(target) != len(mons):
        raise DimensionMismatch(f"target has length {len(target)}, expected {len(mons)}")
    parts = []
    for m, s in zip(mons, target):
        shift = CRational(-Fraction(float(s.real)), -Fraction(float(s.imag)))
        t = Sum(term_from_monomial(m), Scale(shift, One()))
        neg = Scale(CRational(-1), t)
        parts.append(F.Max(F.TraceRe(t), F.TraceRe(neg)))
        parts.append(F.Max(F.TraceIm(t), F.TraceIm(neg)))
    return F.max_of(parts)


# --------------------------------------------------------------------------
# net lower bound


@dataclass
class NetBound:
    r: float
    gap: float
    certificate: dict
    net: NetSpec
    lipschitz: Fraction

    def __iter__(self):
        yield self.r
        yield self.gap

    def to_json(self) -> dict:
        from .matrices import matrix_to_json
        return {"r": self.r, "gap": self.gap, "upper": self.r + self.gap,
                "lipschitz": str(self.lipschitz), "net": self.net.to_json(),
                "certificate": {f"x{k}": matrix_to_json(v) for k, v in sorted(self.certificate.items())}}


def mesh_for_gap(body, n_vars: int, p: int, eps) -> Fraction:
    """Coarsest dyadic mesh ``2^-k`` whose net gap is at most ``eps``."""
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidArgument("eps must be positive")
    lip = F.lipschitz_bound(body)
    mesh = Fraction(1)
    # radius = n * (mesh / 2) * sqrt(2p) for dyadic meshes
    while float(lip) * n_vars * float(mesh) / 2 * math.sqrt(2 * p) > eps:
        mesh /= 2
    return mesh


def net_lower_bound(sigma, p: int, mesh=None, eps=None, budget: int = DEFAULT_BUDGET,
                    record: list | None = None) -> NetBound:
    """``r`` and ``gap`` with ``r <= sigma^{M_p(C)} <= r + gap`` for a universal
    sentence, from the max of its body over a grid net of contraction tuples.

    ``r`` is also a lower bound at every dimension ``p q`` and in the
    hyperfinite II_1 factor, since block embedding preserves the trace.
    Give either ``mesh`` or a target ``eps`` for the gap. Per-point values
    are appended to ``record`` when given.
    """
    if not isinstance(sigma, F.Sentence):
        sigma = F.Sentence.from_formula(sigma)
    if sigma.classification not in (F.UNIVERSAL, F.QUANTIFIER_FREE):
        raise UnsupportedError(f"net lower bound needs a universal sentence, got {sigma.classification}")
    vars, body = sigma.split()
    if mesh is None:
        if eps is None:
            raise InvalidArgument("give mesh or eps")
        mesh = mesh_for_gap(body, max(len(vars), 1), p, eps)
    res = net_eval(body, vars, p, mesh, budget, record)
    js = dict(res.diagnostics["net"])
    core = {k: js.pop(k) for k in ("space", "mesh", "covering_radius", "cardinality", "metric")}
    return NetBound(res.value, res.gap, res.certificate, NetSpec(**core, shape=js), F.lipschitz_bound(body))


# --------------------------------------------------------------------------
# density gap


@dataclass
class DensityGap:
    gap: float
    per_sample: list
    witnesses: list = field(repr=False)
    p_small: int = 1
    p_large: int = 1

    def to_json(self) -> dict:
        return {"gap": self.gap, "per_sample": self.per_sample,
                "p_small": self.p_small, "p_large": self.p_large}


def density_gap(n: int, d: int, p_small: int, p_large: int, samples: int, seed: int,
                cfg: OptimizerConfig | None = None, warm_starts=None) -> DensityGap:
    """Empirical one-sided gap between moment sets at two dimensions.

    Draws ``samples`` random contraction tuples at ``p_large`` and, for each
    moment vector ``s``, minimizes ``max_i |mu(x)_i - s_i|`` over tuples at
    ``p_small``. Returns the largest minimum found. ``warm_starts[k]`` may
    hold a witness for sample ``k`` at any dimension dividing ``p_small``;
    it is block-embedded and climbed from.
    """
    if not 1 <= p_small <= p_large:
        raise ConfigInvalid(f"need 1 <= p_small <= p_large, got {p_small}, {p_large}")
    if samples < 1:
        raise ConfigInvalid("samples must be >= 1")
    cfg = (cfg or OptimizerConfig(restarts=4, max_iterations=300)).with_(p=p_small, seed=seed).validate()
    rng = np.random.default_rng(np.random.SeedSequence([seed, 3]))
    per_sample, witnesses = [], []
    for k in range(samples):
        sample = [random_contraction(p_large, rng) for _ in range(n)]
        target = _moment_values(np.stack(sample), d)

        def objective(xs, target=target):
            return -float(np.max(np.abs(_moment_values(np.stack(xs), d) - target)))

        warm = []
        if p_small == p_large:
            warm.append(sample)
        if warm_starts is not None and warm_starts[k] is not None:
            w = warm_starts[k]
            q, rem = divmod(p_small, w[0].shape[0])
            if rem:
                raise DimensionMismatch(f"warm start dimension {w[0].shape[0]} does not divide {p_small}")
            warm.append([block_embed(x, q) for x in w])
        sub = cfg.with_(seed=int(np.random.SeedSequence([seed, 4, k]).generate_state(1)[0]))
        xs, val, _ = maximize_over_contractions(objective, n, sub, warm)
        per_sample.append(-val)
        witnesses.append(xs)
    return DensityGap(max(per_sample), per_sample, witnesses, p_small, p_large)


def density_profile(n: int, d: int, p_smalls, p_large: int, samples: int, seed: int,
                    cfg: OptimizerConfig | None = None) -> list[DensityGap]:
    """Density gaps for increasing ``p_small``, each warm-started from the
    block embedding of the best earlier witness whose dimension divides it."""
    results: list[DensityGap] = []
    for ps in sorted(p_smalls):
        warm = None
        for prev in reversed(results):
            if ps % prev.p_small == 0:
                warm = prev.witnesses
                break
        results.append(density_gap(n, d, ps, p_large, samples, seed, cfg, warm))
    return results


__all__ = [
    "MomentVector", "moment_map", "moment_distance_formula", "NetBound", "net_lower_bound",
    "mesh_for_gap", "DensityGap", "density_gap", "density_profile", "disk_net", "matrix_ball_net",
    "monomial_count", "DEFAULT_DEGREE",
]
