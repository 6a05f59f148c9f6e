"""Evaluation of formulas at matrix tuples and one-sided estimation of
quantified sentences at a fixed matrix dimension."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from . import formula as F
from .errors import ConfigInvalid, DimensionMismatch, UnboundVariable, UnsupportedError
from .matrices import as_matrix, block_embed, matrix_to_json, project_to_contraction, random_contraction
from .nets import DEFAULT_BUDGET, MatrixBallNet
from .terms import Adjoint, One, Prod, Scale, Sum, Var, Zero

EXACT = "exact"
LOWER_BOUND_OF_SUP = "lower-bound-of-sup"
UPPER_BOUND_OF_INF = "upper-bound-of-inf"
NET_BOUND = "net-bound-with-gap"


# --------------------------------------------------------------------------
# compilation to closures over an environment list ``env``:
# env[0] is the identity, env[i] the matrix assigned to x_i.


def compile_term(t) -> Callable[[list], np.ndarray]:
    if isinstance(t, Var):
        i = t.index
        return lambda env: env[i]
    if isinstance(t, One):
        return lambda env: env[0]
    if isinstance(t, Zero):
        return lambda env: np.zeros_like(env[0])
    if isinstance(t, Adjoint):
        g = compile_term(t.arg)
        return lambda env: g(env).conj().T
    if isinstance(t, Scale):
        c = complex(t.coef)
        g = compile_term(t.arg)
        return lambda env: c * g(env)
    a, b = compile_term(t.left), compile_term(t.right)
    if isinstance(t, Sum):
        return lambda env: a(env) + b(env)
    if isinstance(t, Prod):
        return lambda env: a(env) @ b(env)
    raise TypeError(f"not a term: {t!r}")


def compile_qf(f) -> Callable[[list], float]:
    """Closure evaluating a quantifier-free formula on an environment list."""
    if isinstance(f, F.QUANTIFIERS):
        raise UnsupportedError("cannot compile a quantified formula")
    if isinstance(f, F.Norm2):
        g = compile_term(f.term)

        def norm2(env):
            a = g(env)
            return math.sqrt(np.vdot(a, a).real / a.shape[0])
        return norm2
    if isinstance(f, (F.TraceRe, F.TraceIm)):
        g = compile_term(f.term)
        if isinstance(f, F.TraceRe):
            return lambda env: float(np.trace(g(env)).real) / env[0].shape[0]
        return lambda env: float(np.trace(g(env)).imag) / env[0].shape[0]
    if isinstance(f, F.Const):
        v = float(f.value)
        return lambda env: v
    if isinstance(f, F.Scaled):
        c, g = float(f.coef), compile_qf(f.arg)
        return lambda env: c * g(env)
    if isinstance(f, F.Half):
        g = compile_qf(f.arg)
        return lambda env: g(env) / 2
    a, b = compile_qf(f.left), compile_qf(f.right)
    if isinstance(f, F.Add):
        return lambda env: a(env) + b(env)
    if isinstance(f, F.Mul):
        return lambda env: a(env) * b(env)
    if isinstance(f, F.DotMinus):
        return lambda env: F.dotminus(a(env), b(env))
    if isinstance(f, F.Max):
        return lambda env: max(a(env), b(env))
    if isinstance(f, F.Min):
        return lambda env: min(a(env), b(env))
    raise TypeError(f"not a formula: {f!r}")


def as_assignment(a) -> dict[int, np.ndarray]:
    """Normalize a matrix tuple: a mapping index -> matrix, or a sequence
    whose k-th entry is x_{k+1}."""
    if isinstance(a, Mapping):
        out = {int(k): as_matrix(v) for k, v in a.items()}
    else:
        out = {k + 1: as_matrix(v) for k, v in enumerate(a)}
    shapes = {m.shape for m in out.values()}
    if len(shapes) > 1:
        raise DimensionMismatch(f"matrix tuple mixes shapes {sorted(shapes)}")
    return out


def _env(assignment: Mapping[int, np.ndarray], needed, p: int | None = None) -> list:
    missing = sorted(set(needed) - set(assignment))
    if missing:
        raise UnboundVariable(f"variables {['x%d' % i for i in missing]} are not assigned")
    if assignment:
        p = next(iter(assignment.values())).shape[0]
    p = p or 1
    size = max(list(assignment) + list(needed) + [0])
    env = [None] * (size + 1)
    env[0] = np.eye(p, dtype=np.complex128)
    for k, v in assignment.items():
        env[k] = v
    return env


def eval_qf(f, a=(), p: int | None = None) -> float:
    """Value of a quantifier-free formula at the matrix tuple ``a``.

    ``p`` is only consulted when ``a`` is empty (closed formulas).

    >>> from tracelogic.formula import parse
    >>> eval_qf(parse("trRe(x1)"), [np.eye(3)])
    1.0
    """
    if not F.is_quantifier_free(f):
        raise UnsupportedError("eval_qf needs a quantifier-free formula")
    assignment = as_assignment(a)
    return compile_qf(f)(_env(assignment, F.free_vars(f), p))


# --------------------------------------------------------------------------
# results and configuration


@dataclass(frozen=True)
class OptimizerConfig:
    p: int = 1
    restarts: int = 8
    max_iterations: int = 1000
    step: float = 0.5
    decay: float = 0.7
    seed: int = 0
    threads: int = 1

    def validate(self) -> "OptimizerConfig":
        problems = []
        if self.p < 1:
            problems.append("p must be >= 1")
        if self.restarts < 1:
            problems.append("restarts must be >= 1")
        if self.max_iterations < 0:
            problems.append("max_iterations must be >= 0")
        if not self.step > 0:
            problems.append("step must be positive")
        if not 0 < self.decay < 1:
            problems.append("decay must lie in (0, 1)")
        if self.threads < 1:
            problems.append("threads must be >= 1")
        if problems:
            raise ConfigInvalid("; ".join(problems))
        return self

    def with_(self, **kw) -> "OptimizerConfig":
        return replace(self, **kw)


@dataclass
class EvalResult:
    value: float
    bound_kind: str
    certificate: dict[int, np.ndarray] | None = None
    diagnostics: dict = field(default_factory=dict)
    gap: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"value": self.value, "bound_kind": self.bound_kind, "diagnostics": self.diagnostics}
        if self.gap is not None:
            out["gap"] = self.gap
        if self.extra:
            out.update(self.extra)
        if self.certificate is not None:
            out["certificate"] = {f"x{k}": matrix_to_json(v) for k, v in sorted(self.certificate.items())}
        return out


# --------------------------------------------------------------------------
# seeded multi-start hill climbing over contraction tuples


def _perturb(x: list, step: float, rng: np.random.Generator) -> list:
    """Random move of 2-norm scale ``step``, projected back to contractions.

    Targets one random variable half of the time, all of them otherwise. A
    quarter of the moves are radial (``x -> (1 + step * g) x``), which lets
    the climb reach the boundary of the ball where clipping pins singular
    values at 1.
    """
    p = x[0].shape[0]
    sd = step / math.sqrt(2 * p)
    if len(x) > 1 and rng.random() < 0.5:
        targets = [int(rng.integers(len(x)))]
    else:
        targets = range(len(x))
    radial = rng.random() < 0.25
    y = list(x)
    for k in targets:
        if radial:
            y[k] = project_to_contraction((1.0 + step * rng.standard_normal()) * x[k])
        else:
            g = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
            y[k] = project_to_contraction(x[k] + sd * g)
    return y


def _climb(objective, start: list, n_iter: int, step0: float, decay: float, rng, repair=None):
    """Accept-on-strict-improvement climb with a one-fifth success rule: the
    step grows by ``1/decay`` on acceptance (capped at ``step0``) and shrinks
    by ``decay**(1/4)`` on rejection. The schedule never depends on
    ``n_iter``, so longer runs extend shorter ones."""
    x = start
    best = objective(x)
    step, accepted = step0, 0
    shrink = decay ** 0.25
    for _ in range(n_iter):
        if repair is not None and rng.random() < 0.5:
            # repaired moves explore at a scale drawn in [0, 3 step0], unaffected by adaptation
            y = repair(_perturb(x, 3 * step0 * rng.random(), rng))
        else:
            y = _perturb(x, step, rng)
        val = objective(y)
        if val > best:
            x, best = y, val
            accepted += 1
            step = min(step0, step / decay)
        else:
            step *= shrink
            if step < step0 * 1e-9:
                step = step0
    return x, best, accepted


def maximize_over_contractions(objective, n_vars: int, cfg: OptimizerConfig, warm_starts=(), repair=None):
    """Maximize ``objective(list_of_matrices)`` over contraction tuples.

    Restart ``k`` draws from the ``k``-th child of ``SeedSequence(cfg.seed)``,
    so adding restarts never changes earlier ones. Warm starts (tuples of
    dimension ``cfg.p``) are climbed after the random restarts. ``repair``,
    if given, maps a contraction tuple to another one (e.g. a nearby point of
    a definable set); half of the proposals are then perturb-then-repair
    moves. Returns
    ``(best_tuple, best_value, diagnostics)``; ties go to the lowest index.
    """
    cfg.validate()
    p = cfg.p
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    warm_children = np.random.SeedSequence([cfg.seed, 1]).spawn(len(warm_starts)) if warm_starts else []

    def run_random(k):
        rng = np.random.default_rng(children[k])
        start = [random_contraction(p, rng) for _ in range(n_vars)]
        return _climb(objective, start, cfg.max_iterations, cfg.step, cfg.decay, rng, repair)

    def run_warm(k):
        rng = np.random.default_rng(warm_children[k])
        start = [project_to_contraction(m) for m in warm_starts[k]]
        return _climb(objective, start, cfg.max_iterations, cfg.step, cfg.decay, rng, repair)

    jobs = [(run_random, k) for k in range(cfg.restarts)] + [(run_warm, k) for k in range(len(warm_starts))]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda job: job[0](job[1]), jobs))
    else:
        results = [fn(k) for fn, k in jobs]

    best_idx = 0
    for idx, (_, val, _) in enumerate(results):
        if val > results[best_idx][1]:
            best_idx = idx
    x, val, _ = results[best_idx]
    diagnostics = {
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "warm_starts": len(warm_starts),
        "iterations": cfg.max_iterations * len(jobs),
        "accepted": sum(r[2] for r in results),
        "best_start": best_idx,
        "p": p,
    }
    return x, val, diagnostics


def _bound_vars(body, vars) -> tuple[int, ...]:
    if not F.is_quantifier_free(body):
        raise UnsupportedError("optimizer body must be quantifier-free")
    vars = tuple(sorted(set(vars)))
    missing = F.free_vars(body) - set(vars)
    if missing:
        raise UnboundVariable(f"body has unquantified variables {sorted(missing)}")
    return vars


def _optimize(body, vars, cfg, sign: float, warm_starts):
    vars = _bound_vars(body, vars)
    g = compile_qf(body)
    size = max(vars, default=0)

    def objective(xs):
        env = [None] * (size + 1)
        env[0] = np.eye(xs[0].shape[0], dtype=np.complex128) if xs else np.eye(cfg.p)
        for v, m in zip(vars, xs):
            env[v] = m
        return sign * g(env)

    if not vars:
        env = _env({}, (), cfg.p)
        return sign * g(env), {}, {"seed": cfg.seed, "restarts": 0, "iterations": 0, "p": cfg.p}
    warm = [[as_assignment(w)[v] for v in vars] for w in warm_starts]
    xs, val, diag = maximize_over_contractions(objective, len(vars), cfg, warm)
    return val, dict(zip(vars, xs)), diag


def sup_lower_bound(body, vars, cfg: OptimizerConfig, warm_starts=()) -> EvalResult:
    """Certified lower bound on ``sup_vars body`` over ``M_p(C)`` contractions.

    The value is attained at the returned certificate, so it is a valid
    lower bound by construction.
    """
    val, cert, diag = _optimize(body, vars, cfg, 1.0, warm_starts)
    return EvalResult(val, LOWER_BOUND_OF_SUP, cert, diag)


def inf_upper_bound(body, vars, cfg: OptimizerConfig, warm_starts=()) -> EvalResult:
    val, cert, diag = _optimize(body, vars, cfg, -1.0, warm_starts)
    return EvalResult(-val, UPPER_BOUND_OF_INF, cert, diag)


def net_eval(body, vars, p: int, mesh, budget: int = DEFAULT_BUDGET, record: list | None = None) -> EvalResult:
    """Max of ``body`` over a deterministic grid net of contraction tuples.

    ``value <= sup <= value + gap`` at dimension ``p``, where ``gap`` is the
    body's Lipschitz bound times the net's covering radius. If ``record`` is
    a list, ``(index, value)`` pairs are appended to it.
    """
    vars = _bound_vars(body, vars)
    n = max(len(vars), 1)
    net = MatrixBallNet(p, n, mesh, budget)
    g = compile_qf(body)
    size = max(vars, default=0)
    eye = np.eye(p, dtype=np.complex128)
    best_val, best_idx, best_x = -math.inf, -1, None
    for idx, xs in enumerate(net):
        env = [None] * (size + 1)
        env[0] = eye
        for v, m in zip(vars, xs):
            env[v] = m
        val = g(env)
        if record is not None:
            record.append((idx, val))
        if val > best_val:
            best_val, best_idx, best_x = val, idx, xs
    modulus = F.modulus_of_continuity(body)
    gap = modulus.gap(net.spec.covering_radius)
    diag = {"net": net.spec.to_json(), "best_index": best_idx,
            "lipschitz": str(modulus.lipschitz), "p": p}
    cert = dict(zip(vars, best_x)) if vars else {}
    return EvalResult(best_val, NET_BOUND, cert, diag, gap=gap)


def eval_sentence(s, cfg: OptimizerConfig | None = None) -> EvalResult:
    """Dispatch on classification: exact for quantifier-free sentences,
    a lower bound for universal ones, an upper bound for existential ones."""
    cfg = (cfg or OptimizerConfig()).validate()
    if not isinstance(s, F.Sentence):
        s = F.Sentence.from_formula(s)
    if s.classification == F.MIXED:
        raise UnsupportedError("mixed-quantifier sentences are not supported")
    if s.classification == F.QUANTIFIER_FREE:
        return EvalResult(eval_qf(s.formula, (), cfg.p), EXACT, None, {"p": cfg.p})
    vars, body = s.split()
    if s.classification == F.UNIVERSAL:
        return sup_lower_bound(body, vars, cfg)
    return inf_upper_bound(body, vars, cfg)


def embed_certificate(cert: Mapping[int, np.ndarray], q: int) -> dict[int, np.ndarray]:
    """Block-embed every matrix of a certificate ``a -> a (x) 1_q``."""
    return {k: block_embed(v, q) for k, v in cert.items()}
