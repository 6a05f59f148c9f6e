"""scikit-learn style wrappers around the functional core.

The core works on games, sentences and matrix tuples rather than feature
matrices, so only :class:`MomentMapTransformer` is a transformer in the
usual numeric sense. The others follow the estimator conventions (params in
``__init__``, ``get_params``/``set_params``, ``fit`` returns ``self``,
fitted attributes end in ``_``) so they compose with sklearn tooling such as
``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import formula as F
from .errors import DimensionMismatch, InvalidArgument
from .evaluator import OptimizerConfig, eval_sentence
from .games import NonlocalGame, round_to_pvm, synchronous_value_lower_bound
from .moments import _moment_values, _monomials


class _OptimizerParams(BaseEstimator):
    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(p=self.p, restarts=self.restarts, max_iterations=self.max_iterations,
                               seed=self.seed, threads=self.threads).validate()


class SyncValueEstimator(_OptimizerParams):
    """Lower bounds on the synchronous value of nonlocal games at dimension ``p``.

    ``fit`` validates the configuration; ``predict`` returns one lower bound
    per game. The full reports of the last ``predict`` call are kept in
    ``reports_``.
    """

    def __init__(self, p=1, restarts=8, max_iterations=1000, seed=0, threads=1):
        self.p = p
        self.restarts = restarts
        self.max_iterations = max_iterations
        self.seed = seed
        self.threads = threads

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "config_")
        games = [g if isinstance(g, NonlocalGame) else NonlocalGame.from_json(g) for g in X]
        self.reports_ = [synchronous_value_lower_bound(g, self.p, self.config_) for g in games]
        return np.array([r.lower_bound for r in self.reports_])


class UniversalSentenceEstimator(_OptimizerParams):
    """Values (or one-sided bounds) of sentences at dimension ``p``."""

    def __init__(self, p=1, restarts=8, max_iterations=1000, seed=0, threads=1):
        self.p = p
        self.restarts = restarts
        self.max_iterations = max_iterations
        self.seed = seed
        self.threads = threads

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "config_")
        sentences = [s if isinstance(s, F.Sentence) else F.Sentence.parse(s) if isinstance(s, str)
                     else F.Sentence.from_formula(s) for s in X]
        self.results_ = [eval_sentence(s, self.config_) for s in sentences]
        return np.array([r.value for r in self.results_])


class PVMRounder(TransformerMixin, BaseEstimator):
    """Rounds near-PVM tuples (lists of groups of matrices) to exact PVM tuples."""

    def __init__(self, tol=0.25):
        self.tol = tol

    def fit(self, X=None, y=None):
        if not self.tol > 0:
            raise InvalidArgument("tol must be positive")
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        self.results_ = [round_to_pvm(t, self.tol) for t in X]
        return [r.groups for r in self.results_]


class MomentMapTransformer(TransformerMixin, BaseEstimator):
    """Maps matrix tuples of shape ``(samples, n, p, p)`` to trace moments.

    With ``real=True`` (default) the output is ``(samples, 2L)``: real parts
    followed by imaginary parts. Otherwise it is complex ``(samples, L)``.
    """

    def __init__(self, d=4, real=True):
        self.d = d
        self.real = real

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.complex128)
        if X.ndim != 4 or X.shape[2] != X.shape[3]:
            raise DimensionMismatch(f"expected shape (samples, n, p, p), got {X.shape}")
        return X

    def fit(self, X, y=None):
        if int(self.d) < 1:
            raise InvalidArgument(f"d must be >= 1, got {self.d}")
        X = self._check(X)
        self.n_vars_ = X.shape[1]
        self.monomials_ = _monomials(self.n_vars_, int(self.d))
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_vars_")
        X = self._check(X)
        if X.shape[1] != self.n_vars_:
            raise DimensionMismatch(f"fitted on {self.n_vars_} variables, got {X.shape[1]}")
        out = np.stack([_moment_values(t, int(self.d)) for t in X]) if len(X) else \
            np.zeros((0, len(self.monomials_)), dtype=np.complex128)
        return np.hstack([out.real, out.imag]) if self.real else out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_vars_")
        names = [str(m).replace(" ", "") for m in self.monomials_]
        if not self.real:
            return np.array(names, dtype=object)
        return np.array([f"re({s})" for s in names] + [f"im({s})" for s in names], dtype=object)
