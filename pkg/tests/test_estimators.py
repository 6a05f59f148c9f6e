import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from tracelogic.errors import DimensionMismatch
from tracelogic.estimators import MomentMapTransformer, PVMRounder, SyncValueEstimator, UniversalSentenceEstimator
from tracelogic.games import coloring_game, complete_graph
from tracelogic.matrices import random_contraction, random_pvm
from tracelogic.moments import moment_map


def test_moment_transformer():
    rng = np.random.default_rng(0)
    X = np.array([[random_contraction(2, rng) for _ in range(2)] for _ in range(5)])
    tr = MomentMapTransformer(d=2).fit(X)
    Z = tr.transform(X)
    L = len(tr.monomials_)
    assert Z.shape == (5, 2 * L)
    v = moment_map(list(X[0]), 2).values
    assert np.allclose(Z[0, :L], v.real) and np.allclose(Z[0, L:], v.imag)
    assert len(tr.get_feature_names_out()) == 2 * L
    assert MomentMapTransformer(d=2, real=False).fit_transform(X).dtype == np.complex128
    with pytest.raises(DimensionMismatch):
        tr.transform(X[:, :1])
    with pytest.raises(NotFittedError):
        MomentMapTransformer().transform(X)


def test_params_and_clone():
    est = SyncValueEstimator(p=2, seed=4)
    assert est.get_params()["p"] == 2
    assert clone(est).get_params() == est.get_params()
    est.set_params(restarts=2)
    assert est.restarts == 2


def test_sync_value_estimator():
    est = SyncValueEstimator(p=1, max_iterations=50, seed=0).fit()
    vals = est.predict([coloring_game(complete_graph(3), 3)])
    assert vals[0] >= 1 - 1e-6
    with pytest.raises(NotFittedError):
        SyncValueEstimator().predict([])


def test_pvm_rounder():
    groups = [random_pvm(2, 2, seed=1)]
    out = PVMRounder().fit_transform([groups])
    assert np.allclose(out[0][0][0], groups[0][0])


def test_sentence_estimator():
    est = UniversalSentenceEstimator(p=1, restarts=2, max_iterations=200, seed=0).fit()
    vals = est.predict(["sup x1 . trRe(x1 x1')", "half(1)"])
    assert vals[0] == pytest.approx(1, abs=1e-6) and vals[1] == 0.5
