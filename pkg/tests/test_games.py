import math
from fractions import Fraction

import numpy as np
import pytest

from tracelogic import formula as F
from tracelogic.errors import InvalidArgument, InvalidPVM, TooFar
from tracelogic.evaluator import OptimizerConfig, eval_qf
from tracelogic.games import (
    NonlocalGame, build_game_formula, build_pvm_formula, coloring_game, complete_graph, correlation_from_pvms,
    deterministic_pvm, deterministic_value, embed_pvm_tuple, fast_game_value, groups_to_assignment,
    rank_patterns, relaxed_game_value, round_to_pvm, synchronous_value_lower_bound, random_synchronous_game,
    _stack,
)
from tracelogic.matrices import random_hermitian, random_pvm, two_norm


def test_game_validation():
    D = np.ones((1, 1, 2, 2), dtype=bool)
    with pytest.raises(InvalidArgument):
        NonlocalGame(1, 2, [[Fraction(1, 2)]], D)
    with pytest.raises(InvalidArgument):
        NonlocalGame(1, 2, [[Fraction(1)]], np.ones((1, 1, 3, 3), dtype=bool))


def test_coloring_game_properties():
    g = coloring_game(complete_graph(3), 3)
    assert g.proper and g.synchronous
    assert NonlocalGame.from_json(g.to_json()).to_json() == g.to_json()


def test_random_games_are_proper_and_synchronous():
    for seed in range(10):
        g = random_synchronous_game(3, 2, seed)
        assert g.proper and g.synchronous
        assert sum(sum(row) for row in g.mu) == 1


def test_pvm_formula_vanishes_on_pvms():
    groups = [random_pvm(3, 2, seed=s) for s in range(2)]
    assert eval_qf(build_pvm_formula(2, 2), groups_to_assignment(groups)) < 1e-9


def test_pvm_formula_positive_off_pvms():
    groups = [[np.eye(2) / 2, np.eye(2) / 2]]
    assert eval_qf(build_pvm_formula(1, 2), groups_to_assignment(groups)) > 0.1


def test_fast_value_matches_formula():
    g = random_synchronous_game(3, 2, 4)
    groups = [random_pvm(2, 2, seed=s) for s in range(3)]
    assert fast_game_value(g.weights, _stack(groups)) == pytest.approx(
        eval_qf(build_game_formula(g), groups_to_assignment(groups)), abs=1e-12)


def test_classical_values():
    assert deterministic_value(coloring_game(complete_graph(3), 3)) == 1
    assert deterministic_value(coloring_game(complete_graph(5), 3)) == Fraction(21, 25)
    assert deterministic_value(coloring_game(complete_graph(4), 3)) < 1


def test_deterministic_strategy_scores_exactly():
    g = random_synchronous_game(3, 3, 1)
    value, assignment = deterministic_value(g, return_assignment=True)
    groups = deterministic_pvm(assignment, g.m, p=2)
    assert eval_qf(build_game_formula(g), groups_to_assignment(groups)) == pytest.approx(float(value), abs=1e-12)


def test_correlation_is_synchronous():
    groups = [random_pvm(3, 3, seed=s) for s in range(2)]
    corr = correlation_from_pvms(groups)
    assert corr.synchronicity_residual() < 1e-12
    assert np.allclose(corr.row_sums(), 1)
    with pytest.raises(InvalidPVM):
        correlation_from_pvms([[np.eye(2), np.eye(2)]])


def test_rounding_fixes_exact_pvms():
    groups = [random_pvm(4, 3, seed=s) for s in range(2)]
    res = round_to_pvm(groups)
    assert res.distance < 1e-9
    assert res.warnings == []


def test_rounding_small_noise():
    rng = np.random.default_rng(0)
    exact = [random_pvm(3, 2, seed=rng) for _ in range(2)]
    noisy = [[x + random_hermitian(3, rng, 1e-3) for x in g] for g in exact]
    res = round_to_pvm(noisy)
    assert max(max(max(np.abs(a @ a - a).max() for a in g) for g in res.groups), 0) < 1e-10
    assert res.distance <= 10 * 2 * 2 * 1e-3
    with pytest.raises(TooFar):
        round_to_pvm([[np.eye(2) / 2, np.eye(2) / 2]], tol=0.1)


def test_rounding_ties_go_to_lowest_index():
    # a maximally mixed pair: every eigenvector scores equally for both outcomes
    res = round_to_pvm([[np.eye(2) / 2, np.eye(2) / 2]], tol=math.inf)
    assert np.allclose(res.groups[0][0], np.eye(2))
    assert np.allclose(res.groups[0][1], 0)
    # a tie that is not split across outcomes is not worth a warning
    assert res.warnings == []
    assert round_to_pvm([[np.eye(2), np.zeros((2, 2))]]).warnings == []


def test_rank_patterns():
    pats, exhaustive = rank_patterns(2, 2, 2, seed=0)
    assert exhaustive and len(pats) == 9
    pats, exhaustive = rank_patterns(5, 3, 4, seed=0, limit=20)
    assert not exhaustive and len(pats) == 20 and len(set(pats)) == 20


def test_triangle_perfect_at_p1():
    g = coloring_game(complete_graph(3), 3)
    rep = synchronous_value_lower_bound(g, 1, OptimizerConfig(p=1, seed=0, max_iterations=100))
    assert rep.lower_bound >= 1 - 1e-6
    assert rep.classical_value == 1
    assert rep.synchronicity_residual < 1e-12


def test_lower_bound_is_attained_by_certificate():
    g = random_synchronous_game(2, 3, 9)
    rep = synchronous_value_lower_bound(g, 2, OptimizerConfig(p=2, seed=1, max_iterations=200))
    assert eval_qf(build_game_formula(g), groups_to_assignment(rep.certificate)) == pytest.approx(rep.lower_bound)
    assert rep.lower_bound >= float(rep.classical_value) - 1e-9
    js = rep.to_json()
    assert js["classical_value"] == str(rep.classical_value)


def test_warm_start_from_embedding():
    g = random_synchronous_game(3, 2, 2)
    cfg = OptimizerConfig(p=1, seed=0, max_iterations=100)
    r1 = synchronous_value_lower_bound(g, 1, cfg)
    r2 = synchronous_value_lower_bound(g, 2, cfg.with_(p=2), warm_start=embed_pvm_tuple(r1.certificate, 2))
    assert r2.lower_bound >= r1.lower_bound - 1e-9


def test_relaxed_value_never_beats_rounded_pvm_value():
    g = random_synchronous_game(2, 2, 3)
    res = relaxed_game_value(g, 1, 10, OptimizerConfig(p=1, seed=0, restarts=4, max_iterations=200))
    cons = synchronous_value_lower_bound(g, 1, OptimizerConfig(p=1, seed=0))
    assert res.extra["rounded_value"] <= cons.lower_bound + 1e-6
    assert abs(res.extra["rounded_value"] - cons.lower_bound) <= 2e-2
    assert res.value >= 0
    assert res.bound_kind == "lower-bound-of-sup"


def test_game_formula_slope_can_exceed_one():
    """For psi = Re tau(x^2) (one question, one answer) the slope at t*1 is 2t,
    so the best Lipschitz constant on contractions is 2, not 1."""
    g = NonlocalGame(1, 1, [[Fraction(1)]], np.ones((1, 1, 1, 1), dtype=bool))
    psi = build_game_formula(g)
    t, h = 0.9, 1e-4
    slope = (eval_qf(psi, [np.eye(2) * (t + h)]) - eval_qf(psi, [np.eye(2) * t])) / two_norm(h * np.eye(2))
    assert slope == pytest.approx(2 * t + h, rel=1e-6)
    assert F.lipschitz_bound(psi) == 2
