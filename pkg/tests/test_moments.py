import math

import numpy as np
import pytest

from tracelogic import formula as F
from tracelogic.errors import BudgetExceeded, ConfigInvalid, DimensionMismatch, UnsupportedError
from tracelogic.evaluator import OptimizerConfig, eval_qf, sup_lower_bound
from tracelogic.matrices import random_contraction, two_norm
from tracelogic.moments import (
    adjoint_permutation, density_gap, density_profile, disk_net, matrix_ball_net, mesh_for_gap, moment_distance_formula,
    moment_map, net_lower_bound,
)
from tracelogic.terms import monomial_count


def test_identity_and_zero_tuples():
    assert np.allclose(moment_map([np.eye(3), np.eye(3)], 3).values, 1)
    assert np.allclose(moment_map([np.zeros((2, 2))], 4).values, 0)


def test_scalar_example():
    z = 0.3 - 0.4j
    mv = moment_map([np.array([[z]])], 2)
    zb = z.conjugate()
    assert np.allclose(mv.values, [z, zb, z * z, z * zb, zb * z, zb * zb], atol=1e-15)
    assert [str(m) for m in mv.monomials][:3] == ["x1", "x1'", "x1 * x1"]


def test_length_and_json():
    mv = moment_map([random_contraction(2, 0)] * 3, 2)
    assert len(mv) == monomial_count(3, 2)
    js = mv.to_json()
    assert js["L"] == len(js["values"]) == len(js["monomials"])
    assert all(len(pair) == 2 for pair in js["values"])


def test_invariants_on_random_tuples():
    rng = np.random.default_rng(0)
    for p in (1, 3, 5):
        for n in (1, 2):
            t = [random_contraction(p, rng) for _ in range(n)]
            v = moment_map(t, 4).values
            assert np.all(np.abs(v) <= 1 + 1e-10)
            assert np.allclose(v[adjoint_permutation(n, 4)], v.conj(), atol=1e-12)


def test_lipschitz_per_degree():
    rng = np.random.default_rng(1)
    degrees = np.array([m.degree for m in moment_map([np.eye(2)] * 2, 3).monomials])
    for _ in range(30):
        a = [random_contraction(2, rng) for _ in range(2)]
        b = [random_contraction(2, rng) for _ in range(2)]
        dist = sum(two_norm(x - y) for x, y in zip(a, b))
        diff = np.abs(moment_map(a, 3).values - moment_map(b, 3).values)
        assert np.all(diff <= degrees * dist + 1e-12)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        moment_map({1: np.eye(2), 3: np.eye(2)}, 2)
    with pytest.raises(DimensionMismatch):
        moment_distance_formula(1, 2, [0, 0])


def test_distance_formula_brackets_linf_distance():
    rng = np.random.default_rng(2)
    target = moment_map([random_contraction(2, rng)], 2).values
    f = moment_distance_formula(1, 2, target)
    for _ in range(10):
        x = [random_contraction(1, rng)]
        d = moment_map(x, 2).distance(target)
        v = eval_qf(f, x)
        assert v <= d + 1e-12 and d <= math.sqrt(2) * v + 1e-12


def test_matrix_ball_net_examples():
    net, spec = matrix_ball_net(1, 1, "1/2")
    points = list(net)
    assert spec.cardinality == len(points) == 25
    assert spec.covering_radius <= 0.5 * math.sqrt(2)
    assert all(abs(x[0][0, 0]) <= 1 + 1e-12 for x in points)
    _, finer = matrix_ball_net(1, 1, "1/4")
    assert finer.covering_radius <= spec.covering_radius / 2 + 1e-12
    with pytest.raises(BudgetExceeded) as exc:
        matrix_ball_net(2, 1, "1/10")
    assert exc.value.cardinality == 21 ** 8


def test_matrix_ball_net_covers_by_probing():
    net, spec = matrix_ball_net(1, 1, "1/4")
    pts = np.array([x[0][0, 0] for x in net])
    rng = np.random.default_rng(3)
    for _ in range(300):
        z = complex(*rng.uniform(-1, 1, 2))
        if abs(z) <= 1:
            assert np.min(np.abs(pts - z)) <= spec.covering_radius + 1e-12


def test_disk_net():
    pts, spec = disk_net(1, 1)
    assert spec.cardinality == len(pts) < 20
    pts, spec = disk_net(1, "1/8")
    rng = np.random.default_rng(4)
    for _ in range(500):
        r, th = math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
        z = r * complex(math.cos(th), math.sin(th))
        assert np.min(np.abs(pts[:, 0] - z)) <= 1 / 8 + 1e-12
    assert spec.covering_radius <= 1 / 8 + 1e-12
    pts2, spec2 = disk_net(2, "1/2")
    assert spec2.cardinality == len(pts2) == disk_net(1, "1/2")[1].cardinality ** 2
    with pytest.raises(BudgetExceeded):
        disk_net(4, "1/20")


SIGMA = F.Sentence.parse("sup x1 . trRe(x1 x1')")


def test_net_lower_bound_constant():
    nb = net_lower_bound(F.Sentence.parse("sup x1 . 1/2"), 1, mesh="1/2")
    assert nb.r == 0.5 and nb.gap == 0


def test_net_lower_bound_trace_example():
    nb = net_lower_bound(SIGMA, 1, mesh="1/10")
    assert 0.95 <= nb.r <= 1 + 1e-12
    # the honest gap is Lip * covering radius = 2 * (mesh / 2) * sqrt(2)
    assert nb.gap == pytest.approx(2 * 0.05 * math.sqrt(2))
    finer = net_lower_bound(SIGMA, 1, mesh="1/20")
    assert finer.r >= nb.r - 1e-12


def test_net_lower_bound_soundness():
    body = F.parse("trRe(x1 x1) -. half(trIm(x1))")
    s = F.Sentence.from_formula(F.Sup((1,), body))
    nb = net_lower_bound(s, 1, mesh="1/8")
    opt = sup_lower_bound(body, (1,), OptimizerConfig(p=1, seed=0))
    assert nb.r <= opt.value + 1e-9
    assert opt.value <= nb.r + nb.gap + 1e-9
    assert eval_qf(body, nb.certificate) == pytest.approx(nb.r)


def test_net_lower_bound_eps_and_csv_record():
    rec = []
    nb = net_lower_bound(SIGMA, 1, eps="1/5", record=rec)
    assert nb.gap <= 0.2
    assert len(rec) == nb.net.cardinality
    assert max(v for _, v in rec) == nb.r
    assert mesh_for_gap(SIGMA.split()[1], 1, 1, "1/5") == nb.net.mesh


def test_net_lower_bound_rejects_existential():
    with pytest.raises(UnsupportedError):
        net_lower_bound(F.Sentence.parse("inf x1 . trRe(x1)"), 1, mesh="1/2")


def test_density_same_dimension_is_zero():
    res = density_gap(1, 2, 2, 2, 3, seed=0, cfg=OptimizerConfig(restarts=1, max_iterations=20))
    assert res.gap <= 1e-6


def test_density_scalar_vs_two_by_two_positive():
    res = density_gap(1, 2, 1, 2, 4, seed=0, cfg=OptimizerConfig(restarts=2, max_iterations=200))
    assert res.gap > 1e-3
    assert len(res.per_sample) == 4 and res.gap == max(res.per_sample)


def test_density_monotone_in_p_small():
    gaps = [r.gap for r in density_profile(1, 2, [1, 2, 4], 4, 3, seed=1,
                                           cfg=OptimizerConfig(restarts=2, max_iterations=150))]
    assert gaps[0] >= gaps[1] - 1e-12 and gaps[1] >= gaps[2] - 1e-12


def test_density_config_errors():
    with pytest.raises(ConfigInvalid):
        density_gap(1, 2, 3, 2, 1, seed=0)
    with pytest.raises(ConfigInvalid):
        density_gap(1, 2, 1, 2, 0, seed=0)
