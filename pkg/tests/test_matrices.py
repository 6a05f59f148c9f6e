import numpy as np
import pytest

from tracelogic.errors import DimensionMismatch, InvalidArgument, InvalidPVM, NotHermitian
from tracelogic.matrices import (
    block_embed, composition_count, compositions, hermitian_eig, is_pvm, matrix_from_json, matrix_to_json,
    normalized_trace, operator_norm, project_to_contraction, pvm_residuals, random_contraction,
    random_hermitian, random_pvm, random_unitary, two_norm, validate_pvm_tuple,
)


def test_trace_and_norms():
    a = np.diag([1.0, 0.0, 0.0, 1j])
    assert normalized_trace(np.eye(3)) == pytest.approx(1)
    assert two_norm(a) == pytest.approx(np.sqrt(0.5))
    assert operator_norm(a) == pytest.approx(1)


def test_projection_clips_singular_values():
    rng = np.random.default_rng(0)
    a = 3 * (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    c = project_to_contraction(a)
    assert operator_norm(c) <= 1 + 1e-12
    small = random_contraction(4, 1)
    assert np.allclose(project_to_contraction(small), small)


def test_projection_is_nonexpansive():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b = (2 * rng.normal(size=(3, 3)) + 2j * rng.normal(size=(3, 3)) for _ in range(2))
        assert two_norm(project_to_contraction(a) - project_to_contraction(b)) <= two_norm(a - b) + 1e-12


def test_hermitian_eig_descending_and_reconstructs():
    h = random_hermitian(5, 3)
    w, v = hermitian_eig(h)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h)
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_random_generators_are_seeded():
    assert np.array_equal(random_unitary(4, 5), random_unitary(4, 5))
    u = random_unitary(4, 5)
    assert np.allclose(u @ u.conj().T, np.eye(4))
    assert operator_norm(random_contraction(6, 2)) <= 1 + 1e-12
    assert two_norm(random_hermitian(3, 0, scale=1e-3)) == pytest.approx(1e-3)
    with pytest.raises(InvalidArgument):
        random_unitary(3, None)


def test_compositions():
    assert compositions(2, 2) == [(2, 0), (1, 1), (0, 2)]
    for p in range(1, 5):
        for m in range(1, 4):
            assert len(compositions(p, m)) == composition_count(p, m)


def test_random_pvm_is_pvm():
    for p in range(1, 6):
        for m in range(1, 4):
            g = random_pvm(p, m, seed=p * 10 + m)
            assert is_pvm(g)
            assert max(pvm_residuals(g)) < 1e-10


def test_validate_pvm_tuple_errors():
    good = random_pvm(2, 2, seed=0)
    validate_pvm_tuple([good, good])
    with pytest.raises(InvalidPVM):
        validate_pvm_tuple([[good[0], good[0]]])
    with pytest.raises(DimensionMismatch):
        validate_pvm_tuple([good, random_pvm(3, 2, seed=0)])


def test_block_embed_preserves_trace_and_products():
    a, b = random_contraction(2, 0), random_contraction(2, 1)
    ea, eb = block_embed(a, 3), block_embed(b, 3)
    assert ea.shape == (6, 6)
    assert normalized_trace(ea @ eb) == pytest.approx(normalized_trace(a @ b))


def test_json_round_trip():
    a = random_contraction(3, 4)
    assert np.array_equal(matrix_from_json(matrix_to_json(a)), a)
