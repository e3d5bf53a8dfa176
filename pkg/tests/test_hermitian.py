import numpy as np
import pytest

from qrdiv.errors import (
    BadFactorization,
    BadRank,
    DimensionMismatch,
    NonHermitian,
    NotAResolution,
)
from qrdiv.hermitian import (
    HermitianOperator,
    ProjectionOperator,
    PsdOperator,
    apply_function,
    check_hermitian,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    pinch,
    projection_meet,
    sample_cptp,
    sample_state,
    sample_unitary,
    spectral_decompose,
    support_projection,
    tensor,
)


def test_spectral_diag():
    w, u = spectral_decompose(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(w, [3.0, 1.0])
    np.testing.assert_allclose(np.abs(u), np.eye(2), atol=1e-12)


def test_spectral_pauli_x():
    w, u = spectral_decompose(np.array([[0, 1], [1, 0]], dtype=complex))
    np.testing.assert_allclose(w, [1.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(np.abs(u), np.full((2, 2), 1 / np.sqrt(2)), atol=1e-12)


def test_spectral_roundtrip_random():
    rng = np.random.default_rng(0)
    for _ in range(20):
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (h + h.conj().T) / 2
        w, u = spectral_decompose(h)
        assert np.all(np.diff(w) <= 1e-12)
        np.testing.assert_allclose((u * w) @ u.conj().T, h, atol=1e-10)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-10)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitian):
        check_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_apply_function_power_on_support():
    a = np.diag([4.0, 0.0])
    np.testing.assert_allclose(
        apply_function(a, lambda x: x**0.5), np.diag([2.0, 0.0]), atol=1e-12
    )


def test_apply_function_generalized_inverse():
    a = np.diag([2.0, 0.0])
    inv = apply_function(a, lambda x: 1.0 / x)
    np.testing.assert_allclose(inv, np.diag([0.5, 0.0]), atol=1e-12)
    np.testing.assert_allclose(a @ inv, support_projection(a), atol=1e-12)


def test_apply_function_nlog_convention():
    import math

    rho = np.diag([math.e, 1.0, 0.0])
    out = apply_function(rho, math.log)
    np.testing.assert_allclose(out, np.diag([1.0, 0.0, 0.0]), atol=1e-12)


def test_apply_function_matches_polynomial():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = sample_state(3, 3, rng) * 2
        p = lambda x: 0.3 + 1.2 * x - 0.7 * x * x
        direct = 0.3 * np.eye(3) + 1.2 * a - 0.7 * a @ a
        np.testing.assert_allclose(
            apply_function(a, p, on_support_only=False), direct, atol=1e-9
        )


def test_projection_meet_identity():
    eye = np.eye(3, dtype=complex)
    np.testing.assert_allclose(projection_meet(eye, eye), eye, atol=1e-12)


def test_projection_meet_distinct_lines():
    p = np.diag([1.0, 0.0]).astype(complex)
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    q = np.outer(v, v).astype(complex)
    np.testing.assert_allclose(projection_meet(p, q), np.zeros((2, 2)), atol=1e-9)


def test_projection_meet_random_vs_kernel_oracle():
    # oracle: the meet is the kernel of (2I - P - Q)
    rng = np.random.default_rng(2)
    for _ in range(10):
        p = support_projection(sample_state(4, 2, rng))
        q = support_projection(sample_state(4, 3, rng))
        m = projection_meet(p, q)
        w, u = spectral_decompose(2 * np.eye(4) - p - q)
        kernel = u[:, w < 1e-9]
        oracle = kernel @ kernel.conj().T
        np.testing.assert_allclose(m, oracle, atol=1e-8)
        # meet properties: commutes with idempotency, below both arguments
        np.testing.assert_allclose(m @ m, m, atol=1e-9)
        assert np.min(np.linalg.eigvalsh(p - m)) > -1e-9
        assert np.min(np.linalg.eigvalsh(q - m)) > -1e-9


def test_projection_meet_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        projection_meet(np.eye(2), np.eye(3))


def test_pinch_eigenbasis_gives_diagonal():
    rng = np.random.default_rng(3)
    a = sample_state(3, 3, rng)
    w, u = spectral_decompose(a)
    blocks = [np.outer(u[:, i], u[:, i].conj()) for i in range(3)]
    out = pinch(a, blocks)
    np.testing.assert_allclose(out, a, atol=1e-10)


def test_pinch_identity_and_masking():
    rng = np.random.default_rng(4)
    a = sample_state(3, 3, rng)
    np.testing.assert_allclose(pinch(a, [np.eye(3)]), a, atol=1e-12)
    blocks = [np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])]
    out = pinch(a, blocks)
    masked = a.copy()
    masked[0, 2] = masked[1, 2] = masked[2, 0] = masked[2, 1] = 0.0
    np.testing.assert_allclose(out, masked, atol=1e-12)
    assert abs(np.trace(out) - np.trace(a)) < 1e-10


def test_pinch_requires_resolution():
    with pytest.raises(NotAResolution):
        pinch(np.eye(2), [np.diag([1.0, 0.0])])


def test_pinch_is_contraction_and_idempotent():
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = sample_state(4, 4, rng)
        p = support_projection(sample_state(4, 2, rng))
        blocks = [p, np.eye(4) - p]
        out = pinch(a, blocks)
        np.testing.assert_allclose(pinch(out, blocks), out, atol=1e-10)
        assert np.linalg.norm(out, 2) <= np.linalg.norm(a, 2) + 1e-9


def test_partial_trace_product_rule():
    rng = np.random.default_rng(6)
    x = sample_state(2, 2, rng)
    y = sample_state(3, 3, rng) * 0.7
    np.testing.assert_allclose(
        partial_trace(tensor(x, y), (2, 3), keep=0), x * np.trace(y).real, atol=1e-12
    )
    np.testing.assert_allclose(
        partial_trace(np.eye(4) / 4, (2, 2), keep=0), np.eye(2) / 2, atol=1e-12
    )


def test_partial_trace_vs_index_sum():
    rng = np.random.default_rng(7)
    a = sample_state(4, 4, rng)
    t = a.reshape(2, 2, 2, 2)
    oracle = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for k in range(2):
            oracle[i, k] = sum(t[i, j, k, j] for j in range(2))
    np.testing.assert_allclose(partial_trace(a, (2, 2), 0), oracle, atol=1e-12)
    with pytest.raises(BadFactorization):
        partial_trace(a, (3, 2), 0)


def test_sample_state_properties():
    rho = sample_state(2, 1, 0)
    w, _ = spectral_decompose(rho)
    assert abs(np.trace(rho) - 1) < 1e-12
    np.testing.assert_allclose(w, [1.0, 0.0], atol=1e-10)
    with pytest.raises(BadRank):
        sample_state(2, 3, 0)


def test_sample_unitary():
    u = sample_unitary(4, 1)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-10)


def test_sample_cptp_trace_preserving_on_basis():
    ch = sample_cptp(2, 2, 2, 3)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            assert abs(np.trace(ch(e)) - np.trace(e)) < 1e-10
    out = ch(np.eye(2) / 2)
    assert abs(np.trace(out) - 1) < 1e-10
    assert np.min(np.linalg.eigvalsh(out)) > -1e-12


def test_sample_cptp_env1_is_unitary_conjugation():
    ch = sample_cptp(2, 2, 1, 4)
    rho = sample_state(2, 2, 5)
    win, _ = spectral_decompose(rho)
    wout, _ = spectral_decompose(ch(rho))
    np.testing.assert_allclose(win, wout, atol=1e-10)


def test_typed_wrappers():
    rho = sample_state(3, 2, 8)
    op = PsdOperator(rho)
    assert op.rank == 2
    assert op.support.rank == 2
    h = HermitianOperator(rho)
    w, u = h.spectral
    np.testing.assert_allclose((u * w) @ u.conj().T, rho, atol=1e-10)
    ProjectionOperator(support_projection(rho))
    with pytest.raises(NonHermitian):
        ProjectionOperator(rho)  # not idempotent


def test_matrix_json_roundtrip(tmp_path):
    rho = sample_state(3, 3, 9)
    obj = matrix_to_json(rho)
    np.testing.assert_allclose(matrix_from_json(obj), rho, atol=1e-12)
    bad = matrix_to_json(rho)
    bad["re"][0][1] += 1.0  # break hermiticity
    with pytest.raises(NonHermitian):
        matrix_from_json(bad)
