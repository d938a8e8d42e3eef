import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainwishart.matrix_spaces import IncompleteSym, TridiagSym, inverse_image, is_in_P, is_in_Q
from chainwishart.peeling import (
    jacobian_phi,
    jacobian_phi_tilde,
    jacobian_psi,
    jacobian_psi_tilde,
    phi,
    phi_inv,
    phi_tilde,
    phi_tilde_inv,
    psi,
    psi_inv,
    psi_tilde,
    psi_tilde_inv,
    trace_decomposition_check,
    trace_decomposition_check_tilde,
)
from chainwishart.power_functions import ShapeParams, log_delta_M, log_Delta_M, log_phi
from chainwishart.verification import fd_jacobian

from _gen import random_pd_tridiag, random_q_elem


def test_phi_examples():
    eye2 = TridiagSym(2, [1, 1], [0])
    assert phi(1.0, 0.0, eye2).allclose(TridiagSym(3, [1, 1, 1], [0, 0]))
    y = phi(2.0, 0.5, TridiagSym(1, [1.0], []))
    assert y.allclose(TridiagSym(2, [2.0, 1.5], [1.0]))
    with pytest.raises(ValueError):
        phi(-1.0, 0.0, eye2)


def test_phi_inv_examples():
    t = phi_inv(TridiagSym(3, [1, 1, 1], [0, 0]))
    assert t.a == 1.0 and t.b == 0.0
    assert t.rest.allclose(TridiagSym(2, [1, 1], [0]))
    t2 = phi_inv(TridiagSym(2, [2.0, 1.5], [1.0]))
    assert t2.a == pytest.approx(2.0) and t2.b == pytest.approx(0.5)
    assert t2.rest.allclose(TridiagSym(1, [1.0], []))
    with pytest.raises(ValueError):
        phi_inv(TridiagSym(1, [1.0], []))


def test_psi_examples():
    x = psi(1.0, 1.0, IncompleteSym(1, [2.0], []))
    assert x.allclose(IncompleteSym(2, [3.0, 2.0], [2.0]))
    eye = IncompleteSym(2, [1, 1], [0])
    assert psi(1.0, 0.0, eye).allclose(IncompleteSym(3, [1, 1, 1], [0, 0]))


def test_tilde_examples():
    y = phi_tilde(2.0, 0.5, TridiagSym(1, [1.0], []))
    assert y.allclose(TridiagSym(2, [1.5, 2.0], [1.0]))
    x = psi_tilde(1.0, 1.0, IncompleteSym(1, [2.0], []))
    assert x.allclose(IncompleteSym(2, [2.0, 3.0], [2.0]))


@st.composite
def peel_inputs(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    d = np.array(draw(st.lists(st.floats(0.5, 2.0), min_size=n, max_size=n)))
    sub = np.array(draw(st.lists(st.floats(-0.8, 0.8), min_size=n - 1, max_size=n - 1)))
    diag = d**2
    diag[1:] += sub**2
    return TridiagSym(n, diag, sub * d[:-1])


@settings(deadline=None, max_examples=40)
@given(peel_inputs())
def test_round_trips_and_cone_preservation(y):
    t = phi_inv(y)
    assert t.a > 0 and is_in_P(t.rest)
    assert phi(t.a, t.b, t.rest).allclose(y, rtol=1e-10, atol=1e-10)
    tt = phi_tilde_inv(y)
    assert tt.a > 0 and is_in_P(tt.rest)
    assert phi_tilde(tt.a, tt.b, tt.rest).allclose(y, rtol=1e-10, atol=1e-10)
    x = inverse_image(y)
    e = psi_inv(x)
    assert e.a > 0 and is_in_Q(e.rest)
    assert psi(e.a, e.b, e.rest).allclose(x, rtol=1e-10, atol=1e-10)
    et = psi_tilde_inv(x)
    assert et.a > 0 and is_in_Q(et.rest)
    assert psi_tilde(et.a, et.b, et.rest).allclose(x, rtol=1e-10, atol=1e-10)


def test_trace_decomposition():
    eye_y = TridiagSym(4, np.ones(4), np.zeros(3))
    eye_x = IncompleteSym(4, np.ones(4), np.zeros(3))
    lhs, rhs = trace_decomposition_check(eye_y, eye_x)
    assert lhs == pytest.approx(4.0) and rhs == pytest.approx(4.0)
    rng = np.random.default_rng(20)
    for _ in range(30):
        n = int(rng.integers(2, 8))
        y = random_pd_tridiag(rng, n)
        x = random_q_elem(rng, n)
        lhs, rhs = trace_decomposition_check(y, x)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
        lhs, rhs = trace_decomposition_check_tilde(y, x)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_power_function_recurrences():
    # peeling vertex 1 splits off a^{s_1} / alpha^{s_1}; vertex n the mirror
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        y = random_pd_tridiag(rng, n)
        x = inverse_image(y)
        s = rng.uniform(-2, 2, n)
        t = phi_inv(y)
        e = psi_inv(x)
        for m in range(2, n + 1):
            lhs = log_Delta_M(ShapeParams(m, s), y)
            rhs = s[0] * np.log(t.a) + log_Delta_M(ShapeParams(m - 1, s[1:]), t.rest)
            assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)
            lhs = log_delta_M(ShapeParams(m, s), x)
            rhs = s[0] * np.log(e.a) + log_delta_M(ShapeParams(m - 1, s[1:]), e.rest)
            assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)
        tt = phi_tilde_inv(y)
        et = psi_tilde_inv(x)
        for m in range(1, n):
            lhs = log_Delta_M(ShapeParams(m, s), y)
            rhs = s[-1] * np.log(tt.a) + log_Delta_M(ShapeParams(m, s[:-1]), tt.rest)
            assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)
            lhs = log_delta_M(ShapeParams(m, s), x)
            rhs = s[-1] * np.log(et.a) + log_delta_M(ShapeParams(m, s[:-1]), et.rest)
            assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)


def test_phi_recursion_under_psi_coordinates():
    rng = np.random.default_rng(22)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        x = random_q_elem(rng, n)
        e = psi_inv(x)
        lhs = log_phi(x)
        rhs = -0.5 * np.log(e.rest.diag[0]) - 1.5 * np.log(e.a) + log_phi(e.rest)
        assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)
        et = psi_tilde_inv(x)
        rhs = -0.5 * np.log(et.rest.diag[-1]) - 1.5 * np.log(et.a) + log_phi(et.rest)
        assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)


def test_jacobian_values():
    z = TridiagSym(2, [1, 1], [0])
    assert jacobian_phi(1.0, 0.0, z) == 1.0
    assert jacobian_phi(2.0, 0.5, TridiagSym(1, [1.0], [])) == 2.0
    x = IncompleteSym(2, [3.0, 0.5], [0.1])
    assert jacobian_psi(1.0, 1.0, x) == 3.0
    assert jacobian_psi_tilde(1.0, 1.0, x) == 0.5
    assert jacobian_phi_tilde(1.7, 0.0, z) == 1.7


def _coords_map_phi(t, n, tilde=False):
    a, b = t[0], t[1]
    z = TridiagSym.from_coords(t[2:])
    y = phi_tilde(a, b, z) if tilde else phi(a, b, z)
    return y.coords()


def _coords_map_psi(t, n, tilde=False):
    a, b = t[0], t[1]
    x = IncompleteSym.from_coords(t[2:])
    out = psi_tilde(a, b, x) if tilde else psi(a, b, x)
    return out.coords()


def test_jacobian_matches_fd_determinant():
    rng = np.random.default_rng(23)
    for n in (2, 3, 5):
        z = random_pd_tridiag(rng, n - 1)
        a, b = float(rng.uniform(0.5, 2.0)), float(rng.uniform(-1, 1))
        point = np.concatenate([[a, b], z.coords()])
        det = abs(np.linalg.det(fd_jacobian(lambda t: _coords_map_phi(t, n), point)))
        assert det == pytest.approx(jacobian_phi(a, b, z), rel=1e-6)
        det = abs(np.linalg.det(fd_jacobian(lambda t: _coords_map_phi(t, n, True), point)))
        assert det == pytest.approx(jacobian_phi_tilde(a, b, z), rel=1e-6)
        x = random_q_elem(rng, n - 1)
        point = np.concatenate([[a, b], x.coords()])
        det = abs(np.linalg.det(fd_jacobian(lambda t: _coords_map_psi(t, n), point)))
        assert det == pytest.approx(jacobian_psi(a, b, x), rel=1e-6)
        det = abs(np.linalg.det(fd_jacobian(lambda t: _coords_map_psi(t, n, True), point)))
        assert det == pytest.approx(jacobian_psi_tilde(a, b, x), rel=1e-6)
