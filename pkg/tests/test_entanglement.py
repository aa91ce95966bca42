import math

import numpy as np
import pytest

from spinent.entanglement import (
    SINGLET,
    TwoSpinState,
    averaged_pair,
    build_two_spin_state,
    concurrence_from_p,
    concurrence_gaussian,
    concurrence_pair,
    concurrence_pairs,
    concurrence_short_range,
    exchange_hole,
    local_length,
    rho1,
    state_from_hole,
    werner_state,
    wootters_concurrence,
)
from spinent.errors import SpinEntError, UndefinedPointError
from spinent.grid import sphere_quadrature

RNG = np.random.default_rng(11)


def _random_pure(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def test_wootters_pure_states():
    # pure state concurrence 2|ad - bc|
    for _ in range(50):
        v = _random_pure(RNG)
        expect = 2 * abs(v[0] * v[3] - v[1] * v[2])
        assert wootters_concurrence(TwoSpinState(np.outer(v, v.conj()), True)) == pytest.approx(expect, abs=1e-10)
    assert wootters_concurrence(TwoSpinState(np.outer(SINGLET, SINGLET), True)) == pytest.approx(1.0, abs=1e-12)
    prod = np.kron([1, 0], [0, 1]).astype(complex)
    assert wootters_concurrence(TwoSpinState(np.outer(prod, prod), True)) == pytest.approx(0.0, abs=1e-12)


def test_wootters_rejects_bad_states():
    with pytest.raises(SpinEntError):
        wootters_concurrence(TwoSpinState(np.diag([1.5, -0.5, 0, 0]), True))
    with pytest.raises(SpinEntError):
        wootters_concurrence(TwoSpinState(np.zeros((4, 4)), False))


@pytest.mark.parametrize("p", [0.0, 1 / 3, 0.5, 0.9, 1.0])
def test_werner_threshold(p):
    assert wootters_concurrence(werner_state(p)) == pytest.approx(max((3 * p - 1) / 2, 0.0), abs=1e-12)


def test_state_from_hole_is_werner():
    n1, n2, h = 0.7, 0.4, -0.3
    st = state_from_hole(n1, n2, h).normalize()
    p = -h / (2 * n2 + h)
    np.testing.assert_allclose(st.matrix, werner_state(p).matrix, atol=1e-14)


def test_on_top_pair_fully_entangled(argon):
    for r in RNG.normal(size=(10, 3)):
        pe = concurrence_pair(argon, r, r)
        assert pe.p == pytest.approx(1.0, abs=1e-12)
        assert pe.C == pytest.approx(1.0, abs=1e-12) and pe.entangled


def test_pair_bounds_and_oracle(argon):
    r1 = RNG.normal(scale=1.5, size=(200, 3))
    r2 = RNG.normal(scale=1.5, size=(200, 3))
    res = concurrence_pairs(argon, r1, r2)
    ok = res["defined"]
    assert np.all((res["p"][ok] >= -1e-14) & (res["p"][ok] <= 1 + 1e-12))
    for a, b in zip(r1[:20], r2[:20]):
        pe = concurrence_pair(argon, a, b)
        assert wootters_concurrence(build_two_spin_state(argon, a, b)) == pytest.approx(pe.C, abs=1e-10)


def test_hole_sum_rule_ingredients(argon):
    r1, r2 = np.array([0.2, 0.1, 0.4]), np.array([-0.3, 0.5, 0.0])
    assert rho1(argon, r1, r2) == pytest.approx(np.conj(rho1(argon, r2, r1)))
    assert exchange_hole(argon, r1, r1) == pytest.approx(-concurrence_pair(argon, r1, r1).n1)


def test_far_point_undefined(argon):
    with pytest.raises(UndefinedPointError):
        concurrence_pair(argon, (80.0, 0, 0), (0.1, 0, 0))
    res = concurrence_pairs(argon, np.array([[80.0, 0, 0]]), np.array([[0.0, 0, 0.1]]))
    assert not res["defined"][0] and math.isnan(res["C"][0])


def test_averaged_pair_limits(argon):
    r = np.array([0.0, 0.3, 0.9])
    assert averaged_pair(argon, r, 0.0).C == pytest.approx(1.0, abs=1e-12)
    d_over_n, inv = local_length(argon, r)
    assert inv == pytest.approx(math.sqrt(d_over_n))
    u = 0.02 / inv
    c = averaged_pair(argon, r, u, sphere_quadrature(17)).C
    assert (1 - c) / (u * u * d_over_n) == pytest.approx(1.0, abs=0.02)


def test_closed_forms():
    assert concurrence_short_range(4.0, 0.5) == 0.0
    assert concurrence_short_range(1.0, 0.5) == pytest.approx(0.75)
    assert concurrence_gaussian(2.0, 0.5) == pytest.approx(math.exp(-1.0))
    assert concurrence_from_p(1 / 3) == 0.0
    with pytest.raises(ValueError):
        concurrence_short_range(-1.0, 0.1)
