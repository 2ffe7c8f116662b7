import numpy as np
import pytest
from hypothesis import given, strategies as st

from metricjordan.canonicalize import CanonicalForm, CycleTuple, decompose
from metricjordan.errors import DomainError
from metricjordan.instancegen import (
    cond, expm_series, generate, random_form, random_isometry, random_minkowski_form,
    random_scrambler, scrambler_with_condition,
)
from metricjordan.scalar_product import make_space, minkowski


def test_seed_zero_is_identity():
    inst = generate([CycleTuple(2.0, 1, 1)], seed=0)
    np.testing.assert_array_equal(inst.space.G, [[1.0]])
    np.testing.assert_array_equal(inst.op.T, [[2.0]])


def test_canonical_pair_with_identity():
    inst = generate([CycleTuple(7.0, 2, 1)])
    np.testing.assert_array_equal(inst.space.G, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(inst.op.T, [[7, 1], [0, 7]])


def test_conditioning_cap(rng):
    for cap in (1.5, 10.0, 100.0):
        for _ in range(20):
            n = int(rng.integers(1, 9))
            assert cond(random_scrambler(n, rng, cap)) <= cap * (1 + 1e-12)


def test_conditioning_cap_rejects_below_one(rng):
    with pytest.raises(DomainError):
        random_scrambler(3, rng, 0.5)


def test_exact_condition(rng):
    assert cond(scrambler_with_condition(5, 1e4, rng)) == pytest.approx(1e4, rel=1e-8)


def test_generated_operators_are_self_adjoint(rng):
    # make_operator inside generate raises otherwise
    for i in range(100):
        generate(random_form(rng), seed=i + 1)


def test_round_trip_small(rng):
    for i in range(100):
        form = random_form(rng)
        assert decompose(generate(form, seed=i + 1).op).form.match(form, 1e-6) is not None


def test_forms_respect_limits(rng):
    for _ in range(200):
        form = random_form(rng)
        assert 1 <= form.dim <= 10 and all(t.p <= 4 for t in form)
        lams = sorted({t.eigenvalue for t in form}, key=lambda z: (z.real, z.imag))
        gaps = [abs(a - b) for a in lams for b in lams if a != b]
        assert not gaps or min(gaps) >= 1.0


def test_minkowski_forms_have_index_one(rng):
    for _ in range(100):
        assert random_minkowski_form(rng).index == 1


class TestIsometry:
    def test_seed_zero(self):
        np.testing.assert_array_equal(random_isometry(minkowski(3), 0), np.eye(3))

    def test_euclidean_is_orthogonal(self):
        R = random_isometry(make_space(np.eye(4)), 3)
        np.testing.assert_allclose(R.T @ R, np.eye(4), atol=1e-13)

    @given(st.floats(-2.0, 2.0))
    def test_boost_closed_form(self, t):
        R = expm_series(np.array([[0.0, t], [t, 0.0]]))
        want = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
        np.testing.assert_allclose(R, want, rtol=1e-13, atol=1e-14)

    @given(st.integers(1, 10**6))
    def test_preserves_metric(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        G = np.diag(rng.choice([-1.0, 1.0], size=n))
        Q = random_scrambler(n, rng, 10)
        space = make_space(Q.T @ G @ Q)
        R = random_isometry(space, seed)
        scale = np.linalg.norm(space.G, 2) * np.linalg.norm(R, 2) ** 2
        assert np.abs(R.T @ space.G @ R - space.G).max() <= 1e-12 * scale
        assert abs(np.linalg.det(R)) > 0

    def test_expm_matches_eigendecomposition(self, rng):
        for _ in range(20):
            S = rng.standard_normal((4, 4))
            S = (S + S.T) / 2
            w, V = np.linalg.eigh(S)
            np.testing.assert_allclose(expm_series(S), V @ np.diag(np.exp(w)) @ V.T, rtol=1e-11, atol=1e-12)
