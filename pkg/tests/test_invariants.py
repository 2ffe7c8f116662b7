import numpy as np
import pytest
from hypothesis import given, strategies as st

from metricjordan.canonicalize import CanonicalForm, CycleTuple, Decomposition, decompose
from metricjordan.errors import DomainError, NumericalFailure
from metricjordan.instancegen import generate, random_form, random_isometry
from metricjordan.invariants import (
    InertiaProfile, counts_from_form, counts_from_profile, equivalent, inertia_profile,
    verify_decomposition,
)
from metricjordan.linalg_core import Inertia
from metricjordan.operators import make_operator
from metricjordan.scalar_product import make_space, minkowski


def op_of(tuples, seed=0):
    return generate(CanonicalForm(tuples), seed=seed).op


def brute_profile(form, lam):
    """Profile of a canonical form built block by block with LAPACK eigenvalues."""
    cycles = [t for t in form if t.eigenvalue == lam]
    depth = max(t.p for t in cycles)
    dim = sum(t.p for t in cycles)
    out = []
    for k in range(depth + 1):
        w = []
        for t in cycles:
            if t.p > k:
                w.extend(np.linalg.eigvalsh(t.eps * np.fliplr(np.eye(t.p - k))))
        plus, minus = sum(v > 0.5 for v in w), sum(v < -0.5 for v in w)
        out.append(Inertia(plus, minus, dim - plus - minus))
    return InertiaProfile(complex(lam), tuple(out))


class TestInertiaProfile:
    def test_positive_two_cycle(self):
        prof = inertia_profile(op_of([CycleTuple(2.0, 2, 1)]), 2.0)
        assert prof.inertias == (Inertia(1, 1, 0), Inertia(1, 0, 1), Inertia(0, 0, 2))

    def test_negative_one_cycle(self):
        prof = inertia_profile(op_of([CycleTuple(2.0, 1, -1)]), 2.0)
        assert prof.inertias[0] == Inertia(0, 1, 0)

    def test_direct_sum(self):
        op = op_of([CycleTuple(2.0, 2, 1), CycleTuple(2.0, 1, -1)], seed=4)
        prof = inertia_profile(op, 2.0)
        assert prof.inertias[:2] == (Inertia(1, 2, 0), Inertia(1, 0, 2))

    def test_zeros_follow_kernel_chain(self, rng):
        for i in range(50):
            inst = generate(random_form(rng), seed=i + 1)
            for t in inst.form:
                prof = inertia_profile(inst.op, t.eigenvalue)
                zeros = [inr.n_zero for inr in prof.inertias]
                assert zeros == sorted(zeros)
                assert all(inr.dim == prof.dim for inr in prof.inertias)

    def test_congruence_invariance(self, rng):
        # the same operator seen through two different scramblings
        for i in range(30):
            form = random_form(rng, n_max=7)
            a, b = generate(form, seed=2 * i + 1).op, generate(form, seed=2 * i + 2).op
            for t in form:
                assert inertia_profile(a, t.eigenvalue).inertias == inertia_profile(b, t.eigenvalue).inertias


class TestCountsFromProfile:
    def test_mixed_example(self):
        prof = InertiaProfile(2.0, (Inertia(1, 2, 0), Inertia(1, 0, 2), Inertia(0, 0, 3)))
        assert counts_from_profile(prof) == {1: (0, 1), 2: (1, 0)}

    def test_single_positive(self):
        assert counts_from_profile(InertiaProfile(1.0, (Inertia(1, 0, 0), Inertia(0, 0, 1)))) == {1: (1, 0)}

    def test_three_cycle(self):
        prof = InertiaProfile(0.0, (Inertia(2, 1, 0), Inertia(1, 1, 1), Inertia(1, 0, 2), Inertia(0, 0, 3)))
        assert counts_from_profile(prof) == {3: (1, 0)}

    def test_inconsistent(self):
        prof = InertiaProfile(0.0, (Inertia(1, 0, 0), Inertia(1, 0, 0)))
        with pytest.raises(NumericalFailure):
            counts_from_profile(prof)

    @given(st.integers(0, 10**6))
    def test_inverts_brute_force_profiles(self, seed):
        rng = np.random.default_rng(seed)
        form = random_form(rng, complex_prob=0.0)
        for lam in {t.eigenvalue for t in form}:
            assert counts_from_profile(brute_profile(form, lam)) == counts_from_form(form, lam)

    def test_agrees_with_decompose(self, rng):
        for i in range(60):
            inst = generate(random_form(rng), seed=i + 1)
            form = decompose(inst.op).form
            for lam in {t.eigenvalue for t in form}:
                got = counts_from_profile(inertia_profile(inst.op, lam))
                assert got == counts_from_form(form, lam)


class TestVerify:
    def setup_method(self):
        self.op = op_of([CycleTuple(1.0, 2, 1), CycleTuple(3.0, 1, -1), CycleTuple(2 + 1j, 1)], seed=8)
        self.dec = decompose(self.op)

    def test_passes(self):
        report = verify_decomposition(self.op, self.dec)
        assert report["pass"], report

    def test_zeroed_column(self):
        P = self.dec.P.copy()
        P[:, 0] = 0.0
        report = verify_decomposition(self.op, Decomposition(self.dec.form, P, 0.0, 0.0))
        assert not report["checks"]["invertible"]["pass"]
        assert not report["pass"]

    def test_flipped_sign(self):
        tuples = [CycleTuple(t.eigenvalue, t.p, -t.eps) if abs(t.eigenvalue - 3) < 1e-6 else t for t in self.dec.form]
        report = verify_decomposition(self.op, Decomposition(CanonicalForm(tuples), self.dec.P, 0.0, 0.0))
        assert not report["checks"]["residual_metric"]["pass"]

    def test_shape_mismatch(self):
        report = verify_decomposition(self.op, Decomposition(self.dec.form, np.eye(2), 0.0, 0.0))
        assert report == {"pass": False, "checks": {"shape": {"pass": False}}}


class TestEquivalent:
    def test_swapped_timelike_eigenvalue(self):
        s = minkowski(4)
        t1 = make_operator(s, np.diag([1.0, 2.0, 3.0, 4.0]))
        t2 = make_operator(s, np.diag([2.0, 1.0, 3.0, 4.0]))
        flag, pairing = equivalent(t1, t2)
        assert not flag and pairing == []

    def test_self(self):
        op = op_of([CycleTuple(1.0, 2, -1), CycleTuple(-1 + 2j, 1)], seed=3)
        flag, pairing = equivalent(op, op)
        assert flag and len(pairing) == 2

    def test_isometry_conjugate(self, rng):
        for i in range(20):
            inst = generate(random_form(rng, n_max=6), seed=i + 1)
            R = random_isometry(inst.space, seed=i + 1)
            moved = make_operator(inst.space, np.linalg.solve(R, inst.op.T @ R))
            assert equivalent(inst.op, moved)[0]

    def test_index_mismatch(self):
        a = make_operator(minkowski(2), np.eye(2))
        b = make_operator(make_space(np.eye(2)), np.eye(2))
        with pytest.raises(DomainError):
            equivalent(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            equivalent(make_operator(minkowski(2), np.eye(2)), make_operator(minkowski(3), np.eye(3)))
