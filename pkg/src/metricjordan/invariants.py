"""Basis-free cycle counts, decomposition checks and isometric equivalence.

For a real eigenvalue the forms ``[x, y]_k = <U^k x, y>`` on K_lambda have
inertia determined by the cycle structure alone: a cycle of length p and
sign eps contributes an eps-antidiagonal block of size ``p - k``. Second
differences of the ranks give the number of cycles of each length, and
differences of the signatures split those counts by sign.
"""
from dataclasses import dataclass

import numpy as np

from .canonicalize import CanonicalForm, decompose, metric_block, residual_bounds, residuals
from .errors import DomainError, NumericalFailure
from .linalg_core import DEFAULT_TOL, Inertia, inertia_of_symmetric, max_abs
from .operators import gspace_at, operator_scale


@dataclass(frozen=True)
class InertiaProfile:
    """Inertia of ``[x, y]_k`` on K_lambda for k = 0..depth.

    For complex eigenvalues only ranks are meaningful; they are stored as
    ``Inertia(rank, 0, dim - rank)``.
    """

    eigenvalue: complex
    inertias: tuple

    @property
    def is_real(self):
        return complex(self.eigenvalue).imag == 0.0

    @property
    def dim(self):
        return self.inertias[0].dim if self.inertias else 0

    def rank(self, k):
        return self.inertias[k].rank if k < len(self.inertias) else 0

    def signature(self, k):
        return self.inertias[k].signature if k < len(self.inertias) else 0


def _gram_scale(GW, op_scale, k):
    # same operator scale as the kernel-chain rank threshold
    return max(max_abs(GW) * op_scale ** k, np.finfo(float).tiny)


def inertia_profile(op, lam, tol=DEFAULT_TOL):
    """Inertia of ``Gram_k = B^T G U^k B`` over an orthonormal basis B of K_lambda.

    The number of zeros at step k must equal ``dim N(U^k)`` (the radical of
    ``[., .]_k`` on K_lambda); a mismatch means the rank threshold cannot
    separate the spectrum of the Gram matrix and raises NumericalFailure.
    """
    gs = gspace_at(op, lam, tol)
    B = gs.basis.real if gs.is_real else gs.basis
    m = B.shape[1]
    GW = B.T @ op.G @ B
    TW = B.conj().T @ op.T @ B
    UW = TW - gs.eigenvalue * np.eye(m)
    op_scale = max(operator_scale(op.T, gs.eigenvalue), np.finfo(float).tiny)
    if gs.is_real:
        GW = (GW + GW.T) / 2
        UW = UW.real
    zeros = (0,) + gs.kernel_chain
    inertias = []
    W = np.eye(m, dtype=UW.dtype)
    for k in range(gs.depth + 1):
        gram = GW @ W
        scale = _gram_scale(GW, op_scale, k)
        if gs.is_real:
            inr = inertia_of_symmetric((gram + gram.T) / 2, tol, scale=scale)
        else:
            s = np.linalg.svd(gram, compute_uv=False)
            rank = int(np.sum(s > tol.rank_tol * scale))
            inr = Inertia(rank, 0, m - rank)
        if inr.n_zero != zeros[k]:
            raise NumericalFailure(
                "Gram rank disagrees with the kernel chain",
                partial=tuple(inertias),
                diagnostics={"eigenvalue": gs.eigenvalue, "k": k, "zeros": inr.n_zero, "expected": zeros[k]})
        inertias.append(inr)
        W = UW @ W
    return InertiaProfile(gs.eigenvalue, tuple(inertias))


def counts_from_profile(profile):
    """Cycle counts ``{p: (N_plus, N_minus)}`` from an inertia profile.

    ``N(p) = r(p-1) - 2 r(p) + r(p+1)`` and ``N_plus - N_minus = s(p-1) - s(p+1)``.
    Complex profiles carry no signs, so every cycle counts as positive.
    """
    depth = len(profile.inertias) - 1
    out = {}
    for p in range(1, depth + 1):
        r = profile.rank
        total = r(p - 1) - 2 * r(p) + r(p + 1)
        diff = profile.signature(p - 1) - profile.signature(p + 1) if profile.is_real else total
        if total < 0 or (total + diff) % 2 or abs(diff) > total:
            raise NumericalFailure("inconsistent inertia profile",
                                   diagnostics={"p": p, "total": total, "signed": diff})
        if total:
            out[p] = ((total + diff) // 2, (total - diff) // 2)
    return out


def counts_from_form(form, lam, radius=DEFAULT_TOL.eig_cluster_tol):
    """The same counts read off a CanonicalForm, for tuples within ``radius`` of ``lam``."""
    lam = complex(lam)
    if lam.imag < 0:
        lam = lam.conjugate()
    out = {}
    for t in CanonicalForm(form):
        if abs(t.eigenvalue - lam) <= radius:
            plus, minus = out.get(t.p, (0, 0))
            out[t.p] = (plus + 1, minus) if t.eps == 1 else (plus, minus + 1)
    return out


def _check(passed, value=None, bound=None):
    d = {"pass": bool(passed)}
    if value is not None:
        d["value"] = float(value)
    if bound is not None:
        d["bound"] = float(bound)
    return d


def verify_decomposition(op, dec, tol=DEFAULT_TOL):
    """Recheck a decomposition against ``op``; returns a report dict.

    The report has one entry per check (``pass`` plus magnitudes) and an
    overall ``pass`` flag. Nothing is raised for failing checks.
    """
    G, T = np.asarray(op.G), np.asarray(op.T)
    P = np.asarray(dec.P, dtype=float)
    form = CanonicalForm(dec.form)
    n = G.shape[0]
    checks = {}
    shape_ok = P.shape == (n, n) and form.dim == n
    checks["shape"] = _check(shape_ok)
    if not shape_ok:
        return {"pass": False, "checks": checks}

    res_g, res_t = residuals(G, T, P, form)
    bound_g, bound_t = residual_bounds(G, T, P, tol)
    checks["residual_metric"] = _check(res_g <= bound_g, res_g, bound_g)
    checks["residual_operator"] = _check(res_t <= bound_t, res_t, bound_t)

    s = np.linalg.svd(P, compute_uv=False) if n else np.ones(1)
    ratio = s[-1] / s[0] if s[0] > 0 else 0.0
    checks["invertible"] = _check(ratio > tol.rank_tol, ratio, tol.rank_tol)

    worst, i = 0.0, 0
    block_bound = tol.residual_tol * np.linalg.norm(G, 2) * max(np.linalg.norm(P, 2), 1.0) ** 2
    for t in form:
        cols = P[:, i:i + t.block_dim]
        worst = max(worst, max_abs(cols.T @ G @ cols - metric_block(t)))
        i += t.block_dim
    checks["block_grams"] = _check(worst <= block_bound, worst, block_bound)

    idx = inertia_of_symmetric(G, tol).n_minus
    checks["index_bookkeeping"] = {"pass": form.index == idx, "form_index": form.index, "space_index": idx}
    return {"pass": all(c["pass"] for c in checks.values()), "checks": checks}


def equivalent(op_s, op_t, tol=DEFAULT_TOL, seed=0):
    """Whether two self-adjoint operators are related by an isometry.

    Returns ``(flag, pairing)`` where ``pairing`` lists matched
    ``(tuple_s, tuple_t)`` pairs (empty when inequivalent). Spaces of
    different dimension or index raise DomainError.
    """
    if op_s.n != op_t.n:
        raise DomainError(f"dimension mismatch: {op_s.n} vs {op_t.n}")
    if op_s.space.index != op_t.space.index:
        raise DomainError(f"index mismatch: {op_s.space.index} vs {op_t.space.index}")
    form_s = decompose(op_s, tol, seed).form
    form_t = decompose(op_t, tol, seed).form
    pairing = form_s.match(form_t, tol.eig_cluster_tol)
    if pairing is None:
        return False, []
    return True, pairing
