"""Self-adjoint operators on index-1 (Minkowski) spaces.

On an index-1 space every canonical form is one of four kinds: all real
1-cycles (one of them timelike), one complex 1-cycle, one real 2-cycle of
either sign, or one positive real 3-cycle, always next to spacelike 1-cycles.
"""
from dataclasses import dataclass, field

import numpy as np

from .canonicalize import CanonicalForm, decompose
from .errors import DomainError, NumericalFailure
from .linalg_core import DEFAULT_TOL, max_abs

VARIANTS = ("DiagonalizableReal", "ComplexPair", "Null2Block", "Null3Block")
NULL_CONE_SAMPLES = 4096
GOLDEN_ITERS = 200


@dataclass(frozen=True)
class MinkowskiClass:
    variant: str
    witness: object  # CycleTuple responsible for the variant
    form: CanonicalForm = field(repr=False, default=None)

    @property
    def label(self):
        if self.variant == "Null2Block":
            return f"Null2Block({self.witness.eps:+d})"
        return self.variant


def _require_index_one(op):
    if op.space.index != 1:
        raise DomainError(f"Minkowski classification needs index 1, got {op.space.index}")


def classify_form(form):
    """Variant of an index-1 canonical form; raises if the form is not index-1 shaped."""
    form = CanonicalForm(form)
    if form.index != 1:
        raise DomainError(f"form has index {form.index}, expected 1")
    complex_t = [t for t in form if not t.is_real]
    long_t = [t for t in form if t.is_real and t.p > 1]
    timelike = [t for t in form if t.is_real and t.p == 1 and t.eps == -1]
    rest = [t for t in form if t.is_real and t.p == 1 and t.eps == 1]
    matched = []
    if not complex_t and not long_t and len(timelike) == 1:
        matched.append(MinkowskiClass("DiagonalizableReal", timelike[0], form))
    if len(complex_t) == 1 and complex_t[0].p == 1 and not long_t and not timelike:
        matched.append(MinkowskiClass("ComplexPair", complex_t[0], form))
    if len(long_t) == 1 and long_t[0].p == 2 and not complex_t and not timelike:
        matched.append(MinkowskiClass("Null2Block", long_t[0], form))
    if len(long_t) == 1 and long_t[0].p == 3 and long_t[0].eps == 1 and not complex_t and not timelike:
        matched.append(MinkowskiClass("Null3Block", long_t[0], form))
    if len(matched) != 1 or len(rest) + 1 != len(form):
        raise NumericalFailure("index-1 form fits no single variant",
                               diagnostics={"form": repr(form), "matches": [m.variant for m in matched]})
    return matched[0]


def classify(op, tol=DEFAULT_TOL, seed=0):
    _require_index_one(op)
    return classify_form(decompose(op, tol, seed).form)


def null_eigenvector_count(form):
    """Independent null eigenvectors (capped at 2), read off the canonical form.

    The eigenspace at a real lambda is spanned by the first vector of each
    cycle; its Gram is diagonal with eps for 1-cycles and 0 for longer
    cycles. Null vectors span the whole eigenspace when that Gram is
    indefinite and its kernel otherwise.
    """
    by_lam = {}
    for t in CanonicalForm(form):
        if t.is_real:
            by_lam.setdefault(t.eigenvalue, []).append(0 if t.p > 1 else t.eps)
    total = 0
    for d in by_lam.values():
        if 1 in d and -1 in d:
            total += len(d)
        else:
            total += d.count(0)
    return min(total, 2)


def _cone_frame(G):
    """``(e0, E)`` with null vectors ``e0 + E u`` for unit u (index-1 G)."""
    w, V = np.linalg.eigh(G)
    neg = int(np.argmin(w))
    others = [i for i in range(len(w)) if i != neg]
    return V[:, neg] / np.sqrt(-w[neg]), V[:, others] / np.sqrt(w[others])


def null_vectors(G, count, rng):
    """Random null vectors of an index-1 metric, as rows."""
    e0, E = _cone_frame(G)
    u = rng.standard_normal((count, E.shape[1]))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return e0[None, :] + u @ E.T


def definiteness_margin(M, G, iters=GOLDEN_ITERS):
    """``max over mu of lambda_min(M - mu G)`` for symmetric M and index-1 G.

    Returns ``(margin, scale)`` with ``scale`` the magnitude of ``M - mu G``
    over the search interval. The margin is positive exactly when some
    ``M - mu G`` is positive definite. The
    function is concave in mu, and a positive value needs
    ``-e0^T M e0 < mu < e^T M e`` for a unit timelike e0 and unit spacelike
    e, so golden-section search on that interval suffices.
    """
    e0, E = _cone_frame(G)
    lo, hi = -(e0 @ M @ e0), E[:, 0] @ M @ E[:, 0]
    scale = max(max_abs(M), max(abs(lo), abs(hi)) * max_abs(G))
    if not lo < hi:
        return -np.inf, scale

    def phi(mu):
        return np.linalg.eigvalsh(M - mu * G)[0]

    r = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = phi(c), phi(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = phi(d)
        else:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = phi(c)
    return max(fc, fd), scale


def null_cone_definite(op, tol=DEFAULT_TOL, seed=0, samples=NULL_CONE_SAMPLES):
    """Whether ``<Tx, x>`` is nonzero on the whole null cone (n >= 3).

    The projective null cone is connected for n >= 3, so the condition means
    one strict sign everywhere. Seeded samples refute it by a sign change.
    Sampling cannot see zeros where ``<Tx, x>`` only touches 0 (every null
    eigenvector is one), so a passing sample is confirmed by a certificate:
    some ``GT - mu G`` must be definite (Finsler's lemma). Returns None for
    n < 3.
    """
    if op.n < 3:
        return None
    G, T = np.asarray(op.G), np.asarray(op.T)
    M = G @ T
    M = (M + M.T) / 2
    X = null_vectors(G, samples, np.random.default_rng(seed))
    q = np.einsum("ij,jk,ik->i", X, M, X) / np.einsum("ij,ij->i", X, X)
    band = tol.rank_tol * max_abs(M)
    if np.all(q > band):
        sign = 1.0
    elif np.all(q < -band):
        sign = -1.0
    else:
        return False
    margin, scale = definiteness_margin(sign * M, G)
    return bool(margin > tol.rank_tol * scale)


@dataclass(frozen=True)
class MinkowskiProperties:
    variant: str
    has_timelike_eigenvector: bool
    null_eigenvector_count: int
    diagonalizable: bool
    real_spectrum: bool
    diagonalizable_real: bool
    null_cone_definite_sampled: object  # True / False, or None when n = 2
    checks: dict

    def as_dict(self):
        return {
            "variant": self.variant,
            "has_timelike_eigenvector": self.has_timelike_eigenvector,
            "null_eigenvector_count": self.null_eigenvector_count,
            "diagonalizable": self.diagonalizable,
            "real_spectrum": self.real_spectrum,
            "diagonalizable_real": self.diagonalizable_real,
            "null_cone_definite_sampled": (
                "not applicable" if self.null_cone_definite_sampled is None else self.null_cone_definite_sampled),
            "checks": dict(self.checks),
        }


def properties(op, tol=DEFAULT_TOL, seed=0, samples=NULL_CONE_SAMPLES):
    """Diagonalizability facts for an index-1 operator, each cross-checked.

    ``checks`` records whether each implication holds on this instance:
    item1 (diagonalizable with real spectrum iff a timelike eigenvector
    exists), item2 (two null eigenvectors force that case with a timelike
    eigenspace of dimension >= 2), item3 (with real spectrum, diagonalizable
    iff the null eigenvector count is not 1) and item4 (if
    :func:`null_cone_definite` passes then the diagonalizable real case
    holds; n >= 3 only).
    """
    cls = classify(op, tol, seed)
    form = cls.form
    real_spectrum = all(t.is_real for t in form)
    diagonalizable = all(t.p == 1 for t in form)
    diag_real = diagonalizable and real_spectrum
    has_timelike = cls.variant == "DiagonalizableReal"
    count = null_eigenvector_count(form)

    checks = {"item1": diag_real == has_timelike}
    if count >= 2:
        lam = cls.witness.eigenvalue
        timelike_dim = sum(1 for t in form if t.eigenvalue == lam) if has_timelike else 0
        checks["item2"] = diag_real and timelike_dim >= 2
    else:
        checks["item2"] = True
    checks["item3"] = (not real_spectrum) or (diagonalizable == (count != 1))

    sampled = null_cone_definite(op, tol, seed, samples)
    if sampled is not None:
        checks["item4"] = (not sampled) or diag_real
    return MinkowskiProperties(cls.label, has_timelike, count, diagonalizable, real_spectrum,
                               diag_real, sampled, checks)
