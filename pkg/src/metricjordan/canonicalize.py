"""Metric-Jordan decomposition of a self-adjoint operator.

The construction works one generalized eigenspace at a time: pick a
generator ``x`` with ``<U^{p-1} x, x> != 0`` (p = current chain depth),
adapt its cycle into a skew-normal sequence, split the cycle span off
together with its orthogonal complement, and repeat on the complement.
Complex eigenvalues are handled in the complexification and the adapted
cycle is turned into a real basis at the end.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalFailure
from .linalg_core import DEFAULT_TOL, chain_bases, max_abs
from .linalg_core import shifted as _shifted
from .operators import (
    cycle_from_generator,
    cycle_vectors,
    generalized_eigenspaces,
    gspace_at,
    operator_scale,
)
from .scalar_product import skew_normal_index

N_RANDOM_CANDIDATES = 32


@dataclass(frozen=True)
class CycleTuple:
    """Invariant ``(eigenvalue, p, eps)`` of one adapted cycle."""

    eigenvalue: complex
    p: int
    eps: int = 1

    def __post_init__(self):
        lam = complex(self.eigenvalue)
        object.__setattr__(self, "eigenvalue", lam)
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"cycle length must be a positive integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))
        if self.eps not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.eps!r}")
        object.__setattr__(self, "eps", int(self.eps))
        if lam.imag < 0:
            raise DomainError("complex tuples are indexed by the eigenvalue with Im > 0")
        if lam.imag > 0 and self.eps != 1:
            raise DomainError("complex cycles carry sign +1")

    @property
    def is_real(self):
        return self.eigenvalue.imag == 0.0

    @property
    def block_dim(self):
        return self.p if self.is_real else 2 * self.p

    @property
    def block_index(self):
        if self.is_real:
            return skew_normal_index(self.p, self.eps).n_minus
        return self.p

    @property
    def sort_key(self):
        return (self.eigenvalue.real, self.eigenvalue.imag, self.p, -self.eps)

    def to_json(self):
        return {"re": self.eigenvalue.real, "im": self.eigenvalue.imag, "p": self.p, "eps": self.eps}

    @classmethod
    def from_json(cls, d):
        return cls(complex(float(d["re"]), float(d.get("im", 0.0))), int(d["p"]), int(d.get("eps", 1)))


class CanonicalForm:
    """Multiset of CycleTuples, stored in serialization order."""

    def __init__(self, tuples=()):
        self.tuples = tuple(sorted(tuples, key=lambda t: t.sort_key))

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self):
        return len(self.tuples)

    def __eq__(self, other):
        return isinstance(other, CanonicalForm) and self.tuples == other.tuples

    def __hash__(self):
        return hash(self.tuples)

    def __repr__(self):
        inner = ", ".join(f"({_fmt(t.eigenvalue)}, {t.p}, {t.eps:+d})" for t in self.tuples)
        return f"CanonicalForm([{inner}])"

    @property
    def dim(self):
        return sum(t.block_dim for t in self.tuples)

    @property
    def index(self):
        return sum(t.block_index for t in self.tuples)

    def match(self, other, radius=DEFAULT_TOL.eig_cluster_tol):
        """Greedy nearest-eigenvalue pairing with exact (p, eps) agreement.

        Returns the list of matched ``(mine, theirs)`` pairs, or None when the
        multisets differ.
        """
        if len(self) != len(other):
            return None
        remaining = list(other.tuples)
        pairs = []
        for t in self.tuples:
            best = None
            for k, s in enumerate(remaining):
                if s.p != t.p or s.eps != t.eps or s.is_real != t.is_real:
                    continue
                d = abs(s.eigenvalue - t.eigenvalue)
                if d <= radius and (best is None or d < best[0]):
                    best = (d, k)
            if best is None:
                return None
            pairs.append((t, remaining.pop(best[1])))
        return pairs

    def to_json(self):
        return [t.to_json() for t in self.tuples]

    @classmethod
    def from_json(cls, items):
        return cls(CycleTuple.from_json(d) for d in items)


def _fmt(z):
    return f"{z.real:g}" if z.imag == 0 else f"{z.real:g}{z.imag:+g}i"


def metric_block(t):
    p = t.p
    if t.is_real:
        return t.eps * np.fliplr(np.eye(p))
    B = np.zeros((2 * p, 2 * p))
    for i in range(p):
        j = p - 1 - i
        B[2 * i, 2 * j] = 1.0
        B[2 * i + 1, 2 * j + 1] = -1.0
    return B


def operator_block(t):
    p = t.p
    if t.is_real:
        return t.eigenvalue.real * np.eye(p) + np.eye(p, k=1)
    a, b = t.eigenvalue.real, t.eigenvalue.imag
    B = np.kron(np.eye(p), np.array([[a, b], [-b, a]])) + np.kron(np.eye(p, k=1), np.eye(2))
    return B


def _block_diag(blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def canonical_metric(form):
    return _block_diag([metric_block(t) for t in CanonicalForm(form)])


def canonical_operator(form):
    return _block_diag([operator_block(t) for t in CanonicalForm(form)])


@dataclass(frozen=True, eq=False)
class AdaptedCycle:
    """A cycle that is also a skew-normal sequence.

    ``coefficients`` are the correction factors applied at steps k = 2..p,
    ``products`` the values ``<v_i, v_p>`` (i = 1..p) after each step,
    ``end_vectors`` the end vector after each step, and ``leading_product``
    the value ``<v_1, v_p>`` before normalization.
    """

    eigenvalue: complex
    vectors: np.ndarray
    eps: int
    leading_product: complex
    coefficients: tuple = ()
    products: tuple = ()
    end_vectors: tuple = ()

    @property
    def p(self):
        return self.vectors.shape[1]

    @property
    def generator(self):
        return self.vectors[:, -1]


def _form_value(G, U, x, p):
    """``<U^{p-1} x, x>`` and ``||U^{p-1} x||`` (x is a unit vector)."""
    w = x
    for _ in range(p - 1):
        w = U @ w
    return w @ G @ x, np.linalg.norm(w)


def _candidates(basis, rng, real):
    cols = [basis[:, i] for i in range(basis.shape[1])]
    m = len(cols)
    cols += [cols[i] + cols[j] for i in range(m) for j in range(i + 1, m)]
    for _ in range(N_RANDOM_CANDIDATES):
        c = rng.standard_normal(m)
        if not real:
            c = c + 1j * rng.standard_normal(m)
        cols.append(basis @ c)
    return [v / np.linalg.norm(v) for v in cols if np.linalg.norm(v) > 0]


def _find_generator(G, U, basis, p, rng, real, tol):
    best, best_val, best_w = None, 0.0, 0.0
    for x in _candidates(basis, rng, real):
        val, w = _form_value(G, U, x, p)
        if best is None or abs(val) > abs(best_val):
            best, best_val, best_w = x, val, w
    # relative to the vectors actually paired, not to powers of ||T||
    floor = tol.rank_tol * max_abs(G) * best_w
    if best is None or not abs(best_val) > floor:
        raise NumericalFailure("no generator with nonzero leading product",
                               diagnostics={"best": abs(best_val), "floor": floor, "p": p})
    return best, best_val


def find_generator(op, lam, p=None, tol=DEFAULT_TOL, seed=0):
    """A unit vector x in K_lam maximizing ``|<U^{p-1} x, x>|`` over the candidates.

    Candidates are the computed basis columns of K_lam, their pairwise sums and
    32 seeded random combinations.
    """
    gs = gspace_at(op, lam, tol)
    if p is None:
        p = gs.depth
    U = _shifted(op.T, gs.eigenvalue)
    x, _ = _find_generator(op.G, U, gs.basis, p, np.random.default_rng(seed), gs.is_real, tol)
    return x


def _adapt(G, U, x, p, real, lam, tol):
    V = cycle_vectors(U, x, p)
    c = V[:, 0] @ G @ V[:, -1]
    floor = tol.rank_tol * max_abs(G) * np.linalg.norm(V[:, 0]) * np.linalg.norm(V[:, -1])
    if not abs(c) > floor:
        raise DomainError(f"leading product <v_1, v_p> = {abs(c):.3g} is numerically zero")
    if real:
        c = float(np.real(c))
        eps = 1 if c > 0 else -1
        x = x / np.sqrt(abs(c))
    else:
        eps = 1
        x = x / np.sqrt(complex(c))
    V = cycle_vectors(U, x, p)
    coefficients, products, ends = [], [], []
    for k in range(2, p + 1):
        vp = V[:, -1]
        a = -(V[:, k - 1] @ G @ vp) / (2 * (V[:, 0] @ G @ vp))
        x = x + a * V[:, p - k]
        V = cycle_vectors(U, x, p)
        coefficients.append(float(a.real) if real else complex(a))
        products.append(V.T @ G @ V[:, -1])
        ends.append(x.copy())
    return AdaptedCycle(lam, V, eps, c, tuple(coefficients), tuple(products), tuple(ends))


def adapt_cycle(op, lam, x, tol=DEFAULT_TOL):
    """Turn the cycle generated by ``x`` into a skew-normal sequence.

    Normalizes the end vector so that ``|<v_1, v_p>| = 1`` (``<v_1, v_p> = 1``
    via the principal square root for complex eigenvalues), then for
    ``k = 2..p`` adds ``a v_{p-k+1}`` to the end vector with
    ``a = -<v_k, v_p> / (2 <v_1, v_p>)`` and regenerates the cycle.
    """
    cyc = cycle_from_generator(op, lam, x, tol)
    lam = complex(lam)
    real = lam.imag == 0.0 and not np.iscomplexobj(cyc.generator)
    U = _shifted(op.T, lam)
    if real:
        U = U.real
    return _adapt(op.G, U, cyc.generator, cyc.p, real, lam, tol)


def _realify_columns(Z):
    r = np.sqrt(2.0)
    cols = []
    for i in range(Z.shape[1]):
        cols.append(r * Z[:, i].real)
        cols.append(r * Z[:, i].imag)
    return np.stack(cols, axis=1)


def realify_cycle(cycle, tol=DEFAULT_TOL):
    """Real basis ``(u_1, v_1, ..., u_p, v_p)`` of the span of a complex cycle and its conjugate.

    ``u_i = (z_i + conj z_i) / sqrt 2`` and ``v_i = (z_i - conj z_i) / (i sqrt 2)``.
    """
    lam = complex(cycle.eigenvalue)
    if not lam.imag > 0:
        raise DomainError("realification needs an eigenvalue with Im > 0")
    R = _realify_columns(np.asarray(cycle.vectors))
    s = np.linalg.svd(R, compute_uv=False)
    if s[-1] <= tol.rank_tol * s[0]:
        raise DomainError("real and imaginary parts of the cycle are dependent")
    return R


@dataclass(frozen=True, eq=False)
class Decomposition:
    form: CanonicalForm
    P: np.ndarray
    residual_metric: float
    residual_operator: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def canonical_metric(self):
        return canonical_metric(self.form)

    @property
    def canonical_operator(self):
        return canonical_operator(self.form)


def residuals(G, T, P, form):
    """Max-abs residuals of ``P^T G P = G_can`` and ``T P = P T_can``."""
    Gc, Tc = canonical_metric(form), canonical_operator(form)
    return max_abs(P.T @ G @ P - Gc), max_abs(T @ P - P @ Tc)


def residual_bounds(G, T, P, tol):
    nG = np.linalg.norm(G, 2) if G.size else 0.0
    nT = np.linalg.norm(T, 2) if T.size else 0.0
    nP = np.linalg.norm(P, 2) if P.size else 0.0
    return tol.residual_tol * nG * nP ** 2, tol.residual_tol * max(nT, 1e-300) * nP


def _split_gspace(G, T, gs, tol, rng, diag):
    """Adapted blocks spanning one generalized eigenspace, as (tuple, columns) pairs."""
    lam = gs.eigenvalue
    real = gs.is_real
    B = gs.basis.real if real else gs.basis
    scale = operator_scale(T, lam)
    TW = B.conj().T @ T @ B
    GW = B.T @ G @ B
    m = B.shape[1]
    C = np.eye(m, dtype=B.dtype)
    blocks = []
    while C.shape[1]:
        r = C.shape[1]
        GC = C.T @ GW @ C
        UC = C.conj().T @ TW @ C - lam.real * np.eye(r) if real else C.conj().T @ TW @ C - lam * np.eye(r)
        dims = [b.shape[1] for b in chain_bases(UC, tol, scale)]
        if not dims or dims[-1] != r:
            raise NumericalFailure("restricted operator is not nilpotent on the remaining space",
                                   partial=blocks, diagnostics={"eigenvalue": lam, "chain": dims, "dim": r})
        p = len(dims)
        x, val = _find_generator(GC, UC, np.eye(r, dtype=C.dtype), p, rng, real, tol)
        cyc = _adapt(GC, UC, x, p, real, lam, tol)
        Z = B @ (C @ cyc.vectors)
        if real:
            blocks.append((CycleTuple(lam.real, p, cyc.eps), Z.real))
        else:
            blocks.append((CycleTuple(lam, p, 1), _realify_columns(Z)))
        diag.setdefault("leading_products", []).append(abs(cyc.leading_product))
        _, _, vh = np.linalg.svd(cyc.vectors.T @ GC)
        C = C @ vh[p:].conj().T
    return blocks


def decompose(op, tol=DEFAULT_TOL, seed=0):
    """Metric-Jordan decomposition ``(form, P)`` of a self-adjoint operator.

    ``P^T G P`` is the canonical metric and ``P^{-1} T P`` the canonical
    operator of the returned form. Raises NumericalFailure (with the
    partial decomposition attached) when a residual exceeds ten times its
    bound or the bookkeeping does not add up.
    """
    G, T = np.asarray(op.G), np.asarray(op.T)
    n = G.shape[0]
    if n == 0:
        return Decomposition(CanonicalForm(), np.zeros((0, 0)), 0.0, 0.0)
    rng = np.random.default_rng(seed)
    spaces = generalized_eigenspaces(op, tol)
    spaces.sort(key=lambda g: (-g.depth, g.eigenvalue.real, g.eigenvalue.imag))
    diag = {}
    blocks = []
    for gs in spaces:
        blocks.extend(_split_gspace(G, T, gs, tol, rng, diag))
    blocks.sort(key=lambda b: b[0].sort_key)
    form = CanonicalForm(b[0] for b in blocks)
    P = np.concatenate([b[1] for b in blocks], axis=1)
    res_g, res_t = residuals(G, T, P, form)
    bound_g, bound_t = residual_bounds(G, T, P, tol)
    s = np.linalg.svd(P, compute_uv=False)
    diag.update({
        "bound_metric": bound_g,
        "bound_operator": bound_t,
        "cond_P": float(s[0] / s[-1]) if s[-1] > 0 else float("inf"),
    })
    dec = Decomposition(form, P, res_g, res_t, diag)
    problems = []
    if res_g > 10 * bound_g:
        problems.append(f"metric residual {res_g:.3g} exceeds {10 * bound_g:.3g}")
    if res_t > 10 * bound_t:
        problems.append(f"operator residual {res_t:.3g} exceeds {10 * bound_t:.3g}")
    if not s[-1] > tol.rank_tol * s[0]:
        problems.append("basis matrix is singular")
    if form.dim != n or form.index != op.space.index:
        problems.append(f"bookkeeping mismatch: dim {form.dim}/{n}, index {form.index}/{op.space.index}")
    if problems:
        raise NumericalFailure("; ".join(problems), partial=dec, diagnostics=diag)
    return dec
