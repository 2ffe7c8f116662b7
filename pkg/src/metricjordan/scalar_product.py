"""Real scalar product spaces and skew-normal sequences."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetricError, DegenerateRestrictionError, DomainError
from .linalg_core import DEFAULT_TOL, Inertia, as_matrix, inertia_of_symmetric, max_abs


@dataclass(frozen=True, eq=False)
class ScalarProductSpace:
    """A nondegenerate symmetric metric ``G`` on R^n; build with :func:`make_space`."""

    G: np.ndarray
    index: int
    inertia: Inertia = field(repr=False)

    @property
    def n(self):
        return self.G.shape[0]


def make_space(G, tol=DEFAULT_TOL):
    G = as_matrix(G, "metric")
    if np.iscomplexobj(G):
        raise DomainError("metric must be real")
    inertia = inertia_of_symmetric(G, tol)
    if inertia.n_zero:
        raise DegenerateMetricError(f"metric is degenerate at rank_tol (inertia {tuple(inertia)})")
    G = (G + G.T) / 2
    G.setflags(write=False)
    return ScalarProductSpace(G, inertia.n_minus, inertia)


def minkowski(n):
    return make_space(np.diag([-1.0] + [1.0] * (n - 1)))


def _vec(space, x, name="vector"):
    x = np.asarray(x)
    if x.shape != (space.n,):
        raise DomainError(f"{name} must have shape ({space.n},), got {x.shape}")
    return x


def scalar_prod(space, x, y):
    """Bilinear (not Hermitian) product ``x^T G y``; complex vectors allowed."""
    x, y = _vec(space, x, "x"), _vec(space, y, "y")
    return x @ space.G @ y


def classify_vector(space, x, tol=DEFAULT_TOL):
    x = _vec(space, np.asarray(x, dtype=float))
    norm2 = float(x @ x)
    if norm2 == 0.0:
        raise DomainError("cannot classify the zero vector")
    q = float(x @ space.G @ x)
    band = tol.rank_tol * max_abs(space.G) * norm2
    if q < -band:
        return "timelike"
    if q > band:
        return "spacelike"
    return "lightlike"


@dataclass(frozen=True, eq=False)
class SkewNormalSequence:
    vectors: np.ndarray  # columns v_1..v_p
    sign: int

    @property
    def p(self):
        return self.vectors.shape[1]


def skew_pattern(p, eps=1):
    return eps * np.fliplr(np.eye(p))


def _columns(space, vectors):
    V = np.asarray(vectors)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != space.n:
        # sequence given as a list of vectors
        V = np.stack([_vec(space, v) for v in vectors], axis=1)
    return V


def check_skew_normal(space, vectors, tol=DEFAULT_TOL):
    """Sign of the skew-normal Gram pattern, or None if the pattern fails."""
    V = _columns(space, vectors)
    p = V.shape[1]
    if not 1 <= p <= space.n:
        return None
    gram = V.T @ space.G @ V
    scale = max(max_abs(space.G) * max_abs(V) ** 2, np.finfo(float).tiny)
    lead = gram[0, p - 1]
    for eps in (1, -1):
        if abs(lead - eps) <= tol.residual_tol * scale:
            if max_abs(gram - skew_pattern(p, eps)) <= tol.residual_tol * scale:
                return eps
    return None


def skew_normal_index(p, eps):
    """Inertia of the span of a skew-normal sequence of length p and sign eps."""
    if p < 1 or eps not in (1, -1):
        raise DomainError("need p >= 1 and eps in {+1, -1}")
    half = (p + 1) // 2
    n_minus = half if eps == -1 else p - half
    return Inertia(p - n_minus, n_minus, 0)


def skew_to_orthogonal(space, seq, tol=DEFAULT_TOL):
    """Orthogonalize a skew-normal sequence by pairing v_i with v_{p+1-i}.

    Returns columns whose Gram is ``diag(eps, ..., eps, -eps, ..., -eps)``
    with ``(p + 1) // 2`` leading ``eps`` entries.
    """
    V = _columns(space, seq.vectors)
    eps = check_skew_normal(space, V, tol)
    if eps is None or eps != seq.sign:
        raise DomainError("input is not a skew-normal sequence of the stated sign")
    p = V.shape[1]
    out = np.empty_like(V)
    r = np.sqrt(0.5)
    for i in range(p):
        j = p - 1 - i
        if i < j:
            out[:, i] = r * (V[:, i] + V[:, j])
        elif i > j:
            out[:, i] = r * (V[:, i] - V[:, j])
        else:
            out[:, i] = V[:, i]
    return out


def orthogonal_complement(space, H_basis, tol=DEFAULT_TOL):
    """Basis of ``{x : x^T G h = 0 for all h in H}`` as orthonormal columns."""
    H = np.asarray(H_basis)
    if H.ndim == 1:
        H = H[:, None]
    if H.shape[0] != space.n:
        raise DomainError(f"H_basis must have {space.n} rows")
    k = H.shape[1]
    if k == 0:
        return np.eye(space.n)
    gram = H.T @ space.G @ H
    if np.iscomplexobj(gram):
        raise DomainError("orthogonal_complement expects a real basis")
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] <= tol.rank_tol * s[0]:
        raise DomainError("H_basis columns are dependent")
    g_in = inertia_of_symmetric(gram, tol, scale=max_abs(space.G) * s[0] ** 2)
    if g_in.n_zero:
        raise DegenerateRestrictionError(f"metric restricted to H is degenerate (inertia {tuple(g_in)})")
    _, _, vh = np.linalg.svd(H.T @ space.G)
    return vh[k:].T
