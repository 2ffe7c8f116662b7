"""Seeded test instances: (G, T) pairs with a known canonical form, and isometries."""
from dataclasses import dataclass

import numpy as np

from .canonicalize import CanonicalForm, CycleTuple, canonical_metric, canonical_operator
from .errors import DomainError
from .linalg_core import DEFAULT_TOL, solve
from .operators import make_operator
from .scalar_product import make_space

MAX_REJECTIONS = 64


@dataclass(frozen=True, eq=False)
class Instance:
    space: object
    op: object
    Q: np.ndarray
    form: CanonicalForm


def haar_orthogonal(n, rng):
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def cond(Q):
    s = np.linalg.svd(Q, compute_uv=False)
    return float(s[0] / s[-1])


def scrambler_with_condition(n, condition, rng):
    """``U diag(s) V^T`` with singular values log-spaced from 1 to ``condition``."""
    if n == 1:
        return np.array([[1.0]])
    s = np.logspace(0.0, np.log10(condition), n)
    rng.shuffle(s)
    return haar_orthogonal(n, rng) @ np.diag(s) @ haar_orthogonal(n, rng).T


def random_scrambler(n, rng, conditioning=100.0):
    """Gaussian matrix with ``cond <= conditioning`` by rejection sampling.

    Falls back to a random SVD construction once the rejection budget is
    exhausted (small caps are rarely met by Gaussian draws).
    """
    if conditioning < 1:
        raise DomainError("conditioning cap must be >= 1")
    for _ in range(MAX_REJECTIONS):
        Q = rng.standard_normal((n, n))
        if cond(Q) <= conditioning:
            return Q
    if n == 1:
        return np.array([[1.0]])
    s = np.exp(rng.uniform(0.0, np.log(conditioning), n))
    s[0], s[-1] = 1.0, conditioning ** rng.uniform(0.0, 1.0)
    return haar_orthogonal(n, rng) @ np.diag(s) @ haar_orthogonal(n, rng).T


def from_scrambler(form, Q, tol=DEFAULT_TOL):
    """``G = Q^T G_can Q`` and ``T = Q^{-1} T_can Q``."""
    form = CanonicalForm(form)
    Gc, Tc = canonical_metric(form), canonical_operator(form)
    G = Q.T @ Gc @ Q
    G = (G + G.T) / 2
    T = solve(Q, Tc @ Q, tol)
    space = make_space(G, tol)
    return Instance(space, make_operator(space, T, tol), Q, form)


def generate(form, seed=0, conditioning=100.0, tol=DEFAULT_TOL):
    """Instance with canonical form ``form``; seed 0 means Q = I."""
    form = CanonicalForm(form)
    n = form.dim
    if seed == 0:
        Q = np.eye(n)
    else:
        Q = random_scrambler(n, np.random.default_rng(seed), conditioning)
    return from_scrambler(form, Q, tol)


def expm_series(A):
    """Matrix exponential by scaling and squaring with a Taylor series."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1) if A.size else 0.0
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    S = A / 2.0 ** squarings
    term = np.eye(n)
    out = np.eye(n)
    for k in range(1, 30):
        term = term @ S / k
        out = out + term
        if np.max(np.abs(term)) <= np.finfo(float).eps * np.max(np.abs(out)):
            break
    for _ in range(squarings):
        out = out @ out
    return out


def random_isometry(space, seed=0, max_norm=2.0):
    """``exp(A)`` for a random G-antisymmetric ``A`` (``G A`` antisymmetric); seed 0 gives I."""
    n = space.n
    if seed == 0 or n == 0:
        return np.eye(n)
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, n))
    S = S - S.T
    A = np.linalg.solve(space.G, S)
    norm = np.linalg.norm(A, 2)
    if norm > 0:
        A *= rng.uniform(0.1, 1.0) * max_norm / norm
    return expm_series(A)


# eigenvalue pools for random forms; spacing 1 keeps distinct clusters far apart
REAL_POOL = tuple(float(v) for v in range(-5, 6))
COMPLEX_POOL = tuple(complex(a, b) for a in range(-5, 6) for b in range(1, 6))


def random_form(rng, n_max=10, p_max=4, n_min=1, complex_prob=0.25):
    """Random canonical form with mixed cycle lengths and shared eigenvalues."""
    n = int(rng.integers(n_min, n_max + 1))
    real_pool = list(REAL_POOL)
    complex_pool = list(COMPLEX_POOL)
    tuples = []
    used = 0
    while used < n:
        room = n - used
        if room >= 2 and rng.random() < complex_prob:
            lam = complex_pool.pop(int(rng.integers(len(complex_pool))))
            # a complex eigenvalue may carry several cycles
            while room >= 2:
                p = int(rng.integers(1, min(p_max, room // 2) + 1))
                tuples.append(CycleTuple(lam, p, 1))
                used += 2 * p
                room -= 2 * p
                if room < 2 or rng.random() < 0.6:
                    break
        else:
            lam = real_pool.pop(int(rng.integers(len(real_pool))))
            while room >= 1:
                p = int(rng.integers(1, min(p_max, room) + 1))
                tuples.append(CycleTuple(lam, p, int(rng.choice([1, -1]))))
                used += p
                room -= p
                if room < 1 or rng.random() < 0.5:
                    break
    return CanonicalForm(tuples)


MINKOWSKI_VARIANTS = ("DiagonalizableReal", "ComplexPair", "Null2Block", "Null3Block")


def random_minkowski_form(rng, n_max=6, variant=None):
    """Random index-1 form of the requested (or a random) Minkowski variant."""
    if variant is None:
        variant = MINKOWSKI_VARIANTS[int(rng.integers(4))]
    lowest = {"DiagonalizableReal": 1, "ComplexPair": 2, "Null2Block": 2, "Null3Block": 3}[variant]
    n = int(rng.integers(max(lowest, 2), n_max + 1))
    pool = list(REAL_POOL)

    def spacelike(k):
        # eigenvalues may repeat, giving eigenspaces of dimension > 1
        return [CycleTuple(pool[int(rng.integers(len(pool)))], 1, 1) for _ in range(k)]

    if variant == "DiagonalizableReal":
        tuples = [CycleTuple(pool[int(rng.integers(len(pool)))], 1, -1)] + spacelike(n - 1)
    elif variant == "ComplexPair":
        lam = COMPLEX_POOL[int(rng.integers(len(COMPLEX_POOL)))]
        tuples = [CycleTuple(lam, 1, 1)] + spacelike(n - 2)
    elif variant == "Null2Block":
        tuples = [CycleTuple(pool[int(rng.integers(len(pool)))], 2, int(rng.choice([1, -1])))] + spacelike(n - 2)
    else:
        tuples = [CycleTuple(pool[int(rng.integers(len(pool)))], 3, 1)] + spacelike(n - 3)
    return CanonicalForm(tuples)
