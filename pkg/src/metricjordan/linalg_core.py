"""Dense real/complex matrix helpers: tolerances, inertia, kernels, eigenvalues.

Matrices are plain numpy arrays. Every zero decision is relative to a scale,
by default the max-abs entry of the enclosing matrix.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NumericalFailure, SingularMatrixError


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = 1e-10
    eig_cluster_tol: float = 1e-8
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "eig_cluster_tol", "residual_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be strictly positive, got {value!r}")

    def as_dict(self):
        return {
            "rank_tol": self.rank_tol,
            "eig_cluster_tol": self.eig_cluster_tol,
            "residual_tol": self.residual_tol,
        }


DEFAULT_TOL = Tolerances()


class Inertia(NamedTuple):
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def dim(self):
        return self.n_plus + self.n_minus + self.n_zero

    @property
    def rank(self):
        return self.n_plus + self.n_minus

    @property
    def signature(self):
        return self.n_plus - self.n_minus


def max_abs(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def as_matrix(M, name="matrix", square=True):
    """Convert to a 2-d finite numpy array, checking shape."""
    A = np.asarray(M)
    if A.dtype.kind not in "fc":
        A = A.astype(float)
    if A.ndim != 2:
        raise DomainError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DomainError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError(f"{name} has non-finite entries")
    return A


def inertia_of_symmetric(M, tol=DEFAULT_TOL, scale=None):
    """Counts of positive, negative and zero eigenvalues of a symmetric matrix.

    Eigenvalues with ``|mu| <= rank_tol * scale`` count as zero; ``scale``
    defaults to the max-abs entry of ``M``.
    """
    M = as_matrix(M, "symmetric matrix")
    if np.iscomplexobj(M):
        if max_abs(M.imag) > tol.residual_tol * max(max_abs(M), 1e-300):
            raise DomainError("inertia requires a real matrix")
        M = M.real
    n = M.shape[0]
    if n == 0:
        return Inertia(0, 0, 0)
    m = max_abs(M)
    if max_abs(M - M.T) > tol.residual_tol * m:
        raise DomainError(f"matrix is not symmetric (asymmetry {max_abs(M - M.T):.3g})")
    if scale is None:
        scale = m
    mu = np.linalg.eigvalsh((M + M.T) / 2)
    thr = tol.rank_tol * scale
    n_plus = int(np.sum(mu > thr))
    n_minus = int(np.sum(mu < -thr))
    return Inertia(n_plus, n_minus, n - n_plus - n_minus)


def rank_and_kernel(M, tol=DEFAULT_TOL, scale=None):
    """Numerical rank and an orthonormal kernel basis (as columns).

    Rectangular input is accepted; the kernel lives in the column space
    dimension. Singular values ``<= rank_tol * scale`` are treated as zero.
    """
    M = as_matrix(M, square=False)
    rows, cols = M.shape
    if scale is None:
        scale = max_abs(M)
    if rows == 0 or cols == 0:
        return 0, np.eye(cols, dtype=M.dtype)
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol.rank_tol * scale))
    kernel = vh[rank:].conj().T
    return rank, kernel


def solve(M, rhs, tol=DEFAULT_TOL):
    """Solve ``M X = rhs`` by LU with partial pivoting."""
    M = as_matrix(M)
    rhs = np.asarray(rhs)
    s = np.linalg.svd(M, compute_uv=False) if M.size else np.ones(0)
    if M.size and s[-1] <= tol.rank_tol * s[0]:
        raise SingularMatrixError(f"matrix is singular within tolerance (cond ~ {s[0] / max(s[-1], 1e-300):.3g})")
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc


def hessenberg(M):
    """Householder reduction to upper Hessenberg form (complex arithmetic)."""
    H = np.array(as_matrix(M), dtype=complex)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        # normalize first so subnormal entries do not underflow in abs()
        v = x / alpha
        a0 = abs(v[0])
        phase = v[0] / a0 if a0 > 0 else 1.0
        v[0] += phase
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closer to d
    tr = (a + d) / 2
    disc = np.sqrt(((a - d) / 2) ** 2 + b * c)
    mu1, mu2 = tr + disc, tr - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def _qr_step(H, mu):
    """One explicit-shift QR sweep on a Hessenberg block, in place."""
    m = H.shape[0]
    H -= mu * np.eye(m)
    rots = []
    for k in range(m - 1):
        a, b = H[k, k], H[k + 1, k]
        big = max(abs(a.real), abs(a.imag), abs(b.real), abs(b.imag))
        if big == 0.0:
            c, s = 1.0, 0.0
        else:
            a, b = a / big, b / big
            r = np.hypot(abs(a), abs(b))
            c, s = a / r, b / r
        rots.append((c, s))
        rk, rk1 = H[k, k:].copy(), H[k + 1, k:].copy()
        H[k, k:] = c.conjugate() * rk + s.conjugate() * rk1
        H[k + 1, k:] = -s * rk + c * rk1
    for k, (c, s) in enumerate(rots):
        top = min(k + 2, m - 1) + 1
        ck, ck1 = H[:top, k].copy(), H[:top, k + 1].copy()
        H[:top, k] = c * ck + s * ck1
        H[:top, k + 1] = -s.conjugate() * ck + c.conjugate() * ck1
    H += mu * np.eye(m)


def qr_eigenvalues(M, max_sweeps=None):
    """All eigenvalues of a square matrix by Hessenberg + shifted QR.

    Raises NumericalFailure (carrying the eigenvalues found so far) when the
    iteration cap of ``100 n`` sweeps is exhausted.
    """
    H = hessenberg(M)
    n = H.shape[0]
    if max_sweeps is None:
        max_sweeps = 100 * max(n, 1)
    eps = np.finfo(float).eps
    # absolute floor keeps deflation working near a zero eigenvalue
    floor = eps * (np.max(np.abs(H)) if n else 0.0)
    found = []
    hi = n - 1
    sweeps = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            found.append(H[0, 0])
            break
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            if sub <= max(eps * (abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])), floor):
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            found.append(H[hi, hi])
            hi -= 1
            since_deflation = 0
            continue
        if sweeps >= max_sweeps:
            raise NumericalFailure(
                "QR iteration did not converge",
                partial=np.array(found),
                diagnostics={"sweeps": sweeps, "unconverged": hi + 1},
            )
        block = H[lo:hi + 1, lo:hi + 1]
        if since_deflation and since_deflation % 11 == 0:
            # exceptional shift breaks cycling
            mu = block[-1, -1] + abs(block[-1, -2]) * (0.75 + 0.5j)
        else:
            mu = _wilkinson_shift(block[-2, -2], block[-2, -1], block[-1, -2], block[-1, -1])
        _qr_step(block, mu)
        H[lo:hi + 1, lo:hi + 1] = block
        sweeps += 1
        since_deflation += 1
    return np.array(found[::-1], dtype=complex)


def _single_linkage(points, radius):
    """Connected components of the graph ``|x - y| <= radius``."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _split_longest_edge(points):
    """Cut the longest edge of the Euclidean minimum spanning tree.

    Returns (edge length, [indices of part A], [indices of part B]).
    """
    n = len(points)
    pts = np.asarray(points)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    dist = np.abs(pts - pts[0])
    link = np.zeros(n, dtype=int)
    edges = []
    for _ in range(n - 1):
        d = np.where(in_tree, np.inf, dist)
        j = int(np.argmin(d))
        edges.append((float(d[j]), int(link[j]), j))
        in_tree[j] = True
        closer = np.abs(pts - pts[j]) < dist
        dist = np.where(closer, np.abs(pts - pts[j]), dist)
        link = np.where(closer, j, link)
    longest = max(edges)
    adj = {i: [] for i in range(n)}
    for e in edges:
        if e is longest:
            continue
        adj[e[1]].append(e[2])
        adj[e[2]].append(e[1])
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    part_a = sorted(seen)
    part_b = [i for i in range(n) if i not in seen]
    return longest[0], part_a, part_b


def _cluster_value(members, tol):
    mean = complex(np.mean(members))
    spread = max(abs(z - mean) for z in members)
    if abs(mean.imag) <= max(tol.eig_cluster_tol, spread):
        mean = complex(mean.real, 0.0)
    return mean


def cluster_eigenvalues(values, tol=DEFAULT_TOL, accept=None, norm=None, with_members=False):
    """Group computed eigenvalues into (value, multiplicity) pairs.

    Without ``accept`` this is single linkage at radius ``eig_cluster_tol``.
    With ``accept(value, m) -> bool`` the grouping is divisive: starting from
    all values, a group of m values is kept when its spread is within
    ``max(eig_cluster_tol, (rank_tol * norm)^(1/m) * rho^(1 - 1/m))`` (``norm``
    is the matrix max-abs entry, ``rho`` the largest value magnitude) and
    ``accept`` confirms it; otherwise its
    longest minimum-spanning-tree edge is cut and both parts are examined.
    Edges shorter than ``eig_cluster_tol`` are never cut. This lets the
    scattered eigenvalues of a defective block stay together while distinct
    eigenvalues separate.

    Cluster values are member means, made real when ``|Im|`` is within
    ``max(eig_cluster_tol, cluster spread)``; non-real clusters are paired
    with their conjugates.
    """
    values = [complex(v) for v in np.asarray(values, dtype=complex)]
    if not values:
        return []
    if accept is None:
        groups = [[values[i] for i in g] for g in _single_linkage(values, tol.eig_cluster_tol)]
    else:
        rho = max(1.0, max(abs(v) for v in values))
        norm = max(rho, norm or 0.0)
        groups = []
        pending = [values]
        while pending:
            pts = pending.pop()
            mean = _cluster_value(pts, tol)
            # an m-fold eigenvalue under a perturbation of size rank_tol * norm
            # scatters by about (rank_tol * norm)^(1/m) rho^(1 - 1/m)
            m = len(pts)
            radius = max(tol.eig_cluster_tol, (tol.rank_tol * norm) ** (1.0 / m) * rho ** (1.0 - 1.0 / m))
            spread = max(abs(z - complex(np.mean(pts))) for z in pts)
            if spread <= radius and accept(mean, len(pts)):
                groups.append(pts)
                continue
            if len(pts) == 1:
                raise NumericalFailure("eigenvalue cluster rejected by multiplicity check",
                                       partial=groups, diagnostics={"value": pts[0]})
            length, a, b = _split_longest_edge(pts)
            if length <= tol.eig_cluster_tol:
                raise NumericalFailure("eigenvalue cluster rejected by multiplicity check",
                                       partial=groups,
                                       diagnostics={"value": _cluster_value(pts, tol), "size": len(pts)})
            pending.append([pts[i] for i in a])
            pending.append([pts[i] for i in b])

    clusters = []
    for g in groups:
        mean = _cluster_value(g, tol)
        spread = max(abs(z - mean) for z in g)
        clusters.append((mean, len(g), g, spread))

    real = [c for c in clusters if c[0].imag == 0.0]
    upper = [c for c in clusters if c[0].imag > 0]
    lower = [c for c in clusters if c[0].imag < 0]
    summary = [(c[0], c[1]) for c in clusters]
    scale = max(abs(v) for v in values)
    paired = []
    for lam, m, g, spread in upper:
        if not lower:
            raise NumericalFailure("complex eigenvalue without conjugate partner",
                                   partial=summary, diagnostics={"eigenvalue": lam})
        k = int(np.argmin([abs(lam.conjugate() - c[0]) for c in lower]))
        mu, m2, g2, spread2 = lower.pop(k)
        gap = abs(lam.conjugate() - mu)
        if m2 != m or gap > max(tol.eig_cluster_tol, spread + spread2, np.sqrt(tol.rank_tol) * scale):
            raise NumericalFailure("conjugate pairing failed", partial=summary,
                                   diagnostics={"eigenvalue": lam, "partner": mu, "multiplicities": (m, m2)})
        avg = (lam + mu.conjugate()) / 2
        paired.append((avg, m, g))
        paired.append((avg.conjugate(), m, g2))
    if lower:
        raise NumericalFailure("unpaired complex eigenvalues", partial=summary,
                               diagnostics={"unpaired": [c[0] for c in lower]})
    out = [c[:3] for c in real] + paired
    out.sort(key=lambda c: (c[0].real, c[0].imag))
    if with_members:
        return out
    return [(c[0], c[1]) for c in out]


def chain_bases(U, tol=DEFAULT_TOL, scale=None):
    """Orthonormal bases of N(U), N(U^2), ... until the dimension stabilizes.

    N(U^k) is computed as the kernel of ``(I - P_{k-1}) U`` with ``P_{k-1}``
    the orthogonal projector onto N(U^{k-1}), so no matrix power is formed.
    Returns the strictly increasing list of bases (empty if U is nonsingular).
    """
    n = U.shape[0]
    if scale is None:
        scale = max_abs(U)
    thr = tol.rank_tol * scale
    bases = []
    prev = np.zeros((n, 0), dtype=U.dtype)
    while True:
        M = U - prev @ (prev.conj().T @ U)
        _, s, vh = np.linalg.svd(M)
        rank = int(np.sum(s > thr))
        basis = vh[rank:].conj().T
        if basis.shape[1] <= prev.shape[1]:
            return bases
        bases.append(basis)
        prev = basis
        if basis.shape[1] == n:
            return bases


def shifted(M, lam):
    """``M - lam I``, kept real when ``lam`` is real."""
    lam = complex(lam)
    if lam.imag == 0.0:
        return M - lam.real * np.eye(M.shape[0])
    return M - lam * np.eye(M.shape[0])


def generalized_kernel_dim(M, lam, tol=DEFAULT_TOL):
    """Dimension of the generalized eigenspace of M at ``lam`` (0 if not an eigenvalue)."""
    bases = chain_bases(shifted(M, lam), tol, max(max_abs(M), abs(lam)))
    return bases[-1].shape[1] if bases else 0


def eigenvalues(M, tol=DEFAULT_TOL, with_members=False):
    """Clustered eigenvalues ``[(value, multiplicity), ...]`` of a square matrix.

    Raw eigenvalues come from Hessenberg + shifted QR. Clusters are confirmed
    by comparing their size with the generalized kernel dimension at the
    cluster mean (see :func:`cluster_eigenvalues`). With ``with_members``
    each entry also carries the raw eigenvalues of its cluster.
    """
    M = as_matrix(M)
    if M.shape[0] == 0:
        return []
    raw = qr_eigenvalues(M)
    return cluster_eigenvalues(raw, tol, accept=lambda lam, m: generalized_kernel_dim(M, lam, tol) == m,
                               norm=max_abs(M), with_members=with_members)
