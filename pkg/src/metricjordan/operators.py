"""Self-adjoint operators, generalized eigenspaces, kernel chains and cycles."""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotSelfAdjointError, NumericalFailure
from .linalg_core import DEFAULT_TOL, as_matrix, chain_bases, eigenvalues, max_abs
from .linalg_core import shifted as _shifted
from .scalar_product import ScalarProductSpace, make_space


@dataclass(frozen=True, eq=False)
class SelfAdjointOperator:
    space: ScalarProductSpace
    T: np.ndarray

    @property
    def G(self):
        return self.space.G

    @property
    def n(self):
        return self.space.n


def asymmetry(G, T):
    GT = G @ T
    return max_abs(GT - GT.T)


def make_operator(space, T, tol=DEFAULT_TOL):
    """Bind ``T`` to ``space`` after checking that ``G T`` is symmetric."""
    if not isinstance(space, ScalarProductSpace):
        space = make_space(space, tol)
    T = as_matrix(T, "operator")
    if np.iscomplexobj(T):
        raise DomainError("operator must be real")
    if T.shape != space.G.shape:
        raise DomainError(f"operator shape {T.shape} does not match metric {space.G.shape}")
    gap = asymmetry(space.G, T)
    bound = tol.residual_tol * np.linalg.norm(space.G, 2) * np.linalg.norm(T, 2) if T.size else 0.0
    if gap > bound:
        raise NotSelfAdjointError(f"G T is not symmetric (asymmetry {gap:.3g} > {bound:.3g})", gap)
    T = np.array(T, dtype=float)
    T.setflags(write=False)
    return SelfAdjointOperator(space, T)


def operator_scale(T, lam=0.0):
    return max(max_abs(T), abs(lam))


def kernel_chain(op, lam, tol=DEFAULT_TOL):
    """Dimensions of N((T - lam I)^k) for k = 1, 2, ... until stable."""
    U = _shifted(op.T, lam)
    return [b.shape[1] for b in chain_bases(U, tol, operator_scale(op.T, lam))]


@dataclass(frozen=True, eq=False)
class GeneralizedEigenspace:
    eigenvalue: complex
    basis: np.ndarray  # orthonormal columns spanning K_lambda (complex when Im > 0)
    kernel_chain: tuple
    chain: tuple = ()  # bases of N(U^k), k = 1..depth

    @property
    def depth(self):
        return len(self.kernel_chain)

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def is_real(self):
        return self.eigenvalue.imag == 0.0


def _gspace(T, lam, m, tol, scale):
    bases = chain_bases(_shifted(T, lam), tol, scale)
    if not bases or bases[-1].shape[1] != m:
        return None
    B = bases[-1]
    refined = complex(np.trace(B.conj().T @ T @ B) / m)
    if lam.imag == 0.0:
        refined = complex(refined.real, 0.0)
    return GeneralizedEigenspace(refined, B, tuple(b.shape[1] for b in bases), tuple(bases))


def generalized_eigenspaces(op, tol=DEFAULT_TOL):
    """One generalized eigenspace per eigenvalue with ``Im >= 0``.

    Each space is the stabilized kernel chain at the clustered eigenvalue;
    its dimension must equal the algebraic multiplicity and the dimensions
    (conjugate spaces counted twice) must add up to n.
    """
    T = op.T
    n = T.shape[0]
    if n == 0:
        return []
    out = []
    for lam, m in eigenvalues(T, tol):
        if lam.imag < 0:
            continue
        gs = _gspace(T, lam, m, tol, operator_scale(T, lam))
        if gs is None:
            raise NumericalFailure(
                "generalized eigenspace dimension disagrees with multiplicity",
                partial=out, diagnostics={"eigenvalue": lam, "multiplicity": m})
        out.append(gs)
    total = sum(g.dim * (1 if g.is_real else 2) for g in out)
    if total != n:
        raise NumericalFailure("generalized eigenspaces do not fill the space",
                               partial=out, diagnostics={"total": total, "n": n})
    return out


def gspace_at(op, lam, tol=DEFAULT_TOL):
    """The computed generalized eigenspace nearest to ``lam``."""
    lam = complex(lam)
    if lam.imag < 0:
        lam = lam.conjugate()
    spaces = generalized_eigenspaces(op, tol)
    return min(spaces, key=lambda g: abs(g.eigenvalue - lam))


@dataclass(frozen=True, eq=False)
class Cycle:
    eigenvalue: complex
    generator: np.ndarray
    vectors: np.ndarray  # columns v_1..v_p with v_i = U^{p-i} x

    @property
    def p(self):
        return self.vectors.shape[1]


def cycle_vectors(U, x, p):
    """Columns ``U^{p-1} x, ..., U x, x``."""
    cols = [x]
    for _ in range(p - 1):
        cols.append(U @ cols[-1])
    return np.stack(cols[::-1], axis=1)


def cycle_from_generator(op, lam, x, tol=DEFAULT_TOL):
    """The cycle generated by ``x`` in K_lam.

    The length p is the least k with x in N(U^k), decided by projecting x
    onto the computed kernel-chain bases.
    """
    lam = complex(lam)
    x = np.asarray(x)
    if x.shape != (op.n,):
        raise DomainError(f"generator must have shape ({op.n},)")
    nx = np.linalg.norm(x)
    if not np.all(np.isfinite(x)) or nx <= np.finfo(float).tiny:
        raise DomainError("generator is numerically zero")
    U = _shifted(op.T, lam)
    bases = chain_bases(U, tol, operator_scale(op.T, lam))
    p = None
    for k, B in enumerate(bases, start=1):
        if np.linalg.norm(x - B @ (B.conj().T @ x)) <= tol.residual_tol * nx:
            p = k
            break
    if p is None:
        raise DomainError("generator does not lie in the generalized eigenspace")
    if lam.imag == 0.0 and not np.iscomplexobj(x):
        U = U.real
    return Cycle(lam, x, cycle_vectors(U, x, p))
