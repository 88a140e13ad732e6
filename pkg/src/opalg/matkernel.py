"""Complex matrix substrate: Hermitian eigensolver, simultaneous
diagonalization of commuting normal families, operator and trace norms."""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NoConvergence, NotCommuting, NotHermitian, NotNormal


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerance for equality, positivity and degeneracy decisions.

    Checks against matrices are scaled by ``max(1, ||m||_F)`` so that the
    same ``eps`` works for unit-sized and moderately large inputs.
    """

    eps: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ValueError(f"tolerance must lie in (0, 1), got {self.eps}")


DEFAULT_TOL = Tolerance()


def as_tolerance(tol):
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


def as_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def adjoint(m):
    return np.conj(np.swapaxes(m, -1, -2))


def scale(m):
    return max(1.0, float(np.linalg.norm(m)))


def is_hermitian(m, tol=DEFAULT_TOL):
    tol = as_tolerance(tol)
    return np.linalg.norm(m - adjoint(m)) <= tol.eps * scale(m)


def commutator(a, b):
    return a @ b - b @ a


def is_normal(m, tol=DEFAULT_TOL):
    tol = as_tolerance(tol)
    return np.linalg.norm(commutator(m, adjoint(m))) <= tol.eps * scale(m) ** 2


def hermitian_eig(h, tol=DEFAULT_TOL):
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : (d, d) array_like
        Hermitian within ``tol``.
    tol : Tolerance or float

    Returns
    -------
    eigenvalues : (d,) ndarray, ascending
    u : (d, d) ndarray, unitary, columns are eigenvectors
    """
    tol = as_tolerance(tol)
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError("hermitian_eig needs a square matrix")
    if not is_hermitian(h, tol):
        raise NotHermitian(f"||h - h*|| = {np.linalg.norm(h - adjoint(h)):.3e}")
    h = 0.5 * (h + adjoint(h))
    w, v, sweeps = _kernels.jacobi_eigh_batch(h[None])
    w, u = w[0], v[0]
    if sweeps[0] < 0:
        raise NoConvergence("Jacobi sweep budget exhausted")
    resid = np.linalg.norm(adjoint(u) @ h @ u - np.diag(w))
    if resid > 10 * tol.eps * scale(h):
        raise NoConvergence(f"eigen-residual {resid:.3e} exceeds tolerance")
    return w, u


def hermitian_eig_batch(hs):
    """Batched eigen-decomposition of a ``(n, d, d)`` Hermitian stack.

    No validation; the caller owns hermiticity.  Raises ``NoConvergence`` if
    any item exhausts its sweep budget.
    """
    hs = np.asarray(hs, dtype=np.complex128)
    hs = 0.5 * (hs + adjoint(hs))
    w, v, sweeps = _kernels.jacobi_eigh_batch(hs)
    if np.any(sweeps < 0):
        raise NoConvergence(f"{int(np.sum(sweeps < 0))} items did not converge")
    return w, v


def clusters(values, gap):
    """Split ascending ``values`` wherever consecutive entries differ by >= gap."""
    groups = [[0]] if len(values) else []
    for i in range(1, len(values)):
        if values[i] - values[i - 1] < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simultaneous_diag(family, tol=DEFAULT_TOL, rng=0):
    """Find one unitary diagonalizing every member of a commuting normal family.

    Each member is split into its commuting Hermitian parts; a random real
    combination of all parts (drawn from ``rng``) is diagonalized and every
    cluster of near-equal eigenvalues is refined recursively with a fresh
    combination restricted to that eigenspace.
    """
    tol = as_tolerance(tol)
    mats = [as_matrix(a) for a in family]
    if not mats:
        raise ValueError("empty family")
    d = mats[0].shape[0]
    for a in mats:
        if a.shape != (d, d):
            raise ValueError("family members must share one square shape")
        if not is_normal(a, tol):
            raise NotNormal(f"||[a, a*]|| = {np.linalg.norm(commutator(a, adjoint(a))):.3e}")
    for i, a in enumerate(mats):
        for b in mats[i + 1:]:
            if np.linalg.norm(commutator(a, b)) > tol.eps * scale(a) * scale(b):
                raise NotCommuting(f"||[a, b]|| = {np.linalg.norm(commutator(a, b)):.3e}")

    parts = []
    for a in mats:
        re = 0.5 * (a + adjoint(a))
        im = -0.5j * (a - adjoint(a))
        for p in (re, im):
            nrm = np.linalg.norm(p)
            if nrm > tol.eps:
                parts.append(p / nrm)
    gen = _rng(rng)
    if not parts:
        u = np.eye(d, dtype=np.complex128)
    else:
        u = _refine(parts, np.eye(d, dtype=np.complex128), gen, tol, 0)

    for a in mats:
        t = adjoint(u) @ a @ u
        off = np.linalg.norm(t - np.diag(np.diag(t)))
        if off > 10 * tol.eps * scale(a):
            raise NoConvergence(f"off-diagonal mass {off:.3e} after simultaneous diagonalization")
    return u


def _refine(parts, basis, gen, tol, depth):
    k = basis.shape[1]
    if k == 1:
        return basis
    if depth > 4 * basis.shape[0] + 8:
        raise NoConvergence("degenerate-cluster refinement did not terminate")
    restricted = [adjoint(basis) @ p @ basis for p in parts]
    coeffs = gen.standard_normal(len(parts))
    combo = sum(c * r for c, r in zip(coeffs, restricted))
    w, u = hermitian_eig(0.5 * (combo + adjoint(combo)), tol)
    groups = clusters(w, 100 * tol.eps * max(1.0, float(np.max(np.abs(w)))))
    rotated = basis @ u
    if len(groups) == 1:
        # no split: the combination's own eigenvectors already resolve any
        # sub-tolerance structure
        return rotated
    cols = []
    for g in groups:
        sub = rotated[:, g]
        cols.append(sub if len(g) == 1 else _refine(parts, sub, gen, tol, depth + 1))
    return np.concatenate(cols, axis=1)


def _dilation(m):
    r, c = m.shape[-2:]
    out = np.zeros(m.shape[:-2] + (r + c, r + c), dtype=np.complex128)
    out[..., :r, r:] = m
    out[..., r:, :r] = adjoint(m)
    return out


def singular_values(m):
    """Singular values (descending) via the Hermitian dilation [[0, m], [m*, 0]]."""
    m = as_matrix(m)
    r, c = m.shape
    w, _ = hermitian_eig_batch(_dilation(m)[None])
    return w[0][::-1][: min(r, c)].clip(min=0.0)


def operator_norm(m):
    """Largest singular value of ``m``."""
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    w, _ = hermitian_eig_batch(_dilation(m)[None])
    return float(max(w[0][-1], 0.0))


def operator_norms(ms):
    """Operator norms of a stack ``(n, r, c)`` of matrices."""
    ms = np.asarray(ms, dtype=np.complex128)
    w, _ = hermitian_eig_batch(_dilation(ms))
    return np.maximum(w[:, -1], 0.0)


def trace_norm(m):
    """Sum of the singular values of ``m``."""
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    w, _ = hermitian_eig_batch(_dilation(m)[None])
    # dilation spectrum is {+-s_i} plus zeros
    return float(0.5 * np.sum(np.abs(w[0])))
