"""Projections from a dense operator sequence.

Self-adjoint parts of the items are pushed through the step function that
is 0 below 1/2 and 1 above; items with spectrum in a guard band around 1/2
are skipped.  Flag sequences take joins of rank-one projections.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NetTooCoarse, NotHermitian, NotRankOne, SpectralGapViolation
from .matkernel import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    as_tolerance,
    hermitian_eig,
    hermitian_eig_batch,
    is_hermitian,
    operator_norm,
)

CHUNK = 1 << 16


def nearest_projection(s, tol=DEFAULT_TOL):
    """Spectral projection of ``s`` for the eigenvalues above 1/2."""
    tol = as_tolerance(tol)
    s = as_matrix(s)
    if not is_hermitian(s, tol):
        raise NotHermitian("nearest_projection needs a self-adjoint input")
    w, u = hermitian_eig(s, tol)
    close = np.abs(w - 0.5) <= 10 * tol.eps
    if close.any():
        raise SpectralGapViolation(f"eigenvalue {w[close][0]:.12g} within the guard band of 1/2")
    v = u[:, w > 0.5]
    return v @ adjoint(v)


@dataclass(frozen=True)
class DenseProjections:
    indices: np.ndarray  # positions in the input sequence
    projections: np.ndarray  # (n, d, d)
    skipped: tuple  # (index, reason) pairs

    def __len__(self):
        return len(self.indices)

    def unique(self, decimals=8):
        """Distinct emitted projections, first occurrence kept."""
        keys = np.round(self.projections.reshape(len(self), -1), decimals)
        keys = np.concatenate([keys.real, keys.imag], axis=1) + 0.0  # drop signed zeros
        _, first = np.unique(keys, axis=0, return_index=True)
        first = np.sort(first)
        return self.indices[first], self.projections[first]


def dense_projections(items, eps, tol=DEFAULT_TOL):
    """Emit ``f(S_n)`` for ``S_n = (T_n + T_n*)/2`` away from the 1/2 guard band.

    ``items`` is an ``(n, d, d)`` array or a sequence of matrices; it is
    processed in chunks through the batched eigensolver.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    tol = as_tolerance(tol)
    items = np.asarray(items, dtype=np.complex128)
    if items.ndim != 3 or items.shape[1] != items.shape[2]:
        raise ValueError("items must be a stack of square matrices")
    n, d, _ = items.shape
    keep_idx, keep_p, skipped = [], [], []
    for start in range(0, n, CHUNK):
        t = items[start:start + CHUNK]
        s = 0.5 * (t + adjoint(t))
        w, u = hermitian_eig_batch(s)
        bad = np.any(np.abs(w - 0.5) <= 10 * tol.eps, axis=1)
        for i in np.nonzero(bad)[0]:
            skipped.append((start + int(i), "eigenvalue within the guard band of 1/2"))
        good = ~bad
        mask = (w[good] > 0.5).astype(float)
        ug = u[good]
        p = np.einsum("nik,nk,njk->nij", ug, mask, np.conj(ug))
        keep_idx.append(start + np.nonzero(good)[0])
        keep_p.append(p)
    idx = np.concatenate(keep_idx) if keep_idx else np.zeros(0, dtype=int)
    proj = np.concatenate(keep_p) if keep_p else np.zeros((0, d, d), dtype=np.complex128)
    return DenseProjections(idx, proj, tuple(skipped))


def selfadjoint_ball_net_m2(eps):
    """Finite ``eps``-net (operator norm) of the self-adjoint unit ball of ``M_2``.

    Writes ``S = a 1 + v . sigma``; then ``||S|| = |a| + |v|`` and distances
    split as ``|da| + |dv|``.  A grid in ``a`` of step ``h_a`` and a cubic
    grid in ``v`` of step ``h_v`` have covering radius
    ``h_a/2 + sqrt(3) h_v/2``, chosen here just under ``eps``.
    """
    h_a = 0.6 * eps
    h_v = 0.8 * eps
    assert h_a / 2 + np.sqrt(3) * h_v / 2 < eps
    a_vals = np.arange(-1.0, 1.0 + h_a, h_a)
    v_1d = np.arange(-1.0, 1.0 + h_v, h_v)
    vx, vy, vz = np.meshgrid(v_1d, v_1d, v_1d, indexing="ij")
    v = np.stack([vx.ravel(), vy.ravel(), vz.ravel()], axis=1)
    vn = np.linalg.norm(v, axis=1)
    v, vn = v[vn <= 1.0 + eps], vn[vn <= 1.0 + eps]
    slack = 1.0 + eps
    out = []
    for a in a_vals:
        sel = v[np.abs(a) + vn <= slack]
        m = np.empty((len(sel), 2, 2), dtype=np.complex128)
        m[:, 0, 0] = a + sel[:, 2]
        m[:, 1, 1] = a - sel[:, 2]
        m[:, 0, 1] = sel[:, 0] - 1j * sel[:, 1]
        m[:, 1, 0] = sel[:, 0] + 1j * sel[:, 1]
        out.append(m)
    return np.concatenate(out)


@dataclass(frozen=True)
class FlagSequence:
    flags: tuple  # Q_1, ..., Q_N
    stabilization: int  # first n (1-based) with Q_n = Q_N
    differences: tuple  # (n, Q_{n+1} - Q_n) for the nonzero increments, n from 0 with Q_0 = 0


def _rank_one_vector(p, tol):
    p = as_matrix(p)
    if not is_hermitian(p, tol):
        raise NotRankOne("input is not self-adjoint")
    w, u = hermitian_eig(p, tol)
    ok = abs(w[-1] - 1) <= 10 * tol.eps and np.all(np.abs(w[:-1]) <= 10 * tol.eps)
    if not ok:
        raise NotRankOne(f"spectrum {np.round(w, 6)} is not that of a rank-one projection")
    return u[:, -1]


def flag_sequence(projections, tol=DEFAULT_TOL):
    """Joins ``Q_n`` of the first n rank-one projections, by orthonormalizing ranges."""
    tol = as_tolerance(tol)
    projections = list(projections)
    if not projections:
        raise ValueError("empty projection list")
    d = as_matrix(projections[0]).shape[0]
    frame = np.zeros((d, 0), dtype=np.complex128)
    q = np.zeros((d, d), dtype=np.complex128)
    flags, diffs = [], []
    last_growth = 0
    for n, p in enumerate(projections, start=1):
        v = _rank_one_vector(p, tol)
        r = v
        for _ in range(2):
            r = r - frame @ (adjoint(frame) @ r)
        nr = np.linalg.norm(r)
        if nr > 1e3 * tol.eps:
            r = r / nr
            frame = np.concatenate([frame, r[:, None]], axis=1)
            dq = np.outer(r, np.conj(r))
            q = q + dq
            diffs.append((n - 1, dq))
            last_growth = n
        flags.append(q.copy())
    return FlagSequence(tuple(flags), max(last_growth, 1), tuple(diffs))


def operator_distance(x, y):
    return operator_norm(as_matrix(x) - as_matrix(y))


def epsilon_discrete_index(points, net, eps, distance=operator_distance):
    """Least net index within ``eps/2`` of each point.

    For points pairwise at distance ``>= eps`` the map is injective: one net
    element cannot be within ``eps/2`` of two of them.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    net = list(net)
    out = []
    for i, x in enumerate(points):
        for n, y in enumerate(net):
            if distance(x, y) < eps / 2:
                out.append(n)
                break
        else:
            raise NetTooCoarse(f"point {i} has no net element within {eps / 2}")
    return out
