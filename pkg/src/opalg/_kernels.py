"""Hot numerical kernels.

Every kernel exists twice: a numba ``@njit`` version and a vectorized numpy
version with the same sweep order.  ``OPALG_DISABLE_NUMBA=1`` (or a missing
numba install) selects the numpy path at import time; both stay importable
so the benchmark can compare them in one process.
"""
import os

import numpy as np

_FLAG = os.environ.get("OPALG_DISABLE_NUMBA", "").strip().lower()

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")

# Off-diagonal Frobenius mass, relative to the input's Frobenius norm, at
# which a Jacobi iteration counts as converged.
CONVERGENCE_RTOL = 1e-14
MAX_SWEEPS = 60


def _jacobi_batch_py(hs, max_sweeps, rtol):
    """Cyclic complex Jacobi over a stack of Hermitian matrices (numpy)."""
    a = np.array(hs, dtype=np.complex128, copy=True)
    n, d, _ = a.shape
    v = np.broadcast_to(np.eye(d, dtype=np.complex128), (n, d, d)).copy()
    sweeps = np.zeros(n, dtype=np.int64)
    frob = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    iu = np.triu_indices(d, 1)

    def off_norm(x):
        return np.sqrt(2.0 * np.sum(np.abs(x[:, iu[0], iu[1]]) ** 2, axis=1))

    active = off_norm(a) > rtol * frob
    it = 0
    while active.any():
        if it >= max_sweeps:
            sweeps[active] = -1
            break
        idx = np.nonzero(active)[0]
        sa, sv = a[idx], v[idx]
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = sa[:, p, q]
                r = np.abs(apq)
                nz = r > 0.0
                rs = np.where(nz, r, 1.0)
                phase = np.where(nz, apq / rs, 1.0)
                theta = (sa[:, q, q].real - sa[:, p, p].real) / (2.0 * rs)
                big = np.abs(theta) > 1e150
                safe = np.where(big, 1.0, theta)
                t = 1.0 / (np.abs(safe) + np.sqrt(safe * safe + 1.0))
                t = np.where(safe < 0.0, -t, t)
                t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cph = np.conj(phase)
                c_, s_ = c[:, None], s[:, None]
                ph_, cph_ = phase[:, None], cph[:, None]
                colp, colq = sa[:, :, p].copy(), sa[:, :, q].copy()
                sa[:, :, p] = c_ * colp - s_ * cph_ * colq
                sa[:, :, q] = s_ * colp + c_ * cph_ * colq
                rowp, rowq = sa[:, p, :].copy(), sa[:, q, :].copy()
                sa[:, p, :] = c_ * rowp - s_ * ph_ * rowq
                sa[:, q, :] = s_ * rowp + c_ * ph_ * rowq
                sa[:, p, q] = 0.0
                sa[:, q, p] = 0.0
                sa[:, p, p] = sa[:, p, p].real
                sa[:, q, q] = sa[:, q, q].real
                vp, vq = sv[:, :, p].copy(), sv[:, :, q].copy()
                sv[:, :, p] = c_ * vp - s_ * cph_ * vq
                sv[:, :, q] = s_ * vp + c_ * cph_ * vq
        a[idx], v[idx] = sa, sv
        it += 1
        sweeps[idx] = it
        active = off_norm(a) > rtol * frob
    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v, sweeps


if HAS_NUMBA:

    @njit(cache=True)
    def _jacobi_batch_nb(hs, max_sweeps, rtol):
        n, d, _ = hs.shape
        w_out = np.empty((n, d))
        v_out = np.empty((n, d, d), dtype=np.complex128)
        sweeps = np.zeros(n, dtype=np.int64)
        for k in range(n):
            a = hs[k].copy()
            v = np.eye(d, dtype=np.complex128)
            frob = 0.0
            for i in range(d):
                for j in range(d):
                    frob += abs(a[i, j]) ** 2
            frob = np.sqrt(frob)
            it = 0
            while True:
                off = 0.0
                for i in range(d - 1):
                    for j in range(i + 1, d):
                        off += 2.0 * abs(a[i, j]) ** 2
                if np.sqrt(off) <= rtol * frob:
                    break
                if it >= max_sweeps:
                    it = -1
                    break
                for p in range(d - 1):
                    for q in range(p + 1, d):
                        apq = a[p, q]
                        r = abs(apq)
                        if r == 0.0:
                            continue
                        phase = apq / r
                        theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                        if abs(theta) > 1e150:
                            t = 0.5 / theta
                        else:
                            t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                            if theta < 0.0:
                                t = -t
                        c = 1.0 / np.sqrt(t * t + 1.0)
                        s = t * c
                        cph = np.conj(phase)
                        for i in range(d):
                            aip = a[i, p]
                            aiq = a[i, q]
                            a[i, p] = c * aip - s * cph * aiq
                            a[i, q] = s * aip + c * cph * aiq
                        for j in range(d):
                            apj = a[p, j]
                            aqj = a[q, j]
                            a[p, j] = c * apj - s * phase * aqj
                            a[q, j] = s * apj + c * phase * aqj
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        a[p, p] = a[p, p].real
                        a[q, q] = a[q, q].real
                        for i in range(d):
                            vip = v[i, p]
                            viq = v[i, q]
                            v[i, p] = c * vip - s * cph * viq
                            v[i, q] = s * vip + c * cph * viq
                it += 1
            sweeps[k] = it
            # stable insertion sort of the diagonal
            w = np.empty(d)
            order = np.arange(d)
            for i in range(d):
                w[i] = a[i, i].real
            for i in range(1, d):
                j = i
                while j > 0 and w[order[j - 1]] > w[order[j]]:
                    tmp = order[j - 1]
                    order[j - 1] = order[j]
                    order[j] = tmp
                    j -= 1
            for i in range(d):
                w_out[k, i] = w[order[i]]
                for r_ in range(d):
                    v_out[k, r_, i] = v[r_, order[i]]
        return w_out, v_out, sweeps


def jacobi_eigh_batch_numpy(hs, max_sweeps=MAX_SWEEPS, rtol=CONVERGENCE_RTOL):
    return _jacobi_batch_py(np.asarray(hs, dtype=np.complex128), max_sweeps, rtol)


def jacobi_eigh_batch_numba(hs, max_sweeps=MAX_SWEEPS, rtol=CONVERGENCE_RTOL):
    if not HAS_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    hs = np.ascontiguousarray(hs, dtype=np.complex128)
    return _jacobi_batch_nb(hs, max_sweeps, rtol)


def jacobi_eigh_batch(hs, max_sweeps=MAX_SWEEPS, rtol=CONVERGENCE_RTOL):
    """Eigen-decompose a stack ``(n, d, d)`` of Hermitian matrices.

    Returns ``(w, v, sweeps)``: ascending eigenvalues ``(n, d)``, unitary
    eigenvector matrices ``(n, d, d)`` (columns), and the sweep count per
    item, ``-1`` where the sweep budget ran out.
    """
    if USE_NUMBA:
        return jacobi_eigh_batch_numba(hs, max_sweeps, rtol)
    return jacobi_eigh_batch_numpy(hs, max_sweeps, rtol)
