"""Functionals and states on a finite-dimensional algebra.

A functional is carried by a matrix ``rho`` through ``phi(a) = tr(rho a)``.
The representative is canonicalized to the unique ``rho`` inside the algebra,
so norms, positivity and purity become matrix questions: the norm is the
trace norm, positivity is ``rho >= 0``.
"""
from dataclasses import dataclass, field

import numpy as np
import clarabel
from scipy import sparse

from . import algebra as _alg
from .errors import (
    EmptyList,
    IntervalEmpty,
    NoConvergence,
    NormBoundViolated,
    NotCommutative,
    NotSeparable,
    NotState,
    NumericalError,
)
from .matkernel import (
    Tolerance,
    adjoint,
    as_matrix,
    as_tolerance,
    clusters,
    hermitian_eig,
    operator_norm,
    scale,
    trace_norm,
)

def _svec(m):
    # upper triangle in column-major order, off-diagonals scaled by sqrt(2)
    r, c = np.triu_indices(m.shape[0])
    order = np.lexsort((r, c))
    r, c = r[order], c[order]
    v = m[r, c].copy()
    v[r != c] *= np.sqrt(2.0)
    return v


def _solve(p, q, a_mat, b, cones, tol=1e-10):
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = settings.tol_gap_rel = settings.tol_feas = tol
    settings.max_iter = 500
    sol = clarabel.DefaultSolver(
        sparse.csc_matrix(p), np.asarray(q, dtype=float), sparse.csc_matrix(a_mat), np.asarray(b, dtype=float),
        cones, settings,
    ).solve()
    x = np.array(sol.x)
    # stalled or inaccurate runs still return usable points: every caller
    # certifies the result by exact evaluation
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise NoConvergence(f"conic solver status {sol.status}")
    return x


def _canonical_rho(a, rho):
    # the unique r in A with tr(r b) = tr(rho b) for every b in A
    vals = np.einsum("ij,kji->k", rho, a.basis)
    return np.tensordot(vals, np.conj(np.transpose(a.basis, (0, 2, 1))), axes=1)


class Functional:
    """Linear functional ``a -> tr(rho a)`` on an algebra."""

    def __init__(self, a, rho):
        rho = as_matrix(rho)
        if rho.shape != (a.ambient_dim, a.ambient_dim):
            raise ValueError("rho has the wrong shape")
        self.algebra = a
        self.rho = _canonical_rho(a, rho)

    def __call__(self, x):
        return complex(np.trace(self.rho @ as_matrix(x)))

    @classmethod
    def from_values(cls, a, values):
        """Functional with prescribed values on the algebra's basis."""
        values = np.asarray(values, dtype=np.complex128)
        rho = np.tensordot(values, np.conj(np.transpose(a.basis, (0, 2, 1))), axes=1)
        return cls(a, rho)

    def values(self):
        return np.array([self(b) for b in self.algebra.basis])

    def __add__(self, other):
        return Functional(self.algebra, self.rho + other.rho)

    def __rmul__(self, c):
        return Functional(self.algebra, c * self.rho)


class State(Functional):
    """Positive unital functional; validated on construction."""

    def __init__(self, a, rho, tol=None):
        super().__init__(a, rho)
        tol = as_tolerance(tol) if tol is not None else a.tol
        r = self.rho
        herm = np.linalg.norm(r - adjoint(r))
        if herm > 10 * tol.eps * scale(r):
            raise NotState(f"representative is not self-adjoint ({herm:.3e})")
        total = np.trace(r @ a.unit)
        if abs(total - 1) > 10 * tol.eps:
            raise NotState(f"phi(1) = {total:.12g}")
        q = a.support
        w, _ = hermitian_eig(0.5 * adjoint(q) @ (r + adjoint(r)) @ q, Tolerance(max(tol.eps, 1e-12)))
        if w[0] < -10 * tol.eps:
            raise NotState(f"negative on a positive element ({w[0]:.3e})")
        self.rho = 0.5 * (r + adjoint(r))

    @property
    def block_canonical(self):
        return self.rho

    @classmethod
    def vector(cls, a, v):
        v = np.asarray(v, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        return cls(a, np.outer(v, np.conj(v)))


def as_state(phi, tol=None):
    return phi if isinstance(phi, State) else State(phi.algebra, phi.rho, tol)


class DenseSequence:
    """Finite stand-in for a dense sequence in the unit ball."""

    def __init__(self, items, tol=1e-9):
        items = [as_matrix(x) for x in items]
        if not items:
            raise EmptyList("dense sequence is empty")
        for x in items:
            if operator_norm(x) > 1 + tol:
                raise ValueError(f"item of norm {operator_norm(x):.6g} outside the unit ball")
        self.items = tuple(items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    @classmethod
    def for_algebra(cls, a, n_random=0, rng=0):
        """Basis elements scaled to norm 1, then ``n_random`` random unit-ball points."""
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        items = [b / operator_norm(b) for b in a.basis]
        for _ in range(n_random):
            x = a.random_element(gen)
            items.append(x / operator_norm(x) * gen.uniform(0.5, 1.0))
        return cls(items)


def functional_norm(a, phi):
    return trace_norm(phi.rho)


def state_metric(seq, phi, psi):
    return float(sum(2.0 ** -(n + 1) * abs(phi(x) - psi(x)) for n, x in enumerate(seq)))


# ---------------------------------------------------------------- Hahn-Banach


def _embed(h):
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def _dilation(z):
    d = z.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    out[:d, d:] = z
    out[d:, :d] = adjoint(z)
    return out


def _sdp_norm_affine(ys, lin, offset, m_coef):
    """max_c  lin.c - m_coef * ||sum c_i y_i + offset||  over real c.

    Posed as ``t I + dil(sum c_i y_i + offset) >= 0`` on the real embedding
    of the Hermitian dilation; the returned value is re-evaluated exactly at
    the solver's point, so it is a certified lower bound.
    """
    d = offset.shape[0]
    n = len(ys)
    cols = [-_svec(_embed(_dilation(y))) for y in ys] + [-_svec(np.eye(4 * d))]
    q = np.concatenate([-np.asarray(lin, dtype=float), [m_coef]])
    x = _solve(np.zeros((n + 1, n + 1)), q, np.array(cols).T, _svec(_embed(_dilation(offset))),
               [clarabel.PSDTriangleConeT(4 * d)])
    coef = x[:-1]
    z = sum(ci * y for ci, y in zip(coef, ys)) + offset
    return float(np.dot(lin, coef) - m_coef * operator_norm(z)), coef


def _orthonormal_span(ys, vals, rows):
    """Re-express (span, values) in a Frobenius-orthonormal real basis."""
    q, r = np.linalg.qr(np.array(rows).T)
    t = np.linalg.inv(r)
    es = [sum(t[i, j] * ys[i] for i in range(len(ys))) for j in range(len(ys))]
    return es, np.asarray(vals) @ t


def _real_coords(a, x):
    c = a.coords(x)
    return np.concatenate([c.real, c.imag])


@dataclass
class HahnBanachStep:
    item: int  # index into the processed real sequence
    action: str  # "extend" or "skip"
    alpha: float = float("nan")
    beta: float = float("nan")


@dataclass
class HahnBanachResult:
    functional: Functional
    norm: float
    steps: list = field(default_factory=list)


def _subspace_norm(ys, vals):
    """Norm of the real functional with values ``vals`` on the span of ``ys``."""
    # max f.c  s.t.  ||sum c_i y_i|| <= 1
    d = ys[0].shape[0]
    n = len(ys)
    cols = [_svec(_embed(_dilation(y))) for y in ys]
    coef = _solve(np.zeros((n, n)), -np.asarray(vals, dtype=float), np.array(cols).T,
                  _svec(np.eye(4 * d)), [clarabel.PSDTriangleConeT(4 * d)])
    nrm = operator_norm(sum(ci * y for ci, y in zip(coef, ys)))
    return float(np.dot(vals, coef) / nrm) if nrm > 0 else 0.0


def _real_span(a, subspace, phi_on_y):
    """Real basis ``y, i y`` of the subspace with values ``Re phi``, ``-Im phi``."""
    ys, vals, rows = [], [], []
    for y, v in zip(subspace, phi_on_y):
        for x, val in ((y, v.real), (1j * y, -v.imag)):
            r = _real_coords(a, x)
            if _alg._rank(np.array(rows + [r]), 1e-10) > len(rows):
                ys.append(x)
                vals.append(val)
                rows.append(r)
    # the values must be real-linear on the span
    if rows:
        mat = np.array(rows)
        for y, v in zip(subspace, phi_on_y):
            for x, val in ((y, v.real), (1j * y, -v.imag)):
                coef, *_ = np.linalg.lstsq(mat.T, _real_coords(a, x), rcond=None)
                if abs(np.dot(coef, vals) - val) > 1e-9 * max(1.0, abs(val)):
                    raise ValueError("values on the subspace are not linear")
    return ys, vals, rows


def subspace_norm(a, subspace, phi_on_y):
    """Norm of a functional given by its values on the elements spanning a subspace."""
    subspace = [as_matrix(y) for y in subspace]
    ys, vals, rows = _real_span(a, subspace, np.asarray(phi_on_y, dtype=np.complex128))
    return _subspace_norm(*_orthonormal_span(ys, vals, rows)) if ys else 0.0


def hahn_banach_extend(a, subspace, phi_on_y, bound, seq=None, opt_tol=1e-6):
    """Extend a functional from a subspace to all of ``a`` without raising its norm.

    The complex functional is reduced to its real part, extended one real
    direction at a time along ``seq`` (each item ``x`` is followed by
    ``i x``), with the new value set to the left endpoint
    ``alpha = sup_y f(y) - M ||y - x||``.  ``beta`` is computed as a
    certificate that the admissible interval is nonempty.  The bound in force
    creeps from ``M`` towards ``M(1 + opt_tol)`` over the steps so every sup
    is attained.  Items already in
    the current span are skipped and logged; the span is finished with the
    scaled algebra basis if the sequence runs out first.
    """
    tol = a.tol
    subspace = [as_matrix(y) for y in subspace]
    phi_on_y = np.asarray(phi_on_y, dtype=np.complex128)
    if len(subspace) != len(phi_on_y):
        raise ValueError("one value per subspace element is required")
    if seq is None:
        seq = DenseSequence.for_algebra(a)

    ys, vals, rows = _real_span(a, subspace, phi_on_y)
    m_bound = float(bound)
    start_norm = _subspace_norm(*_orthonormal_span(ys, vals, rows)) if ys else 0.0
    if start_norm > m_bound * (1 + opt_tol):
        raise NormBoundViolated(f"norm on Y is {start_norm:.12g} > {m_bound}")

    # Taking gamma = alpha leaves the new functional with norm exactly equal
    # to the bound, and at equality the next sup is not attained.  The bound
    # therefore rises by a fixed increment per step.  Half of the opt_tol
    # budget pays for that schedule, the other half for extra increments
    # spent when solver error shows up as alpha > beta.
    full = 2 * a.dim
    n_steps = full - len(rows)
    inc = opt_tol / (2 * (n_steps + 1))
    level = 0  # increments spent so far
    bumps_left = n_steps
    steps = []
    filler = [b / operator_norm(b) for b in a.basis]
    candidates = []
    for x in list(seq) + filler:
        candidates.extend((x, 1j * x))
    for k, x in enumerate(candidates):
        if len(rows) == full:
            break
        r = _real_coords(a, x)
        if _alg._rank(np.array(rows + [r]), 1e-10) == len(rows):
            steps.append(HahnBanachStep(k, "skip"))
            continue
        level += 1
        while True:
            m_j = m_bound * (1 + inc * level)
            if ys:
                es, fe = _orthonormal_span(ys, vals, rows)
                alpha, _ = _sdp_norm_affine(es, fe, -x, m_j)
                beta_neg, _ = _sdp_norm_affine(es, fe, x, m_j)
                beta = -beta_neg
            else:
                alpha, beta = -m_j * operator_norm(x), m_j * operator_norm(x)
            if alpha <= beta or bumps_left == 0:
                break
            level += 1
            bumps_left -= 1
        if alpha > beta + opt_tol:
            raise IntervalEmpty(f"alpha={alpha:.12g} > beta={beta:.12g}")
        ys.append(x)
        vals.append(alpha)
        rows.append(r)
        steps.append(HahnBanachStep(k, "extend", alpha, beta))
    if len(rows) < full:
        raise NumericalError("extension did not span the algebra")

    # real functional F on real coordinates; psi(b) = F(b) - i F(i b)
    f = np.linalg.solve(np.array(rows), np.array(vals))
    psi_vals = np.array([
        np.dot(f, _real_coords(a, b)) - 1j * np.dot(f, _real_coords(a, 1j * b)) for b in a.basis
    ])
    psi = Functional.from_values(a, psi_vals)
    return HahnBanachResult(psi, functional_norm(a, psi), steps)


# ---------------------------------------------------------------- states


def norm_attaining_state(a, x, route="eigen", seq=None, opt_tol=1e-6):
    """A state with ``psi(x* x) = ||x||^2``.

    ``route="eigen"`` takes the vector state at a top eigenvector of ``x* x``;
    ``route="hahn-banach"`` extends ``1 -> 1, x*x -> ||x||^2`` from
    ``span{1, x*x}`` with bound 1.
    """
    x = as_matrix(x)
    a.coords(x)
    xx = adjoint(x) @ x
    if route == "eigen":
        q = a.support
        w, u = hermitian_eig(adjoint(q) @ xx @ q, a.tol)
        return State.vector(a, q @ u[:, -1])
    if route == "hahn-banach":
        nx2 = operator_norm(x) ** 2
        if np.linalg.norm(xx - nx2 * a.unit) <= a.tol.eps * scale(xx):
            subspace, values = [a.unit], [1.0]
        else:
            subspace, values = [a.unit, xx], [1.0, nx2]
        res = hahn_banach_extend(a, subspace, values, 1.0, seq, opt_tol)
        return nearest_state(a, res.functional)
    raise ValueError(f"unknown route {route!r}")


def nearest_state(a, phi):
    """Normalized positive part of the Hermitian part of ``phi``.

    For ``phi(1) = 1`` and ``||phi|| <= 1 + eps`` the negative part has mass
    at most ``eps / 2``, so the result moves values by ``O(eps)``.
    """
    rho = 0.5 * (phi.rho + adjoint(phi.rho))
    q = a.support
    w, u = hermitian_eig(adjoint(q) @ rho @ q, a.tol)
    v = q @ u
    pos = (v * np.clip(w, 0.0, None)) @ adjoint(v)
    mass = np.trace(pos).real
    if mass <= 0:
        raise NotState("functional has no positive part")
    return State(a, pos / mass)


def faithful_state(a, states):
    """``sum 2^-n phi_n`` with the last weight doubled; returns ``(state, faithful)``."""
    states = list(states)
    if not states:
        raise EmptyList("no states given")
    n = len(states)
    weights = [2.0 ** -(k + 1) for k in range(n)]
    weights[-1] *= 2
    rho = sum(w * s.rho for w, s in zip(weights, states))
    phi = State(a, rho)
    q = a.support
    w, _ = hermitian_eig(adjoint(q) @ phi.rho @ q, a.tol)
    return phi, bool(w[0] > a.tol.eps)


def _require_commutative(a):
    if not a.is_commutative:
        raise NotCommutative("algebra has a matrix block of size > 1")


def pure_states(a):
    """Characters of a commutative algebra, one per Wedderburn block."""
    _require_commutative(a)
    return [State(a, b.projection / b.multiplicity) for b in a.blocks]


@dataclass(frozen=True)
class GelfandTransform:
    characters: tuple
    table: np.ndarray  # table[j, i] = chi_i(basis_j)

    def __call__(self, x):
        return np.array([chi(x) for chi in self.characters])

    @property
    def surjective(self):
        return len(self.characters) == self.table.shape[0] and np.linalg.matrix_rank(self.table) == len(self.characters)


def gelfand_transform(a):
    chars = tuple(pure_states(a))
    table = np.array([[chi(b) for chi in chars] for b in a.basis])
    return GelfandTransform(chars, table)


def _block_index(a, rho):
    """Blocks on which ``rho`` has weight."""
    return [i for i, b in enumerate(a.blocks) if np.linalg.norm(b.projection @ rho) > 10 * a.tol.eps]


def _minimal_projections(a, e, mult, rng, depth=0):
    """Split a projection ``e`` of ``a`` (inside one block) into minimal projections."""
    rank = int(round(np.trace(e).real))
    if rank <= mult:
        return [e]
    if depth > 64:
        raise NumericalError("minimal projection split did not terminate")
    w, u = hermitian_eig(e, a.tol)
    basis = u[:, w > 0.5]
    h = e @ a.random_element(rng, hermitian=True) @ e
    wh, uh = hermitian_eig(adjoint(basis) @ h @ basis, a.tol)
    groups = clusters(wh, 1e-6 * max(1.0, float(np.max(np.abs(wh)))))
    out = []
    for g in groups:
        v = basis @ uh[:, g]
        out.extend(_minimal_projections(a, v @ adjoint(v), mult, rng, depth + 1))
    return out


def krein_milman_decompose(a, s, rng=0):
    """Write a state as a convex combination of extreme states.

    Returns ``[(weight, state), ...]``.  Each block part of the canonical
    representative is spectrally decomposed; eigenspaces are cut down to
    minimal projections of the algebra, and a minimal projection ``p`` of
    a block with multiplicity ``m`` carries the pure state ``p / m``.
    """
    s = as_state(s)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    out = []
    for b in a.blocks:
        part = b.projection @ s.rho @ b.projection
        if np.linalg.norm(part) <= 10 * a.tol.eps:
            continue
        w, u = hermitian_eig(0.5 * (part + adjoint(part)), a.tol)
        # restrict to the block's range, then group equal eigenvalues
        wq, uq = hermitian_eig(b.projection, a.tol)
        rng_cols = uq[:, wq > 0.5]
        wb, ub = hermitian_eig(adjoint(rng_cols) @ part @ rng_cols, a.tol)
        groups = clusters(wb, 1e-7)
        for g in groups:
            lam = float(np.mean(wb[g]))
            if lam <= 10 * a.tol.eps:
                continue
            v = rng_cols @ ub[:, g]
            e = v @ adjoint(v)
            for p in _minimal_projections(a, e, b.multiplicity, gen):
                weight = lam * np.trace(p).real
                out.append((float(weight), State(a, p / b.multiplicity)))
    return out


@dataclass
class ExtremeCheck:
    extreme: bool
    witness: tuple = None  # (y, z) with s = (y + z) / 2 when not extreme

    def __bool__(self):
        return self.extreme


def is_extreme(a, s, seq=None):
    s = as_state(s)
    blocks = _block_index(a, s.rho)
    if len(blocks) == 1:
        b = a.blocks[blocks[0]]
        w, _ = hermitian_eig(s.rho, a.tol)
        if int(np.sum(w > 1e-7)) <= b.multiplicity:
            return ExtremeCheck(True)
    parts = krein_milman_decompose(a, s)
    (w1, e1), (w2, e2) = sorted(parts, key=lambda t: -t[0])[:2]
    delta = min(w1, w2)
    shift = delta * (e1.rho - e2.rho)
    y = State(a, s.rho + shift)
    z = State(a, s.rho - shift)
    return ExtremeCheck(False, (y, z))


def tracial_state_set(a):
    """Normalized block traces; the tracial states are their convex hull."""
    return [State(a, b.projection / np.trace(b.projection).real) for b in a.blocks]


def is_tracial(a, phi, rng=0, trials=8):
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    for _ in range(trials):
        x, y = a.random_element(gen), a.random_element(gen)
        if abs(phi(x @ y) - phi(y @ x)) > 1e3 * a.tol.eps * scale(x) * scale(y):
            return False
    return True


def separating_functional(points_a, points_b, tol=1e-9):
    """Strictly separate the convex hulls of two finite point sets in R^k.

    Returns ``(w, r)`` with ``w.x < r <= w.y`` on the two hulls; ``w`` is the
    unit vector joining the nearest pair of hull points and ``r`` is the
    midpoint level.
    """
    pa = np.atleast_2d(np.asarray(points_a, dtype=float))
    pb = np.atleast_2d(np.asarray(points_b, dtype=float))
    if pa.size == 0 or pb.size == 0:
        raise EmptyList("both point sets must be nonempty")
    if pa.shape[1] != pb.shape[1]:
        raise ValueError("point sets live in different dimensions")
    na, nb = len(pa), len(pb)
    # convex weights (lambda, mu) minimizing ||pa^T lambda - pb^T mu||^2
    m = np.concatenate([pa.T, -pb.T], axis=1)
    n = na + nb
    eq = np.vstack([
        np.concatenate([np.ones(na), np.zeros(nb)]),
        np.concatenate([np.zeros(na), np.ones(nb)]),
    ])
    x = _solve(m.T @ m, np.zeros(n), np.vstack([eq, -np.eye(n)]), np.concatenate([[1.0, 1.0], np.zeros(n)]),
               [clarabel.ZeroConeT(2), clarabel.NonnegativeConeT(n)], tol=1e-12)
    lam = np.clip(x, 0.0, None)
    xa = pa.T @ (lam[:na] / lam[:na].sum())
    xb = pb.T @ (lam[na:] / lam[na:].sum())
    gap = xb - xa
    dist = np.linalg.norm(gap)
    if dist <= tol:
        raise NotSeparable(f"hulls meet (distance {dist:.3e})")
    w = gap / dist
    hi_a, lo_b = float(np.max(pa @ w)), float(np.min(pb @ w))
    if hi_a >= lo_b:
        raise NotSeparable(f"no strict separation found (margin {lo_b - hi_a:.3e})")
    return w, 0.5 * (hi_a + lo_b)
