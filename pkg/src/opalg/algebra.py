"""Finite-dimensional concrete C*-algebras inside M_d.

An :class:`Algebra` is the *-closed span generated by a presentation, stored
as a Frobenius-orthonormal basis.  Finite-dimensional C*-algebras are always
unital; when the identity of ``M_d`` was not adjoined the unit is the support
projection of the algebra, and spectra are taken on its range.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    AmbiguousMembership,
    DimensionCap,
    NotMember,
    NotUnital,
    NumericalRankAmbiguity,
)
from .matkernel import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    as_tolerance,
    clusters,
    hermitian_eig,
    scale,
)

DIM_CAP = 64


@dataclass(frozen=True)
class AlgebraPresentation:
    ambient_dim: int
    generators: tuple
    unital: bool = True
    exact: tuple = None  # Gaussian-rational entries when parsed from a spec file

    def __post_init__(self):
        gens = tuple(as_matrix(g) for g in self.generators)
        d = self.ambient_dim
        if d < 1:
            raise ValueError("ambient_dim must be positive")
        for g in gens:
            if g.shape != (d, d):
                raise ValueError(f"generator of shape {g.shape} in M_{d}")
        if not gens and not self.unital:
            raise ValueError("need at least one generator or the unital flag")
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class Block:
    """One Wedderburn summand: ``projection * A`` is ``M_size`` repeated
    ``multiplicity`` times along the diagonal of ``M_d``."""

    projection: np.ndarray
    size: int
    multiplicity: int


@dataclass(frozen=True, eq=False)
class Algebra:
    ambient_dim: int
    basis: np.ndarray  # (dim, d, d), orthonormal for <a, b> = tr(a* b)
    tol: object = DEFAULT_TOL
    adjoined_identity: bool = True
    _rng_seed: int = field(default=0, repr=False)

    @property
    def dim(self):
        return self.basis.shape[0]

    @cached_property
    def _flat(self):
        return self.basis.reshape(self.dim, -1)

    @cached_property
    def support(self):
        """Orthonormal columns spanning the range of the unit."""
        d = self.ambient_dim
        if self.adjoined_identity:
            return np.eye(d, dtype=np.complex128)
        gram = sum(b @ adjoint(b) for b in self.basis)
        w, u = hermitian_eig(gram, self.tol)
        keep = w > 100 * self.tol.eps * max(1.0, float(w[-1]))
        return u[:, keep]

    @cached_property
    def unit(self):
        q = self.support
        e = q @ adjoint(q)
        if not self.adjoined_identity:
            # the support projection must be a two-sided identity inside A
            self.coords(e)
            for b in self.basis:
                if np.linalg.norm(e @ b - b) > 10 * self.tol.eps or np.linalg.norm(b @ e - b) > 10 * self.tol.eps:
                    raise NotUnital("support projection does not act as a unit")
        return e

    @cached_property
    def blocks(self):
        return wedderburn(self, rng=self._rng_seed)

    @property
    def is_commutative(self):
        return all(b.size == 1 for b in self.blocks)

    def coords(self, m):
        """Basis coordinates of ``m``; raises :class:`NotMember` when ``m`` is outside."""
        m = as_matrix(m)
        if m.shape != (self.ambient_dim, self.ambient_dim):
            raise ValueError(f"expected a {self.ambient_dim}x{self.ambient_dim} matrix")
        c = np.conj(self._flat) @ m.reshape(-1)
        resid = np.linalg.norm(m.reshape(-1) - c @ self._flat)
        s = scale(m)
        if resid <= 10 * self.tol.eps * s:
            return c
        if resid > 100 * self.tol.eps * s:
            raise NotMember(f"projection residual {resid:.3e}")
        raise AmbiguousMembership(f"projection residual {resid:.3e} inside the ambiguity band")

    def contains(self, m):
        try:
            self.coords(m)
        except NotMember:
            return False
        return True

    def element(self, coords):
        return np.tensordot(np.asarray(coords, dtype=np.complex128), self.basis, axes=1)

    def random_element(self, rng, hermitian=False):
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        x = self.element(c)
        return 0.5 * (x + adjoint(x)) if hermitian else x


class _SpanBuilder:
    def __init__(self, d, tol, cap):
        self.d = d
        self.tol = tol
        self.cap = cap
        self.rows = []
        self._mat = np.zeros((0, d * d), dtype=np.complex128)

    def insert(self, m):
        v = np.asarray(m, dtype=np.complex128).reshape(-1)
        r = v
        for _ in range(2):
            if self._mat.shape[0]:
                r = r - (np.conj(self._mat) @ r) @ self._mat
        n = np.linalg.norm(r)
        eps = self.tol.eps
        if n <= eps:
            return False
        if n < 100 * eps:
            raise NumericalRankAmbiguity(f"candidate residual {n:.3e} inside [tol, 100 tol]")
        self.rows.append(r / n)
        self._mat = np.array(self.rows)
        if len(self.rows) > self.cap:
            raise DimensionCap(f"span exceeded {self.cap}")
        return True

    def __len__(self):
        return len(self.rows)

    def matrices(self):
        return self._mat.reshape(-1, self.d, self.d)


def generate(p, tol=DEFAULT_TOL, cap=DIM_CAP):
    """Smallest *-subalgebra of ``M_d`` containing the presentation's generators.

    Closure alternates adjoints and pairwise products of the current basis
    until the dimension stops growing; insertion order is deterministic.
    """
    tol = as_tolerance(tol)
    d = p.ambient_dim
    if d > cap:
        raise DimensionCap(f"ambient dimension {d} exceeds cap {cap}")
    span = _SpanBuilder(d, tol, d * d)
    if p.unital:
        span.insert(np.eye(d) / np.sqrt(d))
    for g in p.generators:
        n = np.linalg.norm(g)
        if n > 0:
            span.insert(g / n)
    prev = 0
    while True:
        start = len(span)
        current = span.matrices()
        for i in range(prev, len(current)):
            span.insert(adjoint(current[i]))
        current = span.matrices()
        k = len(current)
        for i in range(k):
            for j in range(k):
                if i >= prev or j >= prev:
                    span.insert(current[i] @ current[j])
        if len(span) == start and start == k:
            break
        prev = start
    if len(span) == 0:
        raise ValueError("generated algebra is {0}")
    return Algebra(d, span.matrices().copy(), tol, adjoined_identity=p.unital)


def subalgebra(a, elements, unital=True):
    """The C*-subalgebra of ``a`` generated by ``elements`` and (optionally) ``a``'s unit."""
    gens = list(elements)
    if unital:
        gens = [a.unit] + gens
    p = AlgebraPresentation(a.ambient_dim, tuple(gens), unital=unital and a.adjoined_identity)
    return generate(p, a.tol)


def _rank(vectors, rtol):
    if len(vectors) == 0:
        return 0
    s = np.linalg.svd(np.asarray(vectors), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def center(a):
    """Orthonormal coordinates (columns) spanning the center of ``a``."""
    k = a.dim
    rows = []
    for j in range(k):
        bj = a.basis[j]
        rows.append(np.stack([(bi @ bj - bj @ bi).reshape(-1) for bi in a.basis], axis=1))
    kmat = np.concatenate(rows, axis=0)
    _, s, vh = np.linalg.svd(kmat)
    s = np.concatenate([s, np.zeros(k - len(s))])
    thresh = 100 * a.tol.eps * max(1.0, float(s[0]) if len(s) else 1.0)
    null = np.conj(vh[s <= thresh]).T
    return null


def wedderburn(a, rng=0):
    """Minimal central projections of ``a`` with their block sizes.

    A random self-adjoint central element separates the summands with
    probability one; its eigenspaces on the range of the unit give the
    projections.  Blocks are returned in a canonical order (projections
    with weight earlier on the diagonal first).
    """
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    tol = a.tol
    q = a.support
    cen = center(a)
    zs = [a.element(c) for c in cen.T]
    zs = [0.5 * (z + adjoint(z)) for z in zs] + [-0.5j * (z - adjoint(z)) for z in zs]
    zs = [z for z in zs if np.linalg.norm(z) > tol.eps]
    for _ in range(8):
        g = gen.standard_normal(len(zs))
        z = sum(c * zz for c, zz in zip(g, zs)) if zs else a.unit
        w, u = hermitian_eig(adjoint(q) @ z @ q, tol)
        groups = clusters(w, 100 * tol.eps * max(1.0, float(np.max(np.abs(w)))))
        projs = [q @ u[:, grp] @ adjoint(q @ u[:, grp]) for grp in groups]
        blocks = []
        ok = True
        for pr in projs:
            # minimal central <=> the center compressed by pr is one-dimensional
            if _rank([(pr @ zz).reshape(-1) for zz in zs] + [pr.reshape(-1)], 1e-7) != 1:
                ok = False
                break
            dim_block = _rank([(pr @ b).reshape(-1) for b in a.basis], 1e-7)
            n = int(round(np.sqrt(dim_block)))
            if n * n != dim_block:
                ok = False
                break
            rank = int(round(np.trace(pr).real))
            blocks.append(Block(pr, n, rank // n))
        if ok:
            break
    else:
        raise NumericalRankAmbiguity("could not separate the Wedderburn summands")
    blocks.sort(key=lambda b: tuple(-round(float(x), 8) for x in np.real(np.diag(b.projection))))
    return tuple(blocks)


def is_positive(a, x):
    """Self-adjoint within tol with spectrum >= -tol."""
    x = as_matrix(x)
    tol = a.tol
    s = scale(x)
    if np.linalg.norm(x - adjoint(x)) > tol.eps * s:
        return False
    w, _ = hermitian_eig(0.5 * (x + adjoint(x)), tol)
    return bool(w[0] >= -tol.eps * s)


def ideal_dimension(a, elements, rtol=1e-8):
    """Dimension of the two-sided ideal of ``a`` generated by ``elements``.

    Computed as the rank of ``{b_i y b_j}`` over basis pairs, the span
    closure of ``a y a``.
    """
    vecs = []
    for y in elements:
        y = as_matrix(y)
        left = np.einsum("iab,bc->iac", a.basis, y)
        prods = np.einsum("iab,jbc->ijac", left, a.basis)
        vecs.append(prods.reshape(a.dim * a.dim, -1))
    if not vecs:
        return 0
    return _rank(np.concatenate(vecs, axis=0), rtol)
