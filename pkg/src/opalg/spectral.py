"""Spectra, joint spectra and continuous functional calculus.

Spectra are computed on the range of the algebra's unit (the compression
``Q* x Q``), which is where the algebra acts unitally.  The ideal-dimension
oracle gives an independent, algebra-relative membership test for joint
spectra.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from . import algebra as _alg
from .errors import (
    FunctionUndefinedOnSpectrum,
    NotInAlgebra,
    NotMember,
    NotPositive,
    NotInvertible,
    NotSelfAdjoint,
    NumericalError,
)
from .matkernel import (
    adjoint,
    as_matrix,
    hermitian_eig,
    is_normal,
    operator_norm,
    scale,
    simultaneous_diag,
)


def _dedup_radius(tol, s=1.0):
    return 100 * tol.eps * max(1.0, s)


def _sort_key(point, quantum):
    key = []
    for z in np.atleast_1d(point):
        key.extend((round(z.real / quantum), round(z.imag / quantum)))
    return tuple(key)


def _cluster_points(points, radius):
    """Greedy single-pass clustering; returns (representatives, labels)."""
    points = np.asarray(points, dtype=np.complex128)
    if points.ndim == 1:
        points = points[:, None]
    reps, members, labels = [], [], np.empty(len(points), dtype=int)
    for i, p in enumerate(points):
        for k, r in enumerate(reps):
            if np.max(np.abs(p - r)) < radius:
                members[k].append(i)
                labels[i] = k
                break
        else:
            reps.append(p)
            members.append([i])
            labels[i] = len(reps) - 1
    reps = [points[m].mean(axis=0) for m in members]
    return reps, labels


@dataclass(frozen=True)
class SpectrumSet:
    """Finite spectrum, deduplicated and sorted by (re, im)."""

    points: np.ndarray

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.points))) if len(self.points) else 0.0

    def hausdorff(self, other):
        return hausdorff(self.points, np.asarray(other.points if isinstance(other, SpectrumSet) else other))


@dataclass(frozen=True)
class JointSpectrumSet:
    """Finite joint spectrum: an ``(m, n)`` array of n-tuples, lexicographic."""

    tuples: np.ndarray

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return (tuple(t) for t in self.tuples)


def hausdorff(p, q):
    p = np.asarray(p, dtype=np.complex128).reshape(len(p), -1)
    q = np.asarray(q, dtype=np.complex128).reshape(len(q), -1)
    if len(p) == 0 or len(q) == 0:
        return 0.0 if len(p) == len(q) else np.inf
    dist = np.max(np.abs(p[:, None, :] - q[None, :, :]), axis=2)
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _make_spectrum(values, tol, s):
    radius = _dedup_radius(tol, s)
    reps, _ = _cluster_points(values, radius)
    pts = sorted((complex(r[0]) for r in reps), key=lambda z: _sort_key(z, radius))
    return SpectrumSet(np.array(pts, dtype=np.complex128))


def _require_member(a, x):
    x = as_matrix(x)
    try:
        a.coords(x)
    except NotMember as exc:
        raise NotInAlgebra(str(exc)) from exc
    return x


def _compress(a, x):
    q = a.support
    return adjoint(q) @ x @ q


def eigenvalues(a, x):
    """Eigenvalues (with multiplicity) of ``x`` acting on the range of the unit."""
    tol = a.tol
    xc = _compress(a, x)
    if np.linalg.norm(xc - adjoint(xc)) <= tol.eps * scale(xc):
        w, _ = hermitian_eig(0.5 * (xc + adjoint(xc)), tol)
        return w.astype(np.complex128)
    if is_normal(xc, tol):
        u = simultaneous_diag([xc], tol)
        return np.diag(adjoint(u) @ xc @ u)
    return np.linalg.eigvals(xc)


def spectrum(a, x):
    """Spectrum of ``x`` relative to ``a`` (multiplicities discarded)."""
    x = _require_member(a, x)
    return _make_spectrum(eigenvalues(a, x), a.tol, scale(x))


@dataclass(frozen=True)
class SpectralRadius:
    sequence: np.ndarray  # ||x^n||^(1/n), n = 1..N
    limit_candidate: float  # min of the sequence
    radius: float  # max |lambda| over the spectrum

    def dyadic(self):
        """The subsequence at n = 1, 2, 4, 8, ..."""
        n = len(self.sequence)
        return self.sequence[[2**k - 1 for k in range(n.bit_length()) if 2**k <= n]]


def spectral_radius_sequence(a, x, n_terms):
    """``||x^n||^(1/n)`` for ``n = 1..n_terms`` next to ``max |sigma(x)|``.

    Powers are renormalized as they are formed so large and small spectra do
    not overflow; an exactly vanishing power pins the rest of the sequence
    at zero.
    """
    x = _require_member(a, x)
    if not 1 <= n_terms <= 64:
        raise ValueError("n_terms must lie in 1..64")
    seq = np.zeros(n_terms)
    y = x.copy()
    log_scale = 0.0
    for n in range(1, n_terms + 1):
        nrm = operator_norm(y)
        if nrm == 0.0:
            break
        seq[n - 1] = np.exp((np.log(nrm) + log_scale) / n)
        log_scale += np.log(nrm)
        y = (y / nrm) @ x
    radius = spectrum(a, x).max_abs
    return SpectralRadius(seq, float(seq.min()), radius)


def _check_tuple(a, xs):
    xs = [_require_member(a, x) for x in xs]
    if not xs:
        raise ValueError("empty tuple of elements")
    return xs


def _joint_diagonalize(a, xs, rng):
    q = a.support
    comp = [adjoint(q) @ x @ q for x in xs]
    u = simultaneous_diag(comp, a.tol, rng)
    diag = np.stack([np.diag(adjoint(u) @ c @ u) for c in comp], axis=1)
    radius = _dedup_radius(a.tol, max(scale(x) for x in xs))
    reps, labels = _cluster_points(diag, radius)
    return q @ u, diag, reps, labels, radius


def joint_spectrum(a, xs, rng=0):
    """Joint spectrum of a commuting normal tuple, read off a common eigenbasis."""
    xs = _check_tuple(a, xs)
    _, _, reps, _, radius = _joint_diagonalize(a, xs, rng)
    reps = sorted(reps, key=lambda t: _sort_key(t, radius))
    return JointSpectrumSet(np.array(reps, dtype=np.complex128).reshape(len(reps), len(xs)))


def in_joint_spectrum_oracle(a, xs, lam, rtol=1e-8, _sub=None):
    """True iff ``{x_j - lam_j 1}`` generate a proper ideal of ``C*(x_1..x_n, 1)``.

    The ideal is taken in the commutative algebra the tuple generates, not in
    ``a``: a simple ``a`` has no proper nonzero ideals at all.
    """
    sub = _sub if _sub is not None else _alg.subalgebra(a, xs)
    shifted = [as_matrix(x) - l * sub.unit for x, l in zip(xs, lam)]
    return _alg.ideal_dimension(sub, shifted, rtol) < sub.dim


def oracle_joint_spectrum(a, xs, extra_candidates=()):
    """Joint spectrum by the ideal oracle over the product of the individual spectra.

    Every joint-spectrum tuple lies in the product of coordinate spectra, so
    screening that finite product is exhaustive.  ``extra_candidates`` are
    screened too and reported separately (negative controls).
    """
    xs = _check_tuple(a, xs)
    specs = [spectrum(a, x).points for x in xs]
    sub = _alg.subalgebra(a, xs)
    accepted = [lam for lam in itertools.product(*specs) if in_joint_spectrum_oracle(a, xs, lam, _sub=sub)]
    extra = [tuple(c) for c in extra_candidates if in_joint_spectrum_oracle(a, xs, c, _sub=sub)]
    return accepted, extra


class StarPolynomial:
    """Complex *-polynomial in ``z_1..z_n, conj(z_1)..conj(z_n)``.

    ``terms`` maps exponent tuples ``(p_1..p_n, q_1..q_n)`` to coefficients.
    Evaluation on matrices assumes the arguments commute and are normal, so
    factor order is immaterial.
    """

    def __init__(self, n, terms):
        self.n = n
        self.terms = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 2 * n or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent tuple {exps} for n={n}")
            self.terms[exps] = self.terms.get(exps, 0) + complex(c)

    @classmethod
    def random(cls, n, degree, rng, n_terms=4):
        terms = {}
        for _ in range(n_terms):
            total = rng.integers(0, degree + 1)
            cuts = np.sort(rng.integers(0, total + 1, size=2 * n - 1))
            exps = np.diff(np.concatenate([[0], cuts, [total]]))
            terms[tuple(exps)] = rng.standard_normal() + 1j * rng.standard_normal()
        return cls(n, terms)

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, *z):
        z = np.asarray(z, dtype=np.complex128)
        total = 0j
        for exps, c in self.terms.items():
            p, q = exps[: self.n], exps[self.n:]
            total += c * np.prod(z ** np.array(p)) * np.prod(np.conj(z) ** np.array(q))
        return total

    def apply(self, xs, unit):
        xs = [as_matrix(x) for x in xs]
        out = np.zeros_like(unit, dtype=np.complex128)
        for exps, c in self.terms.items():
            term = unit.astype(np.complex128)
            for j, x in enumerate(xs):
                term = term @ np.linalg.matrix_power(x, exps[j]) if exps[j] else term
                qj = exps[self.n + j]
                term = term @ np.linalg.matrix_power(adjoint(x), qj) if qj else term
            out = out + c * term
        return out


@dataclass(frozen=True)
class SpectralMappingResult:
    holds: bool
    spectrum: SpectrumSet  # sigma(f(x, x*))
    image: SpectrumSet  # f applied to the joint spectrum
    distance: float


def spectral_mapping_check(a, xs, f, rng=0, atol=1e-8):
    """Compare ``sigma(f(x, x*))`` with ``f`` applied to the joint spectrum."""
    xs = _check_tuple(a, xs)
    js = joint_spectrum(a, xs, rng)
    fx = f.apply(xs, a.unit)
    lhs = spectrum(a, fx)
    rhs = _make_spectrum([f(*lam) for lam in js], a.tol, scale(fx))
    dist = lhs.hausdorff(rhs)
    return SpectralMappingResult(bool(dist <= atol), lhs, rhs, dist)


def functional_calculus(a, xs, f, rng=0, verify=True):
    """``f(x_1..x_n)`` for a commuting normal tuple and a function on the joint spectrum.

    ``f`` is called as ``f(lam_1, ..., lam_n)`` once per joint-spectrum point
    and must return a finite complex number there.
    """
    xs = _check_tuple(a, xs)
    basis, _, reps, labels, _ = _joint_diagonalize(a, xs, rng)
    values = []
    for lam in reps:
        try:
            v = complex(f(*lam))
        except (ArithmeticError, ValueError, TypeError) as exc:
            raise FunctionUndefinedOnSpectrum(f"f failed at {tuple(lam)}: {exc}") from exc
        if not np.isfinite(v):
            raise FunctionUndefinedOnSpectrum(f"f is not finite at {tuple(lam)}")
        values.append(v)
    diag = np.array([values[k] for k in labels], dtype=np.complex128)
    out = (basis * diag) @ adjoint(basis)
    if verify:
        sub = _alg.subalgebra(a, xs)
        if not sub.contains(out):
            raise NumericalError("functional calculus result left C*(x, 1)")
    return out


def _require_selfadjoint(a, x):
    x = _require_member(a, x)
    if np.linalg.norm(x - adjoint(x)) > a.tol.eps * scale(x):
        raise NotSelfAdjoint(f"||x - x*|| = {np.linalg.norm(x - adjoint(x)):.3e}")
    return 0.5 * (x + adjoint(x))


def pos_neg_parts(a, x):
    """``(x_+, x_-)`` with ``x = x_+ - x_-``, both positive, ``x_+ x_- = 0``."""
    x = _require_selfadjoint(a, x)
    xp = functional_calculus(a, [x], lambda t: max(t.real, 0.0), verify=False)
    xm = functional_calculus(a, [x], lambda t: -min(t.real, 0.0), verify=False)
    return 0.5 * (xp + adjoint(xp)), 0.5 * (xm + adjoint(xm))


def positive_power(a, x, alpha):
    """``x**alpha`` for positive ``x``; ``alpha <= 0`` needs ``x`` invertible in ``a``."""
    x = _require_member(a, x)
    if not _alg.is_positive(a, x):
        raise NotPositive("x is not positive")
    q = a.support
    s = scale(x)
    w, u = hermitian_eig(0.5 * (adjoint(q) @ (x + adjoint(x)) @ q), a.tol)
    if alpha <= 0 and w[0] <= a.tol.eps * s:
        raise NotInvertible(f"min eigenvalue {w[0]:.3e} with alpha={alpha}")
    w = np.clip(w, 0.0, None)
    if alpha > 0:
        vals = np.where(w > 0.0, w ** float(alpha), 0.0)
    else:
        vals = w ** float(alpha)
    v = q @ u
    out = (v * vals) @ adjoint(v)
    return 0.5 * (out + adjoint(out))
