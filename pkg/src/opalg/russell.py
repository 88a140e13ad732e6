"""Finite truncations of a commutative algebra generated by pairwise-orthogonal pairs
of projections, in exact rational arithmetic.

Level ``n`` is ``C^(2^n)`` with coordinates indexed by binary strings of
length ``n``; string ``b_1 ... b_n`` is the integer whose binary digits they
are, so appending a bit maps ``u`` to ``2u + b``.  The generator
``p(k, b)`` is the indicator of the strings whose k-th bit (1-based) is b.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from .errors import LevelCap, NotState

MAX_LEVEL = 16
MAX_GNS_LEVEL = 8


def _bit(i, k, n):
    return (i >> (n - k)) & 1


@dataclass(frozen=True)
class RussellTruncation:
    level: int

    def __post_init__(self):
        if not 1 <= self.level <= MAX_LEVEL:
            raise LevelCap(f"level must lie in 1..{MAX_LEVEL}, got {self.level}")

    @property
    def dim(self):
        return 1 << self.level

    # Indicators are kept as Python ints (exact, and much faster than
    # Fraction); general elements use Fraction coordinates.
    @property
    def unit(self):
        return (1,) * self.dim

    def generator(self, k, b):
        if not 1 <= k <= self.level or b not in (0, 1):
            raise ValueError(f"no generator p({k}, {b}) at level {self.level}")
        n = self.level
        return tuple(int(_bit(i, k, n) == b) for i in range(self.dim))

    @cached_property
    def generators(self):
        return {(k, b): self.generator(k, b) for k in range(1, self.level + 1) for b in (0, 1)}

    def element(self, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        return coords

    @staticmethod
    def multiply(x, y):
        return tuple(a * b for a, b in zip(x, y))

    @staticmethod
    def add(x, y):
        return tuple(a + b for a, b in zip(x, y))

    @staticmethod
    def adjoint(x):
        return tuple(Fraction(a) for a in x)  # rational coordinates are real

    def monomial(self, pairs):
        """Product of ``p(k, b)`` over ``pairs``; the unit for an empty product."""
        out = self.unit
        for k, b in pairs:
            out = self.multiply(out, self.generators[(k, b)])
        return out

    def admissible_sets(self):
        """Every F choosing at most one generator from each block."""
        for choice in product((None, 0, 1), repeat=self.level):
            yield tuple((k + 1, b) for k, b in enumerate(choice) if b is not None)


def build_truncation(n):
    return RussellTruncation(n)


def tau(t, x):
    """Uniform average of the coordinates."""
    return Fraction(sum(x), t.dim)


@dataclass(frozen=True)
class TruncationState:
    level: int
    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != 1 << self.level:
            raise ValueError(f"level {self.level} needs {1 << self.level} weights")
        if any(x < 0 for x in w):
            raise NotState("negative weight")
        if sum(w) != 1:
            raise NotState(f"weights sum to {sum(w)}")
        object.__setattr__(self, "weights", w)

    def __call__(self, x):
        return sum((w * a for w, a in zip(self.weights, x)), Fraction(0))

    @property
    def is_point_mass(self):
        return sum(1 for w in self.weights if w) == 1

    @classmethod
    def point_mass(cls, level, index):
        w = [Fraction(0)] * (1 << level)
        w[index] = Fraction(1)
        return cls(level, tuple(w))

    @classmethod
    def uniform(cls, level):
        return cls(level, (Fraction(1, 1 << level),) * (1 << level))


def tau_state(t):
    return TruncationState.uniform(t.level)


def restrict_state(s):
    """Restriction from level n+1 to level n: ``w(u) = w(u0) + w(u1)``."""
    if s.level < 1:
        raise ValueError("cannot restrict below level 0")
    w = s.weights
    return TruncationState(s.level - 1, tuple(w[2 * u] + w[2 * u + 1] for u in range(len(w) // 2)))


def restrict_to(s, n):
    if not 0 <= n <= s.level:
        raise ValueError(f"cannot restrict level {s.level} to level {n}")
    while s.level > n:
        s = restrict_state(s)
    return s


def k_set_member(s, n):
    """True iff the restriction of ``s`` to level ``n`` is pure."""
    return restrict_to(s, n).is_point_mass


def extreme_states(t):
    return [TruncationState.point_mass(t.level, i) for i in range(t.dim)]


@dataclass(frozen=True)
class TauGNS:
    """GNS data of the uniform state: multiplication operators on ``C^(2^n)``.

    The cyclic vector has entries ``2^(-n/2)``, irrational for odd n, so it is
    carried by its exact squared entries.
    """

    level: int

    @property
    def hilbert_dim(self):
        return 1 << self.level

    @property
    def null_dim(self):
        return 0

    @property
    def xi_squared(self):
        return (Fraction(1, self.hilbert_dim),) * self.hilbert_dim

    @property
    def xi(self):
        return np.full(self.hilbert_dim, 2.0 ** (-self.level / 2))

    def represent(self, x):
        """Diagonal of ``pi(x)`` in the string basis."""
        return tuple(Fraction(a) for a in x)

    def represent_matrix(self, x):
        return np.diag(np.array([float(a) for a in x]))

    def vector_state(self, x):
        """``<xi, pi(x) xi>``, exactly."""
        return sum((a * w for a, w in zip(self.represent(x), self.xi_squared)), Fraction(0))

    @staticmethod
    def norm(x):
        return max(abs(Fraction(a)) for a in x)


def gns_of_tau(t):
    if t.level > MAX_GNS_LEVEL:
        raise LevelCap(f"GNS of tau is capped at level {MAX_GNS_LEVEL}")
    return TauGNS(t.level)


def _kron(x, y):
    return tuple(a * b for a in x for b in y)


def tensor_isomorphism_check(n, m):
    """Check that ``p(k, b) -> p(k, b) (x) 1`` for ``k <= n`` and
    ``p(n + j, b) -> 1 (x) p(j, b)`` carries the generators of level ``n + m``
    onto those of the tensor product of levels n and m, coordinate for coordinate."""
    if n < 1 or m < 1 or n + m > MAX_GNS_LEVEL:
        raise LevelCap(f"tensor check needs n, m >= 1 and n + m <= {MAX_GNS_LEVEL}")
    big, left, right = RussellTruncation(n + m), RussellTruncation(n), RussellTruncation(m)
    if big.dim != left.dim * right.dim:
        return False
    for (k, b), g in big.generators.items():
        image = _kron(left.generators[(k, b)], right.unit) if k <= n else _kron(left.unit, right.generators[(k - n, b)])
        if image != g:
            return False
    return True
