"""GNS representations of states, direct sums, and representability checks."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import AmbiguousRank, EmptyList
from .matkernel import adjoint, as_matrix, operator_norm
from .states import as_state


@dataclass(frozen=True, eq=False)
class GNSRep:
    """``pi_phi`` on ``A / N_phi`` in an orthonormal basis of the quotient.

    ``vectors[m]`` is the algebra element whose class is the m-th basis
    vector, so ``represent(x)[m, l] = phi(vectors[m]* x vectors[l])``.
    """

    algebra: object
    state: object
    vectors: np.ndarray  # (hilbert_dim, d, d)
    xi: np.ndarray
    null_dim: int

    @property
    def hilbert_dim(self):
        return self.vectors.shape[0]

    def represent(self, x):
        x = as_matrix(x)
        left = np.einsum("ab,mcb->mac", self.state.rho, np.conj(self.vectors))  # rho B_m*
        return np.einsum("mab,bc,lca->ml", left, x, self.vectors)

    @property
    def rep(self):
        return np.array([self.represent(b) for b in self.algebra.basis])


def gns(a, phi):
    """GNS construction by Gram-Schmidt over the algebra basis.

    A basis direction is dropped when its residual ``phi(r* r)`` is at most
    ``tol``; residuals inside ``(tol, 100 tol)`` are rank decisions too close
    to call and raise :class:`AmbiguousRank`.
    """
    phi = as_state(phi)
    tol = a.tol.eps
    basis = a.basis
    k = a.dim
    # gram[i, j] = <b_i, b_j> = phi(b_i* b_j), conjugate-linear on the left
    gram = np.einsum("ab,icb,jca->ij", phi.rho, np.conj(basis), basis)
    gram = 0.5 * (gram + adjoint(gram))
    qs = []
    for j in range(k):
        v = np.zeros(k, dtype=np.complex128)
        v[j] = 1.0
        for _ in range(2):
            for q in qs:
                v = v - (np.conj(q) @ gram @ v) * q
        n2 = float(np.real(np.conj(v) @ gram @ v))
        if n2 <= tol:
            continue
        if n2 < 100 * tol:
            raise AmbiguousRank(f"Gram residual {n2:.3e} inside [tol, 100 tol]")
        qs.append(v / np.sqrt(n2))
    vectors = np.array([np.tensordot(q, basis, axes=1) for q in qs])
    unit = a.unit
    xi = np.array([np.trace(phi.rho @ adjoint(v) @ unit) for v in vectors])
    return GNSRep(a, phi, vectors, xi, k - len(qs))


@dataclass(frozen=True, eq=False)
class DirectSumRep:
    components: tuple

    @property
    def hilbert_dim(self):
        return sum(c.hilbert_dim for c in self.components)

    def represent(self, x):
        return block_diag(*[c.represent(x) for c in self.components])


def direct_sum_rep(a, states):
    states = list(states)
    if not states:
        raise EmptyList("no states given")
    return DirectSumRep(tuple(gns(a, s) for s in states))


@dataclass(frozen=True)
class CertificateRow:
    norm_sq: float
    sup: float
    deficit: float


@dataclass(frozen=True)
class RepresentabilityReport:
    rows: tuple
    passed: bool


def representability_certificate(a, states, test_set, rtol=1e-6):
    """Check ``sup_phi phi(x* x) = ||x||^2`` over ``states`` for each test element."""
    states = [as_state(s) for s in states]
    rows = []
    for x in test_set:
        x = as_matrix(x)
        n2 = operator_norm(x) ** 2
        xx = adjoint(x) @ x
        sup = max((s(xx).real for s in states), default=0.0)
        rows.append(CertificateRow(n2, sup, n2 - sup))
    passed = all(r.deficit <= rtol * r.norm_sq for r in rows)
    return RepresentabilityReport(tuple(rows), passed)
