import numpy as np
import pytest

from opalg.algebra import AlgebraPresentation, generate


def random_unitary(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + z.conj().T)


def random_complex(d, rng):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def algebra_of(*gens, unital=True, d=None):
    d = d or np.asarray(gens[0]).shape[0]
    return generate(AlgebraPresentation(d, tuple(np.asarray(g, dtype=complex) for g in gens), unital))


def full_matrix_algebra(d):
    return algebra_of(np.diag(np.arange(1.0, d + 1)), np.eye(d, k=1) + np.eye(d, k=-1))


def diagonal_algebra(d):
    return algebra_of(*[np.diag(np.eye(d)[i]) for i in range(d)])


def block_algebra(sizes, rng):
    """Direct sum of full matrix blocks, rotated by a random unitary."""
    d = sum(sizes)
    gens, off = [], 0
    for n in sizes:
        for g in (np.diag(np.arange(1.0, n + 1)), np.eye(n, k=1) + np.eye(n, k=-1)):
            m = np.zeros((d, d), dtype=complex)
            m[off:off + n, off:off + n] = g if n > 1 else 1.0
            gens.append(m)
        off += n
    u = random_unitary(d, rng)
    return algebra_of(*[u @ g @ u.conj().T for g in gens])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        name, out = RESULTS[number]
        status = "PASS" if out.passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2} {name}: {out.detail} ({out.seconds:.1f}s)")
