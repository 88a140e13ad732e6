"""Acceptance suite: eleven criteria at their stated tolerances.

Each criterion records one PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and by ``python3 tests/test_acceptance.py``.
Seeds are fixed so every run sees the same instances.
"""
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from opalg import gns as gns_mod
from opalg import projections as proj
from opalg import russell, spectral, states, trees
from opalg.algebra import AlgebraPresentation, generate, is_positive
from opalg.matkernel import operator_norm
from opalg.spectral import StarPolynomial
from opalg.states import State

from conftest import block_algebra, full_matrix_algebra, random_unitary

RESULTS = {}


@dataclass
class Outcome:
    passed: bool
    detail: str
    seconds: float = 0.0


def record(number, name):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            out = Outcome(bool(ok), detail, time.perf_counter() - t0)
            RESULTS[number] = (name, out)
            line = f"[{'PASS' if out.passed else 'FAIL'}] criterion {number:>2} {name}: {detail} ({out.seconds:.1f}s)"
            print(line)
            return out

        run.number = number
        return run

    return wrap


def _commuting_normal_tuple(rng, d, n):
    """Conjugated diagonal tuple; one coordinate on a small grid so joint spectra repeat."""
    u = random_unitary(d, rng)
    diags = [rng.integers(-1, 2, d) + 1j * rng.integers(-1, 2, d)]
    diags += [rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(n - 1)]
    return [u @ np.diag(v) @ u.conj().T for v in diags], diags


# 1 -------------------------------------------------------------------------
@record(1, "spectral radius")
def criterion_1():
    rng = np.random.default_rng(101)
    m4 = full_matrix_algebra(4)
    gaps = []
    for _ in range(100):
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        sr = spectral.spectral_radius_sequence(m4, x, 16)
        gaps.append(abs(sr.limit_candidate - sr.radius))
    dyadic = []
    for _ in range(100):
        h = m4.random_element(rng, hermitian=True)
        dy = spectral.spectral_radius_sequence(m4, h, 16).dyadic()
        dyadic.append(np.ptp(dy))
    within = sum(g <= 1e-4 for g in gaps)
    ok = within == 100 and max(dyadic) <= 1e-9
    return ok, (f"{within}/100 general within 1e-4 (min gap {min(gaps):.2e}, max {max(gaps):.2e}); "
                f"self-adjoint dyadic spread max {max(dyadic):.1e}")


# 2 -------------------------------------------------------------------------
@record(2, "spectral mapping")
def criterion_2():
    rng = np.random.default_rng(202)
    m5 = full_matrix_algebra(5)
    worst, mismatches = 0.0, 0
    for i in range(100):
        xs, _ = _commuting_normal_tuple(rng, 5, 2)
        f = StarPolynomial.random(2, 3, rng)
        res = spectral.spectral_mapping_check(m5, xs, f, rng=i)
        worst = max(worst, res.distance)
        js = spectral.joint_spectrum(m5, xs, rng=i)
        oracle, _ = spectral.oracle_joint_spectrum(m5, xs)
        same = len(js) == len(oracle) and spectral.hausdorff(np.array(list(js)), np.array(oracle)) <= 1e-8
        mismatches += not same
    return worst <= 1e-8 and mismatches == 0, f"max Hausdorff {worst:.2e}, oracle mismatches {mismatches}/100"


# 3 -------------------------------------------------------------------------
@record(3, "functional calculus isometry")
def criterion_3():
    rng = np.random.default_rng(303)
    m4 = full_matrix_algebra(4)
    worst_iso, worst_hom = 0.0, 0.0
    for i in range(100):
        xs, diags = _commuting_normal_tuple(rng, 4, 2)
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)

        def f(z, w, c=c):
            return c[0] * np.exp(1j * z.real) * abs(w) + c[1] * np.conj(z) * w + c[2] * abs(z - w)

        def g(z, w):
            return np.cos(w) + z

        fx = spectral.functional_calculus(m4, xs, f, rng=i)
        gx = spectral.functional_calculus(m4, xs, g, rng=i)
        fgx = spectral.functional_calculus(m4, xs, lambda z, w: f(z, w) * g(z, w), rng=i)
        sumx = spectral.functional_calculus(m4, xs, lambda z, w: f(z, w) + g(z, w), rng=i)
        conjx = spectral.functional_calculus(m4, xs, lambda z, w: np.conj(f(z, w)), rng=i)
        top = max(abs(f(z, w)) for z, w in zip(*diags))
        nf = operator_norm(fx)
        worst_iso = max(worst_iso, abs(nf - top) / max(1.0, top))
        s = max(1.0, nf * operator_norm(gx))
        worst_hom = max(worst_hom,
                        operator_norm(fgx - fx @ gx) / s,
                        operator_norm(sumx - fx - gx) / s,
                        operator_norm(conjx - fx.conj().T) / max(1.0, nf))
    ok = worst_iso <= 1e-9 and worst_hom <= 1e-9
    return ok, f"max isometry defect {worst_iso:.1e}, max homomorphism residual {worst_hom:.1e}"


# 4 -------------------------------------------------------------------------
@record(4, "unique positive square root")
def criterion_4():
    rng = np.random.default_rng(404)
    m4 = full_matrix_algebra(4)
    worst = 0.0
    for _ in range(100):
        z = m4.random_element(rng)
        x = z.conj().T @ z
        r = spectral.positive_power(m4, x, 0.5)
        worst = max(worst, operator_norm(r @ r - x))
    d3 = generate(AlgebraPresentation(3, tuple(np.diag(e) for e in np.eye(3))))
    unique_ok = 0
    for entries in product((0, 1, 4, 9), repeat=3):
        x = np.diag(np.array(entries, dtype=float))
        candidates = {tuple(s * np.sqrt(e) for s, e in zip(signs, entries)) for signs in product((1, -1), repeat=3)}
        positive = [c for c in candidates if is_positive(d3, np.diag(c))]
        root = spectral.positive_power(d3, x, 0.5)
        unique_ok += len(positive) == 1 and np.allclose(np.diag(positive[0]), root, atol=1e-12)
    return worst <= 1e-9 and unique_ok == 64, f"max residual {worst:.1e}; unique root on {unique_ok}/64 diagonals"


# 5 -------------------------------------------------------------------------
@record(5, "Hahn-Banach extension")
def criterion_5():
    rng = np.random.default_rng(505)
    worst_res, worst_ratio, failures = 0.0, 0.0, 0
    for _ in range(50):
        gens = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(rng.integers(1, 3))]
        a = generate(AlgebraPresentation(3, tuple(gens)))
        k = int(rng.integers(1, 4))
        ys = [a.random_element(rng) for _ in range(k)]
        vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        m = states.subspace_norm(a, ys, vals)
        try:
            res = states.hahn_banach_extend(a, ys, vals, m)
        except ArithmeticError:
            failures += 1
            continue
        worst_res = max(worst_res, max(abs(res.functional(y) - v) for y, v in zip(ys, vals)))
        worst_ratio = max(worst_ratio, res.norm / m)
    m3 = full_matrix_algebra(3)
    worst_attain, worst_route = 0.0, 0.0
    for _ in range(10):
        x = m3.random_element(rng)
        xx = x.conj().T @ x
        n2 = operator_norm(x) ** 2
        vb = states.norm_attaining_state(m3, x, route="hahn-banach")(xx).real
        va = states.norm_attaining_state(m3, x)(xx).real
        worst_attain = max(worst_attain, 1 - vb / n2)
        worst_route = max(worst_route, abs(va - vb) / n2)
    ok = failures == 0 and worst_res <= 1e-12 and worst_ratio <= 1 + 1e-6 and worst_attain <= 1e-6 and worst_route <= 1e-6
    return ok, (f"{failures} failures, restriction residual {worst_res:.1e}, norm ratio {worst_ratio:.8f}; "
                f"state shortfall {worst_attain:.1e}, route gap {worst_route:.1e}")


# 6 -------------------------------------------------------------------------
@record(6, "Gelfand transform")
def criterion_6():
    rng = np.random.default_rng(606)
    count_ok = iso_ok = mult_ok = surj_ok = 0
    worst_iso = worst_mult = 0.0
    for _ in range(50):
        u = random_unitary(5, rng)
        pool = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        lam = np.concatenate([pool, rng.choice(pool, 2)])
        x = u @ np.diag(lam) @ u.conj().T
        a = generate(AlgebraPresentation(5, (x,)))
        g = states.gelfand_transform(a)
        count_ok += len(g.characters) == len(set(np.round(lam, 12)))
        iso = mult = 0.0
        for _ in range(5):
            y, z = a.random_element(rng), a.random_element(rng)
            iso = max(iso, abs(np.max(np.abs(g(y))) - operator_norm(y)) / max(1.0, operator_norm(y)))
            mult = max(mult, np.max(np.abs(g(y @ z) - g(y) * g(z))) / max(1.0, operator_norm(y) * operator_norm(z)))
        worst_iso, worst_mult = max(worst_iso, iso), max(worst_mult, mult)
        iso_ok += iso <= 1e-8
        mult_ok += mult <= 1e-9
        surj_ok += g.surjective and a.dim == len(g.characters)
    ok = count_ok == iso_ok == mult_ok == surj_ok == 50
    return ok, (f"|X| exact {count_ok}/50, isometric {iso_ok}/50 (max {worst_iso:.1e}), "
                f"multiplicative {mult_ok}/50 (max {worst_mult:.1e}), surjective {surj_ok}/50")


# 7 -------------------------------------------------------------------------
@record(7, "GNS of a faithful state")
def criterion_7():
    rng = np.random.default_rng(707)
    worst_iso = worst_hom = worst_xi = 0.0
    faithful_all = True
    for _ in range(20):
        sizes = list(rng.integers(1, 3, size=rng.integers(1, 4)))
        a = block_algebra(sizes, rng)
        family = [states.norm_attaining_state(a, b) for b in a.basis] + states.tracial_state_set(a)
        phi, faithful = states.faithful_state(a, family)
        faithful_all &= faithful
        rep = gns_mod.gns(a, phi)
        for b in a.basis:
            worst_iso = max(worst_iso, abs(operator_norm(rep.represent(b)) - operator_norm(b)))
            worst_xi = max(worst_xi, abs(np.vdot(rep.xi, rep.represent(b) @ rep.xi) - phi(b)))
        for _ in range(5):
            x, y = a.random_element(rng), a.random_element(rng)
            s = max(1.0, operator_norm(x) * operator_norm(y))
            worst_hom = max(worst_hom, operator_norm(rep.represent(x @ y) - rep.represent(x) @ rep.represent(y)) / s)
    ok = faithful_all and worst_iso <= 1e-6 and worst_hom <= 1e-9 and worst_xi <= 1e-9
    return ok, (f"faithful {faithful_all}, isometry defect {worst_iso:.1e}, "
                f"homomorphism residual {worst_hom:.1e}, cyclic-vector defect {worst_xi:.1e}")


# 8 -------------------------------------------------------------------------
@record(8, "Krein-Milman and representability")
def criterion_8():
    rng = np.random.default_rng(808)
    worst_resid, non_extreme = 0.0, 0
    for _ in range(20):
        a = block_algebra(list(rng.integers(1, 3, size=rng.integers(1, 4))), rng)
        z = a.random_element(rng)
        rho = z @ z.conj().T
        s = State(a, rho / np.trace(rho @ a.unit).real)
        parts = states.krein_milman_decompose(a, s, rng)
        worst_resid = max(worst_resid, np.linalg.norm(sum(w * p.rho for w, p in parts) - s.rho))
        non_extreme += sum(not states.is_extreme(a, p) for _, p in parts)
    shortfalls = []
    for i in range(100):
        a = block_algebra(list(rng.integers(1, 3, size=rng.integers(1, 4))), rng)
        x = a.random_element(rng)
        n2 = operator_norm(x) ** 2
        xx = x.conj().T @ x
        if a.is_commutative:
            extremes = states.pure_states(a)
        else:
            extremes = [p for _, p in states.krein_milman_decompose(a, states.norm_attaining_state(a, x), rng)]
        non_extreme += sum(not states.is_extreme(a, p) for p in extremes)
        shortfalls.append(1 - max(p(xx).real for p in extremes) / n2)
    ok = worst_resid <= 1e-8 and non_extreme == 0 and max(shortfalls) <= 1e-6
    return ok, (f"recombine residual {worst_resid:.1e}, non-extreme parts {non_extreme}, "
                f"max relative shortfall {max(shortfalls):.1e} over 100 x")


# 9 -------------------------------------------------------------------------
@record(9, "truncation algebras (exact)")
def criterion_9():
    tau_bad = 0
    n_sets = 0
    for n in range(1, 9):
        t = russell.RussellTruncation(n)
        for f in t.admissible_sets():
            n_sets += 1
            tau_bad += russell.tau(t, t.monomial(f)) != Fraction(1, 2 ** len(f))
    restrict_bad = 0
    for n in range(0, 8):
        for i in range(2 ** (n + 1)):
            restrict_bad += not russell.restrict_state(russell.TruncationState.point_mass(n + 1, i)).is_point_mass
    monotone_bad = 0
    vertices = range(32)
    samples = [russell.TruncationState.point_mass(5, i) for i in vertices]
    samples += [russell.TruncationState(5, tuple(Fraction(int(k == i) + int(k == j), 2) for k in vertices))
                for i in vertices for j in vertices if i < j]
    for s in samples:
        member = [russell.k_set_member(s, n) for n in range(6)]
        monotone_bad += any(member[n + 1] and not member[n] for n in range(5))
    ok = tau_bad == restrict_bad == monotone_bad == 0
    return ok, (f"tau exact on {n_sets - tau_bad}/{n_sets} admissible sets; {restrict_bad} restriction failures; "
                f"{monotone_bad} monotonicity failures over {len(samples)} states")


# 10 ------------------------------------------------------------------------
def _herm2_norms(ds):
    # D = a 1 + v.sigma has norm |a| + |v|
    a = 0.5 * (ds[:, 0, 0] + ds[:, 1, 1]).real
    v = np.sqrt((0.5 * (ds[:, 0, 0] - ds[:, 1, 1]).real) ** 2 + np.abs(ds[:, 0, 1]) ** 2)
    return np.abs(a) + v


@record(10, "dense projections")
def criterion_10():
    rng = np.random.default_rng(1010)
    eps = 0.05
    net = proj.selfadjoint_ball_net_m2(eps)
    _, uniq = proj.dense_projections(net, eps).unique()
    worst = 0.0
    for _ in range(100):
        r = int(rng.integers(0, 3))
        u = random_unitary(2, rng)
        target = u[:, :r] @ u[:, :r].conj().T
        worst = max(worst, float(np.min(_herm2_norms(uniq - target))))
    stab = {}
    for d in (2, 3, 4):
        ps = []
        for _ in range(d + 2):
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            ps.append(np.outer(v, v.conj()) / np.vdot(v, v).real)
        stab[d] = proj.flag_sequence(ps).stabilization
    ok = worst < 2 * eps and all(stab[d] == d for d in stab)
    return ok, f"worst target distance {worst:.4f} (< {2 * eps}), flag stabilization {stab}"


# 11 ------------------------------------------------------------------------
@record(11, "tree ranks and discrete index")
def criterion_11():
    from test_trees import random_tree

    rng = np.random.default_rng(1111)
    violations = mismatches = 0
    for _ in range(1000):
        t = random_tree(rng, max_nodes=200)
        table = trees.rank(t)
        violations += len(trees.rank_violations(t, table))
        mismatches += table.ranks != trees.rank_all_extensions(t).ranks
    family = [np.diag(np.array(bits, dtype=float)) for bits in product((0, 1), repeat=5)]
    net = [np.diag(np.array(v)) for v in product((0.0, 0.25, 0.5, 0.75, 1.0), repeat=5)]
    idx = proj.epsilon_discrete_index(family, net, 1.0)
    ok = violations == 0 and mismatches == 0 and len(set(idx)) == 32
    return ok, f"{violations} rank violations, {mismatches} oracle mismatches, {len(set(idx))}/32 distinct indices"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number:02d}" for c in CRITERIA])
def test_criterion(criterion):
    out = criterion()
    assert out.passed, out.detail


if __name__ == "__main__":
    for c in CRITERIA:
        c()
