"""Command-line front end.

Each invocation prints one JSON report (sorted keys) holding the command
echo, a digest of the input files, the tolerances used, the results and one
boolean per invariant checked.  The exit status is 0 iff every check passes.
"""
import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import algebra as alg
from . import gns as gns_mod
from . import projections as proj
from . import russell, spectral, states, trees
from .errors import LevelCap, OpAlgError, ParseError, ShapeError, UnknownCommand
from .matkernel import Tolerance, adjoint, operator_norm

COMMANDS = ("spectrum", "jspec", "calculus", "states", "gns", "gelfand",
            "projections", "russell", "trees", "certify")
RTOL_CHECK = 1e-6  # relative slack for norm identities reported as checks
DIGITS = 12


# ---------------------------------------------------------------- parsing


def _gaussian_rational(entry, where, path):
    if not (isinstance(entry, list) and len(entry) == 4 and all(isinstance(v, int) and not isinstance(v, bool) for v in entry)):
        raise ParseError(f"{where}: expected [re_num, re_den, im_num, im_den] integers", path=path)
    rn, rd, im_n, im_d = entry
    if rd == 0 or im_d == 0:
        raise ParseError(f"{where}: zero denominator", path=path)
    return Fraction(rn, rd), Fraction(im_n, im_d)


def parse_algebra_spec(source, path=None):
    """Parse an algebra spec given as JSON text or a path.

    Format: ``{"ambient_dim": d, "unital": bool, "generators": [G, ...]}``
    where each ``G`` is a d x d list of ``[re_num, re_den, im_num, im_den]``.
    """
    if isinstance(source, Path) or (path is None and isinstance(source, str) and not source.lstrip().startswith("{")):
        path = str(source)
        source = Path(source).read_text()
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, path) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", path=path)
    d = doc.get("ambient_dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError("ambient_dim must be a positive integer", path=path)
    unital = doc.get("unital", True)
    if not isinstance(unital, bool):
        raise ParseError("unital must be a boolean", path=path)
    gens = doc.get("generators", [])
    if not isinstance(gens, list):
        raise ParseError("generators must be a list", path=path)
    exact, mats = [], []
    for g, gen in enumerate(gens):
        if not isinstance(gen, list) or len(gen) != d or any(not isinstance(r, list) or len(r) != d for r in gen):
            raise ShapeError(f"generator {g} is not {d}x{d}")
        rows = tuple(tuple(_gaussian_rational(e, f"generators[{g}][{i}][{j}]", path)
                           for j, e in enumerate(row)) for i, row in enumerate(gen))
        exact.append(rows)
        mats.append(np.array([[complex(float(re), float(im)) for re, im in row] for row in rows]))
    try:
        return alg.AlgebraPresentation(d, tuple(mats), unital, tuple(exact))
    except ValueError as exc:
        raise ParseError(str(exc), path=path) from None


# ---------------------------------------------------------------- serialization


def _num(x):
    return round(float(x), DIGITS) + 0.0


def _cpair(z):
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _points(spec):
    return sorted(_cpair(z) for z in spec)


def _matrix(m):
    return [[_cpair(z) for z in row] for row in np.asarray(m)]


# ---------------------------------------------------------------- commands


class Context:
    def __init__(self, args):
        self.args = args
        self.tol = Tolerance(args.tol)
        self.rng = np.random.default_rng(args.seed)
        self.checks = {}

    def check(self, name, ok):
        self.checks[name] = bool(ok)

    def algebra(self):
        p = parse_algebra_spec(Path(self.args.spec))
        return p, alg.generate(p, self.tol)


def _relative_ok(lhs, rhs):
    return abs(lhs - rhs) <= RTOL_CHECK * max(1.0, abs(rhs))


def cmd_spectrum(ctx):
    p, a = ctx.algebra()
    out = []
    for i, x in enumerate(p.generators):
        sr = spectral.spectral_radius_sequence(a, x, 16)
        out.append({"spectrum": _points(spectral.spectrum(a, x)),
                    "radius": _num(sr.radius), "norm_root_min": _num(sr.limit_candidate)})
        ctx.check(f"gen{i}.radius_le_norm_roots", sr.radius <= sr.limit_candidate * (1 + RTOL_CHECK) + ctx.tol.eps)
        if np.allclose(x, adjoint(x), atol=ctx.tol.eps):
            dy = sr.dyadic()
            ctx.check(f"gen{i}.dyadic_constant", np.ptp(dy) <= 1e-9 * max(1.0, dy[0]))
    return {"dim": a.dim, "generators": out}


def cmd_jspec(ctx):
    p, a = ctx.algebra()
    xs = list(p.generators)
    js = spectral.joint_spectrum(a, xs, ctx.args.seed)
    oracle, _ = spectral.oracle_joint_spectrum(a, xs)
    mine = sorted(tuple(_cpair(z) for z in lam) for lam in js)
    theirs = sorted(tuple(_cpair(z) for z in lam) for lam in oracle)
    ctx.check("matches_ideal_oracle", len(mine) == len(theirs)
              and spectral.hausdorff(np.array(list(js)), np.array(oracle)) <= 1e-8)
    return {"joint_spectrum": [list(t) for t in mine], "oracle_size": len(theirs)}


def cmd_calculus(ctx):
    """``|x| = (x* x)^(1/2)`` per generator, checked against ``||x||`` and ``|x|^2 = x* x``."""
    p, a = ctx.algebra()
    out = []
    for i, x in enumerate(p.generators):
        xx = adjoint(x) @ x
        r = spectral.positive_power(a, xx, 0.5)
        nx = operator_norm(x)
        out.append({"abs_norm": _num(operator_norm(r)), "abs_spectrum": _points(spectral.spectrum(a, r))})
        ctx.check(f"gen{i}.square", operator_norm(r @ r - xx) <= 1e-9 * max(1.0, nx**2))
        ctx.check(f"gen{i}.isometric", _relative_ok(operator_norm(r), nx))
    return {"generators": out}


def cmd_states(ctx):
    p, a = ctx.algebra()
    out = []
    attained = []
    for i, x in enumerate(p.generators):
        s = states.norm_attaining_state(a, x)
        attained.append(s)
        nx2 = operator_norm(x) ** 2
        val = s(adjoint(x) @ x).real
        out.append({"norm_sq": _num(nx2), "state_value": _num(val)})
        ctx.check(f"gen{i}.norm_attained", val >= nx2 * (1 - RTOL_CHECK) - ctx.tol.eps)
    phi, faithful = states.faithful_state(a, attained + states.tracial_state_set(a))
    parts = states.krein_milman_decompose(a, phi, ctx.rng)
    recombined = sum(w * s.rho for w, s in parts)
    resid = float(np.linalg.norm(recombined - phi.rho))
    ctx.check("faithful", faithful)
    ctx.check("decompose_recombine", resid <= 1e-8)
    return {"norm_attaining": out, "faithful_extremes": len(parts), "recombine_residual": _num(resid)}


def _faithful(a):
    return states.faithful_state(a, states.tracial_state_set(a))[0]


def cmd_gns(ctx):
    _, a = ctx.algebra()
    phi = _faithful(a)
    rep = gns_mod.gns(a, phi)
    worst = 0.0
    for b in a.basis:
        worst = max(worst, abs(operator_norm(rep.represent(b)) - operator_norm(b)))
    xi_err = max(abs(np.vdot(rep.xi, rep.represent(b) @ rep.xi) - phi(b)) for b in a.basis)
    x, y = a.random_element(ctx.rng), a.random_element(ctx.rng)
    hom = operator_norm(rep.represent(x @ y) - rep.represent(x) @ rep.represent(y))
    ctx.check("isometric", worst <= 1e-6)
    ctx.check("cyclic_vector", xi_err <= 1e-9)
    ctx.check("homomorphism", hom <= 1e-9 * max(1.0, operator_norm(x) * operator_norm(y)))
    return {"hilbert_dim": rep.hilbert_dim, "null_dim": rep.null_dim,
            "isometry_defect": _num(worst), "cyclic_defect": _num(xi_err)}


def _gelfand_checks(ctx, a):
    g = states.gelfand_transform(a)
    iso = 0.0
    for _ in range(8):
        x = a.random_element(ctx.rng)
        iso = max(iso, abs(np.max(np.abs(g(x))) - operator_norm(x)))
    ctx.check("gelfand.isometric", iso <= 1e-8)
    ctx.check("gelfand.surjective", g.surjective)
    return {"characters": len(g.characters), "isometry_defect": _num(iso)}


def cmd_gelfand(ctx):
    _, a = ctx.algebra()
    return _gelfand_checks(ctx, a)


def cmd_projections(ctx):
    eps = ctx.args.eps
    net = proj.selfadjoint_ball_net_m2(eps)
    dense = proj.dense_projections(net, eps, ctx.tol)
    _, uniq = dense.unique()
    worst = 0.0
    for _ in range(ctx.args.targets):
        v = ctx.rng.standard_normal(2) + 1j * ctx.rng.standard_normal(2)
        v /= np.linalg.norm(v)
        target = np.outer(v, np.conj(v))
        worst = max(worst, float(np.min(np.linalg.norm(uniq - target, ord=2, axis=(1, 2)))))
    ctx.check("targets_within_2eps", worst < 2 * eps)
    return {"net_size": len(net), "emitted": len(dense), "unique": len(uniq),
            "skipped": len(dense.skipped), "worst_target_distance": _num(worst), "eps": eps}


def cmd_russell(ctx):
    level = ctx.args.level
    t = russell.build_truncation(level)
    if level > russell.MAX_GNS_LEVEL:
        raise LevelCap(f"the tau table is capped at level {russell.MAX_GNS_LEVEL}")
    table, ok = {}, True
    for f in t.admissible_sets():
        val = russell.tau(t, t.monomial(f))
        key = ",".join(f"p{k}{b}" for k, b in f) or "1"
        table[key] = str(val)
        ok &= val == Fraction(1, 2 ** len(f))
    ctx.check("tau_dyadic_exact", ok)
    return {"level": level, "dim": t.dim, "tau": table}


def cmd_trees(ctx):
    t = trees.parse_tree(Path(ctx.args.spec).read_text(), path=ctx.args.spec)
    if ctx.args.action == "section":
        x = [int(v) for v in ctx.args.x.split(",")] if ctx.args.x else []
        res = trees.analytic_membership(t, x, ctx.args.depth_budget)
        return {"outcome": type(res).__name__, "detail": _tree_detail(res)}
    if ctx.args.action != "rank":
        raise UnknownCommand(f"unknown trees action {ctx.args.action!r}")
    table = trees.rank(t)
    ctx.check("strictly_decreasing", not trees.rank_violations(t, table))
    ctx.check("matches_all_extensions", table.ranks == trees.rank_all_extensions(t).ranks)
    ranks = {",".join(map(_label_str, s)) or "()": r for s, r in table.ranks.items()}
    return {"root_rank": table.root, "nodes": len(t), "ranks": ranks}


def _tree_detail(res):
    if isinstance(res, trees.NoBranchExhausted):
        return {"explored": res.explored}
    return {"prefix": list(res.prefix)}


def _label_str(label):
    return f"{label[0]}:{label[1]}" if isinstance(label, tuple) else str(label)


def cmd_certify(ctx):
    p, a = ctx.algebra()
    out = {"dim": a.dim, "commutative": a.is_commutative}
    if a.is_commutative:
        out["gelfand"] = _gelfand_checks(ctx, a)
    tests = list(p.generators) + list(a.basis) + [a.random_element(ctx.rng) for _ in range(8)]
    phi = _faithful(a)
    extremes = [s for _, s in states.krein_milman_decompose(a, phi, ctx.rng)]
    if not a.is_commutative:
        extremes += [states.norm_attaining_state(a, x) for x in tests]
    report = gns_mod.representability_certificate(a, extremes, tests, RTOL_CHECK)
    ctx.check("representability", report.passed)
    out["representability_max_deficit"] = _num(max(r.deficit / max(r.norm_sq, 1e-300) for r in report.rows))
    return out


HANDLERS = {
    "spectrum": cmd_spectrum, "jspec": cmd_jspec, "calculus": cmd_calculus,
    "states": cmd_states, "gns": cmd_gns, "gelfand": cmd_gelfand,
    "projections": cmd_projections, "russell": cmd_russell, "trees": cmd_trees,
    "certify": cmd_certify,
}


# ---------------------------------------------------------------- driver


def build_parser():
    parser = argparse.ArgumentParser(prog="opalg", description="Finite-dimensional operator algebra toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "jspec", "calculus", "states", "gns", "gelfand", "certify"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("spec", help="algebra spec file (JSON)")
    sp = sub.add_parser("projections", parents=[common])
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--targets", type=int, default=100)
    sp = sub.add_parser("russell", parents=[common])
    sp.add_argument("--level", type=int, default=3)
    sp = sub.add_parser("trees", parents=[common])
    sp.add_argument("action", help="rank, or section (branch search in T_x)")
    sp.add_argument("spec", help="tree file")
    sp.add_argument("--depth-budget", type=int, default=64)
    sp.add_argument("--x", default="", help="comma-separated sequence for section")
    return parser


def _digest(args):
    h = hashlib.sha256()
    spec = getattr(args, "spec", None)
    if spec is not None:
        h.update(Path(spec).read_bytes())
    return h.hexdigest()


def run(command, args):
    """Dispatch ``command`` and return ``(report, exit_status)``."""
    if command not in HANDLERS:
        raise UnknownCommand(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    ctx = Context(args)
    report = {
        "command": command,
        "arguments": {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "output")},
        "tolerances": {"tol": args.tol, "check_rtol": RTOL_CHECK},
        "seed": args.seed,
    }
    try:
        report["inputs_sha256"] = _digest(args)
        report["results"] = HANDLERS[command](ctx)
        report["error"] = None
    except (OpAlgError, OSError) as exc:
        report["results"] = None
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    report["checks"] = ctx.checks
    report["passed"] = report["error"] is None and all(ctx.checks.values())
    return report, 0 if report["passed"] else 1


def _emit(report, output):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in HANDLERS:
        exc = UnknownCommand(f"unknown command {argv[0]!r}; expected one of {', '.join(COMMANDS)}")
        _emit({"command": argv[0], "error": {"type": "UnknownCommand", "message": str(exc)},
               "checks": {}, "passed": False}, None)
        return 2
    args = build_parser().parse_args(argv)
    report, status = run(args.command, args)
    _emit(report, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
