"""Command-line front end.

Subcommands ``certify``, ``solve``, ``geometry`` and ``demo``.  Results go to
stdout as JSON; demo transcripts go to stderr.  Atom indices are 1-based in
everything the user sees.

Exit codes: 0 success, 1 parse error or unknown demo, 2 dimension
mismatch, 3 negative verdict (representation not l1-unique, or a demo
mismatch), 4 infeasible, 5 unbounded polar polytope, 6 enumeration guard
exceeded.
"""

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import replace

import numpy as np

from .certificates import Representation, certify, check_erc
from .errors import GuardExceededError, InfeasibleError, UnboundedPolarError
from .numerics import DEFAULT_TOL
from .polytope import (
    AtomMatrix,
    SignedSupport,
    cone_contains,
    enumerate_polar_vertices,
    is_k_neighbourly,
    spark,
)
from .pursuit import basis_pursuit, basis_pursuit_brute, mp, omp, recover_primal_from_dual

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DIMENSION = 2
EXIT_NEGATIVE = 3
EXIT_INFEASIBLE = 4
EXIT_UNBOUNDED_POLAR = 5
EXIT_GUARD = 6

DEMO_TOL = 1e-9


class ParseError(ValueError):
    pass


class DimensionError(ValueError):
    pass


# -- I/O ---------------------------------------------------------------------

def parse_dictionary(text):
    """Parse whitespace-delimited rows; columns are atoms, ``#`` lines are comments."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = [float(tok) for tok in stripped.split()]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError(f"line {lineno}: non-finite entry")
        rows.append(row)
    if not rows:
        raise ParseError("dictionary has no rows")
    if len({len(r) for r in rows}) != 1:
        raise ParseError("dictionary rows have different lengths")
    try:
        return AtomMatrix(np.array(rows))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_dictionary(path):
    try:
        with open(path) as fh:
            return parse_dictionary(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def parse_vector_spec(spec, length):
    """Dense ``"1 0 2"`` / ``"1,0,2"`` or sparse ``"1:1 3:2"`` (1-based)."""
    tokens = [t for t in re.split(r"[\s,]+", spec.strip()) if t]
    if any(":" in t for t in tokens):
        x = np.zeros(length)
        seen = set()
        for tok in tokens:
            try:
                i_str, v_str = tok.split(":")
                i, v = int(i_str), float(v_str)
            except ValueError:
                raise ParseError(f"bad sparse token {tok!r}; expected INDEX:VALUE") from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value in {tok!r}")
            if i in seen:
                raise ParseError(f"index {i} given twice")
            if not 1 <= i <= length:
                raise DimensionError(f"index {i} outside 1..{length}")
            seen.add(i)
            x[i - 1] = v
        return x
    try:
        x = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if not np.all(np.isfinite(x)):
        raise ParseError("non-finite value in vector")
    if x.size != length:
        raise DimensionError(f"expected {length} values, got {x.size}")
    return x


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def emit(obj, out=None):
    # repr-based float formatting round-trips exactly (up to 17 significant digits).
    out = out or sys.stdout
    out.write(json.dumps(_jsonable(obj), indent=2) + "\n")


def report_to_dict(report):
    return {
        "fuchs": {
            "holds": report.fuchs.holds,
            "witness": report.fuchs.witness,
            "margin": report.fuchs.margin,
        },
        "fuchs_corollary": {
            "holds": report.fuchs_corollary.holds,
            "c_opt": report.fuchs_corollary.c_opt,
            "max_dot": report.fuchs_corollary.max_dot,
        },
        "erc": {
            "holds": report.erc.holds,
            "coefficient": report.erc.coefficient,
        },
        "spark": report.spark_value,
        "m": report.m,
        "full_rank": report.full_rank,
        "l0_unique": report.l0_unique,
        "l1_unique": report.l1_unique,
        "l1l0_equivalent": report.l1l0_equivalent,
    }


def trace_to_list(trace, n):
    return [
        {
            "atom": (s.chosen_index % n) + 1,
            "sign": "+" if s.chosen_index < n else "-",
            "correlation": s.correlation,
            "coeffs_after": s.coeffs_after,
            "residual_norm": s.residual_norm,
        }
        for s in trace.steps
    ]


# -- commands ----------------------------------------------------------------

def _tolerances(args):
    if args.tol is None:
        return DEFAULT_TOL
    return replace(DEFAULT_TOL, strict_tol=args.tol)


def cmd_certify(args):
    A = load_dictionary(args.dict)
    if args.x0 is None:
        raise ParseError("--x0 is required")
    tol = _tolerances(args)
    x0 = parse_vector_spec(args.x0, A.n)
    report = certify(A, Representation.from_coeffs(x0, tol), tol)
    if args.quiet:
        emit({"l1_unique": report.l1_unique})
    else:
        emit(report_to_dict(report))
    return EXIT_OK if report.l1_unique else EXIT_NEGATIVE


def cmd_solve(args):
    A = load_dictionary(args.dict)
    if args.y is None:
        raise ParseError("--y is required")
    tol = _tolerances(args)
    y = parse_vector_spec(args.y, A.d)
    steps = args.max_steps if args.max_steps is not None else A.n
    if steps < 1:
        raise ParseError("--max-steps must be >= 1")
    out = {"method": args.method, "coeffs": None, "objective": None, "residual_norm": None,
           "steps_used": None, "converged": None, "unique_hint": None,
           "dual_point": None, "trace": []}
    if args.method in ("bp", "bp-brute"):
        solver = basis_pursuit if args.method == "bp" else basis_pursuit_brute
        res = solver(A, y, tol)
        out.update(coeffs=res.coeffs, objective=res.objective, dual_point=res.dual_point,
                   unique_hint=res.unique_hint, converged=True)
        coeffs = res.coeffs
    else:
        solver = omp if args.method == "omp" else mp
        trace = solver(A, y, steps, tol)
        coeffs = trace.final_coeffs
        out.update(coeffs=coeffs, objective=float(np.abs(coeffs).sum()),
                   steps_used=trace.steps_used, converged=trace.converged,
                   trace=trace_to_list(trace, A.n))
    out["residual_norm"] = float(np.linalg.norm(y - A.atoms @ coeffs))
    emit({"coeffs": coeffs} if args.quiet else out)
    return EXIT_OK


def write_plot_data(path, A, vertices):
    """CSV rows for the polar vertices and the scaled atoms ``+-a_i/||a_i||^2``."""
    d = A.d
    coords = ["x", "y", "z"][:d] if d <= 3 else [f"c{i + 1}" for i in range(d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(coords + ["label"])
        for v in vertices:
            w.writerow([repr(float(t)) for t in v.point] + [f"vertex {v.labels(A.n)}"])
        sq = np.sum(A.atoms**2, axis=0)
        for sign, mark in ((1.0, "+"), (-1.0, "-")):
            for i in range(A.n):
                p = sign * A.atoms[:, i] / sq[i]
                w.writerow([repr(float(t)) for t in p] + [f"atom {mark}{i + 1}"])


def cmd_geometry(args):
    A = load_dictionary(args.dict)
    tol = _tolerances(args)
    if args.what == "vertices":
        vertices = enumerate_polar_vertices(A, tol)
        if args.plot_data:
            write_plot_data(args.plot_data, A, vertices)
        if args.quiet:
            emit({"vertex_count": len(vertices)})
        else:
            emit({"vertex_count": len(vertices),
                  "vertices": [{"point": v.point, "active": v.labels(A.n)} for v in vertices]})
        return EXIT_OK
    if args.what == "neighborly":
        if args.k is None:
            raise ParseError("--k is required for neighborly")
        if not 1 <= args.k <= A.d:
            raise DimensionError(f"--k must lie in 1..{A.d}")
        verdict, failure = is_k_neighbourly(A, args.k, tol)
        out = {"k": args.k, "neighbourly": verdict,
               "first_failure": failure.label() if failure is not None else None}
        emit({"neighbourly": verdict} if args.quiet else out)
        return EXIT_OK
    emit({"spark": spark(A, tol)})
    return EXIT_OK


# -- demos -------------------------------------------------------------------

def _close(a, b, atol=DEMO_TOL):
    return bool(np.allclose(np.asarray(a, float), np.asarray(b, float), rtol=0.0, atol=atol))


def demo_unit_norm_d3(say):
    A = AtomMatrix(np.column_stack([[1, 0, 0], [0, 1, 0], np.ones(3) / np.sqrt(3)]))
    a3 = A.atoms[:, 2]
    expected = 2 / np.sqrt(3)
    say("Atoms: a1=[1,0,0], a2=[0,1,0], a3=[1,1,1]/sqrt(3)")
    say("x0 = [1, 1, 0], y = a1 + a2")
    rep = certify(A, [1, 1, 0])
    say(f"  exact recovery coefficient = {rep.erc.coefficient:.15g} (2/sqrt(3) = {expected:.15g})"
        f" -> ERC {'holds' if rep.erc.holds else 'fails'}")
    say(f"  basis vertex c_opt = {rep.fuchs_corollary.c_opt.tolist()},"
        f" max off-support |a_j.T c_opt| = {rep.fuchs_corollary.max_dot:.15g}"
        f" -> corollary {'holds' if rep.fuchs_corollary.holds else 'fails'}")
    w = rep.fuchs.witness
    say(f"  Fuchs witness c = {np.round(w, 15).tolist()}, a3.T c = {a3 @ w:.15g},"
        f" margin = {rep.fuchs.margin:.15g} -> Fuchs {'holds' if rep.fuchs.holds else 'fails'}")
    c_f = np.array([1.0, 1.0, -2.0])
    say(f"  check c=[1,1,-2]: a1.T c = {c_f[0]:g}, a2.T c = {c_f[1]:g}, a3.T c = {a3 @ c_f:.3g}")
    flip = certify(A, [1, -1, 0])
    say("x0 = [1, -1, 0]")
    say(f"  Fuchs {'holds' if flip.fuchs.holds else 'fails'}, corollary"
        f" {'holds' if flip.fuchs_corollary.holds else 'fails'} (max_dot ="
        f" {flip.fuchs_corollary.max_dot:.3g}), ERC {'holds' if flip.erc.holds else 'fails'}")
    ok = (abs(rep.erc.coefficient - expected) <= DEMO_TOL and not rep.erc.holds
          and abs(rep.fuchs_corollary.max_dot - expected) <= DEMO_TOL
          and not rep.fuchs_corollary.holds
          and _close(rep.fuchs_corollary.c_opt, [1, 1, 0])
          and rep.fuchs.holds and abs(a3 @ w) < 1
          and _close(A.atoms[:, :2].T @ w, [1, 1])
          and abs(a3 @ c_f) <= DEMO_TOL
          and flip.fuchs.holds and flip.fuchs_corollary.holds and not flip.erc.holds)
    return ok, {
        "erc_coefficient": rep.erc.coefficient,
        "corollary_c_opt": rep.fuchs_corollary.c_opt,
        "corollary_max_dot": rep.fuchs_corollary.max_dot,
        "fuchs_witness": w,
        "fuchs_witness_a3_dot": float(a3 @ w),
        "fuchs_margin": rep.fuchs.margin,
        "flipped": {"fuchs": flip.fuchs.holds, "fuchs_corollary": flip.fuchs_corollary.holds,
                    "erc": flip.erc.holds},
    }


def demo_omp_two_step(say):
    A = AtomMatrix(np.array([[1.0, np.sqrt(2)], [0.0, np.sqrt(2)]]))
    y = np.array([1.0, 0.0])
    say("Atoms: a1=[1,0], a2=[sqrt(2),sqrt(2)]; y = [1, 0], x0 = [1, 0]")
    erc = check_erc(A, [0])
    say(f"  ERC coefficient for support {{1}}: {erc.coefficient:.15g} (sqrt(2))"
        f" -> ERC {'holds' if erc.holds else 'fails'}")
    one = omp(A, y, 1)
    s1 = one.steps[0]
    r1 = y - A.atoms @ s1.coeffs_after
    say(f"  step 1: picks atom {s1.chosen_index % 2 + 1} (a2.T y = {s1.correlation:.15g}),"
        f" x2 = {s1.coeffs_after[1]:.15g} (1/(2 sqrt(2)) = {1 / (2 * np.sqrt(2)):.15g})")
    say(f"          residual = {r1.tolist()}; recovered in 1 step: {one.converged}")
    dots = A.atoms.T @ r1
    say(f"          a1.T r = {dots[0]:.15g}, a2.T r = {dots[1]:.3g}")
    two = omp(A, y, 2)
    s2 = two.steps[1]
    say(f"  step 2: picks atom {s2.chosen_index % 2 + 1}, x = {two.final_coeffs.tolist()},"
        f" converged={two.converged}, steps used={two.steps_used}")
    ok = (abs(erc.coefficient - np.sqrt(2)) <= DEMO_TOL and not erc.holds
          and s1.chosen_index == 1
          and abs(s1.coeffs_after[1] - 1 / (2 * np.sqrt(2))) <= DEMO_TOL
          and _close(r1, [0.5, -0.5]) and not one.converged
          and abs(dots[0] - 0.5) <= DEMO_TOL and abs(dots[1]) <= DEMO_TOL
          and s2.chosen_index == 0 and two.converged and two.steps_used == 2
          and _close(two.final_coeffs, [1, 0]) and two.support == (0,))
    return ok, {
        "erc_coefficient": erc.coefficient,
        "step1_atom": s1.chosen_index % 2 + 1,
        "step1_coefficient": s1.coeffs_after[1],
        "step1_residual": r1,
        "step2_atom": s2.chosen_index % 2 + 1,
        "final_coeffs": two.final_coeffs,
        "steps_used": two.steps_used,
    }


def demo_fig_regions(say, beta=1.0):
    A = AtomMatrix(np.array([[1.0, np.sqrt(2)], [0.0, np.sqrt(2)]]))
    say("Atoms: a1=[1,0], a2=[sqrt(2),sqrt(2)]")
    vertices = enumerate_polar_vertices(A)
    regions = []
    for v in vertices:
        support = SignedSupport(tuple(sorted(
            (j % A.n, 1 if j < A.n else -1) for j in v.active_set)))
        inside = cone_contains(A, support, v.point)
        regions.append({"vertex": v.point, "basis": v.labels(A.n),
                        "internal": inside})
        say(f"  vertex {np.round(v.point, 12).tolist()} of basis {{{v.labels(A.n)}}}:"
            f" {'internal' if inside else 'external'}")
    y = beta * A.atoms[:, 0]
    say(f"y = {beta:g} * a1")
    scores = [v.point @ y for v in vertices]
    best = max(scores)
    ties = [v for v, s in zip(vertices, scores) if s >= best - DEMO_TOL]
    recoveries = []
    for v in ties:
        x = recover_primal_from_dual(A, y, v.point)
        recoveries.append({"vertex": v.point, "basis": v.labels(A.n), "x": x})
        say(f"  maximising vertex {np.round(v.point, 12).tolist()} (basis {{{v.labels(A.n)}}})"
            f" c.T y = {v.point @ y:.15g} -> x = {np.round(x, 15).tolist()}")
    c_pp = np.array([1.0, 1 / np.sqrt(2) - 1])
    pp = next((r for r in regions if _close(r["vertex"], c_pp)), None)
    ok = (len(vertices) == 4 and len(ties) == 2
          and {r["basis"] for r in recoveries} == {"+1,+2", "+1,-2"}
          and all(_close(r["x"], [beta, 0.0]) for r in recoveries)
          and pp is not None and not pp["internal"])
    return ok, {"beta": beta, "regions": regions, "recoveries": recoveries}


DEMOS = {
    "fig-regions": demo_fig_regions,
    "unit-norm-d3": demo_unit_norm_d3,
    "omp-two-step": demo_omp_two_step,
}


def cmd_demo(args):
    if args.name not in DEMOS:
        raise ParseError(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}")

    def say(line):
        if not args.quiet:
            print(line, file=sys.stderr)

    ok, values = DEMOS[args.name](say)
    say("PASS" if ok else "FAIL")
    emit({"demo": args.name, "pass": ok} if args.quiet
         else {"demo": args.name, "pass": ok, "values": values})
    return EXIT_OK if ok else EXIT_NEGATIVE


# -- entry point -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="strictness margin for '< 1' tests")
    common.add_argument("--quiet", action="store_true", help="emit the verdict only")

    p = _Parser(prog="sparsepolar",
                description="Sparse recovery certificates via polar polytopes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", parents=[common], help="certify a representation")
    c.add_argument("--dict", required=True)
    c.add_argument("--x0")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("solve", parents=[common], help="recover coefficients from y")
    s.add_argument("--dict", required=True)
    s.add_argument("--y")
    s.add_argument("--method", choices=["bp", "bp-brute", "omp", "mp"], default="bp")
    s.add_argument("--max-steps", type=int)
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("geometry", parents=[common], help="polar polytope queries")
    g.add_argument("what", choices=["vertices", "neighborly", "spark"])
    g.add_argument("--dict", required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--plot-data")
    g.set_defaults(func=cmd_geometry)

    d = sub.add_parser("demo", parents=[common], help="reproduce a worked example")
    d.add_argument("name")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnboundedPolarError as exc:
        print(f"error: unbounded polar polytope: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED_POLAR
    except GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
