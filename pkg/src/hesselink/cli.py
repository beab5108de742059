"""Command-line front end: one subcommand per computation, JSON in and out.

Exit codes: 0 success, 1 I/O failure, 2 malformed input or domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Sequence

from . import hilbert as hb
from . import instability as ins
from . import p1sheaf as ps
from . import quiver as qv
from .core import HesselinkError, fmt_q

EXIT_OK, EXIT_IO, EXIT_DOMAIN = 0, 1, 2


class InputError(Exception):
    """Malformed request, rejected before any computation."""


# --- helpers ----------------------------------------------------------------------------------

def _load(args) -> dict:
    if args.inline is not None and args.input is not None:
        raise InputError("give at most one of --input and --inline")
    if args.input is not None:
        with open(args.input, encoding="utf-8") as fh:  # OSError -> exit 1
            text = fh.read()
    elif args.inline is not None:
        text = args.inline
    else:
        return {}
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise InputError("top-level JSON value must be an object")
    return obj


def _json_flag(value: str | None, name: str):
    if value is None:
        return None
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON for --{name}: {exc}") from None


def _need(obj: dict, key: str):
    if key not in obj or obj[key] is None:
        raise InputError(f"missing field {key!r}")
    return obj[key]


def _int(obj: dict, key: str, override: int | None = None, default: int | None = None) -> int:
    if override is not None:
        return override
    if key in obj:
        try:
            return int(obj[key])
        except (TypeError, ValueError):
            raise InputError(f"field {key!r} must be an integer") from None
    if default is None:
        raise InputError(f"missing field {key!r}")
    return default


def _primes(text: str | None) -> tuple[int, ...]:
    if not text:
        return qv.DEFAULT_PRIMES
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError("--primes must be a comma separated list of integers") from None
    if not out:
        raise InputError("--primes is empty")
    return out


def _poly(obj, name: str) -> hb.HilbertPoly:
    if not isinstance(obj, list) or not obj:
        raise InputError(f"{name} must be a nonempty coefficient array")
    return hb.HilbertPoly.from_json(obj)


def _type(obj, name: str) -> tuple[hb.HilbertPoly, ...]:
    entries = obj["entries"] if isinstance(obj, dict) and "entries" in obj else obj
    if not isinstance(entries, list) or not entries:
        raise InputError(f"{name} must be a nonempty list of polynomials")
    return tuple(_poly(e, name) for e in entries)


def _sheaf(obj: dict) -> ps.SheafP1:
    sh = obj.get("sheaf", obj)
    if not isinstance(sh, dict) or not ("line_degrees" in sh or "torsion" in sh):
        raise InputError("missing sheaf data (line_degrees / torsion)")
    return ps.SheafP1.from_json(sh)


# --- subcommands --------------------------------------------------------------------------------

def cmd_torus_strata(args, obj) -> tuple[dict, list[str]]:
    rho = [int(x) for x in _need(obj, "rho")]
    dim = int(obj.get("dim", len(rho)))
    metric = [int(x) for x in obj.get("metric", [1] * dim)]
    points = _need(obj, "weight_sets")
    ctx = ins.WeightContext(dim, tuple(metric), tuple(rho))
    labels = ins.stratify_weight_sets(points, ctx)
    out, lines = [], []
    for i, lab in enumerate(labels):
        if lab is None:
            out.append({"status": "semistable"})
            lines.append(f"point {i}: semistable")
        else:
            out.append(lab.to_json())
            lines.append(f"point {i}: lambda {list(lab.lam)} pairing {fmt_q(lab.value.pairing)} "
                         f"norm_sq {fmt_q(lab.value.norm_sq)}")
    return {"points": out}, lines


def cmd_grassmann(args, obj) -> tuple[dict, list[str]]:
    matrix = _json_flag(args.matrix, "matrix") if args.matrix is not None else _need(obj, "matrix")
    if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix) or not matrix:
        raise InputError("matrix must be a nonempty list of rows")
    k, lam = ins.grassmann_stratum(matrix)
    rep = {"rank": k, "lambda": list(lam) if lam is not None else None}
    line = f"rank {k}: " + ("semistable" if lam is None else f"lambda {list(lam)}")
    return rep, [line]


def _rep_and_pair(obj) -> tuple[qv.QuiverRepresentation, qv.StabilityPair]:
    rep_obj = obj.get("representation", obj)
    for key in ("vertices", "arrows", "dims"):
        _need(rep_obj, key)
    rep = qv.rep_from_json(rep_obj)
    stab = obj.get("stability", obj)
    if "theta" not in stab:
        raise InputError("missing field 'theta'")
    return rep, qv.stability_from_json(stab, rep)


def cmd_quiver_hn(args, obj) -> tuple[dict, list[str]]:
    rep, sp = _rep_and_pair(obj)
    res = qv.hn_filtration_quiver(rep, sp, args.budget, _primes(args.primes))
    out = res.to_json()
    out["slopes"] = [fmt_q(s) for s in res.slopes]
    out["oracle"] = res.oracle
    out["primes"] = list(res.primes)
    lines = [f"gamma {[list(g) for g in res.gamma]}",
             f"slopes {[fmt_q(s) for s in res.slopes]}",
             "semistable" if res.is_semistable() else "unstable"]
    return out, lines


def cmd_verify(args, obj) -> tuple[dict, list[str]]:
    rep, sp = _rep_and_pair(obj)
    report = qv.verify_hn_equals_hesselink(rep, sp, bound=args.bound, conjugates=args.conjugates,
                                           seed=args.seed, budget=args.budget)
    out = report.to_json()
    lines = [f"gamma {out['gamma']}", f"lambda {out['lambda']}",
             f"competitors {report.competitors} with limit {report.with_limit} violations {report.violations}",
             "PASS" if report.passed else "FAIL"]
    lines += report.notes
    return out, lines


def cmd_hilbert_order(args, obj) -> tuple[dict, list[str]]:
    p = _json_flag(args.p, "p") if args.p is not None else _need(obj, "p")
    q = _json_flag(args.q, "q") if args.q is not None else _need(obj, "q")
    P, Q = _poly(p, "p"), _poly(q, "q")
    c = hb.rudakov_cmp(P, Q)
    word = {-1: "precedes", 0: "equivalent", 1: "succeeds"}[c]
    out = {"order": word, "lambda": [fmt_q(x) for x in hb.rudakov_lambda(P, Q)]}
    return out, [f"{P} {word} {Q}"]


def cmd_beta_index(args, obj) -> tuple[dict, list[str]]:
    tau = _type(_need(obj, "tau"), "tau")
    n = _int(obj, "n", args.n)
    m = _int(obj, "m", args.m)
    beta = hb.beta_nm(tau, n, m)
    gamma = hb.gamma_of_beta(beta, m)
    out = beta.to_json()
    out["gamma"] = [list(g) for g in gamma]
    out["fixed_locus_weight"] = fmt_q(hb.fixed_locus_weight_check(beta.r, [g[1] for g in gamma], beta.l))
    out["is_hn_type"] = hb.is_hn_type(tau, hb.poly_sum(tau))
    if all(p.degree <= 1 for p in tau):
        out["refined"] = [[p.to_json() for p in t] for t in hb.enumerate_refined_indices(beta, m)]
    lines = [f"r {out['r']}", f"l {out['l']}", f"gamma {out['gamma']}"]
    if beta.merged:
        lines.append("blocks merged: equal consecutive weights")
    return out, lines


def _pair_json(a, b) -> list:
    return [[p.to_json() for p in a], [p.to_json() for p in b]]


def cmd_collisions(args, obj) -> tuple[dict, list[str]]:
    n = _int(obj, "n", args.n)
    m = _int(obj, "m", args.m)
    deg = _int(obj, "deg_bound", args.deg_bound, 1)
    coeff = _int(obj, "coeff_bound", args.coeff_bound, 3)
    parts = _int(obj, "parts_bound", args.parts_bound, 2)
    pairs = hb.collision_search(n, m, deg, coeff, parts, budget=args.budget)
    out = {"n": n, "m": m, "count": len(pairs), "collisions": [_pair_json(a, b) for a, b in pairs]}
    if not pairs:
        return out, ["no collisions within bounds"]
    lines = [f"({', '.join(map(str, a))}) ~ ({', '.join(map(str, b))})" for a, b in pairs]
    return out, lines


def cmd_ack_verify(args, obj) -> tuple[dict, list[str]]:
    e = _sheaf(obj)
    n = _int(obj, "n", args.n)
    m = _int(obj, "m", args.m)
    rep = ps.verify_ack_hn(e, n, m, _primes(args.primes), args.budget)
    out = rep.to_json()
    lines = [f"sheaf {e}", f"tau ({', '.join(map(str, rep.tau))})",
             f"expected {out['expected']}", f"computed {out['computed']}",
             "MATCH" if rep.match else "MISMATCH"]
    return out, lines


def cmd_ack_grid(args, obj) -> tuple[dict, list[str]]:
    e = _sheaf(obj)
    n_max = _int(obj, "n_max", args.n_max, 6)
    m_max = _int(obj, "m_max", args.m_max, 14)
    grid = ps.threshold_grid(e, n_max, m_max, _primes(args.primes), args.budget)
    out = grid.to_json()
    lines = [f"n={n} m={m} {'MATCH' if ok else 'MISMATCH'}" for n, m, ok in grid.cells]
    lines.append(f"minimal {list(grid.minimal) if grid.minimal else None}")
    return out, lines


def cmd_multi_vertex(args, obj) -> tuple[dict, list[str]]:
    ns = [int(x) for x in _need(obj, "ns")]
    out: dict[str, Any] = {"ns": ns}
    lines = []
    if "sheaf" in obj or "line_degrees" in obj or "torsion" in obj:
        e = _sheaf(obj)
        total = ps.hilbert_poly_p1(e)
        d, theta, alpha = hb.multi_parameters(ns, total)
        tau = ps.sheaf_hn_type(e)
        rep = ps.phi_multi(e, ns)
        hn = qv.hn_filtration_quiver(rep, qv.StabilityPair(theta, alpha, d), args.budget, _primes(args.primes))
        expected = hb.gamma_multi(ns, tau)
        out.update({"d": list(d), "theta": list(theta), "alpha": list(alpha),
                    "expected": [list(g) for g in expected], "computed": [list(g) for g in hn.gamma],
                    "match": expected == hn.gamma})
        lines += [f"d {list(d)} theta {list(theta)} alpha {list(alpha)}",
                  f"expected {out['expected']}", f"computed {out['computed']}",
                  "MATCH" if out["match"] else "MISMATCH"]
    elif "total" in obj:
        d, theta, alpha = hb.multi_parameters(ns, _poly(obj["total"], "total"))
        out.update({"d": list(d), "theta": list(theta), "alpha": list(alpha)})
        lines.append(f"d {list(d)} theta {list(theta)} alpha {list(alpha)}")
    if "type" in obj:
        gamma = hb.gamma_multi(ns, _type(obj["type"], "type"))
        flags = hb.sub_regular_positions(gamma)
        out["gamma"] = [list(g) for g in gamma]
        out["sub_regular"] = [list(f) for f in flags]
        lines.append(f"gamma {out['gamma']}")
        lines += [f"sub-regular: entry {i} is not positive at n={ns[j]}" for i, j in flags]
    if "pool" in obj:
        pool = [_type(t, "pool") for t in obj["pool"]]
        coll = hb.injectivity_report(pool, ns)
        out["collisions"] = [_pair_json(a, b) for a, b in coll]
        lines.append("no collisions within bounds" if not coll else f"{len(coll)} collisions")
    if len(out) == 1:
        raise InputError("multi-vertex needs 'sheaf', 'total', 'type' or 'pool'")
    return out, lines


COMMANDS: dict[str, Callable] = {
    "torus-strata": cmd_torus_strata,
    "grassmann": cmd_grassmann,
    "quiver-hn": cmd_quiver_hn,
    "verify-quiver-hesselink": cmd_verify,
    "hilbert-order": cmd_hilbert_order,
    "beta-index": cmd_beta_index,
    "collisions": cmd_collisions,
    "ack-verify": cmd_ack_verify,
    "ack-grid": cmd_ack_grid,
    "multi-vertex": cmd_multi_vertex,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hesselink", description="Hesselink and HN stratification computations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--input", help="JSON request file")
        sp.add_argument("--inline", help="JSON request text")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--budget", type=int, default=qv.DEFAULT_BUDGET)
        sp.add_argument("--primes", help="comma separated primes for the finite-field oracle")
        sp.add_argument("--seed", type=int, default=0)
        if name == "grassmann":
            sp.add_argument("--matrix")
        if name == "hilbert-order":
            sp.add_argument("--p")
            sp.add_argument("--q")
        if name in ("beta-index", "collisions", "ack-verify"):
            sp.add_argument("--n", type=int)
            sp.add_argument("--m", type=int)
        if name == "collisions":
            sp.add_argument("--deg-bound", type=int)
            sp.add_argument("--coeff-bound", type=int)
            sp.add_argument("--parts-bound", type=int)
        if name == "ack-grid":
            sp.add_argument("--n-max", type=int)
            sp.add_argument("--m-max", type=int)
        if name == "verify-quiver-hesselink":
            sp.add_argument("--bound", type=int, default=3)
            sp.add_argument("--conjugates", type=int, default=100)
    return parser


def render_report(report: dict, lines: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    return "\n".join(lines)


def run_command(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run one request; returns ``(exit_code, stdout_text, stderr_text)``."""
    try:
        args = build_parser().parse_args(list(argv))
        obj = _load(args)
    except InputError as exc:
        return EXIT_DOMAIN, "", f"error: cli: {exc}"
    except OSError as exc:
        return EXIT_IO, "", f"error: io: {exc}"
    try:
        report, lines = COMMANDS[args.command](args, obj)
    except InputError as exc:
        return EXIT_DOMAIN, "", f"error: cli: {exc}"
    except HesselinkError as exc:
        return EXIT_DOMAIN, "", f"error: {exc.label}: {exc.message}"
    text = render_report(report, lines, args.format)
    if args.command == "verify-quiver-hesselink" and not report["passed"]:
        return EXIT_DOMAIN, text, "error: verify_hn_equals_hesselink: a competitor beats lambda_gamma"
    return EXIT_OK, text, ""


def main(argv: Sequence[str] | None = None) -> int:
    code, out, err = run_command(sys.argv[1:] if argv is None else argv)
    try:
        if out:
            sys.stdout.write(out + "\n")
        if err:
            sys.stderr.write(err + "\n")
    except OSError:
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
