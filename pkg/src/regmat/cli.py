"""Command-line front end.

Every command prints a report ``{command, input_hashes, result, duration_s,
version}``. Exit codes: 0 success / positive answer, 2 negative
mathematical answer, 1 error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from . import albanese as alb_mod
from . import matroid as mat
from . import solver
from .colored_graph import dumps

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunReport:
    command: list[str]
    result: Any
    input_hashes: dict[str, str] = field(default_factory=dict)
    duration_s: float = 0.0
    version: str = __version__
    exit_code: int = EXIT_OK

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "input_hashes": self.input_hashes,
            "result": self.result,
            "duration_s": round(self.duration_s, 6),
            "version": self.version,
        }


class Context:
    """Collects hashes of every input read during a command."""

    def __init__(self, threads: int):
        self.threads = threads
        self.hashes: dict[str, str] = {}

    def read_json(self, path: str) -> Any:
        p = Path(path)
        try:
            raw = p.read_bytes()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
        self.hashes[path] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None

    def matroid(self, spec: str, check: bool = True) -> mat.Matroid:
        if not Path(spec).exists():
            try:
                return mat.catalog(spec)
            except mat.UnknownName:
                raise InputError(f"{spec!r} is neither a file nor a catalog name {list(mat.CATALOG_NAMES)}") from None
        data = self.read_json(spec)
        if not isinstance(data, dict) or "matrix" not in data:
            raise InputError(f"{spec}: expected an object with 'name', 'ground' and 'matrix'")
        n = len(data["matrix"][0]) if data["matrix"] else 0
        return mat.Matroid.from_json(data, check=check and n <= mat.TU_MAX_COLUMNS)

    def solution(self, path: str) -> solver.Solution:
        return solver.Solution.from_json(self.read_json(path))

    def witness(self, path: str) -> solver.SplittingWitness:
        return solver.SplittingWitness.from_json(self.read_json(path))


def _write(path: str | None, obj) -> None:
    if path:
        Path(path).write_text(dumps(obj) + "\n")


def _solution_summary(sol: solver.Solution) -> dict:
    return {
        "matroid": sol.matroid.name,
        "params": dict(sol.params) if sol.params else None,
        "ring": sol.ring.tag,
        "profiles": sol.profiles(),
        "indivisibility_exponent": sol.indivisibility_exponent(),
    }


# -- commands ---------------------------------------------------------------------


def cmd_matroid_info(args, ctx: Context) -> tuple[dict, int]:
    M = ctx.matroid(args.matroid)
    certified = M.n <= mat.TU_MAX_COLUMNS
    return {
        "name": M.name,
        "rank": M.rank,
        "n": M.n,
        "ground": list(M.ground),
        "loopless": M.is_loopless(),
        "tu_certified": certified,
        "bases": len(M.bases) if certified else None,
        "hash": M.content_hash(),
    }, EXIT_OK


def cmd_is_cographic(args, ctx: Context) -> tuple[dict, int]:
    M = ctx.matroid(args.matroid)
    res = mat.is_cographic(M, threads=ctx.threads)
    out = {"cographic": res.cographic, "excluded_minor": res.excluded, "minor_trace": None}
    if res.witness is not None:
        out["minor_trace"] = res.witness.to_json()
    return out, EXIT_OK if res.cographic else EXIT_NEGATIVE


def cmd_matroid_minor(args, ctx: Context) -> tuple[dict, int]:
    ops = [mat.Contract(s) for s in args.contract or []] + [mat.Delete(s) for s in args.delete or []]
    if args.solution:
        sol = ctx.solution(args.solution)
        for op in ops:
            sol = solver.minor_pushforward(sol, op)
        _write(args.output, sol.to_json())
        out = _solution_summary(sol)
        out["valid"] = sol.is_valid()
        return out, EXIT_OK
    M = ctx.matroid(args.matroid)
    for op in ops:
        M = op.apply(M)
    _write(args.output, M.to_json())
    return {"matroid": M.to_json(), "rank": M.rank, "n": M.n}, EXIT_OK


def cmd_albanese(args, ctx: Context) -> tuple[dict, int]:
    M = ctx.matroid(args.matroid)
    alb = alb_mod.build(M, args.ell, args.r, args.j)
    graph = alb.graph
    if args.reduced:
        graph = alb_mod.reduce_2_1(alb).graph
    if args.output:
        payload = {"graph": graph.to_json(), "sidecar": alb.sidecar(), "reduced": bool(args.reduced)}
        _write(args.output, payload)
    return {
        "params": {"ell": args.ell, "r": args.r, "j": args.j, "reduced": bool(args.reduced)},
        "vertices": graph.n_vertices,
        "edges": graph.n_edges,
        "loops": int(np.sum(graph.tails == graph.heads)),
    }, EXIT_OK


def cmd_solve(args, ctx: Context) -> tuple[dict, int]:
    M = ctx.matroid(args.matroid)
    alb = alb_mod.build(M, args.ell, 1, 0)
    host = alb_mod.reduce_2_1(alb) if args.reduced else alb
    sys_ = solver.assemble(M, host, args.ell)
    space = solver.solution_space(sys_)
    res = solver.exists_indivisible(space)
    out = {
        "unknowns": sys_.shape[0],
        "conditions": sys_.shape[1],
        "augmented_conditions": sys_.augmented_cols,
        "solution_dim": space.dim,
        "augmented_dim": space.augmented_dim,
        "augmented_rank_equal": space.augmented_rank_equal,
        "profile_image_dim": res.image_dim,
        "indivisible_exists": res.exists,
        "witness": _solution_summary(res.witness) if res.witness else None,
    }
    if res.witness is not None:
        _write(args.output, res.witness.to_json())
    return out, EXIT_OK if res.exists else EXIT_NEGATIVE


def cmd_membership(args, ctx: Context) -> tuple[dict, int]:
    M = ctx.matroid(args.matroid)
    res = solver.membership(M, args.ell)
    if res.witness is not None:
        _write(args.output, res.witness.to_json())
    return {
        "ell": args.ell,
        "member": res.member,
        "solution_dim": res.dim,
        "witness": _solution_summary(res.witness) if res.witness else None,
    }, EXIT_OK if res.member else EXIT_NEGATIVE


def cmd_distance(args, ctx: Context) -> tuple[dict, int]:
    M = ctx.matroid(args.matroid)
    res = solver.radical_distance(M, threads=ctx.threads)
    return {
        "distance": res.distance,
        "memberships": {str(p): ok for p, ok in res.memberships.items()},
    }, EXIT_OK


def cmd_split(args, ctx: Context) -> tuple[dict, int]:
    w = ctx.witness(args.witness)
    report = solver.verify_splitting(w)
    if args.action == "verify":
        return report.to_json(), EXIT_OK if report.passed else EXIT_NEGATIVE
    sol = solver.splitting_to_solution(w, args.r)
    _write(args.output, sol.to_json())
    out = _solution_summary(sol)
    out["valid"] = sol.is_valid()
    return out, EXIT_OK


def cmd_reduce(args, ctx: Context) -> tuple[dict, int]:
    sol = ctx.solution(args.solution)
    red = solver.reduce_solution(sol)
    _write(args.output, red.solution.to_json())
    return {
        "input": _solution_summary(sol),
        "output": _solution_summary(red.solution),
        "homotopy_profiles": dict(red.pushed_profiles),
        "profiles_preserved": red.profiles_preserved,
        "input_exponent": red.input_exponent,
        "guaranteed_exponent": red.guaranteed_exponent,
    }, EXIT_OK


EXPECTED_TABLE = {
    "K33": {"dim": 15, "divisible": True},
    "K5": {"dim": 103, "divisible": True},
    "R10": {"dim": 35, "divisible": True, "profile_all_zero": True},
    "ell3": {"K5": True, "K33": True, "R10": True},
}


def reference_table(threads: int = 1) -> dict:
    table: dict[str, Any] = {}
    for name in ("K33", "K5", "R10"):
        M = mat.catalog(name)
        space = solver.solution_space(solver.membership_system(M, 2))
        row = {"dim": space.dim, "divisible": not solver.exists_indivisible(space).exists}
        if name == "R10":
            row["profile_all_zero"] = not space.profile_image.any()
        table[name] = row

    def ell3(name):
        res = solver.membership(mat.catalog(name), 3)
        return res.member and res.witness is not None and res.witness.is_valid() and res.witness.is_indivisible()

    names = ("K5", "K33", "R10")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flags = list(pool.map(ell3, names))
    else:
        flags = [ell3(n) for n in names]
    table["ell3"] = dict(zip(names, flags))
    return table


def cmd_verify_reference(args, ctx: Context) -> tuple[dict, int]:
    table = reference_table(ctx.threads)
    ok = table == EXPECTED_TABLE
    return {"table": table, "expected": EXPECTED_TABLE, "all_pass": ok}, EXIT_OK if ok else EXIT_ERROR


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regmat", description="Indivisible solutions of regular matroids in Albanese graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads for independent sub-computations")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("matroid", help="matroid utilities").add_subparsers(dest="action", required=True)
    q = m.add_parser("info", help="rank, size, TU certification")
    q.add_argument("matroid", help="matroid JSON file or catalog name (K5, K33, R10)")
    q.set_defaults(func=cmd_matroid_info)
    q = m.add_parser("is-cographic", help="search for K5 / K33 minors")
    q.add_argument("matroid")
    q.set_defaults(func=cmd_is_cographic)
    q = m.add_parser("minor", help="delete/contract elements of a matroid or transport a solution")
    q.add_argument("matroid", nargs="?", help="matroid (ignored with --solution)")
    q.add_argument("--delete", action="append", metavar="LABEL")
    q.add_argument("--contract", action="append", metavar="LABEL")
    q.add_argument("--solution", help="solution JSON to push forward along the minor")
    q.add_argument("--output")
    q.set_defaults(func=cmd_matroid_minor)

    a = sub.add_parser("albanese", help="Albanese graphs").add_subparsers(dest="action", required=True)
    q = a.add_parser("build")
    q.add_argument("matroid")
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--r", type=int, default=1)
    q.add_argument("--j", type=int, default=0)
    q.add_argument("--reduced", action="store_true")
    q.add_argument("--output")
    q.set_defaults(func=cmd_albanese)

    q = sub.add_parser("solve", help="solution space in Alb_{ell,1}")
    q.add_argument("matroid")
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--reduced", action="store_true")
    q.add_argument("--output", help="write the witness solution here")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("membership", help="ell-indivisible solution (reduced graph for ell = 2)")
    q.add_argument("matroid")
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--output")
    q.set_defaults(func=cmd_membership)

    q = sub.add_parser("distance", help="radical distance")
    q.add_argument("matroid")
    q.set_defaults(func=cmd_distance)

    q = sub.add_parser("split", help="quadratic splittings")
    q.add_argument("action", choices=("verify", "to-solution"))
    q.add_argument("witness")
    q.add_argument("--r", type=int, default=None, help="exponent of the target modulus (to-solution)")
    q.add_argument("--output")
    q.set_defaults(func=cmd_split)

    q = sub.add_parser("reduce", help="push a level (l^r, l^j) solution to level (l^(r-j), 1)")
    q.add_argument("solution")
    q.add_argument("--output")
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser(
        "verify-reference", aliases=["verify-paper"], help="recompute the reference table of catalog results"
    )
    q.set_defaults(func=cmd_verify_reference)
    return p


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(v)}" for v in obj)
    return f"{pad}{json.dumps(obj)}"


def _parse(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "split" and args.action == "to-solution" and args.r is None:
        parser.error("split to-solution needs --r")
    if args.command == "matroid" and args.action == "minor" and not (args.solution or args.matroid):
        parser.error("matroid minor needs a matroid or --solution")
    return args


def run(argv: list[str], args: argparse.Namespace | None = None) -> RunReport:
    args = args or _parse(argv)
    ctx = Context(max(1, args.threads))
    start = time.perf_counter()
    result, code = args.func(args, ctx)
    return RunReport(list(argv), result, ctx.hashes, time.perf_counter() - start, exit_code=code)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        report = run(argv, args)
    except (ValueError, KeyError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc.args[0]) if exc.args else str(exc)}
        print(dumps(err) if args.format == "json" else f"error: {err['error']}: {err['message']}", file=sys.stderr)
        return EXIT_ERROR
    print(dumps(report.to_json()) if args.format == "json" else _text(report.to_json()))
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
