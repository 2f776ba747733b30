"""Command-line interface.

Exit codes: 0 success (feasible), 1 usage/IO/validation error,
2 mathematically infeasible — scripts can tell the cases apart.
Commands:

  dsmkit map solve --family F --x X.json --y Y.json [--z Z.json --w W.json]
  dsmkit pencil gen --n N --m M [--seed S] -o out.json
  dsmkit pencil validate FILE
  dsmkit backerr --pencil P.json --lambda 0.5i --blocks JREB --variant sd [--u U.json | --seed S]
  dsmkit backerr sweep --pencil P.json --lambdas l1,l2,... --blocks B --variant sd --csv out.csv
  dsmkit verify --result R.json

The environment variable DSMKIT_SEED supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as io_mod
from . import oracle as oracle_mod
from . import pencil as pencil_mod
from .config import DEFAULT_TOL, ToleranceConfig
from .dsm import DsmProblem, Type1Problem, dsdm_type1, dsdm_type2, dsm_solve
from .errors import DsmkitError
from .maps import StructureFamily, map_min, map_two_sided


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _env_seed() -> int:
    try:
        return int(os.environ.get("DSMKIT_SEED", "0"))
    except ValueError:
        return 0


def _build_parser() -> _Parser:
    top = _Parser(prog="dsmkit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--tol-rank", type=float, default=None, help="relative SVD rank threshold")
    top.add_argument("--tol-psd", type=float, default=None, help="eigenvalue floor factor")
    top.add_argument("--tol-residual", type=float, default=None, help="relative residual tolerance")
    top.add_argument("--tol-colinearity", type=float, default=None, help="colinearity band")
    sub = top.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="structured mapping solvers")
    map_sub = p_map.add_subparsers(dest="map_command", required=True)
    p_solve = map_sub.add_parser("solve", help="solve a mapping problem from JSON vectors")
    p_solve.add_argument("--family", required=True,
                         choices=[f.value for f in StructureFamily])
    p_solve.add_argument("--x", required=True, metavar="X.json")
    p_solve.add_argument("--y", required=True, metavar="Y.json")
    p_solve.add_argument("--z", metavar="Z.json")
    p_solve.add_argument("--w", metavar="W.json")

    p_pencil = sub.add_parser("pencil", help="generate / validate structured pencils")
    pencil_sub = p_pencil.add_subparsers(dest="pencil_command", required=True)
    p_gen = pencil_sub.add_parser("gen", help="generate a random structured pencil")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("-o", "--output", required=True)
    p_val = pencil_sub.add_parser("validate", help="check the pencil invariants")
    p_val.add_argument("file")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pencil", required=True, metavar="P.json")
    common.add_argument("--blocks", required=True, help="perturbed blocks, e.g. JREB")
    common.add_argument("--variant", choices=["s", "sd"], default="sd")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--u", metavar="U.json", help="eigenvector file (2n+m entries)")
    p_back = sub.add_parser("backerr", parents=[common], help="eigenpair backward errors")
    p_back.add_argument("--lambda", dest="lam", metavar="0.5i", help="purely imaginary eigenvalue")
    # `backerr sweep ...` is routed to this hidden leaf by main()
    p_sweep = sub.add_parser("backerr-sweep", parents=[common])
    p_sweep.add_argument("--lambdas", required=True, help="comma-separated list, e.g. 0.1i,0.5i")
    p_sweep.add_argument("--csv", required=True, metavar="OUT.csv")

    p_verify = sub.add_parser("verify", help="re-audit a result document")
    p_verify.add_argument("--result", required=True, metavar="R.json")
    return top


def _tol_from_args(args) -> ToleranceConfig:
    kw = {}
    if args.tol_rank is not None:
        kw["rank_tol"] = args.tol_rank
    if args.tol_psd is not None:
        kw["psd_tol"] = args.tol_psd
    if args.tol_residual is not None:
        kw["residual_tol"] = args.tol_residual
    if args.tol_colinearity is not None:
        kw["colinearity_tol"] = args.tol_colinearity
    return ToleranceConfig(**kw) if kw else DEFAULT_TOL


def _doc_header(kind: str, seed=None) -> dict:
    doc = {"tool": io_mod.TOOL_NAME, "version": io_mod.TOOL_VERSION, "kind": kind}
    if seed is not None:
        doc["seed"] = seed
    return doc


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _residual_doc(report: oracle_mod.VerificationReport) -> dict:
    return report.as_dict()


def _cmd_map_solve(args, cfg: ToleranceConfig) -> int:
    family = StructureFamily(args.family)
    x = io_mod.vector_from_doc(io_mod.load_json(args.x), "x")
    y = io_mod.vector_from_doc(io_mod.load_json(args.y), "y")
    if (args.z is None) != (args.w is None):
        print("error: --z and --w must be given together", file=sys.stderr)
        return 1
    two_sided = args.z is not None
    problem_echo = {"family": family.value, "x": io_mod.vector_to_doc(x), "y": io_mod.vector_to_doc(y)}

    if not two_sided:
        sol = map_min(family, x, y, cfg)
        doc = _doc_header("map-min")
        doc["problem"] = problem_echo
        doc["feasible"] = sol.feasible
        if not sol.feasible:
            doc["reason"] = sol.reason
            _emit(doc)
            return 2
        report = oracle_mod.verify_solution(sol.minimizer, (x, y), family, cfg)
        doc["norms"] = {"lower": sol.min_norm, "upper": sol.min_norm, "exact": not sol.boundary}
        doc["solution"] = {"delta": io_mod.matrix_to_doc(sol.minimizer)}
        doc["boundary"] = sol.boundary
        doc["residuals"] = _residual_doc(report)
        _emit(doc)
        return 0

    z = io_mod.vector_from_doc(io_mod.load_json(args.z), "z")
    w = io_mod.vector_from_doc(io_mod.load_json(args.w), "w")
    problem_echo["z"] = io_mod.vector_to_doc(z)
    problem_echo["w"] = io_mod.vector_to_doc(w)
    n = y.shape[0]
    m = x.shape[0] - n

    if family is StructureFamily.UNSTRUCTURED:
        sol = map_two_sided(x, y, z, w, cfg)
        doc = _doc_header("map-two-sided")
        doc["problem"] = problem_echo
        doc["feasible"] = sol.feasible
        if not sol.feasible:
            doc["reason"] = sol.reason
            _emit(doc)
            return 2
        report = oracle_mod.verify_solution(sol.minimizer, (x, y, z, w), family, cfg)
        doc["norms"] = {"lower": sol.min_norm, "upper": sol.min_norm, "exact": True}
        doc["solution"] = {"delta": io_mod.matrix_to_doc(sol.minimizer)}
        doc["residuals"] = _residual_doc(report)
        _emit(doc)
        return 0

    if family in (StructureFamily.DISSIPATIVE, StructureFamily.ANTI_DISSIPATIVE):
        anti = family is StructureFamily.ANTI_DISSIPATIVE
        if m == 0:
            sol1 = dsdm_type1(Type1Problem(x, y, z, w), cfg, anti=anti)
            doc = _doc_header("dsdm-type1")
            doc["problem"] = problem_echo
            doc["feasible"] = sol1.feasible
            if not sol1.feasible:
                doc["reason"] = sol1.reason
                _emit(doc)
                return 2
            report = oracle_mod.verify_solution(sol1.minimizer, (x, y, z, w), family, cfg)
            doc["norms"] = {"lower": sol1.min_norm, "upper": sol1.min_norm, "exact": sol1.exact}
            doc["solution"] = {"delta": io_mod.matrix_to_doc(sol1.minimizer)}
            doc["warnings"] = sol1.warnings
            doc["residuals"] = _residual_doc(report)
            _emit(doc)
            return 0
        if m < 1:
            print("error: dim(x) must be >= dim(y)", file=sys.stderr)
            return 1
        p = DsmProblem(x[:n], x[n:], y, z, w[:n], w[n:])
        sol = dsdm_type2(p, cfg, anti=anti)
        kind = "dsdm-type2"
    else:
        if m < 1:
            print("error: the doubly structured families need dim(x) > dim(y)", file=sys.stderr)
            return 1
        p = DsmProblem(x[:n], x[n:], y, z, w[:n], w[n:])
        sol = dsm_solve(family, p, cfg)
        kind = "dsm"

    doc = _doc_header(kind)
    doc["problem"] = problem_echo
    doc["feasible"] = sol.feasible
    if not sol.feasible:
        doc["reason"] = sol.reason
        _emit(doc)
        return 2
    report = oracle_mod.verify_solution(sol.H, p, sol.family, cfg)
    doc["norms"] = {"lower": sol.norm_lower, "upper": sol.norm_upper, "exact": sol.exact}
    doc["solution"] = {"H1": io_mod.matrix_to_doc(sol.H1), "H2": io_mod.matrix_to_doc(sol.H2)}
    doc["sufficiency_note"] = sol.sufficiency_note
    doc["warnings"] = sol.warnings
    doc["residuals"] = _residual_doc(report)
    _emit(doc)
    return 0


def _cmd_pencil_gen(args, cfg: ToleranceConfig) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    p = pencil_mod.gen_pencil(args.n, args.m, seed)
    rep = p.validate(cfg)
    if not all(rep.values()):
        print(f"error: generated pencil failed validation: {rep}", file=sys.stderr)
        return 1
    doc = io_mod.pencil_to_doc(p)
    doc["seed"] = seed
    io_mod.save_json(args.output, doc)
    print(f"wrote {args.output}")
    return 0


def _cmd_pencil_validate(args, cfg: ToleranceConfig) -> int:
    p = io_mod.pencil_from_doc(io_mod.load_json(args.file))
    rep = p.validate(cfg)
    for key, ok in rep.items():
        print(f"{key}: {'pass' if ok else 'FAIL'}")
    return 0 if all(rep.values()) else 1


def _load_eigpair(args, p: pencil_mod.PHPencil, lam: complex, blocks, cfg) -> pencil_mod.EigenPair:
    if args.u is not None:
        uvec = io_mod.vector_from_doc(io_mod.load_json(args.u), "u")
        n, m = p.n, p.m
        if uvec.shape[0] != 2 * n + m:
            raise DsmkitError(f"u must have length 2n+m = {2 * n + m}, got {uvec.shape[0]}")
        return pencil_mod.EigenPair(lam, uvec[:n], uvec[n : 2 * n], uvec[2 * n :])
    seed = args.seed if args.seed is not None else _env_seed()
    return pencil_mod.gen_eigpair(p, seed, blocks, cfg, lam=lam)


def _bounds_doc(res: pencil_mod.BackwardErrorBounds) -> dict:
    doc = {
        "finite": res.finite,
        "eta_lower": res.eta_lower,
        "eta_upper": res.eta_upper,
        "exact": res.exact,
        "variant": res.variant,
        "blocks": pencil_mod.blocks_to_string(res.blocks),
        "lambda": io_mod.format_imaginary(res.lam),
        "conditions": {k: bool(v) for k, v in res.conditions_report.items()},
        "warnings": res.warnings,
    }
    if res.finite:
        doc["H1"] = io_mod.matrix_to_doc(res.H1)
        doc["H2"] = io_mod.matrix_to_doc(res.H2)
    return doc


def _cmd_backerr(args, cfg: ToleranceConfig) -> int:
    p = io_mod.pencil_from_doc(io_mod.load_json(args.pencil))
    blocks = pencil_mod.parse_blocks(args.blocks)
    if args.variant == "s" and blocks not in pencil_mod.ETA_S_COMBOS:
        name = pencil_mod.blocks_to_string(blocks)
        print(
            f"error: the symmetry-only backward error for {name} is classical prior work; "
            "not implemented here",
            file=sys.stderr,
        )
        return 1
    if args.variant == "sd" and blocks not in (pencil_mod.ETA_SD_COMBOS | pencil_mod.ETA_S_COMBOS):
        name = pencil_mod.blocks_to_string(blocks)
        print(f"error: eta_sd({name}) is classical prior work; not implemented here", file=sys.stderr)
        return 1

    if args.command == "backerr-sweep":
        lams = [io_mod.parse_imaginary(tok) for tok in args.lambdas.split(",") if tok.strip()]
        seed = args.seed if args.seed is not None else _env_seed()
        rows = pencil_mod.experiment_table(p, lams, seed, blocks, cfg, variant=args.variant)
        csv_text = io_mod.sweep_rows_to_csv(rows)
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"wrote {args.csv} ({len(rows)} rows)")
        return 0

    if args.lam is None:
        print("error: --lambda is required for a single evaluation", file=sys.stderr)
        return 1
    lam = io_mod.parse_imaginary(args.lam)
    if lam == 0:
        print("error: lambda must be nonzero", file=sys.stderr)
        return 1
    ep = _load_eigpair(args, p, lam, blocks, cfg)
    compute = pencil_mod.eta_sd if args.variant == "sd" else pencil_mod.eta_s
    res = compute(p, ep, blocks, cfg)
    doc = _doc_header("backerr", seed=None if args.u else (args.seed if args.seed is not None else _env_seed()))
    doc["problem"] = {
        "pencil": io_mod.pencil_to_doc(p),
        "u": io_mod.vector_to_doc(ep.u),
        "lambda": io_mod.format_imaginary(lam),
        "blocks": pencil_mod.blocks_to_string(blocks),
        "variant": args.variant,
    }
    doc["bounds"] = _bounds_doc(res)
    _emit(doc)
    return 0


def _cmd_verify(args, cfg: ToleranceConfig) -> int:
    doc = io_mod.load_json(args.result)
    if not isinstance(doc, dict) or "kind" not in doc:
        print("error: result document missing 'kind'", file=sys.stderr)
        return 1
    kind = doc["kind"]
    report = None
    extra: dict = {}
    try:
        problem = doc["problem"]
        if kind in ("map-min", "map-two-sided", "dsdm-type1"):
            family = StructureFamily(problem["family"])
            x = io_mod.vector_from_doc(problem["x"], "x")
            y = io_mod.vector_from_doc(problem["y"], "y")
            delta = io_mod.matrix_from_doc(doc["solution"]["delta"], "delta")
            if kind == "map-min":
                z = np.zeros_like(y)
                w = delta.conj().T @ z
            else:
                z = io_mod.vector_from_doc(problem["z"], "z")
                w = io_mod.vector_from_doc(problem["w"], "w")
            report = oracle_mod.verify_solution(delta, (x, y, z, w), family, cfg)
            ok = report.ok
            if ok and doc.get("norms", {}).get("exact"):
                claimed = float(doc["norms"]["upper"])
                oracle_norm = None
                if kind == "map-min" and family in oracle_mod.LINEAR_FAMILIES:
                    _, oracle_norm = oracle_mod.oracle_least_norm([("mul", x, y)], family, cfg=cfg)
                elif kind == "dsdm-type1":
                    _, oracle_norm = oracle_mod.oracle_min_structured(
                        Type1Problem(x, y, z, w), family, cfg=cfg
                    )
                if oracle_norm is not None:
                    extra["oracle_norm"] = oracle_norm
                    ok = ok and oracle_norm >= claimed * (1 - 1e-6) - 1e-9
        elif kind in ("dsm", "dsdm-type2"):
            family = StructureFamily(problem["family"])
            x = io_mod.vector_from_doc(problem["x"], "x")
            y = io_mod.vector_from_doc(problem["y"], "y")
            z = io_mod.vector_from_doc(problem["z"], "z")
            w = io_mod.vector_from_doc(problem["w"], "w")
            n = y.shape[0]
            p = DsmProblem(x[:n], x[n:], y, z, w[:n], w[n:])
            h1 = io_mod.matrix_from_doc(doc["solution"]["H1"], "H1")
            h2 = io_mod.matrix_from_doc(doc["solution"]["H2"], "H2")
            delta = np.hstack([h1, h2])
            report = oracle_mod.verify_solution(delta, p, family, cfg)
            ok = report.ok
            if ok and doc.get("norms", {}).get("exact"):
                fam = family if kind == "dsm" else StructureFamily.DISSIPATIVE
                _, oracle_norm = oracle_mod.oracle_min_structured(p, fam, cfg=cfg)
                claimed = float(doc["norms"]["upper"])
                extra["oracle_norm"] = oracle_norm
                ok = ok and oracle_norm >= claimed * (1 - 1e-6) - 1e-9
        elif kind == "backerr":
            p = io_mod.pencil_from_doc(problem["pencil"])
            uvec = io_mod.vector_from_doc(problem["u"], "u")
            lam = io_mod.parse_imaginary(problem["lambda"])
            blocks = pencil_mod.parse_blocks(problem["blocks"])
            n, m = p.n, p.m
            ep = pencil_mod.EigenPair(lam, uvec[:n], uvec[n : 2 * n], uvec[2 * n :])
            compute = pencil_mod.eta_sd if problem["variant"] == "sd" else pencil_mod.eta_s
            res = compute(p, ep, blocks, cfg)
            stored = doc["bounds"]
            ok = (
                res.finite == stored["finite"]
                and abs(res.eta_lower - stored["eta_lower"]) <= 1e-9 * max(1.0, abs(res.eta_lower))
                and abs(res.eta_upper - stored["eta_upper"]) <= 1e-9 * max(1.0, abs(res.eta_upper))
            )
            if res.finite and ok:
                pencil_mod.reconstruct_perturbation(p, ep, blocks, res, cfg)
            extra = {"recomputed_lower": res.eta_lower, "recomputed_upper": res.eta_upper}
        else:
            print(f"error: unknown result kind {kind!r}", file=sys.stderr)
            return 1
    except KeyError as exc:
        print(f"error: result document missing field {exc}", file=sys.stderr)
        return 1

    out = {"kind": kind, "ok": bool(ok)}
    if report is not None:
        out["residuals"] = report.as_dict()
    out.update(extra)
    _emit(out)
    return 0 if ok else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:2] == ["backerr", "sweep"]:
        argv = ["backerr-sweep"] + argv[2:]
    parser = _build_parser()
    args = parser.parse_args(argv)
    cfg = _tol_from_args(args)
    try:
        if args.command == "map":
            return _cmd_map_solve(args, cfg)
        if args.command == "pencil":
            if args.pencil_command == "gen":
                return _cmd_pencil_gen(args, cfg)
            return _cmd_pencil_validate(args, cfg)
        if args.command in ("backerr", "backerr-sweep"):
            return _cmd_backerr(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        parser.error(f"unknown command {args.command}")
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DsmkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
