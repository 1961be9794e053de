"""Command-line interface.

Exit status: 0 when every reported verdict holds (or holds empirically),
1 when one fails, 2 when the weakest is inconclusive, 3 on usage or format
errors.  Reports go to ``--out`` (default: the configured output directory)
and a JSON summary is printed on stdout.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .acceptance import run_all
from .config import RunConfig
from .matrices import MATRIX_RELATIONS, WeightMatrix, check_matrix, matrix_compare
from .omega import WeightFunction, associated_matrix, check_omega, conjugate
from .relations import RELATIONS, compare
from .seqcore import CONDITIONS, WeightSequence, check_condition, check_lemma_chain, parse_family
from .spectral import (OperatorSystem, apriori_constant, check_ellipticity, classify, derivative_norms,
                       iterate_norms, mainprop_trace, make_field, named_system, rho_schedule)
from .transforms import (PreconditionError, dominating_sequence, komatsu_lift,
                         regularize_almost_increasing)
from .verdict import Status, Verdict, weakest

EXIT = {Status.HOLDS: 0, Status.HOLDS_EMPIRICALLY: 0, Status.FAILS: 1, Status.INCONCLUSIVE: 2}
USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers

def _sequence(text: str, K: int) -> WeightSequence:
    """A family spec (``gevrey:2``) or a sequence file."""
    if Path(text).suffix == ".json" or Path(text).exists():
        M = io.read_sequence(text)
        return M.truncate(min(K, M.K)) if K < M.K else M
    return parse_family(text, K)


def _weight_function(text: str, t_max: float) -> WeightFunction:
    """``power:0.5``, ``log-power:2`` or a weight-function file."""
    if Path(text).suffix == ".json" or Path(text).exists():
        return io.read_weight_function(text)
    name, *args = text.split(":")
    if name == "power" and len(args) == 1:
        return WeightFunction.power(float(args[0]), t_max)
    if name == "log-power" and len(args) == 1:
        return WeightFunction.log_power(float(args[0]), t_max)
    raise ValueError(f"cannot parse weight function {text!r}; expected power:a, log-power:beta or a file")


def _matrix(args, which: str = "") -> WeightMatrix:
    index = getattr(args, f"index{which}", None)
    families = getattr(args, f"families{which}", None)
    omega = getattr(args, f"omega{which}", None)
    if sum(x is not None for x in (index, families, omega)) != 1:
        raise UsageError("give exactly one of --index, --families or --omega for each matrix")
    if index:
        return io.read_matrix(index)
    if families:
        seqs = [_sequence(f, args.K) for f in families.split(",")]
        return WeightMatrix.of(*seqs)
    return associated_matrix(_weight_function(omega, args.t_max), _floats(args.lambdas), args.K, args.cfg)


def _floats(text):
    return None if text is None else [float(x) for x in text.split(",")]


def _system(text: str, dim: int) -> OperatorSystem:
    if Path(text).suffix == ".json" or Path(text).exists():
        return io.read_operators(text)
    return named_system(text, dim)


def _field(text: str, dim: int, cutoff: int):
    """``gevrey:s``, ``omega:power:a``, ``random:seed:band`` or ``mode:xi[,xi2]``."""
    name, _, rest = text.partition(":")
    if name == "gevrey":
        return make_field("gevrey-profile", dim, cutoff, s=float(rest))
    if name == "omega":
        return make_field("omega-profile", dim, cutoff, omega=_weight_function(rest, 1e30))
    if name == "random":
        seed, band = rest.split(":")
        return make_field("band-limited-random", dim, cutoff, seed=int(seed), band=int(band))
    if name == "mode":
        return make_field("single-mode", dim, cutoff, xi0=[int(x) for x in rest.split(",")])
    raise ValueError(f"cannot parse field {text!r}")


def _status_of(obj) -> list[Status]:
    """All verdict statuses found in a report."""
    out = []
    if isinstance(obj, Verdict):
        out.append(obj.status)
    elif isinstance(obj, dict):
        for v in obj.values():
            out.extend(_status_of(v))
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            out.extend(_status_of(v))
    elif hasattr(obj, "verdict"):
        out.append(obj.verdict.status)
    return out


# ---------------------------------------------------------------------------
# commands; each returns (report, status)

def cmd_seq_build(args):
    M = parse_family(args.family, args.K)
    path = io.write_sequence(M, Path(args.out) / (args.file or f"{M.name.replace(':', '_')}.json"),
                             {"family": args.family})
    return {"sequence": M.name, "K": M.K, "file": path.name}, Status.HOLDS


def cmd_seq_analyze(args):
    M = _sequence(args.M, args.K)
    conds = CONDITIONS if args.conditions == "all" else args.conditions.split(",")
    verdicts = {c: check_condition(M, c, args.cfg, C=args.C) for c in conds}
    return {"sequence": M.name, "K": M.K, "conditions": verdicts}, weakest(v.status for v in verdicts.values())


def cmd_seq_lemmas(args):
    M = _sequence(args.M, args.K)
    rep = check_lemma_chain(M, args.cfg)
    return {"sequence": M.name, "K": M.K, "items": rep}, weakest(v.status for v in rep.values())


def cmd_compare(args):
    M, N = _sequence(args.M, args.K), _sequence(args.N, args.K)
    rv = compare(M, N, args.rel, args.cfg)
    rep = {"M": M.name, "N": N.name, **rv.to_dict()}
    if args.gap:
        rep["gap"] = rv.gap[1:].tolist()
    return rep, rv.status


def cmd_matrix_check(args):
    W = _matrix(args)
    rep = check_matrix(W, args.mode, args.cfg)
    keys = (f"{args.mode}-semiregular", f"weakly-{args.mode}-regular")
    status = rep[keys[1] if args.weakly else keys[0]].status
    return {"lambdas": W.lambdas, "names": [M.name for M in W.sequences], **rep}, status


def cmd_matrix_compare(args):
    A, B = _matrix(args, "_a"), _matrix(args, "_b")
    rep = matrix_compare(A, B, args.rel, args.cfg)
    return rep, rep["verdict"].status


def cmd_omega_check(args):
    w = _weight_function(args.omega, args.t_max)
    rep = check_omega(w, args.points, args.concave_from, args.cfg, args.literal_beta)
    return {"omega": w.to_dict(), "verdicts": rep}, weakest(v.status for v in rep.values())


def cmd_omega_conjugate(args):
    w = _weight_function(args.omega, args.t_max)
    tab = conjugate(w, args.y_max, args.points)
    out = Path(args.out) / "conjugate.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["y,phi_star,argmax_s,interior"]
    lines += [f"{y:.12g},{v:.12g},{s:.12g},{int(i)}"
              for y, v, s, i in zip(tab.y, tab.value, tab.argmax, tab.interior)]
    out.write_text("\n".join(lines) + "\n")
    n_ext = int((~tab.interior).sum())
    status = Status.HOLDS if n_ext == 0 else Status.INCONCLUSIVE
    return {"omega": w.to_dict(), "points": int(tab.y.size), "extrapolated_points": n_ext,
            "file": out.name}, status


def cmd_omega_matrix(args):
    w = _weight_function(args.omega, args.t_max)
    W = associated_matrix(w, _floats(args.lambdas), args.K, args.cfg)
    index = io.write_matrix(W, args.out, args.stem)
    return {"omega": w.to_dict(), "lambdas": W.lambdas, "index": index.name}, Status.HOLDS


def cmd_transform_komatsu(args):
    L = _sequence(args.L, args.K) if not args.L_log_file else np.loadtxt(args.L_log_file, delimiter=",")
    M = _sequence(args.M, args.K)
    res = komatsu_lift(L, M, args.cfg)
    io.write_sequence(res.N, Path(args.out) / "komatsu.json", {"L": str(args.L or args.L_log_file), "M": M.name})
    rep = {"N": io.sequence_to_dict(res.N), "report": res.report}
    return rep, weakest(_status_of(res.report))


def cmd_transform_regularize(args):
    M = _sequence(args.M, args.K)
    C = args.C if args.C is not None else check_condition(M, "almost-increasing", args.cfg).diagnostics["C_hat"]
    res = regularize_almost_increasing(M, C, args.cfg)
    io.write_sequence(res.M_tilde, Path(args.out) / "regularized.json", {"M": M.name, "C": C})
    rep = {"C": C, "M_tilde": io.sequence_to_dict(res.M_tilde), "report": res.report}
    return rep, weakest(_status_of({k: v for k, v in res.report.items() if k != "axioms"}))


def cmd_transform_dominate(args):
    logL = dominating_sequence(_floats(args.coeff_norms) or [], _floats(args.iterate_norms) or [],
                               args.d, args.K)
    return {"log_values": logL.tolist(), "d": args.d}, Status.HOLDS


def _spectral_inputs(args):
    P = _system(args.op, args.dim)
    u = _field(args.field, args.dim, args.cutoff)
    return P, u


def cmd_spectral_iterates(args):
    P, u = _spectral_inputs(args)
    tab = iterate_norms(P, u, args.kmax, args.cfg)
    io.write_norm_table(tab, Path(args.out) / "iterates.csv")
    limited = sum(r.cutoff_limited for r in tab.rows)
    return ({"field": u.label, "rows": len(tab.rows), "cutoff_limited": limited, "file": "iterates.csv"},
            Status.HOLDS if not limited else Status.INCONCLUSIVE)


def cmd_spectral_derivatives(args):
    u = _field(args.field, args.dim, args.cutoff)
    tab = derivative_norms(u, args.amax, args.cfg)
    io.write_norm_table(tab, Path(args.out) / "derivatives.csv")
    limited = sum(r.cutoff_limited for r in tab.rows)
    return ({"field": u.label, "rows": len(tab.rows), "cutoff_limited": limited, "file": "derivatives.csv"},
            Status.HOLDS if not limited else Status.INCONCLUSIVE)


def cmd_spectral_classify(args):
    P, u = _spectral_inputs(args)
    cands = [_sequence(c, args.K) for c in args.candidates.split(",")] if args.candidates else []
    if args.table == "iterates":
        tab = iterate_norms(P, u, args.kmax, args.cfg)
        d = P.common_order
    else:
        tab = derivative_norms(u, args.amax, args.cfg)
        d = 1
    io.write_norm_table(tab, Path(args.out) / f"{args.table}.csv")
    rep = classify(tab, cands, d, args.cfg)
    s = rep["fit"]["s_hat"]
    status = Status.HOLDS
    if args.expect_s is not None:
        status = Status.HOLDS if abs(s - args.expect_s) <= 0.15 else Status.FAILS
        rep["expect_s"] = Verdict("s_hat within 0.15 of expectation", status,
                                  None if status is Status.HOLDS else
                                  {"k": 0, "lhs": s, "rhs": args.expect_s})
    return rep, status


def cmd_spectral_apriori(args):
    P = _system(args.op, args.dim)
    ac = apriori_constant(P)
    return {"C": ac.C, "xi": list(ac.xi), "lattice_sup": ac.lattice_sup, "ray_limit": ac.ray_limit,
            "clamped_to_1": ac.clamped, "convention": "(1+|xi|^2)^d <= C^2 (sum_j |P_j|^2 + 1)",
            "ellipticity": check_ellipticity(P)}, Status.HOLDS


def cmd_spectral_mainprop(args):
    P, u = _spectral_inputs(args)
    M = _sequence(args.M, args.K)
    v = mainprop_trace(P, u, M, args.rho, args.kmax, args.H, args.cfg)
    return {"field": u.label, "M": M.name, "verdict": v}, v.status


def cmd_spectral_rho(args):
    M = _sequence(args.M, args.K)
    rs = rho_schedule(args.R, args.Rp, M, args.dk, args.cfg)
    return {"M": M.name, "rho": rs.rho, "min_slack": rs.min_slack, "bound": rs.bound,
            "verdict": rs.verdict}, rs.verdict.status


def cmd_selftest(args):
    results = run_all(args.cfg)
    for r in results:
        print(r.line(), file=sys.stderr)
    rep = {"criteria": [r.to_dict() for r in results],
           "note": "criterion 10 (determinism) compares two selftest reports byte for byte"}
    return rep, Status.HOLDS if all(r.passed for r in results) else Status.FAILS


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ultraclass", description="Weight sequences, weight functions, weight matrices "
                "and a spectral harness for iterate estimates on the torus.")
    p.add_argument("--config", help="RunConfig JSON file (overrides ULTRACLASS_CONFIG)")
    p.add_argument("--out", help="report directory (default: config out_dir)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(parent, name, fn, help_):
        sp = parent.add_parser(name, help=help_)
        sp.set_defaults(fn=fn, report=name)
        sp.add_argument("--K", type=int, help="truncation order (default from config)")
        return sp

    seq = sub.add_parser("seq", help="weight sequences").add_subparsers(dest="sub", required=True,
                                                                         parser_class=_Parser)
    sp = add(seq, "build", cmd_seq_build, "write a named family to a sequence file")
    sp.add_argument("--family", required=True)
    sp.add_argument("--file", help="output file name inside --out")
    for name, fn in (("analyze", cmd_seq_analyze), ("lemmas", cmd_seq_lemmas)):
        sp = add(seq, name, fn, f"{name} a sequence")
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--family", dest="M")
        g.add_argument("--file", dest="M")
        if name == "analyze":
            sp.add_argument("--conditions", default="all", help="'all' or a comma list of " + ",".join(CONDITIONS))
            sp.add_argument("--C", type=float, help="constant for almost-increasing")

    sp = add(sub, "compare", cmd_compare, "compare two sequences")
    sp.add_argument("--M", required=True)
    sp.add_argument("--N", required=True)
    sp.add_argument("--rel", required=True, choices=RELATIONS)
    sp.add_argument("--gap", action="store_true", help="include the gap sequence")

    mat = sub.add_parser("matrix", help="weight matrices").add_subparsers(dest="sub", required=True,
                                                                           parser_class=_Parser)

    def matrix_source(sp, suffix=""):
        flag = suffix.replace("_", "-")
        sp.add_argument(f"--index{flag}", dest=f"index{suffix}")
        sp.add_argument(f"--families{flag}", dest=f"families{suffix}", help="comma list of family specs")
        sp.add_argument(f"--omega{flag}", dest=f"omega{suffix}", help="weight function for an associated matrix")

    sp = add(mat, "check", cmd_matrix_check, "semiregularity and weak regularity")
    matrix_source(sp)
    sp.add_argument("--mode", choices=("R", "B"), required=True)
    sp.add_argument("--weakly", action="store_true", help="exit status from weak regularity")
    sp.add_argument("--lambdas")
    sp.add_argument("--t-max", dest="t_max", type=float, default=1e30)
    sp = add(mat, "compare", cmd_matrix_compare, "matrix relations")
    matrix_source(sp, "_a")
    matrix_source(sp, "_b")
    sp.add_argument("--rel", required=True, choices=MATRIX_RELATIONS)
    sp.add_argument("--lambdas")
    sp.add_argument("--t-max", dest="t_max", type=float, default=1e30)

    om = sub.add_parser("omega", help="weight functions").add_subparsers(dest="sub", required=True,
                                                                          parser_class=_Parser)
    for name, fn, help_ in (("check", cmd_omega_check, "axioms and hypotheses"),
                            ("conjugate", cmd_omega_conjugate, "Young conjugate table"),
                            ("matrix", cmd_omega_matrix, "associated weight matrix")):
        sp = add(om, name, fn, help_)
        sp.add_argument("--omega", required=True, help="power:a, log-power:beta or a file")
        sp.add_argument("--t-max", dest="t_max", type=float, default=1e30)
        if name == "check":
            sp.add_argument("--points", type=int, default=512)
            sp.add_argument("--concave-from", dest="concave_from", type=float, default=0.0)
            sp.add_argument("--literal-beta", dest="literal_beta", action="store_true")
        elif name == "conjugate":
            sp.add_argument("--y-max", dest="y_max", type=float, required=True)
            sp.add_argument("--points", type=int, default=1024)
        else:
            sp.add_argument("--lambdas")
            sp.add_argument("--stem", default="matrix")

    tr = sub.add_parser("transform", help="sequence transforms").add_subparsers(dest="sub", required=True,
                                                                                 parser_class=_Parser)
    sp = add(tr, "komatsu", cmd_transform_komatsu, "Komatsu lift L <= N ⊲ M")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--L", help="family spec or sequence file")
    g.add_argument("--L-log-file", dest="L_log_file", help="comma-separated log-values of L")
    sp.add_argument("--M", required=True)
    sp = add(tr, "regularize", cmd_transform_regularize, "almost-increasing regularization")
    sp.add_argument("--M", required=True)
    sp.add_argument("--C", type=float, help="constant (default: the empirical C_hat)")
    sp = add(tr, "dominate", cmd_transform_dominate, "dominating sequence")
    sp.add_argument("--coeff-norms", dest="coeff_norms", help="comma list by |alpha|")
    sp.add_argument("--iterate-norms", dest="iterate_norms", help="comma list by word length")
    sp.add_argument("--d", type=int, required=True)

    spc = sub.add_parser("spectral", help="torus harness").add_subparsers(dest="sub", required=True,
                                                                           parser_class=_Parser)
    for name, fn in (("iterates", cmd_spectral_iterates), ("derivatives", cmd_spectral_derivatives),
                     ("classify", cmd_spectral_classify), ("apriori", cmd_spectral_apriori),
                     ("mainprop", cmd_spectral_mainprop), ("rho", cmd_spectral_rho)):
        sp = add(spc, name, fn, f"spectral {name}")
        if name != "rho":
            sp.add_argument("--dim", type=int, default=1)
        if name in ("iterates", "classify", "apriori", "mainprop"):
            sp.add_argument("--op", required=True, help="laplace, gradient, d1, identity or an operator file")
        if name in ("iterates", "derivatives", "classify", "mainprop"):
            sp.add_argument("--field", required=True, help="gevrey:s, omega:power:a, random:seed:band, mode:xi")
            sp.add_argument("--cutoff", type=int, default=None)
        if name in ("iterates", "classify", "mainprop"):
            sp.add_argument("--kmax", type=int, default=12)
        if name in ("derivatives", "classify"):
            sp.add_argument("--amax", type=int, default=24)
        if name == "classify":
            sp.add_argument("--table", choices=("iterates", "derivatives"), default="iterates")
            sp.add_argument("--candidates", help="comma list of family specs or files")
            sp.add_argument("--expect-s", dest="expect_s", type=float)
        if name == "mainprop":
            sp.add_argument("--M", required=True)
            sp.add_argument("--rho", type=float, required=True)
            sp.add_argument("--H", type=float)
        if name == "rho":
            sp.add_argument("--M", required=True)
            sp.add_argument("--R", type=float, required=True)
            sp.add_argument("--Rp", type=float, required=True)
            sp.add_argument("--dk", type=int, required=True)

    sp = sub.add_parser("selftest", help="run the acceptance battery")
    sp.set_defaults(fn=cmd_selftest, report="selftest", K=None)
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig.from_env()
    if args.out:
        cfg = cfg.updated(out_dir=args.out)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        args.cfg = cfg
        args.out = cfg.out_dir
        if getattr(args, "K", None) is None:
            args.K = cfg.K
        if getattr(args, "cutoff", "absent") is None:
            args.cutoff = cfg.cutoff
        name = "-".join(x for x in (args.command, getattr(args, "sub", None)) if x)
        try:
            report, status = args.fn(args)
        except PreconditionError as exc:
            report, status = {"rejected": str(exc), "diagnostic": exc.report}, Status.FAILS
        config = {k: v for k, v in cfg.to_dict().items() if k != "out_dir"}
        doc = {"command": name, "config": config, "status": status.value, "report": report}
        text = io.to_json(doc)
        io.write_json(doc, Path(cfg.out_dir) / f"{name}.json")
        sys.stdout.write(text)
        return EXIT[status]
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except io.FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ValueError, KeyError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    raise SystemExit(main())
