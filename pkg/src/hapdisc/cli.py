"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 a size
cap was exceeded.  Output goes to ``--out`` (or stdout); a one-line summary
goes to stdout, or to stderr when the document itself is on stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import certificates, exact, generators, heuristics
from .core import CapExceededError, Coloring, SetSystem, SignMatrix, eval_discrepancy, hap_disc_stream
from .formats import FormatError, read_document, serialize, to_csv

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
FAMILIES = ("subcubes", "characters", "hap", "sylvester")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- argument plumbing


def _add_common(p: argparse.ArgumentParser, *, seed: bool = False, out: bool = True):
    if seed:
        p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    if out:
        p.add_argument("--out", type=Path, help="write the result document here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_params(p: argparse.ArgumentParser, *names: str):
    helps = {
        "d": "cube dimension",
        "k": "character weight (default d/8 when 8 divides d)",
        "n": "ground size [n]",
        "mode": "HAP mode",
        "m": "Sylvester order (matrix is 2^m x 2^m)",
    }
    for name in names:
        if name == "mode":
            p.add_argument("--mode", choices=("prefix", "multiples"), help=helps[name] + " (default prefix)")
        else:
            p.add_argument(f"--{name}", type=int, help=helps[name])


def _add_instance(p: argparse.ArgumentParser):
    p.add_argument("family", nargs="?", choices=FAMILIES, help="built-in instance family")
    p.add_argument("--in", dest="input", type=Path, help="read a set_system or sign_matrix document")
    _add_params(p, "d", "k", "n", "mode", "m")


def _need(args, name: str) -> int:
    value = getattr(args, name, None)
    if value is None:
        raise UsageError(f"--{name} is required here")
    return value


def _weight(args) -> int:
    if args.k is not None:
        return args.k
    return generators.default_weight(_need(args, "d"))


def build_family(args):
    fam = args.family
    if fam == "subcubes":
        return generators.gen_subcubes(_need(args, "d"))
    if fam == "characters":
        return generators.gen_characters(_need(args, "d"), _weight(args))
    if fam == "hap":
        return generators.gen_hap(_need(args, "n"), args.mode or "prefix")
    if fam == "sylvester":
        return generators.gen_sylvester(_need(args, "m"))
    raise UsageError(f"unknown family {fam!r}")


def load_instance(args):
    if args.input is not None and args.family is not None:
        raise UsageError("give either a family or --in, not both")
    if args.input is not None:
        obj, _ = read_document(args.input.read_bytes())
        if not isinstance(obj, (SetSystem, SignMatrix)):
            raise UsageError(f"{args.input} holds a {type(obj).__name__}, expected a set system or matrix")
        return obj
    if args.family is None:
        raise UsageError("an instance is required: a family name or --in FILE")
    return build_family(args)


def _load_coloring(args, n: int) -> Coloring:
    source = args.coloring
    if source is None:
        raise UsageError("--coloring is required")
    if source == "ternary":
        return heuristics.ternary_coloring(n)
    if source == "random":
        return heuristics.random_coloring(n, args.seed)
    if source == "ones":
        return Coloring.ones(n)
    obj, _ = read_document(Path(source).read_bytes())
    if isinstance(obj, heuristics.HeuristicOutcome):
        obj = obj.coloring
    if not isinstance(obj, Coloring):
        raise UsageError(f"{source} does not hold a coloring")
    return obj


def _meta(args) -> dict:
    params = {}
    for key in ("family", "input", "d", "k", "n", "mode", "m", "kmax", "strategy", "threshold",
                "restarts", "trials", "cap", "v", "coloring", "passes", "cert"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = str(value) if isinstance(value, Path) else value
    return {"command": args.command_name, "params": params, "seed": getattr(args, "seed", 0)}


# ---------------------------------------------------------------- commands


def cmd_gen(args):
    what = args.what
    if what == "subcubes":
        obj = generators.gen_subcubes(_need(args, "d"))
        summary = f"subcubes d={args.d}: {obj.m} sets over {obj.n} points"
    elif what == "characters":
        obj = generators.gen_characters(_need(args, "d"), _weight(args))
        summary = f"characters d={args.d} k={_weight(args)}: {obj.rows} x {obj.cols}"
    elif what == "hap":
        obj = generators.gen_hap(_need(args, "n"), args.mode or "prefix")
        summary = f"hap n={args.n} {args.mode or 'prefix'}: {obj.m} sets"
    elif what == "sylvester":
        obj = generators.gen_sylvester(_need(args, "m"))
        summary = f"sylvester m={args.m}: {obj.rows} x {obj.cols}"
    else:
        obj = generators.gen_embedding(_need(args, "d"))
        summary = f"embedding d={args.d}: n={obj.n}, B_d={sorted(obj.b_of_u)[:16]}"
    return obj, summary, EXIT_OK


def cmd_disc(args):
    res = exact.disc_exact(load_instance(args))
    return res, f"disc exact: {res.value} (nodes={res.nodes_explored})", EXIT_OK


def cmd_herdisc(args):
    res = exact.herdisc_exact(load_instance(args), cap=args.cap)
    subset = [i for i in range(res.witness_subset.bit_length()) if res.witness_subset >> i & 1]
    return res, f"herdisc exact: {res.value} (witness columns {subset})", EXIT_OK


def cmd_detlb(args):
    inst = load_instance(args)
    cert = certificates.detlb_certificate(inst, args.kmax, args.strategy, args.seed, args.restarts)
    return cert, f"detlb: k={cert.k} |det|={abs(cert.det)} bound={cert.bound:.12g}", EXIT_OK


def cmd_maxdet(args):
    inst = load_instance(args)
    res = exact.find_large_det_subset(inst, args.strategy, args.seed, args.threshold, args.restarts)
    status = "found" if res.success else "threshold not met"
    code = EXIT_OK if res.success else EXIT_FAILED
    return res, f"maxdet: {status}, |det|={abs(res.det)} root={res.root:.12g} columns={list(res.columns)}", code


def cmd_color(args):
    how = args.how
    if how == "ternary":
        col = heuristics.ternary_coloring(_need(args, "n"))
        return col, f"ternary coloring n={args.n}", EXIT_OK
    if how == "random":
        col = heuristics.random_coloring(_need(args, "n"), args.seed)
        return col, f"random coloring n={args.n} seed={args.seed}", EXIT_OK
    inst = load_instance(args)
    if how == "beck-fiala":
        if not isinstance(inst, SetSystem):
            raise UsageError("beck-fiala needs a set system")
        out = heuristics.beck_fiala(inst)
        return out, f"beck-fiala: achieved {out.achieved} <= guarantee {out.guarantee}", EXIT_OK
    start = _load_coloring(args, inst.cols if isinstance(inst, SignMatrix) else inst.n)
    out = heuristics.greedy_improve(inst, start, args.passes)
    return out, f"improve: achieved {out.achieved} after {out.iterations} flips", EXIT_OK


def cmd_eval(args):
    if args.family == "hap" and args.input is None:
        n = _need(args, "n")
        rep = hap_disc_stream(n, args.mode or "prefix", _load_coloring(args, n))
    else:
        inst = load_instance(args)
        n = inst.cols if isinstance(inst, SignMatrix) else inst.n
        rep = eval_discrepancy(inst, _load_coloring(args, n))
    return rep, f"eval: {rep.value} (row {rep.argmax_row})", EXIT_OK


def _combine(name: str, reports: list[certificates.CheckReport]) -> certificates.CheckReport:
    failed = [r for r in reports if not r.passed]
    metrics = {"checks": len(reports), "failed": len(failed)}
    if len(reports) == 1:
        metrics.update(reports[0].metrics)
    detail = "; ".join(f"{r.name}: {r.detail}" for r in failed)
    return certificates.CheckReport(name, not failed, detail, sum(r.trials for r in reports), metrics)


def cmd_verify(args):
    what = args.what
    if what == "chars":
        d = _need(args, "d")
        if args.v is not None:
            vs = [generators.CharacterIndex.from_bits(args.v)]
        else:
            vs = [generators.CharacterIndex(d, v) for v in generators.weight_vectors(d, _weight(args))]
        rep = _combine("chars", [certificates.check_char_decomposition(d, v) for v in vs])
    elif what == "embed":
        wit = generators.gen_embedding(_need(args, "d"))
        parts = [certificates.check_embedding(wit, args.trials, args.seed)]
        if wit.d <= 4:
            parts.append(certificates.check_system_equivalence(wit))
        rep = _combine("embed", parts) if len(parts) > 1 else parts[0]
    elif what == "transfer":
        k = args.k if args.k is not None else _weight(args)
        rep = certificates.check_transfer(_need(args, "d"), k, args.trials, args.seed)
    else:
        inst = load_instance(args)
        if args.cert is None:
            raise UsageError("--cert is required")
        cert, _ = read_document(args.cert.read_bytes())
        if not isinstance(cert, certificates.LowerBoundCert):
            raise UsageError(f"{args.cert} does not hold a lower_bound_cert")
        rep = certificates.verify_certificate(inst, cert)
    m = rep.metrics
    extra = ""
    if "herdisc_characters" in m:
        extra = f"; herdisc(G)={m['herdisc_characters']} <= {m['factor']}*{m['herdisc_subcubes']}"
    verdict = "passed" if rep.passed else f"FAILED: {rep.detail}"
    return rep, f"verify {what}: {verdict}{extra}", EXIT_OK if rep.passed else EXIT_FAILED


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hapdisc", description="Discrepancy laboratory for subcubes and HAPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance").add_subparsers(dest="what", required=True)
    for what, params in (
        ("subcubes", ("d",)),
        ("characters", ("d", "k")),
        ("hap", ("n", "mode")),
        ("sylvester", ("m",)),
        ("embed", ("d",)),
    ):
        p = gen.add_parser(what)
        _add_params(p, *params)
        _add_common(p)
        p.set_defaults(func=cmd_gen, command_name=f"gen {what}")

    for top, fn in (("disc", cmd_disc), ("herdisc", cmd_herdisc)):
        p = sub.add_parser(top).add_subparsers(dest="how", required=True).add_parser("exact")
        _add_instance(p)
        _add_common(p)
        if top == "herdisc":
            p.add_argument("--cap", type=int, default=exact.MAX_HERDISC_COLS)
        p.set_defaults(func=fn, command_name=f"{top} exact")

    p = sub.add_parser("detlb", help="determinant lower-bound certificate")
    _add_instance(p)
    p.add_argument("--kmax", type=int)
    p.add_argument("--strategy", choices=("exhaustive", "greedy"), default="exhaustive")
    p.add_argument("--restarts", type=int, default=8)
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_detlb, command_name="detlb")

    p = sub.add_parser("maxdet", help="large-determinant column subset")
    _add_instance(p)
    p.add_argument("--strategy", choices=("exhaustive", "random-swap"), default="exhaustive")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--restarts", type=int, default=200)
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_maxdet, command_name="maxdet")

    color = sub.add_parser("color", help="constructive colorings").add_subparsers(dest="how", required=True)
    for how in ("beck-fiala", "ternary", "random", "improve"):
        p = color.add_parser(how)
        if how in ("beck-fiala", "improve"):
            _add_instance(p)
        else:
            _add_params(p, "n")
            p.set_defaults(family=None, input=None)
        if how == "improve":
            p.add_argument("--coloring", help="coloring document, or one of: ones, ternary, random")
            p.add_argument("--passes", type=int, default=1000)
        _add_common(p, seed=True)
        p.set_defaults(func=cmd_color, command_name=f"color {how}")

    p = sub.add_parser("eval", help="discrepancy of a fixed coloring")
    _add_instance(p)
    p.add_argument("--coloring", help="coloring document, or one of: ones, ternary, random")
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_eval, command_name="eval")

    verify = sub.add_parser("verify", help="exact identity checks").add_subparsers(dest="what", required=True)
    for what in ("chars", "embed", "transfer", "cert"):
        p = verify.add_parser(what)
        if what == "cert":
            _add_instance(p)
            p.add_argument("--cert", type=Path, help="lower_bound_cert document")
        else:
            _add_params(p, "d", "k")
            p.add_argument("--trials", type=int, default=100)
            p.set_defaults(family=None, input=None)
        if what == "chars":
            p.add_argument("--v", help="character index as a 0/1 string (default: all of weight k)")
        _add_common(p, seed=True)
        p.set_defaults(func=cmd_verify, command_name=f"verify {what}")
    return parser


def _emit(args, obj, summary: str):
    fmt = getattr(args, "format", "json")
    data = to_csv(obj) if fmt == "csv" else serialize(obj, _meta(args))
    if args.out is not None:
        args.out.write_bytes(data)
        print(summary)
    else:
        sys.stdout.write(data.decode())
        sys.stdout.flush()
        print(summary, file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        obj, summary, code = args.func(args)
        _emit(args, obj, summary)
    except CapExceededError as exc:
        print(f"hapdisc: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, FormatError, ValueError, TypeError, OSError) as exc:
        print(f"hapdisc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
