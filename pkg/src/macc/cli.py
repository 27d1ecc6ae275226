"""Command-line front end.

    macc info      --builtin halfduplex --px1 0.25 0.5 0.25 --px2 0.5 0.5
    macc region    --builtin halfduplex --grid-step 0.05 --out hull.csv
    macc halfduplex --p 0.25 --d 0:0.1:1 --q 0.5
    macc gaussian  --p1 1 --p2 1 --n 1 --n1 3
    macc simulate  --channel ch.json --uniform --n 6 --r2 0.1667 --trials 500

Exit codes: 0 success, 1 usage error, 2 input-format error, 3 computational guard.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .binning import (
    GuardError,
    MAX_EQUIVOCATION_TERMS,
    SimConfig,
    equivocation_terms,
    exact_equivocation,
    generate_codebook,
    run_error_trials,
)
from .channel import BUILTINS, ChannelError, GaussianMaccParams, HalfDuplexParams, load_channel
from .info import (
    AuxInputPolicy,
    JointSizeError,
    ProductInputPolicy,
    build_joint,
    mutual_information,
    policy_from_dict,
)
from .regions import SearchConfig, gaussian_triple, halfduplex_triple, search_inner_region

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputFormatError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_sweep(text):
    """``"0.3"`` -> [0.3]; ``"0:0.25:1"`` -> [0, 0.25, 0.5, 0.75, 1] (inclusive)."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"not a number or start:step:end sweep: {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"sweeps are start:step:end, got {text!r}")
    start, step, end = nums
    if step <= 0 or end < start:
        raise UsageError(f"empty or non-increasing sweep {text!r}")
    count = int(np.floor((end - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _fmt(x):
    return f"{x:.6f}"


def _csv(header, rows):
    return "\n".join([",".join(header)] + [",".join(_fmt(v) for v in r) for r in rows]) + "\n"


def _manifest(args, inputs=(), outputs=()):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {"subcommand": args.command, "inputs": [str(p) for p in inputs],
            "parameters": params, "seed": getattr(args, "seed", None),
            "outputs": [str(p) for p in outputs]}


def _emit(text, path):
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def _load_channel(args):
    if args.builtin and args.channel:
        raise UsageError("give either --channel or --builtin, not both")
    if args.builtin:
        return BUILTINS[args.builtin](), []
    if not args.channel:
        raise UsageError("a channel is required (--channel FILE or --builtin NAME)")
    try:
        return load_channel(args.channel), [args.channel]
    except OSError as exc:
        raise InputFormatError(f"cannot read channel file: {exc}") from exc


def _load_policy(args, ch):
    if args.policy:
        if args.px1 or args.px2 or args.uniform:
            raise UsageError("--policy excludes --px1/--px2/--uniform")
        try:
            doc = json.loads(Path(args.policy).read_text(encoding="utf-8"))
            policy = policy_from_dict(doc)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"{args.policy}: bad policy file: {exc}") from exc
        return policy, [args.policy]
    px1 = args.px1 if args.px1 else np.full(ch.nx1, 1.0 / ch.nx1)
    px2 = args.px2 if args.px2 else np.full(ch.nx2, 1.0 / ch.nx2)
    try:
        return ProductInputPolicy(px1, px2), []
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_policy_fits(ch, policy):
    nx1, nx2 = ((policy.px1.size, policy.px2.size) if isinstance(policy, ProductInputPolicy)
                else (policy.nx1, policy.nx2))
    if (nx1, nx2) != (ch.nx1, ch.nx2):
        raise InputFormatError(f"policy is for |X1|={nx1}, |X2|={nx2} but the channel has "
                               f"|X1|={ch.nx1}, |X2|={ch.nx2}")


PRODUCT_TERMS = [
    ("I(X1;Y|X2)", "X1", "Y", "X2"),
    ("I(X2;Y|X1)", "X2", "Y", "X1"),
    ("I(X2;Y1|X1)", "X2", "Y1", "X1"),
    ("I(X1,X2;Y)", ["X1", "X2"], "Y", ()),
]
AUX_TERMS = [
    ("I(X1;Y|U,V)", "X1", "Y", ["U", "V"]),
    ("I(V;Y|U,X1)", "V", "Y", ["U", "X1"]),
    ("I(V;Y1|U,X1)", "V", "Y1", ["U", "X1"]),
    ("I(X1,V;Y|U)", ["X1", "V"], "Y", "U"),
    ("I(X1,V;Y)", ["X1", "V"], "Y", ()),
]


def cmd_info(args):
    ch, inputs = _load_channel(args)
    policy, more = _load_policy(args, ch)
    _check_policy_fits(ch, policy)
    j = build_joint(ch, policy)
    terms = PRODUCT_TERMS + (AUX_TERMS if isinstance(policy, AuxInputPolicy) else [])
    values = {name: mutual_information(j, a, b, c) for name, a, b, c in terms}
    if args.json:
        text = _dump({"manifest": _manifest(args, inputs + more, [args.out] if args.out else []),
                      "bits": values})
    else:
        width = max(len(k) for k in values)
        text = "".join(f"{k:<{width}}  {_fmt(v)}\n" for k, v in values.items())
    _emit(text, args.out)


def cmd_region(args):
    ch, inputs = _load_channel(args)
    try:
        cfg = SearchConfig(args.grid_step, args.aux_card_u, args.aux_card_v,
                           args.random_samples, args.seed, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = search_inner_region(ch, cfg)
    outputs = [p for p in (args.out, args.support_out) if p]
    manifest = _manifest(args, inputs, outputs)
    support = [sp.to_dict() for sp in result.support]
    if args.json:
        _emit(_dump({"manifest": manifest,
                     "hull": [{"r1": a, "r2": b} for a, b in result.polygon.vertices],
                     "support": support}), args.out)
    else:
        _emit(result.polygon.to_csv(), args.out)
    if args.support_out:
        Path(args.support_out).write_text(_dump({"manifest": manifest, "support": support}),
                                          encoding="utf-8", newline="\n")


def cmd_halfduplex(args):
    ps, ds, qs = parse_sweep(args.p), parse_sweep(args.d), parse_sweep(args.q)
    single = len(ps) == len(ds) == len(qs) == 1
    rows = []
    for p in ps:
        for d in ds:
            if p + d > 1.0 + 1e-12:
                if single:
                    raise UsageError(f"P + D = {p + d} exceeds 1")
                continue
            for q in qs:
                try:
                    t = halfduplex_triple(HalfDuplexParams(p, d, q))
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
                rows.append((p, d, q) + t.as_tuple())
    if not rows:
        raise UsageError("no sweep point satisfies P + D <= 1")
    header = ("p", "d", "q", "c1", "c2", "c12")
    if args.json:
        _emit(_dump({"manifest": _manifest(args, (), [args.out] if args.out else []),
                     "rows": [dict(zip(header, r)) for r in rows]}), args.out)
    else:
        _emit(_csv(header, rows), args.out)


def cmd_gaussian(args):
    grid = [parse_sweep(s) for s in (args.p1, args.p2, args.n, args.n1)]
    rows = []
    for p1 in grid[0]:
        for p2 in grid[1]:
            for n0 in grid[2]:
                for n1 in grid[3]:
                    try:
                        t = gaussian_triple(GaussianMaccParams(p1, p2, n0, n1))
                    except ValueError as exc:
                        raise UsageError(str(exc)) from exc
                    rows.append((p1, p2, n0, n1) + t.as_tuple())
    header = ("p1", "p2", "n", "n1", "c1", "c2", "c12")
    if args.json:
        _emit(_dump({"manifest": _manifest(args, (), [args.out] if args.out else []),
                     "rows": [dict(zip(header, r)) for r in rows]}), args.out)
    else:
        _emit(_csv(header, rows), args.out)


def cmd_simulate(args):
    ch, inputs = _load_channel(args)
    policy, more = _load_policy(args, ch)
    _check_policy_fits(ch, policy)
    try:
        cfg = SimConfig(args.n, args.r1, args.r2, args.trials, args.epsilon, args.seed,
                        args.workers, args.ensemble)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cb = generate_codebook(ch, policy, cfg)
    stats = run_error_trials(ch, policy, cfg, codebook=cb)
    eq_bits = eq_sym = None
    if not args.no_equivocation and equivocation_terms(cb, ch) <= MAX_EQUIVOCATION_TERMS:
        eq = exact_equivocation(cb, ch)
        eq_bits, eq_sym = eq.equivocation_bits, eq.equivocation_per_symbol
    report = {
        "manifest": _manifest(args, inputs + more, [args.out] if args.out else []),
        "config": cfg.to_dict(),
        "codebook": {"m1": cb.m1, "m2": cb.m2, "binSize": cb.bin_size,
                     "rates": list(cb.rates), "leakage": cb.leakage, "digest": cb.digest()},
        "peHat": stats.pe_hat,
        "peStdErr": stats.pe_stderr,
        "equivocationBits": eq_bits,
        "equivocationPerSymbol": eq_sym,
        "secrecyGap": None if eq_sym is None else args.r2 - eq_sym,
        "codewordCollisions": cb.collisions,
        "resampleCount": cb.u_resamples,
        "seed": cfg.seed,
    }
    _emit(_dump(report), args.out)


def build_parser():
    parser = _Parser(prog="macc", description="Secrecy rate regions for the MAC with a "
                                              "confidential message.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, channel=True):
        if channel:
            p.add_argument("--channel", help="channel-spec JSON file")
            p.add_argument("--builtin", choices=sorted(BUILTINS), help="use a built-in channel")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--json", action="store_true", help="emit JSON instead of text/CSV")

    def policy_flags(p):
        p.add_argument("--px1", type=float, nargs="+", help="p(x1) probabilities")
        p.add_argument("--px2", type=float, nargs="+", help="p(x2) probabilities")
        p.add_argument("--uniform", action="store_true", help="uniform inputs (the default)")
        p.add_argument("--policy", help="JSON policy file (product or auxiliary form)")

    p = sub.add_parser("info", help="mutual-information terms of the bounds")
    common(p)
    policy_flags(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("region", help="inner region by input-law search + convex hull")
    common(p)
    p.add_argument("--grid-step", type=float, default=0.05)
    p.add_argument("--aux-card-u", type=int, default=1)
    p.add_argument("--aux-card-v", type=int, default=1)
    p.add_argument("--random-samples", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--support-out", help="write the support-point dump (JSON) here")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("halfduplex", help="closed-form half-duplex bounds")
    common(p, channel=False)
    p.add_argument("--p", default="0.5", help="P[X1=1], number or start:step:end")
    p.add_argument("--d", default="0", help="P[X1=null], number or start:step:end")
    p.add_argument("--q", default="0.5", help="P[X2=1], number or start:step:end")
    p.set_defaults(func=cmd_halfduplex)

    p = sub.add_parser("gaussian", help="Gaussian inner bound")
    common(p, channel=False)
    p.add_argument("--p1", default="1")
    p.add_argument("--p2", default="1")
    p.add_argument("--n", default="1", help="receiver noise variance")
    p.add_argument("--n1", default="1", help="eavesdropper noise variance")
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("simulate", help="random-binning code simulation")
    common(p)
    policy_flags(p)
    p.add_argument("--n", type=int, required=True, help="block length")
    p.add_argument("--r1", type=float, default=0.0)
    p.add_argument("--r2", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=0.2, help="typicality slack")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ensemble", action="store_true",
                   help="fresh codebook per trial (random-coding ensemble average)")
    p.add_argument("--no-equivocation", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"macc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputFormatError, ChannelError) as exc:
        print(f"macc {args.command}: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (GuardError, JointSizeError) as exc:
        print(f"macc {args.command}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
