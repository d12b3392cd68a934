"""Command-line front end.

Subcommands:

  decompose          isotypical decomposition report for a space
  check-go           decide the GO property of a metric, write a certificate
  reproduce-theorem  full pipeline on a Stiefel space: build, verify the
                     deformation family, reduce, scan for uniqueness

Spaces are either the builtin "stiefel N K" or a JSON file carrying a
serialized algebra plus an h-basis.  Exit codes: 0 pass/verified, 1
falsified, 2 input error.  Reports are deterministic functions of the
inputs, the seed, and the mode; GO_METRIC_LAB_SEED supplies a fallback
seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import decomp as decomp_mod
from . import go as go_mod
from . import isotropy, lie_core, metric as metric_mod, stiefel

EXIT_PASS = 0
EXIT_FALSIFIED = 1
EXIT_INPUT_ERROR = 2


@dataclass
class RunConfig:
    mode: str = "exact"
    seed: int = 0
    tol: float = 1e-9
    out: Optional[str] = None
    jobs: int = 1
    verbose: bool = False

    @property
    def tol_or_none(self) -> Optional[float]:
        return None if self.mode == "exact" else self.tol


def _default_seed() -> int:
    env = os.environ.get("GO_METRIC_LAB_SEED")
    return int(env) if env else 0


def _config_from_args(args) -> RunConfig:
    return RunConfig(mode=args.mode, seed=args.seed, tol=args.tol,
                     out=args.out, jobs=args.jobs, verbose=args.verbose)


def _emit(cfg: RunConfig, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


class InputError(Exception):
    pass


def _load_space(spec_args: List[str], cfg: RunConfig):
    """Builtin "stiefel N K" or a JSON file with algebra + h basis."""
    if len(spec_args) == 3 and spec_args[0] == "stiefel":
        try:
            n, k = int(spec_args[1]), int(spec_args[2])
        except ValueError as exc:
            raise InputError(f"bad stiefel arguments: {exc}") from exc
        try:
            space = stiefel.build_stiefel(n, k)
        except lie_core.InvalidDimensionError as exc:
            raise InputError(str(exc)) from exc
        return space.decomp, space
    if len(spec_args) == 1:
        path = spec_args[0]
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(
                f"malformed JSON in {path}: line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}") from exc
        try:
            g = lie_core.from_json_dict(data["algebra"])
            split = decomp_mod.split_from_json_dict(g, data)
            action = isotropy.isotropy_action(split, cfg.tol_or_none)
            dec = isotropy.decompose_isotypic(action, seed=cfg.seed,
                                              tol=cfg.tol_or_none)
        except (KeyError, ValueError, ArithmeticError) as exc:
            raise InputError(f"bad space file {path}: {exc}") from exc
        return dec, None
    raise InputError("space must be 'stiefel N K' or one JSON file path")


def cmd_decompose(args) -> int:
    cfg = _config_from_args(args)
    dec, _ = _load_space(args.space, cfg)
    report = isotropy.decomposition_report(dec)
    report["mode"] = cfg.mode
    _emit(cfg, report)
    return EXIT_PASS


def cmd_check_go(args) -> int:
    cfg = _config_from_args(args)
    dec, space = _load_space(args.space, cfg)
    tol = cfg.tol_or_none

    witness = None
    if args.family_t is not None:
        if space is None:
            raise InputError("--family-t needs a builtin stiefel space")
        t = Fraction(args.family_t)
        if t <= 0:
            raise InputError(f"family parameter must be positive, got {t}")
        a = stiefel.metric_at(space, t)
        witness = stiefel.witness_map(space, t)
    elif args.metric:
        try:
            with open(args.metric) as fh:
                data = json.load(fh)
            a = metric_mod.metric_from_json_dict(dec, data, tol)
        except OSError as exc:
            raise InputError(f"cannot read {args.metric}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(
                f"malformed JSON in {args.metric}: line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}") from exc
        except ValueError as exc:
            raise InputError(f"bad metric file: {exc}") from exc
    else:
        raise InputError("provide a metric file or --family-t")

    if not a.is_pd:
        raise InputError("metric is not positive definite")
    strategy = args.strategy
    if strategy == "family" and witness is None:
        raise InputError("family strategy needs --family-t")
    cert = go_mod.go_check(a, strategy=strategy, count=args.count,
                           seed=cfg.seed, witness_map=witness, tol=tol)
    payload = go_mod.certificate_to_json_dict(cert, tol=tol)
    payload["normalizer_equivariant"] = metric_mod.check_normalizer_equivariance(
        a, tol=tol)
    payload["mode"] = cfg.mode
    _emit(cfg, payload)
    return EXIT_PASS if cert.verdict != "falsified" else EXIT_FALSIFIED


def cmd_reproduce_theorem(args) -> int:
    cfg = _config_from_args(args)
    try:
        report = stiefel.reproduce_report(
            args.n, args.k, resolution=Fraction(args.resolution),
            seed=cfg.seed, jobs=cfg.jobs,
            offdiagonal_samples=args.offdiagonal_samples)
    except lie_core.InvalidDimensionError as exc:
        raise InputError(str(exc)) from exc
    report["mode"] = cfg.mode
    _emit(cfg, report)
    verified = all(c["verdict"] == "verified-on-family"
                   for c in report["family_certificates"].values())
    unique = (report["uniqueness"]["grid"]["survivors_all_in_family"]
              and report["uniqueness"]["grid"]["n_survivors"] > 0)
    return EXIT_PASS if (verified and unique) else EXIT_FALSIFIED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=["exact", "float"], default="exact")
    common.add_argument("--seed", type=int, default=_default_seed())
    common.add_argument("--tol", type=float, default=1e-9,
                        help="zero tolerance in float mode")
    common.add_argument("--out", type=str, default=None,
                        help="write the JSON report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker processes for scans")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="go-metric-lab",
        description="decide and certify geodesic-orbit metrics on compact "
                    "homogeneous spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common],
                       help="isotypical decomposition report")
    p.add_argument("space", nargs="+",
                   help="'stiefel N K' or a space JSON file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("check-go", parents=[common],
                       help="decide the GO property of a metric")
    p.add_argument("space", nargs="+",
                   help="'stiefel N K' or a space JSON file")
    p.add_argument("--metric", type=str, default=None,
                   help="metric JSON file (params over the commutant basis)")
    p.add_argument("--family-t", type=str, default=None,
                   help="use the builtin deformation metric at this t")
    p.add_argument("--strategy", choices=["basis", "random", "family"],
                   default="basis")
    p.add_argument("--count", type=int, default=100,
                   help="sample count for random/family strategies")
    p.set_defaults(func=cmd_check_go)

    p = sub.add_parser("reproduce-theorem", parents=[common],
                       help="verify and scan the Stiefel deformation family")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--resolution", type=str, default="1/4",
                   help="grid step on [1/4, 4] for the uniqueness scan")
    p.add_argument("--offdiagonal-samples", type=int, default=200)
    p.set_defaults(func=cmd_reproduce_theorem)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
