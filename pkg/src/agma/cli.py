"""Command-line entry point: ``agma run|verify|bounds``.

The number of Monte Carlo worker processes comes from ``AGMA_WORKERS``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .exceptions import AGMAError, ConfigError
from .harness import VERIFY_SUITES, load_config, run_experiment, verify
from .theory import (
    BoundInputs,
    decomposition_terms,
    delta_N,
    theorem1_bound,
    theorem2_bound,
)

_BOUND_FIELDS = ("L", "mu", "mu_h", "sigma_h_sq", "sigma_w_sq", "G", "d", "N", "E_N",
                 "beta", "alpha0", "F0_gap", "dist0_sq", "epsilon")


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _parse_bound_params(pairs):
    params = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or key not in _BOUND_FIELDS:
            raise ConfigError(key or pair, f"expected key=value with key in {list(_BOUND_FIELDS)}")
        try:
            params[key] = int(raw) if key in ("d", "N") else float(raw)
        except ValueError:
            raise ConfigError(key, f"not a number: {raw!r}") from None
    missing = [f for f in _BOUND_FIELDS if f not in params and f != "epsilon"]
    if missing:
        raise ConfigError(missing[0], "required")
    return params


def _cmd_run(args):
    overrides = {"output": args.out, "replications": args.reps, "seed": args.seed}
    config = load_config(args.config, overrides)
    manifest = run_experiment(config)
    failed = [e for e in manifest["combinations"] if e["status"] != "ok"]
    for e in manifest["combinations"]:
        flags = f" [{', '.join(e['flags'])}]" if e["flags"] else ""
        print(f"{e['status']:6s} {e['file']}{flags}")
    print(f"wrote {len(manifest['combinations']) - len(failed)} result files to {config.output}")
    return 1 if failed else 0


def _cmd_verify(args):
    options = {}
    if args.reps is not None:
        if args.suite not in ("moments", "bounds"):
            raise ConfigError("--reps", f"suite {args.suite!r} takes no replication count")
        options["replications"] = args.reps
    if args.seed is not None:
        options["seed"] = args.seed
    report = verify(args.suite, **options)
    print(json.dumps(report, indent=2, default=_json_safe))
    return 0 if report["passed"] else 1


def _cmd_bounds(args):
    inputs = BoundInputs(**_parse_bound_params(args.params))
    regime = args.regime
    if regime == "auto":
        regime = "strongly_convex" if inputs.mu > 0 else "convex"
    strong = regime == "strongly_convex"
    bound = theorem1_bound if strong else theorem2_bound
    values = {}
    for k in args.k:
        try:
            values[str(k)] = bound(inputs, k)
        except AGMAError as exc:
            values[str(k)] = None
            print(f"k={k}: {exc}", file=sys.stderr)
    terms = decomposition_terms(inputs, strongly_convex=strong)
    report = {
        "regime": regime,
        "L_tilde": inputs.L_tilde,
        "gamma0": inputs.gamma0,
        "delta_N": delta_N(inputs),
        "k0": inputs.k0,
        "bound": values,
        "terms": {k: _json_safe(v) for k, v in terms._asdict().items()},
    }
    print(json.dumps(report, indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="agma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config", help="path to the JSON config")
    p.add_argument("--out", help="output directory (overrides config.output)")
    p.add_argument("--reps", type=int, help="replications (overrides config.replications)")
    p.add_argument("--seed", type=int, help="base seed (overrides config.seed)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify", help="run a built-in verification suite")
    p.add_argument("suite", choices=VERIFY_SUITES)
    p.add_argument("--reps", type=int, help="replications for the moments/bounds suites")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "bounds", help="evaluate the error bounds",
        description="Evaluate the error bounds. Parameters are key=value pairs: "
        + ", ".join(_BOUND_FIELDS) + " (epsilon optional, default 0.5).",
    )
    p.add_argument("params", nargs="+", metavar="key=value")
    p.add_argument("--k", type=int, nargs="+", default=[0, 10, 100], help="iterations to evaluate")
    p.add_argument("--regime", choices=("auto", "strongly_convex", "convex"), default="auto")
    p.set_defaults(func=_cmd_bounds)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (AGMAError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
