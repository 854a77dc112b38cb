"""Experiment configs, sweeps, result files and built-in verification suites.

A config is one JSON document::

    {
      "dataset": {"source": {"type": "synthetic_quadratic", "d": 10,
                             "condition_number": 100},
                  "N": 100, "seed": 0},
      "channel": {"gain": "rayleigh", "mu_h": 1.0, "sigma_w_sq": 1.0, "E_N": 1.0},
      "algorithms": [{"algorithm": "AGMA", "max_iters": 100},
                     {"algorithm": "GBMA", "max_iters": 100}],
      "replications": 200,
      "seed": 0,
      "sweep": {"parameter": "beta_factor", "values": [0.25, 0.5, 1, 2.1]},
      "output": "results/stepsize"
    }

Each (sweep value, algorithm) pair produces one CSV with the columns ``k,
mean_excess_risk, ci_halfwidth, bound_value, algorithm`` and the swept
parameter. ``manifest.json`` is written last and echoes the resolved config,
the replication seeds and per-file status.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import (
    Algorithm,
    AlgorithmConfig,
    build_schedule,
    monte_carlo,
    resolve_beta,
    run,
)
from .channel import ChannelModel, moment_check
from .data import (
    CsvSource,
    DatasetSpec,
    SyntheticLogistic,
    SyntheticQuadratic,
    load_and_partition,
    synthesize_logistic,
    synthesize_quadratic,
)
from .exceptions import AGMAError, ConfigError
from .momentum import MomentumSchedule, lambda_bound
from .problems import Family
from .theory import BoundInputs, bound_minimizing_k0, k0_for, theorem1_bound, theorem2_bound

__all__ = [
    "SWEEP_PARAMETERS",
    "ExperimentConfig",
    "Sweep",
    "load_config",
    "parse_config",
    "build_channel",
    "run_experiment",
    "verify",
    "VERIFY_SUITES",
]

SWEEP_PARAMETERS = ("N", "E_N", "beta_factor", "alpha0", "sigma_h_sq", "sigma_w_sq")
VERIFY_SUITES = ("sequences", "moments", "reduction", "bounds")
CSV_COLUMNS = ("k", "mean_excess_risk", "ci_halfwidth", "bound_value", "algorithm")
MANIFEST = "manifest.json"
OUTSIDE_RANGE = "outside convergence range"


@dataclasses.dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    ``restart_rules[i]`` is ``None``, an integer, ``"auto"``
    (``floor(N^(1 - epsilon))``) or ``"bound"`` (the bound-minimising cutoff)
    for ``algorithms[i]``.
    """

    dataset: DatasetSpec
    channel: dict
    algorithms: tuple
    replications: int = 100
    sweep: Sweep | None = None
    output: str = "results"
    seed: int = 0
    epsilon: float = 0.5
    restart_rules: tuple = ()

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("algorithms", "at least one algorithm is required")
        if self.replications < 1:
            raise ConfigError("replications", "must be >= 1")
        if not self.restart_rules:
            object.__setattr__(self, "restart_rules", tuple(a.restart_k0 for a in self.algorithms))

    def to_dict(self):
        """JSON-ready echo of the resolved configuration."""
        src = self.dataset.source
        source = {"type": _SOURCE_NAMES[type(src)], **dataclasses.asdict(src)}
        if source.get("family") is not None:
            source["family"] = Family(source["family"]).value
        dataset = dataclasses.asdict(self.dataset)
        dataset["source"] = source
        algorithms = []
        for cfg, rule in zip(self.algorithms, self.restart_rules):
            entry = cfg.to_dict()
            entry["restart_k0"] = rule
            entry.pop("seed")
            algorithms.append(entry)
        return {
            "dataset": dataset,
            "channel": dict(self.channel),
            "algorithms": algorithms,
            "replications": self.replications,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "sweep": None if self.sweep is None else {
                "parameter": self.sweep.parameter, "values": list(self.sweep.values)},
            "output": self.output,
        }


_SOURCE_TYPES = {
    "csv": CsvSource,
    "synthetic_quadratic": SyntheticQuadratic,
    "synthetic_logistic": SyntheticLogistic,
}
_SOURCE_NAMES = {v: k for k, v in _SOURCE_TYPES.items()}
_ALGORITHM_KEYS = {"algorithm", "beta", "alpha0", "max_iters", "restart_k0", "theta0", "early_stop_tol",
                   "allow_unstable_step"}


def _require_mapping(value, path):
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value


def _build(cls, kwargs, path):
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(kwargs) - fields)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown field")
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_source(doc, base_dir):
    doc = dict(_require_mapping(doc, "dataset.source"))
    kind = doc.pop("type", None)
    if kind not in _SOURCE_TYPES:
        raise ConfigError("dataset.source.type", f"expected one of {sorted(_SOURCE_TYPES)}, got {kind!r}")
    if kind == "csv":
        if "path" not in doc:
            raise ConfigError("dataset.source.path", "required for csv sources")
        path = Path(doc["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        doc["path"] = str(path)
        if doc.get("family") is not None:
            try:
                doc["family"] = Family(doc["family"])
            except ValueError:
                raise ConfigError("dataset.source.family", f"unknown family {doc['family']!r}") from None
    return _build(_SOURCE_TYPES[kind], doc, "dataset.source")


def build_channel(params):
    """Instantiate a :class:`ChannelModel` from its JSON parameters."""
    p = dict(params)
    gain = p.pop("gain", "rayleigh")
    mu_h = float(p.pop("mu_h", 1.0))
    sigma_w_sq = float(p.pop("sigma_w_sq", 1.0))
    E_N = float(p.pop("E_N", 1.0))
    sigma_h_sq = p.pop("sigma_h_sq", None)
    if p:
        raise ConfigError(f"channel.{sorted(p)[0]}", "unknown field")
    try:
        if gain == "rayleigh":
            return ChannelModel.rayleigh(mu_h, sigma_w_sq, E_N, sigma_h_sq)
        if gain == "uniform":
            if sigma_h_sq is None:
                raise ConfigError("channel.sigma_h_sq", "required for uniform gains")
            return ChannelModel.uniform(mu_h, float(sigma_h_sq), sigma_w_sq, E_N)
        if gain == "constant":
            if sigma_h_sq not in (None, 0, 0.0):
                raise ConfigError("channel.sigma_h_sq", "constant gains have zero variance")
            return ChannelModel.constant(mu_h, sigma_w_sq, E_N)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from None
    raise ConfigError("channel.gain", f"expected rayleigh, uniform or constant, got {gain!r}")


def _parse_algorithm(doc, i):
    path = f"algorithms[{i}]"
    doc = dict(_require_mapping(doc, path))
    unknown = sorted(set(doc) - _ALGORITHM_KEYS)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown field")
    try:
        doc["algorithm"] = Algorithm(doc.get("algorithm", "AGMA"))
    except ValueError:
        names = [a.value for a in Algorithm]
        raise ConfigError(f"{path}.algorithm", f"expected one of {names}") from None
    rule = doc.pop("restart_k0", None)
    if rule is not None and rule not in ("auto", "bound"):
        if not isinstance(rule, int) or isinstance(rule, bool) or rule < 1:
            raise ConfigError(f"{path}.restart_k0", "expected a positive integer, 'auto' or 'bound'")
    alpha0 = doc.get("alpha0")
    if alpha0 is not None and not 0.0 < alpha0 < 1.0:
        raise ConfigError(f"{path}.alpha0", "must lie in (0, 1)")
    beta = doc.get("beta")
    if beta is not None and not beta > 0:
        raise ConfigError(f"{path}.beta", "must be positive")
    return _build(AlgorithmConfig, doc, path), rule


def _validate_sweep_value(parameter, value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if parameter == "N":
        if not isinstance(value, int) or value < 1:
            raise ConfigError(path, "N values must be positive integers")
    elif parameter in ("E_N", "beta_factor"):
        if not value > 0:
            raise ConfigError(path, f"{parameter} values must be positive")
    elif parameter == "alpha0":
        if not 0.0 < value < 1.0:
            raise ConfigError(path, "alpha0 values must lie in (0, 1)")
    elif value < 0:
        raise ConfigError(path, f"{parameter} values must be non-negative")


def _parse_sweep(doc, channel):
    if doc is None:
        return None
    doc = _require_mapping(doc, "sweep")
    parameter = doc.get("parameter")
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError("sweep.parameter", f"expected one of {list(SWEEP_PARAMETERS)}, got {parameter!r}")
    values = doc.get("values")
    if not isinstance(values, list):
        raise ConfigError("sweep.values", "expected a list")
    if not values:
        return None
    for j, value in enumerate(values):
        _validate_sweep_value(parameter, value, f"sweep.values[{j}]")
        if parameter in ("E_N", "sigma_h_sq", "sigma_w_sq"):
            # the gain law must be able to realise every swept moment
            build_channel({**channel, parameter: value})
    return Sweep(parameter, tuple(values))


def parse_config(doc, base_dir=None, overrides=None):
    """Validate a config document.

    ``overrides`` may set the top-level scalars ``output``, ``replications``
    and ``seed``. Relative CSV paths resolve against ``base_dir``.

    Raises
    ------
    ConfigError
        With ``.path`` naming the offending field.
    """
    doc = dict(_require_mapping(doc, "<root>"))
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value
    known = {"dataset", "channel", "algorithms", "replications", "sweep", "output", "seed", "epsilon"}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")

    if "dataset" not in doc:
        raise ConfigError("dataset", "required")
    ds = dict(_require_mapping(doc["dataset"], "dataset"))
    if "source" not in ds:
        raise ConfigError("dataset.source", "required")
    ds["source"] = _parse_source(ds["source"], base_dir)
    dataset = _build(DatasetSpec, ds, "dataset")

    channel = dict(_require_mapping(doc.get("channel", {}), "channel"))
    build_channel(channel)

    algos = doc.get("algorithms")
    if not isinstance(algos, list) or not algos:
        raise ConfigError("algorithms", "expected a non-empty list")
    parsed = [_parse_algorithm(a, i) for i, a in enumerate(algos)]

    replications = doc.get("replications", 100)
    if isinstance(replications, bool) or not isinstance(replications, int) or replications < 1:
        raise ConfigError("replications", "must be an integer >= 1")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", "must be a non-negative integer")
    epsilon = doc.get("epsilon", 0.5)
    if not 0.0 < epsilon < 1.0:
        raise ConfigError("epsilon", "must lie in (0, 1)")
    output = doc.get("output", "results")
    if not isinstance(output, str) or not output:
        raise ConfigError("output", "expected a directory path")

    return ExperimentConfig(
        dataset=dataset,
        channel=channel,
        algorithms=tuple(cfg for cfg, _ in parsed),
        replications=replications,
        sweep=_parse_sweep(doc.get("sweep"), channel),
        output=output,
        seed=seed,
        epsilon=float(epsilon),
        restart_rules=tuple(rule for _, rule in parsed),
    )


def load_config(path, overrides=None):
    """Read and validate a JSON config file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return parse_config(doc, base_dir=path.parent, overrides=overrides)


def _fmt(x):
    if x is None:
        return ""
    x = float(x)
    return repr(x) if math.isfinite(x) else ("nan" if math.isnan(x) else repr(x))


def _bound_column(cfg, problem, channel, beta, alpha0, epsilon, ks):
    """Theory bound per k for AGMA runs; ``None`` entries where it does not apply."""
    empty = [None] * len(ks)
    if cfg.algorithm is not Algorithm.AGMA or problem.constants is None:
        return empty
    try:
        inputs = BoundInputs.from_problem(problem, channel, beta, alpha0, cfg.theta0, epsilon)
    except AGMAError:
        return empty
    out = []
    for k in ks:
        try:
            if inputs.mu > 0:
                out.append(theorem1_bound(inputs, int(k)))
            else:
                out.append(theorem2_bound(inputs, int(k)))
        except AGMAError:
            out.append(None)
    return out


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(buf.getvalue(), encoding="utf-8")
    os.replace(tmp, path)


def _combination_name(index, algorithm, parameter, value):
    tag = algorithm.value
    if parameter is not None:
        tag += f"_{parameter}={value}"
    return f"{index:03d}_{tag}.csv"


def run_experiment(config, workers=None):
    """Run every (sweep value, algorithm) combination and write result files.

    Returns the manifest dictionary. Combinations that fail (e.g. a non-finite
    iterate) leave a ``<name>.failed`` marker instead of a CSV and are listed
    with ``status: "failed"``; the remaining combinations still run.
    """
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / MANIFEST
    if manifest_path.exists():
        manifest_path.unlink()

    parameter = None if config.sweep is None else config.sweep.parameter
    values = (None,) if config.sweep is None else config.sweep.values
    problems = {}
    entries = []
    index = 0
    for value in values:
        dataset = config.dataset
        channel_params = dict(config.channel)
        if parameter == "N":
            dataset = dataclasses.replace(dataset, N=int(value))
        elif parameter in ("E_N", "sigma_h_sq", "sigma_w_sq"):
            channel_params[parameter] = value
        channel = build_channel(channel_params)
        if dataset not in problems:
            problems[dataset] = load_and_partition(dataset)
        problem = problems[dataset]

        for cfg, rule in zip(config.algorithms, config.restart_rules):
            name = _combination_name(index, cfg.algorithm, parameter, value)
            index += 1
            entry = {"file": name, "algorithm": cfg.algorithm.value, "flags": []}
            if parameter is not None:
                entry["parameter"] = parameter
                entry["value"] = value
            try:
                cfg = dataclasses.replace(cfg, seed=config.seed)
                if parameter == "alpha0":
                    cfg = dataclasses.replace(cfg, alpha0=float(value))
                if parameter == "beta_factor":
                    mu_h = 1.0 if cfg.algorithm is Algorithm.CENTRAL_NESTEROV else channel.mu_h
                    L = problem.require_constants().L
                    stable = 0.0 < value < 2.0
                    if not stable:
                        entry["flags"].append(OUTSIDE_RANGE)
                    cfg = dataclasses.replace(
                        cfg, beta=value / (mu_h * L),
                        allow_unstable_step=cfg.allow_unstable_step or not stable,
                    )
                beta = resolve_beta(cfg, problem, channel)
                schedule = build_schedule(cfg, problem, channel, beta)
                alpha0 = None if schedule is None else schedule.alpha0
                if rule in ("auto", "bound"):
                    if rule == "auto":
                        k0 = k0_for(problem.n_nodes, config.epsilon)
                    else:
                        inputs = BoundInputs.from_problem(
                            problem, channel, beta, alpha0 or 0.5, cfg.theta0, config.epsilon)
                        k0 = bound_minimizing_k0(inputs, max(cfg.max_iters, 1))
                    cfg = dataclasses.replace(cfg, restart_k0=max(1, k0))
                elif rule is not None:
                    cfg = dataclasses.replace(cfg, restart_k0=rule)
                entry.update(beta=beta, alpha0=alpha0, restart_k0=cfg.restart_k0)

                mc = monte_carlo(cfg, problem, channel, config.replications, workers=workers)
                bounds = _bound_column(cfg, problem, channel, beta, alpha0, config.epsilon, mc.k)
                header = list(CSV_COLUMNS) + ([parameter] if parameter else [])
                rows = []
                for k, m, h, b in zip(mc.k, mc.mean, mc.ci_halfwidth, bounds):
                    row = [int(k), _fmt(m), _fmt(h), _fmt(b), cfg.algorithm.value]
                    if parameter:
                        row.append(value)
                    rows.append(row)
                _write_csv(out / name, header, rows)
                stale = out / (name + ".failed")
                if stale.exists():
                    stale.unlink()
                entry["status"] = "ok"
            except AGMAError as exc:
                entry["status"] = "failed"
                entry["error"] = f"{type(exc).__name__}: {exc}"
                if getattr(exc, "k", None) is not None:
                    entry["failed_at_k"] = exc.k
                (out / (name + ".failed")).write_text(entry["error"] + "\n", encoding="utf-8")
                if (out / name).exists():
                    (out / name).unlink()
            entries.append(entry)

    manifest = {
        "version": __version__,
        "config": config.to_dict(),
        "base_seed": config.seed,
        "replication_seeds": [config.seed + i for i in range(config.replications)],
        "combinations": entries,
        "status": "complete" if all(e["status"] == "ok" for e in entries) else "partial",
    }
    tmp = manifest_path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, manifest_path)
    return manifest


# ---------------------------------------------------------------- verification


def _check(name, passed, value, threshold, **extra):
    entry = {"name": name, "passed": bool(passed), "value": float(value), "threshold": float(threshold)}
    entry.update(extra)
    return entry


def _verify_sequences(n_configs=100, max_k=1000, seed=0):
    rng = np.random.default_rng(seed)
    worst = {"range": math.inf, "sqrt_q": math.inf, "residual": 0.0, "lambda_ratio": 0.0}
    for i in range(n_configs):
        strongly = i % 2 == 0
        if strongly:
            # condition numbers 10 .. 1e6; beyond that the gap leaves double range before k = 1000
            q = float(10.0 ** rng.uniform(-6, -1))
            alpha0 = float(rng.uniform(math.sqrt(q), 1.0))
            if not alpha0 > math.sqrt(q):
                alpha0 = 0.5 * (math.sqrt(q) + 1.0)
        else:
            q = 0.0
            alpha0 = float(rng.uniform(1e-3, 1.0 - 1e-3))
        # L_tilde normalised to 1
        g0 = alpha0 * (alpha0 - q) / (1.0 - alpha0)
        sched = MomentumSchedule(alpha0, q)
        sched.alpha(max_k + 1)
        a = np.asarray(sched.alphas[: max_k + 2])
        lam = np.asarray(sched.lambdas[: max_k + 1])
        worst["range"] = min(worst["range"], float(min(a.min(), 1.0 - a.max())))
        if strongly:
            # the stored gap alpha_k - sqrt(q) stays exact after alpha_k rounds onto sqrt(q)
            gaps = np.asarray(sched.gaps[: max_k + 2])
            worst["sqrt_q"] = min(worst["sqrt_q"], float(gaps.min()))
            if np.any(a < math.sqrt(q)):
                worst["sqrt_q"] = min(worst["sqrt_q"], float(np.min(a - math.sqrt(q))))
        residual = np.abs(a[1:] ** 2 - ((1.0 - a[1:]) * a[:-1] ** 2 + q * a[1:]))
        worst["residual"] = max(worst["residual"], float(residual.max()))
        bounds = np.array([lambda_bound(k, q, g0, 1.0, strongly) for k in range(max_k + 1)])
        if np.any(lam[bounds == 0] > 0):
            worst["lambda_ratio"] = math.inf
        positive = bounds > 0
        worst["lambda_ratio"] = max(worst["lambda_ratio"], float(np.max(lam[positive] / bounds[positive])))
    return [
        _check("alpha_in_open_unit_interval", worst["range"] > 0, worst["range"], 0.0),
        _check("alpha_exceeds_sqrt_q", worst["sqrt_q"] > 0, worst["sqrt_q"], 0.0),
        _check("recursion_residual", worst["residual"] <= 1e-12, worst["residual"], 1e-12),
        _check("lambda_below_closed_form", worst["lambda_ratio"] <= 1.0 + 1e-12, worst["lambda_ratio"], 1.0),
    ]


def _verify_moments(replications=100_000, seed=0):
    problem = synthesize_logistic(8, 1.0, N=20, seed=seed, samples_per_node=5)
    channel = ChannelModel.rayleigh(1.0, sigma_w_sq=1.0, E_N=1.0)
    z = np.random.default_rng(seed + 1).standard_normal(problem.dimension)
    res = moment_check(channel, problem, z, replications, rng=seed + 2)
    return [
        _check("mean_within_5_se", res.mean_z <= 5.0, res.mean_z, 5.0,
               relative_error=res.mean_error, replications=res.replications),
        _check("second_moment_within_5_se", res.second_moment_z <= 5.0, res.second_moment_z, 5.0,
               relative_error=res.second_moment_error, replications=res.replications),
    ]


def reduction_deviation(problem, max_iters=100, alpha0=None):
    """Max relative gap between noiseless AGMA and the centralized reference."""
    channel = ChannelModel.constant(1.0, sigma_w_sq=0.0)
    L = problem.require_constants().L
    agma = run(AlgorithmConfig(Algorithm.AGMA, beta=1.0 / L, alpha0=alpha0, max_iters=max_iters),
               problem, channel)
    ref = run(AlgorithmConfig(Algorithm.CENTRAL_NESTEROV, beta=1.0 / L, alpha0=alpha0,
                              max_iters=max_iters), problem, channel)
    scale = np.maximum(np.abs(ref.excess_risk), np.finfo(float).tiny)
    return float(np.max(np.abs(agma.excess_risk - ref.excess_risk) / scale)), agma, ref


def _verify_reduction(seed=0):
    problem = synthesize_quadratic(10, 100.0, N=20, seed=seed)
    dev, _, _ = reduction_deviation(problem)
    return [_check("agma_matches_central_nesterov", dev <= 1e-9, dev, 1e-9)]


def bound_dominance(problem, channel, replications=200, max_iters=100, seed=0, epsilon=0.5,
                    alpha0=None):
    """Upper CI of AGMA excess risk against the matching bound.

    Returns ``(worst_ratio, trace, bounds)`` where the ratio is
    ``max_k upper_k / bound_k`` over the ks at which the bound holds.
    """
    cfg = AlgorithmConfig(Algorithm.AGMA, alpha0=alpha0, max_iters=max_iters, seed=seed)
    mc = monte_carlo(cfg, problem, channel, replications)
    schedule = build_schedule(cfg, problem, channel, mc.beta)
    bounds = np.array([b if b is not None else np.nan for b in _bound_column(
        cfg, problem, channel, mc.beta, schedule.alpha0, epsilon, mc.k)])
    ks = np.isfinite(bounds)
    if problem.constants.mu <= 0:
        ks &= mc.k >= 1
    return float(np.max(mc.upper[ks] / bounds[ks])), mc, bounds


def _verify_bounds(replications=200, seed=0):
    problem = synthesize_quadratic(10, 100.0, N=100, seed=seed + 1)
    channel = ChannelModel.rayleigh(1.0, sigma_w_sq=1.0, E_N=1.0)
    ratio, _, _ = bound_dominance(problem, channel, replications, 100, seed)
    return [_check("upper_ci_below_theorem1_bound", ratio <= 1.0, ratio, 1.0)]


def verify(suite, **options):
    """Run a verification suite and return a JSON-ready report.

    Failures are report entries, never exceptions; only an unknown suite
    name raises ``ValueError``.
    """
    runners = {
        "sequences": _verify_sequences,
        "moments": _verify_moments,
        "reduction": _verify_reduction,
        "bounds": _verify_bounds,
    }
    if suite not in runners:
        raise ValueError(f"unknown suite {suite!r}; expected one of {list(VERIFY_SUITES)}")
    try:
        checks = runners[suite](**options)
    except AGMAError as exc:
        checks = [{"name": "suite_completed", "passed": False, "error": str(exc)}]
    return {"suite": suite, "passed": all(c["passed"] for c in checks), "checks": checks}
