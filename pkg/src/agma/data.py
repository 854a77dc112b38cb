"""Dataset ingestion and partitioning across nodes.

Samples are shuffled with ``DatasetSpec.seed`` and dealt round-robin, so node
``n`` receives shuffled positions ``n, n + N, n + 2N, ...``.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import warnings
from pathlib import Path

import numpy as np

from .exceptions import DataError
from .problems import Family, NodeDataset, ProblemInstance

__all__ = [
    "CsvSource",
    "SyntheticQuadratic",
    "SyntheticLogistic",
    "DatasetSpec",
    "read_csv",
    "standardize",
    "map_binary_labels",
    "partition",
    "load_and_partition",
    "synthesize_quadratic",
    "synthesize_logistic",
    "synthesize_song_table",
    "write_csv",
]


@dataclasses.dataclass(frozen=True)
class CsvSource:
    """A comma-separated file; ``task`` is ``"regression"`` or ``"binary"``."""

    path: str
    label_column: int | str = -1
    task: str = "regression"
    family: Family | None = None
    l2: float = 0.1
    positive_label: str | None = None

    def __post_init__(self):
        if self.task not in ("regression", "binary"):
            raise ValueError(f"task must be 'regression' or 'binary', got {self.task!r}")


@dataclasses.dataclass(frozen=True)
class SyntheticQuadratic:
    d: int
    condition_number: float = 10.0
    rank: int | None = None

    def __post_init__(self):
        if self.condition_number < 1:
            raise ValueError("condition_number must be >= 1")
        rank = self.d if self.rank is None else self.rank
        if not 1 <= rank <= self.d:
            raise ValueError("rank must lie in [1, d]")


@dataclasses.dataclass(frozen=True)
class SyntheticLogistic:
    d: int
    separation: float = 1.0
    l2: float = 0.1


@dataclasses.dataclass(frozen=True)
class DatasetSpec:
    """What to load and how to spread it over ``N`` nodes.

    ``samples_per_node=None`` deals every sample round-robin; an integer keeps
    only the first ``N * samples_per_node`` shuffled samples.
    """

    source: CsvSource | SyntheticQuadratic | SyntheticLogistic
    N: int
    samples_per_node: int | None = None
    standardize: bool = True
    center_labels: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.samples_per_node is not None and self.samples_per_node < 1:
            raise ValueError("samples_per_node must be >= 1")


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv(path, label_column=-1):
    """Parse a numeric CSV with an optional header row.

    Returns ``(features, raw_labels, feature_names)``. Labels are returned as
    strings so that categorical classes (e.g. ``g``/``b``) survive.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")

    header = None
    width = len(rows[0])
    # header iff some cell of the first row (outside a categorical label) is non-numeric
    first = [c.strip() for c in rows[0]]
    if isinstance(label_column, str):
        header = first
        rows = rows[1:]
    else:
        label_idx = label_column % width
        if any(not _is_number(c) for i, c in enumerate(first) if i != label_idx):
            header = first
            rows = rows[1:]
        elif not _is_number(first[label_idx]) and len(rows) > 1:
            # a non-numeric label alone cannot tell header from data; compare with row 2
            if first[label_idx] not in {r[label_idx].strip() for r in rows[1:] if len(r) > label_idx}:
                header = first
                rows = rows[1:]

    if isinstance(label_column, str):
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
    else:
        if not -width <= label_column < width:
            raise DataError(f"label column {label_column} out of range for {width} columns")
        label_idx = label_column % width

    features, labels = [], []
    for line, row in enumerate(rows, start=2 if header else 1):
        if len(row) != width:
            raise DataError(f"{path}:{line}: expected {width} cells, found {len(row)}")
        values = []
        for col, cell in enumerate(row):
            if col == label_idx:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise DataError(f"{path}:{line}: non-numeric cell {cell!r} in column {col}") from None
        features.append(values)
        labels.append(row[label_idx].strip())
    if not features:
        raise DataError(f"{path} has no data rows")
    names = None
    if header is not None:
        names = [h for i, h in enumerate(header) if i != label_idx]
    return np.array(features, dtype=float), np.array(labels), names


def standardize(X):
    """Zero-mean, unit-variance columns; constant columns are dropped.

    Returns ``(X_std, kept_column_indices)``.
    """
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.maximum(np.abs(mean), 1.0)
    keep = std > 1e-12 * scale
    if not np.all(keep):
        dropped = np.flatnonzero(~keep).tolist()
        warnings.warn(f"dropping constant feature columns {dropped}")
    Z = (X[:, keep] - mean[keep]) / std[keep]
    # second pass removes the rounding residue of the first
    Z -= Z.mean(axis=0)
    return Z, np.flatnonzero(keep)


def map_binary_labels(raw, positive_label=None):
    """Map a two-valued label column to {-1, +1}.

    Without ``positive_label`` the larger value (numerically, or
    lexicographically for text) becomes +1, so ``{0, 1}`` and ``{-1, 1}``
    keep their sign and ``{b, g}`` maps ``g -> +1``.
    """
    raw = np.asarray(raw).astype(str)
    classes = sorted(set(raw.tolist()))
    if len(classes) != 2:
        raise DataError(f"binary task needs exactly two label values, found {classes[:10]}")
    if all(_is_number(c) for c in classes):
        classes = sorted(classes, key=float)
    if positive_label is None:
        positive = classes[1]
    else:
        positive = str(positive_label)
        if positive not in classes:
            raise DataError(f"positive label {positive!r} not among {classes}")
    return np.where(raw == positive, 1.0, -1.0)


def partition(X, y, N, seed, samples_per_node=None):
    """Seeded shuffle, then round-robin deal to ``N`` nodes.

    Returns a list of index arrays (positions into ``X``), one per node.
    """
    S = X.shape[0]
    if samples_per_node is None:
        if N > S:
            raise DataError(f"cannot give {N} nodes a sample each from {S} samples")
        used = S
    else:
        used = N * samples_per_node
        if used > S:
            raise DataError(f"{N} x {samples_per_node} samples requested, only {S} available")
    order = np.random.default_rng(seed).permutation(S)[:used]
    return [order[n::N] for n in range(N)]


def _build(X, y, parts, family, l2):
    nodes = [NodeDataset(X[idx], y[idx]) for idx in parts]
    problem = ProblemInstance(nodes, family=family, l2=l2 if family is Family.LOGISTIC else 0.0)
    if family is Family.LOG_LOSS:
        return problem
    return problem.with_constants()


def load_and_partition(spec):
    """Turn a :class:`DatasetSpec` into a :class:`ProblemInstance` with constants."""
    src = spec.source
    if isinstance(src, SyntheticQuadratic):
        return synthesize_quadratic(
            src.d, src.condition_number, src.rank, spec.N, spec.seed,
            samples_per_node=spec.samples_per_node,
        )
    if isinstance(src, SyntheticLogistic):
        return synthesize_logistic(
            src.d, src.separation, spec.N, spec.seed,
            samples_per_node=spec.samples_per_node or 4, l2=src.l2,
        )

    X, raw, _ = read_csv(src.path, src.label_column)
    if src.task == "binary":
        y = map_binary_labels(raw, src.positive_label)
        family = Family(src.family or Family.LOGISTIC)
    else:
        try:
            y = raw.astype(float)
        except ValueError:
            raise DataError("regression labels must be numeric") from None
        if spec.center_labels:
            y = y - y.mean()
        family = Family(src.family or Family.LEAST_SQUARES)
    if spec.standardize:
        X, _ = standardize(X)
    parts = partition(X, y, spec.N, spec.seed, spec.samples_per_node)
    return _build(X, y, parts, family, src.l2)


def _orthonormal(rng, rows, cols):
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))


def synthesize_quadratic(d, condition_number, rank=None, N=1, seed=0, samples_per_node=None):
    """Least-squares problem whose every node shares the Gram matrix ``H``.

    ``H`` has eigenvalues log-spaced from 1 down to ``1 / condition_number``
    on ``rank`` directions and zero elsewhere, so ``L = 1`` and
    ``mu = 1 / condition_number`` (``0`` when ``rank < d``) hold exactly.
    Labels are noiseless, hence ``F* = 0``.
    """
    rank = d if rank is None else rank
    if condition_number < 1 or not 1 <= rank <= d:
        raise ValueError("need condition_number >= 1 and 1 <= rank <= d")
    m = d if samples_per_node is None else samples_per_node
    if m < d:
        raise ValueError("samples_per_node must be >= d for an exact spectrum")
    rng = np.random.default_rng(seed)
    spectrum = np.zeros(d)
    spectrum[:rank] = np.geomspace(1.0, 1.0 / condition_number, rank) if rank > 1 else 1.0
    V = _orthonormal(rng, d, d)
    theta_true = V[:, :rank] @ rng.standard_normal(rank)
    root = V * np.sqrt(spectrum)
    nodes = []
    for _ in range(N):
        X = math.sqrt(m) * _orthonormal(rng, m, d) @ root.T
        nodes.append(NodeDataset(X, X @ theta_true))
    return ProblemInstance(nodes, Family.LEAST_SQUARES).with_constants()


def synthesize_logistic(d, separation, N=1, seed=0, samples_per_node=4, l2=0.1):
    """Two Gaussian classes at ``+-separation`` along a random direction."""
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    S = N * samples_per_node
    y = rng.choice([-1.0, 1.0], size=S)
    X = separation * y[:, None] * direction + rng.standard_normal((S, d))
    parts = partition(X, y, N, seed, samples_per_node)
    return _build(X, y, parts, Family.LOGISTIC, l2)


def synthesize_song_table(n_samples=3000, d=20, r_squared=0.25, seed=0):
    """Regression table shaped like release-year prediction from audio features.

    Features are correlated Gaussians with a decaying spectrum. The label is a
    release year in 1922..2011 whose linearly explainable fraction of variance
    is ``r_squared``, min-max scaled to [0, 1]. Returns ``(X, y)``.
    """
    rng = np.random.default_rng(seed)
    mixing = rng.standard_normal((d, d)) * np.geomspace(1.0, 0.05, d)[:, None]
    X = rng.standard_normal((n_samples, d)) @ mixing
    signal = X @ rng.standard_normal(d)
    signal /= signal.std()
    noise = rng.standard_normal(n_samples)
    year = 1998.0 + 10.9 * (math.sqrt(r_squared) * signal + math.sqrt(1.0 - r_squared) * noise)
    year = np.clip(np.round(year), 1922, 2011)
    return X, (year - 1922.0) / (2011.0 - 1922.0)


def write_csv(path, X, y, label_name="label"):
    """Write ``y`` as the first column followed by the features, with a header."""
    X = np.asarray(X, dtype=float)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([label_name] + [f"x{i}" for i in range(X.shape[1])])
        for label, row in zip(np.asarray(y), X):
            writer.writerow([repr(float(label))] + [repr(float(v)) for v in row])
