"""Subset consistency of system rankings, and QE-driven budget simulations.

Accuracy of a segment subset I against the full data D:

    Acc(I) = sum over all ordered system pairs (m1, m2) of
             1[(Y_{m1,I} > Y_{m2,I}) == (Y_{m1,D} > Y_{m2,D})] / |M|^2

Diagonal pairs are included exactly as written; they always match.
The noise model behind the simulator is y_{m,i} = a_m - d_i + eps_{m,i}
with zero-mean d and eps; the per-segment difficulty d_i cancels when
two systems are compared on the same subset.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .campaign.records import Export
from .analytics import score_value

NOISE_FAMILIES = ("gaussian", "uniform")


@dataclass(frozen=True)
class ScoreMatrix:
    """Systems x segments score matrix with no missing cells."""

    systems: tuple[str, ...]
    segments: tuple[str, ...]
    scores: np.ndarray  # shape (len(systems), len(segments))

    def __post_init__(self):
        if self.scores.shape != (len(self.systems), len(self.segments)):
            raise ValueError("scores shape must be (#systems, #segments)")
        if np.isnan(self.scores).any():
            raise ValueError("score matrix has missing cells")

    @property
    def full_means(self) -> np.ndarray:
        return self.scores.mean(axis=1)

    @classmethod
    def from_export(cls, export: Export, scoring: str = "direct") -> "ScoreMatrix":
        """Average duplicate annotations per (system, item); keep only items
        covered by every system so the matrix is rectangular."""
        sums: dict = defaultdict(lambda: [0.0, 0])
        for annotation in export.real_annotations():
            task = export.task_for(annotation)
            cell = sums[(task.system_id, task.item_id)]
            cell[0] += score_value(annotation, scoring)
            cell[1] += 1
        cells = {key: total / count for key, (total, count) in sums.items()}

        systems = sorted({system for system, _ in cells})
        if not systems:
            raise ValueError("export contains no annotations")
        items_per_system = defaultdict(set)
        for system, item in cells:
            items_per_system[system].add(item)
        complete = sorted(set.intersection(*(items_per_system[s] for s in systems)))
        if not complete:
            raise ValueError("no segment is covered by every system")
        scores = np.array(
            [[cells[(system, item)] for item in complete] for system in systems]
        )
        return cls(systems=tuple(systems), segments=tuple(complete), scores=scores)


def subset_accuracy(matrix: ScoreMatrix, subset: Sequence[int]) -> float:
    """Fraction of ordered system pairs ranked the same by the subset as by
    the full data. Diagonal included, so the floor is |M|/|M|^2, not 0."""
    subset = np.asarray(subset, dtype=int)
    if subset.size == 0:
        raise ValueError("subset must be nonempty")
    if subset.min() < 0 or subset.max() >= len(matrix.segments):
        raise ValueError("subset indices out of range")
    sub_means = matrix.scores[:, subset].mean(axis=1)
    full_means = matrix.full_means
    sub_order = np.greater.outer(sub_means, sub_means)
    full_order = np.greater.outer(full_means, full_means)
    return float((sub_order == full_order).mean())


@dataclass(frozen=True)
class CurveEntry:
    size: int
    accuracy: float


@dataclass(frozen=True)
class ConsistencyCurve:
    seed: int
    n_resamples: int
    entries: tuple[CurveEntry, ...]
    mean_accuracy: float  # average across the requested sizes


def consistency_curve(
    matrix: ScoreMatrix,
    sizes: Sequence[int],
    n_resamples: int = 1000,
    seed: int = 0,
) -> ConsistencyCurve:
    """Mean Acc over seeded uniform subsets (without replacement) per size.

    Each resample derives its own generator from (seed, size, index), so
    results do not depend on evaluation order or parallelism.
    """
    n_segments = len(matrix.segments)
    for size in sizes:
        if size <= 0:
            raise ValueError("subset sizes must be positive")
        if size > n_segments:
            raise ValueError(f"subset size {size} exceeds {n_segments} segments")
    if n_resamples < 1:
        raise ValueError("n_resamples must be positive")

    entries = []
    for size in sizes:
        total = 0.0
        for index in range(n_resamples):
            rng = np.random.default_rng([seed, size, index])
            subset = rng.choice(n_segments, size=size, replace=False)
            total += subset_accuracy(matrix, subset)
        entries.append(CurveEntry(size=size, accuracy=total / n_resamples))
    mean_accuracy = float(np.mean([e.accuracy for e in entries]))
    return ConsistencyCurve(
        seed=seed, n_resamples=n_resamples, entries=tuple(entries), mean_accuracy=mean_accuracy
    )


@dataclass(frozen=True)
class NoiseModelParams:
    """Ability/difficulty/noise parameters for the synthetic score model."""

    abilities: tuple[float, ...]
    difficulty_scale: float = 1.0
    noise_scale: float = 1.0
    family: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if len(self.abilities) < 2:
            raise ValueError("need at least 2 systems (abilities)")
        if self.difficulty_scale < 0 or self.noise_scale < 0:
            raise ValueError("scales must be nonnegative")
        if self.family not in NOISE_FAMILIES:
            raise ValueError(f"unknown noise family {self.family!r}")


def _draw(rng: np.random.Generator, family: str, scale: float, shape) -> np.ndarray:
    """Zero-mean draw with standard deviation ``scale``."""
    if scale == 0:
        return np.zeros(shape)
    if family == "gaussian":
        return rng.normal(0.0, scale, shape)
    half_width = scale * np.sqrt(3.0)
    return rng.uniform(-half_width, half_width, shape)


def simulate_matrix(params: NoiseModelParams, n_segments: int) -> ScoreMatrix:
    """Draw y_{m,i} = a_m - d_i + eps_{m,i} with seeded zero-mean noise."""
    if n_segments < 1:
        raise ValueError("n_segments must be positive")
    rng = np.random.default_rng(params.seed)
    abilities = np.asarray(params.abilities, dtype=float)
    difficulties = _draw(rng, params.family, params.difficulty_scale, n_segments)
    noise = _draw(rng, params.family, params.noise_scale, (len(abilities), n_segments))
    scores = abilities[:, None] - difficulties[None, :] + noise
    return ScoreMatrix(
        systems=tuple(f"sim{m:02d}" for m in range(len(abilities))),
        segments=tuple(f"seg{i:04d}" for i in range(n_segments)),
        scores=scores,
    )


PREFILTER_MODES = ("substitute", "exclude")


@dataclass(frozen=True)
class PrefilterReport:
    mode: str
    threshold: Optional[float]
    baseline_order: tuple[str, ...]
    filtered_order: tuple[str, ...]
    pair_agreement: float
    flipped_pairs: tuple[tuple[str, str], ...]
    budget_saving: float  # fraction of annotation budget saved, in [0, 1]
    n_segments: int
    n_dropped: int


def _system_order(systems: Sequence[str], means: np.ndarray) -> tuple[str, ...]:
    return tuple(s for s, _ in sorted(zip(systems, means), key=lambda p: (-p[1], p[0])))


def prefilter_simulation(
    export: Export, mode: str = "substitute", threshold: float = 1.0
) -> PrefilterReport:
    """What happens to the system ranking if QE-clean segments are skipped.

    substitute: cells where QE marked 0 errors get direct_score := 100
    (no human annotation needed there). exclude: segments where the
    fraction of systems with 0 QE errors is >= threshold are dropped
    entirely. Both report pairwise order agreement against the unfiltered
    ranking and the fraction of annotation budget saved.
    """
    if mode not in PREFILTER_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {PREFILTER_MODES}")
    if mode == "exclude" and not 0 < threshold <= 1:
        raise ValueError("exclude threshold must be in (0, 1]")

    matrix = ScoreMatrix.from_export(export, scoring="direct")
    qe_counts = np.zeros(matrix.scores.shape, dtype=int)
    by_key = {}
    for task in export.segments.values():
        if not task.is_check:
            by_key[(task.system_id, task.item_id)] = len(task.prefill_spans)
    for mi, system in enumerate(matrix.systems):
        for ii, item in enumerate(matrix.segments):
            key = (system, item)
            if key not in by_key:
                raise ValueError(f"export lacks QE pre-fill for cell {key}")
            qe_counts[mi, ii] = by_key[key]

    baseline_means = matrix.full_means
    clean = qe_counts == 0
    total_cells = matrix.scores.size

    if mode == "substitute":
        scores = matrix.scores.copy()
        scores[clean] = 100.0
        filtered_means = scores.mean(axis=1)
        saving = clean.sum() / total_cells
        n_dropped = 0
    else:
        clean_fraction = clean.mean(axis=0)
        keep = clean_fraction < threshold
        n_dropped = int((~keep).sum())
        if not keep.any():
            raise ValueError("exclude mode dropped every segment")
        filtered_means = matrix.scores[:, keep].mean(axis=1)
        saving = (n_dropped * len(matrix.systems)) / total_cells

    flipped = []
    agree = 0
    pairs = 0
    for i in range(len(matrix.systems)):
        for j in range(i + 1, len(matrix.systems)):
            base = np.sign(baseline_means[i] - baseline_means[j])
            filt = np.sign(filtered_means[i] - filtered_means[j])
            pairs += 1
            if base == filt:
                agree += 1
            if base * filt < 0:
                flipped.append((matrix.systems[i], matrix.systems[j]))

    return PrefilterReport(
        mode=mode,
        threshold=threshold if mode == "exclude" else None,
        baseline_order=_system_order(matrix.systems, baseline_means),
        filtered_order=_system_order(matrix.systems, filtered_means),
        pair_agreement=agree / pairs if pairs else 1.0,
        flipped_pairs=tuple(flipped),
        budget_saving=float(saving),
        n_segments=len(matrix.segments),
        n_dropped=n_dropped,
    )
