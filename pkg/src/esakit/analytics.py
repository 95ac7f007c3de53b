"""Descriptive and agreement statistics over campaign exports.

Everything here is deterministic and RNG-free. Correlations that are
mathematically undefined (constant input, too few distinct values) are
reported as ``None``, never silently coerced to 0. Attention-check items
are excluded from every statistic.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .campaign.records import Export
from .model import Annotation, score_from_spans

SIGNIFICANCE_TEST = "one-sided Wilcoxon rank-sum"

SCORINGS = ("direct", "from_spans")


def score_value(annotation: Annotation, scoring: str = "direct") -> float:
    if scoring == "direct":
        return float(annotation.direct_score)
    if scoring == "from_spans":
        return float(score_from_spans(annotation.spans))
    raise ValueError(f"unknown scoring {scoring!r}; expected one of {SCORINGS}")


@dataclass(frozen=True)
class PairedSeries:
    """Aligned observations joined on unique keys."""

    keys: tuple
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.keys) == len(self.x) == len(self.y)):
            raise ValueError("keys, x, and y must have equal length")
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("join keys must be unique")

    def __len__(self) -> int:
        return len(self.x)


def paired(x: Sequence[float], y: Sequence[float]) -> PairedSeries:
    if len(x) != len(y):
        raise ValueError("series must have equal length")
    return PairedSeries(keys=tuple(range(len(x))), x=tuple(x), y=tuple(y))


def spearman(series: PairedSeries) -> Optional[float]:
    """Pearson correlation of average-fractional ranks; None when undefined."""
    if len(series) < 3:
        raise ValueError(f"spearman needs at least 3 pairs, got {len(series)}")
    if len(set(series.x)) < 2 or len(set(series.y)) < 2:
        return None
    value = stats.spearmanr(series.x, series.y).statistic
    return None if np.isnan(value) else float(value)


def kendall_tau_c(series: PairedSeries) -> Optional[float]:
    """Stuart's tau-c: 2m(C-D)/(n^2 (m-1)), m = min distinct values per side."""
    if len(series) < 2:
        raise ValueError(f"kendall_tau_c needs at least 2 pairs, got {len(series)}")
    if min(len(set(series.x)), len(set(series.y))) < 2:
        return None
    value = stats.kendalltau(series.x, series.y, variant="c").statistic
    return None if np.isnan(value) else float(value)


def pearson(series: PairedSeries) -> Optional[float]:
    if len(series) < 3:
        raise ValueError(f"pearson needs at least 3 pairs, got {len(series)}")
    if len(set(series.x)) < 2 or len(set(series.y)) < 2:
        return None
    value = stats.pearsonr(series.x, series.y).statistic
    return None if np.isnan(value) else float(value)


def _mean_by_key(export: Export, key_fn, scoring: str) -> dict:
    sums: dict = defaultdict(lambda: [0.0, 0])
    for annotation in export.real_annotations():
        task = export.task_for(annotation)
        cell = sums[key_fn(task, annotation)]
        cell[0] += score_value(annotation, scoring)
        cell[1] += 1
    return {key: total / count for key, (total, count) in sums.items()}


@dataclass(frozen=True)
class AgreementReport:
    scoring: str
    inter: Optional[float]
    intra: Optional[float]
    n_inter: int
    n_intra: int


def agreement_report(run_a: Export, run_b: Export, scoring: str = "direct") -> AgreementReport:
    """Spearman agreement between two runs over the same segments.

    Intra pairs join on (segment_id, annotator_id): the same person seen
    twice. Inter pairs join on segment_id where the runs used different
    annotators; duplicate annotations per key are averaged first.
    """
    key_fn = lambda task, a: (a.segment_id, a.annotator_id)
    by_seg_annot_a = _mean_by_key(run_a, key_fn, scoring)
    by_seg_annot_b = _mean_by_key(run_b, key_fn, scoring)

    segments_a: dict = defaultdict(dict)
    for (segment_id, annotator_id), value in by_seg_annot_a.items():
        segments_a[segment_id][annotator_id] = value
    segments_b: dict = defaultdict(dict)
    for (segment_id, annotator_id), value in by_seg_annot_b.items():
        segments_b[segment_id][annotator_id] = value

    shared_segments = sorted(set(segments_a) & set(segments_b))
    if not shared_segments:
        raise ValueError(
            "empty join on segment_id: runs "
            f"{run_a.run_id!r} and {run_b.run_id!r} share no segments"
        )

    intra_keys = sorted(set(by_seg_annot_a) & set(by_seg_annot_b))
    intra = PairedSeries(
        keys=tuple(intra_keys),
        x=tuple(by_seg_annot_a[k] for k in intra_keys),
        y=tuple(by_seg_annot_b[k] for k in intra_keys),
    )

    inter_keys = [
        seg
        for seg in shared_segments
        if any(a != b for a in segments_a[seg] for b in segments_b[seg])
    ]
    inter = PairedSeries(
        keys=tuple(inter_keys),
        x=tuple(np.mean(list(segments_a[k].values())) for k in inter_keys),
        y=tuple(np.mean(list(segments_b[k].values())) for k in inter_keys),
    )

    def safe(series: PairedSeries) -> Optional[float]:
        return spearman(series) if len(series) >= 3 else None

    return AgreementReport(
        scoring=scoring,
        inter=safe(inter),
        intra=safe(intra),
        n_inter=len(inter),
        n_intra=len(intra),
    )


def cross_protocol_series(
    run_a: Export, run_b: Export, scoring_a: str = "direct", scoring_b: str = "direct"
) -> PairedSeries:
    """Join two protocols' scores on (system_id, item_id), averaging duplicates."""
    key_fn = lambda task, a: (task.system_id, task.item_id)
    cells_a = _mean_by_key(run_a, key_fn, scoring_a)
    cells_b = _mean_by_key(run_b, key_fn, scoring_b)
    keys = sorted(set(cells_a) & set(cells_b))
    if not keys:
        raise ValueError(
            "empty join on (system_id, item_id): runs "
            f"{run_a.run_id!r} and {run_b.run_id!r} share no cells"
        )
    return PairedSeries(
        keys=tuple(keys),
        x=tuple(cells_a[k] for k in keys),
        y=tuple(cells_b[k] for k in keys),
    )


def cross_protocol_tau(
    run_a: Export, run_b: Export, scoring_a: str = "direct", scoring_b: str = "direct"
) -> Optional[float]:
    return kendall_tau_c(cross_protocol_series(run_a, run_b, scoring_a, scoring_b))


TIME_FEATURES = (
    "progress",
    "word_count",
    "qe_spans",
    "final_spans",
    "score",
    "document_size",
)


@dataclass(frozen=True)
class FeatureCorrelation:
    feature: str
    r: Optional[float]
    n: int


def time_feature_correlations(export: Export) -> list[FeatureCorrelation]:
    """Pearson correlation of each feature against annotation duration."""
    document_sizes: dict = defaultdict(int)
    for task in export.segments.values():
        if not task.is_check:
            document_sizes[task.document_id] += 1

    rows: dict[str, list[float]] = {name: [] for name in TIME_FEATURES}
    durations = []
    for annotation in export.real_annotations():
        task = export.task_for(annotation)
        durations.append(annotation.duration_seconds)
        rows["progress"].append(annotation.sequence_index)
        rows["word_count"].append(len(task.target_text.split()))
        rows["qe_spans"].append(len(task.prefill_spans))
        rows["final_spans"].append(len(annotation.spans))
        rows["score"].append(annotation.direct_score)
        rows["document_size"].append(document_sizes[task.document_id])

    out = []
    for name in TIME_FEATURES:
        series = paired(rows[name], durations) if len(durations) >= 3 else None
        out.append(
            FeatureCorrelation(
                feature=name,
                r=pearson(series) if series is not None else None,
                n=len(durations),
            )
        )
    return out


@dataclass(frozen=True)
class AnnotatorTiming:
    annotator_id: str
    n: int
    slope: float
    mad: float
    curve: tuple[float, ...]


@dataclass(frozen=True)
class SpeedupReport:
    window: int
    slope: Optional[float]
    mad: Optional[float]
    annotators: tuple[AnnotatorTiming, ...]
    skipped: tuple[str, ...]


def speedup_report(export: Export, window: int = 15) -> SpeedupReport:
    """Per-annotator timing curves plus the pooled learning slope.

    The curve is a trailing moving average of duration over work order.
    The slope is a least-squares fit of duration against sequence index,
    pooled over all annotators with at least ``window`` segments; MAD is
    each annotator's mean absolute deviation from their own average,
    then averaged. Annotators below the window are skipped with notice.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    per_annotator: dict[str, list[Annotation]] = defaultdict(list)
    for annotation in export.real_annotations():
        per_annotator[annotation.annotator_id].append(annotation)

    annotators, skipped = [], []
    xs, ys = [], []
    for annotator_id in sorted(per_annotator):
        entries = sorted(per_annotator[annotator_id], key=lambda a: a.sequence_index)
        durations = np.array([a.duration_seconds for a in entries], dtype=float)
        indices = np.array([a.sequence_index for a in entries], dtype=float)
        if len(entries) < window:
            skipped.append(annotator_id)
            continue
        xs.append(indices)
        ys.append(durations)
        kernel = np.ones(window) / window
        curve = np.convolve(durations, kernel, mode="valid")
        slope = float(np.polyfit(indices, durations, 1)[0]) if len(set(indices)) > 1 else 0.0
        annotators.append(
            AnnotatorTiming(
                annotator_id=annotator_id,
                n=len(entries),
                slope=slope,
                mad=float(np.mean(np.abs(durations - durations.mean()))),
                curve=tuple(float(v) for v in curve),
            )
        )

    pooled_slope = pooled_mad = None
    if annotators:
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        pooled_slope = float(np.polyfit(x, y, 1)[0]) if len(set(x)) > 1 else 0.0
        pooled_mad = float(np.mean([row.mad for row in annotators]))
    return SpeedupReport(
        window=window,
        slope=pooled_slope,
        mad=pooled_mad,
        annotators=tuple(annotators),
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class RankRow:
    system_id: str
    mean_score: float
    n_segments: int
    cluster: int


@dataclass(frozen=True)
class RankingTable:
    test: str
    alpha: float
    scoring: str
    rows: tuple[RankRow, ...]
    pairwise_p: dict[tuple[str, str], float]


def rank_systems(export: Export, scoring: str = "direct", alpha: float = 0.05) -> RankingTable:
    """Rank systems by mean segment score with significance clusters.

    Pairwise tests are one-sided Wilcoxon rank-sum over the two systems'
    per-item mean scores on their shared items. Walking down the ranking,
    a new cluster starts when a system is significantly worse (p < alpha)
    than every member of the current cluster.
    """
    key_fn = lambda task, a: (task.system_id, task.item_id)
    cells = _mean_by_key(export, key_fn, scoring)
    by_system: dict[str, dict[str, float]] = defaultdict(dict)
    for (system_id, item_id), value in cells.items():
        by_system[system_id][item_id] = value
    if len(by_system) < 2:
        raise ValueError(f"ranking needs at least 2 systems, got {len(by_system)}")

    order = sorted(
        by_system, key=lambda s: (-float(np.mean(list(by_system[s].values()))), s)
    )
    pairwise_p: dict[tuple[str, str], float] = {}
    for i, high in enumerate(order):
        for low in order[i + 1 :]:
            shared = sorted(set(by_system[high]) & set(by_system[low]))
            if not shared:
                raise ValueError(
                    f"systems {high!r} and {low!r} have disjoint segment coverage"
                )
            a = [by_system[high][k] for k in shared]
            b = [by_system[low][k] for k in shared]
            if a == b:
                p = 1.0  # identical samples carry no evidence of a difference
            else:
                p = float(stats.mannwhitneyu(a, b, alternative="greater").pvalue)
            pairwise_p[(high, low)] = p

    clusters: dict[str, int] = {}
    label = 1
    current = [order[0]]
    clusters[order[0]] = label
    for system in order[1:]:
        if all(pairwise_p[(member, system)] < alpha for member in current):
            label += 1
            current = []
        current.append(system)
        clusters[system] = label

    rows = tuple(
        RankRow(
            system_id=system,
            mean_score=float(np.mean(list(by_system[system].values()))),
            n_segments=len(by_system[system]),
            cluster=clusters[system],
        )
        for system in order
    )
    return RankingTable(
        test=SIGNIFICANCE_TEST, alpha=alpha, scoring=scoring, rows=rows, pairwise_p=pairwise_p
    )
