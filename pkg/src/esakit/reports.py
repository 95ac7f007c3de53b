"""Plain-text report rendering for every analysis.

Each function returns (lines, summary): tab-separated table lines with
``#`` parameter comments up front, plus a JSON-ready summary dict. Output
is deterministic: fixed float precision, sorted rows, parameters echoed.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Optional, Sequence

from . import analytics, consistency, spandiff
from .campaign.records import Export
from .checks import evaluate_check, trust_effect
from .model import Annotation, summarize_annotations


def fmt(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return "undefined"
    return f"{value:.{digits}f}"


def _rows(lines_out: list[str], header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines_out.append("\t".join(header))
    for row in rows:
        lines_out.append("\t".join(str(cell) for cell in row))


def summary_report(export: Export) -> tuple[list[str], dict]:
    annotations = export.real_annotations()
    stats = summarize_annotations(annotations)
    lines = [f"# run_id = {export.run_id}", "# scope = real segments (checks excluded)"]
    _rows(
        lines,
        ("metric", "value"),
        (
            ("annotations", stats.n_annotations),
            ("error_spans", stats.n_spans),
            ("spans_per_segment", fmt(stats.mean_spans, 2)),
            ("minor_pct", fmt(stats.minor_pct, 1)),
            ("major_pct", fmt(stats.major_pct, 1)),
            ("mean_score", fmt(stats.mean_score, 1)),
        ),
    )
    summary = {
        "run_id": export.run_id,
        "annotations": stats.n_annotations,
        "error_spans": stats.n_spans,
        "spans_per_segment": stats.mean_spans,
        "minor_pct": stats.minor_pct,
        "major_pct": stats.major_pct,
        "mean_score": stats.mean_score,
    }
    return lines, summary


def agreement_lines(run_a: Export, run_b: Export, scoring: str) -> tuple[list[str], dict]:
    report = analytics.agreement_report(run_a, run_b, scoring)
    lines = [
        f"# run_a = {run_a.run_id}",
        f"# run_b = {run_b.run_id}",
        f"# scoring = {scoring}",
        "# correlation = spearman",
    ]
    _rows(
        lines,
        ("kind", "spearman", "n"),
        (
            ("inter", fmt(report.inter), report.n_inter),
            ("intra", fmt(report.intra), report.n_intra),
        ),
    )
    return lines, {
        "scoring": scoring,
        "inter": report.inter,
        "intra": report.intra,
        "n_inter": report.n_inter,
        "n_intra": report.n_intra,
    }


def timing_lines(export: Export) -> tuple[list[str], dict]:
    rows = analytics.time_feature_correlations(export)
    lines = [f"# run_id = {export.run_id}", "# correlation = pearson vs duration_seconds"]
    _rows(
        lines,
        ("feature", "pearson_r", "n"),
        [(row.feature, fmt(row.r), row.n) for row in rows],
    )
    return lines, {row.feature: row.r for row in rows}


def speedup_lines(export: Export, window: int) -> tuple[list[str], dict]:
    report = analytics.speedup_report(export, window)
    lines = [
        f"# run_id = {export.run_id}",
        f"# window = {report.window}",
        f"# pooled_slope_s_per_segment = {fmt(report.slope)}",
        f"# mean_abs_deviation_s = {fmt(report.mad)}",
    ]
    if report.skipped:
        lines.append(f"# skipped (fewer than {window} segments): {', '.join(report.skipped)}")
    _rows(
        lines,
        ("annotator_id", "n", "slope", "mad", "curve"),
        [
            (
                row.annotator_id,
                row.n,
                fmt(row.slope),
                fmt(row.mad, 2),
                ",".join(fmt(v, 2) for v in row.curve),
            )
            for row in report.annotators
        ],
    )
    return lines, {
        "window": report.window,
        "slope": report.slope,
        "mad": report.mad,
        "skipped": list(report.skipped),
    }


def rank_lines(export: Export, scoring: str, alpha: float) -> tuple[list[str], dict]:
    table = analytics.rank_systems(export, scoring=scoring, alpha=alpha)
    lines = [
        f"# run_id = {export.run_id}",
        f"# test = {table.test}",
        f"# alpha = {table.alpha}",
        f"# scoring = {table.scoring}",
    ]
    _rows(
        lines,
        ("rank", "system_id", "mean_score", "n_segments", "cluster"),
        [
            (i + 1, row.system_id, fmt(row.mean_score, 2), row.n_segments, row.cluster)
            for i, row in enumerate(table.rows)
        ],
    )
    return lines, {
        "alpha": table.alpha,
        "scoring": table.scoring,
        "systems": [
            {
                "system_id": row.system_id,
                "mean_score": row.mean_score,
                "cluster": row.cluster,
            }
            for row in table.rows
        ],
    }


def crosstau_lines(
    run_a: Export, run_b: Export, scoring_a: str, scoring_b: str
) -> tuple[list[str], dict]:
    series = analytics.cross_protocol_series(run_a, run_b, scoring_a, scoring_b)
    tau = analytics.kendall_tau_c(series)
    lines = [
        f"# run_a = {run_a.run_id} (scoring {scoring_a})",
        f"# run_b = {run_b.run_id} (scoring {scoring_b})",
        "# join = (system_id, item_id), duplicates averaged",
    ]
    _rows(lines, ("kendall_tau_c", "n"), ((fmt(tau), len(series)),))
    return lines, {"tau_c": tau, "n": len(series)}


def consistency_lines(
    matrix: consistency.ScoreMatrix,
    sizes: Sequence[int],
    n_resamples: int,
    seed: int,
    source: str,
) -> tuple[list[str], dict]:
    curve = consistency.consistency_curve(matrix, sizes, n_resamples=n_resamples, seed=seed)
    lines = [
        f"# source = {source}",
        f"# systems = {len(matrix.systems)}",
        f"# segments = {len(matrix.segments)}",
        f"# resamples = {curve.n_resamples}",
        f"# seed = {curve.seed}",
        f"# mean_accuracy_pct = {fmt(curve.mean_accuracy * 100, 2)}",
    ]
    _rows(
        lines,
        ("subset_size", "accuracy_pct"),
        [(entry.size, fmt(entry.accuracy * 100, 2)) for entry in curve.entries],
    )
    return lines, {
        "seed": curve.seed,
        "resamples": curve.n_resamples,
        "sizes": {str(e.size): e.accuracy for e in curve.entries},
        "mean_accuracy": curve.mean_accuracy,
    }


def prefilter_lines(export: Export, mode: str, threshold: float) -> tuple[list[str], dict]:
    report = consistency.prefilter_simulation(export, mode=mode, threshold=threshold)
    lines = [
        f"# run_id = {export.run_id}",
        f"# mode = {report.mode}",
        f"# threshold = {report.threshold if report.threshold is not None else 'n/a'}",
        f"# segments = {report.n_segments}",
        f"# segments_dropped = {report.n_dropped}",
        f"# budget_saving_pct = {fmt(report.budget_saving * 100, 2)}",
        f"# pair_agreement = {fmt(report.pair_agreement)}",
        f"# flipped_pairs = {len(report.flipped_pairs)}",
    ]
    _rows(
        lines,
        ("rank", "baseline_system", "filtered_system"),
        [
            (i + 1, base, filt)
            for i, (base, filt) in enumerate(
                zip(report.baseline_order, report.filtered_order)
            )
        ],
    )
    for pair in report.flipped_pairs:
        lines.append(f"# flipped: {pair[0]} <-> {pair[1]}")
    return lines, {
        "mode": report.mode,
        "threshold": report.threshold,
        "budget_saving": report.budget_saving,
        "pair_agreement": report.pair_agreement,
        "flipped_pairs": [list(p) for p in report.flipped_pairs],
        "n_dropped": report.n_dropped,
    }


def _annotations_by_annotator(export: Export) -> dict[str, dict[str, Annotation]]:
    table: dict[str, dict[str, Annotation]] = defaultdict(dict)
    for annotation in export.annotations:
        table[annotation.annotator_id][annotation.segment_id] = annotation
    return table


def checks_lines(export: Export, pass_threshold: float = 0.5) -> tuple[list[str], dict]:
    """Per-pair check outcomes, per-annotator OK rates, and the before/after
    AI-acceptance effect. An annotator passes when their score_ok rate
    reaches the threshold; the threshold is reported, not baked in."""
    if not 0 < pass_threshold <= 1:
        raise ValueError("pass_threshold must be in (0, 1]")
    by_annotator = _annotations_by_annotator(export)
    rows = []
    for task in sorted(export.segments.values(), key=lambda t: t.segment_id):
        if task.check_info is None:
            continue
        original_id = task.check_info.original_segment_id
        for annotator_id in sorted(by_annotator):
            annots = by_annotator[annotator_id]
            if task.segment_id in annots and original_id in annots:
                outcome = evaluate_check(
                    annots[original_id], annots[task.segment_id], task.check_info.perturbed_region
                )
                rows.append((annotator_id, task.segment_id, outcome))

    streams = {
        annotator_id: [
            (export.segments[a.segment_id], a)
            for a in sorted(annots.values(), key=lambda a: a.sequence_index)
        ]
        for annotator_id, annots in sorted(by_annotator.items())
    }
    effect = trust_effect(streams)

    lines = [
        f"# run_id = {export.run_id}",
        f"# check_pairs_evaluated = {len(rows)}",
        f"# pass_threshold (score_ok rate) = {pass_threshold}",
        f"# ai_acceptance_before_check = {fmt(effect.accept_before)} (n={effect.n_before})",
        f"# ai_acceptance_after_check = {fmt(effect.accept_after)} (n={effect.n_after})",
    ]
    _rows(
        lines,
        ("annotator_id", "check_segment", "score_ok", "more_spans", "region_marked"),
        [
            (
                annotator_id,
                segment_id,
                outcome.score_ok,
                outcome.span_count_ok,
                outcome.perturbation_marked,
            )
            for annotator_id, segment_id, outcome in rows
        ],
    )

    per_annotator = {}
    for annotator_id in sorted({a for a, _, _ in rows}):
        mine = [o for a, _, o in rows if a == annotator_id]
        per_annotator[annotator_id] = {
            "pairs": len(mine),
            "score_ok_rate": _rate([o.score_ok for o in mine]),
            "more_spans_rate": _rate([o.span_count_ok for o in mine]),
            "region_marked_rate": _rate([o.perturbation_marked for o in mine]),
        }
        per_annotator[annotator_id]["passed"] = (
            per_annotator[annotator_id]["score_ok_rate"] >= pass_threshold
        )
    lines.append("")
    _rows(
        lines,
        ("annotator_id", "pairs", "score_ok_rate", "more_spans_rate", "region_marked_rate", "passed"),
        [
            (
                annotator_id,
                stats["pairs"],
                fmt(stats["score_ok_rate"], 2),
                fmt(stats["more_spans_rate"], 2),
                fmt(stats["region_marked_rate"], 2),
                stats["passed"],
            )
            for annotator_id, stats in per_annotator.items()
        ],
    )
    summary = {
        "pairs": len(rows),
        "pass_threshold": pass_threshold,
        "score_ok_rate": _rate([o.score_ok for _, _, o in rows]),
        "more_spans_rate": _rate([o.span_count_ok for _, _, o in rows]),
        "region_marked_rate": _rate([o.perturbation_marked for _, _, o in rows]),
        "per_annotator": per_annotator,
        "accept_before": effect.accept_before,
        "accept_after": effect.accept_after,
    }
    return lines, summary


def _rate(flags: list[bool]) -> Optional[float]:
    return sum(flags) / len(flags) if flags else None


def diff_lines(export: Export) -> tuple[list[str], dict]:
    """How annotators edited the QE pre-fill, aggregated over all segments."""
    records = []
    prefill_counts = {}
    observations = []
    for annotation in export.real_annotations():
        task = export.task_for(annotation)
        segment_records = spandiff.diff_segment(
            task.prefill_spans, annotation.spans, task.segment_id
        )
        records.extend(segment_records)
        prefill_counts[task.segment_id] = len(task.prefill_spans)
        observations.append((annotation.sequence_index, segment_records))

    edits = spandiff.summarize_edits(records)
    distribution = spandiff.edit_distribution(records, prefill_counts)

    lines = [
        f"# run_id = {export.run_id}",
        f"# prefill_spans = {edits.n_prefill}",
        f"# matched = {edits.n_matched}",
        f"# kept_unchanged = {edits.n_kept}",
        f"# removed = {edits.n_removed}",
        f"# added = {edits.n_added}",
        f"# severity_changed = {edits.n_severity_change} (increase {edits.n_severity_increase})",
        f"# moved = {edits.n_move}",
        f"# resized = {edits.n_resize} (increase {edits.n_resize_increase})",
    ]
    for limit in sorted(edits.move_within):
        lines.append(f"# moves_within_{limit}_chars = {edits.move_within[limit]}")
    _rows(
        lines,
        ("qe_spans", "segments", "freq", "removed_0", "removed_1", "removed_2", "removed_3+",
         "no_edit", "added_0", "added_1", "added_2", "added_3+"),
        [
            (
                row.qe_count,
                row.n_segments,
                fmt(row.freq, 3),
                fmt(row.removed.get("0"), 3),
                fmt(row.removed.get("1"), 3),
                fmt(row.removed.get("2"), 3),
                fmt(row.removed.get("3+"), 3),
                fmt(row.no_edit, 3),
                fmt(row.added.get("0"), 3),
                fmt(row.added.get("1"), 3),
                fmt(row.added.get("2"), 3),
                fmt(row.added.get("3+"), 3),
            )
            for row in distribution
        ],
    )
    summary = {
        "prefill": edits.n_prefill,
        "kept": edits.n_kept,
        "removed": edits.n_removed,
        "added": edits.n_added,
        "severity_changed": edits.n_severity_change,
        "moved": edits.n_move,
        "resized": edits.n_resize,
        "move_within": {str(k): v for k, v in edits.move_within.items()},
    }
    return lines, summary
