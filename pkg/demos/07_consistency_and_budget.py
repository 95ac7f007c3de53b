"""
How small can an evaluation get before rankings become unreliable?
==================================================================

Subset consistency: resample segment subsets of growing size and measure how
often system pairs keep their full-data ordering. The noise-model simulator
shows the same curves without any human data; the prefiltering simulation
asks what happens to the ranking if QE-clean segments are never annotated.
"""

import numpy as np

from esakit.consistency import (
    NoiseModelParams,
    ScoreMatrix,
    consistency_curve,
    prefilter_simulation,
    simulate_matrix,
    subset_accuracy,
)
from esakit.campaign.records import Export
from esakit.model import Annotation, ErrorSpan, SegmentTask, Severity, SpanOrigin

# -- simulator: system abilities 1 point apart, increasing observation noise
sizes = (5, 20, 80, 200)
for noise in (1.0, 4.0, 16.0):
    params = NoiseModelParams(
        abilities=tuple(float(i) for i in range(8)),
        noise_scale=noise,
        seed=0,
    )
    matrix = simulate_matrix(params, 200)
    curve = consistency_curve(matrix, sizes=sizes, n_resamples=300, seed=1)
    cells = "  ".join(f"{e.size}:{e.accuracy:.2%}" for e in curve.entries)
    print(f"noise {noise:>4}: {cells}")
print()

# a single subset by hand, for the definition's sake
matrix = simulate_matrix(
    NoiseModelParams(abilities=(0.0, 1.0, 2.0), noise_scale=2.0, seed=3), 50
)
print(f"one 10-segment subset: Acc = {subset_accuracy(matrix, range(10)):.2f}")
print()

# -- prefiltering: build a toy export where the QE found nothing on the
#    even-numbered items (for either system), then simulate skipping those
tasks, annotations = {}, []
for system, base in (("strong", 80), ("weak", 60)):
    for i in range(20):
        sid = f"{system}::item{i:02d}"
        clean = i % 2 == 0
        prefill = () if clean else (ErrorSpan(0, 4, Severity.MINOR, SpanOrigin.AI),)
        tasks[sid] = SegmentTask(
            segment_id=sid,
            item_id=f"item{i:02d}",
            document_id=f"{system}::doc0",
            system_id=system,
            source_text="s",
            target_text="Word salad but twenty characters long.",
            prefill_spans=prefill,
        )
        annotations.append(
            Annotation(
                segment_id=sid,
                annotator_id="ann1",
                spans=prefill,
                direct_score=base + (i % 5),
                duration_seconds=20,
                submitted_at="2025-06-01T10:00:00+00:00",
                sequence_index=i + 1,
            )
        )
export = Export("prefilter-demo", tasks, annotations)

for mode in ("substitute", "exclude"):
    report = prefilter_simulation(export, mode=mode, threshold=1.0)
    print(
        f"{mode:>10}: saves {report.budget_saving:.0%}, "
        f"pair agreement {report.pair_agreement:.2f}, "
        f"{len(report.flipped_pairs)} flipped pair(s)"
    )

# substitute scores skipped cells as a perfect 100; exclude drops the whole
# item from the matrix; either way the ranking here survives
baseline = ScoreMatrix.from_export(export)
print("\nfull-data means:", dict(zip(baseline.systems, np.round(baseline.full_means, 1))))
