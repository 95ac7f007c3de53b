"""Statistics suite: correlation oracles, agreement joins, timing, ranking."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, assume, settings
from hypothesis import strategies as st

from conftest import make_annotation, make_export, make_task, span
from esakit.analytics import (
    SIGNIFICANCE_TEST,
    TIME_FEATURES,
    agreement_report,
    cross_protocol_series,
    cross_protocol_tau,
    kendall_tau_c,
    paired,
    pearson,
    rank_systems,
    score_value,
    spearman,
    speedup_report,
    time_feature_correlations,
)


# -- oracles ------------------------------------------------------------

def rank_average(values):
    """Fractional ranks: tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman_oracle(x, y):
    rx, ry = rank_average(x), rank_average(y)
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(
        sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry)
    )
    return num / den


def tau_c_oracle(x, y):
    n = len(x)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            sign = (x[i] - x[j]) * (y[i] - y[j])
            if sign > 0:
                concordant += 1
            elif sign < 0:
                discordant += 1
    m = min(len(set(x)), len(set(y)))
    return 2.0 * m * (concordant - discordant) / (n * n * (m - 1))


_tied_values = st.integers(min_value=0, max_value=8).map(float)
_series_pair = st.integers(min_value=3, max_value=25).flatmap(
    lambda n: st.tuples(
        st.lists(_tied_values, min_size=n, max_size=n),
        st.lists(_tied_values, min_size=n, max_size=n),
    )
)


class TestCorrelations:
    def test_spearman_perfect_monotone(self):
        assert spearman(paired([1, 2, 3, 4], [10, 20, 30, 40])) == pytest.approx(1.0)
        assert spearman(paired([1, 2, 3, 4], [40, 30, 20, 10])) == pytest.approx(-1.0)

    def test_spearman_needs_three_pairs(self):
        with pytest.raises(ValueError, match="at least 3"):
            spearman(paired([1, 2], [1, 2]))

    def test_spearman_constant_side_undefined(self):
        assert spearman(paired([5, 5, 5], [1, 2, 3])) is None
        assert spearman(paired([1, 2, 3], [7, 7, 7])) is None

    def test_tau_c_two_pairs(self):
        assert kendall_tau_c(paired([1, 2], [1, 2])) == pytest.approx(1.0)

    def test_tau_c_needs_two_pairs(self):
        with pytest.raises(ValueError, match="at least 2"):
            kendall_tau_c(paired([1], [1]))

    def test_tau_c_constant_side_undefined(self):
        assert kendall_tau_c(paired([3, 3, 3], [1, 2, 3])) is None

    def test_tau_c_rectangular_contingency(self):
        # 2 distinct x values against 4 distinct y values; tau-c corrects
        # for the non-square table via m = 2
        x = [0, 0, 1, 1]
        y = [1, 2, 3, 4]
        assert kendall_tau_c(paired(x, y)) == pytest.approx(tau_c_oracle(x, y))

    def test_pearson_linear(self):
        assert pearson(paired([1, 2, 3], [3, 5, 7])) == pytest.approx(1.0)

    def test_pearson_constant_undefined(self):
        assert pearson(paired([1, 1, 1], [1, 2, 3])) is None

    @given(_series_pair)
    @settings(max_examples=150)
    def test_spearman_matches_rank_pearson_oracle(self, pair):
        x, y = pair
        assume(len(set(x)) > 1 and len(set(y)) > 1)
        assert spearman(paired(x, y)) == pytest.approx(
            spearman_oracle(x, y), abs=1e-10
        )

    @given(_series_pair)
    @settings(max_examples=150)
    def test_tau_c_matches_pair_count_oracle(self, pair):
        x, y = pair
        assume(len(set(x)) > 1 and len(set(y)) > 1)
        assert kendall_tau_c(paired(x, y)) == pytest.approx(
            tau_c_oracle(x, y), abs=1e-10
        )

    @given(_series_pair)
    @settings(max_examples=60)
    def test_rank_statistics_invariant_under_monotone_transform(self, pair):
        x, y = pair
        assume(len(set(x)) > 1 and len(set(y)) > 1)
        stretched = [3.0 * v + 11.0 for v in x]
        cubed = [v**3 for v in y]
        assert spearman(paired(stretched, cubed)) == pytest.approx(
            spearman(paired(x, y)), abs=1e-10
        )
        assert kendall_tau_c(paired(stretched, cubed)) == pytest.approx(
            kendall_tau_c(paired(x, y)), abs=1e-10
        )

    def test_paired_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            paired([1, 2, 3], [1, 2])


class TestScoreValue:
    def test_direct(self):
        annotation = make_annotation(direct_score=73)
        assert score_value(annotation, "direct") == 73.0

    def test_from_spans(self):
        annotation = make_annotation(
            spans=(span(0, 3, "minor"), span(4, 8, "major"))
        )
        assert score_value(annotation, "from_spans") == -6.0

    def test_unknown_scoring(self):
        with pytest.raises(ValueError, match="unknown scoring"):
            score_value(make_annotation(), "fancy")


# -- agreement ----------------------------------------------------------

def _single_annotator_export(scores, annotator_id="ann1", run_id="run"):
    tasks, annotations = [], []
    for i, score in enumerate(scores):
        seg = f"sysA::item{i}"
        tasks.append(
            make_task(segment_id=seg, item_id=f"item{i}", document_id=f"doc{i}")
        )
        annotations.append(
            make_annotation(
                segment_id=seg,
                annotator_id=annotator_id,
                direct_score=score,
                sequence_index=i + 1,
            )
        )
    return make_export(tasks, annotations, run_id=run_id)


class TestAgreement:
    def test_self_join_intra_is_one_inter_empty(self):
        export = _single_annotator_export([10, 40, 70, 90])
        report = agreement_report(export, export)
        assert report.intra == pytest.approx(1.0)
        assert report.n_intra == 4
        # same annotator on both sides: no cross-annotator pair exists
        assert report.n_inter == 0
        assert report.inter is None

    def test_different_annotators_feed_inter(self):
        run_a = _single_annotator_export([10, 40, 70, 90], "ann1", "a")
        run_b = _single_annotator_export([15, 45, 75, 95], "ann2", "b")
        report = agreement_report(run_a, run_b)
        assert report.n_intra == 0
        assert report.intra is None
        assert report.n_inter == 4
        assert report.inter == pytest.approx(1.0)

    def test_inter_reversed_scores(self):
        run_a = _single_annotator_export([10, 40, 70, 90], "ann1", "a")
        run_b = _single_annotator_export([90, 70, 40, 10], "ann2", "b")
        assert agreement_report(run_a, run_b).inter == pytest.approx(-1.0)

    def test_no_shared_segments_raises(self):
        run_a = _single_annotator_export([10, 40, 70], run_id="a")
        tasks = [make_task(segment_id="sysB::other", item_id="other", system_id="sysB")]
        annotations = [make_annotation(segment_id="sysB::other")]
        run_b = make_export(tasks, annotations, run_id="b")
        with pytest.raises(ValueError, match="empty join on segment_id"):
            agreement_report(run_a, run_b)

    def test_under_three_pairs_reports_none(self):
        run_a = _single_annotator_export([10, 40], run_id="a")
        run_b = _single_annotator_export([20, 50], run_id="b")
        report = agreement_report(run_a, run_b)
        assert report.n_intra == 2
        assert report.intra is None

    def test_from_spans_scoring(self):
        tasks = [
            make_task(segment_id=f"sysA::item{i}", item_id=f"item{i}")
            for i in range(3)
        ]
        spans_by_item = [(), (span(0, 3),), (span(0, 3), span(4, 9, "major"))]
        annotations = [
            make_annotation(segment_id=t.segment_id, spans=s)
            for t, s in zip(tasks, spans_by_item)
        ]
        export = make_export(tasks, annotations)
        report = agreement_report(export, export, scoring="from_spans")
        assert report.scoring == "from_spans"
        assert report.intra == pytest.approx(1.0)


class TestCrossProtocol:
    def _export(self, cell_scores, run_id, annotator="ann1", seg_prefix=""):
        """cell_scores: {(system, item): [score, ...]}"""
        tasks, annotations = {}, []
        for (system, item), values in cell_scores.items():
            seg = f"{seg_prefix}{system}::{item}"
            tasks[seg] = make_task(
                segment_id=seg, item_id=item, system_id=system,
                document_id=f"{seg_prefix}{system}::doc",
            )
            for k, value in enumerate(values):
                annotations.append(
                    make_annotation(
                        segment_id=seg,
                        annotator_id=annotator,
                        direct_score=value,
                        sequence_index=len(annotations) + 1,
                    )
                )
        return make_export(tasks.values(), annotations, run_id=run_id)

    def test_join_and_duplicate_averaging(self):
        run_a = self._export(
            {("s1", "i1"): [60, 80], ("s1", "i2"): [30], ("s1", "i3"): [90]},
            "a",
        )
        # different segment ids on purpose: the join is on (system, item)
        run_b = self._export(
            {("s1", "i1"): [65], ("s1", "i2"): [35], ("s1", "i3"): [85]},
            "b",
            seg_prefix="other/",
        )
        series = cross_protocol_series(run_a, run_b)
        assert series.keys == (("s1", "i1"), ("s1", "i2"), ("s1", "i3"))
        assert series.x == (70.0, 30.0, 90.0)
        assert series.y == (65.0, 35.0, 85.0)
        assert cross_protocol_tau(run_a, run_b) == pytest.approx(1.0)

    def test_tau_counts_a_flip(self):
        run_a = self._export(
            {("s1", "i1"): [10], ("s1", "i2"): [50], ("s1", "i3"): [90]}, "a"
        )
        run_b = self._export(
            {("s1", "i1"): [20], ("s1", "i2"): [90], ("s1", "i3"): [60]}, "b"
        )
        x = [10, 50, 90]
        y = [20, 90, 60]
        assert cross_protocol_tau(run_a, run_b) == pytest.approx(tau_c_oracle(x, y))

    def test_empty_join_raises(self):
        run_a = self._export({("s1", "i1"): [10]}, "a")
        run_b = self._export({("s2", "i9"): [10]}, "b")
        with pytest.raises(ValueError, match=r"empty join on \(system_id, item_id\)"):
            cross_protocol_series(run_a, run_b)


# -- timing -------------------------------------------------------------

class TestTimeFeatures:
    def test_duration_proportional_to_word_count(self):
        tasks, annotations = [], []
        for i, words in enumerate([2, 5, 9, 14, 23]):
            seg = f"sysA::item{i}"
            tasks.append(
                make_task(
                    segment_id=seg,
                    item_id=f"item{i}",
                    document_id=f"doc{i}",
                    target_text=" ".join(["w"] * words),
                )
            )
            annotations.append(
                make_annotation(
                    segment_id=seg,
                    duration_seconds=3.0 * words,
                    sequence_index=i + 1,
                    direct_score=50 + i,
                )
            )
        rows = {row.feature: row for row in time_feature_correlations(
            make_export(tasks, annotations)
        )}
        assert set(rows) == set(TIME_FEATURES)
        assert rows["word_count"].r == pytest.approx(1.0)
        assert rows["word_count"].n == 5
        # every task is its own single-segment document: constant feature
        assert rows["document_size"].r is None

    def test_independent_feature_correlates_near_zero(self):
        rng = np.random.default_rng(7)
        tasks, annotations = [], []
        for i in range(1000):
            seg = f"sysA::item{i}"
            words = int(rng.integers(3, 40))
            tasks.append(
                make_task(
                    segment_id=seg,
                    item_id=f"item{i}",
                    document_id=f"doc{i}",
                    target_text=" ".join(["w"] * words),
                )
            )
            annotations.append(
                make_annotation(
                    segment_id=seg,
                    duration_seconds=float(rng.uniform(5, 120)),
                    sequence_index=i + 1,
                )
            )
        rows = {row.feature: row for row in time_feature_correlations(
            make_export(tasks, annotations)
        )}
        assert abs(rows["word_count"].r) < 0.1

    def test_too_few_annotations_all_undefined(self):
        export = _single_annotator_export([40, 70])
        for row in time_feature_correlations(export):
            assert row.r is None
            assert row.n == 2


def _timing_export(duration_fn, n=20, annotator_id="ann1", extra=()):
    tasks, annotations = [], []
    for i in range(n):
        seg = f"sysA::{annotator_id}::item{i}"
        tasks.append(
            make_task(segment_id=seg, item_id=f"item{i}", document_id=f"{annotator_id}::doc{i}")
        )
        annotations.append(
            make_annotation(
                segment_id=seg,
                annotator_id=annotator_id,
                duration_seconds=float(duration_fn(i + 1)),
                sequence_index=i + 1,
            )
        )
    tasks = list(tasks) + [task for task, _ in extra]
    annotations = list(annotations) + [annotation for _, annotation in extra]
    return make_export(tasks, annotations)


class TestSpeedup:
    def test_constant_durations_flat(self):
        report = speedup_report(_timing_export(lambda t: 30.0), window=5)
        assert report.slope == pytest.approx(0.0, abs=1e-12)
        assert report.mad == pytest.approx(0.0, abs=1e-12)
        row = report.annotators[0]
        assert row.curve == tuple([30.0] * 16)
        assert row.n == 20

    def test_linear_decline_recovers_slope(self):
        report = speedup_report(_timing_export(lambda t: 100.0 - t), window=5)
        assert report.slope == pytest.approx(-1.0, abs=1e-9)
        # durations 99..80: mean 89.5, mean absolute deviation 5.0
        assert report.mad == pytest.approx(5.0)

    def test_trailing_window_values(self):
        report = speedup_report(
            _timing_export(lambda t: [10, 20, 30, 40][t - 1], n=4), window=2
        )
        assert report.annotators[0].curve == (15.0, 25.0, 35.0)

    def test_short_annotator_skipped_with_notice(self):
        short_task = make_task(segment_id="sysA::extra", item_id="extra", document_id="docx")
        short_ann = make_annotation(
            segment_id="sysA::extra", annotator_id="ann2", sequence_index=1
        )
        report = speedup_report(
            _timing_export(lambda t: 30.0, extra=[(short_task, short_ann)]),
            window=5,
        )
        assert report.skipped == ("ann2",)
        assert [row.annotator_id for row in report.annotators] == ["ann1"]

    def test_all_skipped_reports_none(self):
        report = speedup_report(_timing_export(lambda t: 30.0, n=3), window=10)
        assert report.slope is None
        assert report.mad is None
        assert report.annotators == ()
        assert report.skipped == ("ann1",)

    def test_window_validation(self):
        with pytest.raises(ValueError, match="window"):
            speedup_report(_timing_export(lambda t: 30.0), window=0)

    def test_pooled_over_two_annotators(self):
        export_a = _timing_export(lambda t: 50.0 - t, annotator_id="ann1")
        export_b = _timing_export(lambda t: 80.0 - t, annotator_id="ann2")
        merged = make_export(
            list(export_a.segments.values()) + list(export_b.segments.values()),
            export_a.annotations + export_b.annotations,
        )
        report = speedup_report(merged, window=5)
        assert len(report.annotators) == 2
        # same per-annotator slope; the intercept difference does not
        # change the pooled least-squares slope because the index sets match
        assert report.slope == pytest.approx(-1.0, abs=1e-9)


# -- ranking ------------------------------------------------------------

def _ranking_export(system_scores, annotator_id="ann1"):
    """system_scores: {system: [score per item index]}"""
    tasks, annotations = [], []
    sequence = 1
    for system, values in system_scores.items():
        for i, value in enumerate(values):
            if value is None:
                continue
            seg = f"{system}::item{i}"
            tasks.append(
                make_task(
                    segment_id=seg,
                    item_id=f"item{i}",
                    system_id=system,
                    document_id=f"{system}::doc",
                )
            )
            annotations.append(
                make_annotation(
                    segment_id=seg,
                    annotator_id=annotator_id,
                    direct_score=value,
                    sequence_index=sequence,
                )
            )
            sequence += 1
    return make_export(tasks, annotations)


class TestRanking:
    def test_identical_systems_share_a_cluster(self):
        scores = [40, 55, 62, 70, 48, 51, 66, 59, 44, 73]
        table = rank_systems(_ranking_export({"sysA": scores, "sysB": scores}))
        assert [row.cluster for row in table.rows] == [1, 1]
        assert table.pairwise_p[("sysA", "sysB")] == 1.0
        # tie broken alphabetically
        assert [row.system_id for row in table.rows] == ["sysA", "sysB"]

    def test_separated_systems_split_clusters(self):
        high = [85 + i % 5 for i in range(12)]
        low = [25 + i % 5 for i in range(12)]
        table = rank_systems(_ranking_export({"sysA": high, "sysB": low}))
        assert [row.system_id for row in table.rows] == ["sysA", "sysB"]
        assert [row.cluster for row in table.rows] == [1, 2]
        assert table.pairwise_p[("sysA", "sysB")] < 0.05

    def test_overlapping_systems_share_cluster(self):
        table = rank_systems(
            _ranking_export(
                {"sysA": [50, 60, 70, 40, 65], "sysB": [55, 65, 45, 50, 60]}
            )
        )
        assert len({row.cluster for row in table.rows}) == 1

    def test_three_way_split(self):
        top = [90 + i % 3 for i in range(12)]
        mid = [55 + i % 3 for i in range(12)]
        bottom = [10 + i % 3 for i in range(12)]
        table = rank_systems(
            _ranking_export({"sysB": mid, "sysC": bottom, "sysA": top})
        )
        assert [row.system_id for row in table.rows] == ["sysA", "sysB", "sysC"]
        assert [row.cluster for row in table.rows] == [1, 2, 3]

    def test_rows_sorted_by_descending_mean(self):
        table = rank_systems(
            _ranking_export({"sysA": [30, 40], "sysB": [80, 90], "sysC": [50, 60]})
        )
        means = [row.mean_score for row in table.rows]
        assert means == sorted(means, reverse=True)
        assert [row.system_id for row in table.rows] == ["sysB", "sysC", "sysA"]

    def test_constant_shift_preserves_order_and_clusters(self):
        base = {
            "sysA": [70 + (i * 7) % 13 for i in range(15)],
            "sysB": [40 + (i * 5) % 11 for i in range(15)],
            "sysC": [38 + (i * 3) % 9 for i in range(15)],
        }
        shifted = {k: [v + 20 for v in vals] for k, vals in base.items()}
        table_base = rank_systems(_ranking_export(base))
        table_shift = rank_systems(_ranking_export(shifted))
        assert [r.system_id for r in table_base.rows] == [
            r.system_id for r in table_shift.rows
        ]
        assert [r.cluster for r in table_base.rows] == [
            r.cluster for r in table_shift.rows
        ]
        for key, p in table_base.pairwise_p.items():
            assert table_shift.pairwise_p[key] == pytest.approx(p)

    def test_disjoint_coverage_raises(self):
        export = _ranking_export(
            {"sysA": [50, 60, None, None], "sysB": [None, None, 40, 45]}
        )
        with pytest.raises(ValueError, match="disjoint segment coverage"):
            rank_systems(export)

    def test_single_system_raises(self):
        with pytest.raises(ValueError, match="at least 2 systems"):
            rank_systems(_ranking_export({"sysA": [50, 60]}))

    def test_check_annotations_ignored(self):
        from esakit.model import CheckInfo

        export = _ranking_export({"sysA": [60, 70, 80], "sysB": [30, 40, 50]})
        check_task = make_task(
            segment_id="sysA::item0::check",
            item_id="item0",
            system_id="sysA",
            document_id="check::sysA::item0",
            check_info=CheckInfo(perturbed_region=(0, 5), original_segment_id="sysA::item0"),
        )
        tampered = make_export(
            list(export.segments.values()) + [check_task],
            export.annotations
            + [
                make_annotation(
                    segment_id="sysA::item0::check", direct_score=0, sequence_index=99
                )
            ],
        )
        assert rank_systems(tampered) == rank_systems(export)

    def test_table_metadata(self):
        table = rank_systems(_ranking_export({"sysA": [60, 70], "sysB": [30, 40]}))
        assert table.test == SIGNIFICANCE_TEST
        assert table.alpha == 0.05
        assert table.scoring == "direct"
