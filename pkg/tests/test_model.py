import pytest
from hypothesis import given, strategies as st

from esakit.model import (
    MISSING_SUFFIX,
    MISSING_TOKEN,
    Annotation,
    ErrorSpan,
    SegmentTask,
    Severity,
    display_text,
    missing_region,
    missing_token_span,
    score_from_spans,
    summarize_annotations,
    validate_span,
)
from conftest import make_annotation, make_task, span


class TestSeverity:
    def test_weights(self):
        assert Severity.MINOR.weight == 1
        assert Severity.MAJOR.weight == 5

    def test_rank_orders_minor_below_major(self):
        assert Severity.MINOR.rank < Severity.MAJOR.rank

    def test_round_trips_through_value(self):
        for severity in Severity:
            assert Severity(severity.value) is severity


class TestErrorSpan:
    def test_length(self):
        assert span(3, 9).length == 6

    def test_overlap_disjoint_is_zero(self):
        assert span(0, 5).overlap(span(5, 10)) == 0

    def test_overlap_partial(self):
        assert span(0, 5).overlap(span(3, 10)) == 2

    def test_overlap_contained(self):
        assert span(0, 10).overlap(span(2, 4)) == 2

    def test_overlap_symmetric(self):
        a, b = span(1, 7), span(4, 12)
        assert a.overlap(b) == b.overlap(a)

    def test_endpoint_distance_is_max_of_deltas(self):
        assert span(10, 15).endpoint_distance(span(12, 17)) == 2
        assert span(10, 15).endpoint_distance(span(11, 20)) == 5

    def test_dict_round_trip(self):
        original = span(2, 8, "major", "ai", on_missing=False)
        assert ErrorSpan.from_dict(original.to_dict()) == original


class TestDisplayText:
    def test_appends_missing_suffix(self):
        assert display_text("Hello.") == "Hello. " + MISSING_TOKEN

    def test_missing_region_covers_suffix(self):
        display = display_text("Hello.")
        region = missing_region(display)
        assert display[region[0] : region[1]] == MISSING_SUFFIX

    def test_missing_region_absent(self):
        assert missing_region("no suffix here") is None

    def test_missing_token_span_excludes_space(self):
        display = display_text("Hi.")
        start, end = missing_token_span(display)
        assert display[start:end] == MISSING_TOKEN

    def test_missing_token_span_requires_suffix(self):
        with pytest.raises(ValueError):
            missing_token_span("bare text")


class TestValidateSpan:
    DISPLAY = display_text("0123456789")  # length 10 + 10 suffix chars

    def test_valid_span_has_no_violations(self):
        assert validate_span(span(0, 5), self.DISPLAY) == []

    def test_negative_start(self):
        violations = validate_span(span(-1, 5), self.DISPLAY)
        assert "start >= 0" in violations

    def test_empty_interval(self):
        violations = validate_span(span(5, 5), self.DISPLAY)
        assert "start < end" in violations

    def test_end_beyond_display(self):
        violations = validate_span(span(0, len(self.DISPLAY) + 1), self.DISPLAY)
        assert "end <= display length" in violations

    def test_on_missing_must_sit_in_suffix(self):
        bad = span(0, 5, on_missing=True)
        assert "on_missing span within [MISSING] suffix" in validate_span(bad, self.DISPLAY)

    def test_on_missing_token_span_is_valid(self):
        start, end = missing_token_span(self.DISPLAY)
        ok = span(start, end, on_missing=True)
        assert validate_span(ok, self.DISPLAY) == []

    def test_span_covering_whole_display_is_valid(self):
        assert validate_span(span(0, len(self.DISPLAY)), self.DISPLAY) == []


class TestScoreFromSpans:
    def test_empty_is_zero(self):
        assert score_from_spans([]) == 0

    def test_minor_counts_minus_one(self):
        assert score_from_spans([span(0, 3, "minor")]) == -1

    def test_major_counts_minus_five(self):
        assert score_from_spans([span(0, 3, "major")]) == -5

    def test_mixed(self):
        spans = [span(0, 3, "major"), span(4, 6, "minor"), span(7, 9, "minor")]
        assert score_from_spans(spans) == -7

    def test_overlapping_spans_each_count(self):
        spans = [span(0, 5, "major"), span(0, 5, "major")]
        assert score_from_spans(spans) == -10

    @given(
        st.lists(
            st.tuples(
                st.integers(0, 50),
                st.integers(1, 20),
                st.sampled_from(["minor", "major"]),
            ),
            max_size=30,
        )
    )
    def test_matches_weight_sum_oracle(self, triples):
        spans = [span(s, s + l, sev) for s, l, sev in triples]
        minors = sum(1 for _, _, sev in triples if sev == "minor")
        majors = len(triples) - minors
        assert score_from_spans(spans) == -(minors + 5 * majors)


class TestSegmentTask:
    def test_display_text_property(self):
        task = make_task(target_text="Short target.")
        assert task.display_text == "Short target." + MISSING_SUFFIX

    def test_is_check(self):
        assert not make_task().is_check

    def test_dict_round_trip(self):
        task = make_task(prefill_spans=(span(0, 4, "major", "ai"),))
        assert SegmentTask.from_dict(task.to_dict()) == task

    def test_validate_flags_bad_prefill(self):
        task = make_task(target_text="abc", prefill_spans=(span(0, 99, "minor", "ai"),))
        assert task.validate()

    def test_validate_clean(self):
        task = make_task(prefill_spans=(span(0, 4, "minor", "ai"),))
        assert task.validate() == []


class TestAnnotation:
    def test_dict_round_trip(self):
        annotation = make_annotation(spans=(span(1, 3), span(5, 9, "major")))
        assert Annotation.from_dict(annotation.to_dict()) == annotation


class TestSummarizeAnnotations:
    def test_empty_raises(self):
        with pytest.raises(ValueError):
            summarize_annotations([])

    def test_hand_fixture(self):
        annotations = [
            make_annotation(spans=(span(0, 2, "minor"), span(3, 5, "major")), direct_score=70),
            make_annotation(spans=(span(0, 2, "minor"),), direct_score=90),
        ]
        stats = summarize_annotations(annotations)
        assert stats.mean_spans == pytest.approx(1.5)
        assert stats.minor_pct == pytest.approx(100 * 2 / 3)
        assert stats.major_pct == pytest.approx(100 / 3)
        assert stats.mean_score == pytest.approx(80.0)
        assert stats.n_annotations == 2
        assert stats.n_spans == 3

    def test_no_spans_leaves_split_undefined(self):
        stats = summarize_annotations([make_annotation(direct_score=100)])
        assert stats.minor_pct is None
        assert stats.major_pct is None
        assert stats.mean_spans == 0.0
