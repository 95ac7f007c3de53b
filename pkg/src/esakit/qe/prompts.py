"""Error-list prompt rendering and parsing of the returned error grammar.

The completion prompt carries a one-shot demonstration followed by the actual
request, and the model answers with severity-headed sections of
``category - "quote"`` lines. Quotes are substrings of the translation, so a
separate localization step maps them to character offsets.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..model import ErrorSpan, Severity, SpanOrigin, missing_region, missing_token_span

logger = logging.getLogger(__name__)

_INSTRUCTION = (
    "Your task is to identify machine translation errors "
    "and assess the quality of the translation."
)

_REQUEST_TEMPLATE = """{source_lang} source:
```{source_seg}```
{target_lang} translation:
```{target_seg}```

Based on the source segment and machine translation surrounded with triple backticks, \
identify error types in the translation and classify them. The categories of errors are: \
accuracy (addition, mistranslation, omission, untranslated text), fluency (character \
encoding, grammar, inconsistency, punctuation, register, spelling), style (awkward), \
terminology (inappropriate for context, inconsistent use), non-translation, other, \
or no-error.
Each error is classified as one of two categories: major or minor. Major errors disrupt \
the flow and make the understandability of text difficult or impossible. Minor errors \
are errors that do not disrupt the flow significantly and what the text is trying to \
say is still understandable."""

_ONE_SHOT_REQUEST = {
    "source_lang": "English",
    "source_seg": (
        "I do apologise about this, we must gain permission from the account holder "
        "to discuss an order with another person, I apologise if this was done "
        "previously, however, I would not be able to discuss this with yourself "
        "without the account holders permission."
    ),
    "target_lang": "German",
    "target_seg": (
        "Ich entschuldige mich dafuer, wir muessen die Erlaubnis einholen, um eine "
        "Bestellung mit einer anderen Person zu besprechen. Ich entschuldige mich, "
        "falls dies zuvor geschehen waere, aber ohne die Erlaubnis des Kontoinhabers "
        "waere ich nicht in der Lage, dies mit dir involvement."
    ),
}

_ONE_SHOT_ANSWER = """Major:
accuracy/mistranslation - "involvement"
accuracy/omission - "the account holder"
Minor:
fluency/grammar - "waere"
fluency/register - "dir\""""

_SCORE_TEMPLATE = """Given the translation from {source_lang} to {target_lang} and the \
annotated error spans, assign a score on a continuous scale from 0 to 100. The scale \
has following reference points: 0="No meaning preserved", 33="Some meaning preserved", \
66="Most meaning preserved and few grammar mistakes", up to 100="Perfect meaning and \
grammar".

Score the following translation from {source_lang} source:
```{source_seg}```
{target_lang} translation:
```{target_seg}```
Annotated error spans:
```{error_spans}```
Score (0-100): """


@dataclass(frozen=True)
class QeRequest:
    source_lang: str
    target_lang: str
    source_seg: str
    target_seg: str

    def validate(self) -> None:
        for name in ("source_lang", "target_lang", "source_seg", "target_seg"):
            if not getattr(self, name):
                raise ValueError(f"missing template variable: {name}")


@dataclass(frozen=True)
class QeErrorLine:
    severity: Severity
    category: str
    quote: str


def render_error_prompt(req: QeRequest) -> str:
    """Full error-identification prompt: instruction, one-shot, then request."""
    req.validate()
    return "\n\n".join(
        [
            _INSTRUCTION,
            _REQUEST_TEMPLATE.format(**_ONE_SHOT_REQUEST),
            _ONE_SHOT_ANSWER,
            _REQUEST_TEMPLATE.format(
                source_lang=req.source_lang,
                target_lang=req.target_lang,
                source_seg=req.source_seg,
                target_seg=req.target_seg,
            ),
        ]
    )


def render_score_prompt(req: QeRequest, error_spans: str) -> str:
    """Optional holistic 0-100 scoring prompt; never shown to annotators."""
    req.validate()
    return _SCORE_TEMPLATE.format(
        source_lang=req.source_lang,
        target_lang=req.target_lang,
        source_seg=req.source_seg,
        target_seg=req.target_seg,
        error_spans=error_spans,
    )


_HEADER_RE = re.compile(r"^\s*(major|minor)\s*:\s*$", re.IGNORECASE)
_ERROR_LINE_RE = re.compile(r'^\s*(?P<category>.+?)\s*-\s*"(?P<quote>.+)"\s*$')
_NO_ERROR_RE = re.compile(r"^\s*no-error\.?\s*$", re.IGNORECASE)


def parse_error_list(response: str) -> list[QeErrorLine]:
    """Parse severity sections into error lines, order preserved.

    Unparseable lines are skipped with a warning; an explicit no-error marker
    yields an empty list silently. A response with no parseable section at
    all is a warning, not a fault.
    """
    lines: list[QeErrorLine] = []
    severity: Severity | None = None
    saw_section = False
    saw_no_error = False
    for raw in response.splitlines():
        if not raw.strip():
            continue
        header = _HEADER_RE.match(raw)
        if header:
            severity = Severity(header.group(1).lower())
            saw_section = True
            continue
        if _NO_ERROR_RE.match(raw):
            saw_no_error = True
            continue
        entry = _ERROR_LINE_RE.match(raw)
        if entry and severity is not None:
            lines.append(QeErrorLine(severity, entry.group("category"), entry.group("quote")))
        else:
            logger.warning("skipping unparseable response line: %r", raw)
    if not saw_section and not saw_no_error and response.strip():
        logger.warning("response contained no parseable severity section")
    return lines


def format_error_list(lines: list[QeErrorLine]) -> str:
    """Render error lines back into the response grammar (parse round-trips)."""
    out = []
    current: Severity | None = None
    for line in lines:
        if line.severity is not current:
            out.append(f"{line.severity.value.capitalize()}:")
            current = line.severity
        out.append(f'{line.category} - "{line.quote}"')
    return "\n".join(out) if out else "no-error"


_OMISSION_PREFIX = "accuracy/omission"


def locate_spans(lines: list[QeErrorLine], target_display_text: str) -> list[ErrorSpan]:
    """Map quoted substrings to AI-origin character spans on the display text.

    Each quote takes its first occurrence not already consumed by an earlier
    line, so duplicate quotes advance through the text. Omission quotes that
    never occur in the translation land on the [MISSING] token; any other
    unlocatable quote is dropped with a warning; pre-fill never blocks
    annotation.
    """
    region = missing_region(target_display_text)
    if region is None:
        raise ValueError("display text lacks the [MISSING] suffix")
    target_text = target_display_text[: region[0]]
    consumed: set[tuple[int, int]] = set()
    spans = []
    for line in lines:
        interval = _first_free_occurrence(target_text, line.quote, consumed)
        if interval is not None:
            consumed.add(interval)
            spans.append(ErrorSpan(interval[0], interval[1], line.severity, SpanOrigin.AI))
        elif line.category.startswith(_OMISSION_PREFIX):
            start, end = missing_token_span(target_display_text)
            spans.append(ErrorSpan(start, end, line.severity, SpanOrigin.AI, on_missing=True))
        else:
            logger.warning("could not locate quote %r in translation; span dropped", line.quote)
    return spans


def _first_free_occurrence(text: str, quote: str, consumed: set) -> tuple[int, int] | None:
    if not quote:
        return None
    idx = text.find(quote)
    while idx != -1:
        interval = (idx, idx + len(quote))
        if interval not in consumed:
            return interval
        idx = text.find(quote, idx + 1)
    return None
