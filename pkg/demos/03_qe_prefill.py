"""
Quality-estimation pre-fill with the offline mock
=================================================

The QE provider is text-in/text-out. Prompts render from a fixed one-shot
template; responses list severity sections with quoted error text. The mock
provider answers from canned files keyed by a hash of the prompt, which is
also how campaigns stay byte-identical across rebuilds.
"""

import tempfile
from pathlib import Path

from esakit.model import SegmentTask
from esakit.qe import (
    MockProvider,
    QeRequest,
    parse_error_list,
    prefill_segment,
    render_error_prompt,
    save_canned_response,
)

task = SegmentTask(
    segment_id="demo::item7",
    item_id="item7",
    document_id="demo::doc2",
    system_id="demo",
    source_text="Die Sitzung beginnt um neun Uhr.",
    target_text="The session begins at nine o'clock sharp.",
)

request = QeRequest(
    source_lang="German",
    target_lang="English",
    source_seg=task.source_text,
    target_seg=task.target_text,
)
prompt = render_error_prompt(request)
print("prompt tail:")
print("\n".join(prompt.splitlines()[-6:]))
print()

response = 'Minor:\nstyle - "sharp"'
print("canned response parses to:", parse_error_list(response))

with tempfile.TemporaryDirectory() as tmp:
    canned = Path(tmp) / "responses"
    save_canned_response(canned, prompt, response)
    provider = MockProvider(canned)

    prefilled = prefill_segment(
        task, provider, source_lang="German", target_lang="English"
    )
    for span in prefilled.prefill_spans:
        quoted = task.target_text[span.start:span.end]
        print(f"pre-fill: [{span.start}:{span.end}] {span.severity.value} {quoted!r}")
