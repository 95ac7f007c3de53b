"""
A campaign end to end, no HTTP involved
=======================================

build -> register annotators -> claim/submit -> export -> report. The same
flow is available over HTTP (`esa campaign serve`) and through the CLI; this
script drives the library directly so every step is visible.
"""

import tempfile
from pathlib import Path

from esakit.campaign.build import build_campaign
from esakit.campaign.config import CampaignConfig
from esakit.campaign.export import export_campaign
from esakit.campaign.records import Export, InputSegment, write_segments_input
from esakit.campaign.service import DONE, CampaignService
from esakit.qe import MockProvider
from esakit.reports import rank_lines, summary_report

config = CampaignConfig(
    run_id="demo-run",
    systems=("modelX", "modelY"),
    source_lang="English",
    target_lang="German",
    segments_per_annotator=10,
    check_rate=10.0,
    seed=42,
)

rows = [
    InputSegment(
        document_id=f"doc{i // 5}",
        item_id=f"item{i:02d}",
        system_id=system,
        source_text=f"Source sentence {i}.",
        target_text=f"Translation {i} from {system} with a few filler words.",
    )
    for system in config.systems
    for i in range(10)
]

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    write_segments_input(root / "input.tsv", rows)

    # the mock provider stands in for the QE model; a single default response
    # pre-fills one minor span on every segment
    provider = MockProvider(root / "canned", default='Minor:\naccuracy - "Translation"')
    campaign = build_campaign(config, root / "input.tsv", root / "camp", provider=provider)
    print(f"built {len(campaign.tasks)} tasks in {len(campaign.batches)} batches")

    service = CampaignService(root / "camp")
    for annotator, harshness in (("rater1", 0), ("rater2", 15)):
        batch = service.register(annotator)
        print(f"{annotator} gets {batch}")
        while (task := service.claim_next(annotator)) is not DONE:
            # accept whatever the QE suggested, score by system quality
            score = (80 if task.system_id == "modelX" else 65) - harshness
            service.submit(
                annotator, task.segment_id, task.prefill_spans, score, client_elapsed=25.0
            )

    export_dir = export_campaign(root / "camp")
    export = Export.read(export_dir)
    print(f"exported {len(export.annotations)} annotations to {export_dir.name}/\n")

    for line in summary_report(export)[0]:
        print(line)
    print()
    for line in rank_lines(export, scoring="direct", alpha=0.05)[0]:
        print(line)
