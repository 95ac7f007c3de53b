"""Deterministic campaign exports."""

from __future__ import annotations

from pathlib import Path

from .service import CampaignService


def export_campaign(campaign_dir: str | Path, out_dir: str | Path | None = None) -> Path:
    """Write the canonical three-file export; returns the directory written.

    Repeated exports of the same state are byte-identical: records are
    sorted and the writer is separator-stable.
    """
    campaign_dir = Path(campaign_dir)
    out_dir = Path(out_dir) if out_dir is not None else campaign_dir / "export"
    service = CampaignService(campaign_dir)
    service.export().write(out_dir)
    return out_dir
