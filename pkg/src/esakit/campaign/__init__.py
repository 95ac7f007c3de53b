from .records import Export, read_segments_input
from .config import CampaignConfig, load_config
from .build import build_campaign
from .service import CampaignService, Done
from .export import export_campaign

__all__ = [
    "Export",
    "read_segments_input",
    "CampaignConfig",
    "load_config",
    "build_campaign",
    "CampaignService",
    "Done",
    "export_campaign",
]
