"""Quality-estimation pre-fill: prompt rendering, response parsing, span
localization, and pluggable completion providers."""

from .prompts import (
    QeErrorLine,
    QeRequest,
    format_error_list,
    locate_spans,
    parse_error_list,
    render_error_prompt,
    render_score_prompt,
)
from .provider import (
    CachingProvider,
    HttpProvider,
    MockProvider,
    ProviderError,
    QeProvider,
    request_hash,
    save_canned_response,
)
from .prefill import prefill_segment

__all__ = [
    "QeErrorLine",
    "QeRequest",
    "format_error_list",
    "locate_spans",
    "parse_error_list",
    "render_error_prompt",
    "render_score_prompt",
    "CachingProvider",
    "HttpProvider",
    "MockProvider",
    "ProviderError",
    "QeProvider",
    "request_hash",
    "save_canned_response",
    "prefill_segment",
]
