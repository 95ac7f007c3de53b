"""Campaign configuration: a flat key=value text file.

Example::

    run_id = esaai-demo
    systems = systemA, systemB
    segments_per_annotator = 20
    check_rate = 12
    seed = 1
    source_lang = English
    target_lang = German
    qe_provider = mock
    qe_responses_dir = qe-responses

Unknown keys and malformed lines are rejected with their line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

QE_PROVIDERS = ("none", "mock", "http")


@dataclass(frozen=True)
class CampaignConfig:
    run_id: str
    systems: tuple[str, ...]
    source_lang: str
    target_lang: str
    segments_per_annotator: int = 20
    check_rate: float = 12.0  # checks per 100 segments; 0 disables injection
    seed: int = 0
    qe_provider: str = "none"
    qe_responses_dir: Optional[str] = None  # canned responses for the mock
    qe_url: Optional[str] = None
    qe_token_env: str = "ESA_QE_TOKEN"
    qe_cache_dir: Optional[str] = None

    def __post_init__(self):
        if not self.systems:
            raise ValueError("systems must be nonempty")
        if self.segments_per_annotator < 1:
            raise ValueError("segments_per_annotator must be at least 1")
        if not 0 <= self.check_rate < 100:
            raise ValueError("check_rate must be in [0, 100)")
        if self.qe_provider not in QE_PROVIDERS:
            raise ValueError(f"qe_provider must be one of {QE_PROVIDERS}")
        if self.qe_provider == "mock" and not self.qe_responses_dir:
            raise ValueError("qe_provider=mock requires qe_responses_dir")
        if self.qe_provider == "http" and not self.qe_url:
            raise ValueError("qe_provider=http requires qe_url")

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "systems": list(self.systems),
            "source_lang": self.source_lang,
            "target_lang": self.target_lang,
            "segments_per_annotator": self.segments_per_annotator,
            "check_rate": self.check_rate,
            "seed": self.seed,
            "qe_provider": self.qe_provider,
            "qe_responses_dir": self.qe_responses_dir,
            "qe_url": self.qe_url,
            "qe_token_env": self.qe_token_env,
            "qe_cache_dir": self.qe_cache_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        return cls(
            run_id=data["run_id"],
            systems=tuple(data["systems"]),
            source_lang=data["source_lang"],
            target_lang=data["target_lang"],
            segments_per_annotator=data["segments_per_annotator"],
            check_rate=data["check_rate"],
            seed=data["seed"],
            qe_provider=data["qe_provider"],
            qe_responses_dir=data.get("qe_responses_dir"),
            qe_url=data.get("qe_url"),
            qe_token_env=data.get("qe_token_env", "ESA_QE_TOKEN"),
            qe_cache_dir=data.get("qe_cache_dir"),
        )


_STRING_KEYS = {
    "run_id",
    "source_lang",
    "target_lang",
    "qe_provider",
    "qe_responses_dir",
    "qe_url",
    "qe_token_env",
    "qe_cache_dir",
}
_INT_KEYS = {"segments_per_annotator", "seed"}
_FLOAT_KEYS = {"check_rate"}
_REQUIRED = {"run_id", "systems", "source_lang", "target_lang"}


def load_config(path: str | Path) -> CampaignConfig:
    path = Path(path)
    values: dict = {}
    with path.open(encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{number}: expected 'key = value'")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key in values:
                raise ValueError(f"{path}:{number}: duplicate key {key!r}")
            if key == "systems":
                values[key] = tuple(s.strip() for s in value.split(",") if s.strip())
            elif key in _INT_KEYS:
                try:
                    values[key] = int(value)
                except ValueError:
                    raise ValueError(f"{path}:{number}: {key} must be an integer") from None
            elif key in _FLOAT_KEYS:
                try:
                    values[key] = float(value)
                except ValueError:
                    raise ValueError(f"{path}:{number}: {key} must be a number") from None
            elif key in _STRING_KEYS:
                values[key] = value
            else:
                raise ValueError(f"{path}:{number}: unknown key {key!r}")
    missing = _REQUIRED - set(values)
    if missing:
        raise ValueError(f"{path}: missing required keys: {', '.join(sorted(missing))}")
    return CampaignConfig(**values)
