"""Service and CLI configuration.

Read order: explicit path, then the CHAI_CONFIG environment variable,
then ./chai.config.json if present, then built-in defaults. The
CHAI_DATA_DIR environment variable overrides the data directory either
way. Remote-agent auth is never configured here; it comes from
CHAI_AGENT_TOKEN at request time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .agents import AgentProfile
from .errors import ValidationError
from .parsing import DEFAULT_DISCLAIMER_CUES

CONFIG_ENV = "CHAI_CONFIG"
DATA_DIR_ENV = "CHAI_DATA_DIR"
DEFAULT_CONFIG_NAME = "chai.config.json"

_KNOWN_KEYS = {"data_dir", "api_token", "disclaimer_cues", "agent"}
_KNOWN_AGENT_KEYS = {
    "provider",
    "transcript",
    "endpoint",
    "model",
    "temperature",
    "timeout_seconds",
    "max_retries",
}


@dataclass
class ServiceConfig:
    data_dir: Path = Path("chai-data")
    api_token: str | None = None
    disclaimer_cues: tuple[str, ...] = DEFAULT_DISCLAIMER_CUES
    agent: dict = field(default_factory=lambda: {"provider": "manual"})

    def agent_profile(self, spec: str | None = None) -> AgentProfile:
        """Resolve an agent spec string ("manual", "remote", "scripted:PATH")
        against the configured defaults."""
        settings = dict(self.agent)
        provider = settings.get("provider", "manual")
        transcript = settings.get("transcript")
        if spec:
            if spec.startswith("scripted:"):
                provider, transcript = "scripted", spec.split(":", 1)[1]
            elif spec in ("manual", "remote", "scripted"):
                provider = spec
            else:
                raise ValidationError(
                    f"unknown agent spec {spec!r} (expected manual, remote, or scripted:PATH)"
                )
        return AgentProfile(
            provider=provider,
            transcript_path=transcript,
            endpoint=settings.get("endpoint"),
            model=settings.get("model"),
            temperature=float(settings.get("temperature", 0.0)),
            timeout_seconds=float(settings.get("timeout_seconds", 30.0)),
            max_retries=int(settings.get("max_retries", 2)),
        )


def load_config(path: str | Path | None = None) -> ServiceConfig:
    """Load configuration, applying environment overrides."""
    resolved: Path | None = None
    if path is not None:
        resolved = Path(path)
        if not resolved.exists():
            raise ValidationError(f"config file not found: {resolved}")
    elif os.environ.get(CONFIG_ENV):
        resolved = Path(os.environ[CONFIG_ENV])
        if not resolved.exists():
            raise ValidationError(f"config file not found: {resolved}")
    elif Path(DEFAULT_CONFIG_NAME).exists():
        resolved = Path(DEFAULT_CONFIG_NAME)

    config = ServiceConfig()
    if resolved is not None:
        try:
            doc = json.loads(resolved.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValidationError("config must be a JSON object")
        unknown = set(doc) - _KNOWN_KEYS
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "data_dir" in doc:
            config.data_dir = Path(str(doc["data_dir"]))
        if "api_token" in doc and doc["api_token"] is not None:
            config.api_token = str(doc["api_token"])
        if "disclaimer_cues" in doc:
            cues = doc["disclaimer_cues"]
            if not isinstance(cues, list) or any(not isinstance(c, str) for c in cues):
                raise ValidationError("disclaimer_cues must be a list of strings")
            config.disclaimer_cues = tuple(cues)
        if "agent" in doc:
            agent = doc["agent"]
            if not isinstance(agent, dict):
                raise ValidationError("agent must be an object")
            unknown = set(agent) - _KNOWN_AGENT_KEYS
            if unknown:
                raise ValidationError(f"unknown agent config keys: {sorted(unknown)}")
            config.agent = agent

    if os.environ.get(DATA_DIR_ENV):
        config.data_dir = Path(os.environ[DATA_DIR_ENV])
    return config
