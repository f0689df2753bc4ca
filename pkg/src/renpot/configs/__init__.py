"""Example scenario and turbine configurations shipped with the package."""

from __future__ import annotations

import json
from importlib import resources


def list_configs(kind: str) -> list[str]:
    """Names of the example configs in ``onshore``, ``offshore``, ``open_field_pv`` or ``turbines``."""
    return sorted(p.name for p in resources.files(__name__).joinpath(kind).iterdir() if p.name.endswith(".json"))


def load_config(kind: str, name: str) -> dict:
    if not name.endswith(".json"):
        name += ".json"
    return json.loads(resources.files(__name__).joinpath(kind, name).read_text(encoding="utf-8"))
