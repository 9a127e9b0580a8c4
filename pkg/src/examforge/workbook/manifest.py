"""Canonical text form of a workbook model."""
from __future__ import annotations

import json


def emit_manifest(model) -> str:
    """Byte-stable JSON; two models are equal iff their manifests are."""
    return json.dumps(model.to_dict(), sort_keys=True, indent=1, ensure_ascii=False) + "\n"
