"""Run manifests: a reproducibility record next to every produced artifact."""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

from . import __version__


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def build_manifest(command: str, config: dict, inputs, outputs) -> dict:
    return {
        "tool": "aspectkit",
        "version": __version__,
        "command": command,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": config,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }


def write_manifest(manifest: dict, artifact_path) -> Path:
    """Write <artifact>.manifest.json next to the artifact it describes."""
    path = Path(str(artifact_path) + ".manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
