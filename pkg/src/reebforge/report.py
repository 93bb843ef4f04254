"""Canonical JSON reports: sorted keys, fixed indentation, trailing newline."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Dict, Mapping, Optional

from . import __version__
from .io import atomic_write

TOOL = "reebforge"


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_report(command: str, args: Mapping, inputs: Mapping[str, str], result: Mapping,
                 passed: bool) -> Dict:
    """``inputs`` maps a role name to a file path (or a ``builtin:`` name)."""
    digests = {}
    for role, src in inputs.items():
        if src is None:
            continue
        digests[role] = {"source": str(src), "sha256": None if str(src).startswith("builtin:") else digest(src)}
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "arguments": dict(args),
        "inputs": digests,
        "result": result,
        "pass": bool(passed),
    }


def dumps(report: Mapping) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def emit(report: Mapping, path: Optional[str] = None, stream=None) -> str:
    text = dumps(report)
    if path:
        atomic_write(path, text)
    elif stream is not None:
        stream.write(text)
    return text
