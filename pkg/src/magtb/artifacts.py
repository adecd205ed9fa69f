"""CSV/JSON artifact writers with config-hash metadata.

Every artifact embeds the command name and a hash of the generating config,
so a rerun with the same config overwrites the file identically except for
the timestamp line (the one deliberately non-reproducible byte; consumers
and the determinism test ignore it).
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import numpy as np


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _meta_lines(command: str, config: dict) -> list[str]:
    return [
        f"# command={command}",
        f"# config_hash={config_hash(config)}",
        f"# timestamp={time.strftime('%Y-%m-%dT%H:%M:%S')}",
    ]


def write_csv(path, command: str, config: dict, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = _meta_lines(command, config)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return repr(float(x))
    return str(x)


def write_json(path, command: str, config: dict, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "command": command,
        "config_hash": config_hash(config),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2, default=_json_default) + "\n")
    return path


def _json_default(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not JSON-serializable: {type(x)}")


def complex_matrix_payload(m: np.ndarray) -> dict:
    """Row-major [re, im] pairs, the wire format for operator dumps."""
    m = np.asarray(m)
    return {
        "shape": list(m.shape),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def read_csv(path) -> tuple[list[str], np.ndarray, dict]:
    """Read an artifact CSV back: (header, float data, metadata)."""
    meta = {}
    header = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            if "=" in line:
                k, v = line[1:].strip().split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        if not line.strip():
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        rows.append([float(c) for c in line.split(",")])
    return header or [], np.asarray(rows, dtype=float), meta
