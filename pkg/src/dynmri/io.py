"""Deterministic on-disk formats.

* raw complex arrays: little-endian float64 (re, im) interleaved pairs,
  row-major, frames concatenated, with a JSON sidecar carrying dims,
  dtype tag and a sha256 content hash
* magnitude images: 16-bit binary PGM (P5), per-file min/max returned for
  the manifest
* CSV tables (one header row) and canonical sorted-key JSON
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .core import KSpaceData
from .operators import SamplingPattern
from .regularization import SubgradientField

RAW_DTYPE_TAG = "complex128-le-interleaved"


def sha256_bytes(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def file_sha256(path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_json(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def write_complex(path, arr, meta: dict | None = None) -> dict:
    """Write a complex array in the raw format; returns the sidecar dict."""
    path = Path(path)
    arr = np.ascontiguousarray(arr, dtype="<c16")
    payload = arr.tobytes()
    sidecar = {
        "dtype": RAW_DTYPE_TAG,
        "shape": list(arr.shape),
        "sha256": sha256_bytes(payload),
    }
    if meta:
        sidecar.update(meta)
    path.write_bytes(payload)
    write_json(str(path) + ".json", sidecar)
    return sidecar


def read_complex(path) -> tuple[np.ndarray, dict]:
    """Read a raw complex array, verifying the sidecar hash and shape."""
    path = Path(path)
    sidecar = read_json(str(path) + ".json")
    if sidecar.get("dtype") != RAW_DTYPE_TAG:
        raise ValueError(f"{path}: unexpected dtype tag {sidecar.get('dtype')!r}")
    payload = path.read_bytes()
    if sha256_bytes(payload) != sidecar["sha256"]:
        raise ValueError(f"{path}: content hash mismatch")
    arr = np.frombuffer(payload, dtype="<c16").reshape(sidecar["shape"])
    return arr.astype(np.complex128), sidecar


def write_pgm16(path, image) -> tuple[float, float]:
    """Write a real image as 16-bit binary PGM; returns (min, max) used for
    the scaling so the manifest can record them."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"expected a 2d image, got shape {img.shape}")
    vmin = float(img.min())
    vmax = float(img.max())
    span = vmax - vmin
    if span > 0:
        scaled = np.rint((img - vmin) / span * 65535.0).astype(">u2")
    else:
        scaled = np.zeros(img.shape, dtype=">u2")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + scaled.tobytes())
    return vmin, vmax


def read_pgm16(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        end = data.index(b"\n", pos)
        fields.extend(data[pos:end].split())
        pos = end + 1
    if fields[0] != b"P5" or int(fields[3]) != 65535:
        raise ValueError(f"{path}: not a 16-bit P5 PGM")
    width, height = int(fields[1]), int(fields[2])
    return np.frombuffer(data[pos:], dtype=">u2").reshape(height, width)


def write_pattern(path, pattern: SamplingPattern) -> None:
    write_json(
        path,
        {
            "shape": list(pattern.shape),
            "frames": [
                {
                    "indices": idx.tolist(),
                    "angles_deg": ang.tolist(),
                }
                for idx, ang in zip(pattern.frame_indices, pattern.frame_angles)
            ],
        },
    )


def read_pattern(path) -> SamplingPattern:
    obj = read_json(path)
    return SamplingPattern(
        tuple(obj["shape"]),
        tuple(np.asarray(f["indices"], dtype=np.int64) for f in obj["frames"]),
        tuple(np.asarray(f["angles_deg"], dtype=float) for f in obj["frames"]),
    )


def write_kspace(path, data: KSpaceData, pattern_file: str) -> dict:
    return write_complex(
        path,
        data.concatenated(),
        meta={
            "frame_lengths": [int(c) for c in data.pattern.sample_counts],
            "pattern_file": pattern_file,
        },
    )


def read_kspace(path, pattern: SamplingPattern) -> KSpaceData:
    flat, sidecar = read_complex(path)
    lengths = sidecar["frame_lengths"]
    if list(pattern.sample_counts) != list(lengths):
        raise ValueError(f"{path}: frame lengths do not match the pattern")
    offsets = np.concatenate(([0], np.cumsum(lengths))).astype(int)
    frames = tuple(
        flat[offsets[t] : offsets[t + 1]] for t in range(len(lengths))
    )
    return KSpaceData(frames, pattern)


def write_subgradient(path, sub: SubgradientField) -> dict:
    stack = np.stack([sub.q0[0], sub.q0[1], sub.p0])
    return write_complex(path, stack, meta={"eta": sub.eta, "planes": ["q0_x", "q0_y", "p0"]})


def read_subgradient(path) -> SubgradientField:
    stack, sidecar = read_complex(path)
    if stack.shape[0] != 3:
        raise ValueError(f"{path}: expected 3 planes, got {stack.shape[0]}")
    return SubgradientField(
        q0=np.stack([stack[0], stack[1]]), p0=stack[2], eta=float(sidecar["eta"])
    )


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]
