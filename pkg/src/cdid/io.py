"""File formats: CDID1 complex fields, binary PGM images, metric CSVs and run manifests.

CDID1 layout (little endian)::

    b"CDID1" | u32 height | u32 width | u8 dtype (0 = float64 pairs) | payload

The payload holds ``height * width`` interleaved ``(re, im)`` float64 pairs in
row-major order.
"""
from __future__ import annotations

import csv
import hashlib
import json
import platform
import struct
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

__all__ = [
    "FormatError",
    "write_field",
    "read_field",
    "load_gray_image",
    "write_pgm",
    "sha256_file",
    "RunManifest",
    "METRIC_COLUMNS",
    "write_metric_csv",
    "read_metric_csv",
    "write_boxplot_csv",
]

MAGIC = b"CDID1"
HEADER = struct.Struct("<5sIIB")
MAX_SIDE = 1 << 16
DTYPES = {0: np.dtype("<f8")}

METRIC_COLUMNS = ["image", "sigma_phi", "algorithm", "run", "psnr_phi", "psnr_ampl",
                  "rmse_phi_abs", "rmse_a", "snr_c", "snr_phi_abs"]


class FormatError(ValueError):
    """Malformed input file. ``code`` is a short machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def write_field(field_, path) -> None:
    f = np.asarray(field_)
    if f.ndim != 2:
        raise ValueError("field must be 2-D")
    h, w = f.shape
    if not (1 <= h <= MAX_SIDE and 1 <= w <= MAX_SIDE):
        raise ValueError(f"field sides must lie in [1, {MAX_SIDE}], got {f.shape}")
    pairs = np.empty((h, w, 2), dtype="<f8")
    pairs[..., 0] = f.real
    pairs[..., 1] = f.imag if np.iscomplexobj(f) else 0.0
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, h, w, 0))
        fh.write(pairs.tobytes())


def read_field(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < HEADER.size or data[:5] != MAGIC:
        raise FormatError("bad_magic", f"{path} is not a CDID1 field file")
    _, h, w, tag = HEADER.unpack_from(data)
    if tag not in DTYPES:
        raise FormatError("unsupported_dtype", f"dtype tag {tag} in {path}")
    if not (1 <= h <= MAX_SIDE and 1 <= w <= MAX_SIDE):
        raise FormatError("bad_dims", f"{h}x{w} in {path}")
    dt = DTYPES[tag]
    need = 2 * h * w * dt.itemsize
    payload = data[HEADER.size:]
    if len(payload) < need:
        raise FormatError("truncated_payload", f"{path}: {len(payload)} of {need} payload bytes")
    if len(payload) > need:
        raise FormatError("trailing_bytes", f"{path}: {len(payload) - need} bytes past the payload")
    # a dtype view keeps every bit, signed zeros and NaN payloads included
    return np.frombuffer(payload, dtype=dt).astype("=f8").view(np.complex128).reshape(h, w)


def _pnm_tokens(data: bytes, count: int):
    """First ``count`` header tokens of a netpbm file and the payload offset."""
    tokens, i = [], 0
    while len(tokens) < count:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        if j == i:
            raise FormatError("bad_pgm", "truncated header")
        tokens.append(data[i:j])
        i = j
    return tokens, i + 1  # a single whitespace byte ends the header


def load_gray_image(path, normalize: bool = True) -> np.ndarray:
    """Binary (P5) PGM, 8 or 16 bit. ``normalize`` scales by ``maxval`` to [0, 1]."""
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic in (b"P6", b"P3"):
        raise FormatError("color_image", f"{path} is a color PPM; convert to grayscale P5")
    if magic != b"P5":
        raise FormatError("not_pgm", f"{path} is not a binary PGM (P5)")
    (_, w, h, maxval), off = _pnm_tokens(data, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval < 65536:
        raise FormatError("bad_pgm", f"maxval {maxval}")
    dt = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    need = w * h * dt.itemsize
    if len(data) - off < need:
        raise FormatError("truncated_payload", f"{path}: pixel data truncated")
    img = np.frombuffer(data, dtype=dt, count=w * h, offset=off).reshape(h, w).astype(float)
    return img / maxval if normalize else img


def write_pgm(img, path, maxval: int = 255) -> None:
    """Write a real image as 8/16-bit P5, min-max scaled to ``[0, maxval]``."""
    a = np.asarray(img, dtype=float)
    lo, hi = float(a.min()), float(a.max())
    scaled = np.zeros_like(a) if hi == lo else (a - lo) / (hi - lo)
    q = np.round(scaled * maxval)
    dt = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{a.shape[1]} {a.shape[0]}\n{maxval}\n".encode())
        fh.write(q.astype(dt).tobytes())


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int | None = None
    inputs: dict = field(default_factory=dict)  # path -> sha256
    timing: dict = field(default_factory=dict)  # step -> seconds
    version: str = __version__
    python: str = field(default_factory=platform.python_version)
    numpy: str = np.__version__
    created: float = field(default_factory=time.time)

    def digest(self) -> str:
        """Hash of everything that determines the results (not the timings)."""
        key = {"command": self.command, "config": self.config, "seed": self.seed,
               "inputs": self.inputs, "version": self.version}
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]

    def write(self, path) -> None:
        d = asdict(self)
        d["digest"] = self.digest()
        Path(path).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_metric_csv(rows, path, extra_columns=()) -> None:
    cols = METRIC_COLUMNS + [c for c in extra_columns if c not in METRIC_COLUMNS]
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore", lineterminator="\r\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: _fmt(r.get(k, "")) for k in cols})


def read_metric_csv(path) -> list[dict]:
    """Rows of a metric CSV; numeric columns are parsed, unknown columns kept as text."""
    out = []
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        missing = [c for c in ("image", "sigma_phi", "algorithm") if c not in (rd.fieldnames or [])]
        if missing:
            raise FormatError("bad_csv", f"{path} lacks columns {missing}")
        for r in rd:
            row = dict(r)
            for c in METRIC_COLUMNS[3:] + ["sigma_phi"]:
                if row.get(c) not in (None, ""):
                    row[c] = int(row[c]) if c == "run" else float(row[c])
            out.append(row)
    return out


def write_boxplot_csv(stats: dict, path, metric: str) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\r\n")
        wr.writerow(["metric", "algorithm", "n", "min", "q25", "median", "q75", "max"])
        for algo, s in stats.items():
            wr.writerow([metric, algo, s["n"]] + [repr(s[k]) for k in ("min", "q25", "median", "q75", "max")])
