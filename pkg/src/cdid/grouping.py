"""Patch extraction, block matching and reference-patch scheduling."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "PatchGroup",
    "as_field",
    "extract_patch",
    "patch_distance",
    "reference_positions",
    "match_group",
    "match_groups",
]


@dataclass
class PatchGroup:
    """``J`` matched ``n1 x n2`` patches stacked along the last axis."""

    patches: np.ndarray  # (n1, n2, J) complex
    coords: np.ndarray  # (J, 2) upper-left (row, col)
    ref_index: int = 0
    distances: np.ndarray = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.patches.shape[-1]


def as_field(data, n1: int = 1, n2: int = 1) -> np.ndarray:
    """Validate a 2-D complex field at least ``n1 x n2`` in size."""
    f = np.asarray(data)
    if f.ndim != 2:
        raise ValueError(f"field must be 2-D, got shape {f.shape}")
    if f.shape[0] < n1 or f.shape[1] < n2:
        raise ValueError(f"field {f.shape} smaller than patch {n1}x{n2}")
    if not np.all(np.isfinite(f)):
        raise ValueError("field contains NaN or Inf")
    return f.astype(complex, copy=False)


def extract_patch(f, row: int, col: int, n1: int, n2: int) -> np.ndarray:
    f = np.asarray(f)
    if row < 0 or col < 0 or row + n1 > f.shape[0] or col + n2 > f.shape[1]:
        raise IndexError(f"patch ({row}, {col}, {n1}, {n2}) outside field {f.shape}")
    return f[row:row + n1, col:col + n2].copy()


def patch_distance(p, q) -> float:
    """Euclidean distance between two complex patches."""
    p = np.asarray(p)
    q = np.asarray(q)
    if p.shape != q.shape:
        raise ValueError(f"patch shapes differ: {p.shape} vs {q.shape}")
    d = p - q
    return float(np.sqrt(np.sum(d.real ** 2 + d.imag ** 2)))


def _axis_positions(extent: int, n: int, step: int) -> np.ndarray:
    last = extent - n
    pos = list(range(0, last + 1, step))
    if pos[-1] != last:
        pos.append(last)
    return np.asarray(pos, dtype=np.intp)


def reference_positions(height: int, width: int, cfg) -> list[tuple[int, int]]:
    """Raster scan of reference patches; the last row/column offset is always included."""
    rows = _axis_positions(height, cfg.n1, cfg.step)
    cols = _axis_positions(width, cfg.n2, cfg.step)
    return [(int(r), int(c)) for r in rows for c in cols]


def _window_offsets(half: int) -> np.ndarray:
    d = np.arange(-half, half + 1)
    dy, dx = np.meshgrid(d, d, indexing="ij")
    return np.stack([dy.ravel(), dx.ravel()], axis=1)


@njit(cache=True)
def _distance_kernel(fr, fi, rows, cols, n1, n2, half, out):  # pragma: no cover - compiled
    h, w = fr.shape
    y0 = rows[0]
    y1 = rows[rows.size - 1] + n1
    nb = y1 - y0
    d2 = np.empty((nb, w))
    colsum = np.empty((nb, cols.size))
    o = 0
    for dy in range(-half, half + 1):
        for dx in range(-half, half + 1):
            for y in range(nb):
                yy = y0 + y
                for x in range(w):
                    if 0 <= yy + dy < h and 0 <= x + dx < w:
                        a = fr[yy, x] - fr[yy + dy, x + dx]
                        b = fi[yy, x] - fi[yy + dy, x + dx]
                        d2[y, x] = a * a + b * b
                    else:
                        d2[y, x] = 0.0
                for k in range(cols.size):
                    s = 0.0
                    for j in range(n2):
                        s += d2[y, cols[k] + j]
                    colsum[y, k] = s
            for i in range(rows.size):
                r = rows[i]
                row_ok = 0 <= r + dy <= h - n1
                for k in range(cols.size):
                    c = cols[k]
                    if row_ok and 0 <= c + dx <= w - n2:
                        s = 0.0
                        for q in range(n1):
                            s += colsum[r - y0 + q, k]
                        out[i, k, o] = s
                    else:
                        out[i, k, o] = np.inf
            o += 1


def window_distances(f: np.ndarray, rows, cols, n1: int, n2: int, half: int) -> np.ndarray:
    """Squared patch distances from every reference in ``rows x cols`` to
    every candidate in its search window.

    Returns ``(len(rows), len(cols), (2*half+1)**2)``; candidates are ordered
    raster-wise by offset and out-of-field candidates are ``inf``. Sums only
    add nonnegative terms, so identical patches are at distance exactly 0.
    ``rows`` must be sorted.
    """
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    out = np.empty((rows.size, cols.size, (2 * half + 1) ** 2))
    f = np.asarray(f, dtype=complex)
    _distance_kernel(np.ascontiguousarray(f.real), np.ascontiguousarray(f.imag),
                     rows, cols, n1, n2, half, out)
    return out


def _smallest_stable(dist: np.ndarray, k: int) -> np.ndarray:
    """Column indices of the ``k`` smallest entries per row, sorted by
    (value, column). Equivalent to a stable argsort truncated to ``k``."""
    n = dist.shape[1]
    if k >= n:
        return np.argsort(dist, axis=1, kind="stable")
    part = np.argpartition(dist, k - 1, axis=1)[:, :k]
    vals = np.take_along_axis(dist, part, axis=1)
    kth = vals.max(axis=1, keepdims=True)
    tied = np.count_nonzero(dist <= kth, axis=1) > k
    order = np.lexsort((part, vals), axis=1)
    out = np.take_along_axis(part, order, axis=1)
    for i in np.flatnonzero(tied):
        out[i] = np.argsort(dist[i], kind="stable")[:k]
    return out


def match_groups(f: np.ndarray, rows, cols, cfg):
    """Block matching for the reference grid ``rows x cols``.

    Returns ``(coords, dist2, sizes)``: ``coords`` is (G, J_max, 2) in raster
    order of references, ``dist2`` the matching squared distances and
    ``sizes`` the per-group count ``J_r`` (entries past ``J_r`` are padding).
    The reference is always first; the rest follow by (distance, raster order).
    """
    half = cfg.search_window // 2
    dist = window_distances(f, rows, cols, cfg.n1, cfg.n2, half)
    g = dist.shape[0] * dist.shape[1]
    dist = dist.reshape(g, -1)
    centre = dist.shape[1] // 2
    dist[:, centre] = -1.0  # pin the reference in front
    n_valid = np.count_nonzero(np.isfinite(dist), axis=1)
    sizes = np.minimum(n_valid, cfg.j_max)
    jm = int(sizes.max())
    order = _smallest_stable(dist, jm)
    d2 = np.take_along_axis(dist, order, axis=1)
    d2[:, 0] = 0.0
    offsets = _window_offsets(half)[order]  # (G, jm, 2)
    ref = np.stack(np.meshgrid(rows, cols, indexing="ij"), axis=-1).reshape(g, 1, 2)
    coords = ref + offsets
    pad = np.arange(jm)[None, :] >= sizes[:, None]
    if pad.any():
        coords = np.where(pad[..., None], ref, coords)
        d2[pad] = np.inf
    return coords, d2, sizes


def match_group(f, ref_row: int, ref_col: int, cfg) -> PatchGroup:
    """Group of the ``J_max`` patches nearest to the reference patch."""
    f = as_field(f, cfg.n1, cfg.n2)
    h, w = f.shape
    if not (0 <= ref_row <= h - cfg.n1 and 0 <= ref_col <= w - cfg.n2):
        raise IndexError(f"reference ({ref_row}, {ref_col}) outside field {f.shape}")
    coords, d2, sizes = match_groups(f, [ref_row], [ref_col], cfg)
    j = int(sizes[0])
    coords = coords[0, :j]
    view = sliding_window_view(f, (cfg.n1, cfg.n2))
    patches = np.moveaxis(view[coords[:, 0], coords[:, 1]], 0, -1).copy()
    return PatchGroup(patches=patches, coords=coords, ref_index=0,
                      distances=np.sqrt(d2[0, :j]))
