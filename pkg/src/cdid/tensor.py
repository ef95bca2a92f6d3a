"""Dense order-2..4 tensors, mode products, SVD and full (untruncated) HOSVD.

Tensors are plain ``numpy.ndarray`` objects. The mode-``k`` unfolding puts
mode ``k`` on the rows; the columns run over the remaining modes in increasing
order with the earliest remaining mode varying fastest (Kolda-Bader layout).

Every routine here comes in a single-tensor form (the public API) and a
batched form (``*_batch``) that carries a leading group axis. The filters use
the batched form so thousands of small groups go through LAPACK at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SvdConvergenceError",
    "HosvdFactors",
    "as_tensor",
    "unfold",
    "refold",
    "mode_product",
    "complex_svd",
    "hosvd",
    "hosvd_synthesis",
    "hosvd_batch",
    "analysis_batch",
    "synthesis_batch",
]


class SvdConvergenceError(RuntimeError):
    """LAPACK failed to converge on an SVD/eigendecomposition."""


@dataclass
class HosvdFactors:
    """Core tensor plus one square unitary factor per mode."""

    core: np.ndarray
    factors: list[np.ndarray]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.core.shape


def as_tensor(data, orders=(2, 3, 4)) -> np.ndarray:
    t = np.asarray(data)
    if t.ndim not in orders:
        raise ValueError(f"tensor order must be one of {orders}, got {t.ndim}")
    if t.size == 0:
        raise ValueError("empty tensor")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains NaN or Inf")
    return t


def _check_mode(t: np.ndarray, mode: int) -> None:
    if not 0 <= mode < t.ndim:
        raise IndexError(f"mode {mode} out of range for order-{t.ndim} tensor")


def unfold(t, mode: int) -> np.ndarray:
    """Mode-``mode`` matricization, shape ``(dims[mode], prod(other dims))``."""
    t = np.asarray(t)
    _check_mode(t, mode)
    return np.reshape(np.moveaxis(t, mode, 0), (t.shape[mode], -1), order="F")


def refold(m, mode: int, dims) -> np.ndarray:
    """Inverse of :func:`unfold` for a tensor of shape ``dims``."""
    dims = tuple(int(d) for d in dims)
    if not 0 <= mode < len(dims):
        raise IndexError(f"mode {mode} out of range for order-{len(dims)} tensor")
    moved = (dims[mode],) + dims[:mode] + dims[mode + 1:]
    m = np.asarray(m)
    if m.shape != (moved[0], int(np.prod(moved[1:]))):
        raise ValueError(f"matrix of shape {m.shape} cannot be refolded to {dims}")
    return np.moveaxis(np.reshape(m, moved, order="F"), 0, mode)


def mode_product(t, m, mode: int) -> np.ndarray:
    """``t ×_mode m``: multiply every mode-``mode`` fiber of ``t`` by ``m``."""
    t = np.asarray(t)
    m = np.asarray(m)
    _check_mode(t, mode)
    if m.ndim != 2 or m.shape[1] != t.shape[mode]:
        raise ValueError(
            f"matrix of shape {m.shape} does not act on mode {mode} of extent {t.shape[mode]}")
    return np.moveaxis(np.tensordot(m, t, axes=(1, mode)), 0, mode)


def _normalize_phase(u: np.ndarray, *others: np.ndarray):
    """Rotate each column of ``u`` so its largest-magnitude entry is real positive.

    Works on stacks (``u[..., :, j]`` is a column). The same unit-modulus
    factors are applied to the columns of ``others``.
    """
    idx = np.argmax(np.abs(u), axis=-2)[..., None, :]
    pivot = np.take_along_axis(u, idx, axis=-2)
    mag = np.abs(pivot)
    if np.iscomplexobj(u):
        phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1), 1)
    else:
        phase = np.where(pivot < 0, -1.0, 1.0)
    rot = np.conj(phase)
    out = [u * rot]
    for o in others:
        out.append(o * rot)
    return out if others else out[0]


def complex_svd(m):
    """Full SVD ``m = U diag(s) V^H`` with deterministic column phases.

    Returns ``(U, s, V)`` with square unitary ``U`` (rows x rows) and ``V``
    (cols x cols); ``s`` holds the ``min(rows, cols)`` singular values in
    nonincreasing order.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("complex_svd expects a nonempty matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(str(exc)) from exc
    v = np.conj(vh.T)
    k = s.size
    lead_u, lead_v = _normalize_phase(u[:, :k], v[:, :k])
    u = np.concatenate([lead_u, u[:, k:]], axis=1)
    v = np.concatenate([lead_v, v[:, k:]], axis=1)
    return u, s, v


def _complete_basis(q: np.ndarray, d: int) -> np.ndarray:
    """Extend orthonormal columns ``q`` (d x r) to a d x d unitary matrix.

    Null directions are filled from the identity: at every step the
    identity column with the largest residual against the current basis
    (lowest index on ties) is orthogonalized and appended.
    """
    basis = [q[:, j] for j in range(q.shape[1])]
    eye = np.eye(d, dtype=q.dtype)
    while len(basis) < d:
        b = np.stack(basis, axis=1) if basis else np.zeros((d, 0), q.dtype)
        resid = eye - b @ (np.conj(b.T) @ eye)
        resid -= b @ (np.conj(b.T) @ resid)
        norms = np.linalg.norm(resid, axis=0)
        j = int(np.argmax(norms))
        basis.append(resid[:, j] / norms[j])
    return np.stack(basis, axis=1)


def _split(shape, axis: int):
    """(G, A, d, B) view dimensions for a batched mode-``axis`` operation."""
    a = int(np.prod(shape[1:axis + 1], dtype=np.int64))
    b = int(np.prod(shape[axis + 2:], dtype=np.int64))
    return shape[0], a, shape[axis + 1], b


def _gram_batch(x: np.ndarray, axis: int) -> np.ndarray:
    """``unfold(x[g], axis) @ unfold(x[g], axis)^H`` for every g, without copies."""
    g, a, d, b = _split(x.shape, axis)
    x = np.ascontiguousarray(x)
    if a == 1:
        m = x.reshape(g, d, b)
        return m @ np.conj(np.swapaxes(m, 1, 2))
    if b == 1:
        m = x.reshape(g, a, d)
        return np.swapaxes(m, 1, 2) @ np.conj(m)
    m = np.moveaxis(x.reshape(g, a, d, b), 2, 1).reshape(g, d, a * b)
    return m @ np.conj(np.swapaxes(m, 1, 2))


def _left_bases(gram: np.ndarray, cols: int) -> np.ndarray:
    """Left singular vectors from a stack of Gram matrices (G, d, d).

    The eigenvectors of ``a a^H`` span exactly the left singular subspaces of
    ``a``; they are ordered by decreasing singular value. Rank-deficient
    entries are completed deterministically with :func:`_complete_basis`.
    ``cols`` is the column count of the unfolding (for the rank tolerance).
    """
    d = gram.shape[1]
    try:
        w, vec = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(str(exc)) from exc
    w = w[:, ::-1]
    vec = vec[:, :, ::-1]
    tol = max(d, cols) * np.finfo(float).eps * w[:, :1]
    null = (w <= tol) | (w[:, :1] <= 0)
    bad = np.flatnonzero(null.any(axis=1))
    if bad.size:
        vec = np.array(vec)
        for i in bad:
            rank = int(np.count_nonzero(~null[i]))
            vec[i] = _complete_basis(vec[i, :, :rank], d)
    return _normalize_phase(vec)


def _apply_batch(x: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    """Batched mode product: ``out[g] = x[g] ×_axis m[g]`` (axis excludes batch)."""
    g, a, d, b = _split(x.shape, axis)
    x = np.ascontiguousarray(x)
    shape = x.shape[:axis + 1] + (m.shape[1],) + x.shape[axis + 2:]
    if b == 1:
        out = x.reshape(g, a, d) @ np.swapaxes(m, 1, 2)
    elif a == 1:
        out = m @ x.reshape(g, d, b)
    else:
        out = m[:, None] @ x.reshape(g, a, d, b)
    return out.reshape(shape)


def hosvd_batch(x: np.ndarray):
    """HOSVD of every tensor in the stack ``x`` (G, *dims).

    Returns ``(core, factors)`` where ``factors[k]`` has shape (G, d_k, d_k).
    """
    x = np.ascontiguousarray(x)
    n = x[0].size
    factors = [_left_bases(_gram_batch(x, k), n // x.shape[k + 1]) for k in range(x.ndim - 1)]
    return analysis_batch(x, factors), factors


def analysis_batch(x: np.ndarray, factors) -> np.ndarray:
    """Core tensors of the stack ``x`` in the given bases: ``x ×k T_k^H``."""
    core = np.ascontiguousarray(x)
    for k, t in enumerate(factors):
        core = _apply_batch(core, np.conj(np.swapaxes(t, 1, 2)), k)
    return core


def synthesis_batch(core: np.ndarray, factors) -> np.ndarray:
    out = core
    for k, t in enumerate(factors):
        out = _apply_batch(out, t, k)
    return out


def hosvd(t) -> HosvdFactors:
    """Full HOSVD ``t = S ×1 T1 ×2 T2 ×3 T3 (×4 T4)`` of an order-3 or order-4 tensor."""
    t = as_tensor(t, orders=(3, 4))
    core, factors = hosvd_batch(t[None])
    return HosvdFactors(core=core[0], factors=[f[0] for f in factors])


def hosvd_synthesis(f: HosvdFactors) -> np.ndarray:
    core = np.asarray(f.core)
    if len(f.factors) != core.ndim:
        raise ValueError(f"{len(f.factors)} factors for an order-{core.ndim} core")
    out = core
    for k, t in enumerate(f.factors):
        t = np.asarray(t)
        if t.shape != (core.shape[k], core.shape[k]):
            raise ValueError(
                f"factor {k} has shape {t.shape}, core mode extent is {core.shape[k]}")
        out = mode_product(out, t, k)
    return out
