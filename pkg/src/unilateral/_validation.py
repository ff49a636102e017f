"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .system import InputMatrix


def check_dynamics_matrix(A) -> np.ndarray:
    """Return ``A`` as a finite, real, square float array.

    Raises
    ------
    ValueError
        If ``A`` is not square, contains non-finite values or has a
        non-zero imaginary part.
    """
    arr = np.asarray(A)
    if np.iscomplexobj(arr):
        if np.any(np.imag(arr) != 0):
            raise ValueError("dynamics matrix must be real")
        arr = np.real(arr)
    try:
        arr = arr.astype(float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"dynamics matrix is not numeric: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"dynamics matrix must be square and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("dynamics matrix has non-finite entries")
    return arr


def check_input_matrix(B, n: int) -> InputMatrix:
    """Coerce ``B`` into an :class:`InputMatrix` over ``n`` nodes.

    ``B`` may already be an ``InputMatrix``, a string such as ``"-e6,-e2"``,
    a sequence of ``(node, sign)`` pairs, or a dense ``n x m`` array whose
    columns are signed versors.
    """
    if isinstance(B, InputMatrix):
        out = B
    elif isinstance(B, str):
        out = InputMatrix.parse(B)
    elif B is None:
        out = InputMatrix()
    else:
        arr = np.asarray(B)
        if arr.ndim == 2 and arr.shape[0] == n and arr.dtype != object and not _looks_like_pairs(arr, n):
            out = InputMatrix.from_array(arr)
        else:
            out = InputMatrix.from_pairs(B)
    out.check_nodes(n)
    return out


def _looks_like_pairs(arr: np.ndarray, n: int) -> bool:
    # an (m, 2) array of (node, sign) rows is ambiguous only when n == 2
    return arr.shape[1] == 2 and n != 2 and np.all(np.isin(arr[:, 1], (-1, 1)))


def check_node_subset(nodes: Iterable[int], n: int) -> tuple[int, ...]:
    """Validate a node subset given with 1-based labels; return it sorted."""
    out = []
    for v in nodes:
        if isinstance(v, (bool, np.bool_)) or int(v) != v:
            raise ValueError(f"node labels must be integers, got {v!r}")
        v = int(v)
        if not 1 <= v <= n:
            raise ValueError(f"node {v} outside 1..{n}")
        out.append(v)
    if len(set(out)) != len(out):
        raise ValueError("node subset has duplicates")
    return tuple(sorted(out))


def check_states(X, n: int) -> np.ndarray:
    """Return ``X`` as a 2-D float array of states, one per row."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError(f"expected states with {n} coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("states must be finite")
    return arr
