"""Node-subset reachability and controllability by coordinate projection.

A node subset is treated as unilaterally controllable exactly when the
cone generators, projected onto its coordinates, positively span the whole
coordinate space. Reachability and controllability of node subsets
coincide, so the same predicate answers both. The projection test is
sufficient by construction; its necessity rests on the cone being the exact
reachable set.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from ._validation import check_node_subset
from .cone import QSet, ReachableCone
from .exceptions import LPError
from .spectral import TAU_ZERO


def positive_span_is_full(vectors: Sequence[np.ndarray] | np.ndarray, d: int, tau_zero: float = TAU_ZERO) -> bool:
    """``Span+(vectors) == R^d``.

    Holds iff the vectors have rank ``d`` and admit a vanishing combination
    with all coefficients strictly positive (``>= 1`` after rescaling).
    """
    if d < 0:
        raise ValueError("dimension must be nonnegative")
    if d == 0:
        return True
    if isinstance(vectors, np.ndarray):
        V = vectors.astype(float).reshape(d, -1) if vectors.ndim == 1 else vectors.astype(float)
    else:
        if len(vectors) == 0:
            return False
        V = np.column_stack([np.asarray(v, dtype=float).reshape(-1) for v in vectors])
    if V.size == 0:
        return False
    if V.shape[0] != d:
        raise ValueError(f"vectors must have {d} coordinates")
    norms = np.linalg.norm(V, axis=0)
    V = V[:, norms > tau_zero] / norms[norms > tau_zero]
    if V.shape[1] <= d or np.linalg.matrix_rank(V, tol=1e-9) < d:
        return False
    k = V.shape[1]
    res = linprog(np.zeros(k), A_eq=V, b_eq=np.zeros(d), bounds=(1, None), method="highs")
    if res.status == 2:
        return False
    if res.status != 0:
        raise LPError(f"LP solver failed: {res.message}")
    return True


def project(cone: ReachableCone, nodes: Iterable[int]) -> np.ndarray:
    """Generator matrix restricted to the rows of ``nodes`` (1-based)."""
    idx = [v - 1 for v in nodes]
    return cone.matrix[idx, :]


def is_subset_controllable(cone: ReachableCone, nodes: Iterable[int], tau_zero: float = TAU_ZERO) -> bool:
    """Projection of the cone onto the node coordinates is the full space."""
    nodes = check_node_subset(nodes, cone.ambient_dim)
    if not nodes:
        return True
    return positive_span_is_full(project(cone, nodes), len(nodes), tau_zero)


def node_flags(cone: ReachableCone) -> list[bool]:
    """Single-node controllability for every node ``1..n``."""
    return [is_subset_controllable(cone, (i,)) for i in range(1, cone.ambient_dim + 1)]


def _opposite_pair(row: np.ndarray, tau_zero: float) -> tuple[int, int] | None:
    pos = np.flatnonzero(row > tau_zero)
    neg = np.flatnonzero(row < -tau_zero)
    if len(pos) and len(neg):
        return int(pos[0]), int(neg[0])
    return None


def ray_pair_node_test(i: int, Q: QSet | np.ndarray, tau_zero: float = TAU_ZERO) -> bool:
    """Row ``i`` (1-based) of ``Q`` holds two entries of strictly opposite sign."""
    cols = Q.columns if isinstance(Q, QSet) else np.asarray(Q, dtype=float)
    if cols.shape[1] < 2:
        return False
    return _opposite_pair(cols[i - 1], tau_zero) is not None


def max_controllable_subset(cone: ReachableCone, max_n: int = 7) -> tuple[int, ...]:
    """Largest controllable subset by exhaustive search (test oracle, small ``n``).

    Controllable subsets are closed under taking subsets, so the search runs
    from the largest size down and stops at the first hit.
    """
    n = cone.ambient_dim
    if n > max_n:
        raise ValueError(f"exhaustive search limited to n <= {max_n}")
    flags = node_flags(cone)
    pool = [i + 1 for i, ok in enumerate(flags) if ok]
    for size in range(len(pool), 0, -1):
        for combo in itertools.combinations(pool, size):
            if is_subset_controllable(cone, combo):
                return combo
    return ()
