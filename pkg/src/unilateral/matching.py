"""Maximum matching between lineality vectors and node coordinates."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy import linalg

from .spectral import TAU_ZERO

_INF = float("inf")


@dataclass
class BipartiteGraph:
    """Left vertices with ordered adjacency lists into the right vertices.

    The order of ``left`` and of each adjacency list fixes the matching
    returned by :func:`hopcroft_karp`.
    """

    left: list[Hashable]
    right: list[Hashable]
    adjacency: dict[Hashable, list[Hashable]]

    def __post_init__(self):
        rights = set(self.right)
        for u in self.left:
            nbrs = self.adjacency.setdefault(u, [])
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"duplicate edges at left vertex {u!r}")
            for v in nbrs:
                if v not in rights:
                    raise ValueError(f"edge ({u!r}, {v!r}) leaves the right vertex set")

    @property
    def edges(self) -> list[tuple[Hashable, Hashable]]:
        return [(u, v) for u in self.left for v in self.adjacency[u]]


def hopcroft_karp(g: BipartiteGraph) -> list[tuple[Hashable, Hashable]]:
    """Maximum-cardinality matching as ``(left, right)`` pairs in left order.

    Alternating BFS layers followed by DFS augmentation along shortest paths,
    ``O(sqrt(V) E)``.
    """
    match_l: dict = {u: None for u in g.left}
    match_r: dict = {v: None for v in g.right}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in g.left:
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u) -> bool:
        for v in g.adjacency[u]:
            w = match_r[v]
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in g.left:
            if match_l[u] is None:
                dfs(u)
    return [(u, match_l[u]) for u in g.left if match_l[u] is not None]


def lineality_graph(W: Sequence[np.ndarray], n: int, deprioritize: Iterable[int] = (),
                    tau_zero: float = TAU_ZERO) -> BipartiteGraph:
    """Edge ``(j, i)`` whenever node ``i`` (1-based) carries a non-zero entry of ``W[j]``.

    Nodes in ``deprioritize`` are tried last; otherwise nodes ascend.
    """
    late = set(deprioritize)
    order = [i for i in range(1, n + 1) if i not in late] + sorted(late)
    adjacency = {j: [i for i in order if abs(w[i - 1]) > tau_zero] for j, w in enumerate(W)}
    return BipartiteGraph(list(range(len(W))), list(range(1, n + 1)), adjacency)


def _pivoted_rows(W: np.ndarray, late: set[int]) -> list[int]:
    """Rows (1-based) with a well-conditioned square restriction of ``W``.

    Fallback when a structural matching is numerically rank deficient;
    deprioritized rows are down-weighted so pivoting prefers the others.
    """
    weights = np.array([1e-3 if i + 1 in late else 1.0 for i in range(W.shape[0])])
    _, _, piv = linalg.qr((W * weights[:, None]).T, pivoting=True)
    return sorted(int(p) + 1 for p in piv[:W.shape[1]])


def subset_from_lineality(W: Sequence[np.ndarray], n: int, deprioritize: Iterable[int] = (),
                          tau_zero: float = TAU_ZERO) -> tuple[int, ...]:
    """Node subset paired one-to-one with the lineality spanning vectors.

    The matched nodes are checked numerically: if the restriction of ``W`` to
    them is singular despite the structural matching, rows are re-chosen by
    pivoted QR so the subset still certifies the lineality bound.
    """
    W = [np.asarray(w, dtype=float) for w in W]
    if not W:
        return ()
    late = set(deprioritize)
    pairs = hopcroft_karp(lineality_graph(W, n, late, tau_zero))
    nodes = sorted(v for _, v in pairs)
    Wm = np.column_stack(W)
    if len(pairs) < len(W):
        warnings.warn(f"matching covers {len(pairs)} of {len(W)} lineality vectors; "
                      "the lineality bound is not certified", RuntimeWarning, stacklevel=2)
        return tuple(nodes)
    sub = Wm[[v - 1 for v in nodes], :]
    if np.linalg.matrix_rank(sub, tol=1e-9) < len(W):
        nodes = _pivoted_rows(Wm, late)
    return tuple(nodes)
