"""Greedy placement of ``m`` unilateral inputs.

Step one grows the input matrix column by column, maximizing the lineality
of the reachable cone (ties broken by cone size, then by the fixed order
node ascending / positive first, or at random when a seed is given). When
no single column raises the lineality and at least two slots remain, a
``(beta, -beta)`` pair is added instead.

Step two pairs the lineality spanning vectors with nodes by maximum
matching, then appends nodes whose row in the ray matrix ``Q`` carries two
entries of opposite sign, consuming those two rays.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._validation import check_dynamics_matrix, check_input_matrix
from .cone import TAU_LP, QSet, ReachableCone, cone_dimension, q_set, reachable_cone
from .exceptions import BudgetError
from .matching import subset_from_lineality
from .spectral import EIG_TOL, TAU_ZERO, SpectralDecomposition, compute_spectrum, select_left_chains
from .subset import _opposite_pair, is_subset_controllable, max_controllable_subset, ray_pair_node_test
from .system import Column, InputMatrix, candidate_columns, format_column, parse_column

log = logging.getLogger(__name__)


@dataclass
class PlacementResult:
    B: InputMatrix
    Vs: tuple[int, ...]
    V1: tuple[int, ...]
    cone: ReachableCone
    Q: QSet
    trace: list[dict] = field(default_factory=list)
    enlargement: list[dict] = field(default_factory=list)

    @property
    def lineality_dim(self) -> int:
        return self.cone.lineality_dim


class _Evaluator:
    """Memoized cone evaluation for candidate input matrices."""

    def __init__(self, decomp: SpectralDecomposition, tau_zero: float, tau_lp: float):
        self.decomp = decomp
        self.tau_zero = tau_zero
        self.tau_lp = tau_lp
        self._cones: dict[tuple, ReachableCone] = {}
        self._dims: dict[tuple, int] = {}

    def cone(self, B: InputMatrix) -> ReachableCone:
        key = B.columns
        if key not in self._cones:
            chains = select_left_chains(self.decomp, B, self.tau_zero)
            self._cones[key] = reachable_cone(chains, B, self.tau_zero, self.tau_lp)
        return self._cones[key]

    def lineality(self, B: InputMatrix) -> int:
        return self.cone(B).lineality_dim

    def size(self, B: InputMatrix) -> int:
        key = B.columns
        if key not in self._dims:
            self._dims[key] = cone_dimension(self.cone(B))
        return self._dims[key]


def delta(decomp: SpectralDecomposition, B_prev, beta: Column | str,
          tau_zero: float = TAU_ZERO, tau_lp: float = TAU_LP) -> int:
    """Lineality gained by appending ``beta`` to ``B_prev``."""
    ev = _Evaluator(decomp, tau_zero, tau_lp)
    B_prev = check_input_matrix(B_prev, decomp.n)
    beta = parse_column(beta) if isinstance(beta, str) else tuple(beta)
    return ev.lineality(B_prev.append(beta)) - ev.lineality(B_prev)


def _argmax(keys: dict[Column, tuple], order: list[Column]) -> list[Column]:
    best = max(keys.values())
    return [c for c in order if keys[c] == best]


def _pick(tied: list[Column], rng: np.random.Generator | None) -> Column:
    if rng is None or len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(len(tied)))]


def select_column(decomp: SpectralDecomposition, B_prev, remaining: int = 1,
                  rng: np.random.Generator | None = None, tau_zero: float = TAU_ZERO,
                  tau_lp: float = TAU_LP, _ev: _Evaluator | None = None) -> tuple[tuple[Column, ...], dict]:
    """Next column(s) for ``B_prev`` and an iteration record.

    Returns one column when some candidate raises the lineality or when only
    one slot is left; otherwise the best ``(beta, -beta)`` pair.
    """
    if remaining < 1:
        raise BudgetError("no budget left for another column")
    ev = _ev or _Evaluator(decomp, tau_zero, tau_lp)
    B_prev = check_input_matrix(B_prev, decomp.n)
    order = candidate_columns(decomp.n)
    base = ev.lineality(B_prev)
    lin = {c: ev.lineality(B_prev.append(c)) for c in order}
    record = {
        "base_lineality": base,
        "candidates": [{"column": format_column(c), "lineality": lin[c], "delta": lin[c] - base} for c in order],
    }
    if max(lin.values()) > base or remaining == 1:
        maximizers = _argmax({c: (lin[c],) for c in order}, order)
        record["maximizers"] = [format_column(c) for c in maximizers]
        record["branch"] = "single" if max(lin.values()) > base else "final"
        if len(maximizers) > 1:
            sizes = {c: ev.size(B_prev.append(c)) for c in maximizers}
            record["cone_sizes"] = {format_column(c): s for c, s in sizes.items()}
            tied = _argmax({c: (sizes[c],) for c in maximizers}, maximizers)
        else:
            tied = maximizers
        record["tied"] = [format_column(c) for c in tied]
        return (_pick(tied, rng),), record

    pair_lin = {c: ev.lineality(B_prev.append(c, (c[0], -c[1]))) for c in order if c[1] > 0}
    pair_order = list(pair_lin)
    maximizers = _argmax({c: (pair_lin[c],) for c in pair_order}, pair_order)
    if len(maximizers) > 1:
        sizes = {c: ev.size(B_prev.append(c, (c[0], -c[1]))) for c in maximizers}
        record["cone_sizes"] = {format_column(c): s for c, s in sizes.items()}
        maximizers = _argmax({c: (sizes[c],) for c in maximizers}, maximizers)
    record["branch"] = "pair"
    record["pair_lineality"] = {format_column(c): v for c, v in pair_lin.items()}
    record["tied"] = [format_column(c) for c in maximizers]
    c = _pick(maximizers, rng)
    return (c, (c[0], -c[1])), record


def enlarge_subset(cone: ReachableCone, Q: QSet, V1: Iterable[int],
                   tau_zero: float = TAU_ZERO) -> tuple[tuple[int, ...], list[dict]]:
    """Append nodes certified by an opposite-sign pair of rays.

    Each accepted node consumes the two rays that certified it. A node is
    only appended when the enlarged subset still passes the projection test.
    """
    Vs = set(V1)
    live = list(range(Q.size))
    log_ = []
    for i in range(1, cone.ambient_dim + 1):
        if i in Vs or len(live) < 2:
            continue
        pair = _opposite_pair(Q.columns[i - 1, live], tau_zero)
        if pair is None:
            continue
        l, m = live[pair[0]], live[pair[1]]
        candidate = sorted(Vs | {i})
        ok = is_subset_controllable(cone, candidate, tau_zero)
        log_.append({"node": i, "columns": [l, m], "accepted": ok})
        if ok:
            Vs.add(i)
            live = [c for c in live if c not in (l, m)]
    return tuple(sorted(Vs)), log_


def controllable_subset(cone: ReachableCone, tau_zero: float = TAU_ZERO) -> tuple[tuple[int, ...], tuple[int, ...], QSet, list[dict]]:
    """Matching subset, its enlargement, the ray matrix and the enlargement log."""
    Q = q_set(cone)
    late = [i for i in range(1, cone.ambient_dim + 1) if ray_pair_node_test(i, Q, tau_zero)]
    V1 = subset_from_lineality(cone.lineality_basis, cone.ambient_dim, late, tau_zero)
    Vs, log_ = enlarge_subset(cone, Q, V1, tau_zero)
    return V1, Vs, Q, log_


def _parse_override(override) -> list[Column]:
    if override is None:
        return []
    if isinstance(override, str):
        return list(InputMatrix.parse(override))
    return list(InputMatrix.from_pairs(override))


def place_inputs(A, m: int, override=None, seed: int | None = None, tol: float = EIG_TOL,
                 tau_zero: float = TAU_ZERO, tau_lp: float = TAU_LP,
                 decomp: SpectralDecomposition | None = None) -> PlacementResult:
    """Greedy placement of ``m`` signed-versor inputs on the network ``A``.

    Parameters
    ----------
    A : (n, n) array_like
    m : int
        Input budget; exactly ``m`` columns are placed.
    override : str or sequence, optional
        Columns forced at the first iterations, e.g. ``"-e6,-e2"``.
    seed : int, optional
        Break ties at random (reproducibly) instead of by the fixed order.
    """
    A = check_dynamics_matrix(A)
    n = A.shape[0]
    if int(m) != m or m < 0:
        raise BudgetError(f"input budget must be a nonnegative integer, got {m!r}")
    if m > 2 * n:
        raise BudgetError(f"budget {m} exceeds 2n = {2 * n} distinct signed versors")
    forced = _parse_override(override)
    if len(forced) > m:
        raise BudgetError(f"override lists {len(forced)} columns for a budget of {m}")
    InputMatrix(tuple(forced)).check_nodes(n)
    decomp = decomp if decomp is not None else compute_spectrum(A, tol=tol)
    ev = _Evaluator(decomp, tau_zero, tau_lp)
    rng = np.random.default_rng(seed) if seed is not None else None

    B = InputMatrix()
    trace = []
    k = 0
    while len(B) < m:
        k += 1
        remaining = m - len(B)
        if forced:
            col = forced.pop(0)
            _, record = select_column(decomp, B, remaining, None, tau_zero, tau_lp, ev)
            record["branch"] = "override"
            record["in_maximizers"] = format_column(col) in record.get("maximizers", record.get("tied", []))
            cols = (col,)
        else:
            cols, record = select_column(decomp, B, remaining, rng, tau_zero, tau_lp, ev)
            if remaining == 1 and record["branch"] == "final":
                log.info("step %d: last slot, no column raises lineality; adding best single column", k)
        B = B.append(*cols)
        cone = ev.cone(B)
        record.update({
            "k": k,
            "chosen": [format_column(c) for c in cols],
            "lineality_dim": cone.lineality_dim,
            "generators": len(cone.generators),
        })
        trace.append(record)

    cone = ev.cone(B)
    V1, Vs, Q, enlargement = controllable_subset(cone, tau_zero)
    return PlacementResult(B, Vs, V1, cone, Q, trace, enlargement)


def exhaustive_placement(A, m: int, tol: float = EIG_TOL, tau_zero: float = TAU_ZERO,
                         tau_lp: float = TAU_LP, max_n: int = 4) -> tuple[int, InputMatrix]:
    """Best controllable-subset size over all column multisets (audit oracle)."""
    A = check_dynamics_matrix(A)
    n = A.shape[0]
    if n > max_n:
        raise ValueError(f"exhaustive placement limited to n <= {max_n}")
    decomp = compute_spectrum(A, tol=tol)
    ev = _Evaluator(decomp, tau_zero, tau_lp)
    best, best_B = -1, InputMatrix()
    for combo in itertools.combinations_with_replacement(candidate_columns(n), m):
        B = InputMatrix(combo)
        size = len(max_controllable_subset(ev.cone(B)))
        if size > best:
            best, best_B = size, B
    return best, best_B
