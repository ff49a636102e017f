"""Reachable cone under nonnegative inputs on signed-versor columns.

Each chain element ``(block, k)`` contributes generators according to the
signs of ``l_{k'}^T B`` over the tail ``k' >= k`` of its chain:

==============  ===============================  ===========================
case            condition                        generators
==============  ===============================  ===========================
unexcited       every ``l_{k'}^T B`` is zero     none
bidirectional   real; positive and negative      ``r_k``, ``-r_k``
                entries both occur
positive        real; only positive entries      ``r_k``
negative        real; only negative entries      ``-r_k``
oscillatory     complex; some entry non-zero     ``+-Re r_k``, ``+-Im r_k``
==============  ===============================  ===========================

A conjugate pair spans one real plane, so only the member with positive
imaginary part is visited. Membership questions are decided by LP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from ._validation import check_input_matrix
from .exceptions import LPError
from .spectral import TAU_ZERO, JordanBlock, SpectralDecomposition, select_left_chains
from .system import InputMatrix

TAU_LP = 1e-7
DEFAULT_TIME_GRID = (0.0, 0.5, 1.0, 2.0, 4.0)

UNEXCITED = "unexcited"
BIDIRECTIONAL = "bidirectional"
POSITIVE = "positive"
NEGATIVE = "negative"
OSCILLATORY = "oscillatory"

LINE = "line"
RAY = "ray"


@dataclass(frozen=True)
class ConeGenerator:
    """Unit-norm generator tagged with the chain element it came from.

    ``part`` is one of ``+r``, ``-r``, ``+Re``, ``-Re``, ``+Im``, ``-Im``;
    ``kind`` is ``line`` when the opposite generator is also present.
    """

    vector: np.ndarray
    block: int
    level: int
    part: str
    case: str
    kind: str

    @property
    def tag(self) -> tuple[int, int, str]:
        return self.block, self.level, self.part


@dataclass
class ReachableCone:
    generators: list[ConeGenerator]
    lineality_basis: list[np.ndarray]
    ambient_dim: int
    decomposition: SpectralDecomposition
    inputs: InputMatrix
    cases: dict[tuple[int, int], str] = field(default_factory=dict)
    tau_lp: float = TAU_LP

    @property
    def matrix(self) -> np.ndarray:
        """Generators as columns, shape ``(n, len(generators))``."""
        if not self.generators:
            return np.zeros((self.ambient_dim, 0))
        return np.column_stack([g.vector for g in self.generators])

    @property
    def lineality_matrix(self) -> np.ndarray:
        if not self.lineality_basis:
            return np.zeros((self.ambient_dim, 0))
        return np.column_stack(self.lineality_basis)

    @property
    def lineality_dim(self) -> int:
        W = self.lineality_matrix
        return int(np.linalg.matrix_rank(W)) if W.shape[1] else 0

    def __contains__(self, x) -> bool:
        return cone_membership(self, x)


@dataclass
class QSet:
    """Cone generators whose negation is not reachable, as matrix columns."""

    columns: np.ndarray
    origins: list[tuple[int, int, str]]

    @property
    def size(self) -> int:
        return self.columns.shape[1]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def classify(block: JordanBlock, k: int, Bmat: np.ndarray, tau_zero: float = TAU_ZERO) -> str:
    """Which generator case chain element ``k`` (1-based) of ``block`` falls in."""
    if not 1 <= k <= block.size:
        raise ValueError(f"chain index {k} outside 1..{block.size}")
    proj = block.left[k - 1:] @ Bmat
    if block.is_real:
        vals = proj.real
        pos = bool(np.any(vals > tau_zero))
        neg = bool(np.any(vals < -tau_zero))
        if pos and neg:
            return BIDIRECTIONAL
        if pos:
            return POSITIVE
        if neg:
            return NEGATIVE
        return UNEXCITED
    return OSCILLATORY if np.any(np.abs(proj) > tau_zero) else UNEXCITED


def gamma_set(block: JordanBlock, k: int, B, tau_zero: float = TAU_ZERO) -> tuple[str, list[ConeGenerator]]:
    """Case label and generators contributed by chain element ``k`` of ``block``.

    ``B`` may be an :class:`InputMatrix` or a dense ``n x m`` array.
    """
    n = block.left.shape[1]
    Bmat = B if isinstance(B, np.ndarray) else check_input_matrix(B, n).to_array(n)
    case = classify(block, k, Bmat, tau_zero)
    r = block.right[:, k - 1]

    def gen(vec, part, kind):
        return ConeGenerator(_unit(vec), block.index, k, part, case, kind)

    if case == UNEXCITED:
        return case, []
    if case == OSCILLATORY:
        if not block.is_representative:
            # the conjugate partner carries the plane
            return case, []
        re, im = r.real, r.imag
        return case, [gen(re, "+Re", LINE), gen(-re, "-Re", LINE),
                      gen(im, "+Im", LINE), gen(-im, "-Im", LINE)]
    re = r.real
    if case == BIDIRECTIONAL:
        return case, [gen(re, "+r", LINE), gen(-re, "-r", LINE)]
    if case == POSITIVE:
        return case, [gen(re, "+r", RAY)]
    return case, [gen(-re, "-r", RAY)]


def reachable_cone(decomp: SpectralDecomposition, B, tau_zero: float = TAU_ZERO,
                   tau_lp: float = TAU_LP, select: bool = False) -> ReachableCone:
    """Generators and lineality spanning set of the reachable cone.

    ``decomp`` is expected to carry chains already selected against ``B``;
    pass ``select=True`` to run :func:`select_left_chains` here.
    """
    inputs = check_input_matrix(B, decomp.n)
    if select:
        decomp = select_left_chains(decomp, inputs, tau_zero)
    Bmat = inputs.to_array(decomp.n)
    generators, lineality, cases = [], [], {}
    for block in decomp.blocks:
        for k in range(1, block.size + 1):
            case, gens = gamma_set(block, k, Bmat, tau_zero)
            cases[(block.index, k)] = case
            if not block.is_representative:
                continue
            generators.extend(gens)
            r = block.right[:, k - 1]
            if case == BIDIRECTIONAL:
                lineality.append(_unit(r.real))
            elif case == OSCILLATORY:
                lineality.extend([_unit(r.real), _unit(r.imag)])
    return ReachableCone(generators, lineality, decomp.n, decomp, inputs, cases, tau_lp)


def analyze(A, B, tol: float | None = None, tau_zero: float = TAU_ZERO, tau_lp: float = TAU_LP) -> ReachableCone:
    """Spectrum, chain selection and cone in one call."""
    from .spectral import EIG_TOL, compute_spectrum

    decomp = compute_spectrum(A, tol=EIG_TOL if tol is None else tol)
    return reachable_cone(decomp, B, tau_zero=tau_zero, tau_lp=tau_lp, select=True)


# --------------------------------------------------------------------------
# LP machinery


def nonnegative_residual(G: np.ndarray, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest ``||G a - x||_1`` over ``a >= 0`` and a minimizer.

    Solved as an always-feasible LP so that a solver failure can never be
    mistaken for infeasibility.
    """
    x = np.asarray(x, dtype=float)
    d, g = G.shape
    if g == 0:
        return float(np.sum(np.abs(x))), np.zeros(0)
    c = np.concatenate([np.zeros(g), np.ones(2 * d)])
    A_eq = np.hstack([G, np.eye(d), -np.eye(d)])
    res = linprog(c, A_eq=A_eq, b_eq=x, bounds=(0, None), method="highs")
    if res.status != 0:
        raise LPError(f"LP solver failed: {res.message}")
    return float(res.fun), res.x[:g]


def in_positive_span(G: np.ndarray, x, tol: float = TAU_LP) -> bool:
    """``x`` is a nonnegative combination of the columns of ``G`` (within ``tol``)."""
    x = np.asarray(x, dtype=float)
    nx = np.linalg.norm(x)
    if nx <= tol:
        return True
    if G.shape[1] == 0:
        return False
    norms = np.linalg.norm(G, axis=0)
    keep = norms > 0
    resid, _ = nonnegative_residual(G[:, keep] / norms[keep], x / nx)
    return resid <= tol


def cone_membership(cone: ReachableCone, x) -> bool:
    """``x`` lies in the positive span of the cone generators."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != cone.ambient_dim:
        raise ValueError(f"expected a vector of length {cone.ambient_dim}")
    return in_positive_span(cone.matrix, x, cone.tau_lp)


def in_lineality(cone: ReachableCone, x, tol: float | None = None) -> bool:
    x = np.asarray(x, dtype=float).reshape(-1)
    tol = cone.tau_lp if tol is None else tol
    nx = np.linalg.norm(x)
    if nx <= tol:
        return True
    W = cone.lineality_matrix
    if W.shape[1] == 0:
        return False
    coef, *_ = np.linalg.lstsq(W, x / nx, rcond=None)
    return float(np.linalg.norm(W @ coef - x / nx)) <= tol


def controllable_membership(cone: ReachableCone, x, time_grid: Sequence[float] = DEFAULT_TIME_GRID) -> bool:
    """Semi-decision of whether ``x`` can be steered to the origin.

    True when ``x`` is in the lineality space or ``-exp(A t) x`` is in the
    cone for some ``t`` of ``time_grid``; False means no witness on the grid.
    """
    if in_lineality(cone, x):
        return True
    x = np.asarray(x, dtype=float).reshape(-1)
    for t in time_grid:
        if t < 0:
            raise ValueError("time grid must be nonnegative")
        if cone_membership(cone, -cone.decomposition.expm(t) @ x):
            return True
    return False


def q_set(cone: ReachableCone) -> QSet:
    """Generators ``g`` of the cone with ``-g`` outside it."""
    cols, origins = [], []
    G = cone.matrix
    for j, g in enumerate(cone.generators):
        if not in_positive_span(G, -g.vector, cone.tau_lp):
            cols.append(g.vector)
            origins.append(g.tag)
    Q = np.column_stack(cols) if cols else np.zeros((cone.ambient_dim, 0))
    return QSet(Q, origins)


def irredundant_count(G: np.ndarray, tol: float = TAU_LP) -> int:
    """Number of columns not in the positive span of the remaining ones."""
    count = 0
    for j in range(G.shape[1]):
        others = np.delete(G, j, axis=1)
        if not in_positive_span(others, G[:, j], tol):
            count += 1
    return count


def cone_dimension(cone: ReachableCone) -> int:
    """Cone size as the count of irredundant generators."""
    return irredundant_count(cone.matrix, cone.tau_lp)
