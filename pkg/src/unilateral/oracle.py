"""Simulation-based reachability oracle.

Inputs are restricted to piecewise-constant nonnegative values on ``N``
uniform intervals of ``[0, T]``, and the state is propagated exactly over
each interval with the augmented exponential ``expm([[A, B], [0, 0]] h)``.
Reachability of a target then reduces to an LP over the stacked
input-to-state map. Nothing here touches the cone construction; the oracle
exists to check it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

from ._validation import check_dynamics_matrix, check_input_matrix, check_node_subset
from .cone import TAU_LP, nonnegative_residual
from .exceptions import OracleOverflowError

DEFAULT_HORIZONS = (0.5, 1.0, 2.0, 4.0)
DEFAULT_STEPS = 32
DEFAULT_SAMPLES = 200
_OVERFLOW = 1e150
# subset targets are pushed this far past the free response (see subset_reach_oracle)
_TARGET_MARGIN = 10.0


def discrete_maps(A, B, T: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """``(Phi, M)`` with ``x(T) = Phi x0 + M u`` for stacked interval inputs ``u``.

    ``M`` has one block of ``m`` columns per interval, earliest first.
    """
    A = check_dynamics_matrix(A)
    n = A.shape[0]
    Bm = check_input_matrix(B, n).to_array(n)
    if not T > 0:
        raise ValueError(f"horizon must be positive, got {T}")
    if int(N) != N or N < 1:
        raise ValueError(f"steps must be a positive integer, got {N}")
    N = int(N)
    m = Bm.shape[1]
    h = T / N
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = A
    aug[:n, n:] = Bm
    with np.errstate(over="ignore", invalid="ignore"):
        E = linalg.expm(aug * h)
        P, G = E[:n, :n], E[:n, n:]
        blocks = [G]
        for _ in range(N - 1):
            blocks.append(P @ blocks[-1])
        M = np.hstack(blocks[::-1]) if m else np.zeros((n, 0))
        Phi = np.linalg.matrix_power(P, N)
    if not (np.all(np.isfinite(M)) and np.all(np.isfinite(Phi))) or \
            max(np.abs(M).max(initial=0), np.abs(Phi).max()) > _OVERFLOW:
        raise OracleOverflowError(f"state map overflows at horizon {T}; shorten the horizon")
    return Phi, M


def _feasible(M: np.ndarray, rhs: np.ndarray, tol: float) -> tuple[bool, float]:
    """Nonnegative combination of the columns of ``M`` hitting ``rhs``, relative L1 residual."""
    scale = np.linalg.norm(rhs)
    if scale <= tol:
        return True, 0.0
    norms = np.linalg.norm(M, axis=0)
    keep = norms > 0
    if not np.any(keep):
        return False, float(np.sum(np.abs(rhs)) / scale)
    resid, _ = nonnegative_residual(M[:, keep] / norms[keep], rhs / scale)
    return resid <= tol, resid


def reach_residual(A, B, x0, target, T: float, N: int, subset: Iterable[int] | None = None) -> float:
    """Relative L1 miss of the best admissible discretized input."""
    Phi, M = discrete_maps(A, B, T, N)
    n = Phi.shape[0]
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
    rows = list(range(n)) if subset is None else [i - 1 for i in check_node_subset(subset, n)]
    target = np.asarray(target, dtype=float).reshape(len(rows))
    rhs = target - (Phi @ x0)[rows]
    return _feasible(M[rows], rhs, np.inf)[1]


def reach_feasible(A, B, x0, target, T: float, N: int, subset: Iterable[int] | None = None,
                   tol: float = TAU_LP) -> bool:
    """Can ``x(T)`` (or its projection on ``subset``) be driven to ``target`` from ``x0``?

    ``x0=None`` means the origin. ``subset`` holds 1-based node labels and
    ``target`` then has one entry per node. Decided within ``tol`` (relative).
    """
    Phi, M = discrete_maps(A, B, T, N)
    n = Phi.shape[0]
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
    rows = list(range(n)) if subset is None else [i - 1 for i in check_node_subset(subset, n)]
    target = np.asarray(target, dtype=float).reshape(len(rows))
    rhs = target - (Phi @ x0)[rows]
    return _feasible(M[rows], rhs, tol)[0]


def sphere_samples(n: int, count: int, seed: int | None = 0) -> np.ndarray:
    """``count`` unit vectors in ``R^n`` as rows, uniform on the sphere."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


@dataclass
class AgreementReport:
    fraction: float
    samples: int
    horizons: tuple[float, ...]
    steps: int
    disagreements: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "fraction": self.fraction,
            "samples": self.samples,
            "horizons": list(self.horizons),
            "steps": self.steps,
            "disagreements": self.disagreements,
        }


def sweep_agreement(A, B, samples: int = DEFAULT_SAMPLES, horizons: Sequence[float] = DEFAULT_HORIZONS,
                    steps: int = DEFAULT_STEPS, seed: int | None = 0, tol: float = TAU_LP,
                    cone=None, targets: np.ndarray | None = None) -> AgreementReport:
    """Compare cone membership with the oracle on unit-sphere targets.

    A target counts as reachable by the oracle when some horizon reaches it
    from the origin. Each disagreement records both LP residuals, a measure
    of how close the target sits to either boundary.
    """
    from .cone import analyze, cone_membership

    A = check_dynamics_matrix(A)
    n = A.shape[0]
    B = check_input_matrix(B, n)
    cone = cone if cone is not None else analyze(A, B, tau_lp=tol)
    maps = [discrete_maps(A, B, T, steps)[1] for T in horizons]
    X = sphere_samples(n, samples, seed) if targets is None else np.atleast_2d(targets)
    agree, bad = 0, []
    Gc = cone.matrix
    gnorm = np.linalg.norm(Gc, axis=0)
    for x in X:
        predicted = cone_membership(cone, x)
        best = np.inf
        reached = False
        for M in maps:
            ok, r = _feasible(M, x, tol)
            best = min(best, r)
            if ok:
                reached = True
                break
        if predicted == reached:
            agree += 1
            continue
        cone_res = nonnegative_residual(Gc[:, gnorm > 0] / gnorm[gnorm > 0], x)[0] if Gc.shape[1] else float(np.sum(np.abs(x)))
        bad.append({"target": x.tolist(), "cone": predicted, "oracle": reached,
                    "cone_residual": cone_res, "oracle_residual": float(best)})
    return AgreementReport(agree / len(X), len(X), tuple(horizons), steps, bad)


def subset_reach_oracle(A, B, nodes: Sequence[int], horizons: Sequence[float] = DEFAULT_HORIZONS,
                        steps: int = DEFAULT_STEPS, x0=None, extra: int = 4, seed: int | None = 0,
                        tol: float = TAU_LP) -> bool:
    """Oracle verdict on whether the projection onto ``nodes`` covers every target.

    From the origin the projected reachable set is a convex cone, so it is
    the whole coordinate space exactly when it contains every ``+-e_j``.
    From a non-zero ``x0`` the set is that cone shifted by the free
    response ``p``; targets of norm ``10 (1 + |p|)`` cannot all lie in a
    shifted proper cone, so the same test stays exact. ``extra`` random
    directions are added as a cross-check. A horizon succeeds only if all
    targets are met at that horizon.
    """
    A = check_dynamics_matrix(A)
    n = A.shape[0]
    nodes = check_node_subset(nodes, n)
    if not nodes:
        return True
    d = len(nodes)
    rows = [i - 1 for i in nodes]
    dirs = np.vstack([np.eye(d), -np.eye(d), sphere_samples(d, extra, seed)])
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
    for T in horizons:
        Phi, M = discrete_maps(A, B, T, steps)
        p = (Phi @ x0)[rows]
        s = _TARGET_MARGIN * (1.0 + np.linalg.norm(p))
        if all(_feasible(M[rows], s * t - p, tol)[0] for t in dirs):
            return True
    return False


@dataclass
class SubsetAgreement:
    fraction: float
    cases: int
    disagreements: list[dict] = field(default_factory=list)


def subset_agreement(A, B, horizons: Sequence[float] = DEFAULT_HORIZONS, steps: int = DEFAULT_STEPS,
                     seed: int | None = 0, tol: float = TAU_LP, cone=None) -> SubsetAgreement:
    """Projection test against the oracle for every non-empty node subset.

    Each subset is checked twice: reachability from the origin and
    controllability from a random initial state. Both verdicts are compared
    with the one predicted from the cone.
    """
    from .cone import analyze
    from .subset import is_subset_controllable

    A = check_dynamics_matrix(A)
    n = A.shape[0]
    B = check_input_matrix(B, n)
    cone = cone if cone is not None else analyze(A, B, tau_lp=tol)
    rng = np.random.default_rng(seed)
    agree, total, bad = 0, 0, []
    for size in range(1, n + 1):
        for nodes in itertools.combinations(range(1, n + 1), size):
            predicted = is_subset_controllable(cone, nodes)
            x0 = rng.standard_normal(n)
            for label, start in (("reach", None), ("control", x0)):
                seen = subset_reach_oracle(A, B, nodes, horizons, steps, start,
                                           seed=int(rng.integers(2**31)), tol=tol)
                total += 1
                if seen == predicted:
                    agree += 1
                else:
                    bad.append({"nodes": list(nodes), "mode": label, "cone": predicted, "oracle": seen})
    return SubsetAgreement(agree / total if total else 1.0, total, bad)
