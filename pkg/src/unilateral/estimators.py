"""Estimator-style wrappers around the functional API.

``fit`` takes the dynamics matrix; ``predict`` and ``transform`` take a batch
of states (one per row) and score them against the fitted cone.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_dynamics_matrix, check_input_matrix, check_states
from .cone import TAU_LP, ReachableCone, cone_membership, nonnegative_residual, reachable_cone
from .greedy import controllable_subset, place_inputs
from .spectral import EIG_TOL, TAU_ZERO, compute_spectrum, select_left_chains
from .subset import node_flags


class _ConeScoring:
    cone_: ReachableCone

    def predict(self, X) -> np.ndarray:
        """Cone membership of each row of ``X``."""
        check_is_fitted(self, "cone_")
        X = check_states(X, self.cone_.ambient_dim)
        return np.array([cone_membership(self.cone_, x) for x in X], dtype=bool)

    def transform(self, X) -> np.ndarray:
        """Relative L1 distance of each row of ``X`` from the cone (0 inside)."""
        check_is_fitted(self, "cone_")
        X = check_states(X, self.cone_.ambient_dim)
        G = self.cone_.matrix
        norms = np.linalg.norm(G, axis=0)
        out = np.empty(len(X))
        for j, x in enumerate(X):
            nx = np.linalg.norm(x)
            if nx == 0:
                out[j] = 0.0
            elif G.shape[1] == 0:
                out[j] = float(np.sum(np.abs(x)) / nx)
            else:
                out[j] = nonnegative_residual(G / norms, x / nx)[0]
        return out


class UnilateralReachability(_ConeScoring, BaseEstimator):
    """Reachable cone of ``x' = A x + B u`` for a fixed input matrix.

    Parameters
    ----------
    inputs : str or sequence
        Signed-versor columns, e.g. ``"-e6,-e2"``.
    """

    def __init__(self, inputs=None, tol_eig: float = EIG_TOL, tol_zero: float = TAU_ZERO,
                 tol_lp: float = TAU_LP):
        self.inputs = inputs
        self.tol_eig = tol_eig
        self.tol_zero = tol_zero
        self.tol_lp = tol_lp

    def fit(self, A, y=None):
        A = check_dynamics_matrix(A)
        B = check_input_matrix(self.inputs, A.shape[0])
        decomp = compute_spectrum(A, tol=self.tol_eig)
        self.decomposition_ = select_left_chains(decomp, B, self.tol_zero)
        self.cone_ = reachable_cone(self.decomposition_, B, self.tol_zero, self.tol_lp)
        _, self.controllable_nodes_, _, _ = controllable_subset(self.cone_, self.tol_zero)
        self.node_flags_ = np.array(node_flags(self.cone_), dtype=bool)
        self.lineality_dim_ = self.cone_.lineality_dim
        return self


class GreedyInputPlacement(_ConeScoring, BaseEstimator):
    """Greedy choice of ``n_inputs`` unilateral inputs for a network."""

    def __init__(self, n_inputs: int = 1, override=None, random_state: int | None = None,
                 tol_eig: float = EIG_TOL, tol_zero: float = TAU_ZERO, tol_lp: float = TAU_LP):
        self.n_inputs = n_inputs
        self.override = override
        self.random_state = random_state
        self.tol_eig = tol_eig
        self.tol_zero = tol_zero
        self.tol_lp = tol_lp

    def fit(self, A, y=None):
        result = place_inputs(A, self.n_inputs, override=self.override, seed=self.random_state,
                              tol=self.tol_eig, tau_zero=self.tol_zero, tau_lp=self.tol_lp)
        self.result_ = result
        self.input_matrix_ = result.B
        self.cone_ = result.cone
        self.controllable_nodes_ = result.Vs
        self.trace_ = result.trace
        self.lineality_dim_ = result.lineality_dim
        return self
