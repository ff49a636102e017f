"""Jordan structure and generalized eigenvector chains.

The Jordan form is discontinuous in the matrix entries, so every structural
decision here is made against explicit thresholds:

* eigenvalues closer than ``tol * max(1, ||A||_inf)`` are one eigenvalue;
* clusters that a defective eigenvalue splits into (the split grows like
  ``eps**(1/nu)``) are re-joined when the restricted operator is nilpotent
  up to the rank cutoff;
* block sizes follow from the nullities of powers of ``A - lambda I``
  restricted to the cluster's invariant subspace, with singular values
  below ``rank_tol * max(1, ||A||_inf)**k`` treated as zero.

Chain convention: a block of size ``nu`` carries left rows ``l_1..l_nu`` with
``l_k^T A = lambda l_k^T + c_k l_{k+1}^T`` and ``l_nu^T A = lambda l_nu^T``,
and dual right columns with ``A r_1 = lambda r_1``. Every left row has unit
norm, which makes the couplings ``c_k`` positive reals instead of ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from ._validation import check_dynamics_matrix
from .exceptions import SpectralError

EIG_TOL = 1e-8
RANK_TOL = 1e-8
TAU_ZERO = 1e-9
# relative radii inside which split eigenvalues are tested for re-joining
MERGE_RADII = (1e-6, 1e-4, 1e-3, 1e-2)
# independence threshold used when rotating chains inside an eigenspace
_INDEP_TOL = 1e-6
_LEAD_TOL = 1e-8


@dataclass(frozen=True)
class JordanBlock:
    """One Jordan block with its left/right chains.

    ``left`` has shape ``(size, n)`` (rows ``l_1..l_size``), ``right`` has
    shape ``(n, size)``; ``left @ right`` is the identity. ``group`` is shared
    by all blocks of one eigenvalue and ``partner`` points at the conjugate
    block of a complex eigenvalue.
    """

    index: int
    eigenvalue: complex
    size: int
    left: np.ndarray
    right: np.ndarray
    coupling: np.ndarray
    group: int
    partner: int | None = None

    @property
    def is_real(self) -> bool:
        return self.eigenvalue.imag == 0.0

    @property
    def is_representative(self) -> bool:
        """True for real blocks and for the upper member of a conjugate pair."""
        return self.eigenvalue.imag >= 0.0

    def jordan(self) -> np.ndarray:
        J = self.eigenvalue * np.eye(self.size, dtype=complex)
        if self.size > 1:
            J += np.diag(self.coupling.astype(complex), 1)
        return J

    def expm(self, t: float) -> np.ndarray:
        """``exp(J t)`` in closed form (the nilpotent series terminates)."""
        N = np.diag(self.coupling.astype(complex), 1) * t if self.size > 1 else np.zeros((1, 1), complex)
        out = np.eye(self.size, dtype=complex)
        term = np.eye(self.size, dtype=complex)
        for j in range(1, self.size):
            term = term @ N / j
            out = out + term
        return np.exp(self.eigenvalue * t) * out


@dataclass(frozen=True)
class SpectralDecomposition:
    A: np.ndarray
    blocks: tuple[JordanBlock, ...]
    eig_tol: float
    rank_tol: float

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def T(self) -> np.ndarray:
        return np.vstack([b.left for b in self.blocks])

    @property
    def Tinv(self) -> np.ndarray:
        return np.hstack([b.right for b in self.blocks])

    @property
    def J(self) -> np.ndarray:
        return linalg.block_diag(*[b.jordan() for b in self.blocks])

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues repeated according to block size."""
        return np.array([b.eigenvalue for b in self.blocks for _ in range(b.size)])

    @property
    def block_sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def groups(self) -> dict[int, list[JordanBlock]]:
        out: dict[int, list[JordanBlock]] = {}
        for b in self.blocks:
            out.setdefault(b.group, []).append(b)
        return out

    def expm(self, t: float) -> np.ndarray:
        """``exp(A t)`` assembled from the Jordan blocks."""
        E = linalg.block_diag(*[b.expm(t) for b in self.blocks])
        return np.real(self.Tinv @ E @ self.T)

    def residuals(self) -> dict[str, float]:
        T, Tinv = self.T, self.Tinv
        return {
            "similarity": float(np.linalg.norm(T @ self.A - self.J @ T)),
            "inverse": float(np.linalg.norm(T @ Tinv - np.eye(self.n))),
        }


# --------------------------------------------------------------------------
# clustering


@dataclass
class _Cluster:
    members: list[int]
    center: complex
    real: bool


def _make_cluster(eigs: np.ndarray, members: list[int], radius: float) -> _Cluster:
    center = complex(np.mean(eigs[members]))
    real = abs(center.imag) <= radius
    if real:
        center = complex(center.real, 0.0)
    return _Cluster(sorted(members), center, real)


def _single_linkage(eigs: np.ndarray, radius: float) -> list[list[int]]:
    parent = list(range(len(eigs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(eigs)), 2):
        if abs(eigs[i] - eigs[j]) <= radius:
            parent[find(i)] = find(j)
    out: dict[int, list[int]] = {}
    for i in range(len(eigs)):
        out.setdefault(find(i), []).append(i)
    return sorted(out.values(), key=min)


def _restrict(A: np.ndarray, clusters: list[_Cluster], idx: int):
    """Orthonormal basis of the invariant subspace of ``clusters[idx]`` and
    the operator restricted to it, or ``None`` if reordering failed."""
    centers = np.array([c.center for c in clusters])
    target = clusters[idx]
    p = len(target.members)

    def nearest(z: complex) -> bool:
        return int(np.argmin(np.abs(centers - z))) == idx

    try:
        if target.real:
            S, Z, sdim = linalg.schur(A, output="real", sort=lambda x, y: nearest(complex(x, y)))
        else:
            S, Z, sdim = linalg.schur(A.astype(complex), output="complex", sort=nearest)
    except (linalg.LinAlgError, ValueError):
        return None
    if sdim != p:
        return None
    return Z[:, :p], S[:p, :p]


def _staircase(N: np.ndarray, rank_tol: float, scale: float):
    """Nullities and kernels of ``N**k`` until ``N`` is exhausted.

    Returns ``None`` when the nullity sequence is not that of a nilpotent
    operator (the cluster is not one eigenvalue at these tolerances).
    """
    p = N.shape[0]
    P = np.eye(p, dtype=N.dtype)
    nullities, kernels = [], []
    for k in range(1, p + 1):
        P = P @ N
        _, s, Vh = linalg.svd(P)
        r = int(np.sum(s > rank_tol * scale**k))
        nullities.append(p - r)
        kernels.append(Vh[r:].conj().T)
        if r == 0:
            break
    if nullities[-1] != p:
        return None
    steps = np.diff([0] + nullities)
    if steps[0] < 1 or np.any(steps <= 0) or np.any(np.diff(steps) > 0):
        return None
    return nullities, kernels


def _cluster_structure(A, clusters, idx, rank_tol, scale):
    restricted = _restrict(A, clusters, idx)
    if restricted is None:
        return None
    Z1, A1 = restricted
    center = clusters[idx].center
    N = A1 - (center.real if clusters[idx].real else center) * np.eye(A1.shape[0])
    stairs = _staircase(N, rank_tol, scale)
    if stairs is None:
        return None
    return Z1, N, stairs


def _cluster_eigenvalues(A, eigs, radius, rank_tol, scale) -> list[_Cluster]:
    groups = _single_linkage(eigs, radius)
    clusters = [_make_cluster(eigs, g, radius) for g in groups]

    def accept(parts: list[int]) -> bool:
        nonlocal clusters
        members = [m for k in parts for m in clusters[k].members]
        trial = [c for k, c in enumerate(clusters) if k not in parts]
        trial.append(_make_cluster(eigs, members, radius))
        if _cluster_structure(A, trial, len(trial) - 1, rank_tol, scale) is None:
            return False
        clusters = trial
        return True

    for level in MERGE_RADII:
        while True:
            centers = np.array([c.center for c in clusters])
            comps = [c for c in _single_linkage(centers, level * scale) if len(c) > 1]
            # whole neighbourhoods first: a nu-fold split needs all members
            if any(accept(comp) for comp in comps):
                continue
            pairs = sorted(
                (abs(centers[i] - centers[j]), i, j)
                for comp in comps for i, j in itertools.combinations(comp, 2)
            )
            if not any(accept([i, j]) for _, i, j in pairs):
                break
    return clusters


def _cluster_order(c: _Cluster):
    # real modes by decreasing value, then oscillatory pairs by decreasing frequency
    if c.real:
        return (0, -c.center.real, 0.0)
    return (1, -abs(c.center.imag), -c.center.real, -np.sign(c.center.imag))


# --------------------------------------------------------------------------
# chains


def _orth(X: np.ndarray) -> np.ndarray:
    if X.shape[1] == 0:
        return X
    U, s, _ = linalg.svd(X, full_matrices=False)
    return U[:, s > _INDEP_TOL * max(1.0, s[0])]


def _right_chains(N: np.ndarray, nullities: list[int], kernels: list[np.ndarray]) -> list[np.ndarray]:
    """Right Jordan chains ``[r_1..r_h]`` (as ``(p, h)`` arrays), longest first."""
    p = N.shape[0]
    dims = [0] + nullities
    chains: list[list[np.ndarray]] = []
    for h in range(len(nullities), 0, -1):
        carried = [c[h - 1] for c in chains]
        need = (dims[h] - dims[h - 1]) - len(carried)
        if need < 0:
            raise SpectralError("inconsistent Jordan staircase")
        if need == 0:
            continue
        below = kernels[h - 2] if h >= 2 else np.zeros((p, 0), dtype=N.dtype)
        X = np.column_stack([below] + carried) if carried else below
        Q = _orth(X)
        K = kernels[h - 1]
        P = K - Q @ (Q.conj().T @ K)
        U, s, _ = linalg.svd(P, full_matrices=False)
        if len(s) < need or s[need - 1] < _INDEP_TOL:
            raise SpectralError("chain tops are not separable from lower levels")
        for v in U[:, :need].T:
            chain = [v]
            for _ in range(h - 1):
                chain.insert(0, N @ chain[0])
            chains.append(chain)
    return [np.column_stack(c) for c in chains]


def _lead_index(v: np.ndarray) -> int:
    mods = np.abs(v)
    return int(np.flatnonzero(mods >= (1.0 - _LEAD_TOL) * mods.max())[0])


def _unit_coupling(left, right, coupling):
    """Rescale a chain so all couplings are one."""
    alpha = np.concatenate([[1.0], np.cumprod(coupling)]) if len(coupling) else np.ones(1)
    return left * alpha[:, None], right / alpha[None, :]


def _normalize(left: np.ndarray, right: np.ndarray, real: bool):
    """Unit-norm rows, phase fixed on the tail, for a chain with unit couplings."""
    tail = left[-1]
    k = _lead_index(tail)
    phase = tail[k] / abs(tail[k])
    left = left / phase
    right = right * phase
    if real:
        left = left.real.astype(complex)
        right = right.real.astype(complex)
    d = np.linalg.norm(left, axis=1)
    left = left / d[:, None]
    right = right * d[None, :]
    coupling = d[1:] / d[:-1]
    return left, right, coupling


def _assemble(A, entries, eig_tol, rank_tol) -> SpectralDecomposition:
    """Build blocks from ``(eigenvalue, group, right_chain)`` triples.

    ``entries`` holds representatives only; conjugate partners are mirrored.
    """
    rights, meta = [], []
    for eigenvalue, group, chain in entries:
        rights.append(chain)
        meta.append((eigenvalue, group, None))
        if eigenvalue.imag != 0.0:
            rights.append(chain.conj())
            meta.append((eigenvalue.conjugate(), group, "mirror"))
    R = np.hstack(rights).astype(complex)
    n = A.shape[0]
    if R.shape[1] != n:
        raise SpectralError(f"chains cover {R.shape[1]} of {n} dimensions", tol=eig_tol)
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > 1.0 / rank_tol:
        raise SpectralError(f"chain basis is numerically singular (cond {cond:.3g})", tol=rank_tol)
    T = np.linalg.inv(R)
    blocks = []
    col = 0
    for i, (chain, (eigenvalue, group, mirror)) in enumerate(zip(rights, meta)):
        nu = chain.shape[1]
        left, right = T[col:col + nu], R[:, col:col + nu]
        col += nu
        if mirror:
            prev = blocks[-1]
            blocks.append(replace(prev, index=i, eigenvalue=eigenvalue, left=prev.left.conj(),
                                  right=prev.right.conj(), partner=i - 1))
            blocks[-2] = replace(prev, partner=i)
            continue
        left, right, coupling = _normalize(left, right, eigenvalue.imag == 0.0)
        blocks.append(JordanBlock(i, eigenvalue, nu, left, right, coupling, group))
    return SpectralDecomposition(A, tuple(blocks), eig_tol, rank_tol)


def compute_spectrum(A, tol: float = EIG_TOL, rank_tol: float = RANK_TOL) -> SpectralDecomposition:
    """Jordan blocks of ``A`` with unit-norm left chains.

    Parameters
    ----------
    A : (n, n) array_like
        Real dynamics matrix.
    tol : float
        Eigenvalues within ``tol * max(1, ||A||_inf)`` are clustered.
    rank_tol : float
        Relative singular-value cutoff for the rank decisions that fix the
        block sizes.

    Raises
    ------
    SpectralError
        If a cluster has no consistent Jordan structure or the chain basis is
        numerically singular.
    """
    if tol <= 0 or rank_tol <= 0:
        raise ValueError("tolerances must be positive")
    A = check_dynamics_matrix(A)
    scale = max(1.0, float(np.linalg.norm(A, np.inf)))
    eigs = linalg.eigvals(A)
    clusters = _cluster_eigenvalues(A, eigs, tol * scale, rank_tol, scale)
    order = sorted(range(len(clusters)), key=lambda i: _cluster_order(clusters[i]))

    entries = []
    for group, idx in enumerate(order):
        cl = clusters[idx]
        if not cl.real and cl.center.imag < 0:
            continue
        structure = _cluster_structure(A, clusters, idx, rank_tol, scale)
        if structure is None:
            raise SpectralError(
                f"no stable Jordan structure for eigenvalue {cl.center:.6g} "
                f"(cluster of {len(cl.members)})", tol=rank_tol)
        Z1, N, (nullities, kernels) = structure
        for chain in _right_chains(N, nullities, kernels):
            full = Z1 @ chain
            if cl.real:
                full = full.real
            entries.append((cl.center, group, full))
    return _assemble(A, entries, tol, rank_tol)


# --------------------------------------------------------------------------
# chain selection against an input matrix


def _null(H: np.ndarray, atol: float) -> np.ndarray:
    """Vectors ``v`` with ``H.T @ v == 0`` (bilinear, not Hermitian)."""
    if H.shape[1] == 0:
        return np.eye(H.shape[0], dtype=H.dtype)
    _, s, Vh = linalg.svd(H.T)
    r = int(np.sum(s > atol))
    return Vh[r:].conj().T


def _aligning_transform(Z: np.ndarray, tau: float) -> np.ndarray:
    """Mixing matrix for ``c`` simple chains given modal input rows ``Z``.

    Right vectors are aligned with independent input images (in column
    order); the dual left rows beyond them annihilate every input.
    """
    c = Z.shape[0]
    chosen: list[np.ndarray] = []
    for z in Z.T:
        if np.max(np.abs(z), initial=0.0) <= tau:
            continue
        cand = np.column_stack(chosen + [z / np.linalg.norm(z)])
        if linalg.svdvals(cand)[-1] >= _INDEP_TOL:
            chosen.append(z / np.linalg.norm(z))
        if len(chosen) == c:
            break
    if not chosen:
        return np.eye(c, dtype=Z.dtype)
    S = np.column_stack(chosen)
    C = linalg.null_space(S.conj().T)
    return np.linalg.inv(np.column_stack([S, C]))


def _orthogonalizing_transform(Zs: list[np.ndarray], tau: float) -> np.ndarray:
    """Mixing matrix for ``c`` chains of equal length ``nu > 1``.

    Greedily collects coefficient vectors annihilating the inputs on as many
    chain levels as possible.
    """
    c = Zs[0].shape[0]
    rows: list[np.ndarray] = []
    levels = range(len(Zs))
    subsets = [K for r in range(len(Zs), -1, -1) for K in itertools.combinations(levels, r)]
    for K in subsets:
        H = np.hstack([Zs[k] for k in K]) if K else np.zeros((c, 0), dtype=Zs[0].dtype)
        for v in _null(H, tau).T:
            cand = np.vstack(rows + [v])
            if np.linalg.matrix_rank(cand, tol=_INDEP_TOL) > len(rows):
                rows.append(v / np.linalg.norm(v))
            if len(rows) == c:
                return np.vstack(rows)
    return np.vstack(rows)


def select_left_chains(decomp: SpectralDecomposition, B, tau_zero: float = TAU_ZERO) -> SpectralDecomposition:
    """Rotate chains inside repeated eigenvalues to maximize ``l^T B = 0`` rows.

    Only chains of equal length within one eigenvalue are mixed (the same
    coefficients on every level keeps the Jordan structure). Simple
    eigenvalues are returned unchanged.
    """
    from ._validation import check_input_matrix

    Bmat = check_input_matrix(B, decomp.n).to_array(decomp.n)
    blocks = list(decomp.blocks)
    changed = False
    for group_blocks in decomp.groups().values():
        reps = [b for b in group_blocks if b.is_representative]
        by_size: dict[int, list[JordanBlock]] = {}
        for b in reps:
            by_size.setdefault(b.size, []).append(b)
        for size, same in by_size.items():
            if len(same) < 2 or Bmat.shape[1] == 0:
                continue
            changed = True
            real = same[0].is_real
            unit = [_unit_coupling(b.left, b.right, b.coupling) for b in same]
            levels_L = [np.vstack([u[0][k] for u in unit]) for k in range(size)]
            levels_R = [np.column_stack([u[1][:, k] for u in unit]) for k in range(size)]
            if real:
                levels_L = [L.real for L in levels_L]
                levels_R = [R.real for R in levels_R]
            Zs = [L @ Bmat for L in levels_L]
            if size == 1:
                M = _aligning_transform(Zs[0], tau_zero)
            else:
                M = _orthogonalizing_transform(Zs, tau_zero)
            Minv = np.linalg.inv(M)
            new_L = [M @ L for L in levels_L]
            new_R = [R @ Minv for R in levels_R]
            for p, b in enumerate(same):
                left = np.vstack([L[p] for L in new_L]).astype(complex)
                right = np.column_stack([R[:, p] for R in new_R]).astype(complex)
                left, right, coupling = _normalize(left, right, real)
                blocks[b.index] = replace(b, left=left, right=right, coupling=coupling)
                if b.partner is not None:
                    mirror = blocks[b.partner]
                    blocks[b.partner] = replace(mirror, left=left.conj(), right=right.conj(),
                                                coupling=coupling)
    if not changed:
        return decomp
    return replace(decomp, blocks=tuple(blocks))


def orthogonal_count(decomp: SpectralDecomposition, B, tau_zero: float = TAU_ZERO) -> int:
    """Number of chain elements ``l`` with ``l^T B = 0`` entry-wise."""
    from ._validation import check_input_matrix

    Bmat = check_input_matrix(B, decomp.n).to_array(decomp.n)
    if Bmat.shape[1] == 0:
        return decomp.n
    P = decomp.T @ Bmat
    return int(np.sum(np.all(np.abs(P) <= tau_zero, axis=1)))
