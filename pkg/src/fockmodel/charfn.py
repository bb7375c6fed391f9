"""Characteristic functions of row contractions at finite truncation.

The multi-analytic characteristic function of a row contraction T is built
from the defects and a Neumann series; at truncation degree d the series is a
finite sum (the degree-raising operator is nilpotent), so the matrix computed
here *is* the compression of the untruncated object to degrees <= d -- no
series is ever cut off mid-air.

Layout: with d_T / d_star the defect ranks, the matrix maps
(words) (x) C^{d_star} -> (words) (x) C^{d_T}, word-major on both sides, so
entry blocks are read off by reshaping to (words, d_T, words, d_star).

Fourier data: the block of word alpha = (a_1, ..., a_p) in the vacuum column
is

    theta_(alpha) = basis* Delta T_{a_p}* ... T_{a_2}* sel_{a_1} Delta_* basis_*,

and the empty word carries -basis* [T_1 ... T_n] basis_*.  (sel_i picks the
i-th block of C^n (x) C^m.)  These blocks drive the scalar evaluation in the
commuting case and the cheap unitary-invariance checks.

Constrained version: for T satisfying a family of polynomial relations, the
relation span M (x) defect is invariant under the function (exactly, also at
truncation), so compressing rows and columns to N = M-perp loses nothing:
the factorization against the constrained Poisson kernel,

    I - Theta_J Theta_J* = K_J K_J*    (plus the exact truncation tail),

survives compression verbatim.  For graded relation families the same matrix
can be assembled directly on N with the compressed shifts ("series" method);
both routes are implemented and checked against each other, as they fail in
different ways if the subspace machinery is wrong.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .contractions import (
    as_matrices,
    constraint_residual,
    defects,
    truncation_tail,
    DefectData,
)
from .fock import TruncatedFockSpace, Word, right_creation_tuple
from .ideals import ConstrainedSubspace, PolyIdealSpec, constrained_creation_tuple
from .linalg import adj, opnorm, psd_sqrt

_SERIES_AGREEMENT_TOL = 1e-10


@dataclasses.dataclass
class CharFn:
    """A (possibly constrained) truncated characteristic function."""

    matrix: np.ndarray
    space: TruncatedFockSpace
    defect: DefectData
    tail_bound: float
    constrained: bool = False
    sub: ConstrainedSubspace | None = None
    method: str = "full"
    coinvariance_leak: float | None = None
    series_agreement: float | None = None

    @property
    def d_T(self) -> int:
        return self.defect.d_T

    @property
    def d_star(self) -> int:
        return self.defect.d_star

    @property
    def block_count(self) -> int:
        """Number of word blocks per side (dim N when constrained)."""
        return self.sub.dim_N if self.constrained else self.space.dim

    def _reshaped(self) -> np.ndarray:
        b = self.block_count
        return self.matrix.reshape(b, self.d_T, b, self.d_star)

    def _word_coords(self, word: Word) -> tuple[np.ndarray, np.ndarray]:
        """Row coordinates of e_word and column coordinates of the vacuum."""
        idx = self.space.index(word)
        if self.constrained:
            nb = self.sub.N_basis
            return nb[idx, :], nb[0, :].conj()
        row = np.zeros(self.space.dim)
        row[idx] = 1.0
        col = np.zeros(self.space.dim)
        col[0] = 1.0
        return row, col


def fourier_block(cf: CharFn, word) -> np.ndarray:
    """The d_T x d_star coefficient block of the given word.

    For a constrained function this is the block of the compressed expansion;
    it agrees with the unconstrained block because the compression is exact
    (and is near-zero for every word when the tuple is the constrained shift
    itself).  If the vacuum is not in N the expansion is empty and blocks are
    zero by convention.
    """
    w = tuple(word)
    if not cf.constrained:
        idx = cf.space.index(w)
        return cf.matrix[idx * cf.d_T : (idx + 1) * cf.d_T, 0 : cf.d_star].copy()
    rows, cols = cf._word_coords(w)
    return np.einsum("j,jalb,l->ab", rows, cf._reshaped(), cols)


def fourier_sum(cf: CharFn, z) -> np.ndarray:
    """sum_alpha z^alpha theta_(alpha) over all truncated words.

    z is a point of C^n; z^alpha multiplies the letters along the word.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape != (cf.space.n,):
        raise ValueError(f"need a point of C^{cf.space.n}, got shape {z.shape}")
    coherent = np.empty(cf.space.dim, dtype=complex)
    for iw, w in enumerate(cf.space.words):
        val = 1.0 + 0.0j
        for a in w:
            val *= z[a - 1]
        coherent[iw] = val
    if cf.constrained:
        rows = coherent @ cf.sub.N_basis
        cols = cf.sub.N_basis[0, :].conj()
    else:
        rows = coherent
        cols = np.zeros(cf.space.dim)
        cols[0] = 1.0
    return np.einsum("j,jalb,l->ab", rows, cf._reshaped(), cols)


def characteristic_function(
    ts,
    space: TruncatedFockSpace,
    *,
    defect: DefectData | None = None,
) -> CharFn:
    """Unconstrained truncated characteristic function of a row contraction."""
    mats = as_matrices(ts)
    if defect is None:
        defect = defects(mats)
    matrix = _assemble(
        mats,
        right_creation_tuple(space),
        space.d,
        defect,
        block_dim=space.dim,
    )
    return CharFn(
        matrix=matrix,
        space=space,
        defect=defect,
        tail_bound=truncation_tail(mats, space.d),
        constrained=False,
        method="full",
    )


def constrained_characteristic_function(
    ts,
    sub: ConstrainedSubspace,
    *,
    method: str = "compression",
    cross_check: bool = True,
    defect: DefectData | None = None,
    relation_tol: float = 1e-8,
    cross_check_dim_cap: int = 1500,
) -> CharFn:
    """Characteristic function compressed to the constrained subspace.

    method="compression" computes the unconstrained function and compresses
    both sides by the N basis; method="series" (graded relation families
    only) assembles the same matrix directly on N with the compressed shift
    operators, which is the only affordable route when the tuple itself acts
    on a space as large as N (e.g. certifying the constrained shift).

    With cross_check=True and a graded, nontrivial relation family, whichever
    route was not taken is also computed (when its ambient size stays under
    ``cross_check_dim_cap``) and the two matrices must agree to 1e-10; the
    agreement is recorded on the result.  The routes share no subspace code
    beyond the N basis itself, so this guards the whole constraint pipeline.
    """
    mats = as_matrices(ts)
    residual = constraint_residual(mats, sub.spec)
    if residual > relation_tol:
        raise ValueError(
            f"tuple violates the polynomial relations: residual {residual:.3e} "
            f"exceeds {relation_tol:.0e}"
        )
    if defect is None:
        defect = defects(mats)
    if method not in ("compression", "series"):
        raise ValueError(f"unknown method {method!r}")
    if method == "series" and not sub.graded:
        raise ValueError(
            "the series route needs every relation homogeneous (graded family); "
            "use method='compression'"
        )

    full_matrix: np.ndarray | None = None
    if method == "compression":
        full_matrix = _assemble(
            mats, right_creation_tuple(sub.space), sub.space.d, defect, block_dim=sub.space.dim
        )
        matrix = _compress_blocks(full_matrix, sub.N_basis, sub.N_basis, defect)
    else:
        matrix = _series_matrix(mats, sub, defect)

    series_agreement = None
    trivial_family = sub.dim_M == 0  # no relations: both routes are literally the same code path
    if cross_check and sub.graded and not trivial_family:
        other: np.ndarray | None = None
        if method == "compression":
            other = _series_matrix(mats, sub, defect)
        elif sub.space.dim * mats[0].shape[0] <= cross_check_dim_cap:
            full_matrix = _assemble(
                mats, right_creation_tuple(sub.space), sub.space.d, defect, block_dim=sub.space.dim
            )
            other = _compress_blocks(full_matrix, sub.N_basis, sub.N_basis, defect)
        if other is not None:
            series_agreement = opnorm(matrix - other)
            if series_agreement > _SERIES_AGREEMENT_TOL:
                raise RuntimeError(
                    f"compression and series routes disagree by {series_agreement:.3e}; "
                    "the constrained-subspace machinery is inconsistent"
                )

    leak = None
    if full_matrix is not None and sub.dim_M:
        # Invariance of the relation span: rows in N, columns in M vanish.
        leak_mat = _compress_blocks(full_matrix, sub.N_basis, sub.M_basis, defect)
        leak = opnorm(leak_mat)
        if leak > max(1e-8, 100.0 * max(residual, 1e-16)) and sub.graded:
            raise RuntimeError(
                f"characteristic function leaks {leak:.3e} from the relation span "
                "into the constrained subspace"
            )

    return CharFn(
        matrix=matrix,
        space=sub.space,
        defect=defect,
        tail_bound=truncation_tail(mats, sub.space.d),
        constrained=True,
        sub=sub,
        method=method,
        coinvariance_leak=leak,
        series_agreement=series_agreement,
    )


def _assemble(
    mats: list[np.ndarray],
    raising: list[np.ndarray],
    d: int,
    defect: DefectData,
    *,
    block_dim: int,
) -> np.ndarray:
    """Shared assembly: -I(x)row + I(x)Delta (sum A^k) R_amp I(x)Delta_*,
    compressed to the defect bases, with A = sum_i raising_i (x) T_i*.

    ``raising`` is the right-creation tuple of the ambient space (full route)
    or the compressed one on N (series route); nilpotency of degree raising
    makes the k-sum finite and exact either way.
    """
    n = len(mats)
    m = mats[0].shape[0]
    row = np.hstack(mats)
    amb = block_dim * m
    a = np.zeros((amb, amb), dtype=complex)
    for i in range(n):
        a += np.kron(raising[i], adj(mats[i]))
    total = np.eye(amb, dtype=complex)
    acc = np.eye(amb, dtype=complex)
    for _ in range(d):
        acc = a @ acc
        total += acc
    r_amp = np.zeros((amb, block_dim * n * m), dtype=complex)
    sel = np.zeros((m, n * m), dtype=complex)
    for i in range(n):
        sel[:, :] = 0.0
        sel[:, i * m : (i + 1) * m] = np.eye(m)
        r_amp += np.kron(raising[i], sel)
    eye_b = np.eye(block_dim, dtype=complex)
    full = -np.kron(eye_b, row) + np.kron(eye_b, defect.delta) @ total @ r_amp @ np.kron(
        eye_b, defect.delta_star
    )
    # Compress C^m -> defect and C^{nm} -> dual defect, blockwise.
    resh = full.reshape(block_dim, m, block_dim, n * m)
    resh = np.tensordot(adj(defect.basis), resh, axes=(1, 1))       # (d_T, blk, blk, nm)
    resh = np.moveaxis(resh, 0, 1)                                   # (blk, d_T, blk, nm)
    resh = np.tensordot(resh, defect.basis_star, axes=(3, 0))        # (blk, d_T, blk, d_star)
    return np.ascontiguousarray(resh).reshape(
        block_dim * defect.d_T, block_dim * defect.d_star
    )


def _series_matrix(mats: list[np.ndarray], sub: ConstrainedSubspace, defect: DefectData) -> np.ndarray:
    raising = constrained_creation_tuple(sub, "right")
    return _assemble(mats, raising, sub.space.d, defect, block_dim=sub.dim_N)


def _compress_blocks(
    theta: np.ndarray, left: np.ndarray, right: np.ndarray, defect: DefectData
) -> np.ndarray:
    """(left* (x) I_dT) theta (right (x) I_dstar) via reshapes."""
    dim = left.shape[0]
    resh = theta.reshape(dim, defect.d_T, dim, defect.d_star)
    resh = np.tensordot(left.conj(), resh, axes=(0, 0))              # (L, d_T, dim, d_star)
    resh = np.tensordot(resh, right, axes=(2, 0))                    # (L, d_T, d_star, R)
    resh = np.moveaxis(resh, 3, 2)                                   # (L, d_T, R, d_star)
    return np.ascontiguousarray(resh).reshape(
        left.shape[1] * defect.d_T, right.shape[1] * defect.d_star
    )


def factorization_defect(theta: CharFn, kernel) -> float:
    """| I - Theta Theta* - K K* |, the joint defect of the factorization.

    For a pure tuple this is rounding-level at truncation; in general it is
    bounded by the recorded truncation tails.
    """
    if theta.constrained != kernel.constrained:
        raise ValueError("mixing a constrained function with an unconstrained kernel (or vice versa)")
    p = theta.matrix.shape[0]
    if kernel.matrix.shape[0] != p:
        raise ValueError(
            f"row spaces disagree: function has {p} rows, kernel {kernel.matrix.shape[0]}"
        )
    eye = np.eye(p, dtype=complex)
    return opnorm(eye - theta.matrix @ adj(theta.matrix) - kernel.matrix @ adj(kernel.matrix))


@dataclasses.dataclass
class DeltaClassification:
    """Pointwise defect of the function plus inner/outer verdicts."""

    delta: np.ndarray
    inner: bool
    outer: bool
    partial_isometry_residual: float
    inner_threshold: float
    outer_threshold: float
    singular_values: np.ndarray
    rank_deficiency: int


def delta_and_classify(theta: CharFn, *, tail_bound: float | None = None) -> DeltaClassification:
    """Compute Delta = (I - Theta*Theta)^(1/2) and decide inner / outer.

    Inner means Theta is a partial isometry; at truncation the residual
    |(Theta*Theta)^2 - Theta*Theta| of an inner function equals exactly the
    tail the degree cap forgets, so the threshold adds the recorded
    tail_bound (pass 0.0 to force the flat cutoff).  Outer means dense range,
    decided by codomain-rank fullness with an absolute cutoff on squared
    singular values; the deficiency it counts is dim ker(Theta*), the same
    number the kernel-side route sees as dim ker(I - K*K).
    """
    tail = theta.tail_bound if tail_bound is None else float(tail_bound)
    gram = adj(theta.matrix) @ theta.matrix
    delta = psd_sqrt(np.eye(gram.shape[0], dtype=complex) - gram)
    residual = opnorm(gram @ gram - gram)
    inner_threshold = 1e-8 + tail
    outer_threshold = 1e-8
    svals = np.linalg.svd(theta.matrix, compute_uv=False)
    rows = theta.matrix.shape[0]
    full_rank_count = int(np.count_nonzero(svals**2 > outer_threshold))
    # Dense range fails exactly on ker(Theta*), so the deficiency is counted
    # against the codomain; this is the same number the kernel route sees as
    # dim ker(I - K*K).
    deficiency = rows - full_rank_count
    return DeltaClassification(
        delta=delta,
        inner=bool(residual < inner_threshold),
        outer=bool(deficiency == 0),
        partial_isometry_residual=float(residual),
        inner_threshold=float(inner_threshold),
        outer_threshold=float(outer_threshold),
        singular_values=svals,
        rank_deficiency=int(deficiency),
    )


def eval_commutative(ts, z, *, defect: DefectData | None = None) -> np.ndarray:
    """Value of the characteristic function at a scalar point (commuting case).

    For a commuting tuple the Fourier expansion collapses to a function on
    the unit ball of C^n; this evaluates it in closed form,

        basis* ( -row + Delta (I - sum z_i T_i*)^(-1) [z_1 I ... z_n I] Delta_* ) basis_*,

    requiring |z|_2 < 1.  For n = 1 this is the classical Moebius-type symbol.
    The truncated Fourier sum approaches this value with an error controlled
    by |z|^(d+1)/(1 - |z|).
    """
    mats = as_matrices(ts)
    z = np.asarray(z, dtype=complex).ravel()
    n, m = len(mats), mats[0].shape[0]
    if z.shape != (n,):
        raise ValueError(f"need a point of C^{n}, got shape {z.shape}")
    if np.linalg.norm(z) >= 1.0:
        raise ValueError(f"point must lie in the open unit ball, |z| = {np.linalg.norm(z):.4f}")
    if n > 1:
        residual = constraint_residual(mats, PolyIdealSpec(n=n, kind="commutative"))
        if residual > 1e-8:
            raise ValueError(
                f"tuple does not commute (residual {residual:.3e}); "
                "the scalar evaluation only makes sense for commuting tuples"
            )
    if defect is None:
        defect = defects(mats)
    row = np.hstack(mats)
    core = np.eye(m, dtype=complex)
    for i in range(n):
        core = core - z[i] * adj(mats[i])
    zrow = np.hstack([z[i] * np.eye(m, dtype=complex) for i in range(n)])
    inner = -row + defect.delta @ np.linalg.solve(core, zrow) @ defect.delta_star
    return adj(defect.basis) @ inner @ defect.basis_star


def coincidence_necessary_mismatch(t1: CharFn, t2: CharFn) -> float:
    """A cheap necessary condition for the two functions to coincide.

    Coinciding functions have Fourier blocks related by fixed unitaries on
    both sides, so each word's singular values match.  Returns the largest
    per-word discrepancy between sorted singular values (infinity when the
    shapes already rule coincidence out).  A large value certifies that the
    functions do not coincide; a small one proves nothing by itself.
    """
    if (t1.d_T, t1.d_star) != (t2.d_T, t2.d_star):
        return float("inf")
    if (t1.space.n, t1.space.d) != (t2.space.n, t2.space.d):
        return float("inf")
    worst = 0.0
    for w in t1.space.words:
        s1 = np.linalg.svd(fourier_block(t1, w), compute_uv=False)
        s2 = np.linalg.svd(fourier_block(t2, w), compute_uv=False)
        worst = max(worst, float(np.max(np.abs(s1 - s2))) if s1.size else 0.0)
    return worst
