"""Functional model reconstruction and unitary-equivalence certificates.

From a (constrained) characteristic function Theta with pointwise defect
Delta = (I - Theta*Theta)^(1/2), form the isometric column

    Phihat = [ Theta ; E* Delta ] : C^q -> C^(p+s),

where E is an orthonormal basis of the range of Delta (s = rank).  The model
space is H = C^(p+s) (-) ran Phihat, and the model operators are the
compressions to H of

    M_i = (compressed shift_i (x) I_{d_T})  (+)  0_s.

Two independent reconstructions of the operators are available: the defining
compression above ("general"), and, for a pure tuple, the compression of the
shifts to the orthogonal complement of the large-singular-value range of
Theta alone ("pure"), whose basis never touches the Delta block.  At exact
truncation both agree to rounding; their disagreement is otherwise of the
order of the truncation tail and is reported, never hidden.

The unitary from the original space onto H sends h to (K h, 0) with K the
constrained Poisson kernel; its matrix in the model basis, Gamma, is computed
by projection and comes with unitarity / embedding / intertwining residuals,
all rounding-level plus tail.

Coincidence machinery: a spatial unitary U with T'_i = U T_i U* induces
unitaries tau / tau_star between the defect spaces, and the characteristic
functions then coincide,

    (I (x) tau) Theta_J = Theta'_J (I (x) tau_star),

exactly at truncation.  Conversely, a coincidence witness transports the
whole model: it maps Phihat-ranges onto each other, hence model space to
model space, intertwines the model operators, and finally recovers a unitary
V between the original spaces with V T_i = T'_i V.  Every one of these steps
is verified numerically and reported.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .charfn import CharFn, constrained_characteristic_function
from .contractions import Classification, TriState, as_matrices, defects
from .fock import left_creation
from .ideals import ConstrainedSubspace, constrained_creation
from .linalg import (
    adj,
    canonical_phase,
    opnorm,
    principal_angles,
    psd_sqrt,
    range_basis_psd,
    unitary_polar_factor,
)
from .poisson import KernelMatrix, constrained_poisson_kernel


@dataclasses.dataclass
class ModelData:
    """Model space data built from one characteristic function."""

    theta: CharFn
    delta: np.ndarray
    E: np.ndarray
    phihat: np.ndarray
    isometry_residual: float
    H_basis: np.ndarray
    H_pure_basis: np.ndarray | None
    tail_bound: float

    @property
    def p(self) -> int:
        return self.theta.matrix.shape[0]

    @property
    def q(self) -> int:
        return self.theta.matrix.shape[1]

    @property
    def s(self) -> int:
        return self.E.shape[1]

    @property
    def h(self) -> int:
        return self.H_basis.shape[1]


def build_model(theta: CharFn, *, classification: Classification | None = None) -> ModelData:
    """Assemble the model space of a characteristic function.

    Refuses tuples certified not completely noncoisometric: the model space
    then misses part of the original space and nothing downstream would be
    meaningful.  (UNDETERMINED is allowed through; residuals will tell.)
    """
    if classification is not None and classification.cnc is TriState.NO:
        raise ValueError(
            "the tuple has a norm-preserved vector (not completely noncoisometric); "
            "it admits no model of this kind"
        )
    th = theta.matrix
    p, q = th.shape
    gram = adj(th) @ th
    eye_q = np.eye(q, dtype=complex)
    delta = psd_sqrt(eye_q - gram)
    e_basis, _ = range_basis_psd(eye_q - gram, rank_tol=1e-10)
    s = e_basis.shape[1]
    phihat = np.vstack([th, adj(e_basis) @ delta])
    isometry_residual = opnorm(adj(phihat) @ phihat - eye_q)

    u, svals, _ = np.linalg.svd(phihat, full_matrices=True)
    rank = int(np.count_nonzero(svals > 0.5))  # isometry: singular values sit at 1
    h_basis = canonical_phase(u[:, rank:])

    tail = theta.tail_bound
    h_pure = None
    if tail < 0.5:
        u_th, s_th, _ = np.linalg.svd(th, full_matrices=True)
        big = int(np.count_nonzero(s_th**2 > 0.5 * (1.0 + tail)))
        pure_cols = canonical_phase(u_th[:, big:])
        h_pure = np.vstack([pure_cols, np.zeros((s, pure_cols.shape[1]), dtype=complex)])

    return ModelData(
        theta=theta,
        delta=delta,
        E=e_basis,
        phihat=phihat,
        isometry_residual=float(isometry_residual),
        H_basis=h_basis,
        H_pure_basis=h_pure,
        tail_bound=tail,
    )


def _shift_tuple(theta: CharFn) -> list[np.ndarray]:
    if theta.constrained:
        return [constrained_creation(theta.sub, i, "left") for i in range(1, theta.space.n + 1)]
    return [left_creation(theta.space, i) for i in range(1, theta.space.n + 1)]


def _shift_rows(model_cols: np.ndarray, shift: np.ndarray, d_T: int, p: int) -> np.ndarray:
    """(shift (x) I_dT) applied to the first p rows of a model basis."""
    h1 = model_cols[:p, :]
    blocks = shift.shape[0]
    resh = h1.reshape(blocks, d_T, h1.shape[1])
    return np.tensordot(shift, resh, axes=(1, 0)).reshape(p, h1.shape[1])


def _compress_to(model_cols: np.ndarray, shift: np.ndarray, d_T: int, p: int) -> np.ndarray:
    """H* (shift (x) I_dT (+) 0) H for a basis whose first p rows matter."""
    return adj(model_cols[:p, :]) @ _shift_rows(model_cols, shift, d_T, p)


@dataclasses.dataclass
class ModelOperators:
    general: list[np.ndarray]
    pure: list[np.ndarray] | None
    branch_agreement: list[float] | None
    defining_residual: list[float]
    injectivity_margin: float
    used: str
    basis: np.ndarray  # the model-space basis the chosen branch is written in

    @property
    def Tt(self) -> list[np.ndarray]:
        return self.pure if self.used == "pure" else self.general


def model_operators(
    model: ModelData, *, classification: Classification | None = None
) -> ModelOperators:
    """Realize the ambient shifts on the model space, on both branches.

    The general branch solves the defining relation of the adjoint model
    operators -- (project to the first summand) o Tt_i* = (raising adjoint)
    o (project to the first summand) on the model space -- in the least
    squares sense, recording the per-generator residual.  That residual
    measures how far the truncation tilted the model space and scales with
    sqrt(tail_bound); the solution itself is accurate to the tail, as the
    branch agreement shows.  The projection must be injective on the model
    space; its smallest singular value is the margin, and falling under 1e-8
    means the input is numerically not completely noncoisometric (or the
    truncation degree too small), which is an error.

    The pure branch is the direct compression of the shifts, used as the
    canonical answer when purity is certified (its basis is independent of
    the defect block); otherwise the general solution is.  When both exist
    with matching dimensions their disagreement after a polar alignment of
    the bases is recorded per generator -- a real measure of how much the
    truncation tilted the model space, vanishing at rounding level when the
    tail does.
    """
    theta = model.theta
    d_T = theta.d_T
    p = model.p
    shifts = _shift_tuple(theta)
    h1 = model.H_basis[:p, :]
    if h1.shape[1]:
        sigma_min = float(np.linalg.svd(h1, compute_uv=False)[-1])
    else:
        sigma_min = 0.0
    if h1.shape[1] and sigma_min <= 1e-8:
        raise ValueError(
            "the model space projects degenerately onto its shift summand "
            f"(smallest singular value {sigma_min:.3e}); the tuple is numerically "
            "not completely noncoisometric or the truncation degree is too small"
        )
    general = []
    defining = []
    for s_i in shifts:
        rhs = _shift_rows(model.H_basis, adj(s_i), d_T, p)
        x, *_ = np.linalg.lstsq(h1, rhs, rcond=None)
        general.append(adj(x))
        defining.append(float(opnorm(h1 @ x - rhs)))
    pure = None
    agreement = None
    if model.H_pure_basis is not None and model.H_pure_basis.shape[1] == model.h:
        pure = [_compress_to(model.H_pure_basis, s_i, d_T, p) for s_i in shifts]
        omega = unitary_polar_factor(adj(model.H_basis) @ model.H_pure_basis)
        agreement = [
            float(opnorm(omega @ tp @ adj(omega) - tg)) for tp, tg in zip(pure, general)
        ]
    used = "general"
    if pure is not None and classification is not None and classification.pure is TriState.YES:
        used = "pure"
    basis = model.H_pure_basis if used == "pure" else model.H_basis
    return ModelOperators(
        general=general,
        pure=pure,
        branch_agreement=agreement,
        defining_residual=defining,
        injectivity_margin=sigma_min,
        used=used,
        basis=basis,
    )


@dataclasses.dataclass
class GammaResult:
    gamma: np.ndarray
    embedding_residual: float
    unitary_residual: float
    intertwining: dict[int, float]
    norm_identity_residual: float
    projection_residual: float
    used_branch: str


def model_unitary(model: ModelData, kernel: KernelMatrix, ops: ModelOperators) -> GammaResult:
    """Matrix of the canonical identification h -> (K h, 0) in the model basis.

    Returns Gamma together with how far (K h, 0) sticks out of the model
    space, how far Gamma is from unitary, and the intertwining residuals
    against the chosen model operators.  Two defining identities of the
    identification are verified on the side: column-wise |K* g| equals the
    norm of the model-space projection of (g, 0) (norm_identity_residual),
    and projecting Gamma's range back onto the shift summand recovers the
    kernel matrix (projection_residual).  All of these are zero at rounding
    level when the truncation tail is.
    """
    if kernel.constrained != model.theta.constrained:
        raise ValueError("kernel and characteristic function disagree about the constraint")
    k = kernel.matrix
    if k.shape[0] != model.p:
        raise ValueError(f"kernel has {k.shape[0]} rows, expected {model.p}")
    emb = np.vstack([k, np.zeros((model.s, k.shape[1]), dtype=complex)])
    # Gamma must live in the same coordinates as the chosen operator branch.
    basis = ops.basis
    gamma = adj(basis) @ emb
    embedding_residual = opnorm(basis @ gamma - emb)
    eye_h = np.eye(model.h, dtype=complex)
    eye_m = np.eye(gamma.shape[1], dtype=complex)
    unitary_residual = max(
        opnorm(adj(gamma) @ gamma - eye_m),
        opnorm(gamma @ adj(gamma) - eye_h) if model.h == gamma.shape[1] else np.inf,
    )
    mats = kernel.mats
    inter: dict[int, float] = {}
    for i, (tt, t) in enumerate(zip(ops.Tt, mats), start=1):
        co = opnorm(adj(tt) @ gamma - gamma @ adj(t))
        direct = opnorm(tt @ gamma - gamma @ t)
        inter[i] = float(max(co, direct))
    h1 = basis[: model.p, :]
    # |K* g_j| vs |P_model (g_j, 0)| over the standard basis of the shift summand:
    # K* columns are conjugated kernel rows, the projections are basis rows.
    col_norms_k = np.linalg.norm(k, axis=1)
    col_norms_p = np.linalg.norm(h1, axis=1)
    norm_identity = float(np.max(np.abs(col_norms_k - col_norms_p))) if model.p else 0.0
    projection_residual = float(opnorm(h1 @ gamma - k))
    return GammaResult(
        gamma=gamma,
        embedding_residual=float(embedding_residual),
        unitary_residual=float(unitary_residual),
        intertwining=inter,
        norm_identity_residual=norm_identity,
        projection_residual=projection_residual,
        used_branch=ops.used,
    )


@dataclasses.dataclass
class CoincidenceWitness:
    """Defect-space unitaries transporting one characteristic function onto another."""

    u: np.ndarray
    tau: np.ndarray
    tau_star: np.ndarray
    residual: float
    conjugation_residual: float
    theta: CharFn
    theta_p: CharFn


def coincidence_from_unitary(
    ts,
    ts_p,
    u: np.ndarray,
    sub: ConstrainedSubspace,
    *,
    theta: CharFn | None = None,
    theta_p: CharFn | None = None,
) -> CoincidenceWitness:
    """Build the coincidence witness induced by a spatial unitary.

    Verifies first that T'_i = U T_i U* actually holds (this is an input
    contract, not something to silently repair), then forms the defect
    unitaries tau = basis'* U basis and tau_star = basis'* (I (x) U) basis_*
    and evaluates the coincidence residual

        | (I (x) tau) Theta - Theta' (I (x) tau_star) |,

    which vanishes at truncation up to rounding whenever the input contract
    holds.
    """
    mats = as_matrices(ts)
    mats_p = as_matrices(ts_p)
    u = np.asarray(u, dtype=complex)
    m = mats[0].shape[0]
    if u.shape != (m, m):
        raise ValueError(f"unitary has shape {u.shape}, expected ({m}, {m})")
    if opnorm(u @ adj(u) - np.eye(m)) > 1e-10:
        raise ValueError("the supplied matrix is not unitary")
    conj_residual = max(
        opnorm(tp - u @ t @ adj(u)) for t, tp in zip(mats, mats_p)
    )
    if conj_residual > 1e-10:
        raise ValueError(
            f"the tuples are not conjugated by the supplied unitary "
            f"(residual {conj_residual:.3e})"
        )
    if theta is None:
        theta = constrained_characteristic_function(mats, sub)
    if theta_p is None:
        theta_p = constrained_characteristic_function(mats_p, sub)
    dft = defects(mats)
    dft_p = defects(mats_p)
    n = len(mats)
    tau = adj(dft_p.basis) @ u @ dft.basis
    tau_star = adj(dft_p.basis_star) @ np.kron(np.eye(n, dtype=complex), u) @ dft.basis_star
    lhs = _kron_left(tau, theta.matrix, theta.d_T)
    rhs = _kron_right(theta_p.matrix, tau_star, theta_p.d_star)
    residual = opnorm(lhs - rhs)
    return CoincidenceWitness(
        u=u,
        tau=tau,
        tau_star=tau_star,
        residual=float(residual),
        conjugation_residual=float(conj_residual),
        theta=theta,
        theta_p=theta_p,
    )


def _kron_left(tau: np.ndarray, mat: np.ndarray, d_in: int) -> np.ndarray:
    """(I_blocks (x) tau) @ mat, where mat rows come in blocks of size d_in."""
    blocks = mat.shape[0] // d_in
    resh = mat.reshape(blocks, d_in, mat.shape[1])
    out = np.tensordot(tau, resh, axes=(1, 1))          # (d_out, blocks, cols)
    out = np.moveaxis(out, 0, 1)
    return np.ascontiguousarray(out).reshape(blocks * tau.shape[0], mat.shape[1])


def _kron_right(mat: np.ndarray, tau: np.ndarray, d_out: int) -> np.ndarray:
    """mat @ (I_blocks (x) tau), where mat columns come in blocks of size d_out."""
    blocks = mat.shape[1] // d_out
    resh = mat.reshape(mat.shape[0], blocks, d_out)
    out = np.tensordot(resh, tau, axes=(2, 0))          # (rows, blocks, d_in)
    return np.ascontiguousarray(out).reshape(mat.shape[0], blocks * tau.shape[1])


@dataclasses.dataclass
class EquivalenceReport:
    """Full audit trail of coincidence => unitary equivalence."""

    coincidence_residual: float
    max_principal_angle: float
    model_intertwining: float
    gamma: GammaResult
    gamma_p: GammaResult
    defining_residuals: list[float]
    recovered_unitary: np.ndarray
    recovered_intertwining: float
    recovered_unitarity: float
    phase_deviation: float
    equivalent: bool


def verify_coincidence_implies_equivalence(
    ts,
    ts_p,
    witness: CoincidenceWitness,
    sub: ConstrainedSubspace,
    *,
    classification: Classification | None = None,
    classification_p: Classification | None = None,
) -> EquivalenceReport:
    """Transport the model along a coincidence witness and recover the unitary.

    The witness unitaries are promoted to a map of model ambient spaces,

        Psi = (I (x) tau)  (+)  E'* (I (x) tau_star) E,

    which must carry model space onto model space (checked via principal
    angles), intertwine the model operators (checked in norm), and induce --
    through the canonical identifications Gamma / Gamma' -- a unitary V
    between the original spaces with V T_i = T'_i V.  V is also compared
    against the witness's own spatial unitary up to a global phase (a genuine
    equality only when the tuple is irreducible; it is reported, not
    asserted).
    """
    mats = as_matrices(ts)
    mats_p = as_matrices(ts_p)
    theta, theta_p = witness.theta, witness.theta_p
    model = build_model(theta, classification=classification)
    model_p = build_model(theta_p, classification=classification_p)
    ops = model_operators(model, classification=classification)
    ops_p = model_operators(model_p, classification=classification_p)
    kernel = constrained_poisson_kernel(mats, sub)
    kernel_p = constrained_poisson_kernel(mats_p, sub)
    gamma = model_unitary(model, kernel, ops)
    gamma_p = model_unitary(model_p, kernel_p, ops_p)

    p, s = model.p, model.s
    p_p, s_p = model_p.p, model_p.s
    psi = np.zeros((p_p + s_p, p + s), dtype=complex)
    psi[:p_p, :p] = _kron_block(witness.tau, p // theta.d_T)
    psi[p_p:, p:] = adj(model_p.E) @ _kron_block(witness.tau_star, model.q // theta.d_star) @ model.E

    moved = psi @ ops.basis
    if model.h == model_p.h and model.h > 0:
        # The subspace comparison must stay within one branch: the general
        # bases transform exactly covariantly under psi, while the pure-branch
        # basis tilts away from the general one by the square root of the
        # tail, which is not an equivalence defect.
        angles = principal_angles(psi @ model.H_basis, model_p.H_basis)
        max_angle = float(np.max(angles)) if angles.size else 0.0
    else:
        max_angle = float("inf")
    u_h = adj(ops_p.basis) @ moved
    inter = 0.0
    for tt, tt_p in zip(ops.Tt, ops_p.Tt):
        inter = max(inter, opnorm(u_h @ tt - tt_p @ u_h))

    v = adj(gamma_p.gamma) @ u_h @ gamma.gamma
    rec_inter = max(opnorm(v @ t - tp @ v) for t, tp in zip(mats, mats_p))
    m = mats[0].shape[0]
    rec_unit = opnorm(v @ adj(v) - np.eye(m, dtype=complex))
    tr = np.trace(v @ adj(witness.u))
    phase = tr / abs(tr) if abs(tr) > 1e-12 else 1.0
    phase_dev = opnorm(v - phase * witness.u)

    equivalent = bool(
        witness.residual < 1e-8
        and max_angle < 1e-6
        and inter < 1e-7
        and rec_inter < 1e-6
        and rec_unit < 1e-6
    )
    return EquivalenceReport(
        coincidence_residual=witness.residual,
        max_principal_angle=max_angle,
        model_intertwining=float(inter),
        gamma=gamma,
        gamma_p=gamma_p,
        defining_residuals=[*ops.defining_residual, *ops_p.defining_residual],
        recovered_unitary=v,
        recovered_intertwining=float(rec_inter),
        recovered_unitarity=float(rec_unit),
        phase_deviation=float(phase_dev),
        equivalent=equivalent,
    )


def _kron_block(tau: np.ndarray, blocks: int) -> np.ndarray:
    return np.kron(np.eye(blocks, dtype=complex), tau)
