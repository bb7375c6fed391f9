"""Row contractions on a finite-dimensional space and their basic invariants.

A tuple T = (T_1, ..., T_n) of m x m matrices is a row contraction when the
row operator [T_1 ... T_n] : C^n (x) C^m -> C^m has norm at most 1, i.e.
sum_i T_i T_i* <= I.  Stacking convention for C^n (x) C^m: the C^n factor is
major, so block i of a length-n*m vector occupies entries [(i-1)*m, i*m).

Two defect operators control the dilation theory:

    Delta   = (I - sum_i T_i T_i*)^(1/2)     on C^m,
    Delta_* = (I - R* R)^(1/2),  R = [T_1 ... T_n],  on C^n (x) C^m,

together with orthonormal bases of their ranges (the defect spaces).

The completely positive map Phi(X) = sum_i T_i X T_i* drives everything
asymptotic: its iterates Q_k = Phi^k(I) decrease monotonically, T is *pure*
when Q_k -> 0 and *completely noncoisometric* (c.n.c.) when no vector is left
fixed in norm, i.e. the limit has no eigenvalue 1.  In finite dimension the
two notions coincide (the limit Q satisfies Q <= |Q| Q_k for every k, hence
|Q| <= |Q|^2, forcing |Q| in {0, 1}, and |Q| = 1 produces an eigenvalue 1);
the classifier still reports both answers as independent tri-state facts,
each only when certified by the monotone iteration.

Phi also measures what a degree-d truncation forgets: |Phi^(d+1)(I)| bounds
every truncation error appearing downstream, and is computed exactly here.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Iterator, Sequence

import numpy as np

from .ideals import PolyIdealSpec
from .linalg import adj, hermitize, opnorm, psd_sqrt, range_basis_psd


class RowContraction:
    """Thin convenience wrapper around a tuple of same-size square matrices.

    Iterates like a list of matrices, so library functions accept either a
    RowContraction or a plain sequence of arrays.
    """

    def __init__(self, mats: Sequence[np.ndarray]):
        mats = [np.asarray(t, dtype=complex) for t in mats]
        if not mats:
            raise ValueError("need at least one matrix")
        m = mats[0].shape[0]
        for k, t in enumerate(mats):
            if t.shape != (m, m):
                raise ValueError(
                    f"entry {k} has shape {t.shape}, expected ({m}, {m}) like entry 0"
                )
        self.mats = mats
        self.n = len(mats)
        self.m = m

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.mats)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, k: int) -> np.ndarray:
        return self.mats[k]

    def row_matrix(self) -> np.ndarray:
        return row_matrix(self.mats)

    def scaled(self, r: float) -> "RowContraction":
        return RowContraction([r * t for t in self.mats])

    def conjugated(self, u: np.ndarray) -> "RowContraction":
        """The tuple (U T_1 U*, ..., U T_n U*)."""
        return RowContraction([u @ t @ adj(u) for t in self.mats])

    def __repr__(self) -> str:
        return f"RowContraction(n={self.n}, m={self.m})"


def as_matrices(tuple_like: Sequence[np.ndarray] | RowContraction) -> list[np.ndarray]:
    if isinstance(tuple_like, RowContraction):
        return tuple_like.mats
    return [np.asarray(t, dtype=complex) for t in tuple_like]


def row_matrix(ts: Sequence[np.ndarray]) -> np.ndarray:
    """The row operator [T_1 ... T_n], shape m x (n*m)."""
    return np.hstack(as_matrices(ts))


def phi_step(ts: Sequence[np.ndarray], x: np.ndarray) -> np.ndarray:
    """One application of Phi(X) = sum_i T_i X T_i*."""
    mats = as_matrices(ts)
    out = np.zeros_like(mats[0])
    for t in mats:
        out += t @ x @ adj(t)
    return out


def phi_power(ts: Sequence[np.ndarray], k: int, x: np.ndarray | None = None) -> np.ndarray:
    """Phi^k(X), defaulting to X = I."""
    mats = as_matrices(ts)
    out = np.eye(mats[0].shape[0], dtype=complex) if x is None else np.asarray(x, complex)
    for _ in range(k):
        out = phi_step(mats, out)
    return hermitize(out)


def spectral_radius_of_phi(ts: Sequence[np.ndarray]) -> float:
    """rho(T) = |sum_i T_i T_i*| (the squared row norm)."""
    return opnorm(phi_step(ts, np.eye(as_matrices(ts)[0].shape[0], dtype=complex)))


@dataclasses.dataclass
class ValidationReport:
    n: int
    m: int
    row_norm: float
    is_row_contraction: bool
    messages: list[str]


def validate(ts: Sequence[np.ndarray], *, tol: float = 1e-10) -> ValidationReport:
    """Check shapes and the row-contraction inequality sum T_i T_i* <= I."""
    mats = as_matrices(ts)
    m = mats[0].shape[0]
    messages: list[str] = []
    for k, t in enumerate(mats):
        if t.ndim != 2 or t.shape != (m, m):
            raise ValueError(f"entry {k} has shape {t.shape}, expected ({m}, {m})")
        if not np.all(np.isfinite(t)):
            raise ValueError(f"entry {k} contains non-finite values")
    rn = float(np.sqrt(max(spectral_radius_of_phi(mats), 0.0)))
    ok = rn <= 1.0 + tol
    if not ok:
        messages.append(f"row norm {rn:.6f} exceeds 1 (tolerance {tol:.0e})")
    return ValidationReport(n=len(mats), m=m, row_norm=rn, is_row_contraction=ok, messages=messages)


@dataclasses.dataclass
class DefectData:
    """Both defect operators with orthonormal range bases.

    delta / delta_star are the PSD square roots; basis / basis_star hold the
    kept eigenvectors of the *squared* defects (eigenvalue > rank cutoff,
    descending), so d_T = basis.shape[1] and d_star = basis_star.shape[1] are
    the defect ranks.
    """

    delta: np.ndarray
    delta_star: np.ndarray
    basis: np.ndarray
    basis_star: np.ndarray
    eigvals: np.ndarray
    eigvals_star: np.ndarray

    @property
    def d_T(self) -> int:
        return self.basis.shape[1]

    @property
    def d_star(self) -> int:
        return self.basis_star.shape[1]


def defects(ts: Sequence[np.ndarray], *, rank_tol: float = 1e-10) -> DefectData:
    mats = as_matrices(ts)
    m = mats[0].shape[0]
    row = row_matrix(mats)
    g = hermitize(np.eye(m, dtype=complex) - row @ adj(row))          # I - sum T_i T_i*
    g_star = hermitize(np.eye(row.shape[1], dtype=complex) - adj(row) @ row)  # I - R*R
    basis, eigvals = range_basis_psd(g, rank_tol=rank_tol)
    basis_star, eigvals_star = range_basis_psd(g_star, rank_tol=rank_tol)
    return DefectData(
        delta=psd_sqrt(g),
        delta_star=psd_sqrt(g_star),
        basis=basis,
        basis_star=basis_star,
        eigvals=eigvals,
        eigvals_star=eigvals_star,
    )


class TriState(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDETERMINED = "undetermined"

    @property
    def certain(self) -> bool:
        return self is not TriState.UNDETERMINED


@dataclasses.dataclass
class Classification:
    pure: TriState
    cnc: TriState
    q_limit: np.ndarray
    iterations: int
    rho: float

    def __str__(self) -> str:
        return (
            f"pure={self.pure.value} cnc={self.cnc.value} "
            f"rho={self.rho:.6g} after {self.iterations} iterations"
        )


def classify(ts: Sequence[np.ndarray], *, k_max: int = 500, tol: float = 1e-9) -> Classification:
    """Iterate Q_k = Phi^k(I) and certify purity / c.n.c. where possible.

    Q_k decreases monotonically, so |Q_k| < tol certifies pure = YES and
    lambda_max(Q_k) < 1 - tol certifies cnc = YES even before convergence.
    The negative answers need the limit, so they are only issued once the
    iteration is numerically stationary; otherwise UNDETERMINED.
    """
    mats = as_matrices(ts)
    m = mats[0].shape[0]
    q = np.eye(m, dtype=complex)
    rho = opnorm(phi_step(mats, q))
    pure = cnc = TriState.UNDETERMINED
    iterations = 0
    stationary = False
    for k in range(1, k_max + 1):
        q_next = hermitize(phi_step(mats, q))
        step = opnorm(q_next - q)
        q = q_next
        iterations = k
        lam_max = float(np.linalg.eigvalsh(q)[-1]) if m else 0.0
        if lam_max < tol:
            pure = TriState.YES
        if lam_max < 1.0 - tol:
            cnc = TriState.YES
        if step < 1e-14 * max(1.0, rho):
            stationary = True
            if pure is TriState.UNDETERMINED:
                pure = TriState.NO if lam_max >= tol else TriState.YES
            if cnc is TriState.UNDETERMINED:
                cnc = TriState.NO if lam_max >= 1.0 - tol else TriState.YES
            break
        if pure is TriState.YES and cnc is TriState.YES:
            break
    return Classification(pure=pure, cnc=cnc, q_limit=q, iterations=iterations, rho=float(rho))


def truncation_tail(ts: Sequence[np.ndarray], d: int) -> float:
    """|Phi^(d+1)(I)|: the exact size of what a degree-d truncation forgets."""
    return opnorm(phi_power(ts, d + 1))


def constraint_residual(ts: Sequence[np.ndarray], spec: PolyIdealSpec) -> float:
    """max_p |p(T)| over the generating relations (0 when the family is empty)."""
    mats = as_matrices(ts)
    if spec.n != len(mats):
        raise ValueError(f"relation family has n={spec.n} but the tuple has n={len(mats)}")
    worst = 0.0
    for p in spec.generators():
        worst = max(worst, opnorm(p.apply_to(mats)))
    return worst
