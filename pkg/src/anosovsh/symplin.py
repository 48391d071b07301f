"""Symplectic linear algebra in the standard basis (q_1..q_m, p_1..p_m).

The symplectic form is ``omega(u, v) = u^T J v`` with ``J = [[0, -I], [I, 0]]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneracyError,
    DimensionError,
    InvarianceError,
    IsotropyError,
    SingularityError,
    ValidationError,
)

SYMPLECTIC_TOL = 1e-9
DET_REL_TOL = 1e-8
DEGENERACY_TOL = 1e-10
MAX_CONDITION = 1e8


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1

    @classmethod
    def of(cls, k):
        return cls.EVEN if int(k) % 2 == 0 else cls.ODD

    def __str__(self):
        return self.name.capitalize()


def standard_j(dim):
    """Return the standard ``dim x dim`` symplectic matrix ``[[0, -I], [I, 0]]``."""
    if dim % 2:
        raise DimensionError(f"symplectic dimension must be even, got {dim}")
    m = dim // 2
    J = np.zeros((dim, dim))
    J[:m, m:] = -np.eye(m)
    J[m:, :m] = np.eye(m)
    return J


def _square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise DimensionError(f"odd dimension {M.shape[0]}")
    return M


def symplectic_defect(M):
    M = _square(M)
    J = standard_j(M.shape[0])
    return float(np.max(np.abs(M.T @ J @ M - J)))


def is_symplectic(M, tol=SYMPLECTIC_TOL):
    """True iff ``max|M^T J M - J| <= tol``; raises on odd dimension."""
    return symplectic_defect(M) <= tol


@dataclass(frozen=True)
class SymplecticMatrix:
    entries: np.ndarray

    def __post_init__(self):
        M = _square(self.entries)
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)
        if not is_symplectic(M, SYMPLECTIC_TOL):
            raise ValidationError(
                f"matrix is not symplectic (defect {symplectic_defect(M):.3e})"
            )
        det = np.linalg.det(M)
        if abs(det - 1.0) > DET_REL_TOL:
            raise ValidationError(f"determinant {det!r} differs from 1")

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class LagrangianFrame:
    """A ``2m x m`` matrix whose columns span a Lagrangian subspace."""

    frame: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.frame, dtype=float)
        if F.ndim == 1:
            F = F[:, None]
        if F.ndim != 2 or F.shape[0] != 2 * F.shape[1]:
            raise DimensionError(f"frame must be 2m x m, got shape {F.shape}")
        s = np.linalg.svd(F, compute_uv=False)
        if s[-1] <= 1e-9 * s[0] or s[0] / s[-1] > MAX_CONDITION:
            raise SingularityError("frame columns are (nearly) linearly dependent")
        iso = float(np.max(np.abs(F.T @ standard_j(F.shape[0]) @ F)))
        if iso > SYMPLECTIC_TOL * max(1.0, s[0] ** 2):
            raise IsotropyError(f"frame is not isotropic (defect {iso:.3e})")
        F.setflags(write=False)
        object.__setattr__(self, "frame", F)

    @property
    def ambient_dim(self):
        return self.frame.shape[0]

    @property
    def m(self):
        return self.frame.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.frame, dtype=dtype)


@dataclass(frozen=True)
class BlockTriple:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A, B, C = (np.asarray(x, dtype=float) for x in (self.A, self.B, self.C))
        try:
            Ainv = np.linalg.inv(A)
        except np.linalg.LinAlgError as exc:
            raise SingularityError("block A is singular") from exc
        scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(Ainv))))
        if np.max(np.abs(C - Ainv.T)) > DET_REL_TOL * scale:
            raise ValidationError("block C is not the inverse transpose of A")
        S = Ainv @ B
        if np.max(np.abs(S - S.T)) > DET_REL_TOL * max(1.0, float(np.max(np.abs(S)))):
            raise ValidationError("A^-1 B is not symmetric")
        for name, x in (("A", A), ("B", B), ("C", C)):
            x.setflags(write=False)
            object.__setattr__(self, name, x)

    def assemble(self):
        m = self.A.shape[0]
        return np.block([[self.A, self.B], [np.zeros((m, m)), self.C]])


def _as_frame(E):
    return E if isinstance(E, LagrangianFrame) else LagrangianFrame(E)


def symplectic_direct_sum(*blocks):
    """Direct sum of symplectic matrices, interleaving q and p coordinates."""
    blocks = [_square(b) for b in blocks]
    m = sum(b.shape[0] // 2 for b in blocks)
    out = np.zeros((2 * m, 2 * m))
    idx = []
    off = 0
    for b in blocks:
        k = b.shape[0] // 2
        idx.append(np.r_[off:off + k, m + off:m + off + k])
        off += k
    for b, ix in zip(blocks, idx):
        out[np.ix_(ix, ix)] = b
    return out


def make_lagrangian_invariant(A, S):
    """Build ``P = [[A, A S], [0, A^{-T}]]``, preserving span(q_1..q_m)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if A.shape[0] != A.shape[1] or S.shape != A.shape:
        raise DimensionError(f"A and S must be matching square, got {A.shape}, {S.shape}")
    if np.max(np.abs(S - S.T)) > SYMPLECTIC_TOL:
        raise ValidationError("S must be symmetric")
    try:
        Ainv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("A is singular") from exc
    if np.linalg.cond(A) > MAX_CONDITION:
        raise SingularityError("A is too ill-conditioned")
    m = A.shape[0]
    P = np.block([[A, A @ S], [np.zeros((m, m)), Ainv.T]])
    return SymplecticMatrix(P)


def adapted_basis(E):
    """Complete a Lagrangian frame ``F`` to a symplectic basis ``Q = [F, G]``.

    ``Q^T J Q = J`` holds, so the first ``m`` columns of ``Q`` are the frame
    itself and the rest are a Lagrangian complement paired dually with it.
    """
    F = np.asarray(_as_frame(E).frame)
    J = standard_j(F.shape[0])
    G = J @ F @ np.linalg.inv(F.T @ F)
    # Gram-Schmidt correction making the complement isotropic
    K = G.T @ J @ G
    G = G - 0.5 * F @ K
    return np.hstack([F, G])


def lagrangian_block_form(P, E, tol=DET_REL_TOL):
    """Blocks ``(A, B, C)`` of ``P`` in a symplectic basis adapted to ``E``.

    Raises
    ------
    IsotropyError
        ``E`` is not Lagrangian.
    InvarianceError
        ``P E`` does not lie in ``E``.
    """
    P = _square(P)
    E = _as_frame(E)
    F = np.asarray(E.frame)
    if F.shape[0] != P.shape[0]:
        raise DimensionError("frame and matrix dimensions differ")
    PF = P @ F
    coeff, *_ = np.linalg.lstsq(F, PF, rcond=None)
    resid = np.max(np.abs(PF - F @ coeff))
    if resid > tol * max(1.0, float(np.max(np.abs(PF)))):
        raise InvarianceError(f"subspace is not invariant (residual {resid:.3e})")
    Q = adapted_basis(E)
    m = E.m
    blocks = np.linalg.solve(Q, P @ Q)
    return BlockTriple(blocks[:m, :m], blocks[:m, m:], blocks[m:, m:])


def det_sign_parity(P, degeneracy_tol=DEGENERACY_TOL):
    """Parity of the CZ index read off from ``(-1)^m sign det(I - P)``."""
    P = _square(P)
    m = P.shape[0] // 2
    d = np.linalg.det(np.eye(P.shape[0]) - P)
    if not abs(d) > degeneracy_tol:
        raise DegeneracyError(f"det(I - P) = {d!r} is degenerate")
    return Parity.EVEN if (-1) ** m * np.sign(d) > 0 else Parity.ODD


def det_chain_check(P, E, degeneracy_tol=DEGENERACY_TOL):
    """Relative error of ``det(I-P) = det(A)^-1 det(I-A)^2 (-1)^m``."""
    P = _square(P)
    m = P.shape[0] // 2
    lhs = np.linalg.det(np.eye(P.shape[0]) - P)
    if not abs(lhs) > degeneracy_tol:
        raise DegeneracyError(f"det(I - P) = {lhs!r} is degenerate")
    A = lagrangian_block_form(P, E).A
    rhs = np.linalg.det(np.eye(m) - A) ** 2 * (-1) ** m / np.linalg.det(A)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))


def random_lagrangian_invariant(rng, m, low=-2.0, high=2.0, min_det=0.1):
    """Draw ``(A, S)`` uniformly entrywise, rejecting ``|det A| <= min_det``."""
    while True:
        A = rng.uniform(low, high, size=(m, m))
        if abs(np.linalg.det(A)) > min_det:
            break
    S = rng.uniform(low, high, size=(m, m))
    S = np.triu(S) + np.triu(S, 1).T
    return A, S
