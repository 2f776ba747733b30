"""Dense complex linear-algebra primitives shared by every solver.

All matrices are plain ``numpy`` arrays of dtype complex128.  Vectors are
1-d arrays; a vector ``x`` used as a matrix is the column ``x[:, None]``.
The Moore-Penrose pseudoinverse of a column vector x is the row
``x* / ||x||^2``, so ``pinv`` covers both cases uniformly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import DimensionMismatchError, NonFiniteEntriesError, StructureError

__all__ = [
    "as_complex",
    "fro",
    "pinv",
    "null_projector",
    "herm_skew_parts",
    "Definiteness",
    "is_psd",
    "min_eig_herm",
    "BlockPsdReport",
    "block_psd_check",
    "SvdSplit",
    "svd_split",
]


def as_complex(a, name: str = "array") -> np.ndarray:
    """Validate and convert input to a finite complex128 array."""
    out = np.asarray(a, dtype=complex)
    if not (np.all(np.isfinite(out.real)) and np.all(np.isfinite(out.imag))):
        raise NonFiniteEntriesError(f"{name} contains NaN/Inf entries")
    return out


def fro(a) -> float:
    """Frobenius norm (2-norm for vectors)."""
    return float(np.linalg.norm(np.asarray(a)))


def _as_column(x: np.ndarray) -> np.ndarray:
    return x[:, None] if x.ndim == 1 else x


def pinv(a, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below ``rank_tol * sigma_max`` are treated as zero.
    The zero matrix maps to the zero matrix of transposed shape.
    """
    a = as_complex(a)
    a = _as_column(a)
    return np.linalg.pinv(a, rcond=cfg.rank_tol)


def null_projector(x, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the orthogonal complement of range(x).

    Returns ``I - x @ pinv(x)``: Hermitian, idempotent, annihilates x.
    For x = 0 this is the identity.
    """
    x = _as_column(as_complex(x))
    n = x.shape[0]
    return np.eye(n, dtype=complex) - x @ pinv(x, cfg)


def herm_skew_parts(a) -> tuple[np.ndarray, np.ndarray]:
    """Split a square matrix into Hermitian + skew-Hermitian parts.

    The parts are orthogonal in the Frobenius inner product, so
    ``||A||_F^2 = ||A_H||_F^2 + ||A_S||_F^2``.
    """
    a = as_complex(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got shape {a.shape}")
    ah = (a + a.conj().T) / 2.0
    return ah, a - ah


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "positive-definite"
    POSITIVE_SEMIDEFINITE = "positive-semidefinite"
    INDEFINITE = "indefinite"


def _eig_floor(eigs: np.ndarray, cfg: ToleranceConfig) -> float:
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    return cfg.psd_tol * scale


def is_psd(a, cfg: ToleranceConfig = DEFAULT_TOL) -> Definiteness:
    """Classify a Hermitian matrix by its smallest eigenvalue.

    The input is symmetrized before the eigendecomposition; asymmetry
    beyond ``residual_tol`` (relative) is an error rather than a silent
    repair.
    """
    a = as_complex(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got shape {a.shape}")
    dev = fro(a - a.conj().T)
    if dev > max(1.0, fro(a)) * cfg.residual_tol * 10:
        raise StructureError(f"matrix is not Hermitian (deviation {dev:.3e})")
    eigs = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    if eigs.size == 0:
        return Definiteness.POSITIVE_DEFINITE
    floor = _eig_floor(eigs, cfg)
    lo = float(eigs[0])
    if lo > floor:
        return Definiteness.POSITIVE_DEFINITE
    if lo >= -floor:
        return Definiteness.POSITIVE_SEMIDEFINITE
    return Definiteness.INDEFINITE


def min_eig_herm(a) -> float:
    """Smallest eigenvalue of the Hermitian part of a square matrix."""
    ah, _ = herm_skew_parts(a)
    if ah.shape[0] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(ah)[0])


@dataclass(frozen=True)
class BlockPsdReport:
    """Outcome of the three-condition block semidefiniteness test."""

    overall: bool
    leading_psd: bool
    kernel_contained: bool
    schur_psd: bool


def block_psd_check(b, c, d, cfg: ToleranceConfig = DEFAULT_TOL) -> BlockPsdReport:
    """Test positive semidefiniteness of ``[[B, C*], [C, D]]`` blockwise.

    The three conditions are: B >= 0; ker(B) contained in ker(C), tested
    through the projector ``I - pinv(B) B``; and the generalized Schur
    complement ``D - C pinv(B) C*`` >= 0.  Their conjunction is equivalent
    to the eigenvalue test on the assembled matrix.
    """
    b = as_complex(b, "B")
    c = as_complex(c, "C")
    d = as_complex(d, "D")
    s = b.shape[0]
    if b.shape != (s, s) or d.shape[0] != d.shape[1] or c.shape != (d.shape[0], s):
        raise DimensionMismatchError(
            f"incompatible block shapes B{b.shape} C{c.shape} D{d.shape}"
        )
    bd = pinv(b, cfg)
    leading = is_psd(b, cfg) is not Definiteness.INDEFINITE
    ker_proj = np.eye(s, dtype=complex) - bd @ b
    kernel_ok = fro(c @ ker_proj) <= cfg.residual_tol * max(1.0, fro(c))
    schur = d - c @ bd @ c.conj().T
    schur_ok = is_psd((schur + schur.conj().T) / 2.0, cfg) is not Definiteness.INDEFINITE
    return BlockPsdReport(leading and kernel_ok and schur_ok, leading, kernel_ok, schur_ok)


@dataclass(frozen=True)
class SvdSplit:
    """Full SVD of X split at its numerical rank.

    U1 spans range(X), U2 its orthogonal complement; X = U1 diag(S1) V1*.
    Any orthonormal completion U2 is admissible: downstream formulas only
    use U2 through U2 @ U2*, which is invariant under U2 -> U2 @ Q.
    """

    U1: np.ndarray
    U2: np.ndarray
    S1: np.ndarray
    V1: np.ndarray
    rank: int


def svd_split(x, cfg: ToleranceConfig = DEFAULT_TOL) -> SvdSplit:
    """Split the full SVD of ``x`` (n x m) at the numerical rank."""
    x = _as_column(as_complex(x))
    u, s, vh = np.linalg.svd(x, full_matrices=True)
    if s.size and s[0] > 0.0:
        r = int(np.sum(s > cfg.rank_tol * s[0]))
    else:
        r = 0
    return SvdSplit(U1=u[:, :r], U2=u[:, r:], S1=s[:r].copy(), V1=vh[:r].conj().T, rank=r)
