"""One-sided structured mapping solvers and the two-sided unstructured solver.

Every solver answers the same three questions for its matrix family:
does a matrix taking x to y exist, what does the whole solution set look
like, and which member has minimal Frobenius norm.  Feasibility verdicts
are returned on the solution object rather than raised, so callers can
route infeasible problems without exception handling; genuinely malformed
input (zero vectors, shape clashes) raises.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import (
    ConstraintViolationError,
    DegenerateInputError,
    DimensionMismatchError,
)
from .linalg import as_complex, fro, min_eig_herm, null_projector, pinv

__all__ = ["StructureFamily", "MapSolution", "map_min", "map_two_sided", "map_characterize"]


class StructureFamily(str, enum.Enum):
    UNSTRUCTURED = "unstructured"
    HERMITIAN = "hermitian"
    SKEW_HERMITIAN = "skew-hermitian"
    SYMMETRIC = "symmetric"
    SKEW_SYMMETRIC = "skew-symmetric"
    PSD = "psd"
    NSD = "nsd"
    DISSIPATIVE = "dissipative"
    ANTI_DISSIPATIVE = "anti-dissipative"


#: families whose solution set is a (real-)linear variety
LINEAR_FAMILIES = frozenset({
    StructureFamily.UNSTRUCTURED,
    StructureFamily.HERMITIAN,
    StructureFamily.SKEW_HERMITIAN,
    StructureFamily.SYMMETRIC,
    StructureFamily.SKEW_SYMMETRIC,
})


@dataclass
class MapSolution:
    family: StructureFamily
    feasible: bool
    minimizer: np.ndarray | None = None
    min_norm: float = float("inf")
    free_param_shapes: dict[str, str] = field(default_factory=dict)
    reason: str = ""
    #: dissipative boundary Re(x*y) ~ 0: feasible, minimality not certified
    boundary: bool = False


def _nonzero_vec(v, name: str) -> np.ndarray:
    v = as_complex(v, name).reshape(-1)
    if fro(v) == 0.0:
        raise DegenerateInputError(f"{name} must be nonzero")
    return v


def _reflected(family: StructureFamily) -> StructureFamily:
    return {
        StructureFamily.NSD: StructureFamily.PSD,
        StructureFamily.ANTI_DISSIPATIVE: StructureFamily.DISSIPATIVE,
    }[family]


def map_min(
    family: StructureFamily,
    x,
    y,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> MapSolution:
    """Minimal Frobenius-norm Delta with ``Delta x = y`` in the given family.

    Feasibility conditions by family (s = ||x|| ||y||):
      unstructured    always
      hermitian       x*y real:  |Im(x*y)| <= tol s
      skew-hermitian  x*y imaginary:  |Re(x*y)| <= tol s
      symmetric       always
      skew-symmetric  x^T y = 0
      psd             x*y real and positive
      dissipative     Re(x*y) >= 0 (boundary Re ~ 0 flagged: the returned
                      minimizer is feasible but minimality is not certified)
    nsd / anti-dissipative solve the reflected problem on (x, -y) and
    negate the result.
    """
    family = StructureFamily(family)
    x = _nonzero_vec(x, "x")
    y = _nonzero_vec(y, "y")
    if x.shape != y.shape:
        raise DimensionMismatchError(f"x and y must share a dimension, got {x.shape} vs {y.shape}")

    if family in (StructureFamily.NSD, StructureFamily.ANTI_DISSIPATIVE):
        inner = map_min(_reflected(family), x, -y, cfg)
        inner.family = family
        if inner.feasible:
            inner.minimizer = -inner.minimizer
        else:
            inner.reason = inner.reason.replace("(x, -y)", "(x, y)")
        return inner

    n = x.shape[0]
    s = np.vdot(x, y)  # x*y
    scale = fro(x) * fro(y)
    tol = cfg.residual_tol * scale
    xd = pinv(x, cfg)  # row vector, 1 x n
    yxd = np.outer(y, xd)
    xxd = np.outer(x, xd)
    px = null_projector(x, cfg)

    free: dict[str, str] = {}
    if family is StructureFamily.UNSTRUCTURED:
        delta = yxd
        free = {"Z": f"any complex {n}x{n}"}
    elif family is StructureFamily.HERMITIAN:
        if abs(s.imag) > tol:
            return MapSolution(family, False, reason=f"x*y not real (Im = {s.imag:.3e})")
        delta = yxd + yxd.conj().T - (xd @ y) * xxd
        free = {"H": f"Hermitian {n}x{n}"}
    elif family is StructureFamily.SKEW_HERMITIAN:
        if abs(s.real) > tol:
            return MapSolution(family, False, reason=f"x*y not imaginary (Re = {s.real:.3e})")
        delta = yxd - yxd.conj().T - (xd @ y) * xxd
        free = {"H": f"skew-Hermitian {n}x{n}"}
    elif family is StructureFamily.SYMMETRIC:
        delta = yxd + yxd.T - xxd.T @ yxd
        free = {"H": f"complex symmetric {n}x{n}"}
    elif family is StructureFamily.SKEW_SYMMETRIC:
        if abs(x @ y) > tol:
            return MapSolution(family, False, reason=f"x^T y != 0 ({x @ y:.3e})")
        delta = yxd - yxd.T + xxd.T @ yxd
        free = {"H": f"complex skew-symmetric {n}x{n}"}
    elif family is StructureFamily.PSD:
        if abs(s.imag) > tol or s.real <= tol:
            return MapSolution(family, False, reason=f"x*y not real positive ({s:.3e})")
        delta = np.outer(y, y.conj()) / s
        free = {"K": f"Hermitian PSD {n}x{n}"}
    elif family is StructureFamily.DISSIPATIVE:
        if s.real < -tol:
            return MapSolution(family, False, reason=f"Re(x*y) negative ({s.real:.3e})")
        delta = yxd - yxd.conj().T @ px
        boundary = abs(s.real) <= tol
        return MapSolution(
            family,
            True,
            minimizer=delta,
            min_norm=fro(delta),
            free_param_shapes={
                "Z": f"any complex {n}x{n}",
                "K": f"Hermitian PSD {n}x{n} with K - (2y+Z*x)(2y+Z*x)*/(4Re(x*y)) PSD",
                "G": f"skew-Hermitian {n}x{n}",
            },
            boundary=boundary,
        )
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unsupported family {family}")

    return MapSolution(family, True, minimizer=delta, min_norm=fro(delta), free_param_shapes=free)


def map_two_sided(x, y, z, w, cfg: ToleranceConfig = DEFAULT_TOL) -> MapSolution:
    """Minimal-norm unstructured Delta with ``Delta x = y`` and ``Delta* z = w``.

    x, w live in C^m and y, z in C^n; Delta is n x m.  Feasible iff
    x*w = y*z, in which case the minimizer is
    ``y x+ + (w z+)* - (w z+)* x x+`` and the solution set adds
    ``P_z R P_x`` over arbitrary R.
    """
    x = _nonzero_vec(x, "x")
    y = _nonzero_vec(y, "y")
    z = _nonzero_vec(z, "z")
    w = _nonzero_vec(w, "w")
    if x.shape != w.shape or y.shape != z.shape:
        raise DimensionMismatchError(
            f"need x, w in C^m and y, z in C^n; got {x.shape}, {w.shape}, {y.shape}, {z.shape}"
        )
    n, m = y.shape[0], x.shape[0]
    gap = np.vdot(x, w) - np.vdot(y, z)
    scale = max(fro(x) * fro(w), fro(y) * fro(z), 1e-300)
    if abs(gap) > cfg.residual_tol * scale:
        return MapSolution(
            StructureFamily.UNSTRUCTURED, False, reason=f"x*w != y*z (gap {abs(gap):.3e})"
        )
    xd = pinv(x, cfg)
    wzd = np.outer(w, pinv(z, cfg))
    delta = np.outer(y, xd) + wzd.conj().T - wzd.conj().T @ np.outer(x, xd)
    return MapSolution(
        StructureFamily.UNSTRUCTURED,
        True,
        minimizer=delta,
        min_norm=fro(delta),
        free_param_shapes={"R": f"any complex {n}x{m}, entering as P_z R P_x"},
    )


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ConstraintViolationError(name, message)


def map_characterize(
    family: StructureFamily,
    x,
    y,
    params: dict[str, np.ndarray],
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> np.ndarray:
    """Evaluate the family's solution-set characterization at given free matrices.

    ``params`` supplies the free matrices by name: H for the four
    symmetry families, Z for unstructured, K for psd/nsd, and (Z, K, G)
    for the dissipative families.  Constraint violations raise
    ``ConstraintViolationError`` naming the failing condition.
    """
    family = StructureFamily(family)
    x = _nonzero_vec(x, "x")
    y = _nonzero_vec(y, "y")

    if family in (StructureFamily.NSD, StructureFamily.ANTI_DISSIPATIVE):
        return -map_characterize(_reflected(family), x, -y, params, cfg)

    base = map_min(family, x, y, cfg)
    if not base.feasible:
        raise DegenerateInputError(f"infeasible problem: {base.reason}")
    if family is StructureFamily.DISSIPATIVE and base.boundary:
        raise DegenerateInputError("characterization undefined on the boundary Re(x*y) ~ 0")

    px = null_projector(x, cfg)
    stol = cfg.residual_tol
    n = x.shape[0]

    def param(name: str) -> np.ndarray:
        if name not in params:
            raise ConstraintViolationError(name, f"missing free parameter {name!r}")
        p = as_complex(params[name], name)
        if p.shape != (n, n):
            raise ConstraintViolationError(name, f"{name} must be {n}x{n}, got {p.shape}")
        return p

    if family is StructureFamily.UNSTRUCTURED:
        z = param("Z")
        return base.minimizer + z @ px
    if family is StructureFamily.HERMITIAN:
        h = param("H")
        _require(fro(h - h.conj().T) <= stol * max(1.0, fro(h)), "H_hermitian", "H must be Hermitian")
        return base.minimizer + px @ h @ px
    if family is StructureFamily.SKEW_HERMITIAN:
        h = param("H")
        _require(fro(h + h.conj().T) <= stol * max(1.0, fro(h)), "H_skew_hermitian", "H must be skew-Hermitian")
        return base.minimizer + px @ h @ px
    if family is StructureFamily.SYMMETRIC:
        h = param("H")
        _require(fro(h - h.T) <= stol * max(1.0, fro(h)), "H_symmetric", "H must be symmetric")
        return base.minimizer + px.T @ h @ px
    if family is StructureFamily.SKEW_SYMMETRIC:
        h = param("H")
        _require(fro(h + h.T) <= stol * max(1.0, fro(h)), "H_skew_symmetric", "H must be skew-symmetric")
        return base.minimizer + px.T @ h @ px
    if family is StructureFamily.PSD:
        k = param("K")
        _require(
            min_eig_herm(k) >= -cfg.psd_tol * max(1.0, fro(k)),
            "K_psd",
            "K must be positive semidefinite",
        )
        return base.minimizer + px @ k @ px
    if family is StructureFamily.DISSIPATIVE:
        z, k, g = param("Z"), param("K"), param("G")
        _require(fro(g + g.conj().T) <= stol * max(1.0, fro(g)), "G_skew_hermitian", "G must be skew-Hermitian")
        _require(min_eig_herm(k) >= -cfg.psd_tol * max(1.0, fro(k)), "K_psd", "K must be PSD")
        q = 2.0 * y + z.conj().T @ x
        shifted = k - np.outer(q, q.conj()) / (4.0 * np.vdot(x, y).real)
        _require(
            min_eig_herm(shifted) >= -cfg.psd_tol * max(1.0, fro(shifted)),
            "K_shifted_psd",
            "K - (2y+Z*x)(2y+Z*x)*/(4Re(x*y)) must be PSD",
        )
        xd = pinv(x, cfg)
        yxd = np.outer(y, xd)
        xxd = np.outer(x, xd)
        return yxd + yxd.conj().T @ px + xxd @ z @ px + px @ k @ px + px @ g @ px
    raise ValueError(f"unsupported family {family}")  # pragma: no cover
