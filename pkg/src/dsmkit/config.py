"""Tolerance settings shared by every solver and audit."""

from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances.

    rank_tol        relative singular-value truncation threshold
    psd_tol         eigenvalue floor for semidefiniteness tests, applied
                    as ``psd_tol * matrix_norm`` (absolute on eigenvalues)
    residual_tol    relative tolerance on interpolation/identity residuals
    colinearity_tol relative band accepted when detecting colinear vectors
    """

    rank_tol: float = 1e-12
    psd_tol: float = 1e-10
    residual_tol: float = 1e-10
    colinearity_tol: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("rank_tol", "psd_tol", "residual_tol", "colinearity_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()
