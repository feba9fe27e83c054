"""Generalized Hermitian eigensolves and log-domain pseudo-determinants.

All operators here are self-adjoint with respect to a Hermitian positive
definite Gram G.  The generalized problem A v = lambda v with V*GV = I is
reduced to a standard Hermitian problem by Cholesky congruence: with
G = L L*, the matrix B = L* A L^{-*} is Hermitian and shares the
spectrum.  Kernel membership is decided by a relative threshold,
1e-9 times the largest eigenvalue magnitude (or 1 if the spectrum
vanishes); a cut with retained/discarded ratio under 1e3 emits a
SpectralGapWarning rather than failing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    GramNotPositive,
    NegativeEigenvalue,
    NotHermitian,
    SpectralGapWarning,
)

__all__ = [
    "SpectralDecomposition",
    "PseudoDeterminant",
    "HarmonicBasis",
    "hermitian_spectrum",
    "pseudodet",
    "pseudodet_of",
    "harmonic_basis",
    "harmonic_basis_of",
    "default_kernel_tol",
]

KERNEL_TOL_FACTOR = 1e-9
GAP_RATIO = 1e3
HERMITIAN_TOL = 1e-10


def default_kernel_tol(eigenvalues: np.ndarray) -> float:
    """Relative kernel threshold: 1e-9 times the spectral radius, or 1e-9
    outright when the spectrum is identically zero."""
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    if scale == 0.0:
        scale = 1.0
    return KERNEL_TOL_FACTOR * scale


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues ascending, eigenvectors G-orthonormal in columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kernel_tol: float

    def __post_init__(self) -> None:
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        ev.setflags(write=False)
        vec = np.asarray(self.eigenvectors, dtype=np.complex128)
        vec.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "eigenvectors", vec)

    @cached_property
    def _positive_mask(self) -> np.ndarray:
        return self.eigenvalues > self.kernel_tol

    @property
    def kernel_dimension(self) -> int:
        return int(np.count_nonzero(~self._positive_mask))

    @property
    def positive_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self._positive_mask]

    @property
    def kernel_vectors(self) -> np.ndarray:
        return self.eigenvectors[:, ~self._positive_mask]


@dataclass(frozen=True, eq=False)
class PseudoDeterminant:
    """Product of the eigenvalues above the kernel cut, held in log form."""

    log_value: float
    kernel_dim: int
    warnings: tuple[str, ...] = ()

    @property
    def value(self) -> float:
        return float(np.exp(self.log_value))


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """G-orthonormal basis of a Laplacian kernel."""

    label: str
    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors, dtype=np.complex128)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


def _as_square(a: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def hermitian_spectrum(
    A: np.ndarray,
    G: np.ndarray | None = None,
    *,
    kernel_tol: float | None = None,
) -> SpectralDecomposition:
    """Solve A v = lambda v for a G-self-adjoint A, with V*GV = I.

    Raises NotHermitian when ||GA - A*G|| exceeds 1e-10 relative, and
    GramNotPositive when G fails Hermitian positive definiteness.
    """
    A = _as_square(A, "operator")
    n = A.shape[0]
    if n == 0:
        ev = np.zeros(0)
        return SpectralDecomposition(
            eigenvalues=ev,
            eigenvectors=np.zeros((0, 0), dtype=np.complex128),
            kernel_tol=kernel_tol if kernel_tol is not None else default_kernel_tol(ev),
        )

    if G is None:
        resid = np.linalg.norm(A - A.conj().T)
        if resid > HERMITIAN_TOL * max(1.0, np.linalg.norm(A)):
            raise NotHermitian(f"operator is not Hermitian (residual {resid:.3e})")
        w, V = np.linalg.eigh(A)
    else:
        G = _as_square(G, "gram")
        if G.shape != A.shape:
            raise GramNotPositive(f"gram shape {G.shape} does not match operator {A.shape}")
        if np.linalg.norm(G - G.conj().T) > 1e-12 * max(1.0, np.linalg.norm(G)):
            raise GramNotPositive("gram is not Hermitian")
        GA = G @ A
        resid = np.linalg.norm(GA - A.conj().T @ G)
        if resid > HERMITIAN_TOL * max(1.0, np.linalg.norm(GA)):
            raise NotHermitian(
                f"operator is not self-adjoint for the given gram (residual {resid:.3e})"
            )
        try:
            L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            raise GramNotPositive("gram is not positive definite") from None
        # B = L* A L^{-*}; Hermitian because GA = A*G
        Linv = solve_triangular(L, np.eye(n, dtype=np.complex128), lower=True)
        B = L.conj().T @ A @ Linv.conj().T
        B = 0.5 * (B + B.conj().T)
        w, W = np.linalg.eigh(B)
        V = Linv.conj().T @ W

    tol = kernel_tol if kernel_tol is not None else default_kernel_tol(w)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=V, kernel_tol=tol)


def _gap_warnings(ev: np.ndarray, tol: float) -> tuple[str, ...]:
    discarded = ev[~(ev > tol)]
    retained = ev[ev > tol]
    if discarded.size == 0 or retained.size == 0:
        return ()
    floor = float(np.max(np.abs(discarded)))
    if floor == 0.0:
        return ()
    ratio = float(np.min(retained)) / floor
    if ratio >= GAP_RATIO:
        return ()
    msg = (
        f"kernel cut poorly separated: retained {float(np.min(retained)):.3e} over "
        f"discarded {floor:.3e} gives ratio {ratio:.1f} < {GAP_RATIO:.0e}"
    )
    warnings.warn(msg, SpectralGapWarning, stacklevel=3)
    return (msg,)


def pseudodet_of(decomposition: SpectralDecomposition) -> PseudoDeterminant:
    """Pseudo-determinant of an already computed decomposition."""
    ev = decomposition.eigenvalues
    tol = decomposition.kernel_tol
    if ev.size and float(ev[0]) < -tol:
        raise NegativeEigenvalue(
            f"eigenvalue {float(ev[0]):.6e} below -{tol:.3e}; operator is not psd"
        )
    notes = _gap_warnings(ev, tol)
    positive = decomposition.positive_eigenvalues
    logdet = float(np.sum(np.log(positive))) if positive.size else 0.0
    return PseudoDeterminant(
        log_value=logdet,
        kernel_dim=decomposition.kernel_dimension,
        warnings=notes,
    )


def pseudodet(
    A: np.ndarray,
    G: np.ndarray | None = None,
    *,
    kernel_tol: float | None = None,
) -> PseudoDeterminant:
    """Log-domain product of the positive eigenvalues of a G-psd operator.

    The empty product is 1 (log 0).  Eigenvalues below -kernel_tol raise
    NegativeEigenvalue; a weak separation at the cut emits
    SpectralGapWarning and is recorded on the result.
    """
    return pseudodet_of(hermitian_spectrum(A, G, kernel_tol=kernel_tol))


def harmonic_basis_of(decomposition: SpectralDecomposition, label: str = "") -> HarmonicBasis:
    """Kernel basis of an already computed decomposition."""
    ev = decomposition.eigenvalues
    if ev.size and float(ev[0]) < -decomposition.kernel_tol:
        raise NegativeEigenvalue(
            f"eigenvalue {float(ev[0]):.6e} below -{decomposition.kernel_tol:.3e}"
        )
    return HarmonicBasis(label=label, vectors=decomposition.kernel_vectors)


def harmonic_basis(
    A: np.ndarray,
    G: np.ndarray | None = None,
    *,
    kernel_tol: float | None = None,
    label: str = "",
) -> HarmonicBasis:
    """G-orthonormal basis of the kernel of a G-psd operator.

    Uses the same kernel mask as :func:`pseudodet`, so the two agree on
    the kernel dimension by construction.
    """
    return harmonic_basis_of(hermitian_spectrum(A, G, kernel_tol=kernel_tol), label=label)
