"""Galerkin representation of Symm's operator ``K = K0 + C`` in the Fourier basis.

``K0`` is diagonal (eigenvalues 1 and 1/|k|) and is applied exactly; only the
smooth remainder ``C`` is integrated, with the trapezoidal rule on the
uniform grid, which is spectrally accurate for the periodic C^2 kernel.
"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._threads import worker_count
from .curve import BoundaryCurve, Disc, smooth_kernel_grid
from .errors import TruncationError, TruncationWarning
from .fourier import FourierVector

log = logging.getLogger(__name__)

__all__ = [
    "OperatorAssembly",
    "k0_eigenvalues",
    "k0_apply",
    "assemble_smooth_part",
    "assemble_operator",
    "apply_K",
    "default_truncation",
    "default_grid",
    "TAIL_WARN_LEVEL",
]

TAIL_WARN_LEVEL = 1e-8
_ROW_BLOCK = 512


def k0_eigenvalues(M):
    k = np.abs(np.arange(-M, M + 1)).astype(float)
    k[M] = 1.0
    return 1.0 / k


def k0_apply(v: FourierVector) -> FourierVector:
    return FourierVector(v.max_index, v.coeffs * k0_eigenvalues(v.max_index))


def default_truncation(n):
    """Ambient window used when a solver needs degree ``n``."""
    return max(4 * n, 64)


def default_grid(M):
    return 4 * (2 * M + 1)




def assemble_smooth_part(curve: BoundaryCurve, M: int, m: int) -> np.ndarray:
    """Galerkin matrix ``C[M + j, M + k] = <C e_k, e_j>`` of the smooth remainder.

    Column ``M + k`` holds the coefficients of ``C e^{iks}`` truncated to ``|j| <= M``.
    """
    if m < 2 * (2 * M + 1):
        raise ValueError(f"quadrature grid m={m} violates the anti-aliasing rule m >= 2(2M+1) = {2 * (2 * M + 1)}")
    size = 2 * M + 1
    if isinstance(curve, Disc):
        # the kernel is the constant -(ln r + 1/2)/pi; only the mean survives
        out = np.zeros((size, size), dtype=complex)
        out[M, M] = -2.0 * (np.log(curve.radius) + 0.5)
        return out

    blocks = [(lo, min(lo + _ROW_BLOCK, m)) for lo in range(0, m, _ROW_BLOCK)]
    cols = np.arange(-M, M + 1)
    # stage 1: s-transform of each row, keeping modes e^{+iks} for |k| <= M
    partial = np.empty((m, size), dtype=complex)

    def row_transform(block):
        lo, hi = block
        rows = smooth_kernel_grid(curve, m, lo, hi)
        # real rows: the e^{+iks} sums for k >= 0 are conjugates of the forward transform
        half = np.fft.rfft(rows, axis=1)[:, : M + 1] / m
        partial[lo:hi, M:] = np.conj(half)
        partial[lo:hi, :M] = half[:, M:0:-1]

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        list(pool.map(row_transform, blocks))
    # the s-integral carries weight 2 pi/m
    partial *= 2 * np.pi
    # stage 2: coefficient of e^{ijt} with the 1/m normalization of the discrete transform
    spectrum = np.fft.fft(partial, axis=0) / m
    return spectrum[cols % m, :]


def _tail_fraction(smooth, M):
    """Smooth-part mass in rows ``|j| > M/2``, relative to the mass of the whole operator.

    K0 is exact, so only the smooth part can be under-resolved; measuring it
    against the full operator keeps a roundoff-level smooth part from
    producing a meaningless ratio.
    """
    outer = np.abs(np.arange(-M, M + 1)) > M / 2
    total = np.linalg.norm(smooth + np.diag(k0_eigenvalues(M)))
    return float(np.linalg.norm(smooth[outer, :]) / total)


@dataclass(frozen=True, eq=False)
class OperatorAssembly:
    """Dense Galerkin matrix ``A[M + j, M + k] = <K e_k, e_j>`` over ``|j|, |k| <= M``."""

    curve: BoundaryCurve
    M: int
    m: int
    matrix: np.ndarray
    tail_fraction: float = 0.0

    @property
    def size(self):
        return 2 * self.M + 1

    def window(self, n):
        """Positions of the modes ``|k| <= n`` inside the ambient window."""
        return np.arange(self.M - n, self.M + n + 1)

    def column(self, k) -> FourierVector:
        return FourierVector(self.M, self.matrix[:, self.M + k])

    @property
    def columns(self):
        return {k: self.column(k) for k in range(-self.M, self.M + 1)}

    def hermitian_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def to_json(self):
        return {
            "M": self.M,
            "m": self.m,
            "curve": self.curve.to_config(),
            "tail_fraction": self.tail_fraction,
            "columns": [self.column(k).to_json() for k in range(-self.M, self.M + 1)],
        }


def assemble_operator(curve: BoundaryCurve, M: int, m: int | None = None) -> OperatorAssembly:
    if m is None:
        m = default_grid(M)
    smooth = assemble_smooth_part(curve, M, m)
    tail = _tail_fraction(smooth, M)
    if tail >= TAIL_WARN_LEVEL:
        warnings.warn(
            f"smooth part has relative mass {tail:.2e} in |j| > M/2 = {M / 2:g}; increase M",
            TruncationWarning,
            stacklevel=2,
        )
    matrix = smooth
    matrix[np.diag_indices(2 * M + 1)] += k0_eigenvalues(M)
    matrix.setflags(write=False)
    log.debug("assembled K for %r with M=%d m=%d (tail %.2e)", curve, M, m, tail)
    return OperatorAssembly(curve, M, m, matrix, tail)


def apply_K(assembly: OperatorAssembly, v: FourierVector) -> FourierVector:
    """Galerkin image ``Q_M K v`` for ``v`` of degree at most ``M``."""
    if v.max_index > assembly.M:
        raise TruncationError(f"vector of degree {v.max_index} exceeds the operator window M={assembly.M}")
    return FourierVector(assembly.M, assembly.matrix @ v.resized(assembly.M).coeffs)
