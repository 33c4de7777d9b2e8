"""Trigonometric coefficient vectors and the periodic Sobolev scale.

Coefficients are taken with respect to the weighted pairing
``(x, y) = (1/2pi) int x conj(y) dt``, under which ``{e^{ikt}}`` is
orthonormal and the H^0 norm equals the l2 norm of the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError

__all__ = [
    "FourierVector",
    "samples_to_coeffs",
    "eval_fourier",
    "sobolev_norm",
    "sobolev_inner",
    "sobolev_weights",
    "project",
    "uniform_grid",
]


@dataclass(frozen=True, eq=False)
class FourierVector:
    """Coefficients ``a_k`` of ``sum_{|k| <= M} a_k e^{ikt}``; ``coeffs[M + k]`` holds ``a_k``."""

    max_index: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size != 2 * self.max_index + 1:
            raise ValueError(f"expected {2 * self.max_index + 1} coefficients for M={self.max_index}, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, M):
        return cls(M, np.zeros(2 * M + 1, dtype=complex))

    @classmethod
    def from_modes(cls, modes, M=None):
        """Build from a ``{k: a_k}`` mapping; ``M`` defaults to the largest ``|k|``."""
        if M is None:
            M = max((abs(k) for k in modes), default=0)
        c = np.zeros(2 * M + 1, dtype=complex)
        for k, val in modes.items():
            if abs(k) > M:
                raise ValueError(f"mode {k} outside window |k| <= {M}")
            c[M + k] = val
        return cls(M, c)

    @classmethod
    def basis(cls, k, M=None):
        return cls.from_modes({k: 1.0}, max(abs(k), M or 0))

    @property
    def indices(self):
        return np.arange(-self.max_index, self.max_index + 1)

    def __getitem__(self, k):
        if abs(k) > self.max_index:
            return 0j
        return self.coeffs[self.max_index + k]

    def resized(self, M):
        """Zero-pad or truncate to the window ``|k| <= M``."""
        if M >= self.max_index:
            c = np.zeros(2 * M + 1, dtype=complex)
            c[M - self.max_index : M + self.max_index + 1] = self.coeffs
            return FourierVector(M, c)
        return FourierVector(M, self.coeffs[self.max_index - M : self.max_index + M + 1])

    def is_real(self, tol=1e-12):
        """True when ``a_{-k} = conj(a_k)``, i.e. the function is real-valued."""
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    def _aligned(self, other):
        M = max(self.max_index, other.max_index)
        return M, self.resized(M).coeffs, other.resized(M).coeffs

    def __add__(self, other):
        M, a, b = self._aligned(other)
        return FourierVector(M, a + b)

    def __sub__(self, other):
        M, a, b = self._aligned(other)
        return FourierVector(M, a - b)

    def __mul__(self, scalar):
        return FourierVector(self.max_index, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return FourierVector(self.max_index, -self.coeffs)

    def to_json(self):
        return {"max_index": int(self.max_index), "re": self.coeffs.real.tolist(), "im": self.coeffs.imag.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["max_index"]), np.asarray(data["re"], float) + 1j * np.asarray(data["im"], float))


def uniform_grid(m):
    return 2 * np.pi * np.arange(m) / m


def samples_to_coeffs(samples, M: int) -> FourierVector:
    """Discrete Fourier coefficients ``(1/m) sum_j x_j e^{-ik t_j}`` for ``|k| <= M``."""
    samples = np.asarray(samples, dtype=complex)
    m = samples.size
    if m < 2 * M + 1:
        raise AliasingError(f"{m} samples cannot resolve |k| <= {M} (need at least {2 * M + 1})")
    spectrum = np.fft.fft(samples) / m
    return FourierVector(M, spectrum[np.arange(-M, M + 1) % m])


def eval_fourier(v: FourierVector, t):
    t = np.asarray(t, dtype=float)
    return (np.exp(1j * np.multiply.outer(t, v.indices)) @ v.coeffs)[()]


def sobolev_weights(M, r):
    k = np.arange(-M, M + 1)
    return (1.0 + k * k) ** float(r)


def sobolev_norm(v: FourierVector, r: float) -> float:
    return float(np.sqrt(np.sum(sobolev_weights(v.max_index, r) * np.abs(v.coeffs) ** 2)))


def sobolev_inner(x: FourierVector, y: FourierVector, r: float) -> complex:
    M, a, b = x._aligned(y)
    return complex(np.sum(sobolev_weights(M, r) * a * np.conj(b)))


def project(v: FourierVector, n: int) -> FourierVector:
    """Orthogonal projection onto ``span{e^{ikt}}_{|k| <= n}``; the window is kept."""
    if n < 0:
        raise ValueError(f"projection degree must be non-negative, got {n}")
    c = v.coeffs.copy()
    c[np.abs(v.indices) > n] = 0
    return FourierVector(v.max_index, c)
