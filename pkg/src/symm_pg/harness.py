"""Experiment drivers: synthetic data, noise, convergence and divergence sweeps, rate fits."""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._threads import worker_count
from .curve import BoundaryCurve
from .errors import InsufficientDataError, SingularSystemError
from .fourier import FourierVector, sobolev_norm
from .operator import OperatorAssembly, apply_K, assemble_operator, default_truncation
from .solvers import MethodKind, solve

log = logging.getLogger(__name__)

__all__ = [
    "SmoothManufactured",
    "ExplicitSolution",
    "PowerTail",
    "CustomCoeffs",
    "RhsSpec",
    "ValueKind",
    "ExperimentRecord",
    "Fixed",
    "OptimalFromDelta",
    "make_rhs",
    "power_tail_solution",
    "add_noise",
    "run_convergence",
    "run_divergence",
    "fit_rate",
    "RateFit",
    "completeness_residuals",
    "records_to_csv",
    "CSV_HEADER",
]

CSV_HEADER = ("method", "n", "delta", "value_kind", "value", "seed")


@dataclass(frozen=True)
class SmoothManufactured:
    """Known solution ``a_k = (1 + k^2)^(-power)`` for ``|k| <= degree``.

    ``degree=None`` fills the whole ambient window of the operator.
    """

    degree: int | None = None
    power: float = 0.0

    def solution(self, M):
        d = M if self.degree is None else self.degree
        if d > M:
            raise ValueError(f"manufactured degree {d} exceeds the window M={M}")
        k = np.arange(-d, d + 1)
        return FourierVector(d, (1.0 + k * k) ** (-float(self.power))).resized(M)


@dataclass(frozen=True, eq=False)
class ExplicitSolution:
    """Manufactured solution given by its coefficients."""

    coeffs: FourierVector

    def solution(self, M):
        if self.coeffs.max_index > M:
            raise ValueError(f"manufactured degree {self.coeffs.max_index} exceeds the window M={M}")
        return self.coeffs.resized(M)


@dataclass(frozen=True)
class PowerTail:
    """``b(t) = 1 + sum_{k != 0} |k|^-(1/2 + alpha) e^{ikt}``: in L^2 but not in H^1."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {self.alpha}")


@dataclass(frozen=True)
class CustomCoeffs:
    coeffs: FourierVector


@dataclass(frozen=True)
class RhsSpec:
    kind: SmoothManufactured | ExplicitSolution | PowerTail | CustomCoeffs
    M: int


def _power_series(M, exponent):
    k = np.abs(np.arange(-M, M + 1)).astype(float)
    c = np.ones(2 * M + 1)
    nz = k > 0
    c[nz] = k[nz] ** exponent
    return FourierVector(M, c)


def power_tail_solution(alpha, M):
    """Solution of ``K0 psi = b`` for the power-tail data: ``1 + sum |k|^(1/2 - alpha) e^{ikt}``."""
    return _power_series(M, 0.5 - alpha)


def make_rhs(spec: RhsSpec, assembly: OperatorAssembly | None = None) -> FourierVector:
    kind = spec.kind
    if isinstance(kind, PowerTail):
        return _power_series(spec.M, -(0.5 + kind.alpha))
    if isinstance(kind, CustomCoeffs):
        return kind.coeffs.resized(max(spec.M, kind.coeffs.max_index))
    if isinstance(kind, (SmoothManufactured, ExplicitSolution)):
        if assembly is None:
            raise ValueError("a manufactured right-hand side needs an operator assembly")
        return apply_K(assembly, kind.solution(min(spec.M, assembly.M)))
    raise TypeError(f"unsupported rhs kind {kind!r}")


def add_noise(b: FourierVector, delta: float, seed: int) -> FourierVector:
    """Add a real (Hermitian-symmetric) perturbation of H^0 norm exactly ``delta``."""
    if delta < 0:
        raise ValueError(f"noise level must be non-negative, got {delta}")
    if delta == 0:
        return b
    rng = np.random.default_rng(seed)
    size = b.coeffs.size
    e = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    e = (e + np.conj(e[::-1])) / 2
    e *= delta / np.linalg.norm(e)
    return FourierVector(b.max_index, b.coeffs + e)


class ValueKind(str, enum.Enum):
    ErrorH0 = "ErrorH0"
    ErrorHneg1 = "ErrorHneg1"
    ErrorHneghalf = "ErrorHneghalf"
    SolutionNormH0 = "SolutionNormH0"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ExperimentRecord:
    method: MethodKind
    n: int
    delta: float
    value: float
    value_kind: ValueKind
    seed: int = 0
    error: str | None = field(default=None, compare=False)

    @property
    def sort_key(self):
        return (self.method.value, self.n, self.delta, self.seed, self.value_kind.value)


@dataclass(frozen=True)
class Fixed:
    ns: tuple

    def degrees(self, delta):
        return tuple(self.ns)


@dataclass(frozen=True)
class OptimalFromDelta:
    """Choose ``n = round(delta^(-1/(r+1)))`` for a solution known to lie in H^r."""

    r: float

    def __post_init__(self):
        if not 0 < self.r <= 2:
            raise ValueError(f"declared regularity must lie in (0, 2], got {self.r}")

    def degrees(self, delta):
        if delta <= 0:
            raise ValueError("the a-priori degree rule needs a positive noise level")
        return (max(1, round(delta ** (-1.0 / (self.r + 1)))),)


def _assemblies(curve, Ms):
    return {M: assemble_operator(curve, M) for M in sorted(set(Ms))}


def _map_cells(fn, cells):
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = [r for chunk in pool.map(fn, cells) for r in chunk]
    return sorted(rows, key=lambda r: r.sort_key)


def run_convergence(
    curve: BoundaryCurve,
    method,
    rhs: SmoothManufactured | ExplicitSolution,
    deltas,
    n_rule,
    seed: int = 0,
    M: int | None = None,
):
    """Solve noisy manufactured problems and record errors against the known solution.

    Each ``(delta, n)`` cell uses the ambient window ``M`` (default
    ``max(4n, 64)``), the known solution truncated to that window, and noise
    drawn over the same window.
    """
    method = MethodKind(method)
    cells = [(float(d), n) for d in deltas for n in n_rule.degrees(d)]
    Ms = {M or default_truncation(n) for _, n in cells}
    ops = _assemblies(curve, Ms)

    def run(cell):
        delta, n = cell
        op = ops[M or default_truncation(n)]
        exact = rhs.solution(op.M)
        b = add_noise(apply_K(op, exact), delta, seed)
        try:
            report = solve(method, op, b, n)
        except (SingularSystemError, ValueError) as exc:
            log.warning("%s n=%d delta=%g failed: %s", method, n, delta, exc)
            return [ExperimentRecord(method, n, delta, math.nan, ValueKind.ErrorH0, seed, str(exc))]
        err = report.solution - exact
        rows = [ExperimentRecord(method, n, delta, sobolev_norm(err, 0), ValueKind.ErrorH0, seed)]
        if method is MethodKind.DLS:
            rows.append(ExperimentRecord(method, n, delta, sobolev_norm(err, -1), ValueKind.ErrorHneg1, seed))
        if method is MethodKind.BG:
            rows.append(ExperimentRecord(method, n, delta, sobolev_norm(err, -0.5), ValueKind.ErrorHneghalf, seed))
        return rows

    return _map_cells(run, cells)


def run_divergence(curve: BoundaryCurve, method, alpha: float, n_list, M: int | None = None):
    """Record ``||Psi_n||_{H^0}`` for power-tail data truncated at ``M = 4 max(n)``."""
    method = MethodKind(method)
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list:
        raise InsufficientDataError("divergence study needs a non-empty n_list")
    M = M or 4 * n_list[-1]
    if 4 * n_list[-1] > M:
        raise ValueError(f"max degree {n_list[-1]} needs an ambient window of at least {4 * n_list[-1]}, got M={M}")
    op = assemble_operator(curve, M)
    b = make_rhs(RhsSpec(PowerTail(alpha), M))

    def run(n):
        try:
            report = solve(method, op, b, n)
        except SingularSystemError as exc:
            log.warning("%s n=%d failed: %s", method, n, exc)
            return [ExperimentRecord(method, n, 0.0, math.nan, ValueKind.SolutionNormH0, 0, str(exc))]
        return [ExperimentRecord(method, n, 0.0, sobolev_norm(report.solution, 0), ValueKind.SolutionNormH0)]

    return _map_cells(run, n_list)


@dataclass(frozen=True)
class RateFit:
    slope: float
    r_squared: float
    points: int


def fit_rate(records, x_axis: str = "n") -> RateFit:
    """Least-squares line through ``(log x, log value)``."""
    if x_axis not in ("n", "delta"):
        raise ValueError(f"x_axis must be 'n' or 'delta', got {x_axis!r}")
    pts = [
        (float(getattr(r, x_axis)), r.value)
        for r in records
        if r.error is None and np.isfinite(r.value) and r.value > 0 and getattr(r, x_axis) > 0
    ]
    if len(pts) < 3:
        raise InsufficientDataError(f"rate fit needs at least 3 positive points, got {len(pts)}")
    lx, ly = np.log(np.array(pts)).T
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(r2), len(pts))


def completeness_residuals(assembly: OperatorAssembly, x: FourierVector, n: int):
    """``(||x - P_n x||, ||x - Q_n x||)`` with ``Q_n`` the projection onto ``K(X_n)``."""
    xa = x.resized(assembly.M).coeffs
    outside = np.abs(np.arange(-assembly.M, assembly.M + 1)) > n
    p_res = float(np.linalg.norm(xa[outside]))
    q, _ = np.linalg.qr(assembly.matrix[:, assembly.window(n)])
    q_res = float(np.linalg.norm(xa - q @ (q.conj().T @ xa)))
    return p_res, q_res


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in sorted(records, key=lambda r: r.sort_key):
        writer.writerow([r.method.value, r.n, repr(float(r.delta)), r.value_kind.value, repr(float(r.value)), r.seed])
    return buf.getvalue()
