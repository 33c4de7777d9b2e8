"""Least squares, dual least squares and Bubnov-Galerkin solvers in the Fourier basis.

All three reduce to a dense linear problem on sub-blocks of the ambient
Galerkin matrix ``A = [<K e_k, e_j>]``:

* BG:  ``A[X_n, X_n] x = b[X_n]``
* LS:  ``min_x || A[:, X_n] x - b ||`` over the ambient window
* DLS: minimum-norm solution of ``A[X_n, :] x = b[X_n]``, which lies in
  ``K*(Y_n)`` with ``K*`` realized as ``A^H``

Every solve goes through an SVD so that the condition estimate is exact and
no truncation is applied below the singularity cutoff.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystemError, TruncationError
from .fourier import FourierVector
from .operator import OperatorAssembly

__all__ = [
    "MethodKind",
    "SolveReport",
    "SINGULAR_CUTOFF",
    "solve",
    "solve_bg",
    "solve_ls",
    "solve_dls",
    "stability_sigma",
]

SINGULAR_CUTOFF = 1e14


class MethodKind(str, enum.Enum):
    LS = "LS"
    DLS = "DLS"
    BG = "BG"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class SolveReport:
    solution: FourierVector
    method: MethodKind
    n: int
    residual_norm: float
    condition_estimate: float

    def to_json(self):
        return {
            "method": self.method.value,
            "n": self.n,
            "residual_norm": self.residual_norm,
            "condition_estimate": self.condition_estimate,
            "solution": self.solution.to_json(),
        }


def _svd_solve(mat, rhs):
    """Minimum-norm least-squares solution and the 2-norm condition number of ``mat``."""
    u, sv, vh = np.linalg.svd(mat, full_matrices=False)
    cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
    if not cond <= SINGULAR_CUTOFF:
        raise SingularSystemError(cond)
    x = vh.conj().T @ ((u.conj().T @ rhs) / sv)
    return x, float(max(cond, 1.0))


def _ambient_rhs(assembly, b):
    if b.max_index > assembly.M:
        raise TruncationError(f"right-hand side of degree {b.max_index} exceeds the operator window M={assembly.M}")
    return b.resized(assembly.M).coeffs


def _check_degree(assembly, n, limit, method):
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    if n > limit:
        raise ValueError(f"{method}: degree n={n} exceeds the admissible {limit} for M={assembly.M}")


def solve_bg(assembly: OperatorAssembly, b: FourierVector, n: int) -> SolveReport:
    _check_degree(assembly, n, assembly.M, "BG")
    rhs = _ambient_rhs(assembly, b)
    win = assembly.window(n)
    x, cond = _svd_solve(assembly.matrix[np.ix_(win, win)], rhs[win])
    residual = assembly.matrix[:, win] @ x - rhs
    return SolveReport(FourierVector(n, x), MethodKind.BG, n, float(np.linalg.norm(residual)), cond)


def solve_ls(assembly: OperatorAssembly, b: FourierVector, n: int) -> SolveReport:
    _check_degree(assembly, n, assembly.M // 4, "LS")
    rhs = _ambient_rhs(assembly, b)
    cols = assembly.matrix[:, assembly.window(n)]
    x, cond = _svd_solve(cols, rhs)
    residual = cols @ x - rhs
    return SolveReport(FourierVector(n, x), MethodKind.LS, n, float(np.linalg.norm(residual)), cond)


def solve_dls(assembly: OperatorAssembly, b: FourierVector, n: int) -> SolveReport:
    _check_degree(assembly, n, assembly.M // 4, "DLS")
    rhs = _ambient_rhs(assembly, b)
    rows = assembly.matrix[assembly.window(n), :]
    x, cond = _svd_solve(rows, rhs[assembly.window(n)])
    residual = assembly.matrix @ x - rhs
    return SolveReport(FourierVector(assembly.M, x), MethodKind.DLS, n, float(np.linalg.norm(residual)), cond)


_SOLVERS = {MethodKind.LS: solve_ls, MethodKind.DLS: solve_dls, MethodKind.BG: solve_bg}


def solve(method, assembly: OperatorAssembly, b: FourierVector, n: int) -> SolveReport:
    return _SOLVERS[MethodKind(method)](assembly, b, n)


def stability_sigma(assembly: OperatorAssembly, n: int) -> float:
    """``max{||z|| : z in X_n, ||K z|| = 1}``, i.e. one over the smallest singular value of ``A[:, X_n]``."""
    _check_degree(assembly, n, assembly.M // 4, "stability")
    sv = np.linalg.svd(assembly.matrix[:, assembly.window(n)], compute_uv=False)
    return float(1.0 / sv[-1])
