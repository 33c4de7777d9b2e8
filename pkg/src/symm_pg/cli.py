"""Command-line front end: ``symm-pg {assemble,solve,study,kernel-check} CONFIG``.

Every run is described by a single JSON config file; flags only override the
output path and verbosity. Exit codes: 0 success, 1 config error, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curve import (
    BoundaryCurve,
    curve_from_config,
    smooth_kernel,
    smooth_kernel_diagonal_derivatives,
)
from .errors import ConfigError, CurveError, InsufficientDataError, SingularSystemError
from .fourier import FourierVector
from .harness import (
    CustomCoeffs,
    Fixed,
    OptimalFromDelta,
    PowerTail,
    RhsSpec,
    SmoothManufactured,
    ValueKind,
    add_noise,
    fit_rate,
    make_rhs,
    records_to_csv,
    run_convergence,
    run_divergence,
)
from .operator import assemble_operator, default_grid, default_truncation
from .solvers import MethodKind, solve

log = logging.getLogger("symm_pg")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
KERNEL_CHECK_STEPS = (1e-2, 1e-3, 1e-4)


@dataclass
class RunConfig:
    curve: BoundaryCurve
    method: MethodKind = MethodKind.BG
    M: int | None = None
    m: int | None = None
    n: int | None = None
    n_list: list = field(default_factory=list)
    delta: float = 0.0
    delta_list: list = field(default_factory=list)
    rhs: dict | None = None
    seed: int = 0
    seeds: list = field(default_factory=list)
    study: str | None = None
    alpha: float | None = None
    r: float | None = None
    t_values: list = field(default_factory=list)
    output: str | None = None


def _int(cfg, key, minimum=0):
    val = cfg.get(key)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
        raise ConfigError(key, f"expected an integer >= {minimum}, got {val!r}")
    return val


def _num(val, key, minimum=None):
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not np.isfinite(val):
        raise ConfigError(key, f"expected a finite number, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {val!r}")
    return float(val)


def parse_config(cfg: dict) -> RunConfig:
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if "curve" not in cfg:
        raise ConfigError("curve", "missing curve specification")
    curve_cfg = cfg["curve"]
    kind = curve_cfg.get("kind") if isinstance(curve_cfg, dict) else None
    if kind not in ("disc", "ellipse", "trig"):
        raise ConfigError("curve.kind", f"unknown curve kind {kind!r}; expected 'disc', 'ellipse' or 'trig'")
    try:
        curve = curve_from_config(curve_cfg)
    except KeyError as exc:
        raise ConfigError(f"curve.{exc.args[0]}", "missing field") from None
    except (CurveError, TypeError, ValueError) as exc:
        raise ConfigError("curve", str(exc)) from None

    try:
        method = MethodKind(cfg.get("method", "BG"))
    except ValueError:
        raise ConfigError("method", f"expected one of LS, DLS, BG, got {cfg.get('method')!r}") from None

    rc = RunConfig(curve=curve, method=method)
    rc.M = _int(cfg, "M", minimum=0)
    rc.m = _int(cfg, "m", minimum=1)
    rc.n = _int(cfg, "n")
    rc.seed = _int(cfg, "seed") or 0
    rc.n_list = [int(_num(v, "n_list", 0)) for v in cfg.get("n_list", [])]
    rc.delta = _num(cfg.get("delta", 0.0), "delta", 0.0)
    rc.delta_list = [_num(v, "delta_list", 0.0) for v in cfg.get("delta_list", [])]
    rc.seeds = [int(_num(v, "seeds", 0)) for v in cfg.get("seeds", [])]
    rc.t_values = [_num(v, "t_values") for v in cfg.get("t_values", [])]
    rc.rhs = cfg.get("rhs")
    rc.study = cfg.get("study")
    if rc.study not in (None, "divergence", "convergence"):
        raise ConfigError("study", f"expected 'divergence' or 'convergence', got {rc.study!r}")
    if cfg.get("alpha") is not None:
        rc.alpha = _num(cfg["alpha"], "alpha")
    if cfg.get("r") is not None:
        rc.r = _num(cfg["r"], "r")
    rc.output = cfg.get("output")

    if rc.M is not None:
        if rc.n is not None and 4 * rc.n > rc.M:
            raise ConfigError("n", f"n={rc.n} exceeds M/4 = {rc.M / 4:g}")
        if rc.n_list and 4 * max(rc.n_list) > rc.M:
            raise ConfigError("n_list", f"max(n_list)={max(rc.n_list)} exceeds M/4 = {rc.M / 4:g}")
        if rc.m is not None and rc.m < 2 * (2 * rc.M + 1):
            raise ConfigError("m", f"anti-aliasing rule m >= 2(2M+1) = {2 * (2 * rc.M + 1)} violated by m={rc.m}")
    return rc


def load_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_config(raw)


def _rhs_spec(rc: RunConfig, M: int) -> RhsSpec:
    cfg = rc.rhs
    if not isinstance(cfg, dict):
        raise ConfigError("rhs", "missing right-hand side specification")
    kind = cfg.get("kind")
    if kind == "power_tail":
        alpha = _num(cfg.get("alpha"), "rhs.alpha")
        try:
            return RhsSpec(PowerTail(alpha), M)
        except ValueError as exc:
            raise ConfigError("rhs.alpha", str(exc)) from None
    if kind == "manufactured":
        degree = _int(cfg, "degree")
        if degree is not None and degree > M:
            raise ConfigError("rhs.degree", f"degree {degree} exceeds M={M}")
        return RhsSpec(SmoothManufactured(degree, _num(cfg.get("power", 0.0), "rhs.power")), M)
    if kind == "custom":
        try:
            coeffs = FourierVector.from_json(cfg["coeffs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("rhs.coeffs", f"expected {{max_index, re, im}}: {exc}") from None
        if coeffs.max_index > M:
            raise ConfigError("rhs.coeffs", f"degree {coeffs.max_index} exceeds M={M}")
        return RhsSpec(CustomCoeffs(coeffs), M)
    raise ConfigError("rhs.kind", f"unknown rhs kind {kind!r}; expected 'power_tail', 'manufactured' or 'custom'")


def _window(rc: RunConfig, n: int):
    M = rc.M if rc.M is not None else default_truncation(n)
    m = rc.m if rc.m is not None else default_grid(M)
    return M, m


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        log.info("wrote %s", path)


def cmd_assemble(rc: RunConfig, output=None):
    M = rc.M if rc.M is not None else 64
    m = rc.m if rc.m is not None else default_grid(M)
    op = assemble_operator(rc.curve, M, m)
    print(f"tail energy (relative smooth-part mass in |j| > M/2): {op.tail_fraction:.3e}", file=sys.stderr)
    _write(json.dumps(op.to_json()) + "\n", output)
    return EXIT_OK


def cmd_solve(rc: RunConfig, output=None):
    if rc.n is None:
        raise ConfigError("n", "solve needs a degree n")
    M, m = _window(rc, rc.n)
    op = assemble_operator(rc.curve, M, m)
    b = make_rhs(_rhs_spec(rc, M), op)
    b = add_noise(b, rc.delta, rc.seed)
    report = solve(rc.method, op, b, rc.n)
    _write(json.dumps(report.to_json()) + "\n", output)
    return EXIT_OK


def _summary(records, x_axis):
    out = {}
    for vk in ValueKind:
        rows = [r for r in records if r.value_kind is vk]
        if not rows:
            continue
        fit = fit_rate(rows, x_axis)
        out[vk.value] = {"x_axis": x_axis, "slope": fit.slope, "r_squared": fit.r_squared, "points": fit.points}
    return out


def cmd_study(rc: RunConfig, output=None):
    if rc.study == "divergence":
        alpha = rc.alpha
        if alpha is None and isinstance(rc.rhs, dict):
            alpha = rc.rhs.get("alpha")
        if alpha is None:
            raise ConfigError("alpha", "divergence study needs alpha")
        try:
            PowerTail(float(alpha))
        except ValueError as exc:
            raise ConfigError("alpha", str(exc)) from None
        records = run_divergence(rc.curve, rc.method, float(alpha), rc.n_list, rc.M)
        summary = {"study": "divergence", "alpha": alpha, "fits": _summary(records, "n")}
    elif rc.study == "convergence":
        if not rc.delta_list:
            raise ConfigError("delta_list", "convergence study needs delta_list")
        spec = _rhs_spec(rc, rc.M if rc.M is not None else 10**9).kind if rc.rhs else SmoothManufactured()
        if not isinstance(spec, SmoothManufactured):
            raise ConfigError("rhs.kind", "convergence study needs a manufactured right-hand side")
        if rc.r is not None:
            try:
                rule = OptimalFromDelta(rc.r)
            except ValueError as exc:
                raise ConfigError("r", str(exc)) from None
            x_axis = "delta"
        elif rc.n_list:
            rule, x_axis = Fixed(tuple(rc.n_list)), "n"
        else:
            raise ConfigError("n_list", "convergence study needs r or a non-empty n_list")
        records = []
        for seed in rc.seeds or [rc.seed]:
            records += run_convergence(rc.curve, rc.method, spec, rc.delta_list, rule, seed=seed, M=rc.M)
        summary = {"study": "convergence", "fits": _summary(records, x_axis)}
    else:
        raise ConfigError("study", "expected 'divergence' or 'convergence'")

    csv_text = records_to_csv(records)
    _write(csv_text, output)
    summary_text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if output is not None:
        Path(output).with_suffix(".summary.json").write_text(summary_text)
    print(summary_text, file=sys.stderr, end="")
    return EXIT_OK


def _observed_order(errors, steps):
    orders = []
    for (e1, h1), (e2, h2) in zip(zip(errors, steps), zip(errors[1:], steps[1:])):
        if e1 > 0 and e2 > 0:
            orders.append(np.log(e1 / e2) / np.log(h1 / h2))
        else:
            orders.append(float("nan"))
    return orders


def kernel_check_table(curve: BoundaryCurve, t_values, steps=KERNEL_CHECK_STEPS):
    """Compare the diagonal limits of ``k`` with finite differences across the diagonal."""
    rows = []
    for t in t_values:
        lim = smooth_kernel_diagonal_derivatives(curve, t)
        k0 = smooth_kernel(curve, t, t)
        approx = {"k_diag": [], "k_t": [], "k_tt": []}
        for h in steps:
            kp, km = smooth_kernel(curve, t + h, t), smooth_kernel(curve, t - h, t)
            approx["k_diag"].append((smooth_kernel(curve, t, t + h) + smooth_kernel(curve, t, t - h)) / 2)
            approx["k_t"].append((kp - km) / (2 * h))
            approx["k_tt"].append((kp - 2 * k0 + km) / h**2)
        exact = {"k_diag": lim.k_diag, "k_t": lim.k_t_limit, "k_tt": lim.k_tt_limit}
        for name, vals in approx.items():
            diffs = [abs(v - exact[name]) for v in vals]
            rows.append(
                {
                    "t": float(t),
                    "quantity": name,
                    "closed_form": float(exact[name]),
                    "finite_difference": [float(v) for v in vals],
                    "abs_diff": [float(d) for d in diffs],
                    "observed_order": [float(o) for o in _observed_order(diffs, steps)],
                }
            )
    return rows


def cmd_kernel_check(rc: RunConfig, output=None):
    t_values = rc.t_values or list(np.pi * (2 * np.arange(16) + 1) / 16)
    rows = kernel_check_table(rc.curve, t_values)
    hs = "".join(f"  |diff| h={h:<7g}" for h in KERNEL_CHECK_STEPS)
    lines = [f"{'t':>8}  {'quantity':<7} {'closed form':>14}{hs}  orders"]
    for row in rows:
        diffs = "".join(f"  {d:>16.3e}" for d in row["abs_diff"])
        orders = ", ".join("exact" if not np.isfinite(o) else f"{o:.2f}" for o in row["observed_order"])
        lines.append(f"{row['t']:8.4f}  {row['quantity']:<7} {row['closed_form']:14.8f}{diffs}  {orders}")
    _write("\n".join(lines) + "\n", None)
    if output is not None:
        Path(output).write_text(json.dumps(rows, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "assemble": cmd_assemble,
    "solve": cmd_solve,
    "study": cmd_study,
    "kernel-check": cmd_kernel_check,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="symm-pg", description="Petrov-Galerkin solvers for Symm's equation")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="increase log verbosity")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("-o", "--output", help="output path (overrides the config's 'output')")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)
    try:
        rc = load_config(args.config)
        output = args.output or rc.output
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](rc, output)
    except (SingularSystemError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, InsufficientDataError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
