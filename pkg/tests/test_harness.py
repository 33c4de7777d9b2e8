import math

import numpy as np
import pytest

from oracles import power_tail_norm
from symm_pg import (
    Disc,
    ExperimentRecord,
    ExplicitSolution,
    Fixed,
    FourierVector,
    InsufficientDataError,
    MethodKind,
    OptimalFromDelta,
    PowerTail,
    RhsSpec,
    SmoothManufactured,
    add_noise,
    fit_rate,
    make_rhs,
    run_convergence,
    run_divergence,
    solve_dls,
    sobolev_norm,
)
from symm_pg.harness import (
    CSV_HEADER,
    CustomCoeffs,
    ValueKind,
    completeness_residuals,
    power_tail_solution,
    records_to_csv,
)

R = math.exp(-0.5)


def records(xs, ys, x_axis="n"):
    out = []
    for x, y in zip(xs, ys):
        n, d = (x, 0.0) if x_axis == "n" else (1, x)
        out.append(ExperimentRecord(MethodKind.BG, n, d, y, ValueKind.ErrorH0))
    return out


# --- right-hand sides ------------------------------------------------------


def test_power_tail_coefficients():
    b = make_rhs(RhsSpec(PowerTail(0.25), 4))
    expected = [4**-0.75, 3**-0.75, 2**-0.75, 1, 1, 1, 2**-0.75, 3**-0.75, 4**-0.75]
    np.testing.assert_allclose(b.coeffs, expected, rtol=1e-15)
    assert b.is_real()


def test_power_tail_norm_matches_brute_force_sum():
    b = make_rhs(RhsSpec(PowerTail(0.1), 1024))
    total = 1.0
    for k in range(1, 1025):
        total += 2 * k**-1.2
    assert sobolev_norm(b, 0) ** 2 == pytest.approx(total, rel=1e-12)


def test_power_tail_is_l2_but_not_h1():
    h0 = [sobolev_norm(make_rhs(RhsSpec(PowerTail(0.25), M)), 0) for M in (64, 256, 1024, 4096)]
    h1 = [sobolev_norm(make_rhs(RhsSpec(PowerTail(0.25), M)), 1) for M in (64, 256, 1024, 4096)]
    assert np.all(np.diff(h1) / h1[:-1] > 0.3)
    assert h0[-1] - h0[-2] < h0[1] - h0[0] and h0[-1] < 2.5


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.1, 0.7])
def test_power_tail_alpha_domain(alpha):
    with pytest.raises(ValueError):
        PowerTail(alpha)


def test_manufactured_rhs_on_reference_disc(assemble):
    op = assemble(Disc(R), 16)
    b = make_rhs(RhsSpec(SmoothManufactured(degree=0), 16), op)
    np.testing.assert_allclose(b.coeffs, FourierVector.basis(0, 16).coeffs, atol=1e-15)
    with pytest.raises(ValueError):
        make_rhs(RhsSpec(SmoothManufactured(degree=0), 16))
    with pytest.raises(ValueError):
        SmoothManufactured(degree=20).solution(16)


def test_manufactured_solution_coefficients():
    x = SmoothManufactured(degree=2, power=1.5).solution(4)
    assert x.max_index == 4
    np.testing.assert_allclose([x[k] for k in range(-4, 5)], [0, 0, 5**-1.5, 2**-1.5, 1, 2**-1.5, 5**-1.5, 0, 0])


def test_custom_coefficients_pass_through():
    v = FourierVector.from_modes({2: 1j})
    b = make_rhs(RhsSpec(CustomCoeffs(v), 4))
    assert b.max_index == 4 and b[2] == 1j


def test_power_tail_solution_inverts_k0():
    psi = power_tail_solution(0.25, 8)
    b = make_rhs(RhsSpec(PowerTail(0.25), 8))
    k = np.abs(psi.indices).astype(float)
    k[8] = 1
    np.testing.assert_allclose(psi.coeffs / k, b.coeffs, rtol=1e-14)


# --- noise -----------------------------------------------------------------


def test_add_noise_examples():
    b = make_rhs(RhsSpec(PowerTail(0.25), 32))
    assert add_noise(b, 0.0, 1) is b
    noisy = add_noise(b, 0.01, 1)
    assert sobolev_norm(noisy - b, 0) == pytest.approx(0.01, abs=1e-14)
    assert (noisy - b).is_real(1e-15)
    np.testing.assert_array_equal(add_noise(b, 0.01, 1).coeffs, noisy.coeffs)
    assert not np.array_equal(add_noise(b, 0.01, 2).coeffs, noisy.coeffs)
    with pytest.raises(ValueError):
        add_noise(b, -1.0, 0)


# --- degree rules ----------------------------------------------------------


def test_optimal_degree_rule():
    rule = OptimalFromDelta(2)
    assert [rule.degrees(d)[0] for d in (1e-2, 1e-3, 1e-4, 1e-5)] == [5, 10, 22, 46]
    assert OptimalFromDelta(1).degrees(0.5) == (1,)
    with pytest.raises(ValueError):
        OptimalFromDelta(3)
    with pytest.raises(ValueError):
        rule.degrees(0.0)
    assert Fixed((4, 8)).degrees(0.1) == (4, 8)


# --- convergence -----------------------------------------------------------


def test_convergence_exact_mode_on_disc():
    sol = ExplicitSolution(FourierVector.basis(1))
    rows = run_convergence(Disc(R), "BG", sol, [0.0], Fixed((1, 3, 8)))
    h0 = [r for r in rows if r.value_kind is ValueKind.ErrorH0]
    assert len(h0) == 3 and all(r.value == 0 for r in h0)
    assert {r.value_kind for r in rows} == {ValueKind.ErrorH0, ValueKind.ErrorHneghalf}


def test_convergence_ellipse_ls_degree_three(ellipse):
    rows = run_convergence(ellipse, "LS", SmoothManufactured(degree=3, power=1.0), [0.0], Fixed((3,)))
    assert len(rows) == 1 and rows[0].value <= 1e-8


def test_convergence_dls_records_weak_error(kite):
    rows = run_convergence(kite, "DLS", SmoothManufactured(degree=2), [0.0], Fixed((4,)))
    kinds = {r.value_kind for r in rows}
    assert kinds == {ValueKind.ErrorH0, ValueKind.ErrorHneg1}


def test_convergence_failures_are_recorded():
    rows = run_convergence(Disc(1.0), "BG", SmoothManufactured(degree=1), [0.0], Fixed((2,)))
    assert len(rows) == 1 and math.isnan(rows[0].value) and rows[0].error


def test_convergence_rate_with_noise_on_disc():
    sol = SmoothManufactured(power=1.5)
    slopes = []
    for seed in range(5):
        rows = run_convergence(Disc(R), "BG", sol, [1e-2, 1e-3, 1e-4, 1e-5], OptimalFromDelta(2), seed=seed)
        slopes.append(fit_rate([r for r in rows if r.value_kind is ValueKind.ErrorH0], "delta").slope)
    assert 0.56 <= np.mean(slopes) <= 0.76


@pytest.mark.parametrize("method", ["BG", "LS"])
@pytest.mark.parametrize("fixture", ["ellipse", "kite"])
def test_noiseless_rate_law(method, fixture, request):
    # coefficients (1+k^2)^{-3/2} lie in H^r for r < 5/2; declare r = 2
    rows = run_convergence(request.getfixturevalue(fixture), method, SmoothManufactured(power=1.5), [0.0], Fixed((8, 16, 32, 64)))
    fit = fit_rate([r for r in rows if r.value_kind is ValueKind.ErrorH0], "n")
    assert -fit.slope >= 2 - 0.1


def test_dls_converges_for_smooth_data(assemble):
    M = 1024
    op = assemble(Disc(R), M)
    k = np.arange(-M, M + 1).astype(float)
    b = FourierVector(M, 1 / (1 + k * k))
    exact = FourierVector(M, np.where(k == 0, 1.0, np.abs(k)) / (1 + k * k))
    errs = [sobolev_norm(solve_dls(op, b, n).solution - exact, 0) for n in (8, 16, 32, 64, 128, 256)]
    assert all(b <= 1.1 * a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < errs[0] / 4


# --- divergence ------------------------------------------------------------


@pytest.mark.parametrize("method", ["LS", "DLS", "BG"])
def test_divergence_matches_oracle_on_disc(method):
    rows = run_divergence(Disc(R), method, 0.25, [1, 4, 16])
    for r in rows:
        assert r.value_kind is ValueKind.SolutionNormH0
        assert r.value == pytest.approx(power_tail_norm(0.25, r.n), rel=1e-12)
    assert rows[0].value ** 2 == pytest.approx(3.0)


def test_divergence_is_strictly_increasing():
    rows = run_divergence(Disc(R), "BG", 0.1, [2, 4, 8, 16, 32, 64])
    values = [r.value for r in rows]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_divergence_slope_small_alpha():
    rows = run_divergence(Disc(R), "BG", 0.01, [8, 16, 32, 64, 128, 256, 512])
    assert 0.94 <= fit_rate(rows, "n").slope <= 1.0


def test_divergence_preconditions():
    with pytest.raises(InsufficientDataError):
        run_divergence(Disc(R), "BG", 0.1, [])
    with pytest.raises(ValueError):
        run_divergence(Disc(R), "BG", 0.1, [8], M=16)
    with pytest.raises(ValueError):
        run_divergence(Disc(R), "BG", 0.6, [8])


def test_divergence_on_ellipse_grows(ellipse):
    rows = run_divergence(ellipse, "LS", 0.1, [4, 8, 16, 32])
    values = [r.value for r in rows]
    assert all(b > a for a, b in zip(values, values[1:]))


# --- rate fits -------------------------------------------------------------


def test_fit_rate_examples():
    xs = [2, 4, 8, 16]
    fit = fit_rate(records(xs, xs))
    assert fit.slope == pytest.approx(1.0) and fit.r_squared == pytest.approx(1.0) and fit.points == 4
    assert fit_rate(records(xs, [x * x for x in xs])).slope == pytest.approx(2.0)
    assert fit_rate(records([1e-1, 1e-2, 1e-3], [1e-2, 1e-4, 1e-6], "delta"), "delta").slope == pytest.approx(2.0)


def test_fit_rate_oracle_sequence():
    ns = [16, 32, 64, 128, 256, 512]
    fit = fit_rate(records(ns, [power_tail_norm(0.1, n) for n in ns]))
    assert abs(fit.slope - 0.9) <= 0.03


def test_fit_rate_needs_three_usable_points():
    with pytest.raises(InsufficientDataError):
        fit_rate(records([1, 2], [1, 2]))
    with pytest.raises(InsufficientDataError):
        fit_rate(records([1, 2, 3], [1, 0, math.nan]))
    with pytest.raises(ValueError):
        fit_rate(records([1, 2, 3], [1, 2, 3]), "m")


# --- completeness ----------------------------------------------------------


@pytest.mark.parametrize("fixture", ["ellipse", "kite"])
def test_completeness_residuals_vanish(fixture, request, assemble):
    M = 1024 if fixture == "ellipse" else 512
    op = assemble(request.getfixturevalue(fixture), M)
    rng = np.random.default_rng(17)
    k = np.arange(-M, M + 1)
    x = FourierVector(M, (rng.standard_normal(2 * M + 1) + 1j * rng.standard_normal(2 * M + 1)) / (1 + np.abs(k)) ** 0.75)
    ns = [n for n in (8, 16, 32, 64, 128, 256) if n <= M // 4]
    p_res, q_res = np.array([completeness_residuals(op, x, n) for n in ns]).T
    assert np.all(np.diff(p_res) < 0) and np.all(np.diff(q_res) < 0)
    # |x_k| ~ |k|^{-3/4}, so the tails decay like n^{-1/4}
    for res in (p_res, q_res):
        assert np.polyfit(np.log(ns), np.log(res), 1)[0] <= -0.2


# --- records ---------------------------------------------------------------


def test_csv_header_and_determinism():
    sol = SmoothManufactured(power=1.5)
    a = records_to_csv(run_convergence(Disc(R), "BG", sol, [1e-2, 1e-3], OptimalFromDelta(2), seed=3))
    b = records_to_csv(run_convergence(Disc(R), "BG", sol, [1e-3, 1e-2], OptimalFromDelta(2), seed=3))
    assert a == b
    assert a.splitlines()[0] == ",".join(CSV_HEADER) == "method,n,delta,value_kind,value,seed"
    assert len(a.splitlines()) == 5


def test_records_sort_deterministically():
    rows = run_divergence(Disc(R), "BG", 0.1, [16, 4, 8, 4])
    assert [r.n for r in rows] == [4, 8, 16]
