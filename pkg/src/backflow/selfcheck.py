"""Reduced-resolution verification suite runnable from the CLI.

Each check exercises one of the library's documented invariants or
headline values at a resolution cheap enough for routine use.  The
report is deterministic: running it twice produces identical text.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import efexample, maxflow, specfun, states
from .results import fmt


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name, passed, detail):
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _check_special_functions():
    worst = 0.0
    for x in np.linspace(-5.0, 5.0, 41):
        lhs = specfun.erfcx(x) * np.exp(-x * x)
        worst = max(worst, abs(lhs - specfun.erfc(x)) / specfun.erfc(x))
    finite = np.isfinite(specfun.erfcx(1e4))
    grid = specfun.gauss_legendre(6, -1.0, 1.0)
    moment_err = max(
        abs(grid.integrate(grid.nodes**k) - (2.0 / (k + 1) if k % 2 == 0 else 0.0))
        for k in range(12)
    )
    ok = worst <= 1e-13 and finite and moment_err <= 1e-14
    return _check(
        "special-functions",
        ok,
        f"erfcx identity {fmt(worst)}, quadrature moment error {fmt(moment_err)}",
    )


def _check_state_norm():
    state = states.MomentumState.bm_example()
    grid, amps = state.nodal(800)
    norm = grid.integrate(np.abs(amps) ** 2)
    return _check("state-norm", abs(norm - 1.0) <= 1e-10, f"norm {fmt(norm)}")


def _check_overlap_closed_form():
    worst = 0.0
    for eta in (-5.0, -1.0, 0.0, 2.0, 20.0):
        for s in (0.5, 1.0, 5.0):
            w = efexample.ExampleWidth(s)
            exact = efexample.integral_I_quadrature(eta, w)
            rel = abs(efexample.integral_I(eta, w) - exact) / max(abs(exact), 1e-300)
            worst = max(worst, rel)
    return _check("overlap-closed-form", worst <= 1e-8, f"worst rel {fmt(worst)}")


def _check_husimi_slice():
    state = states.MomentumState.bm_example()
    prec = states.PrecisionSpec(sigma_tilde=1.3)
    w = efexample.ExampleWidth(1.3)
    worst = 0.0
    for eta in (-0.5, 0.5, 1.0, 2.5):
        direct = states.husimi(state, prec, states.PhasePoint(0.0, eta))
        slice_val = efexample.husimi_slice(eta, w)  # already times hbar
        worst = max(worst, abs(direct - slice_val) / slice_val)
    return _check("husimi-slice", worst <= 1e-8, f"worst rel {fmt(worst)}")


def _check_sharp_limit():
    value = efexample.scaled_effective_current(efexample.ExampleWidth(0.05))
    err = abs(value - efexample.SHARP_LIMIT)
    return _check("sharp-limit-current", err <= 0.005, f"J(0.05) = {fmt(value)}")


def _check_critical_width():
    s_star = efexample.critical_width(1e-3)
    ok = 5.2 <= s_star <= 6.0
    return _check("critical-width", ok, f"s* = {fmt(s_star)}")


def _check_correction():
    rng_pairs = [(0.1, 0.1), (0.5, 2.0), (3.0, 0.2), (1.0, 1.0), (4.0, 5.0)]
    w = maxflow.MaxflowWidth(0.8)
    sym_ok = all(
        maxflow.u_correction(u, v, w) == maxflow.u_correction(v, u, w)
        for u, v in rng_pairs
    )
    u = np.linspace(0.0, 6.0, 25)
    nonpos = all(
        np.all(maxflow.u_correction(u[:, None], u[None, :], maxflow.MaxflowWidth(vs)) <= 0)
        for vs in (0.1, 1.0, 10.0)
    )
    worst = 0.0
    for (uu, vv) in rng_pairs:
        exact = maxflow.u_correction_quadrature(uu, vv, w)
        worst = max(worst, abs(maxflow.u_correction(uu, vv, w) - exact))
    return _check(
        "smoothing-correction",
        sym_ok and nonpos and worst <= 1e-9,
        f"symmetry {sym_ok}, nonpositive {nonpos}, quadrature dev {fmt(worst)}",
    )


def _check_sharp_kernel_reduction():
    u = np.linspace(0.05, 8.0, 30)
    uu, vv = u[:, None], u[None, :]
    dev = np.max(np.abs(
        maxflow.kernel_entry(uu, vv, maxflow.MaxflowWidth(1e-8))
        - maxflow.kernel_entry(uu, vv, maxflow.MaxflowWidth(0.0))
    ))
    return _check("sharp-kernel-reduction", dev <= 1e-6, f"max dev {fmt(dev)}")


def _check_sharp_bound(kernel_fn=None):
    if kernel_fn is None:
        res = maxflow.max_backflow(maxflow.MaxflowWidth(0.0), nodes=500, u_max=12.0)
        value = res.delta_max
    else:
        values, cutoffs = [], []
        for frac in maxflow.CUTOFF_FRACTIONS:
            cutoff = 12.0 * frac
            grid = specfun.gauss_legendre(max(50, round(500 * frac)), 0.0, cutoff)
            sw = np.sqrt(grid.weights)
            kernel = kernel_fn(grid.nodes[:, None], grid.nodes[None, :],
                               maxflow.MaxflowWidth(0.0))
            top, _ = specfun.sym_eig_max(
                specfun.SymmetricMatrix(sw[:, None] * kernel * sw[None, :])
            )
            values.append(top)
            cutoffs.append(cutoff)
        value = maxflow._extrapolate(cutoffs, values)
    err = abs(value - 0.0384517)
    return _check("sharp-transfer-bound", err <= 1e-3, f"delta_max(0) = {fmt(value)}")


def _check_monotone_decay():
    vals = [
        maxflow.max_backflow(maxflow.MaxflowWidth(vs), nodes=400, u_max=10.0).delta_max
        for vs in (0.0, 1.0, 2.0, 3.0)
    ]
    ok = all(a > b for a, b in zip(vals, vals[1:])) and all(v > 0 for v in vals)
    return _check("monotone-decay", ok, "values " + " ".join(fmt(v) for v in vals))


def _check_time_consistency():
    res = maxflow.max_backflow(maxflow.MaxflowWidth(1.0), nodes=400, u_max=10.0)
    transfer = maxflow.integrated_transfer(res)
    err = abs(transfer - res.eigenvalue)
    return _check("time-consistency", err <= 1e-5, f"deviation {fmt(err)}")


def _check_phase_space_norm():
    state = states.MomentumState.bm_example()
    prec = states.PrecisionSpec(sigma_tilde=1.3)
    panels = (
        (-60.0, -25.0, 120, 1500),
        (-25.0, 25.0, 250, 700),
        (25.0, 60.0, 120, 1500),
    )
    total = states.phase_space_norm(state, prec, n_p=200, panels=panels)
    # |x| > 60 tail of the 1/x^4 envelope costs a few 1e-6
    return _check("phase-space-norm", abs(total - 1.0) <= 1e-4, f"norm {fmt(total)}")


def _check_feasibility():
    vs, ok_flag = maxflow.feasibility(
        maxflow.ApparatusSpec(mass=1.0, sigma_tilde=1.0, duration=1.0)
    )
    vs2, bad_flag = maxflow.feasibility(
        maxflow.ApparatusSpec(mass=1.0, sigma_tilde=2.0, duration=1.0)
    )
    ok = vs == 1.0 and ok_flag and vs2 == 2.0 and not bad_flag
    return _check("feasibility", ok, f"boundary {fmt(vs)}, broad {fmt(vs2)}")


def run_selfcheck(kernel_fn=None) -> list[CheckResult]:
    """Run the whole reduced-resolution suite.

    kernel_fn optionally replaces the eigenproblem kernel in the
    sharp-bound check; it exists so tests can verify that a corrupted
    kernel is actually caught.
    """
    return [
        _check_special_functions(),
        _check_state_norm(),
        _check_overlap_closed_form(),
        _check_husimi_slice(),
        _check_sharp_limit(),
        _check_critical_width(),
        _check_correction(),
        _check_sharp_kernel_reduction(),
        _check_sharp_bound(kernel_fn=kernel_fn),
        _check_monotone_decay(),
        _check_time_consistency(),
        _check_phase_space_norm(),
        _check_feasibility(),
    ]


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
