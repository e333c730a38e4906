"""Positive-momentum states, Gaussian precision functions, and the
phase-space machinery built on the Wigner-Moyal transform.

Conventions: symmetric Fourier transform with 1/sqrt(2*pi*hbar)
prefactors; time enters only through the free-particle phase
exp(-i p^2 t / 2 m hbar), applied on the fly to the stored t = 0
amplitudes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .specfun import (
    QuadratureGrid,
    QuadratureNotConvergedError,
    gauss_legendre,
)

#: Default truncation of semi-infinite momentum integrals for the
#: Bracken-Melloy example state, in units of alpha.  The slowly decaying
#: exp(-p/2a)/6 component still carries ~3e-4 of probability beyond 12a
#: and biases current integrals at the 1e-6 level beyond 40a, so the
#: cutoff sits at 60a where every tail is below 1e-10 relative.
BM_PMAX_ALPHAS = 60.0

#: Default node count for on-the-fly momentum quadratures.
DEFAULT_NODES = 800


@dataclass(frozen=True)
class PhysicalScales:
    """Dimensional constants of the problem; defaults give natural units."""

    hbar: float = 1.0
    mass: float = 1.0
    alpha: float = 1.0  # momentum scale of the example state
    horizon: float = 1.0  # duration T of the observation window

    def __post_init__(self):
        for name in ("hbar", "mass", "alpha", "horizon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class PrecisionSpec:
    """Gaussian apparatus precision function of momentum width sigma_tilde.

    The position width is sigma = hbar / sigma_tilde, so the product of
    the two widths is exactly hbar by construction.
    """

    sigma_tilde: float
    hbar: float = 1.0

    def __post_init__(self):
        if not self.sigma_tilde > 0:
            raise ValueError("sigma_tilde must be strictly positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be strictly positive")

    @property
    def sigma(self) -> float:
        return self.hbar / self.sigma_tilde

    def chi_momentum(self, p):
        """Momentum representation of the precision function (real)."""
        st = self.sigma_tilde
        return np.exp(-np.square(p) / (2 * st * st)) / (np.pi**0.25 * np.sqrt(st))

    def chi_position(self, x):
        """Position representation of the precision function (real)."""
        s = self.sigma
        return np.exp(-np.square(x) / (2 * s * s)) / (np.pi**0.25 * np.sqrt(s))


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.p)):
            raise ValueError("phase-space point must be finite")


def bm_momentum_amplitude(eta):
    """t = 0 momentum amplitude of the Bracken-Melloy example state.

    Dimensionless form: argument eta = p / alpha, value in units of
    alpha^(-1/2).  Vanishes identically for eta < 0 and is continuous
    at eta = 0.
    """
    eta = np.asarray(eta, dtype=float)
    with np.errstate(over="ignore"):
        pos = 18.0 * eta / np.sqrt(35.0) * (np.exp(-eta) - np.exp(-eta / 2) / 6.0)
    out = np.where(eta > 0, pos, 0.0)
    return out if out.ndim else float(out)


def bm_position_amplitude(xi):
    """t = 0 position amplitude of the example state.

    Dimensionless form: argument xi = alpha x / hbar, value in units of
    (alpha / hbar)^(1/2).
    """
    xi = np.asarray(xi, dtype=complex)
    return 18.0 * np.sqrt(1.0 / (70.0 * np.pi)) * (
        1.0 / (1.0 - 1j * xi) ** 2 - (2.0 / 3.0) / (1.0 - 2j * xi) ** 2
    )


@dataclass(frozen=True)
class MomentumState:
    """A normalized free-particle state with positive-momentum support.

    Either the analytic example state (kind "bm") or a state sampled at
    the nodes of a quadrature rule on [0, p_max] (kind "sampled");
    sampled states are consumed nodal-value-only, Nystrom style.
    """

    kind: str
    scales: PhysicalScales = field(default_factory=PhysicalScales)
    grid: QuadratureGrid | None = None
    amplitudes: np.ndarray | None = None

    @classmethod
    def bm_example(cls, scales: PhysicalScales | None = None) -> "MomentumState":
        return cls(kind="bm", scales=scales or PhysicalScales())

    @classmethod
    def from_samples(
        cls,
        grid: QuadratureGrid,
        amplitudes,
        scales: PhysicalScales | None = None,
        norm_tol: float = 1e-8,
    ) -> "MomentumState":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if grid.interval[0] < 0:
            raise ValueError("sampled states must live on a grid with p >= 0")
        if amplitudes.shape != grid.nodes.shape:
            raise ValueError("one amplitude per grid node required")
        norm = grid.integrate(np.abs(amplitudes) ** 2)
        if abs(norm - 1.0) > norm_tol:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {norm_tol}")
        return cls(
            kind="sampled",
            scales=scales or PhysicalScales(),
            grid=grid,
            amplitudes=amplitudes,
        )

    @property
    def p_max(self) -> float:
        if self.kind == "bm":
            return BM_PMAX_ALPHAS * self.scales.alpha
        return self.grid.interval[1]

    def amplitude(self, p):
        """t = 0 momentum amplitude at momenta p (exactly 0 for p < 0)."""
        if self.kind == "bm":
            a = self.scales.alpha
            return bm_momentum_amplitude(np.asarray(p, dtype=float) / a) / np.sqrt(a)
        raise TypeError("sampled states provide amplitudes at their nodes only")

    def nodal(self, n: int = DEFAULT_NODES) -> tuple[QuadratureGrid, np.ndarray]:
        """Quadrature grid and t = 0 amplitudes at its nodes."""
        if self.kind == "sampled":
            return self.grid, self.amplitudes
        grid = gauss_legendre(n, 0.0, self.p_max)
        return grid, np.asarray(self.amplitude(grid.nodes), dtype=complex)

    def time_phase(self, p, t: float):
        """Free-evolution phase factor exp(-i p^2 t / 2 m hbar)."""
        s = self.scales
        return np.exp(-1j * np.square(p) * t / (2 * s.mass * s.hbar))


def load_sampled_state(path, grid: QuadratureGrid,
                       scales: PhysicalScales | None = None) -> MomentumState:
    """Read a sampled state from CSV with header columns p, re, im.

    The p column must match the declared quadrature rule's nodes.  A
    state whose norm lies within [0.99, 1.01] is re-normalized; anything
    further off is rejected.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["p", "re", "im"]:
            raise ValueError("expected CSV header 'p,re,im'")
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader]
    p = np.array([r[0] for r in rows])
    amps = np.array([complex(r[1], r[2]) for r in rows])
    if p.shape != grid.nodes.shape or not np.allclose(p, grid.nodes, rtol=0, atol=1e-12):
        raise ValueError("CSV momenta do not match the declared quadrature rule")
    norm = grid.integrate(np.abs(amps) ** 2)
    if not 0.99 <= norm <= 1.01:
        raise ValueError(f"state norm {norm!r} outside the re-normalizable band [0.99, 1.01]")
    amps = amps / np.sqrt(norm)
    return MomentumState.from_samples(grid, amps, scales=scales)


def _wigner_from_nodes(nodes, weights, amps, prec: PrecisionSpec,
                       x: float, p: float, hbar: float) -> complex:
    # substitution r = p' + p/2 puts the integration variable on the
    # state's own support, independent of the phase-space momentum p
    phase = np.exp(1j * x * nodes / hbar)
    vals = weights * phase * prec.chi_momentum(nodes - p) * amps
    return np.exp(-1j * x * p / (2 * hbar)) * np.sum(vals) / np.sqrt(2 * np.pi * hbar)


def wigner_moyal(state: MomentumState, prec: PrecisionSpec, pt: PhasePoint,
                 t: float = 0.0, n: int = DEFAULT_NODES,
                 rel_tol: float = 1e-9) -> complex:
    """Wigner-Moyal transform W(x, p) by quadrature over momentum.

    For the analytic example state the rule is doubled once and the
    results compared; disagreement beyond rel_tol raises
    QuadratureNotConvergedError.  Sampled states are evaluated on their
    own grid (no refinement possible).
    """
    hbar = state.scales.hbar
    grid, amps = state.nodal(n)
    amps_t = amps * state.time_phase(grid.nodes, t)
    w1 = _wigner_from_nodes(grid.nodes, grid.weights, amps_t, prec, pt.x, pt.p, hbar)
    if state.kind == "sampled":
        return w1
    grid2, amps2 = state.nodal(2 * n)
    amps2_t = amps2 * state.time_phase(grid2.nodes, t)
    w2 = _wigner_from_nodes(grid2.nodes, grid2.weights, amps2_t, prec, pt.x, pt.p, hbar)
    scale = max(abs(w2), 1e-30)
    if abs(w1 - w2) > rel_tol * scale:
        raise QuadratureNotConvergedError(
            f"Wigner-Moyal quadrature moved by {abs(w1 - w2) / scale:.2e} on doubling"
        )
    return w2


def wigner_moyal_sampled_amplitudes(grid: QuadratureGrid, amps, prec: PrecisionSpec,
                                    pt: PhasePoint, hbar: float = 1.0) -> complex:
    """Wigner-Moyal transform of arbitrary nodal amplitudes.

    Low-level variant without the positive-momentum restriction, e.g.
    for transforming the precision function against itself.
    """
    amps = np.asarray(amps, dtype=complex)
    return _wigner_from_nodes(grid.nodes, grid.weights, amps, prec, pt.x, pt.p, hbar)


def wigner_moyal_position(psi_x, prec: PrecisionSpec, pt: PhasePoint,
                          n: int = DEFAULT_NODES, n_sigma: float = 14.0,
                          hbar: float = 1.0) -> complex:
    """Wigner-Moyal transform from a position-space wave function.

    Integrates over y around y = x/2, where the Gaussian precision
    window concentrates the integrand.  Used as an independent route to
    cross-check the momentum-space evaluation.
    """
    half = pt.x / 2
    width = n_sigma * prec.sigma
    grid = gauss_legendre(n, half - width, half + width)
    y = grid.nodes
    vals = (
        np.exp(-1j * pt.p * y / hbar)
        * prec.chi_position(y - half)
        * psi_x(y + half)
    )
    return grid.integrate(vals) / np.sqrt(2 * np.pi * hbar)


def husimi(state: MomentumState, prec: PrecisionSpec, pt: PhasePoint,
           t: float = 0.0, n: int = DEFAULT_NODES) -> float:
    """Husimi distribution f_t(x, p) = |W(x, p)|^2; nonnegative."""
    return abs(wigner_moyal(state, prec, pt, t=t, n=n)) ** 2


#: x-panels (lo, hi, x-nodes, momentum-quadrature nodes) for the
#: phase-space normalization check.  Outer panels carry more momentum
#: nodes because exp(i x p / hbar) oscillates faster there.
_NORM_PANELS = (
    (-140.0, -60.0, 400, 5400),
    (-60.0, -20.0, 300, 2700),
    (-20.0, 20.0, 400, 1400),
    (20.0, 60.0, 300, 2700),
    (60.0, 140.0, 400, 5400),
)


def phase_space_norm(state: MomentumState, prec: PrecisionSpec, t: float = 0.0,
                     p_lo: float = -8.0, p_hi: float = 36.0, n_p: int = 280,
                     panels=_NORM_PANELS) -> float:
    """Integral of the Husimi distribution over a truncated phase space.

    Should come out as 1 for a normalized state and precision function.
    Domain defaults are tuned to the example state in natural units
    (alpha = hbar = 1); the 1/x^4 position tail forces the wide x range.
    """
    hbar = state.scales.hbar
    pgrid = gauss_legendre(n_p, p_lo, p_hi)
    total = 0.0
    for (xlo, xhi, n_x, n_r) in panels:
        rgrid, amps = state.nodal(n_r)
        amps_t = amps * state.time_phase(rgrid.nodes, t)
        chi_mat = prec.chi_momentum(rgrid.nodes[None, :] - pgrid.nodes[:, None])
        xgrid = gauss_legendre(n_x, xlo, xhi)
        for xw, x in zip(xgrid.weights, xgrid.nodes):
            ph = np.exp(1j * x * rgrid.nodes / hbar) * rgrid.weights * amps_t
            w_row = chi_mat @ ph / np.sqrt(2 * np.pi * hbar)
            total += xw * np.dot(pgrid.weights, np.abs(w_row) ** 2)
    return total


def standard_current_zero(state: MomentumState, t: float = 0.0,
                          n: int = DEFAULT_NODES, rel_tol: float = 1e-9) -> float:
    """Probability current j_t(0) of a positive-momentum state.

    Double momentum quadrature of the (p + p') kernel between evolved
    amplitudes; the imaginary part cancels by kernel symmetry and is
    asserted to be a rounding residue before being discarded.
    """

    def evaluate(nodes, weights, amps):
        g = weights * amps * state.time_phase(nodes, t)
        # sum_ij conj(g_i) (p_i + p_j) g_j  ==  2 Re[ (sum conj(p g)) (sum g) ]
        total = np.conj(g) @ (nodes[:, None] + nodes[None, :]) @ g
        scale = max(abs(total), 1e-30)
        if abs(total.imag) > 1e-12 * scale:
            raise ArithmeticError(f"imaginary residue {total.imag!r} too large")
        s = state.scales
        return total.real / (4 * np.pi * s.mass * s.hbar)

    grid, amps = state.nodal(n)
    j1 = evaluate(grid.nodes, grid.weights, amps)
    if state.kind == "sampled":
        return j1
    grid2, amps2 = state.nodal(2 * n)
    j2 = evaluate(grid2.nodes, grid2.weights, amps2)
    if abs(j1 - j2) > rel_tol * max(abs(j2), 1e-30):
        raise QuadratureNotConvergedError(
            f"current quadrature moved by {abs(j1 - j2):.2e} on doubling"
        )
    return j2
