"""Minimization of the density functionals over polynomial coefficient space.

The workhorse is an iteratively reweighted least-squares step: |f| is bounded
below by Re[f * conj(f_k)/|f_k|], so replacing the L^1-type term of the
expanded square with that linearization yields a convex quadratic surrogate
touching the objective at the current iterate.  Each surrogate solve is a
weighted normal-equations system, followed by the closed-form optimal
rescaling, which makes the accepted sequence monotone and leaves the iterate
on the manifold where the two variational masses agree.

The functional is nonconvex in the coefficients, so results are best-found
values over restarts, not certified global minima; the identities asserted in
tests hold at any stationary point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, ConfigurationError, UndefinedScaleError
from .functionals import (
    DEFAULT_RESOLUTION,
    DensityReport,
    FunctionalSpec,
    default_grid,
    density,
    quadratic_parts,
)
from .poly import ComplexPolynomial, vandermonde
from .quadrature import QuadratureGrid

__all__ = [
    "OptimizerConfig",
    "MinimizeResult",
    "degree_schedule",
    "optimal_scale",
    "minimize",
]

HYPERBOLIC = "hyperbolic"
PLANAR = "planar"


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 1500
    tolerance: float = 1e-10
    method: str = "irls"
    seed: int = 0
    restarts: int = 3

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.restarts < 1:
            raise ConfigurationError(f"restarts must be >= 1, got {self.restarts}")
        if self.method not in ("irls", "gradient-descent-with-line-search"):
            raise ConfigurationError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class MinimizeResult:
    minimizer: ComplexPolynomial
    value: float
    iterations: int
    converged: bool
    diagnostics: DensityReport
    restart_values: list[float]
    history: list[float] = field(default_factory=list, repr=False)

    def to_json_dict(self):
        return {
            "minimizer": [[float(c.real), float(c.imag)] for c in self.minimizer.coeffs],
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "restart_values": self.restart_values,
            "diagnostics": self.diagnostics.to_json_dict(),
        }


def degree_schedule(geometry: str, param: float) -> int:
    """Sufficient coefficient count: ceil(r^2/(1-r^2)) or ceil(2*gamma).

    Both are the (hyperbolic resp. scaled Euclidean) area of the core region,
    matching the heuristic that each zero discretizes a fixed amount of mass.
    The rounding guard keeps exact integer ratios (e.g. r = 1/sqrt(2)) from
    spilling over to the next integer.
    """
    if geometry == HYPERBOLIC:
        if not 0.0 < param < 1.0:
            raise ConfigurationError(f"hyperbolic radius must lie in (0,1), got {param}")
        x = param**2 / (1.0 - param**2)
    elif geometry == PLANAR:
        if param <= 0:
            raise ConfigurationError(f"gamma must be positive, got {param}")
        x = 2.0 * param
    else:
        raise ConfigurationError(f"unknown geometry {geometry!r}")
    return max(1, math.ceil(round(x, 9)))


def optimal_scale(f: ComplexPolynomial, spec: FunctionalSpec, grid: QuadratureGrid | None = None) -> float:
    """The t > 0 minimizing t -> density(t*f); ratio of the L^1 to L^2 mass."""
    if grid is None:
        grid = default_grid(spec)
    a, b, _ = quadratic_parts(f, spec, grid)
    if a <= 0.0 or b <= 0.0:
        raise UndefinedScaleError("optimal scale is undefined for the zero polynomial")
    s = b / a
    return s if spec.beta == 1.0 else s ** (1.0 / spec.beta)


class _Workspace:
    """Precomputed node arrays for one (spec, grid, n) minimization."""

    def __init__(self, spec: FunctionalSpec, grid: QuadratureGrid, n: int):
        from .functionals import _node_data, _validate_grid  # shared node bookkeeping

        _validate_grid(spec, grid)
        w, m, ind, domain, normalizer = _node_data(spec, grid)
        wm = grid.weights * m / normalizer
        self.V = vandermonde(grid.nodes, n)
        self.a_wt = np.where(domain, w**2 * wm, 0.0)
        self.b_wt = np.where(ind, w * wm, 0.0)
        self.c_val = float(np.sum(wm[ind]))
        G = (self.V * self.a_wt[:, None]).T @ self.V.conj()
        self.G = 0.5 * (G + G.conj().T)
        self.diag = np.sqrt(np.maximum(np.real(np.diag(self.G)), 1e-300))

    def value(self, c: np.ndarray) -> float:
        fv = np.abs(self.V @ c)
        return float(np.sum(self.a_wt * fv**2) - 2.0 * np.sum(self.b_wt * fv) + self.c_val)

    def rescaled(self, c: np.ndarray) -> np.ndarray:
        fv = np.abs(self.V @ c)
        a = float(np.sum(self.a_wt * fv**2))
        b = float(np.sum(self.b_wt * fv))
        if a <= 0.0 or b <= 0.0:
            return c
        return c * (b / a)

    def irls_step(self, c: np.ndarray) -> np.ndarray:
        fz = self.V @ c
        af = np.abs(fz)
        floor = 1e-14 * max(float(af.max()), 1e-300)
        u = fz / np.maximum(af, floor)
        rhs = self.V.conj().T @ (self.b_wt * u)
        try:
            chol = np.linalg.cholesky(self.G)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(
                f"IRLS normal equations singular at degree bound {self.V.shape[1]} "
                f"with {self.V.shape[0]} nodes; increase resolution or lower the degree"
            ) from exc
        c_new = np.linalg.solve(chol.conj().T, np.linalg.solve(chol, rhs))
        return self.rescaled(c_new)

    def grad(self, c: np.ndarray) -> np.ndarray:
        fz = self.V @ c
        af = np.abs(fz)
        floor = 1e-14 * max(float(af.max()), 1e-300)
        u = np.where(af < floor, 0.0, fz / np.maximum(af, floor))
        wv = self.a_wt * af - self.b_wt
        t = self.V.T @ (2.0 * wv * np.conj(u))
        # Complex form of the real-coordinate gradient: moving c by -step*t.conj()
        # changes the value by -step*|t|^2 to first order.
        return t.conj()


def _canonicalize(c: np.ndarray) -> np.ndarray:
    """Rotate the free global phase so the leading nonzero coefficient is >= 0."""
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size == 0:
        return c
    lead = c[nz[-1]]
    return c * np.exp(-1j * np.angle(lead))


def _descend(ws: _Workspace, c: np.ndarray, config: OptimizerConfig, use_irls: bool):
    val = ws.value(c)
    history = [val]
    iterations = 0
    converged = False
    snapshot = c.copy()
    accepted = 0
    for _ in range(config.max_iterations):
        iterations += 1
        improved = False
        if use_irls:
            c_new = ws.irls_step(c)
            v_new = ws.value(c_new)
            if v_new <= val:
                improved = True
        if not use_irls or not improved:
            # Backtracking line search on the real-coordinate gradient; used as
            # the whole method when requested, else as the fallback step.
            g = ws.grad(c)
            gnorm2 = float(np.sum(np.abs(g) ** 2))
            if gnorm2 == 0.0:
                converged = True
                break
            step = max(abs(val), 1e-8) / gnorm2
            for _ in range(60):
                c_try = ws.rescaled(c - step * g)
                v_try = ws.value(c_try)
                if v_try < val - 1e-4 * step * gnorm2:
                    c_new, v_new = c_try, v_try
                    improved = True
                    break
                step *= 0.5
            if not improved:
                converged = True
                break
        drop = val - v_new
        c, val = c_new, v_new
        history.append(val)
        if drop < config.tolerance * max(abs(val), 1e-30):
            converged = True
            break
        # Secant extrapolation along the recent trajectory: flat valleys make
        # plain reweighting crawl, and the jump is monotone-safe since it is
        # only kept on strict decrease.
        accepted += 1
        if use_irls and accepted % 10 == 0:
            direction = c - snapshot
            for theta in (16.0, 8.0, 4.0, 2.0):
                candidate = ws.rescaled(c + theta * direction)
                v_cand = ws.value(candidate)
                if v_cand < val:
                    c, val = candidate, v_cand
                    history.append(val)
                    break
            snapshot = c.copy()
    return c, val, iterations, converged, history


def _deterministic_init(spec: FunctionalSpec, grid: QuadratureGrid, ws: _Workspace, n: int) -> np.ndarray:
    if spec.geometry == HYPERBOLIC:
        c = np.zeros(n, dtype=complex)
        c[0] = 1.0 / (1.0 - spec.param**2 / 2.0)
        return c
    # Planar: project the triangular-lattice candidate, rescaled to the
    # gamma-envelope, onto the coefficient space via the surrogate Gram.
    from .lattice_sigma import abrikosov_candidate, lattice_normalize

    cand = abrikosov_candidate(lattice_normalize(math.pi / 3.0, 1.0), 1.0)
    fvals = cand.f0_values(np.sqrt(spec.param) * grid.nodes)
    rhs = ws.V.conj().T @ (ws.a_wt * fvals)
    try:
        chol = np.linalg.cholesky(ws.G)
        c = np.linalg.solve(chol.conj().T, np.linalg.solve(chol, rhs))
    except np.linalg.LinAlgError:
        c = np.zeros(n, dtype=complex)
        c[0] = 1.0
    if not np.all(np.isfinite(c)) or not np.any(np.abs(c) > 0):
        c = np.zeros(n, dtype=complex)
        c[0] = 1.0
    return c


def minimize(
    spec: FunctionalSpec,
    n: int,
    config: OptimizerConfig = OptimizerConfig(),
    grid: QuadratureGrid | None = None,
) -> MinimizeResult:
    """Best-found minimizer of the density over the n-coefficient space.

    Restart 0 is deterministic (constant for hyperbolic, lattice-candidate
    projection for planar); the rest draw Gaussian coefficients scaled to unit
    weighted norm per monomial.  Ties between restarts within 1e-12 go to the
    lowest restart index so results are reproducible under concurrency.
    """
    if n < 1:
        raise ConfigurationError(f"degree bound must be >= 1, got {n}")
    if spec.beta != 1.0:
        raise ConfigurationError("minimize handles the beta = 1 functionals only")
    if grid is None:
        grid = default_grid(spec, DEFAULT_RESOLUTION, degree=n)
    ws = _Workspace(spec, grid, n)
    use_irls = config.method == "irls"

    best = None
    restart_values: list[float] = []
    for rs in range(config.restarts):
        if rs == 0:
            c0 = _deterministic_init(spec, grid, ws, n)
        else:
            rng = np.random.default_rng(config.seed * 7919 + rs)
            raw = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            c0 = raw / (np.sqrt(2.0) * ws.diag)
        c, val, iterations, converged, history = _descend(ws, c0, config, use_irls)
        restart_values.append(val)
        if best is None or val < best[1] - 1e-12:
            best = (c, val, iterations, converged, history)

    c, _, iterations, converged, history = best
    minimizer = ComplexPolynomial(_canonicalize(c))
    report = density(minimizer, spec, default_grid(spec, grid.resolution, degree=n))
    return MinimizeResult(
        minimizer=minimizer,
        value=report.value,
        iterations=iterations,
        converged=converged,
        diagnostics=report,
        restart_values=restart_values,
        history=history,
    )
