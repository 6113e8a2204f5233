"""Weierstrass sigma machinery and quasiperiodic lattice candidates.

Works with the lattice 2*omega1*Z + 2*omega2*Z, omega1 real positive and
omega2 = omega1*exp(i*theta).  The sigma function is evaluated through the
first Jacobi theta function, whose nome q = exp(i*pi*tau) has |q| bounded by
exp(-pi*sin(theta)), so the series converges geometrically for every lattice
shape of interest.  The quasi-period invariants eta1, eta2 are each computed
from their own theta series (the second via the generator swap
(omega1, omega2) -> (omega2, -omega1)), which keeps the Legendre relation a
genuine cross-check instead of a definition.

Candidates f0 = exp(nu*z^2)*sigma(z) tuned so that |f0|^beta * exp(-|z|^2) is
doubly periodic: requiring the quasi-period factors to cancel forces
beta*(4*nu*omega_j + 2*eta_j) = 4*conj(omega_j) for both generators, and the
two resulting nu values agree exactly when the cell area satisfies
Im(conj(omega1)*omega2) = pi*beta/8, which is how lattice_normalize picks
omega1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidLatticeError, NormalizationError
from .quadrature import Cell, build_grid

__all__ = [
    "Lattice",
    "QuasiperiodicCandidate",
    "lattice_normalize",
    "sigma",
    "abrikosov_candidate",
    "cell_average_density",
    "optimal_cell_scale",
    "theta_scan",
    "scan_csv",
]


def _theta_term_count(tau: complex, im_v_max: float) -> int:
    """Terms needed for 1e-18 relative truncation of the theta-1 series."""
    decay = -math.pi * tau.imag
    n = 1
    while n < 200:
        if n * (n + 1) * decay + 2.0 * n * im_v_max < math.log(1e-18):
            return n + 1
        n += 1
    return 200


def _theta1(v: np.ndarray, tau: complex) -> np.ndarray:
    """theta_1(v | tau) = 2 * sum (-1)^n e^{i pi tau (n+1/2)^2} sin((2n+1)v)."""
    v = np.asarray(v, dtype=complex)
    im_max = float(np.max(np.abs(v.imag))) if v.size else 0.0
    terms = _theta_term_count(tau, im_max)
    n = np.arange(terms)
    coeff = (-1.0) ** n * np.exp(1j * math.pi * tau * (n + 0.5) ** 2)
    return 2.0 * np.tensordot(coeff, np.sin(np.multiply.outer(2 * n + 1, v)), axes=(0, 0))


def _theta1_prime0(tau: complex) -> complex:
    n = np.arange(_theta_term_count(tau, 0.0))
    coeff = (-1.0) ** n * np.exp(1j * math.pi * tau * (n + 0.5) ** 2)
    return 2.0 * complex(np.sum(coeff * (2 * n + 1)))


def _theta1_ppp0(tau: complex) -> complex:
    n = np.arange(_theta_term_count(tau, 0.0))
    coeff = (-1.0) ** n * np.exp(1j * math.pi * tau * (n + 0.5) ** 2)
    return -2.0 * complex(np.sum(coeff * (2 * n + 1) ** 3))


def _eta_for(w1: complex, w2: complex) -> complex:
    """Quasi-period invariant eta = zeta(w1) for the basis (w1, w2)."""
    tau = w2 / w1
    if tau.imag <= 0:
        raise InvalidLatticeError(f"basis not positively oriented: tau = {tau}")
    return -(math.pi**2) / (12.0 * w1) * _theta1_ppp0(tau) / _theta1_prime0(tau)


@dataclass(frozen=True)
class Lattice:
    """Half-periods, quasi-period invariants and shape data of one lattice."""

    omega1: complex
    omega2: complex
    theta: float
    eta1: complex
    eta2: complex
    tau: complex


def lattice_normalize(theta: float, beta: float) -> Lattice:
    """Lattice with omega2 = omega1*e^{i*theta}, sized for the exponent beta.

    omega1 > 0 is fixed by the cell-area condition Im(conj(omega1)*omega2)
    = pi*beta/8 (Euclidean cell area pi*beta/2), which is exactly the
    solvability condition for the candidate exponent nu.
    """
    if not 0.0 < theta < math.pi:
        raise InvalidLatticeError(f"theta must lie in (0, pi), got {theta}")
    if beta <= 0:
        raise InvalidLatticeError(f"beta must be positive, got {beta}")
    w1 = complex(math.sqrt(math.pi * beta / (8.0 * math.sin(theta))))
    w2 = w1 * complex(math.cos(theta), math.sin(theta))
    eta1 = _eta_for(w1, w2)
    # Independent series for eta2 through the swapped basis (omega2, -omega1).
    eta2 = _eta_for(w2, -w1)
    legendre = eta1 * w2 - eta2 * w1
    if abs(legendre - 1j * math.pi / 2.0) > 1e-10:
        raise InvalidLatticeError(f"Legendre relation violated: {legendre}")
    return Lattice(omega1=w1, omega2=w2, theta=theta, eta1=eta1, eta2=eta2, tau=w2 / w1)


def sigma(z, lattice: Lattice):
    """Weierstrass sigma for the lattice 2*omega1*Z + 2*omega2*Z.

    sigma(z) = (2*omega1/(pi*theta1'(0))) * e^{eta1 z^2/(2 omega1)}
               * theta1(pi z/(2 omega1) | tau); odd, sigma'(0) = 1, simple
    zeros exactly on the lattice.
    """
    if lattice.tau.imag <= 0:
        raise InvalidLatticeError(f"tau must have positive imaginary part, got {lattice.tau}")
    z = np.asarray(z, dtype=complex)
    w1 = lattice.omega1
    v = math.pi * z / (2.0 * w1)
    pref = 2.0 * w1 / (math.pi * _theta1_prime0(lattice.tau))
    out = pref * np.exp(lattice.eta1 * z**2 / (2.0 * w1)) * _theta1(v, lattice.tau)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class QuasiperiodicCandidate:
    """Trial minimizer f0 = e^{nu z^2} sigma(z) with doubly periodic envelope."""

    lattice: Lattice
    nu: complex
    beta: float
    scale: float = 1.0

    def f0_values(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.exp(self.nu * z**2) * sigma(z, self.lattice)

    def envelope(self, z) -> np.ndarray:
        """g(z) = scale * |f0(z)|^beta * e^{-|z|^2}; doubly periodic by design."""
        z = np.asarray(z, dtype=complex)
        return self.scale * np.abs(self.f0_values(z)) ** self.beta * np.exp(-np.abs(z) ** 2)

    def periodicity_residual(self, n_points: int = 1000, seed: int = 0) -> float:
        """max |g(z + 2*omega_j) - g(z)| / sup g over a random test grid."""
        rng = np.random.default_rng(seed)
        u = rng.uniform(0.0, 1.0, n_points)
        v = rng.uniform(0.0, 1.0, n_points)
        z = 2.0 * u * self.lattice.omega1 + 2.0 * v * self.lattice.omega2
        g = self.envelope(z)
        sup = max(float(np.max(g)), 1e-300)
        res = 0.0
        for w in (self.lattice.omega1, self.lattice.omega2):
            res = max(res, float(np.max(np.abs(self.envelope(z + 2.0 * w) - g))))
        return res / sup


def abrikosov_candidate(lattice: Lattice, beta: float) -> QuasiperiodicCandidate:
    """Candidate with nu solving beta*(4*nu*omega_j + 2*eta_j) = 4*conj(omega_j).

    The two generator equations must give the same nu; they do exactly when the
    lattice is normalized for this beta, so a disagreement is reported as a
    normalization error rather than silently averaged away.
    """
    if beta <= 0:
        raise NormalizationError(f"beta must be positive, got {beta}")
    nus = [
        (2.0 * np.conj(w) / beta - eta) / (2.0 * w)
        for w, eta in ((lattice.omega1, lattice.eta1), (lattice.omega2, lattice.eta2))
    ]
    if abs(nus[0] - nus[1]) > 1e-8 * max(1.0, abs(nus[0])):
        raise NormalizationError(
            f"lattice is not normalized for beta = {beta}: nu estimates {nus[0]} vs {nus[1]}"
        )
    return QuasiperiodicCandidate(lattice=lattice, nu=complex(0.5 * (nus[0] + nus[1])), beta=beta)


def _cell_means(cand: QuasiperiodicCandidate, resolution: tuple[int, int]) -> tuple[float, float]:
    grid = build_grid(Cell(cand.lattice.omega1, cand.lattice.omega2), resolution)
    g = np.abs(cand.f0_values(grid.nodes)) ** cand.beta * np.exp(-np.abs(grid.nodes) ** 2)
    total = float(np.sum(grid.weights))
    m1 = float(np.sum(g * grid.weights)) / total
    m2 = float(np.sum(g**2 * grid.weights)) / total
    return m1, m2


def optimal_cell_scale(cand: QuasiperiodicCandidate, resolution: tuple[int, int] = (256, 256)) -> float:
    """The s minimizing the cell mean of (s*g - 1)^2: cell-mean g / cell-mean g^2."""
    m1, m2 = _cell_means(cand, resolution)
    if m2 <= 0:
        raise NormalizationError("candidate envelope vanishes identically")
    return m1 / m2


def cell_average_density(
    cand: QuasiperiodicCandidate,
    resolution: tuple[int, int] = (256, 256),
    optimize_scale: bool = True,
) -> float:
    """Cell average of (s*|f0|^beta*e^{-|z|^2} - 1)^2 w.r.t. normalized area.

    Equals the large-disk limit of the disk-averaged exponent-family density by
    periodicity.  With optimize_scale the multiplicative normalization s is set
    to its closed-form optimum, in which case the value is 1 - s*(cell mean of
    the envelope), mirroring the stationary-scaling form of the density.
    """
    if resolution[0] < 16 or resolution[1] < 16:
        raise ConfigurationError(
            f"cell resolution {resolution} too coarse; use at least 16x16 (128x128 or more near pi/3)"
        )
    residual = cand.periodicity_residual(n_points=200)
    if residual > 1e-8:
        raise NormalizationError(
            f"candidate envelope is not doubly periodic (residual {residual:.2e}); "
            "rebuild the lattice with lattice_normalize for this beta"
        )
    m1, m2 = _cell_means(cand, resolution)
    s = (m1 / m2) if optimize_scale else cand.scale
    return 1.0 - 2.0 * s * m1 + s * s * m2


def theta_scan(
    theta_min: float,
    theta_max: float,
    steps: int,
    beta: float = 1.0,
    resolution: tuple[int, int] = (128, 128),
) -> list[tuple[float, float]]:
    """Scaled cell-average density on an equispaced grid of lattice angles."""
    if steps < 2:
        raise ConfigurationError(f"steps must be >= 2, got {steps}")
    if not 0.0 < theta_min < theta_max < math.pi:
        raise InvalidLatticeError(f"scan interval must sit inside (0, pi), got [{theta_min}, {theta_max}]")
    rows = []
    for theta in np.linspace(theta_min, theta_max, steps):
        cand = abrikosov_candidate(lattice_normalize(float(theta), beta), beta)
        rows.append((float(theta), cell_average_density(cand, resolution, optimize_scale=True)))
    return rows


def scan_csv(rows: list[tuple[float, float]]) -> str:
    """CSV with header theta,value, one row per grid point, 12 significant digits."""
    lines = ["theta,value"] + [f"{t:.12g},{v:.12g}" for t, v in rows]
    return "\n".join(lines) + "\n"
