"""Time-sampled descriptions of a random unitary evolution and the conversions
between them.

One evolution has three equivalent faces on a :class:`TimeGrid`:

* :class:`ProbabilityProfile` ``p_a(t)`` -- weights of ``U_a . U_a^dag``
* :class:`Spectrum` ``lambda_a(t)`` -- eigenvalues of the map on ``U_a``
* :class:`RateProfile` ``gamma_k(t)`` -- decoherence rates of the generator

plus the running integrals :class:`CumulativeRates` ``Gamma_k(t)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonHermitianSpectrum, NonRealRates, SpectrumSingularity
from .weyl import build_basis

IMAG_TOL = 1e-9
SINGULARITY_FLOOR = 1e-12
PROB_TOL = 1e-10


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TimeGrid:
    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points, float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a time grid needs at least 2 points")
        if pts[0] != 0.0:
            raise ValueError(f"time grid must start at 0, got {pts[0]}")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("time grid must be strictly increasing")
        if not np.all(np.isfinite(pts)):
            raise ValueError("time grid contains non-finite values")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, t_max: float, steps: int) -> "TimeGrid":
        """``steps`` equally spaced points on ``[0, t_max]``."""
        _check_spec(t_max, steps)
        return cls(np.linspace(0.0, t_max, steps))

    @classmethod
    def log(cls, t_max: float, steps: int, decades: float = 3.0) -> "TimeGrid":
        """Points denser near 0: ``t_max * (10**x - 1) / (10**decades - 1)``."""
        _check_spec(t_max, steps)
        x = np.linspace(0.0, decades, steps)
        pts = t_max * np.expm1(x * np.log(10)) / np.expm1(decades * np.log(10))
        pts[-1] = t_max
        return cls(pts)

    def __len__(self):
        return self.points.size

    def index_of(self, t: float, atol: float = 1e-12) -> int:
        i = int(np.argmin(np.abs(self.points - t)))
        if abs(self.points[i] - t) > atol * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not a grid point")
        return i


def _check_spec(t_max, steps):
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if steps < 2:
        raise ValueError(f"need at least 2 grid points, got {steps}")


@dataclass(frozen=True, eq=False)
class _Profile:
    d: int
    grid: TimeGrid
    values: np.ndarray
    _dtype = float
    _width_offset = 0  # components = d^2 - offset

    def __post_init__(self):
        vals = _frozen(self.values, self._dtype)
        width = self.d * self.d - self._width_offset
        if vals.shape != (len(self.grid), width):
            raise DimensionMismatch(
                f"{type(self).__name__} for d={self.d} needs shape "
                f"{(len(self.grid), width)}, got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"{type(self).__name__} contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.grid.points


@dataclass(frozen=True, eq=False)
class RateProfile(_Profile):
    """Rates ``gamma_1..gamma_{d^2-1}`` per time point; negative entries allowed."""

    provenance: str = "tabulated"
    _width_offset = 1

    @property
    def gamma0(self) -> np.ndarray:
        return -self.values.sum(axis=1)

    def full(self) -> np.ndarray:
        """Rates with ``gamma_0 = -sum_k gamma_k`` prepended, shape ``(T, d^2)``."""
        return np.column_stack([self.gamma0, self.values])


@dataclass(frozen=True, eq=False)
class CumulativeRates(_Profile):
    _width_offset = 1


@dataclass(frozen=True, eq=False)
class Spectrum(_Profile):
    _dtype = complex

    def __post_init__(self):
        super().__post_init__()
        if np.abs(self.values[:, 0] - 1).max() > 1e-9:
            raise ValueError("spectrum violates trace preservation: lambda_0 != 1")


@dataclass(frozen=True, eq=False)
class ProbabilityProfile(_Profile):
    def __post_init__(self):
        super().__post_init__()
        err = np.abs(self.values.sum(axis=1) - 1).max()
        if err > PROB_TOL:
            raise ValueError(f"probabilities do not sum to 1 (max error {err:.3g})")

    @property
    def legitimate(self) -> bool:
        return bool(self.values.min() >= -PROB_TOL)


def lambdas_from_probs(p: ProbabilityProfile) -> Spectrum:
    H = build_basis(p.d).hadamard
    return Spectrum(p.d, p.grid, p.values @ H.T)


def probs_from_lambdas(s: Spectrum) -> ProbabilityProfile:
    d = s.d
    H = build_basis(d).hadamard
    p = (s.values @ H.T) / (d * d)
    residue = np.abs(p.imag).max()
    if residue > IMAG_TOL:
        raise NonHermitianSpectrum(f"probabilities have imaginary residue {residue:.3g}")
    return ProbabilityProfile(d, s.grid, p.real)


def time_derivative(values: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Second-order finite differences along axis 0 (one-sided at the ends)."""
    edge = 2 if len(grid) > 2 else 1
    return np.gradient(values, grid.points, axis=0, edge_order=edge)


def mu_from_spectrum(s: Spectrum) -> np.ndarray:
    """``mu_a = d lambda_a/dt / lambda_a`` on the grid, shape ``(T, d^2)``.

    Evaluated as the derivative of ``log lambda`` (unwrapped phase), which is
    exact for semigroups and keeps relative accuracy where ``|lambda|`` decays.
    """
    mag = np.abs(s.values)
    if mag.min() < SINGULARITY_FLOOR:
        t_idx, a_idx = np.unravel_index(np.argmin(mag), mag.shape)
        raise SpectrumSingularity(
            f"|lambda_{a_idx}| = {mag[t_idx, a_idx]:.3g} at t={s.times[t_idx]:.6g} "
            f"is below the floor {SINGULARITY_FLOOR:g}"
        )
    log_l = np.log(mag) + 1j * np.unwrap(np.angle(s.values), axis=0)
    mu = time_derivative(log_l, s.grid)
    mu[:, 0] = 0.0
    return mu


def rates_from_mu(mu: np.ndarray, d: int, grid: TimeGrid, provenance: str = "derived") -> RateProfile:
    H = build_basis(d).hadamard
    mu = np.asarray(mu, dtype=complex)
    full = (mu @ H.T) / (d * d)
    residue = np.abs(full.imag).max()
    if residue > IMAG_TOL:
        raise NonRealRates(f"rates have imaginary residue {residue:.3g}")
    full = full.real
    rates = RateProfile(d, grid, full[:, 1:], provenance=provenance)
    drift = np.abs(full[:, 0] - rates.gamma0).max()
    # gamma_0 from the H row and from -sum(gamma_k) agree iff mu_0 == 0
    if drift > 1e-10 * max(1.0, np.abs(full).max()):
        raise NonRealRates(f"gamma_0 inconsistent with -sum(gamma_k) by {drift:.3g}")
    return rates


def rates_from_spectrum(s: Spectrum) -> RateProfile:
    return rates_from_mu(mu_from_spectrum(s), s.d, s.grid)


def running_integral(values: np.ndarray, grid: TimeGrid, method: str = "trapezoid") -> np.ndarray:
    """Cumulative integral from 0 along axis 0.

    ``"trapezoid"`` is the composite trapezoid rule.  ``"hermite"`` adds the
    cubic-Hermite end correction ``h^2/12 (f'_a - f'_b)`` per interval with
    finite-difference slopes, which lifts the order to four on smooth data.
    """
    t = grid.points
    h = np.diff(t).reshape((-1,) + (1,) * (values.ndim - 1))
    pieces = 0.5 * h * (values[1:] + values[:-1])
    if method == "hermite":
        slope = time_derivative(values, grid)
        pieces = pieces + h * h / 12.0 * (slope[:-1] - slope[1:])
    elif method != "trapezoid":
        raise ValueError(f"unknown quadrature method {method!r}")
    out = np.zeros_like(values, dtype=np.result_type(values, float))
    np.cumsum(pieces, axis=0, out=out[1:])
    return out


def cumulative(r: RateProfile, method: str = "trapezoid") -> CumulativeRates:
    return CumulativeRates(r.d, r.grid, running_integral(r.values, r.grid, method))


def spectrum_from_cumulative(G: CumulativeRates) -> Spectrum:
    """``lambda_b = exp(sum_{k>=1} (H_bk - 1) Gamma_k)``.

    The ``-1`` carries ``Gamma_0 = -sum_k Gamma_k`` through ``H_b0 = 1``, which
    is what keeps rates -> spectrum -> rates an identity.
    """
    H = build_basis(G.d).hadamard
    expo = G.values @ (H[:, 1:] - 1.0).T
    return Spectrum(G.d, G.grid, np.exp(expo))


def spectrum_from_rates(r: RateProfile, method: str = "trapezoid") -> Spectrum:
    return spectrum_from_cumulative(cumulative(r, method))


def probs_from_rates(r: RateProfile, method: str = "trapezoid") -> ProbabilityProfile:
    return probs_from_lambdas(spectrum_from_rates(r, method))
