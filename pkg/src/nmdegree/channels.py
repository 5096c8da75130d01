"""Maps that are diagonal in the Weyl basis: channels, generators, propagators
and the auxiliary map Phi_t."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonHermitianSpectrum, SpectrumSingularity
from .rates import IMAG_TOL, SINGULARITY_FLOOR, RateProfile, Spectrum, TimeGrid, running_integral
from .weyl import build_basis

KINDS = ("channel", "generator", "propagator", "phi")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    d: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (self.d, self.d):
            raise DimensionMismatch(f"expected a {self.d}x{self.d} matrix, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValueError(f"density matrix has trace {np.trace(rho).real:.15g}")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        return cls(psi.size, 0.5 * (rho + rho.conj().T))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(d, np.eye(d) / d)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Induced-measure random state (Hilbert-Schmidt when ``rank == d``)."""
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(d, rho / np.trace(rho).real)


@dataclass(frozen=True, eq=False)
class DiagonalMap:
    """``X -> sum_a a_a U_a X U_a^dag`` with real coefficients."""

    d: int
    coefficients: np.ndarray
    kind: str = "channel"

    def __post_init__(self):
        a = np.array(self.coefficients, dtype=float)
        if a.shape != (self.d * self.d,):
            raise DimensionMismatch(f"need {self.d ** 2} coefficients, got {a.shape}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "channel" and abs(a.sum() - 1) > 1e-10:
            raise ValueError(f"channel coefficients sum to {a.sum():.15g}, not 1")
        a.flags.writeable = False
        object.__setattr__(self, "coefficients", a)

    @property
    def eigenvalues(self) -> np.ndarray:
        return build_basis(self.d).hadamard @ self.coefficients

    def process_matrix(self) -> np.ndarray:
        """Matrix of the map on the Weyl basis: ``M[b, a] = Tr[U_b^dag m(U_a)] / d``.

        Built by applying the map to every basis operator, not from the
        eigenvalue formula.
        """
        basis = build_basis(self.d)
        images = apply_map(self, basis.operators)
        return basis.coefficients(images).T


def _matrix(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def apply_map(m: DiagonalMap, rho) -> np.ndarray:
    """Apply ``m`` to a matrix or a stack of matrices (last two axes)."""
    x = _matrix(rho)
    if x.shape[-2:] != (m.d, m.d):
        raise DimensionMismatch(f"map on d={m.d} applied to shape {x.shape}")
    U = build_basis(m.d).operators
    return np.einsum("a,aij,...jk,alk->...il", m.coefficients, U, x, U.conj())


def apply_generator(gamma, rho) -> np.ndarray:
    """``sum_k gamma_k (U_k rho U_k^dag - rho)`` for ``k = 1 .. d^2-1``."""
    x = _matrix(rho)
    gamma = np.asarray(gamma, dtype=float)
    d = x.shape[-1]
    if gamma.shape != (d * d - 1,):
        raise DimensionMismatch(f"need {d * d - 1} rates for d={d}, got {gamma.shape}")
    U = build_basis(d).operators[1:]
    sandwiched = np.einsum("k,kij,...jl,kml->...im", gamma, U, x, U.conj())
    return sandwiched - gamma.sum() * x


def channel_at(s: Spectrum, t: float) -> DiagonalMap:
    """The dynamical map at grid time ``t`` as a coefficient vector."""
    i = s.grid.index_of(t)
    d = s.d
    p = build_basis(d).hadamard @ s.values[i] / (d * d)
    _check_real(p, "channel coefficients")
    return DiagonalMap(d, p.real, "channel")


def _check_real(v: np.ndarray, what: str):
    residue = np.abs(v.imag).max()
    if residue > IMAG_TOL:
        raise NonHermitianSpectrum(f"{what} have imaginary residue {residue:.3g}")


@dataclass(frozen=True, eq=False)
class PropagatorSlice:
    d: int
    s: float
    t: float
    coefficients: np.ndarray
    scaling: float

    def as_map(self) -> DiagonalMap:
        return DiagonalMap(self.d, self.coefficients, "propagator")

    @property
    def completely_positive(self) -> bool:
        return bool(self.coefficients.min() >= -1e-10)


def propagator(s: Spectrum, s_time: float, t_time: float) -> PropagatorSlice:
    """``V_{t,s}`` with ``Lambda_t = V_{t,s} Lambda_s`` from eigenvalue ratios."""
    if t_time < s_time:
        raise ValueError(f"propagator needs t >= s, got s={s_time}, t={t_time}")
    i, j = s.grid.index_of(s_time), s.grid.index_of(t_time)
    lam_s, lam_t = s.values[i], s.values[j]
    if np.abs(lam_s).min() < SINGULARITY_FLOOR:
        raise SpectrumSingularity(f"Lambda_s is not invertible at s={s_time}")
    d = s.d
    ratio = lam_t / lam_s
    q = build_basis(d).hadamard @ ratio / (d * d)
    _check_real(q, "propagator coefficients")
    # exp(2 int gamma_0) = prod_b |ratio_b|^(2/d^2): gamma_0 = sum_b mu_b / d^2
    scaling = float(np.exp(2.0 * np.log(np.abs(ratio)).sum() / (d * d)))
    coeffs = q.real
    coeffs.flags.writeable = False
    return PropagatorSlice(d, float(s.times[i]), float(s.times[j]), coeffs, scaling)


def phi_coefficients(gamma) -> np.ndarray:
    """Coefficients of ``Phi_t``: ``a_0 = sum_k gamma_k``, ``a_k = gamma_k``."""
    gamma = np.asarray(gamma, dtype=float)
    return np.concatenate([[gamma.sum()], gamma])


def phi_map(gamma) -> DiagonalMap:
    gamma = np.asarray(gamma, dtype=float)
    d = int(round(np.sqrt(gamma.size + 1)))
    return DiagonalMap(d, phi_coefficients(gamma), "phi")


@dataclass(frozen=True)
class PhiSplit:
    b: tuple[float, ...]
    c: tuple[float, ...]
    b_indices: tuple[int, ...]
    c_indices: tuple[int, ...]

    @property
    def M(self) -> int:
        return len(self.b)

    @property
    def N(self) -> int:
        return len(self.c)


def phi_decomposition(gamma) -> PhiSplit:
    """Split Phi_t into nonnegative weights ``b`` and magnitudes ``c`` of the
    strictly negative ones.  Zeros land in ``b``."""
    a = phi_coefficients(gamma)
    neg = a < 0
    return PhiSplit(
        b=tuple(a[~neg].tolist()),
        c=tuple((-a[neg]).tolist()),
        b_indices=tuple(np.flatnonzero(~neg).tolist()),
        c_indices=tuple(np.flatnonzero(neg).tolist()),
    )


def scaling_factor(gamma0, grid: TimeGrid, s_time: float, t_time: float) -> float:
    """``v(t; s) = exp(2 int_s^t gamma_0)`` by trapezoid on the grid."""
    if t_time < s_time:
        raise ValueError(f"scaling factor needs t >= s, got s={s_time}, t={t_time}")
    G0 = running_integral(np.asarray(gamma0, dtype=float), grid)
    i, j = grid.index_of(s_time), grid.index_of(t_time)
    return float(np.exp(2.0 * (G0[j] - G0[i])))


def generator_eigenvalues(rates: RateProfile) -> np.ndarray:
    """Eigenvalues ``mu_a(t)`` of ``L_t`` on ``U_a``: ``H @ gamma_full``."""
    return rates.full() @ build_basis(rates.d).hadamard.T
