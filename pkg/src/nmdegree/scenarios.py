"""Closed-form random unitary evolutions with exact evaluators.

``pauli_tanh``: qubit rates ``(c/2, c/2, -(c/2) tanh(ct))`` on ``(s1, s2, s3)``.
It is P-divisible, never CP-divisible for ``t > 0``, and equals the equal
mixture of the semigroups ``c[s_k . s_k - .]``, ``k = 1, 2``.

``qutrit_e3``: rates ``c/3`` except on the commuting pair ``U_4, U_8`` where the
rate is chosen so that ``p_4 = p_8 = 0``; it is the equal mixture of three
semigroups over ``{U_1, U_2}``, ``{U_3, U_6}`` and ``{U_5, U_7}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import DiagonalMap
from .rates import ProbabilityProfile, RateProfile, Spectrum, TimeGrid
from .weyl import build_basis

# Pauli label -> flat Weyl index; U_3 = i*sigma_2, which conjugates identically
PAULI_TO_WEYL = {1: 1, 2: 3, 3: 2}

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Scenario:
    """Exact evaluators map a time array of shape (T,) to (T, width) arrays in
    flat Weyl order; rates omit ``gamma_0``."""

    name: str
    d: int
    c: float
    rates: Evaluator
    lambdas: Evaluator
    probs: Evaluator
    cumulative: Evaluator | None = None
    labels: dict = field(default_factory=dict)

    def rate_profile(self, grid: TimeGrid) -> RateProfile:
        return RateProfile(self.d, grid, self.rates(grid.points), provenance=f"scenario:{self.name}")

    def spectrum(self, grid: TimeGrid) -> Spectrum:
        return Spectrum(self.d, grid, self.lambdas(grid.points))

    def probability_profile(self, grid: TimeGrid) -> ProbabilityProfile:
        return ProbabilityProfile(self.d, grid, self.probs(grid.points))

    def channel(self, t: float) -> DiagonalMap:
        return DiagonalMap(self.d, self.probs(np.array([float(t)]))[0], "channel")

    def process_matrices(self, times) -> np.ndarray:
        return np.stack([self.channel(t).process_matrix() for t in np.atleast_1d(times)])


@dataclass(frozen=True, eq=False)
class Mixture:
    components: tuple[Scenario, ...]
    weights: tuple[float, ...]

    def process_matrices(self, times) -> np.ndarray:
        return sum(w * s.process_matrices(times) for s, w in zip(self.components, self.weights))


def _check_c(c: float) -> float:
    c = float(c)
    if not (c > 0 and np.isfinite(c)):
        raise ValueError(f"rate constant c must be positive, got {c}")
    return c


def _col(t) -> np.ndarray:
    return np.asarray(t, dtype=float).reshape(-1)


def pauli_tanh(c: float) -> Scenario:
    c = _check_c(c)
    w1, w2, w3 = (PAULI_TO_WEYL[k] for k in (1, 2, 3))

    def rates(t):
        t = _col(t)
        g = np.empty((t.size, 3))
        g[:, w1 - 1] = c / 2
        g[:, w2 - 1] = c / 2
        g[:, w3 - 1] = -(c / 2) * np.tanh(c * t)
        return g

    def cumulative(t):
        t = _col(t)
        G = np.empty((t.size, 3))
        G[:, w1 - 1] = c * t / 2
        G[:, w2 - 1] = c * t / 2
        # log cosh(x) = x + log1p(e^{-2x}) - log 2, stable for large x
        G[:, w3 - 1] = -0.5 * (c * t + np.log1p(np.exp(-2 * c * t)) - np.log(2.0))
        return G

    def lambdas(t):
        e = np.exp(-2 * c * _col(t))
        lam = np.empty((e.size, 4), dtype=complex)
        lam[:, 0] = 1.0
        lam[:, w1] = lam[:, w2] = (1 + e) / 2
        lam[:, w3] = e
        return lam

    def probs(t):
        e = np.exp(-2 * c * _col(t))
        p = np.zeros((e.size, 4))
        p[:, 0] = (1 + e) / 2
        p[:, w1] = p[:, w2] = (1 - e) / 4
        return p

    return Scenario("pauli-tanh", 2, c, rates, lambdas, probs, cumulative,
                    labels={f"sigma_{k}": v for k, v in PAULI_TO_WEYL.items()})


def semigroup(name: str, d: int, rates: np.ndarray, c: float = 1.0) -> Scenario:
    """Constant nonnegative-or-not rates; eigenvalues from the conjugation phases."""
    rates = np.asarray(rates, dtype=float)
    H = build_basis(d).hadamard
    mu = (H[:, 1:] - 1.0) @ rates  # eigenvalues of L on each U_a
    mu = mu.real if np.abs(mu.imag).max() < 1e-12 else mu

    def lam(t):
        return np.exp(np.outer(_col(t), mu)).astype(complex)

    def probs(t):
        p = lam(t) @ H.T / (d * d)
        return p.real

    def r(t):
        return np.tile(rates, (_col(t).size, 1))

    def cumulative(t):
        return np.outer(_col(t), rates)

    return Scenario(name, d, c, r, lam, probs, cumulative)


def pauli_tanh_mixture(c: float) -> Mixture:
    """Equal mixture of ``c[s_k rho s_k - rho]`` semigroups, ``k = 1, 2``.

    The rate ``c`` (not ``c/2``) is the one whose mixture has ``lambda_3 = e^{-2ct}``.
    """
    c = _check_c(c)
    parts = []
    for k in (1, 2):
        g = np.zeros(3)
        g[PAULI_TO_WEYL[k] - 1] = c
        parts.append(semigroup(f"pauli-semigroup-{k}", 2, g, c))
    return Mixture(tuple(parts), (0.5, 0.5))


QUTRIT_PAIRS = ((1, 2), (3, 6), (5, 7))
QUTRIT_NEGATIVE = (4, 8)


def qutrit_e3(c: float) -> Scenario:
    c = _check_c(c)
    six = [a for a in range(1, 9) if a not in QUTRIT_NEGATIVE]

    def rates(t):
        x = np.exp(-3 * c * _col(t))
        g = np.full((x.size, 8), c / 3)
        neg = -(2 * c / 3) * (1 - x) / (1 + 2 * x)
        for a in QUTRIT_NEGATIVE:
            g[:, a - 1] = neg
        return g

    def cumulative(t):
        t = _col(t)
        x = np.exp(-3 * c * t)
        G = np.outer(t, np.full(8, c / 3))
        neg = -2 * c * t / 3 - np.log((1 + 2 * x) / 3) / 3
        for a in QUTRIT_NEGATIVE:
            G[:, a - 1] = neg
        return G

    def lambdas(t):
        x = np.exp(-3 * c * _col(t))
        lam = np.empty((x.size, 9), dtype=complex)
        lam[:, 0] = 1.0
        lam[:, six] = ((1 + 2 * x) / 3)[:, None]
        for a in QUTRIT_NEGATIVE:
            lam[:, a] = x
        return lam

    def probs(t):
        x = np.exp(-3 * c * _col(t))
        p = np.zeros((x.size, 9))
        p[:, 0] = (1 + 2 * x) / 3
        p[:, six] = ((1 - x) / 9)[:, None]
        return p

    return Scenario("qutrit-e3", 3, c, rates, lambdas, probs, cumulative)


def qutrit_e3_mixture(c: float) -> Mixture:
    """Equal mixture of ``c[U_i rho U_i^dag + U_j rho U_j^dag - 2 rho]``."""
    c = _check_c(c)
    parts = []
    for n, (i, j) in enumerate(QUTRIT_PAIRS, start=1):
        g = np.zeros(8)
        g[[i - 1, j - 1]] = c
        parts.append(semigroup(f"qutrit-semigroup-{n}", 3, g, c))
    return Mixture(tuple(parts), (1 / 3, 1 / 3, 1 / 3))


def unitary(d: int) -> Scenario:
    """Trivial evolution: all rates zero, Lambda_t = identity."""
    return semigroup("unitary", d, np.zeros(d * d - 1))


def fixed_sector(d: int, rates) -> list[int]:
    """Indices ``a`` on which a constant-rate semigroup acts trivially."""
    H = build_basis(d).hadamard
    mu = (H[:, 1:] - 1.0) @ np.asarray(rates, dtype=float)
    return np.flatnonzero(np.abs(mu) < 1e-12).tolist()


SCENARIOS = {
    "pauli-tanh": lambda c, d=None: pauli_tanh(c),
    "qutrit-e3": lambda c, d=None: qutrit_e3(c),
    "unitary": lambda c, d=None: unitary(d or 2),
}


def get_scenario(name: str, c: float = 1.0, d: int | None = None) -> Scenario:
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    sc = factory(c, d)
    if d is not None and sc.d != d:
        raise ValueError(f"scenario {name!r} has d={sc.d}, but d={d} was requested")
    return sc
