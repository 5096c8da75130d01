"""Weyl (generalized Pauli) operators on C^d and the associated character matrix.

Operators follow ``U_{mn} = sum_j w^{m j} |j><j+n|`` with ``w = exp(2 pi i / d)``
and flat index ``alpha = m*d + n``.  For ``d = 3`` this reproduces the usual
table ``U_1 = shift``, ``U_3 = diag(1, w, w^2)``, ``U_4 = U_3 U_1`` and so on.

Algebra in this convention::

    U_a U_b   = w^(n_a m_b) U_{a+b}
    U_a^dag   = w^(m_a n_a) U_{-a}
    U_r U_a U_r^dag = w^(n_r m_a - m_r n_a) U_a

The character matrix ``hadamard[a, b] = w^(m_a n_b - n_a m_b)`` is the
conjugation phase of ``U_b`` acting on ``U_a``; a random unitary channel with
weights ``p`` therefore has eigenvalues ``hadamard @ p`` on the Weyl basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch

PHASE_ATOL = 1e-12


@dataclass(frozen=True)
class WeylIndex:
    m: int
    n: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if not (0 <= self.m < self.d and 0 <= self.n < self.d):
            raise ValueError(f"index ({self.m}, {self.n}) out of range for d={self.d}")

    @property
    def flat(self) -> int:
        return self.m * self.d + self.n

    @classmethod
    def from_flat(cls, alpha: int, d: int) -> "WeylIndex":
        if not 0 <= alpha < d * d:
            raise ValueError(f"flat index {alpha} out of range for d={d}")
        return cls(alpha // d, alpha % d, d)

    @classmethod
    def wrap(cls, m: int, n: int, d: int) -> "WeylIndex":
        return cls(m % d, n % d, d)


def _as_index(a, d: int | None = None) -> WeylIndex:
    if isinstance(a, WeylIndex):
        return a
    if d is None:
        raise TypeError("a dimension is required to interpret a flat index")
    return WeylIndex.from_flat(int(a), d)


def _root(d: int, power: int) -> complex:
    power %= d
    if power == 0:
        return 1.0 + 0.0j
    return complex(np.exp(2j * np.pi * power / d))


@dataclass(frozen=True, eq=False)
class WeylBasis:
    """The d^2 Weyl operators and the d^2 x d^2 character (Hadamard) matrix."""

    d: int
    operators: np.ndarray
    hadamard: np.ndarray
    omega: complex

    @property
    def size(self) -> int:
        return self.d * self.d

    def index(self, alpha: int) -> WeylIndex:
        return WeylIndex.from_flat(alpha, self.d)

    def __getitem__(self, alpha: int) -> np.ndarray:
        return self.operators[alpha]

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Expansion ``x = sum_a c_a U_a`` with ``c_a = Tr[U_a^dag x] / d``."""
        return np.einsum("aij,...ij->...a", self.operators.conj(), x) / self.d

    def synthesize(self, c: np.ndarray) -> np.ndarray:
        return np.einsum("...a,aij->...ij", c, self.operators)


@lru_cache(maxsize=None)
def build_basis(d: int) -> WeylBasis:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    omega = complex(np.exp(2j * np.pi / d))
    j = np.arange(d)
    ops = np.zeros((d * d, d, d), dtype=complex)
    for m in range(d):
        for n in range(d):
            # exact roots of unity avoid drift in high powers of omega
            ops[m * d + n, j, (j + n) % d] = [_root(d, m * jj) for jj in j]
    ops.flags.writeable = False

    mm, nn = np.divmod(np.arange(d * d), d)
    expo = (np.outer(mm, nn) - np.outer(nn, mm)) % d
    roots = np.array([_root(d, k) for k in range(d)])
    had = roots[expo]
    had.flags.writeable = False
    return WeylBasis(d=d, operators=ops, hadamard=had, omega=omega)


def _check_dims(*idx: WeylIndex) -> int:
    dims = {i.d for i in idx}
    if len(dims) != 1:
        raise DimensionMismatch(f"indices live in different dimensions: {sorted(dims)}")
    return dims.pop()


def compose(a: WeylIndex, b: WeylIndex) -> tuple[complex, WeylIndex]:
    """Return ``(phase, c)`` with ``U_a U_b = phase * U_c``."""
    d = _check_dims(a, b)
    return _root(d, a.n * b.m), WeylIndex.wrap(a.m + b.m, a.n + b.n, d)


def adjoint(a: WeylIndex) -> tuple[complex, WeylIndex]:
    """Return ``(phase, c)`` with ``U_a^dag = phase * U_c``."""
    return _root(a.d, a.m * a.n), WeylIndex.wrap(-a.m, -a.n, a.d)


def conjugation_phase(r: WeylIndex, a: WeylIndex) -> complex:
    """Phase ``phi`` with ``U_r U_a U_r^dag = phi * U_a``."""
    d = _check_dims(r, a)
    return _root(d, r.n * a.m - r.m * a.n)
