"""k-divisibility certificates and the non-Markovianity degree (NMD) bracket.

The central test: write ``Phi = sum_i b_i U_i . U_i^dag - sum_j c_j U_j . U_j^dag``
with ``b, c >= 0`` and ``N = len(c)``.  For ``k N < d``,
``min_i b_i >= k / (d - k N) * sum_j c_j`` certifies that ``Phi`` is k-positive,
and its failure shows ``Phi`` is not (k+1)-positive.  If ``Phi_t`` is
k-positive at every time, the evolution is k-divisible.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import phi_decomposition
from .rates import RateProfile

TOL = 1e-10


def _check_k(k: int):
    if k <= 0:
        raise ValueError(f"k must be a positive integer, got {k}")


def _bc_inequality(b, c, d: int, k: int) -> bool | None:
    """Inequality value at level k, or None when ``k N >= d`` (out of range)."""
    N = len(c)
    if k * N >= d:
        return None
    if not b:
        return False
    return min(b) >= k / (d - k * N) * sum(c) - TOL


def k_positivity_certificate(b, c, d: int, k: int) -> bool:
    """True certifies that the map is k-positive."""
    _check_k(k)
    if k > d:
        return False
    return bool(_bc_inequality(b, c, d, k))


def not_positive_level(b, c, d: int) -> int | None:
    """Smallest ``k + 1`` such that the inequality fails at an in-range ``k``.

    A result ``j`` means the map is provably not j-positive; None means the
    inequality never fails where it applies.
    """
    for k in range(1, d + 1):
        ok = _bc_inequality(b, c, d, k)
        if ok is None:
            return None
        if not ok:
            return k + 1
    return None


def certified_level(gamma, d: int) -> int:
    """Largest k in ``1..d`` with a certificate for Phi_t (0 if none)."""
    split = phi_decomposition(gamma)
    best = 0
    for k in range(1, d + 1):
        if k_positivity_certificate(split.b, split.c, d, k):
            best = k
        else:
            break
    return best


def p_divisibility_condition(gamma, d: int) -> bool:
    """Every d-element subset of rates has a nonnegative sum."""
    gamma = np.sort(np.asarray(gamma, dtype=float))
    return bool(gamma[:d].sum() >= -TOL)


def two_divisibility_condition(gamma) -> bool:
    """``gamma_i + 2 gamma_j >= 0`` for all ordered pairs ``i != j`` (qutrits)."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.size != 8:
        raise ValueError("the pairwise 2-divisibility condition is defined for d = 3 only")
    worst = min(gamma[i] + 2 * gamma[j] for i, j in itertools.permutations(range(8), 2))
    return bool(worst >= -TOL)


def qubit_cp_map_condition(lam) -> bool:
    """``lambda_1 + lambda_2 <= 1 + lambda_3`` and cyclic permutations.

    ``lam`` holds the three nontrivial qubit eigenvalues (the cyclic set of
    inequalities is symmetric in the labels, so Pauli or Weyl order both work).
    """
    lam = np.asarray(lam)
    if lam.shape != (3,):
        raise ValueError("the qubit CP condition needs exactly three eigenvalues (d = 2)")
    if np.abs(lam.imag).max() > 1e-9:
        raise ValueError("qubit eigenvalues must be real")
    l1, l2, l3 = lam.real
    return bool(
        l1 + l2 <= 1 + l3 + TOL and l2 + l3 <= 1 + l1 + TOL and l3 + l1 <= 1 + l2 + TOL
    )


def geometric_condition(gamma) -> bool:
    """``sum_k gamma_k >= 0``: the accessible-state volume cannot grow."""
    return bool(np.sum(gamma) >= -TOL)


@dataclass(frozen=True)
class DivisibilityCertificate:
    time: float
    cp_divisible: bool
    k_certified: int
    k_upper: int
    p_condition: bool
    geometric_condition: bool
    two_div_condition: bool | None = None
    triple_condition: bool | None = None


@dataclass(frozen=True)
class NmdBracket:
    """Divisibility bounds ``lower <= k <= upper`` and ``NMD = d - k``."""

    d: int
    lower: int
    upper: int
    first_violation: dict = field(default_factory=dict)

    @property
    def nmd(self) -> tuple[int, int]:
        return self.d - self.upper, self.d - self.lower


def certify(t: float, gamma, d: int) -> DivisibilityCertificate:
    gamma = np.asarray(gamma, dtype=float)
    split = phi_decomposition(gamma)
    cp = bool(gamma.min() >= -TOL)
    k_cert = certified_level(gamma, d)
    if cp:
        upper = d
    else:
        # a negative rate rules out CP-divisibility outright
        upper = d - 1
        fail = not_positive_level(split.b, split.c, d)
        if fail is not None:
            upper = min(upper, fail - 1)
    p_ok = p_divisibility_condition(gamma, d)
    if d == 2 and not p_ok:
        # for qubits the pairwise sums are also necessary for P-divisibility
        upper = 0
    return DivisibilityCertificate(
        time=float(t),
        cp_divisible=cp,
        k_certified=d if cp else k_cert,
        k_upper=upper,
        p_condition=p_ok,
        geometric_condition=geometric_condition(gamma),
        two_div_condition=two_divisibility_condition(gamma) if d == 3 else None,
        triple_condition=p_ok if d == 3 else None,
    )


@dataclass(frozen=True)
class DivisibilityReport:
    d: int
    certificates: list[DivisibilityCertificate]
    bracket: NmdBracket

    @property
    def p_divisible_certified(self) -> bool:
        return self.bracket.lower >= 1

    @property
    def cp_divisible(self) -> bool:
        return all(c.cp_divisible for c in self.certificates)

    def summary(self) -> str:
        lo, hi = self.bracket.lower, self.bracket.upper
        d = self.d
        if lo == d:
            return "CP-divisible (Markovian)"
        if hi == 0:
            return "not P-divisible (essentially non-Markovian)"
        parts = []
        if lo >= 1:
            parts.append("P-divisible" if lo == 1 else f"{lo}-divisible")
        else:
            parts.append("P-divisibility not certified")
        if hi < d:
            parts.append("not CP-divisible" if hi == d - 1 else f"not {hi + 1}-divisible")
        return ", ".join(parts)

    def conjecture_region(self) -> list[float]:
        """Qutrit times where the triple condition fails but P-divisibility is
        still open (no proof of essential non-Markovianity)."""
        if self.d != 3:
            return []
        return [c.time for c in self.certificates if c.triple_condition is False]

    def to_dict(self) -> dict:
        lo, hi = self.bracket.nmd
        return {
            "d": self.d,
            "summary": self.summary(),
            "bracket": {
                "divisibility_lower": self.bracket.lower,
                "divisibility_upper": self.bracket.upper,
                "nmd_lower": lo,
                "nmd_upper": hi,
            },
            "first_violation": self.bracket.first_violation,
            "conjecture_region": _span(self.conjecture_region()),
            "certificates": [asdict(c) for c in self.certificates],
        }


def _span(times: list[float]) -> dict | None:
    if not times:
        return None
    return {"start": times[0], "end": times[-1], "count": len(times)}


_FLAGS = (
    ("cp_divisible", "cp_divisible"),
    ("p_condition", "p_condition"),
    ("geometric_condition", "geometric_condition"),
    ("two_div_condition", "two_div_condition"),
    ("triple_condition", "triple_condition"),
)


def classify(r: RateProfile) -> DivisibilityReport:
    d = r.d
    certs = [certify(t, g, d) for t, g in zip(r.times.tolist(), r.values)]
    lower = min(c.k_certified for c in certs)
    upper = min(c.k_upper for c in certs)
    first = {}
    for key, attr in _FLAGS:
        bad = [c.time for c in certs if getattr(c, attr) is False]
        if bad:
            first[key] = bad[0]
    return DivisibilityReport(d, certs, NmdBracket(d, lower, upper, first))
