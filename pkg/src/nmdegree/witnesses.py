"""Independent numerical oracles: Choi positivity, Schmidt-rank-k search,
trace-distance (BLP) and entropy monotonicity, accessible-volume growth."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import DensityMatrix, DiagonalMap
from .rates import Spectrum, mu_from_spectrum, time_derivative
from .weyl import build_basis

CP_TOL = 1e-10
VIOLATION_TOL = 1e-9


def choi(m: DiagonalMap) -> np.ndarray:
    """``sum_ij |i><j| (x) m(|i><j|)`` -- a d^2 x d^2 matrix of trace ``d * sum(a)``."""
    d = m.d
    units = np.zeros((d, d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            units[i, j, i, j] = 1.0
    images = np.einsum("a,akl,ijlm,anm->ijkn", m.coefficients, build_basis(d).operators,
                       units, build_basis(d).operators.conj())
    # rows (i, k), columns (j, n)
    return images.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def cp_check(m: DiagonalMap) -> bool:
    c = choi(m)
    return bool(np.linalg.eigvalsh(0.5 * (c + c.conj().T)).min() >= -CP_TOL)


def coefficient_cp_check(m: DiagonalMap) -> bool:
    return bool(m.coefficients.min() >= -CP_TOL)


def weyl_witness(d: int, alpha: int) -> np.ndarray:
    """Normalized ``|U_a>> = sum_i |i> (x) U_a |i> / sqrt(d)``, the Choi
    eigenvector of every diagonal map for coefficient ``a``."""
    return build_basis(d).operators[alpha].T.reshape(-1) / np.sqrt(d)


@dataclass(frozen=True)
class Violation:
    k: int
    value: float
    vector: np.ndarray = field(repr=False)


def _smallest_eigvecs(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mats = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
    w, v = np.linalg.eigh(mats)
    return w[:, 0], v[:, :, 0]


def k_positivity_falsifier(m: DiagonalMap, k: int, trials: int = 1000, seed=0,
                           max_iter: int = 50, tol: float = 1e-10) -> Violation | None:
    """Search for a Schmidt-rank-<=k vector with negative Choi expectation.

    Each trial alternates exact minimization over one Schmidt factor while the
    other is held fixed (with orthonormal columns, so the quadratic form is a
    plain Hermitian eigenproblem).  A returned :class:`Violation` proves ``m``
    is not k-positive; None proves nothing.  For ``k == d`` the Weyl
    eigenvector of the smallest coefficient is tried first.
    """
    d = m.d
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    C = choi(m).reshape(d, d, d, d)  # [i, a, j, b]
    best: Violation | None = None

    if k == d:
        alpha = int(np.argmin(m.coefficients))
        psi = weyl_witness(d, alpha)
        val = float(np.real(psi.conj() @ C.reshape(d * d, d * d) @ psi))
        if val < -VIOLATION_TOL:
            best = Violation(k, val, psi)

    if trials > 0:
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(trials, d, k)) + 1j * rng.normal(size=(trials, d, k))
        Y = rng.normal(size=(trials, d, k)) + 1j * rng.normal(size=(trials, d, k))
        value = np.full(trials, np.inf)
        active = np.arange(trials)
        for _ in range(max_iter):
            x, y = X[active], Y[active]
            # psi[i, a] = sum_r x[i, r] y[a, r]; with y orthonormal, x -> psi is isometric
            y, _r = np.linalg.qr(y)
            A = np.einsum("tar,iajb,tbs->tirjs", y.conj(), C, y, optimize=True)
            _, vx = _smallest_eigvecs(A.reshape(-1, d * k, d * k))
            x, _r = np.linalg.qr(vx.reshape(-1, d, k))
            B = np.einsum("tir,iajb,tjs->tarbs", x.conj(), C, x, optimize=True)
            w, vy = _smallest_eigvecs(B.reshape(-1, d * k, d * k))
            X[active], Y[active] = x, vy.reshape(-1, d, k)
            moving = np.abs(value[active] - w) >= tol
            value[active] = w
            active = active[moving]
            if active.size == 0:
                break
        t = int(np.argmin(value))
        if value[t] < -VIOLATION_TOL and (best is None or value[t] < best.value):
            psi = (X[t] @ Y[t].T).reshape(-1)
            psi = psi / np.linalg.norm(psi)
            val = float(np.real(psi.conj() @ C.reshape(d * d, d * d) @ psi))
            best = Violation(k, val, psi)
    return best


def schmidt_rank(psi: np.ndarray, d: int, tol: float = 1e-9) -> int:
    s = np.linalg.svd(np.asarray(psi).reshape(d, d), compute_uv=False)
    return int((s > tol * s[0]).sum())


# --- dynamics-based witnesses -------------------------------------------------

def evolve(s: Spectrum, rho) -> np.ndarray:
    """``Lambda_t(x)`` at every grid point, shape ``(T, d, d)``."""
    basis = build_basis(s.d)
    x = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    coeffs = basis.coefficients(x)
    return basis.synthesize(s.values * coeffs)


def trace_norm(x: np.ndarray) -> np.ndarray:
    """Sum of |eigenvalues| of Hermitian matrices (stacks allowed)."""
    x = 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))
    return np.abs(np.linalg.eigvalsh(x)).sum(axis=-1)


def von_neumann_entropy(rho: np.ndarray) -> np.ndarray:
    """Entropy in nats with ``0 log 0 := 0``."""
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    w = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, -w * np.log(np.where(w > 0, w, 1.0)), 0.0)
    return terms.sum(axis=-1)


def trace_distance_series(s: Spectrum, rho1, rho2) -> np.ndarray:
    diff = _entries(rho1) - _entries(rho2)
    return trace_norm(evolve(s, diff))


def entropy_series(s: Spectrum, rho) -> np.ndarray:
    return von_neumann_entropy(evolve(s, rho))


def _entries(rho):
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def blp_derivative(s: Spectrum, rho1, rho2, t: float | None = None):
    """Time derivative of ``||Lambda_t(rho1 - rho2)||_tr``.

    Returns the value at grid time ``t`` or the whole series when ``t`` is None.
    """
    deriv = time_derivative(trace_distance_series(s, rho1, rho2), s.grid)
    return deriv if t is None else float(deriv[s.grid.index_of(t)])


def entropy_derivative(s: Spectrum, rho, t: float | None = None):
    deriv = time_derivative(entropy_series(s, rho), s.grid)
    return deriv if t is None else float(deriv[s.grid.index_of(t)])


def volume_series(s: Spectrum) -> np.ndarray:
    """Accessible-volume proxy ``prod_{a>=1} |lambda_a(t)|`` normalized to V(0) = 1."""
    v = np.prod(np.abs(s.values[:, 1:]), axis=1)
    return v / v[0]


def volume_measure(s: Spectrum) -> tuple[float, np.ndarray]:
    """Total growth of the volume proxy relative to V(0).

    The integral of the positive part of dV/dt is taken over the piecewise
    linear interpolant, i.e. the sum of positive increments.
    """
    v = volume_series(s)
    growth = np.clip(np.diff(v), 0.0, None).sum()
    return float(growth), v


def volume_log_rate(s: Spectrum) -> np.ndarray:
    """``d/dt log V = sum_{a>=1} Re mu_a``."""
    return mu_from_spectrum(s)[:, 1:].real.sum(axis=1)


@dataclass
class WitnessTrace:
    times: np.ndarray
    distances: np.ndarray  # (T, pairs)
    distance_rates: np.ndarray
    entropies: np.ndarray  # (T, states)
    entropy_rates: np.ndarray
    volume: np.ndarray
    volume_growth: float
    violations: list[dict] = field(default_factory=list)

    def columns(self) -> tuple[list[str], np.ndarray]:
        names = ["t"]
        names += [f"distance_{i}" for i in range(self.distances.shape[1])]
        names += [f"distance_rate_{i}" for i in range(self.distances.shape[1])]
        names += [f"entropy_{i}" for i in range(self.entropies.shape[1])]
        names += [f"entropy_rate_{i}" for i in range(self.entropies.shape[1])]
        names.append("volume")
        data = np.column_stack([self.times, self.distances, self.distance_rates,
                                self.entropies, self.entropy_rates, self.volume])
        return names, data

    def summary(self) -> dict:
        kinds = {}
        for v in self.violations:
            kinds[v["kind"]] = kinds.get(v["kind"], 0) + 1
        return {
            "pairs": int(self.distances.shape[1]),
            "states": int(self.entropies.shape[1]),
            "max_distance_rate": float(self.distance_rates.max()) if self.distance_rates.size else 0.0,
            "min_entropy_rate": float(self.entropy_rates.min()) if self.entropy_rates.size else 0.0,
            "volume_growth": self.volume_growth,
            "violation_counts": kinds,
            "violations": self.violations,
        }


def witness_trace(s: Spectrum, pairs: int, seed: int, tol: float = 1e-6) -> WitnessTrace:
    """Trace distances and entropies for seeded random states, plus the volume
    proxy; every sample breaking monotonicity by more than ``tol`` is recorded."""
    from .channels import random_density_matrix

    rng = np.random.default_rng(seed)
    d, t = s.d, s.times
    dist, drate, ent, erate = [], [], [], []
    for _ in range(pairs):
        r1, r2 = random_density_matrix(d, rng), random_density_matrix(d, rng)
        series = trace_distance_series(s, r1, r2)
        dist.append(series)
        drate.append(time_derivative(series, s.grid))
    for _ in range(pairs):
        series = entropy_series(s, random_density_matrix(d, rng))
        ent.append(series)
        erate.append(time_derivative(series, s.grid))
    empty = np.zeros((t.size, 0))
    dist = np.column_stack(dist) if dist else empty
    drate = np.column_stack(drate) if drate else empty
    ent = np.column_stack(ent) if ent else empty
    erate = np.column_stack(erate) if erate else empty
    growth, vol = volume_measure(s)

    violations = []
    for kind, arr, sign in (("blp", drate, 1.0), ("entropy", erate, -1.0)):
        for ti, j in zip(*np.nonzero(sign * arr > tol)):
            violations.append({"kind": kind, "time": float(t[ti]), "index": int(j),
                               "magnitude": float(abs(arr[ti, j]))})
    dv = np.diff(vol)
    for ti in np.flatnonzero(dv > 0):
        violations.append({"kind": "volume", "time": float(t[ti]), "index": 0,
                           "magnitude": float(dv[ti])})
    violations.sort(key=lambda v: (v["time"], v["kind"], v["index"]))
    return WitnessTrace(t, dist, drate, ent, erate, vol, growth, violations)
