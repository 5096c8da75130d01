"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from nmdegree.channels import DiagonalMap, phi_map, random_density_matrix
from nmdegree.cli import main
from nmdegree.divisibility import certified_level, classify
from nmdegree.rates import (
    ProbabilityProfile,
    RateProfile,
    TimeGrid,
    lambdas_from_probs,
    probs_from_lambdas,
    probs_from_rates,
    rates_from_spectrum,
    spectrum_from_rates,
)
from nmdegree.scenarios import PAULI_TO_WEYL, pauli_tanh, pauli_tanh_mixture, qutrit_e3, qutrit_e3_mixture
from nmdegree.weyl import build_basis
from nmdegree.witnesses import (
    blp_derivative,
    coefficient_cp_check,
    cp_check,
    entropy_derivative,
    k_positivity_falsifier,
    volume_measure,
)


def report(n: int, title: str, ok: bool, detail: str):
    line = f"AC{n:02d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_ac01_weyl_hadamard_algebra():
    from test_weyl import QUTRIT_REFERENCE

    start = time.perf_counter()
    worst_sq = worst_herm = worst_gram = 0.0
    for d in (2, 3, 4, 5):
        build_basis.cache_clear()
        B = build_basis(d)
        H, U = B.hadamard, B.operators
        worst_herm = max(worst_herm, np.abs(H - H.conj().T).max())
        worst_sq = max(worst_sq, np.abs(H @ H - d * d * np.eye(d * d)).max())
        gram = np.einsum("aij,bij->ab", U, U.conj())
        worst_gram = max(worst_gram, np.abs(gram - d * np.eye(d * d)).max())
    U3 = build_basis(3).operators
    reference_err = max(np.abs(U3[a] - np.array(m)).max() for a, m in QUTRIT_REFERENCE.items())
    reference_err = max(reference_err, np.abs(U3[0] - np.eye(3)).max())
    elapsed = time.perf_counter() - start
    ok = worst_herm <= 1e-10 and worst_sq <= 1e-10 and worst_gram <= 1e-10 and reference_err <= 1e-15 and elapsed < 5
    report(1, "Weyl/Hadamard algebra", ok,
           f"|H^2-d^2 I|={worst_sq:.2e}, |H-H^dag|={worst_herm:.2e}, gram={worst_gram:.2e}, "
           f"qutrit reference={reference_err:.1e}, {elapsed:.2f}s")


def test_ac02_transform_roundtrips():
    rng = np.random.default_rng(2)
    worst = 0.0
    for d in (2, 3, 4):
        for _ in range(100):
            p = rng.dirichlet(np.full(d * d, rng.uniform(0.1, 3)), size=6)
            p[0] = np.eye(1, d * d)[0]
            prof = ProbabilityProfile(d, TimeGrid(np.linspace(0, 1, 6)), p)
            back = probs_from_lambdas(lambdas_from_probs(prof))
            worst = max(worst, np.abs(back.values - prof.values).max())
    report(2, "p -> lambda -> p round trip", worst <= 1e-12, f"max error {worst:.2e} (tol 1e-12)")


def test_ac03_qubit_tanh_reproduction():
    c = 1.0
    sc = pauli_tanh(c)
    grid = TimeGrid.uniform(5, 500)
    t = grid.points
    rates = sc.rate_profile(grid)
    spec = spectrum_from_rates(rates, method="hermite")
    p = probs_from_lambdas(spec).values
    s1, s2, s3 = (PAULI_TO_WEYL[k] for k in (1, 2, 3))
    p3_err = np.abs(p[:, s3]).max()
    form = (1 - np.exp(-2 * c * t)) / 4
    p12_err = max(np.abs(p[:, s1] - form).max(), np.abs(p[:, s2] - form).max())
    lam = spec.values.real
    eq_err = np.abs(lam[:, s1] + lam[:, s2] - 1 - lam[:, s3]).max()
    ok = p3_err <= 1e-8 and p12_err <= 1e-6 and eq_err <= 1e-8
    report(3, "Qubit tanh reproduction", ok,
           f"|p_3|={p3_err:.2e} (1e-8), p_1,2 err={p12_err:.2e} (1e-6), lambda-123 equality={eq_err:.2e} (1e-8)")


def test_ac04_qutrit_reproduction():
    c = 1.0
    sc = qutrit_e3(c)
    grid = TimeGrid(np.arange(0, 5 + 5e-4, 1e-3))
    t = grid.points
    spec = sc.spectrum(grid)
    gamma = rates_from_spectrum(spec).values
    closed = -(2 * c / 3) * (np.exp(2 * c * t) - np.exp(-c * t)) / (np.exp(2 * c * t) + 2 * np.exp(-c * t))
    g_err = max(np.abs(gamma[:, 3] - closed).max(), np.abs(gamma[:, 7] - closed).max())
    # probabilities through the full pipeline from the stated rates
    p = probs_from_rates(sc.rate_profile(grid), method="hermite").values
    zero_err = np.abs(p[:, [4, 8]]).max()
    six = [1, 2, 3, 5, 6, 7]
    six_err = np.abs(p[:, six] - ((1 - np.exp(-3 * c * t)) / 9)[:, None]).max()
    ok = g_err <= 1e-6 and zero_err <= 1e-8 and six_err <= 1e-6
    report(4, "Qutrit reproduction", ok,
           f"gamma_4,8 err={g_err:.2e} (1e-6), |p_4,8|={zero_err:.2e} (1e-8), six p err={six_err:.2e} (1e-6)")


def test_ac05_mixture_identities():
    c = 1.0
    times = np.linspace(0, 5, 50)
    e2 = np.abs(pauli_tanh_mixture(c).process_matrices(times) - pauli_tanh(c).process_matrices(times)).max()
    e3 = np.abs(qutrit_e3_mixture(c).process_matrices(times) - qutrit_e3(c).process_matrices(times)).max()
    report(5, "Mixture identities", max(e2, e3) <= 1e-10, f"qubit {e2:.2e}, qutrit {e3:.2e} (tol 1e-10)")


def test_ac06_qubit_tanh_classification():
    rep = classify(pauli_tanh(1.0).rate_profile(TimeGrid.uniform(5, 500)))
    certs = rep.certificates
    p_all = all(cert.p_condition for cert in certs)
    not_cp = all(not cert.cp_divisible for cert in certs if cert.time > 0)
    nmd = rep.bracket.nmd
    ok = p_all and not_cp and nmd == (1, 1) and rep.summary() == "P-divisible, not CP-divisible"
    report(6, "Qubit tanh classification", ok, f"{rep.summary()}, NMD bracket {list(nmd)}")


def test_ac07_threshold_detection():
    c = 1.0
    grid = TimeGrid.uniform(2, 400)
    rep = classify(qutrit_e3(c).rate_profile(grid))
    flags = np.array([cert.triple_condition for cert in rep.certificates])
    t_star = math.log(2) / (3 * c)
    step = grid.points[1] - grid.points[0]
    switch = int(np.argmin(flags))
    t_switch = grid.points[switch]
    single = flags[:switch].all() and not flags[switch:].any()
    ok = bool(single and abs(t_switch - t_star) <= step)
    report(7, "Triple-condition threshold", ok,
           f"switch at t={t_switch:.5f}, ln2/3c={t_star:.5f}, step={step:.5f}")


def test_ac08_cp_oracle_agreement():
    rng = np.random.default_rng(8)
    disagreements = total = 0
    for d in (2, 3):
        for _ in range(200):
            a = rng.dirichlet(np.ones(d * d))
            n_neg = rng.integers(0, 3)
            a[rng.choice(d * d, n_neg, replace=False)] -= rng.uniform(1e-4, 0.2, n_neg)
            m = DiagonalMap(d, a, "phi")
            disagreements += cp_check(m) != coefficient_cp_check(m)
            total += 1
    report(8, "CP oracle agreement", disagreements == 0, f"{disagreements} disagreements in {total} maps")


def _random_rates(rng, d):
    g = rng.uniform(0.1, 1.0, d * d - 1)
    n_neg = rng.integers(0, d)
    idx = rng.choice(d * d - 1, n_neg, replace=False)
    g[idx] = -rng.uniform(0, 0.5, n_neg) * g.min()
    return g


def test_ac09_certificate_soundness():
    rng = np.random.default_rng(9)
    falsified = checks = 0
    missed = negatives = 0
    for d in (2, 3):
        for i in range(200):
            gamma = _random_rates(rng, d)
            phi = phi_map(gamma)
            for k in range(1, certified_level(gamma, d) + 1):
                checks += 1
                if k_positivity_falsifier(phi, k, trials=1000, seed=[d, i, k]) is not None:
                    falsified += 1
            a = phi.coefficients
            if a.min() < -1e-6:
                negatives += 1
                v = k_positivity_falsifier(phi, d, trials=0)
                missed += v is None
    ok = falsified == 0 and missed == 0 and checks > 0 and negatives > 0
    report(9, "Certificate soundness", ok,
           f"{falsified}/{checks} certified levels falsified; {missed}/{negatives} negative maps missed at k=d")


def test_ac10_blp_and_entropy_monotonicity():
    spec = pauli_tanh(1.0).spectrum(TimeGrid.uniform(5, 500))
    rng = np.random.default_rng(42)
    worst_blp = -np.inf
    for _ in range(100):
        r1, r2 = random_density_matrix(2, rng), random_density_matrix(2, rng)
        worst_blp = max(worst_blp, blp_derivative(spec, r1, r2).max())
    worst_ent = np.inf
    for _ in range(100):
        worst_ent = min(worst_ent, entropy_derivative(spec, random_density_matrix(2, rng)).min())
    ok = worst_blp <= 1e-6 and worst_ent >= -1e-6
    report(10, "BLP and entropy monotonicity", ok,
           f"max d/dt distance={worst_blp:.2e} (<=1e-6), min d/dt entropy={worst_ent:.2e} (>=-1e-6)")


def test_ac11_geometric_measure():
    grid = TimeGrid.uniform(5, 500)
    values = {
        "pauli-tanh": volume_measure(pauli_tanh(1.0).spectrum(grid))[0],
        "qutrit-e3": volume_measure(qutrit_e3(1.0).spectrum(grid))[0],
    }
    rng = np.random.default_rng(11)
    worst_random = 0.0
    for i in range(20):
        d = 2 + i % 2
        freq = rng.uniform(0.5, 3, d * d - 1)
        vals = np.abs(rng.normal(size=d * d - 1)) * (1 + np.sin(np.outer(grid.points, freq)))
        spec = spectrum_from_rates(RateProfile(d, grid, vals), "hermite")
        worst_random = max(worst_random, volume_measure(spec)[0])
    g = 0.2 + np.cos(grid.points)
    constructed = volume_measure(spectrum_from_rates(RateProfile(2, grid, np.column_stack([g, g, g])), "hermite"))[0]
    ok = max(values.values()) <= 1e-8 and worst_random <= 1e-8 and constructed > 1e-4
    report(11, "Geometric measure", ok,
           f"scenarios {values['pauli-tanh']:.1e}/{values['qutrit-e3']:.1e}, random nonnegative max "
           f"{worst_random:.1e} (<=1e-8), constructed {constructed:.3e} (>1e-4)")


def test_ac12_determinism(tmp_path):
    same = []
    for cmd, name in (("classify", "report.json"), ("witness", "witness.json")):
        blobs = []
        for run in ("first", "second"):
            out = tmp_path / cmd / run
            rc = main([cmd, "--scenario", "pauli-tanh", "--c", "1", "--t-max", "5", "--steps", "500",
                       "--pairs", "100", "--trials", "100", "--seed", "42", "--out", str(out)])
            assert rc == 0
            blobs.append((out / name).read_bytes())
        json.loads(blobs[0])
        same.append(blobs[0] == blobs[1])
    report(12, "Determinism", all(same), f"classify identical={same[0]}, witness identical={same[1]}")
