"""Command line front end: ``nmdegree classify|witness|export``.

Exit codes: 0 success, 2 input error, 3 numeric/model error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as nio
from .channels import DiagonalMap, phi_map
from .divisibility import classify, certified_level
from .errors import NmdError
from .rates import ProbabilityProfile, RateProfile, Spectrum, TimeGrid, probs_from_lambdas, spectrum_from_rates
from .scenarios import SCENARIOS, get_scenario
from .witnesses import k_positivity_falsifier, volume_series, witness_trace

log = logging.getLogger("nmdegree")

EXIT_OK, EXIT_INPUT, EXIT_MODEL = 0, 2, 3
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    d: int | None = None
    scenario: str | None = None
    c: float = 1.0
    rates: Path | None = None
    t_max: float = 5.0
    steps: int = 500
    grid: str = "uniform"
    pairs: int = 100
    trials: int = 200
    seed: int | None = 42
    out: Path = Path(".")
    formats: tuple[str, ...] = FORMATS
    at: tuple[float, ...] = ()

    def validate(self, randomized: bool = False):
        if (self.scenario is None) == (self.rates is None):
            raise nio.InputError("give exactly one of --scenario or --rates")
        if not self.t_max > 0:
            raise nio.InputError(f"--t-max must be positive, got {self.t_max}")
        if self.steps < 2:
            raise nio.InputError(f"--steps must be at least 2, got {self.steps}")
        if self.grid not in ("uniform", "log"):
            raise nio.InputError(f"--grid must be uniform or log, got {self.grid!r}")
        bad = set(self.formats) - set(FORMATS)
        if bad or not self.formats:
            raise nio.InputError(f"--format accepts csv,json; got {','.join(self.formats)}")
        if randomized and self.seed is None:
            raise nio.InputError("randomized witnesses need --seed")
        if self.pairs < 0 or self.trials < 0:
            raise nio.InputError("--pairs and --trials must be nonnegative")


@dataclass(frozen=True)
class Model:
    rates: RateProfile
    spectrum: Spectrum
    probs: ProbabilityProfile
    source: dict


def make_grid(cfg: RunConfig) -> TimeGrid:
    if cfg.grid == "log":
        return TimeGrid.log(cfg.t_max, cfg.steps)
    return TimeGrid.uniform(cfg.t_max, cfg.steps)


def load_model(cfg: RunConfig) -> Model:
    """Scenarios use their exact evaluators; rate tables go through the
    rates -> cumulative -> spectrum -> probabilities pipeline."""
    if cfg.scenario is not None:
        try:
            sc = get_scenario(cfg.scenario, cfg.c, cfg.d)
        except ValueError as exc:
            raise nio.InputError(str(exc)) from exc
        grid = make_grid(cfg)
        source = {"scenario": sc.name, "c": sc.c, "d": sc.d}
        return Model(sc.rate_profile(grid), sc.spectrum(grid), sc.probability_profile(grid), source)
    rates = nio.read_rate_table(cfg.rates, cfg.d)
    with np.errstate(over="raise", invalid="raise"):
        try:
            spec = spectrum_from_rates(rates, method="hermite")
        except (FloatingPointError, ValueError) as exc:
            raise NmdError(f"rate table does not produce a finite spectrum: {exc}") from exc
    probs = probs_from_lambdas(spec)
    return Model(rates, spec, probs, {"rates": str(cfg.rates), "d": rates.d})


def profiles_table(m: Model, volume: bool = False):
    names, cols = ["t"], [m.rates.times]
    for prof in (m.rates, m.spectrum, m.probs):
        n, c = nio.profile_columns(prof)
        names += n
        cols += c
    if volume:
        names.append("volume")
        cols.append(volume_series(m.spectrum))
    return names, cols


def _prepare(cfg: RunConfig, randomized: bool = False) -> Model:
    cfg.validate(randomized)
    cfg.out.mkdir(parents=True, exist_ok=True)
    return load_model(cfg)


def cmd_classify(cfg: RunConfig) -> int:
    m = _prepare(cfg)
    report = classify(m.rates)
    doc = report.to_dict()
    doc["source"] = m.source
    doc["legitimate"] = m.probs.legitimate
    doc["min_probability"] = float(m.probs.values.min())
    if "json" in cfg.formats:
        (cfg.out / "report.json").write_text(nio.dumps(doc))
    if "csv" in cfg.formats:
        nio.write_table(cfg.out / "profiles.csv", *profiles_table(m))
    log.info("%s: %s (NMD in [%d, %d])", m.source, doc["summary"],
             doc["bracket"]["nmd_lower"], doc["bracket"]["nmd_upper"])
    print(doc["summary"])
    return EXIT_OK


def falsifier_findings(rates: RateProfile, trials: int, seed: int, samples: int = 5) -> list[dict]:
    """Schmidt-rank searches on Phi_t at a few times where some rate is negative."""
    d = rates.d
    neg = np.flatnonzero(rates.values.min(axis=1) < 0)
    if neg.size == 0 or trials == 0:
        return []
    picks = np.unique(neg[np.linspace(0, neg.size - 1, min(samples, neg.size)).astype(int)])
    found = []
    for n, i in enumerate(picks):
        gamma = rates.values[i]
        phi = phi_map(gamma)
        entry = {"time": float(rates.times[i]), "k_certified": certified_level(gamma, d),
                 "not_k_positive": None, "value": None}
        for k in range(1, d + 1):
            v = k_positivity_falsifier(phi, k, trials=trials, seed=[seed, n, k])
            if v is not None:
                entry["not_k_positive"] = k
                entry["value"] = v.value
                break
        found.append(entry)
    return found


def cmd_witness(cfg: RunConfig) -> int:
    m = _prepare(cfg, randomized=True)
    if np.abs(m.spectrum.values).min() < 1e-12:
        raise NmdError("spectrum has a singular point on the grid")
    trace = witness_trace(m.spectrum, cfg.pairs, cfg.seed)
    doc = {"source": m.source, "seed": cfg.seed, **trace.summary(),
           "falsifier": falsifier_findings(m.rates, cfg.trials, cfg.seed)}
    if "json" in cfg.formats:
        (cfg.out / "witness.json").write_text(nio.dumps(doc))
    if "csv" in cfg.formats:
        names, data = trace.columns()
        nio.write_table(cfg.out / "witness.csv", names, list(data.T))
    print(f"{len(trace.violations)} violation(s) recorded")
    return EXIT_OK


def cmd_export(cfg: RunConfig) -> int:
    m = _prepare(cfg)
    times = m.rates.times
    picks = sorted({int(np.argmin(np.abs(times - t))) for t in (cfg.at or (0.0, times[-1]))})
    rows = []
    for i in picks:
        pm = DiagonalMap(m.probs.d, m.probs.values[i]).process_matrix()
        for (r, c), z in np.ndenumerate(pm):
            rows.append((times[i], r, c, z.real, z.imag))
    try:
        if "csv" in cfg.formats:
            nio.write_table(cfg.out / "series.csv", *profiles_table(m, volume=True))
            cols = [np.array(col) for col in zip(*rows)]
            nio.write_table(cfg.out / "process.csv", ["t", "row", "col", "re", "im"], cols)
        if "json" in cfg.formats:
            doc = {"source": m.source,
                   "rates": nio.profile_to_dict(m.rates),
                   "spectrum": nio.profile_to_dict(m.spectrum),
                   "probabilities": nio.profile_to_dict(m.probs),
                   "volume": volume_series(m.spectrum).tolist(),
                   "process_matrices": [
                       {"t": float(times[i]),
                        "re": DiagonalMap(m.probs.d, m.probs.values[i]).process_matrix().real.tolist(),
                        "im": DiagonalMap(m.probs.d, m.probs.values[i]).process_matrix().imag.tolist()}
                       for i in picks]}
            (cfg.out / "export.json").write_text(nio.dumps(doc))
    except OSError as exc:
        raise nio.InputError(f"cannot write output: {exc}") from exc
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "witness": cmd_witness, "export": cmd_export}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmdegree", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--scenario", choices=sorted(SCENARIOS))
        src.add_argument("--rates", type=Path, help="CSV with header t,gamma_1,...")
        p.add_argument("--c", type=float, default=1.0, help="scenario rate constant")
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--t-max", type=float, default=5.0)
        p.add_argument("--steps", type=int, default=500, help="number of grid points")
        p.add_argument("--grid", choices=("uniform", "log"), default="uniform")
        p.add_argument("--pairs", type=int, default=100)
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--format", default="csv,json")
        p.add_argument("--at", type=float, nargs="*", default=(),
                       help="times for process-matrix export (nearest grid point)")
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        d=args.d, scenario=args.scenario, c=args.c, rates=args.rates,
        t_max=args.t_max, steps=args.steps, grid=args.grid, pairs=args.pairs,
        trials=args.trials, seed=args.seed, out=args.out,
        formats=tuple(f.strip() for f in args.format.split(",") if f.strip()),
        at=tuple(args.at),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](config_from_args(args))
    except nio.InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NmdError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
