"""Scenario runner: every verifier is callable by name with an optional
config file and writes a JSON report plus a CSV residual table.

Config files use INI syntax with two optional sections::

    [params]
    mass = 6.0
    points = 64

    [tolerances]
    l2_t = 1e-9

``[params]`` keys must be keyword arguments of the scenario's verifier
that take a number, boolean or string. ``[tolerances]`` keys name checks
of the scenario's report and override their tolerance. Anything else is
rejected.
"""

from __future__ import annotations

import argparse
import configparser
import inspect
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import fockfield, genmech, identities, relqm, tensorcore, xprop
from .report import SCHEMA_VERSION, ResidualReport

SCALAR_TYPES = (bool, int, float, str)


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    name: str
    runner: Callable[..., ResidualReport]
    anchor: str
    covers: tuple[str, ...]
    runtime: float

    @property
    def module(self) -> str:
        return self.runner.__module__.rsplit(".", 1)[-1]

    def parameters(self) -> dict[str, Any]:
        """Configurable keyword arguments and their defaults."""
        params = {}
        for name, p in inspect.signature(self.runner).parameters.items():
            if p.default is not inspect.Parameter.empty and isinstance(p.default, SCALAR_TYPES):
                params[name] = p.default
        return params


def _scenarios() -> dict[str, Scenario]:
    s = [
        Scenario("lattice-core", tensorcore.core_suite, "Dirac matrices and lattice calculus",
                 ("tensorcore.build_gamma_basis", "tensorcore.spectral_derivative", "tensorcore.indefinite_inner"), 0.1),
        Scenario("dual-axis-dirac", relqm.dual_axis_suite, "Dirac evolution along t and along x^1 agree",
                 ("relqm.evolve", "tensorcore.indefinite_inner"), 1.0),
        Scenario("kg-fidelity", relqm.kg_fidelity_suite, "two-component Klein-Gordon form along x^1",
                 ("relqm.kg_to_two_component", "relqm.two_component_to_kg", "relqm.apply_H", "relqm.evolve"), 1.0),
        Scenario("kg-metric", relqm.metric_resolution_suite, "pseudo-Hermiticity metric of the x^1 generator",
                 ("relqm.evolve", "tensorcore.indefinite_inner"), 1.0),
        Scenario("ehrenfest", relqm.ehrenfest_suite, "Ehrenfest relation along any axis",
                 ("relqm.ehrenfest_residual", "relqm.evolve"), 10.0),
        Scenario("uncertainty", relqm.uncertainty_suite, "uncertainty relation between x_mu and H_mu",
                 ("relqm.uncertainty_product", "relqm.evolve"), 3.0),
        Scenario("spectrum-shift", relqm.spectrum_shift_suite, "spectrum shift under a phase factor",
                 ("relqm.spectrum_shift_demo",), 0.2),
        Scenario("momentum-identity", relqm.momentum_identity_suite, "momentum operator acting on a product",
                 ("relqm.momentum_substitution_identity",), 0.2),
        Scenario("worldline", genmech.worldline_suite, "free particle worldline from the x^1 Hamiltonian",
                 ("genmech.legendre", "genmech.hamilton_step"), 1.0),
        Scenario("h1-conservation", genmech.conservation_suite, "H_1 is constant along its own flow",
                 ("genmech.hamilton_step",), 2.0),
        Scenario("poisson-bracket", genmech.bracket_suite, "evolution along x^1 by Poisson brackets",
                 ("genmech.poisson_bracket", "genmech.hamilton_step"), 1.0),
        Scenario("euler-lagrange", genmech.euler_lagrange_suite, "Euler-Lagrange equations along x^1",
                 ("genmech.euler_lagrange_residual", "genmech.legendre"), 1.0),
        Scenario("hmu-positivity", fockfield.hmu_positivity_suite, "Bose-field generator H_mu is positive",
                 ("fockfield.build_H_mu_kg", "fockfield.build_kg_field"), 2.0),
        Scenario("commutators", fockfield.commutator_suite, "equal-surface commutators and anticommutators",
                 ("fockfield.commutator_equal_surface", "fockfield.build_kg_field", "fockfield.build_dirac_field"), 10.0),
        Scenario("heisenberg", fockfield.heisenberg_suite, "Heisenberg equations generated by H_mu",
                 ("fockfield.heisenberg_residual_kg", "fockfield.build_H_mu_dirac", "fockfield.c_number_contrast",
                  "fockfield.build_dirac_field"), 6.0),
        Scenario("propagator-equivalence", xprop.propagator_equivalence_suite,
                 "x^1-ordered photon propagator equals the Feynman propagator",
                 ("xprop.propagator_equivalence_suite", "xprop.x1_ordered_two_point", "xprop.t_ordered_two_point",
                  "xprop.closed_form_feynman"), 20.0),
        Scenario("propagator-structure", xprop.tensor_structure_suite, "ordering symmetry and Feynman-gauge tensor structure",
                 ("xprop.x1_ordered_two_point", "xprop.t_ordered_two_point", "xprop.closed_form_feynman"), 2.0),
        Scenario("angular-momentum", identities.angular_momentum_suite, "free Dirac commutators and angular momentum conservation",
                 ("identities.angular_momentum_suite",), 30.0),
        Scenario("moment-tensor", identities.moment_tensor_suite, "electromagnetic moment of point charges",
                 ("identities.moment_tensor_identity",), 0.1),
        Scenario("noether-charges", identities.noether_suite, "generalized conserved quantities G_l",
                 ("identities.noether_charge",), 0.5),
    ]
    return {sc.name: sc for sc in s}


SCENARIOS = _scenarios()


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    out: Path | None = None
    seed: int | None = None
    tol_scale: float = 1.0


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}") from None


def _convert(name: str, raw: str, default: Any) -> Any:
    try:
        if isinstance(default, bool):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError(raw)
            return val
        return raw.strip()
    except ValueError:
        raise ConfigError(f"params.{name}: cannot read {raw!r} as {type(default).__name__}") from None


_POSITIVE = {"points", "steps", "extent", "levels", "pairs", "trials", "nmax"}
_NON_NEGATIVE = {"mass", "step", "velocity"}


def _validate(name: str, value: Any) -> None:
    if name in _POSITIVE and not value > 0:
        raise ConfigError(f"params.{name}: must be positive, got {value}")
    if name in _NON_NEGATIVE and value < 0:
        raise ConfigError(f"params.{name}: must be non-negative, got {value}")


def load_config(scenario: str, path: str | os.PathLike | None = None, text: str | None = None) -> ScenarioConfig:
    """Parse and validate a config for ``scenario``."""
    sc = get_scenario(scenario)
    cfg = ScenarioConfig(scenario)
    if path is None and text is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__", inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        if text is not None:
            parser.read_string(text)
        else:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    extra = set(parser.sections()) - {"params", "tolerances"}
    if extra:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(extra))}")
    allowed = sc.parameters()
    if parser.has_section("params"):
        for key, raw in parser.items("params"):
            if key not in allowed:
                raise ConfigError(f"params.{key}: unknown parameter for {scenario}; allowed: {', '.join(sorted(allowed))}")
            value = _convert(key, raw, allowed[key])
            _validate(key, value)
            cfg.params[key] = value
    if parser.has_section("tolerances"):
        for key, raw in parser.items("tolerances"):
            try:
                tol = float(raw)
            except ValueError:
                raise ConfigError(f"tolerances.{key}: not a number: {raw!r}") from None
            if not tol >= 0:
                raise ConfigError(f"tolerances.{key}: must be non-negative")
            cfg.tolerances[key] = tol
    return cfg


def run(config: ScenarioConfig) -> ResidualReport:
    """Run one scenario and apply tolerance overrides and scaling."""
    sc = get_scenario(config.scenario)
    kwargs = dict(config.params)
    if config.seed is not None and "seed" in sc.parameters():
        kwargs["seed"] = config.seed
    start = time.perf_counter()
    try:
        report = sc.runner(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{config.scenario}: parameters rejected by the verifier: {exc}") from exc
    wall = time.perf_counter() - start
    names = {c.name for c in report.checks}
    unknown = sorted(set(config.tolerances) - names)
    if unknown:
        raise ConfigError(f"tolerances: unknown checks {', '.join(unknown)} for {config.scenario}")
    for c in report.checks:
        if c.name in config.tolerances:
            c.tolerance = config.tolerances[c.name]
    if config.tol_scale != 1.0:
        report.scale_tolerances(config.tol_scale)
    report.scenario = config.scenario
    report.metadata.update(
        {
            "anchor": sc.anchor,
            "module": sc.module,
            "params": kwargs,
            "seed": config.seed,
            "tol_scale": config.tol_scale,
            "tolerance_overrides": config.tolerances,
            "wall_time": wall,
        }
    )
    return report


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_report(report: ResidualReport, out: Path) -> tuple[Path, Path]:
    js = out / f"{report.scenario}.json"
    cs = out / f"{report.scenario}.csv"
    _atomic_write(js, report.to_json() + "\n")
    _atomic_write(cs, report.to_csv())
    return js, cs


def list_scenarios() -> list[tuple[str, str, float]]:
    return [(sc.name, sc.anchor, sc.runtime) for sc in SCENARIOS.values()]


def merge_reports(directory: str | os.PathLike) -> tuple[list[ResidualReport], str]:
    """Load every JSON report in ``directory`` and build a merged CSV."""
    reports = []
    for path in sorted(Path(directory).glob("*.json")):
        if path.name == "merged.json":
            continue
        reports.append(ResidualReport.from_json(path.read_text(encoding="utf-8")))
    lines = ["scenario,check,value,tolerance,pass"]
    for rep in reports:
        for c in rep.checks:
            lines.append(f"{rep.scenario},{c.name},{c.value!r},{c.tolerance!r},{str(c.passed).lower()}")
    return reports, "\n".join(lines) + "\n"


def _run_one(args: tuple[str, str | None, str | None, int | None, float]) -> tuple[str, bool | None, str]:
    name, config, out, seed, tol_scale = args
    cfg = load_config(name, config)
    cfg.seed, cfg.tol_scale = seed, tol_scale
    report = run(cfg)
    lines = [f"{name}: {'PASS' if report.passed is not False else 'FAIL'}"] + ["  " + ln for ln in report.summary_lines()]
    if out:
        write_report(report, Path(out))
    return name, report.passed, "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genham", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one or more scenarios ('all' runs every scenario)")
    p_run.add_argument("scenario", nargs="+")
    p_run.add_argument("--config", help="INI file with [params] and [tolerances]")
    p_run.add_argument("--out", help="directory for the JSON report and CSV table")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--tol-scale", type=float, default=1.0)
    p_run.add_argument("--jobs", type=int, default=1, help="run independent scenarios concurrently")
    sub.add_parser("list", help="list scenarios")
    p_merge = sub.add_parser("report-merge", help="merge the JSON reports in a directory")
    p_merge.add_argument("directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        width = max(len(n) for n in SCENARIOS)
        for name, anchor, runtime in list_scenarios():
            print(f"{name:<{width}}  ~{runtime:>5.1f}s  {anchor}")
        return 0
    if args.command == "report-merge":
        reports, merged = merge_reports(args.directory)
        if not reports:
            print(f"no reports in {args.directory}", file=sys.stderr)
            return 2
        out = Path(args.directory)
        _atomic_write(out / "merged.csv", merged)
        summary = {
            "schema_version": SCHEMA_VERSION,
            "passed": all(r.passed is not False for r in reports),
            "scenarios": {r.scenario: r.passed for r in reports},
        }
        _atomic_write(out / "merged.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        for r in reports:
            print(f"{r.scenario}: {'PASS' if r.passed is not False else 'FAIL'}")
        return 0 if summary["passed"] else 1
    names = sorted(SCENARIOS) if args.scenario == ["all"] else args.scenario
    try:
        for n in names:
            load_config(n, args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    jobs = [(n, args.config, args.out, args.seed, args.tol_scale) for n in names]
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_run_one, jobs))
        else:
            results = [_run_one(j) for j in jobs]
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for _, _, text in results:
        print(text)
    return 0 if all(passed is not False for _, passed, _ in results) else 1
