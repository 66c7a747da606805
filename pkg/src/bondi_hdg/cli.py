"""Command-line front end: ``run``, ``converge`` and ``check``.

Exit codes: 0 success, 1 numerical failure or failed audit, 2 configuration error.
Settings come from built-in defaults, then an optional JSON file (``--config``),
then command-line flags, with later sources taking precedence.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import kernels
from .audit import audit_energy, audit_state
from .convergence import run_convergence
from .errors import ConfigurationError, InvariantViolation, NumericalBlowup
from .field import project
from .mesh import build_uniform
from .output import CONVERGENCE_FIELDS, write_csv, write_gnuplot, write_snapshot, write_timeseries
from .reconstruction import reconstruct
from .scenarios import SCENARIOS, get_scenario
from .tables import Discretization
from .timestepping import TimeConfig, integrate

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunConfig:
    scenario: str = "example1"
    N: int = 160
    k: int = 2
    q_vol: int | None = None
    q_rec: int | None = None
    dt: float | None = None
    cfl: float = 0.5
    T: float | None = None
    snapshots: tuple | None = None
    out: str = "."
    c: float = 1.0
    points_per_element: int = 20
    gnuplot: bool = False
    backend: str | None = None

    def __post_init__(self):
        if self.k is None or int(self.k) < 0:
            raise ConfigurationError(f"k must be >= 0, got {self.k}")
        if self.N is None or int(self.N) < 1:
            raise ConfigurationError(f"N must be >= 1, got {self.N}")
        if self.points_per_element < 1:
            raise ConfigurationError("points_per_element must be >= 1")
        self.N, self.k = int(self.N), int(self.k)

    def scenario_obj(self):
        params = {"c": self.c} if self.scenario == "constant" else {}
        return get_scenario(self.scenario, **params)

    def time_config(self, sc) -> TimeConfig:
        T = float(self.T) if self.T is not None else sc.default_T
        if self.snapshots is None:
            snaps = tuple(s for s in sc.default_snapshots if s <= T)
        else:
            snaps = tuple(float(s) for s in self.snapshots)
        return TimeConfig(T, dt=self.dt, cfl=self.cfl, snapshot_times=snaps)

    def discretization(self, sc) -> Discretization:
        return Discretization(build_uniform(sc.b, self.N), self.k, self.q_vol, self.q_rec)


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {out}: {exc}") from None
    if not out.is_dir():
        raise ConfigurationError(f"output path {out} is not a directory")
    probe = out / ".write_probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigurationError(f"output directory {out} is not writable: {exc}") from None
    return out


def _select_backend(name):
    if name is not None:
        try:
            kernels.set_backend(name)
        except (ValueError, RuntimeError) as exc:
            raise ConfigurationError(str(exc)) from None


def cmd_run(cfg: RunConfig, verbose: bool = True) -> int:
    """Evolve one scenario and write snapshot and time-series CSV files."""
    _select_backend(cfg.backend)
    sc = cfg.scenario_obj()
    tcfg = cfg.time_config(sc)
    disc = cfg.discretization(sc)
    out = _out_dir(cfg.out)
    written = []

    def save(t, u, traces, state, record):
        written.append(write_snapshot(out, t, state, cfg.points_per_element))

    u0 = project(sc.u0, disc.mesh, cfg.k)
    run = integrate(u0, tcfg, sc.U_b, observers=(save,), disc=disc)
    written.append(write_timeseries(out, run.records))
    if cfg.gnuplot:
        write_gnuplot(out, [p for p in written if p.name.startswith("snap_")])
    if verbose:
        last = run.records[-1]
        print(f"{sc.name}: N={cfg.N} k={cfg.k} dt={run.dt:.6g} steps={run.steps} "
              f"g0={last.g0:.6g} M={last.bondi_mass:.6g} "
              f"energy_residual={run.energy_budget_residual:.3g}")
        for p in written:
            print(f"  wrote {p}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, corrupt=None, energy_tol: float = 1e-6, verbose: bool = True) -> int:
    """Run a scenario auditing every discrete invariant at every time level.

    ``corrupt(step, state)`` may modify the reconstructed state before it is
    audited; it exists so tests can verify that violations are caught.
    """
    _select_backend(cfg.backend)
    sc = cfg.scenario_obj()
    tcfg = cfg.time_config(sc)
    disc = cfg.discretization(sc)
    u0 = project(sc.u0, disc.mesh, cfg.k)

    def hook(step, t, u, record):
        traces, state = reconstruct(u, record.U_b, disc)
        if corrupt is not None:
            corrupt(step, state)
        audit_state(state, traces, step=step)
        audit_energy(record, step=step, tol=energy_tol)

    try:
        run = integrate(u0, tcfg, sc.U_b, disc=disc, step_hook=hook)
    except InvariantViolation as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if verbose:
        print(f"PASS {sc.name}: {run.steps} steps audited, "
              f"max energy residual {run.energy_budget_residual:.3g}")
    return EXIT_OK


def cmd_converge(scenario="example1", degrees=(1, 2, 3), meshes=(40, 80, 160, 320), T=0.5,
                 dt=None, N_ref=None, k_ref=None, cfl=0.5, q_vol=None, q_rec=None, out=".",
                 jobs=1, scenario_params=None, verbose=True):
    """Run a convergence study and write ``convergence_k<k>.csv`` per degree."""
    out = _out_dir(out)
    study = run_convergence(scenario, degrees, meshes, T, dt, N_ref, k_ref, cfl, q_vol, q_rec,
                            jobs, scenario_params)
    for k, tab in study.tables.items():
        write_csv(out / f"convergence_k{k}.csv", CONVERGENCE_FIELDS, (r.as_row() for r in tab.rows))
    (out / "convergence_meta.json").write_text(json.dumps(study.metadata(), indent=2) + "\n")
    if verbose:
        note = "" if dt is None or study.dt == dt else f" (requested {dt}, capped by CFL)"
        print(f"reference N_ref={study.N_ref} k_ref={study.k_ref}, dt={study.dt:.6g}{note}")
        for k, tab in study.tables.items():
            print(f"k={k}")
            print(f"  {'N':>6} {'E_u':>11} {'rate_u':>7} {'E_g':>11} {'rate_g':>7}")
            for r in tab.rows:
                ru = "" if r.rate_u is None else f"{r.rate_u:7.3f}"
                rg = "" if r.rate_g is None else f"{r.rate_g:7.3f}"
                print(f"  {r.N:6d} {r.E_u:11.4e} {ru:>7} {r.E_g:11.4e} {rg:>7}")
    return study


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bondi-hdg",
        description="HDG evolution of the spherically symmetric Einstein-scalar system "
                    "in Bondi coordinates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with default settings (flags override it)")
        p.add_argument("--scenario", choices=sorted(SCENARIOS),
                       help="preset initial/boundary data (default: example1)")
        p.add_argument("--k", type=int, help="polynomial degree (default: 2)")
        p.add_argument("--dt", type=float, help="time step; overrides --cfl when given")
        p.add_argument("--cfl", type=float, help="CFL number in (0, 1] (default: 0.5)")
        p.add_argument("--T", type=float, help="final time (default: scenario default, "
                       "0.5 for converge)")
        p.add_argument("--qvol", type=int, dest="q_vol", help="volume quadrature points (default: k+3)")
        p.add_argument("--qrec", type=int, dest="q_rec",
                       help="reconstruction quadrature points (default: 2k+3)")
        p.add_argument("--out", help="output directory (default: current directory)")
        p.add_argument("--c", type=float, help="value for the constant scenario (default: 1)")
        p.add_argument("--backend", choices=("compiled", "numpy"),
                       help="RHS kernel (default: compiled when built)")

    for name, help_text in (("run", "evolve a scenario and write CSV output"),
                            ("check", "evolve while auditing every discrete invariant")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--N", type=int, help="number of elements (default: 160)")
        p.add_argument("--snapshots", help="comma-separated snapshot times "
                       "(default: scenario default)")
        if name == "run":
            p.add_argument("--points-per-element", type=int, dest="points_per_element",
                           help="plot samples per element in snapshot files (default: 20)")
            p.add_argument("--gnuplot", action="store_true", default=None,
                           help="also write a gnuplot script stub plot.gp")

    p = sub.add_parser("converge", help="spatial convergence study against a fine reference")
    common(p)
    p.add_argument("--N", "--meshes", dest="meshes",
                   help="comma-separated study meshes (default: 40,80,160,320)")
    p.add_argument("--degrees", help="comma-separated degrees (default: 1,2,3)")
    p.add_argument("--Nref", type=int, dest="N_ref", help="reference mesh (default: 4x finest)")
    p.add_argument("--kref", type=int, dest="k_ref", help="reference degree (default: max k + 2)")
    p.add_argument("--jobs", type=int, help="parallel worker processes (default: 1)")
    return parser


def _merged(args) -> dict:
    settings = {}
    if getattr(args, "config", None):
        try:
            settings.update(json.loads(Path(args.config).read_text()))
        except (OSError, ValueError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(settings, dict):
            raise ConfigurationError("config file must hold a JSON object")
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            settings[key] = value
    return settings


def _run_config(settings) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    unknown = set(settings) - names
    if unknown:
        raise ConfigurationError(f"unknown setting(s): {', '.join(sorted(unknown))}")
    if settings.get("snapshots") is not None:
        settings["snapshots"] = _float_list(settings["snapshots"])
    return RunConfig(**settings)


def _converge(settings) -> int:
    allowed = {"scenario", "degrees", "meshes", "T", "dt", "N_ref", "k_ref", "cfl", "q_vol",
               "q_rec", "out", "jobs", "c", "backend"}
    unknown = set(settings) - allowed
    if unknown:
        raise ConfigurationError(f"unknown setting(s): {', '.join(sorted(unknown))}")
    _select_backend(settings.pop("backend", None))
    scenario = settings.pop("scenario", "example1")
    c = settings.pop("c", None)
    params = {"c": c} if scenario == "constant" and c is not None else None
    if "degrees" in settings:
        settings["degrees"] = _int_list(settings["degrees"])
    if "meshes" in settings:
        settings["meshes"] = _int_list(settings["meshes"])
    cmd_converge(scenario=scenario, scenario_params=params, **settings)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _merged(args)
        if args.command == "converge":
            return _converge(settings)
        cfg = _run_config(settings)
        if args.command == "run":
            return cmd_run(cfg)
        return cmd_check(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalBlowup as exc:
        where = "" if exc.element is None else f" in element {exc.element}"
        print(f"numerical failure at t={exc.time!r}{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
