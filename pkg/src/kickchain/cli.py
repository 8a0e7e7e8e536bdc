"""Command-line front end.

Subcommands: ``simulate`` runs one trajectory and writes its observable
CSVs, ``experiment`` runs a named preset sweep, ``schedule`` exports the
bath alone, ``husimi`` dumps quasiprobability grids for chosen spins and
periods.  Every run writes a manifest.json with the fully resolved
configuration, seeds, sha256 checksums of the emitted files, wall-clock
duration, and the package version, so results are auditable and
replayable.

Configuration precedence: built-in defaults < --config YAML file <
explicit flags < --set key=value overrides.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import shutil
import sys
import time
from dataclasses import asdict, fields, replace
from pathlib import Path

import yaml

from . import __version__
from .bath import (BathSpec, generate_schedule, read_schedule_csv,
                   write_schedule_csv)
from .chain import ChainConfig
from .experiments import (ExperimentSpec, list_presets, make_preset,
                          run_experiment)
from .observables import (ObservableRecord, husimi, reduce, write_chain_csv,
                          write_husimi_csv, write_spins_csv)
from .propagator import iter_trajectory

CHAIN_DEFAULTS = {
    "n_spins": 4,
    "coupling": "heisenberg",
    "j_over_w0": 1.0,
    "w1_over_w0": 1.0,
    "kick_theta": math.pi / 4.0,
    "kick_offset_pi4": False,
    "initial_states": None,
}

BATH_DEFAULTS = {
    "kind": "drift",
    "lambda_star": 2.0,
    "phi_star": 1.0,
    "d0": 0.0,
    "d0_lambda_only": False,
    "drift_a": math.sqrt(2.0),
    "drift_b": math.sqrt(3.0),
    "sigma": 0.1,
    "seed": 0,
}

RUN_DEFAULTS = {
    "periods": 200,
    "outdir": None,
    "jobs": None,
    "force": False,
    "schedule_file": None,
    "grid_spins": "1",
    "grid_periods": None,
    "theta_res": 200,
    "phi_res": 200,
}

# (args attribute, config section, config field)
FLAG_MAP = [
    ("spins", "chain", "n_spins"),
    ("coupling", "chain", "coupling"),
    ("j_over_w0", "chain", "j_over_w0"),
    ("w1_over_w0", "chain", "w1_over_w0"),
    ("kick_theta", "chain", "kick_theta"),
    ("kick_offset_pi4", "chain", "kick_offset_pi4"),
    ("bath", "bath", "kind"),
    ("d0", "bath", "d0"),
    ("d0_lambda_only", "bath", "d0_lambda_only"),
    ("sigma", "bath", "sigma"),
    ("drift_a", "bath", "drift_a"),
    ("drift_b", "bath", "drift_b"),
    ("lambda_star", "bath", "lambda_star"),
    ("phi_star", "bath", "phi_star"),
    ("seed", "bath", "seed"),
    ("periods", "run", "periods"),
    ("outdir", "run", "outdir"),
    ("jobs", "run", "jobs"),
    ("force", "run", "force"),
    ("schedule_file", "run", "schedule_file"),
    ("grid_spins", "run", "grid_spins"),
    ("grid_periods", "run", "grid_periods"),
    ("theta_res", "run", "theta_res"),
    ("phi_res", "run", "phi_res"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickchain",
        description="Kicked spin-chain simulator: torus baths, stroboscopic "
                    "evolution, disorder observables.")
    parser.add_argument("--version", action="version",
                        version=f"kickchain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="YAML config file with chain/bath/run sections")
        p.add_argument("--spins", type=int, help="number of spins in the chain")
        p.add_argument("--coupling",
                       choices=["heisenberg", "ising_z", "ising_x", "none"])
        p.add_argument("--j-over-w0", type=float)
        p.add_argument("--w1-over-w0", type=float)
        p.add_argument("--kick-theta", type=float,
                       help="kick direction angle in radians")
        p.add_argument("--kick-offset-pi4", action="store_true", default=None,
                       help="use direction angle pi/4 - kick_theta")
        p.add_argument("--bath",
                       choices=["stationary", "drift", "microcanonical",
                                "markovian"])
        p.add_argument("--d0", type=float, help="initial dispersion box side")
        p.add_argument("--d0-lambda-only", action="store_true", default=None,
                       help="disperse only the kick strength")
        p.add_argument("--sigma", type=float,
                       help="Brownian step variance (markovian bath)")
        p.add_argument("--drift-a", type=float)
        p.add_argument("--drift-b", type=float)
        p.add_argument("--lambda-star", type=float)
        p.add_argument("--phi-star", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--periods", type=int, help="number of kick periods K")
        p.add_argument("--outdir", help="output directory "
                       "(falls back to $KICKCHAIN_OUTDIR, then ./runs)")
        p.add_argument("--jobs", type=int,
                       help="parallel worker count (default: all cores)")
        p.add_argument("--force", action="store_true", default=None,
                       help="overwrite existing outputs")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config field, e.g. chain.j_over_w0=0.5")

    p_sim = sub.add_parser("simulate", help="run one trajectory")
    add_common(p_sim)
    p_sim.add_argument("--schedule-file",
                       help="replay kicks from a schedule CSV instead of "
                            "generating them (overrides --periods)")
    p_sim.set_defaults(func=cmd_simulate)

    p_exp = sub.add_parser("experiment", help="run a named preset sweep")
    p_exp.add_argument("preset", nargs="?",
                       help="preset name; omit with --list to enumerate")
    p_exp.add_argument("--list", action="store_true", help="list presets")
    add_common(p_exp)
    p_exp.set_defaults(func=cmd_experiment)

    p_sch = sub.add_parser("schedule", help="export a bath schedule CSV")
    add_common(p_sch)
    p_sch.set_defaults(func=cmd_schedule)

    p_hus = sub.add_parser("husimi",
                           help="dump Husimi grids for chosen spins/periods")
    add_common(p_hus)
    p_hus.add_argument("--grid-spins",
                       help="comma-separated spin indices (default 1)")
    p_hus.add_argument("--grid-periods",
                       help="comma-separated periods (default: final period)")
    p_hus.add_argument("--theta-res", type=int)
    p_hus.add_argument("--phi-res", type=int)
    p_hus.set_defaults(func=cmd_husimi)

    return parser


def resolve_config(args) -> dict:
    """Merge defaults, YAML config, flags, and --set into one dict."""
    config = {"chain": dict(CHAIN_DEFAULTS), "bath": dict(BATH_DEFAULTS),
              "run": dict(RUN_DEFAULTS)}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: expected a mapping at top level")
        for section, entries in loaded.items():
            if section not in config:
                raise ValueError(f"unknown config section {section!r}")
            if not isinstance(entries, dict):
                raise ValueError(f"config section {section!r} must be a mapping")
            for key, value in entries.items():
                if key not in config[section]:
                    raise ValueError(f"unknown config field {section}.{key!r}")
                config[section][key] = value
    for attr, section, key in FLAG_MAP:
        value = getattr(args, attr, None)
        if value is not None:
            config[section][key] = value
    for assignment in getattr(args, "set", []):
        _apply_set(config, assignment)
    if config["run"]["outdir"] is None:
        config["run"]["outdir"] = os.environ.get("KICKCHAIN_OUTDIR", "runs")
    return config


def _apply_set(config: dict, assignment: str) -> None:
    key, sep, raw = assignment.partition("=")
    if not sep:
        raise ValueError(f"--set expects KEY=VALUE, got {assignment!r}")
    value = yaml.safe_load(raw)
    parts = key.split(".")
    if len(parts) == 2:
        section, name = parts
    elif len(parts) == 1:
        name = parts[0]
        matches = [s for s in config if name in config[s]]
        if len(matches) != 1:
            raise ValueError(f"ambiguous or unknown config field {name!r}")
        section = matches[0]
    else:
        raise ValueError(f"config key {key!r} has too many dots")
    if section not in config or name not in config[section]:
        raise ValueError(f"unknown config field {key!r}")
    config[section][name] = value


def _as_complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(x[0], x[1])
    raise ValueError(f"cannot read {x!r} as a complex amplitude")


def build_chain(cfg: dict) -> ChainConfig:
    cfg = dict(cfg)
    states = cfg.pop("initial_states")
    if states is not None:
        states = tuple((_as_complex(a), _as_complex(b)) for a, b in states)
    return ChainConfig(initial_states=states, **cfg)


def build_bath(cfg: dict) -> BathSpec:
    return BathSpec(**cfg)


def _check_collision(paths, force: bool) -> None:
    if force:
        return
    for p in paths:
        if Path(p).exists():
            raise ValueError(f"output {p} exists; pass --force to overwrite")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_manifest(directory: Path, command: str, config, seeds,
                   t_start: float) -> Path:
    """Checksum every file under ``directory`` and write manifest.json."""
    artifacts = {}
    for p in sorted(directory.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            artifacts[str(p.relative_to(directory))] = _sha256(p)
    manifest = {
        "version": __version__,
        "command": command,
        "config": _jsonify(config),
        "seeds": list(seeds),
        "artifacts": artifacts,
        "duration_seconds": time.perf_counter() - t_start,
    }
    path = directory / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _parse_indices(raw: str, what: str) -> list[int]:
    try:
        return [int(part) for part in str(raw).split(",") if part != ""]
    except ValueError as exc:
        raise ValueError(f"cannot parse {what} list {raw!r}") from exc


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    config = resolve_config(args)
    chain = build_chain(config["chain"])
    bath = build_bath(config["bath"])
    run = config["run"]
    outdir = Path(run["outdir"])
    if run["schedule_file"]:
        schedule = read_schedule_csv(run["schedule_file"])
        if schedule.n_spins != chain.n_spins:
            raise ValueError(
                f"schedule file covers {schedule.n_spins} spins, "
                f"chain has {chain.n_spins}")
    else:
        schedule = generate_schedule(bath, chain.n_spins, run["periods"])
    targets = [outdir / name for name in
               ("schedule.csv", "spins.csv", "chain.csv", "manifest.json")]
    _check_collision(targets, run["force"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_schedule_csv(outdir / "schedule.csv", schedule)
    record = ObservableRecord.from_states(
        iter_trajectory(chain, schedule), chain.n_spins)
    write_spins_csv(outdir / "spins.csv", record)
    write_chain_csv(outdir / "chain.csv", record)
    write_manifest(outdir, "simulate", config, [bath.seed], t0)
    print(f"simulate: {schedule.n_periods} periods, {chain.n_spins} spins "
          f"-> {outdir}")
    return 0


def cmd_schedule(args) -> int:
    t0 = time.perf_counter()
    config = resolve_config(args)
    bath = build_bath(config["bath"])
    run = config["run"]
    n_spins = config["chain"]["n_spins"]
    outdir = Path(run["outdir"])
    _check_collision([outdir / "schedule.csv", outdir / "manifest.json"],
                     run["force"])
    schedule = generate_schedule(bath, n_spins, run["periods"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_schedule_csv(outdir / "schedule.csv", schedule)
    write_manifest(outdir, "schedule", config, [bath.seed], t0)
    print(f"schedule: {n_spins} spins x {run['periods']} periods -> {outdir}")
    return 0


def cmd_husimi(args) -> int:
    t0 = time.perf_counter()
    config = resolve_config(args)
    chain = build_chain(config["chain"])
    bath = build_bath(config["bath"])
    run = config["run"]
    outdir = Path(run["outdir"])
    schedule = generate_schedule(bath, chain.n_spins, run["periods"])
    spins = _parse_indices(run["grid_spins"], "spin")
    periods_raw = run["grid_periods"]
    periods = ([schedule.n_periods] if periods_raw is None
               else _parse_indices(periods_raw, "period"))
    for s in spins:
        if not 1 <= s <= chain.n_spins:
            raise ValueError(f"grid spin {s} out of range 1..{chain.n_spins}")
    for k in periods:
        if not 0 <= k <= schedule.n_periods:
            raise ValueError(
                f"grid period {k} out of range 0..{schedule.n_periods}")
    targets = [outdir / f"husimi_spin{s}_period{k}.csv"
               for s in spins for k in periods]
    _check_collision(targets + [outdir / "manifest.json"], run["force"])
    outdir.mkdir(parents=True, exist_ok=True)
    wanted = set(periods)
    for k, psi in iter_trajectory(chain, schedule):
        if k in wanted:
            for s in spins:
                grid = husimi(reduce(psi, s, chain.n_spins),
                              run["theta_res"], run["phi_res"],
                              spin=s, period=k)
                write_husimi_csv(outdir / f"husimi_spin{s}_period{k}.csv",
                                 grid)
        if k >= max(wanted):
            break
    write_manifest(outdir, "husimi", config, [bath.seed], t0)
    print(f"husimi: {len(spins)} spins x {len(periods)} periods -> {outdir}")
    return 0


def _apply_spec_set(spec: ExperimentSpec, assignment: str) -> ExperimentSpec:
    key, sep, raw = assignment.partition("=")
    if not sep:
        raise ValueError(f"--set expects KEY=VALUE, got {assignment!r}")
    value = yaml.safe_load(raw)
    if isinstance(value, list):
        value = tuple(value)
    parts = key.split(".")
    if len(parts) == 2 and parts[0] in ("chain", "bath"):
        target = getattr(spec, parts[0])
        if parts[1] not in {f.name for f in fields(target)}:
            raise ValueError(f"unknown config field {key!r}")
        return replace(spec, **{parts[0]: replace(target, **{parts[1]: value})})
    if len(parts) == 1 and parts[0] in {f.name for f in fields(spec)}:
        return replace(spec, **{parts[0]: value})
    raise ValueError(f"unknown config field {key!r}")


def cmd_experiment(args) -> int:
    t0 = time.perf_counter()
    if args.list:
        for name, summary in list_presets().items():
            print(f"{name}: {summary}")
        return 0
    if not args.preset:
        raise ValueError("experiment needs a preset name (or --list)")
    outdir = args.outdir or os.environ.get("KICKCHAIN_OUTDIR", "runs")
    seed = args.seed if args.seed is not None else 0
    spec = make_preset(args.preset, outdir=outdir, seed=seed)
    if args.periods is not None:
        spec = replace(spec, n_periods=args.periods)
    if args.spins is not None:
        spec = replace(spec, chain=replace(spec.chain, n_spins=args.spins))
    for assignment in args.set:
        spec = _apply_spec_set(spec, assignment)
    preset_dir = Path(spec.outdir) / spec.preset
    if preset_dir.exists():
        if not args.force:
            raise ValueError(
                f"output {preset_dir} exists; pass --force to overwrite")
        shutil.rmtree(preset_dir)
    run_experiment(spec, jobs=args.jobs)
    write_manifest(preset_dir, f"experiment {spec.preset}", asdict(spec),
                   spec.seeds, t0)
    print(f"experiment {spec.preset}: {len(spec.grid_keys())} runs "
          f"-> {preset_dir}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
