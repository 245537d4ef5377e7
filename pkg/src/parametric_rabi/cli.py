"""Command line entry point: ``parametric-rabi <command> --config run.json``.

Commands
--------
spectrum   adiabatic vs exact levels over a parameter sweep
dynamics   time series of two-qubit observables
bell       closest Bell-basis pure state at chosen times
husimi     Q-function of the oscillator on a grid, plus metadata
validate   run the acceptance checks and write a JSON report

All frequencies are in units of omega and all times are omega t.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import acceptance
from . import dynamics as dyn
from . import observables as obs
from . import oracle, qmat
from .model import ModelParams, adiabatic_spectrum

CONFIG_SCHEMA = 1
REPORT_SCHEMA = 1
OBSERVABLES = ("inversion", "entropy", "coherence", "discord", "concurrence", "purity")
SWEEP_AXES = ("delta1", "delta2", "lambda1", "lambda2", "g")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    t_end: float = 1000.0
    samples: int = 1001

    def __post_init__(self):
        if self.samples < 2:
            raise ConfigError("time_grid.samples: must be >= 2")
        if not (self.t_end > self.t_start >= 0):
            raise ConfigError("time_grid: need t_end > t_start >= 0")

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.samples)


@dataclass(frozen=True)
class GridSpec:
    points: int = 201
    half_width: float | None = None
    center: complex | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    initial: dyn.InitialState = field(default_factory=dyn.InitialState)
    time_grid: TimeGrid = field(default_factory=TimeGrid)
    outputs: tuple = OBSERVABLES
    grid: GridSpec = field(default_factory=GridSpec)
    eps_trunc: float = dyn.EPS_TRUNC
    seed: int = 0
    sweep: dict | None = None
    levels: int = 12
    n_fock: int = 160


def _complex(value, name):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return complex(value)
    raise ConfigError(f"{name}: expected a number or [re, im], got {value!r}")


def _section(raw, name, cls, convert=None):
    data = raw.get(name, {})
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name for f in fields(cls)}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"{name}: unknown field(s) {sorted(extra)}")
    if convert:
        data = convert(dict(data))
    try:
        return cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def parse_config(raw: dict) -> RunConfig:
    """Validate a JSON config document; messages name the offending field."""
    if raw.get("schema_version", CONFIG_SCHEMA) != CONFIG_SCHEMA:
        raise ConfigError(f"schema_version: unsupported value {raw.get('schema_version')!r}")
    if "preset" in raw:
        if raw["preset"] not in acceptance.PRESETS:
            raise ConfigError(f"preset: unknown preset {raw['preset']!r}; choose from {sorted(acceptance.PRESETS)}")
        params, init = acceptance.PRESETS[raw["preset"]]
        raw = {"model": asdict(params), "initial": asdict(init), **{k: v for k, v in raw.items() if k != "preset"}}
    allowed = {f.name for f in fields(RunConfig)} | {"schema_version"}
    extra = set(raw) - allowed
    if extra:
        raise ConfigError(f"unknown top-level field(s) {sorted(extra)}")

    def init_conv(d):
        if "alpha" in d:
            d["alpha"] = _complex(d["alpha"], "initial.alpha")
        return d

    def grid_conv(d):
        if d.get("center") is not None:
            d["center"] = _complex(d["center"], "grid.center")
        return d

    model = _section(raw, "model", ModelParams)
    initial = _section(raw, "initial", dyn.InitialState, init_conv)
    if not math.isfinite(abs(initial.alpha)):
        raise ConfigError("initial.alpha: must be finite")
    tgrid = _section(raw, "time_grid", TimeGrid)
    grid = _section(raw, "grid", GridSpec, grid_conv)
    outputs = tuple(raw.get("outputs", OBSERVABLES))
    bad = [o for o in outputs if o not in OBSERVABLES]
    if bad or not outputs:
        raise ConfigError(f"outputs: unknown or empty selection {bad or outputs}; choose from {OBSERVABLES}")
    eps = float(raw.get("eps_trunc", dyn.EPS_TRUNC))
    if not eps > 0:
        raise ConfigError("eps_trunc: must be > 0")
    seed = int(raw.get("seed", 0))
    if seed < 0:
        raise ConfigError("seed: must be a non-negative integer")
    sweep = raw.get("sweep")
    if sweep is not None:
        sweep = _parse_sweep(sweep)
    return RunConfig(model, initial, tgrid, outputs, grid, eps, seed, sweep,
                     int(raw.get("levels", 12)), int(raw.get("n_fock", 160)))


def _parse_sweep(spec) -> dict:
    """``{"axis": "g", "values": [...]}`` or the string ``axis:start:stop:count``."""
    if isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ConfigError("sweep: expected axis:start:stop:count")
        axis, a, b, n = parts
        try:
            values = np.linspace(float(a), float(b), int(n)).tolist()
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}") from exc
        spec = {"axis": axis, "values": values}
    if not isinstance(spec, dict) or spec.get("axis") not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis: choose from {SWEEP_AXES}")
    values = [float(v) for v in spec.get("values", [])]
    if not values:
        raise ConfigError("sweep.values: empty sweep")
    return {"axis": spec["axis"], "values": values}


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(raw)


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_json(path: Path, payload: dict):
    payload = {"schema_version": REPORT_SCHEMA, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _pool_map(fn, items, workers: int):
    """Ordered map; results come back in input order regardless of scheduling."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _state(cfg: RunConfig) -> dyn.EvolutionState:
    return dyn.initial_coefficients(cfg.model, init=cfg.initial, eps_trunc=cfg.eps_trunc)


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(cfg: RunConfig, workers: int = 1):
    if not cfg.sweep:
        raise ConfigError("sweep: the spectrum command needs a sweep (config 'sweep' or --sweep)")
    axis = cfg.sweep["axis"]

    def point(value):
        params = ModelParams(**{**asdict(cfg.model), axis: value})
        exact = oracle.exact_spectrum(oracle.build_full_hamiltonian(params, cfg.n_fock), cfg.levels)
        approx = adiabatic_spectrum(params, math.ceil(cfg.levels / 4) + 4)[: cfg.levels]
        return [(value, k, approx[k], exact[k], abs(approx[k] - exact[k])) for k in range(cfg.levels)]

    rows = [r for block in _pool_map(point, cfg.sweep["values"], workers) for r in block]
    header = [f"{axis} [omega]", "level_index", "E_adiabatic [omega]", "E_exact [omega]", "abs_error [omega]"]
    return header, rows


def _observable_row(rho, outputs):
    out = []
    for name in outputs:
        if name == "inversion":
            out.append(obs.population_inversion(rho))
        elif name == "entropy":
            out.append(qmat.von_neumann_entropy(rho))
        elif name == "coherence":
            out.append(obs.relative_entropy_coherence(rho))
        elif name == "discord":
            out.append(2 * obs.geometric_discord(rho))
        elif name == "concurrence":
            out.append(obs.concurrence(rho))
        elif name == "purity":
            out.append(qmat.purity(rho))
    return out


_COLUMN = {
    "inversion": "inversion",
    "entropy": "S [bits]",
    "coherence": "C_RE [bits]",
    "discord": "2D_G",
    "concurrence": "concurrence",
    "purity": "purity",
}


def cmd_dynamics(cfg: RunConfig, workers: int = 1, chunk: int = 512):
    state = _state(cfg)
    dyn._overlap_blocks(state)  # warm the shared kernel cache before threads read it
    times = cfg.time_grid.times()
    chunks = [times[k : k + chunk] for k in range(0, times.size, chunk)]

    def run(ts):
        rows = []
        for t, rho in zip(ts, dyn.two_qubit_rdm_series(state, ts)):
            vals = np.linalg.eigvalsh(rho)
            if vals.min() < -dyn.POSITIVITY_TOL:
                raise dyn.TruncationError(f"t={t:g}: RDM eigenvalue {vals.min():.3e}; raise the Fock cutoff")
            rows.append([t] + _observable_row(rho, cfg.outputs))
        return rows

    rows = [r for block in _pool_map(run, chunks, workers) for r in block]
    header = ["omega_t"] + [_COLUMN[o] for o in cfg.outputs]
    return header, rows


def cmd_bell(cfg: RunConfig, times, workers: int = 1) -> dict:
    if not times:
        raise ConfigError("times: empty time list")
    state = _state(cfg)
    dyn._overlap_blocks(state)

    def one(t):
        rho = dyn.two_qubit_rdm(dyn.evolve(state, t))
        coeffs, d_min = obs.bell_reconstruct(rho, seed=cfg.seed)
        label, amp = coeffs.dominant()
        return {
            "omega_t": t,
            "concurrence": obs.concurrence(rho),
            "purity": qmat.purity(rho),
            "d_min": d_min,
            "d_min_closed_form": obs.closest_pure_distance(rho),
            "coefficients": dict(zip(obs.BELL_LABELS, coeffs.as_array())),
            "dominant": {"state": label, "magnitude": amp},
            "degenerate": coeffs.degenerate,
        }

    return {"records": _pool_map(one, list(times), workers)}


def cmd_husimi(cfg: RunConfig, t: float):
    state = dyn.evolve(_state(cfg), t)
    rho_o = dyn.oscillator_rdm(state)
    quad = obs.quadrature_variance(rho_o)
    center = quad.a_mean if cfg.grid.center is None else cfg.grid.center
    half = 4 + 2 * abs(quad.a_mean) if cfg.grid.half_width is None else cfg.grid.half_width
    re = np.linspace(center.real - half, center.real + half, cfg.grid.points)
    im = np.linspace(center.imag - half, center.imag + half, cfg.grid.points)
    field_ = obs.husimi_q(rho_o, re, im)
    rows = [(re[j], im[i], field_.q[i, j]) for i in range(im.size) for j in range(re.size)]
    frame_v = obs.frame_quadrature_variance(state)
    meta = {
        "omega_t": t,
        "normalization": field_.normalization,
        "q_max": float(field_.q.max()),
        "peak": field_.peak(),
        "cell": field_.cell,
        "v_min": quad.v_min,
        "v_min_frame_path": frame_v.v_min,
        "squeezed": quad.squeezed,
        "a_mean": quad.a_mean,
        "n_mean": quad.n_mean,
        "entropy_bits": qmat.von_neumann_entropy(rho_o),
    }
    return ["Re_beta", "Im_beta", "Q"], rows, meta


def cmd_validate(tolerances=None, use_oracle: bool = True, seed: int = 0, only=None) -> dict:
    tol = acceptance.load_tolerances(tolerances)
    results = acceptance.run_all(tol, use_oracle=use_oracle, seed=seed, only=only)
    return acceptance.report(results), results


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=None, help="seed for random search starts (default from config, else 0)")
    common.add_argument("--eps-trunc", type=float, default=None)

    p = argparse.ArgumentParser(prog="parametric-rabi", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("spectrum", parents=[common])
    s.add_argument("--sweep", help="axis:start:stop:count, e.g. g:0:0.45:10")
    sub.add_parser("dynamics", parents=[common])
    b = sub.add_parser("bell", parents=[common])
    b.add_argument("--times", type=float, nargs="+", default=None)
    h = sub.add_parser("husimi", parents=[common])
    h.add_argument("--t", type=float, required=True)
    v = sub.add_parser("validate", parents=[common])
    v.add_argument("--tolerances", help="alternative tolerance JSON")
    v.add_argument("--no-oracle", action="store_true", help="skip checks that need the brute-force oracle")
    v.add_argument("--only", nargs="+", choices=sorted(acceptance.CHECKS))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.eps_trunc is not None:
            overrides["eps_trunc"] = args.eps_trunc
        if getattr(args, "sweep", None):
            overrides["sweep"] = _parse_sweep(args.sweep)
        if overrides:
            cfg = RunConfig(**{**{f.name: getattr(cfg, f.name) for f in fields(RunConfig)}, **overrides})

        if args.command == "spectrum":
            header, rows = cmd_spectrum(cfg, args.workers)
            write_csv(out / "spectrum.csv", header, rows)
        elif args.command == "dynamics":
            header, rows = cmd_dynamics(cfg, args.workers)
            write_csv(out / "dynamics.csv", header, rows)
        elif args.command == "bell":
            write_json(out / "bell.json", cmd_bell(cfg, args.times or [], args.workers))
        elif args.command == "husimi":
            header, rows, meta = cmd_husimi(cfg, args.t)
            write_csv(out / "husimi.csv", header, rows)
            write_json(out / "husimi.json", meta)
        elif args.command == "validate":
            rep, results = cmd_validate(args.tolerances, not args.no_oracle, cfg.seed, args.only)
            write_json(out / "validate.json", rep)
            for r in results:
                print(r.line())
            return 0 if rep["passed"] else 1
    except (ConfigError, dyn.TruncationError, obs.GridTooSmallError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
