"""
Run orchestration: configuration files, simulation driver, amplitude sweeps,
checkpoints, and the diagnostics trace.

A run directory contains ``config.txt`` (the flat dotted-key config),
``diagnostics.csv`` (one row per diagnostic sample, fixed column order),
``summary.json``, and binary checkpoints.  Identical config and seed give a
byte-identical diagnostics file.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import flow
from .data import InitialDataParams, dx13_op, make_director_data
from .flow import FlowState, PhysParams
from .norms import NormParams, XNormAccumulator, energy_functional, y_norm
from .spectral import Grid, SpectralField, deriv_x, deriv_y_phys, single_mode, to_physical

CHECKPOINT_MAGIC = b"LCSM"
CHECKPOINT_VERSION = 1

DIAGNOSTIC_COLUMNS = [
    "t", "Y_d13", "Y_hess_d13", "Y_omega",
    "X_d13_sup", "X_d13_grad", "X_d13_dx13", "X_d13_lowfreq",
    "X_hess_sup", "X_hess_grad", "X_hess_dx13", "X_hess_lowfreq",
    "X_omega_sup", "X_omega_grad", "X_omega_dx13", "X_omega_lowfreq",
    "E_t", "sup_grad_n", "max_div_u", "min_abs_n", "remap_loss", "verdict",
]


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class CheckpointError(RuntimeError):
    """Malformed checkpoint file."""


@dataclass
class GridConfig:
    nx: int = 128
    ny: int = 128
    lx: float = 4.0 * np.pi
    ly: float = 4.0 * np.pi
    dealias_pad: int = 2


@dataclass
class PhysConfig:
    A: float = 1000.0
    nu: float = 1.0
    lam: float = 1.0
    gam: float = 1.0


@dataclass
class NormConfig:
    a: float = 0.008
    m: float = 1.0
    eps: float = 0.4
    delta: float = 1.5


@dataclass
class TimeConfig:
    dt: float = 0.05
    t_end: float = 20.0
    diag_every: int = 10
    checkpoint_every: int = 0  # 0: only the final checkpoint


@dataclass
class InitConfig:
    kind: str = "director_family"  # director_family | single_mode | file
    lam: float = 0.3
    N: float = 38.0
    theta: float = 1.0
    profile: str = "gaussian"
    embedding: str = "sphere"
    mode_j: int = 1
    mode_i: int = 0
    amplitude: float = 1.0
    path: str = ""


@dataclass
class RunConfig:
    nonlinear: bool = True
    couple_fluid: bool = True
    seed: int = 0
    remap_threshold: float = 0.0  # 0: automatic; inf disables
    warn_factor: float = 10.0
    blowup_factor: float = 1e3
    max_remap_loss: float = 1e-8
    c_cal: float = 1.0


@dataclass
class SimConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    phys: PhysConfig = field(default_factory=PhysConfig)
    norms: NormConfig = field(default_factory=NormConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    init: InitConfig = field(default_factory=InitConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def validate(self) -> "SimConfig":
        try:
            self.make_grid()
            self.make_phys()
            self.make_norm_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.time.dt <= 0 or self.time.t_end < 0:
            raise ConfigError("time.dt must be positive and time.t_end non-negative")
        if self.time.diag_every < 1:
            raise ConfigError("time.diag_every must be >= 1")
        if self.init.kind not in ("director_family", "single_mode", "file"):
            raise ConfigError(f"unknown init.kind {self.init.kind!r}")
        if self.init.kind == "file" and not self.init.path:
            raise ConfigError("init.kind = file requires init.path")
        return self

    def make_grid(self) -> Grid:
        g = self.grid
        return Grid(g.nx, g.ny, g.lx, g.ly, g.dealias_pad)

    def make_phys(self) -> PhysParams:
        p = self.phys
        return PhysParams(p.A, p.nu, p.lam, p.gam)

    def make_norm_params(self) -> NormParams:
        n = self.norms
        return NormParams(n.a, n.m, n.eps, n.delta,
                          harmonic_mode=not self.run.couple_fluid)


_KEY_ALIASES = {"lambda": "lam", "n": "N"}


def config_to_text(cfg: SimConfig) -> str:
    lines = []
    for section_name in ("grid", "phys", "norms", "time", "init", "run"):
        section = getattr(cfg, section_name)
        for f in dataclasses.fields(section):
            value = getattr(section, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{section_name}.{f.name} = {value}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> SimConfig:
    cfg = SimConfig()
    sections = {name: getattr(cfg, name) for name in
                ("grid", "phys", "norms", "time", "init", "run")}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"line {lineno}: key {key!r} is not dotted")
        section_name, field_name = key.split(".", 1)
        field_name = _KEY_ALIASES.get(field_name, field_name)
        if section_name not in sections:
            raise ConfigError(f"line {lineno}: unknown section {section_name!r}")
        section = sections[section_name]
        names = {f.name: f for f in dataclasses.fields(section)}
        if field_name not in names:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        current = getattr(section, field_name)
        try:
            if isinstance(current, bool):
                if value.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(f"bad boolean {value!r}")
                parsed = value.lower() in ("true", "1")
            elif isinstance(current, int):
                parsed = int(value)
            elif isinstance(current, float):
                parsed = float(value)
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
        setattr(section, field_name, parsed)
    return cfg


def load_config(path) -> SimConfig:
    return config_from_text(Path(path).read_text()).validate()


# -- checkpoints -------------------------------------------------------------


def save_checkpoint(state: FlowState, path) -> None:
    """
    Binary layout: magic 'LCSM', u32 version, u32 nx, u32 ny, f64 t,
    f64 shear_time, then omega, d1, d2, d3 coefficients as interleaved
    (re, im) f64 pairs, row-major over (k-index, xi-index), little-endian.
    """
    grid = state.omega.grid
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<III", CHECKPOINT_VERSION, grid.nx, grid.ny))
        fh.write(struct.pack("<dd", state.t, state.shear_time))
        for f in state.fields():
            fh.write(np.ascontiguousarray(f.coeffs, dtype="<c16").tobytes())


def load_checkpoint(path, grid: Grid | None = None) -> FlowState:
    raw = Path(path).read_bytes()
    if len(raw) < 4 or raw[:4] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: bad magic")
    if len(raw) < 4 + 12 + 16:
        raise CheckpointError(f"{path}: truncated header")
    version, nx, ny = struct.unpack("<III", raw[4:16])
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    t, shear_time = struct.unpack("<dd", raw[16:32])
    need = 32 + 4 * nx * ny * 16
    if len(raw) != need:
        raise CheckpointError(f"{path}: expected {need} bytes, found {len(raw)}")
    if grid is None:
        grid = Grid(nx, ny)
    elif (grid.nx, grid.ny) != (nx, ny):
        raise CheckpointError(f"{path}: grid mismatch ({nx}x{ny} in file)")
    fields = []
    offset = 32
    for _ in range(4):
        block = np.frombuffer(raw, dtype="<c16", count=nx * ny, offset=offset)
        fields.append(SpectralField(grid, block.reshape(nx, ny).astype(np.complex128),
                                    shear_time))
        offset += nx * ny * 16
    return FlowState(fields[0], tuple(fields[1:]), t, shear_time)


# -- initial states ----------------------------------------------------------


def build_initial_state(cfg: SimConfig, grid: Grid) -> FlowState:
    kind = cfg.init.kind
    if kind == "file":
        return load_checkpoint(cfg.init.path, grid)
    state = flow.zero_state(grid)
    if kind == "single_mode":
        state.omega = single_mode(grid, cfg.init.mode_j, cfg.init.mode_i,
                                  cfg.init.amplitude)
        return state
    params = InitialDataParams(cfg.init.lam, cfg.init.N, cfg.init.theta,
                               profile=cfg.init.profile)
    d = make_director_data(params, grid, embedding=cfg.init.embedding)
    return FlowState(state.omega, d, 0.0, 0.0)


# -- diagnostics -------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class Diagnostics:
    """Collects rows and the three space-time accumulators of one run."""

    norm_params: NormParams
    A: float
    rows: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.acc_d13 = XNormAccumulator(self.norm_params, self.A)
        self.acc_hess = XNormAccumulator(self.norm_params, self.A)
        self.acc_omega = XNormAccumulator(self.norm_params, self.A)

    def accumulators(self) -> dict:
        return {"d13": self.acc_d13, "hess_d13": self.acc_hess,
                "omega": self.acc_omega}

    def sample(self, state: FlowState, remap_loss: float, verdict: str) -> dict:
        d13 = [dx13_op(dc) for dc in state.d]
        hess = []
        for f in d13:
            hess.append(deriv_x(deriv_x(f)))
            hess.append(deriv_y_phys(deriv_y_phys(f)))
        self.acc_d13.update(d13, state.t)
        self.acc_hess.update(hess, state.t)
        self.acc_omega.update(state.omega, state.t)
        e_t, _ = energy_functional(self.accumulators(), self.norm_params, self.A)

        u1, u2 = flow.velocity_from_vorticity(state.omega)
        vals = [to_physical(dc).values for dc in state.d]
        n1 = vals[0] + 1.0
        min_abs_n = float(np.min(np.sqrt(n1**2 + vals[1] ** 2 + vals[2] ** 2)))
        row = {
            "t": state.t,
            "Y_d13": y_norm(d13, self.norm_params),
            "Y_hess_d13": y_norm(hess, self.norm_params),
            "Y_omega": y_norm(state.omega, self.norm_params),
        }
        for name, acc in (("d13", self.acc_d13), ("hess", self.acc_hess),
                          ("omega", self.acc_omega)):
            sup, grad, dx13, low = acc.terms()
            row[f"X_{name}_sup"] = sup
            row[f"X_{name}_grad"] = grad
            row[f"X_{name}_dx13"] = dx13
            row[f"X_{name}_lowfreq"] = low
        row["E_t"] = e_t
        row["sup_grad_n"] = flow.grad_n_sup(state)
        row["max_div_u"] = flow.spectral_divergence_rel(u1, u2)
        row["min_abs_n"] = min_abs_n
        row["remap_loss"] = remap_loss
        row["verdict"] = verdict
        self.rows.append(row)
        return row

    def write_csv(self, path) -> None:
        lines = [",".join(DIAGNOSTIC_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(_fmt(row[c]) for c in DIAGNOSTIC_COLUMNS))
        Path(path).write_text("\n".join(lines) + "\n")


# -- the run driver ----------------------------------------------------------


@dataclass
class RunResult:
    outdir: Path
    summary: dict
    diagnostics: Diagnostics


def run_simulation(cfg: SimConfig, outdir) -> RunResult:
    """
    Integrate to t_end or blow-up; write diagnostics.csv, summary.json,
    config.txt and checkpoints into ``outdir``.
    """
    cfg.validate()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.txt").write_text(config_to_text(cfg))

    grid = cfg.make_grid()
    phys = cfg.make_phys()
    norm_params = cfg.make_norm_params()
    state = build_initial_state(cfg, grid)

    remap_threshold = cfg.run.remap_threshold
    if remap_threshold == 0.0:
        remap_threshold = flow.default_remap_threshold(grid)

    initial_grad = flow.grad_n_sup(state)
    hess0 = []
    for dc in state.d:
        f = dx13_op(dc)
        hess0.append(deriv_x(deriv_x(f)))
        hess0.append(deriv_y_phys(deriv_y_phys(f)))
    k_const = cfg.run.c_cal * (y_norm(hess0, norm_params)
                               + y_norm(state.omega, norm_params) + 1.0)

    diag = Diagnostics(norm_params, phys.A)
    verdict = flow.blow_up_monitor(state, initial_grad,
                                   cfg.run.warn_factor, cfg.run.blowup_factor)
    diag.sample(state, 0.0, verdict)

    umax = flow.velocity_sup(state)
    gradn = initial_grad
    total_remap_loss = 0.0
    n_step = 0
    abort_reason = ""
    while state.t < cfg.time.t_end - 1e-12 and verdict != "blown_up":
        bound = flow.cfl_bound(umax, gradn, grid, phys, state.shear_time)
        dt = min(cfg.time.dt, 0.8 * bound, cfg.time.t_end - state.t)
        try:
            state, report = flow.step(
                state, phys, dt,
                nonlinear=cfg.run.nonlinear,
                couple_fluid=cfg.run.couple_fluid,
                remap_threshold=remap_threshold,
            )
        except (flow.CFLViolation, flow.StateCorrupted) as exc:
            verdict = "blown_up"
            abort_reason = str(exc)
            break
        n_step += 1
        umax = max(report.max_u, 1e-12)
        gradn = report.max_grad_n
        total_remap_loss += report.remap_discarded
        if report.blown_up:
            verdict = "blown_up"
        total_energy = sum(f.l2_norm() ** 2 for f in state.fields())
        if total_remap_loss > cfg.run.max_remap_loss * max(total_energy, 1e-300):
            abort_reason = (f"remap discarded {total_remap_loss:.3e} "
                            f"of energy {total_energy:.3e}")
            verdict = "blown_up"
            break
        if verdict != "blown_up" and n_step % cfg.time.diag_every == 0:
            verdict = flow.blow_up_monitor(state, initial_grad,
                                           cfg.run.warn_factor,
                                           cfg.run.blowup_factor)
            diag.sample(state, total_remap_loss, verdict)
        if cfg.time.checkpoint_every and n_step % cfg.time.checkpoint_every == 0:
            save_checkpoint(state, outdir / f"checkpoint_{n_step:08d}.lcsm")

    if not state.has_nan():
        if diag.rows and diag.rows[-1]["t"] < state.t - 1e-12:
            diag.sample(state, total_remap_loss, verdict)
        save_checkpoint(state, outdir / "checkpoint_final.lcsm")
    diag.write_csv(outdir / "diagnostics.csv")

    e_values = [row["E_t"] for row in diag.rows]
    peak_grad = max(row["sup_grad_n"] for row in diag.rows)
    peak_row = max(diag.rows, key=lambda r: r["sup_grad_n"])
    summary = {
        "verdict": verdict,
        "abort_reason": abort_reason,
        "t_final": state.t,
        "steps": n_step,
        "peak_sup_grad_n": peak_grad,
        "t_of_peak": peak_row["t"],
        "final_E": e_values[-1] if e_values else 0.0,
        "max_E": max(e_values) if e_values else 0.0,
        "bootstrap_K": k_const,
        "bootstrap_ok": bool(e_values and max(e_values) <= 2.0 * k_const),
        "total_remap_loss": total_remap_loss,
        "peak_Y_d13": max(row["Y_d13"] for row in diag.rows),
        "peak_Y_omega": max(row["Y_omega"] for row in diag.rows),
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    return RunResult(outdir, summary, diag)


def resume_simulation(checkpoint_path, t_end: float, outdir,
                      config_path=None) -> RunResult:
    """Continue a checkpointed run to a new t_end using its saved config."""
    checkpoint_path = Path(checkpoint_path)
    if config_path is None:
        config_path = checkpoint_path.parent / "config.txt"
    cfg = load_config(config_path)
    cfg.time.t_end = t_end
    cfg.init.kind = "file"
    cfg.init.path = str(checkpoint_path)
    return run_simulation(cfg, outdir)


# -- amplitude sweeps --------------------------------------------------------

PHASE_COLUMNS = ["A", "lambda", "verdict", "peak_sup_grad_n", "peak_Y_d13",
                 "peak_Y_omega", "t_of_peak"]


def _sweep_cell(args):
    text, a_value, lam_value, cell_dir = args
    cfg = config_from_text(text)
    cfg.phys.A = a_value
    if lam_value is not None:
        cfg.init.lam = lam_value
    try:
        result = run_simulation(cfg, cell_dir)
        s = result.summary
        return {"A": a_value, "lambda": lam_value if lam_value is not None else cfg.init.lam,
                "verdict": s["verdict"], "peak_sup_grad_n": s["peak_sup_grad_n"],
                "peak_Y_d13": s["peak_Y_d13"], "peak_Y_omega": s["peak_Y_omega"],
                "t_of_peak": s["t_of_peak"]}
    except Exception as exc:  # keep the sweep alive, record the cell failure
        return {"A": a_value, "lambda": lam_value if lam_value is not None else cfg.init.lam,
                "verdict": f"error:{type(exc).__name__}", "peak_sup_grad_n": np.nan,
                "peak_Y_d13": np.nan, "peak_Y_omega": np.nan, "t_of_peak": np.nan}


def sweep_amplitude(cfg: SimConfig, a_values, lam_values=None, jobs: int = 1,
                    outdir="sweep") -> Path:
    """
    One run per (A, lambda) cell, in parallel across a worker pool; cells are
    independent and their merged phase table is written in input order.
    """
    cfg.validate()
    if len(a_values) < 1:
        raise ConfigError("need at least one amplitude")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    text = config_to_text(cfg)
    lams = list(lam_values) if lam_values else [None]
    tasks = []
    for a_value in a_values:
        for lam_value in lams:
            label = f"A{a_value:g}" + (f"_lam{lam_value:g}" if lam_value is not None else "")
            tasks.append((text, a_value, lam_value, str(outdir / label)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_cell, tasks))
    else:
        rows = [_sweep_cell(t) for t in tasks]
    lines = [",".join(PHASE_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in PHASE_COLUMNS))
    table = outdir / "phase_table.csv"
    table.write_text("\n".join(lines) + "\n")
    return table
