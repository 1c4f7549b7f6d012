"""Parameter sweeps: validated run configuration, row evaluation and CSV/JSON emission."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .constants import CONSTANTS, K_B
from .diffusion import Method, ThermalBath, decoherence_rate, diffusion_components, long_wavelength_parameter
from .drag import drag_coefficient
from .errors import ConfigError, ConvergenceError, DomainError, ParameterError, SingularityError
from .materials import Material, Particle, load_presets
from .stochastic import LangevinParams, fdt_ratio, ks_critical_value, ks_statistic, langevin_simulate, maxwell_cdf
from .two_dipole import DipolePairConfig, decoherence_factor_lw, pair_rates_general

COMMANDS = ("diffusion", "decoherence", "pair", "drag", "simulate", "materials", "ledger")
METHODS = ("closed", "quadrature", "both")
FORMATS = ("csv", "json")
_LW_FLAG_THRESHOLD = 0.1
_NEEDS_MASS = ("drag", "simulate")

# (input columns, geometry key) per sweep command
_INPUTS = {
    "diffusion": ("material", "temperature_T", "radius_a", "beta"),
    "decoherence": ("material", "temperature_T", "radius_a", "beta", "delta_x"),
    "pair": ("material", "temperature_T", "radius_a", "beta", "separation_d"),
    "drag": ("material", "temperature_T", "radius_a", "beta", "mass_m"),
    "simulate": ("material", "temperature_T", "radius_a", "beta", "mass_m", "seed", "n_particles"),
    "materials": ("material",),
}
_FLAG_COLUMNS = ("error", "flags")


@dataclass(frozen=True)
class RunConfig:
    command: str
    material: Material
    temperature_T: tuple[float, ...] = (300.0,)
    radius_a: tuple[float, ...] = (1e-7,)
    mass_m: Optional[tuple[float, ...]] = None
    beta: tuple[float, ...] = (0.5,)
    delta_x: tuple[float, ...] = (1e-8,)
    separation_d: tuple[float, ...] = (1e-8,)
    method: str = "closed"
    output: str = "csv"
    seed: int = 0
    diagnostics: bool = False
    n_particles: int = 10_000
    relaxation_times: float = 20.0
    presets: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.method not in METHODS:
            raise ConfigError(f"method: must be one of {', '.join(METHODS)}")
        if self.output not in FORMATS:
            raise ConfigError(f"format: must be one of {', '.join(FORMATS)}")
        positive = ["temperature_T", "radius_a", "beta"]
        if self.command in _NEEDS_MASS:
            if self.mass_m is None:
                raise ConfigError(f"mass_m: required for the {self.command} command")
            positive.append("mass_m")
        if self.command == "decoherence":
            positive.append("delta_x")
        if self.command == "pair":
            positive.append("separation_d")
        for name in positive:
            values = getattr(self, name)
            if not values:
                raise ConfigError(f"{name}: list must be non-empty")
            for v in values:
                ok = v >= 0 if name in ("delta_x", "separation_d") else v > 0
                if not (ok and math.isfinite(v)):
                    raise ConfigError(f"{name}: invalid value {v!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")
        if self.n_particles < 1:
            raise ConfigError("n_particles: must be positive")
        if not self.relaxation_times > 0:
            raise ConfigError("relaxation_times: must be positive")

    def echo(self) -> dict:
        """JSON-ready description of the resolved configuration."""
        out = {
            "command": self.command,
            "material": {k: v for k, v in asdict(self.material).items()},
            "method": self.method,
            "diagnostics": self.diagnostics,
            "seed": self.seed,
        }
        for name in ("temperature_T", "radius_a", "mass_m", "beta", "delta_x", "separation_d"):
            if name in _INPUTS.get(self.command, ()):
                out[name] = list(getattr(self, name))
        if self.command == "simulate":
            out["n_particles"] = self.n_particles
            out["relaxation_times"] = self.relaxation_times
        return out


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[dict[str, Any]]
    metadata: dict[str, Any]

    @property
    def failed(self) -> bool:
        return any(r.get("error") for r in self.rows)

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "rows": [{c: r[c] for c in self.columns} for r in self.rows]}

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepResult":
        rows = doc["rows"]
        columns = list(rows[0]) if rows else []
        return cls(columns=columns, rows=[dict(r) for r in rows], metadata=doc["metadata"])


# ---------------------------------------------------------------------------
# Config ingestion

_CONFIG_KEYS = {
    "command", "material", "materials_file", "particle", "temperature_T", "delta_x", "separation_d",
    "method", "format", "seed", "diagnostics", "n_particles", "relaxation_times",
}
_PARTICLE_KEYS = {"radius_a", "mass_m", "beta"}


def _as_list(name, value):
    vals = value if isinstance(value, (list, tuple)) else [value]
    try:
        return tuple(float(v) for v in vals)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected numbers, got {value!r}") from exc


def resolve_material(entry, presets: dict[str, Material]) -> Material:
    """A preset name or an inline {name, chi_r, chi_i, epsilon_r} mapping."""
    if isinstance(entry, Material):
        return entry
    if isinstance(entry, str):
        if entry not in presets:
            raise ConfigError(f"material: unknown {entry!r}; available presets: {', '.join(sorted(presets))}")
        return presets[entry]
    if isinstance(entry, dict):
        unknown = set(entry) - {"name", "chi_r", "chi_i", "epsilon_r"}
        if unknown or "chi_r" not in entry:
            raise ConfigError("material: inline definition needs chi_r and only name, chi_r, chi_i, epsilon_r")
        try:
            eps = entry.get("epsilon_r")
            return Material(str(entry.get("name", "custom")), float(entry["chi_r"]), float(entry.get("chi_i", 0.0)),
                            None if eps is None else float(eps))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"material: {exc}") from exc
    raise ConfigError("material: expected a preset name or an inline object")


def build_config(doc: dict, overrides: Optional[dict] = None) -> RunConfig:
    """Merge a config document with flag overrides (flags win) into a RunConfig."""
    doc = dict(doc or {})
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config: unknown keys {sorted(unknown)}")
    particle = dict(doc.pop("particle", {}) or {})
    if set(particle) - _PARTICLE_KEYS:
        raise ConfigError(f"particle: unknown keys {sorted(set(particle) - _PARTICLE_KEYS)}")
    doc.update(particle)
    for k, v in (overrides or {}).items():
        if v is not None:
            doc[k] = v

    presets = load_presets(doc.get("materials_file"))
    if "command" not in doc:
        raise ConfigError("command: missing")
    material = resolve_material(doc.get("material", "nanodiamond"), presets)
    kw: dict[str, Any] = {}
    for name in ("temperature_T", "radius_a", "mass_m", "beta", "delta_x", "separation_d"):
        if name in doc:
            kw[name] = _as_list(name, doc[name])
    for name, conv in (("method", str), ("seed", int), ("n_particles", int), ("relaxation_times", float),
                       ("diagnostics", bool)):
        if name in doc:
            try:
                kw[name] = conv(doc[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{name}: invalid value {doc[name]!r}") from exc
    if "format" in doc:
        kw["output"] = str(doc["format"])
    return RunConfig(command=str(doc["command"]), material=material, presets=presets, **kw)


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    return doc


# ---------------------------------------------------------------------------
# Row evaluation

def _reldiff(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _diffusion(cfg, mat, p, bath, g, method):
    b = diffusion_components(mat, p, bath, method)
    return {
        "dp2_magnetic": b.dp2_magnetic, "dp2_electric": b.dp2_electric, "dp2_coupled": b.dp2_coupled,
        "dp2_absorption": b.dp2_absorption, "dp2_total": b.dp2_total,
    }


def _decoherence(cfg, mat, p, bath, g, method):
    r = decoherence_rate(mat, p, bath, g["delta_x"], method)
    return {"lambda_scattering": r.lambda_scattering, "gamma": r.gamma}


def _pair(cfg, mat, p, bath, g, method):
    pc = DipolePairConfig(g["separation_d"], mat, p, bath)
    if method is Method.CLOSED_FORM:
        return {"f_decoherence": decoherence_factor_lw(pc)}
    r = pair_rates_general(pc)
    return {"f_decoherence": r.f_decoherence, "r_same": r.r_same, "r_cross": r.r_cross}


def _drag(cfg, mat, p, bath, g, method):
    r = drag_coefficient(mat, p, bath, method)
    return {"xi_scattering": r.xi_scattering, "xi_absorption": r.xi_absorption, "xi_total": r.xi_total}


def _simulate(cfg, mat, p, bath, g, method):
    T = bath.temperature_T
    xi = drag_coefficient(mat, p, bath).xi_total
    if xi == 0:
        raise SingularityError("drag coefficient is zero, nothing relaxes")
    params = LangevinParams.thermal(xi, p.mass_m, T, n_particles=cfg.n_particles,
                                    relaxation_times=cfg.relaxation_times, seed=cfg.seed)
    dist = langevin_simulate(params)
    ks = ks_statistic(dist.velocities, lambda v: maxwell_cdf(v, p.mass_m, T))
    return {
        "xi": xi,
        "diffusion_D": params.diffusion_D,
        "sample_mean_KE": dist.sample_mean_KE,
        "equipartition_ratio": dist.sample_mean_KE / (0.5 * K_B * T),
        "ks_statistic": ks,
        "ks_critical_1pct": ks_critical_value(params.n_particles),
        "fdt_ratio": fdt_ratio(mat, p, bath),
    }


_EVALUATORS = {"diffusion": _diffusion, "decoherence": _decoherence, "pair": _pair,
               "drag": _drag, "simulate": _simulate}


def _evaluate(cfg: RunConfig, evaluator, mat, p, bath, g) -> dict:
    if cfg.method == "both":
        closed = evaluator(cfg, mat, p, bath, g, Method.CLOSED_FORM)
        quad = evaluator(cfg, mat, p, bath, g, Method.QUADRATURE)
        out = {}
        for k in set(closed) | set(quad):
            if k in closed and k in quad:
                out[f"{k}_closed"] = closed[k]
                out[f"{k}_quadrature"] = quad[k]
                out[f"{k}_reldiff"] = _reldiff(closed[k], quad[k])
            else:
                out[k] = closed.get(k, quad.get(k))
        return out
    return evaluator(cfg, mat, p, bath, g, Method.CLOSED_FORM if cfg.method == "closed" else Method.QUADRATURE)


_DIFFUSION_KEYS = ("dp2_magnetic", "dp2_electric", "dp2_coupled", "dp2_absorption", "dp2_total")
# output keys per command: (closed-form path, quadrature path)
_OUTPUT_KEYS = {
    "diffusion": (_DIFFUSION_KEYS, _DIFFUSION_KEYS),
    "decoherence": (("lambda_scattering", "gamma"),) * 2,
    "pair": (("f_decoherence",), ("f_decoherence", "r_same", "r_cross")),
    "drag": (("xi_scattering", "xi_absorption", "xi_total"),) * 2,
    "simulate": (("xi", "diffusion_D", "sample_mean_KE", "equipartition_ratio", "ks_statistic",
                  "ks_critical_1pct", "fdt_ratio"),) * 2,
}


def _output_columns(cfg: RunConfig) -> list[str]:
    closed, quad = _OUTPUT_KEYS[cfg.command]
    if cfg.method == "closed" or cfg.command == "simulate":
        keys = list(closed)
    elif cfg.method == "quadrature":
        keys = list(quad)
    else:
        keys = [f"{k}_{s}" for k in closed if k in quad for s in ("closed", "quadrature", "reldiff")]
        keys += [k for k in set(closed) ^ set(quad)]
    if cfg.diagnostics and cfg.command in ("decoherence", "pair"):
        keys.append("long_wavelength_parameter")
    return sorted(keys)


def _materials_result(cfg: RunConfig) -> SweepResult:
    columns = ["material", "chi_r", "chi_i", "epsilon_r"]
    rows = [
        {"material": m.name, "chi_r": m.chi_r, "chi_i": m.chi_i, "epsilon_r": m.epsilon_r}
        for m in cfg.presets.values()
    ]
    return SweepResult(columns, rows, _metadata(cfg))


def _metadata(cfg: RunConfig) -> dict:
    return {
        "tool": "thermomag",
        "version": __version__,
        "constants_digest": CONSTANTS.digest(),
        "config": cfg.echo(),
    }


def run(cfg: RunConfig) -> SweepResult:
    """Evaluate the Cartesian product of all swept lists, one row per combination.

    Rows that fail carry NaN outputs and the message in ``error``; the sweep
    itself always completes.
    """
    if cfg.command == "materials":
        return _materials_result(cfg)
    if cfg.command == "ledger":
        raise ConfigError("command: ledger produces a text report, not a sweep")
    inputs = _INPUTS[cfg.command]
    outputs = _output_columns(cfg)
    evaluator = _EVALUATORS[cfg.command]
    geometry = {"decoherence": ("delta_x", cfg.delta_x), "pair": ("separation_d", cfg.separation_d)}.get(
        cfg.command, (None, (None,)))
    masses = cfg.mass_m if cfg.command in _NEEDS_MASS else (None,)

    rows = []
    for T, a, beta, m, gval in itertools.product(cfg.temperature_T, cfg.radius_a, cfg.beta, masses, geometry[1]):
        row: dict[str, Any] = {"material": cfg.material.name, "temperature_T": T, "radius_a": a, "beta": beta}
        if m is not None:
            row["mass_m"] = m
        if cfg.command == "simulate":
            row["seed"] = cfg.seed
            row["n_particles"] = cfg.n_particles
        g = {}
        if geometry[0]:
            row[geometry[0]] = gval
            g[geometry[0]] = gval
        flags = []
        try:
            # mass does not enter the diffusion, decoherence and pair results
            p = Particle(a, 1.0 if m is None else m, beta)
            bath = ThermalBath(T)
            values = _evaluate(cfg, evaluator, cfg.material, p, bath, g)
            if cfg.diagnostics and geometry[0]:
                values["long_wavelength_parameter"] = long_wavelength_parameter(gval, T)
            if geometry[0] and long_wavelength_parameter(gval, T) > _LW_FLAG_THRESHOLD:
                flags.append("long_wavelength_violated")
            if cfg.command == "drag" and values.get("xi_absorption", values.get("xi_absorption_closed", 0.0)):
                flags.append("ledger:drag-absorption-coefficient")
            row.update({k: values[k] for k in outputs})
            row["error"] = ""
        except (ConvergenceError, DomainError, ParameterError, SingularityError) as exc:
            row.update({k: math.nan for k in outputs})
            row["error"] = f"{type(exc).__name__}: {exc}"
        row["flags"] = ";".join(flags)
        rows.append(row)
    return SweepResult(list(inputs) + outputs + list(_FLAG_COLUMNS), rows, _metadata(cfg))


# ---------------------------------------------------------------------------
# Emission

def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.16e}"
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(result: SweepResult, fmt: str) -> str:
    """Serialize to text; identical results give identical strings."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(result.columns)
        for r in result.rows:
            w.writerow([_csv_cell(r[c]) for c in result.columns])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "metadata": result.metadata,
            "rows": [{c: _json_value(r[c]) for c in result.columns} for r in result.rows],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    raise ConfigError(f"format: must be one of {', '.join(FORMATS)}")


def emit(result: SweepResult, fmt: str = "csv", destination: str | Path | None = None) -> None:
    """Write to a path, or to standard output when destination is None or '-'.

    An unwritable path raises OSError.
    """
    text = render(result, fmt)
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
