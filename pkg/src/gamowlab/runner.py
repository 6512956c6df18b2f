"""Experiment dispatch and deterministic CSV/JSON serialization."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .effective import EffectiveModel, evolve_effective, intensity
from .errors import DomainError, NoResonanceError, ValidationError
from .gamow import DECAYING, GROWING, GamowState, bw_amplitude, bw_survival, semigroup_phase
from .poles import ResonancePole, SearchRegion, scan_poles
from .scattering import DeltaShellModel
from .spectral import PreparedState, RotatedContour, decompose, direct_survival, gamow_coefficient, sector_poles

SCHEMA_VERSION = 1
COMMANDS = ("poles", "lineshape", "survival", "decompose", "bw-compare", "effective")


@dataclass(frozen=True)
class Table:
    command: str
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def header_line(command: str) -> str:
    return f"# gamowlab {command} schema v{SCHEMA_VERSION}"


# --- building blocks from config --------------------------------------------


def _model(cfg: ExperimentConfig) -> DeltaShellModel:
    return DeltaShellModel(cfg.model.lam, cfg.model.a)


def _region(cfg: ExperimentConfig) -> SearchRegion:
    r = cfg.region
    return SearchRegion(r.re_min, r.re_max, r.im_min, r.im_max, r.grid_density)


def _state(cfg: ExperimentConfig) -> PreparedState:
    s = cfg.state
    return PreparedState(_model(cfg), s.zeros, s.poles, s.powers)


def _contour(cfg: ExperimentConfig) -> RotatedContour:
    c = cfg.contour
    return RotatedContour(c.theta, c.radial_cutoff, c.node_count)


def _grid(g) -> np.ndarray:
    return np.linspace(g.start, g.stop, g.n_points)


def _region_poles(cfg: ExperimentConfig) -> list[ResonancePole]:
    return scan_poles(_model(cfg), _region(cfg), cfg.tolerances.pole_tol)


def _resonance(cfg: ExperimentConfig) -> ResonancePole:
    """Configured resonance, else the lowest pole found in the search region."""
    if cfg.resonance is not None:
        return ResonancePole.from_energy(cfg.resonance.E_R, cfg.resonance.Gamma)
    poles = _region_poles(cfg)
    if not poles:
        raise NoResonanceError("no resonance pole in the search region; set resonance.E_R/Gamma")
    return poles[0]


def _times(cfg: ExperimentConfig, kind: str) -> np.ndarray:
    t = _grid(cfg.time_grid)
    bad = t < 0 if kind == DECAYING else t > 0
    if np.any(bad):
        raise ValidationError(f"time grid leaves the admissible half-line for kind={kind}")
    return t


def _require_decaying(command: str, kind: str) -> None:
    if kind != DECAYING:
        raise DomainError(f"'{command}' is defined for decaying states only")


# --- commands ---------------------------------------------------------------


def run_poles(cfg: ExperimentConfig, kind: str) -> Table:
    _require_decaying("poles", kind)
    rows = []
    for p in _region_poles(cfg):
        d = p.jost_derivative
        rows.append((p.k_pole.real, p.k_pole.imag, p.E_R, p.Gamma, d.real, d.imag))
    return Table("poles", ("k_re", "k_im", "E_R", "Gamma", "jost_deriv_re", "jost_deriv_im"), tuple(rows))


def run_lineshape(cfg: ExperimentConfig, kind: str) -> Table:
    _require_decaying("lineshape", kind)
    g = GamowState(_resonance(cfg))
    E = _grid(cfg.energy_grid)
    amp = np.atleast_1d(bw_amplitude(g, E))
    mod2 = amp.real**2 + amp.imag**2
    rows = tuple(zip(E.tolist(), mod2.tolist(), amp.real.tolist(), amp.imag.tolist()))
    return Table("lineshape", ("E", "lineshape", "amplitude_re", "amplitude_im"), rows)


def run_survival(cfg: ExperimentConfig, kind: str) -> Table:
    """|A(t)|^2 of the prepared state against e^(-Gamma t) of its narrowest pole.

    For ``kind="growing"`` the grid is t <= 0; A(t) = conj(A(-t)) there and
    the reference is the growing partner's e^(+Gamma t).
    """
    t = _times(cfg, kind)
    state = _state(cfg)
    poles = _region_poles(cfg)
    if not poles:
        raise NoResonanceError("no resonance pole in the search region for the exponential reference")
    narrow = min(poles, key=lambda p: p.Gamma)
    g = GamowState(narrow, kind)
    rows = []
    for ti in t.tolist():
        a = direct_survival(state, abs(ti), cfg.tolerances.quad_tol)
        p = a.real**2 + a.imag**2
        ref = abs(semigroup_phase(g, ti)) ** 2
        rows.append((ti, p, ref, (p - ref) / ref))
    cols = ("t", "survival_probability", "exponential_reference", "relative_deviation")
    return Table("survival", cols, tuple(rows))


def run_decompose(cfg: ExperimentConfig, kind: str) -> Table:
    _require_decaying("decompose", kind)
    t = _times(cfg, kind)
    state, contour = _state(cfg), _contour(cfg)
    tol = cfg.tolerances
    poles = sector_poles(state.model, contour, tol.pole_tol)
    cols = ["t", "direct_re", "direct_im", "background_re", "background_im"]
    for i in range(1, len(poles) + 1):
        cols += [f"pole{i}_re", f"pole{i}_im"]
    rows = []
    for ti in t.tolist():
        d = decompose(state, poles, contour, ti, recon_tol=tol.recon_tol, tol=tol.quad_tol)
        row = [ti, d.direct.real, d.direct.imag, d.background.real, d.background.imag]
        for term in d.pole_terms:
            row += [term.value.real, term.value.imag]
        rows.append(tuple(row))
    return Table("decompose", tuple(cols), tuple(rows))


def run_bw_compare(cfg: ExperimentConfig, kind: str) -> Table:
    _require_decaying("bw-compare", kind)
    t = _times(cfg, kind)
    g = GamowState(_resonance(cfg))
    tol = cfg.tolerances.quad_tol
    rows = []
    for ti in t.tolist():
        ext = abs(bw_survival(g, ti, "extended", tol=tol)) ** 2
        phys = abs(bw_survival(g, ti, "physical", tol=tol)) ** 2
        expo = float(np.exp(-g.Gamma * ti))
        rows.append((ti, ext, phys, expo, (phys - expo) / expo))
    return Table("bw-compare", ("t", "extended", "physical", "exponential", "relative_deviation"), tuple(rows))


def read_poles_csv(path: str | Path) -> list[ResonancePole]:
    """Poles from a table previously written by the ``poles`` command."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    try:
        return [
            ResonancePole(
                complex(float(r["k_re"]), float(r["k_im"])),
                complex(float(r["jost_deriv_re"]), float(r["jost_deriv_im"])),
            )
            for r in reader
        ]
    except (KeyError, ValueError, TypeError) as exc:
        raise ValidationError(f"{path}: not a poles table ({exc})") from None


def effective_model(cfg: ExperimentConfig) -> EffectiveModel:
    """Levels from the config, a poles CSV, or the lowest region poles."""
    eff = cfg.effective
    if eff.levels:
        labels = tuple(lv.label or f"level{i + 1}" for i, lv in enumerate(eff.levels))
        return EffectiveModel(
            tuple(lv.z for lv in eff.levels), tuple(lv.c for lv in eff.levels), labels
        )
    poles = read_poles_csv(eff.poles_csv) if eff.poles_csv is not None else _region_poles(cfg)
    poles = poles[: eff.n_levels]
    if not poles:
        raise NoResonanceError("no poles available to build the effective model")
    state = _state(cfg)
    coeffs = tuple(gamow_coefficient(state, p) for p in poles)
    return EffectiveModel(tuple(p.z_R for p in poles), coeffs)


def run_effective(cfg: ExperimentConfig, kind: str) -> Table:
    _require_decaying("effective", kind)
    t = _times(cfg, kind)
    m = effective_model(cfg)
    c = evolve_effective(m, t)
    mod2 = c.real**2 + c.imag**2
    total = intensity(m, t)
    n = len(m.energies)
    cols = ("t",) + tuple(f"level{i + 1}_modulus2" for i in range(n)) + ("intensity",)
    rows = tuple((ti, *mod2[j].tolist(), float(total[j])) for j, ti in enumerate(t.tolist()))
    return Table("effective", cols, rows)


_DISPATCH = {
    "poles": run_poles,
    "lineshape": run_lineshape,
    "survival": run_survival,
    "decompose": run_decompose,
    "bw-compare": run_bw_compare,
    "effective": run_effective,
}


def run(command: str, cfg: ExperimentConfig, kind: str = DECAYING) -> Table:
    if command not in _DISPATCH:
        raise ValidationError(f"unknown command {command!r}; choose from {COMMANDS}")
    if kind not in (DECAYING, GROWING):
        raise ValidationError(f"kind must be decaying or growing, got {kind!r}")
    return _DISPATCH[command](cfg, kind)


# --- serialization ----------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def to_csv(table: Table) -> str:
    lines = [header_line(table.command), ",".join(table.columns)]
    lines += [",".join(_fmt(float(v)) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def to_json(table: Table, cfg: ExperimentConfig, kind: str) -> str:
    doc = {
        "meta": {
            "tool": "gamowlab",
            "version": __version__,
            "command": table.command,
            "schema": SCHEMA_VERSION,
            "kind": kind,
            "config": cfg.to_dict(),
        },
        "data": {name: [float(r[i]) for r in table.rows] for i, name in enumerate(table.columns)},
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def render(table: Table, cfg: ExperimentConfig, fmt: str, kind: str = DECAYING) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table, cfg, kind)
    raise ValidationError(f"format must be csv or json, got {fmt!r}")
