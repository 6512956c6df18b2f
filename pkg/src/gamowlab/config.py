"""Experiment configuration: a nested YAML document.

Complex numbers are written as ``[re, im]`` pairs (a bare real number is
also accepted). Loading is two-staged: :func:`validate` inspects the raw
mapping and reports every violation with its dotted field path, and only a
clean mapping is turned into an :class:`ExperimentConfig`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from numbers import Integral, Real
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, ParseError

FORMATS = ("csv", "json")
KINDS = ("decaying", "growing")


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class ModelSection:
    lam: float = 10.0
    a: float = 1.0


@dataclass(frozen=True)
class RegionSection:
    re_min: float = 0.5
    re_max: float = 10.0
    im_min: float = -2.0
    im_max: float = 0.0
    grid_density: float = 4.0


@dataclass(frozen=True)
class StateSection:
    zeros: tuple[complex, ...] = (0j,)
    poles: tuple[complex, ...] = (8 + 8j,)
    powers: tuple[int, ...] = (2,)


@dataclass(frozen=True)
class ContourSection:
    theta: float = math.pi / 4
    radial_cutoff: float = 14.0
    node_count: int = 400


@dataclass(frozen=True)
class GridSection:
    start: float
    stop: float
    n_points: int


@dataclass(frozen=True)
class TolerancesSection:
    pole_tol: float = 1e-12
    quad_tol: float = 1e-11
    recon_tol: float = 1e-6


@dataclass(frozen=True)
class OutputSection:
    path: str = "-"
    format: str = "csv"


@dataclass(frozen=True)
class ResonanceSection:
    E_R: float
    Gamma: float


@dataclass(frozen=True)
class Level:
    z: complex
    c: complex
    label: str | None = None


@dataclass(frozen=True)
class EffectiveSection:
    levels: tuple[Level, ...] = ()
    poles_csv: str | None = None
    n_levels: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSection = field(default_factory=ModelSection)
    region: RegionSection = field(default_factory=RegionSection)
    state: StateSection = field(default_factory=StateSection)
    contour: ContourSection = field(default_factory=ContourSection)
    time_grid: GridSection = field(default_factory=lambda: GridSection(0.0, 6.5, 27))
    energy_grid: GridSection = field(default_factory=lambda: GridSection(0.0, 20.0, 201))
    tolerances: TolerancesSection = field(default_factory=TolerancesSection)
    output: OutputSection = field(default_factory=OutputSection)
    resonance: ResonanceSection | None = None
    effective: EffectiveSection = field(default_factory=EffectiveSection)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "model": {"lambda": self.model.lam, "a": self.model.a},
            "region": _fields(self.region),
            "state": {
                "zeros": [_pair(z) for z in self.state.zeros],
                "poles": [_pair(w) for w in self.state.poles],
                "powers": list(self.state.powers),
            },
            "contour": _fields(self.contour),
            "time_grid": {"t_min": self.time_grid.start, "t_max": self.time_grid.stop, "n_points": self.time_grid.n_points},
            "energy_grid": {"e_min": self.energy_grid.start, "e_max": self.energy_grid.stop, "n_points": self.energy_grid.n_points},
            "tolerances": _fields(self.tolerances),
            "output": _fields(self.output),
        }
        if self.resonance is not None:
            d["resonance"] = _fields(self.resonance)
        eff: dict[str, Any] = {"n_levels": self.effective.n_levels}
        if self.effective.levels:
            eff["levels"] = [_level_dict(lv) for lv in self.effective.levels]
        if self.effective.poles_csv is not None:
            eff["poles_csv"] = self.effective.poles_csv
        d["effective"] = eff
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    @classmethod
    def from_dict(cls, raw: Any, kind: str = "decaying") -> ExperimentConfig:
        violations = validate(raw, kind)
        if violations:
            raise ConfigError(violations)
        return _build(raw)


def _fields(section) -> dict[str, Any]:
    return dict(vars(section))


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _level_dict(lv: Level) -> dict[str, Any]:
    d: dict[str, Any] = {"z": _pair(lv.z), "c": _pair(lv.c)}
    if lv.label is not None:
        d["label"] = lv.label
    return d


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e-12`` (no dot) as a float."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def parse_yaml(text: str) -> Any:
    try:
        return yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        col = mark.column + 1 if mark is not None else None
        raise ParseError(f"malformed YAML: {exc.problem or exc}", line, col) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed YAML: {exc}") from None


def loads(text: str, kind: str = "decaying") -> ExperimentConfig:
    return ExperimentConfig.from_dict(parse_yaml(text), kind)


def load(path: str | Path, kind: str = "decaying") -> ExperimentConfig:
    return loads(Path(path).read_text(encoding="utf-8"), kind)


# --- validation -------------------------------------------------------------

_SCHEMA: dict[str, dict[str, Any]] = {
    "model": {"lambda": 10.0, "a": 1.0},
    "region": vars(RegionSection()),
    "state": {"zeros": [[0.0, 0.0]], "poles": [[8.0, 8.0]], "powers": [2]},
    "contour": vars(ContourSection()),
    "time_grid": {"t_min": 0.0, "t_max": 6.5, "n_points": 27},
    "energy_grid": {"e_min": 0.0, "e_max": 20.0, "n_points": 201},
    "tolerances": vars(TolerancesSection()),
    "output": vars(OutputSection()),
}
_OPTIONAL = {"resonance": ("E_R", "Gamma"), "effective": ("levels", "poles_csv", "n_levels")}


class _Checker:
    def __init__(self):
        self.violations: list[Violation] = []

    def fail(self, path: str, message: str) -> None:
        self.violations.append(Violation(path, message))

    def number(self, d, key, path, *, positive=False, nonneg=False) -> float | None:
        if key not in d:
            return None
        v = d.get(key)
        where = f"{path}.{key}"
        if isinstance(v, bool) or not isinstance(v, Real):
            self.fail(where, f"expected a number, got {v!r}")
            return None
        v = float(v)
        if not math.isfinite(v):
            self.fail(where, f"must be finite, got {v!r}")
            return None
        if positive and not v > 0:
            self.fail(where, f"must be > 0, got {v!r}")
            return None
        if nonneg and v < 0:
            self.fail(where, f"must be >= 0, got {v!r}")
            return None
        return v

    def integer(self, d, key, path, minimum) -> int | None:
        if key not in d:
            return None
        v = d.get(key)
        where = f"{path}.{key}"
        if isinstance(v, bool) or not isinstance(v, Integral):
            self.fail(where, f"expected an integer, got {v!r}")
            return None
        if v < minimum:
            self.fail(where, f"must be >= {minimum}, got {v!r}")
            return None
        return int(v)

    def complex_value(self, v, where) -> complex | None:
        if isinstance(v, Real) and not isinstance(v, bool):
            z = complex(float(v), 0.0)
        elif (
            isinstance(v, list)
            and len(v) == 2
            and all(isinstance(x, Real) and not isinstance(x, bool) for x in v)
        ):
            z = complex(float(v[0]), float(v[1]))
        else:
            self.fail(where, f"expected a number or [re, im] pair, got {v!r}")
            return None
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            self.fail(where, f"must be finite, got {v!r}")
            return None
        return z

    def complex_list(self, d, key, path) -> list[complex] | None:
        if key not in d:
            return None
        v = d.get(key)
        if not isinstance(v, list):
            self.fail(f"{path}.{key}", f"expected a list, got {v!r}")
            return None
        out = [self.complex_value(x, f"{path}.{key}[{i}]") for i, x in enumerate(v)]
        return None if any(z is None for z in out) else out

    def section(self, raw, name, keys) -> dict | None:
        d = raw.get(name)
        if not isinstance(d, dict):
            self.fail(name, f"expected a mapping, got {d!r}")
            return None
        for k in d:
            if k not in keys:
                self.fail(f"{name}.{k}", "unknown key")
        for k in keys:
            if k not in d and name in _SCHEMA:
                self.fail(f"{name}.{k}", "missing")
        return d


def validate(config, kind: str = "decaying") -> list[Violation]:
    """Every violated invariant, each tagged with its dotted field path.

    ``config`` may be an :class:`ExperimentConfig`, a raw mapping or YAML
    text. ``kind="growing"`` flips the admissible time half-line to t <= 0.
    """
    if isinstance(config, ExperimentConfig):
        raw = config.to_dict()
    elif isinstance(config, str):
        raw = parse_yaml(config)
    else:
        raw = config
    ck = _Checker()
    if kind not in KINDS:
        ck.fail("kind", f"must be one of {KINDS}, got {kind!r}")
    if not isinstance(raw, dict):
        ck.fail("<root>", f"expected a mapping, got {type(raw).__name__}")
        return ck.violations
    for k in raw:
        if k not in _SCHEMA and k not in _OPTIONAL:
            ck.fail(k, "unknown section")

    if (d := ck.section(raw, "model", _SCHEMA["model"])) is not None:
        ck.number(d, "lambda", "model")
        ck.number(d, "a", "model", positive=True)

    if (d := ck.section(raw, "region", _SCHEMA["region"])) is not None:
        p = "region"
        lo, hi = ck.number(d, "re_min", p), ck.number(d, "re_max", p)
        ilo, ihi = ck.number(d, "im_min", p), ck.number(d, "im_max", p)
        ck.number(d, "grid_density", p, positive=True)
        if lo is not None and hi is not None and not lo < hi:
            ck.fail("region.re_max", f"must exceed re_min ({lo!r}), got {hi!r}")
        if ilo is not None and ihi is not None and not ilo < ihi:
            ck.fail("region.im_max", f"must exceed im_min ({ilo!r}), got {ihi!r}")
        if ihi is not None and ihi > 0:
            ck.fail("region.im_max", f"resonances lie in Im k <= 0, got {ihi!r}")

    if (d := ck.section(raw, "state", _SCHEMA["state"])) is not None:
        zeros = ck.complex_list(d, "zeros", "state")
        poles = ck.complex_list(d, "poles", "state")
        powers = d.get("powers")
        powers_ok = "powers" in d and isinstance(powers, list) and all(
            isinstance(x, Integral) and not isinstance(x, bool) and x >= 1 for x in powers
        )
        if "powers" in d and not powers_ok:
            ck.fail("state.powers", f"expected a list of positive integers, got {powers!r}")
        if poles is not None:
            if not poles:
                ck.fail("state.poles", "at least one pole is required")
            for i, w in enumerate(poles):
                if w.imag <= 0:
                    ck.fail(f"state.poles[{i}]", f"must lie in the upper half-plane, got {w!r}")
            if powers_ok and len(powers) != len(poles):
                ck.fail("state.powers", f"need one power per pole ({len(poles)}), got {len(powers)}")
        if zeros is not None and powers_ok and sum(powers) - len(zeros) < 1:
            ck.fail("state.powers", "total power must exceed the number of zeros for normalizability")

    if (d := ck.section(raw, "contour", _SCHEMA["contour"])) is not None:
        th = ck.number(d, "theta", "contour")
        if th is not None and not 0 < th <= math.pi / 4 + 1e-15:
            ck.fail("contour.theta", f"must lie in (0, pi/4], got {th!r}")
        ck.number(d, "radial_cutoff", "contour", positive=True)
        ck.integer(d, "node_count", "contour", 16)

    if (d := ck.section(raw, "time_grid", _SCHEMA["time_grid"])) is not None:
        t0, t1 = ck.number(d, "t_min", "time_grid"), ck.number(d, "t_max", "time_grid")
        ck.integer(d, "n_points", "time_grid", 1)
        if kind == "growing":
            if t1 is not None and t1 > 0:
                ck.fail("time_grid.t_max", f"growing states evolve for t <= 0 only, got {t1!r}")
        elif t0 is not None and t0 < 0:
            ck.fail("time_grid.t_min", f"decaying states evolve for t >= 0 only, got {t0!r}")
        if t0 is not None and t1 is not None and t1 < t0:
            ck.fail("time_grid.t_max", f"must be >= t_min ({t0!r}), got {t1!r}")

    if (d := ck.section(raw, "energy_grid", _SCHEMA["energy_grid"])) is not None:
        e0, e1 = ck.number(d, "e_min", "energy_grid"), ck.number(d, "e_max", "energy_grid")
        ck.integer(d, "n_points", "energy_grid", 1)
        if e0 is not None and e1 is not None and e1 < e0:
            ck.fail("energy_grid.e_max", f"must be >= e_min ({e0!r}), got {e1!r}")

    if (d := ck.section(raw, "tolerances", _SCHEMA["tolerances"])) is not None:
        for key in ("pole_tol", "quad_tol", "recon_tol"):
            ck.number(d, key, "tolerances", positive=True)

    if (d := ck.section(raw, "output", _SCHEMA["output"])) is not None:
        path = d.get("path")
        if not isinstance(path, str) or not path:
            ck.fail("output.path", f"expected a non-empty string, got {path!r}")
        if d.get("format") not in FORMATS:
            ck.fail("output.format", f"must be one of {FORMATS}, got {d.get('format')!r}")

    if raw.get("resonance") is not None:
        if (d := ck.section(raw, "resonance", _OPTIONAL["resonance"])) is not None:
            for key in _OPTIONAL["resonance"]:
                if key not in d:
                    ck.fail(f"resonance.{key}", "missing")
            ck.number(d, "E_R", "resonance")
            ck.number(d, "Gamma", "resonance", positive=True)

    if raw.get("effective") is not None:
        if (d := ck.section(raw, "effective", _OPTIONAL["effective"])) is not None:
            if "n_levels" in d:
                ck.integer(d, "n_levels", "effective", 1)
            if "poles_csv" in d and (not isinstance(d["poles_csv"], str) or not d["poles_csv"]):
                ck.fail("effective.poles_csv", f"expected a file path, got {d['poles_csv']!r}")
            levels = d.get("levels", [])
            if not isinstance(levels, list):
                ck.fail("effective.levels", f"expected a list, got {levels!r}")
                levels = []
            for i, lv in enumerate(levels):
                where = f"effective.levels[{i}]"
                if not isinstance(lv, dict):
                    ck.fail(where, f"expected a mapping, got {lv!r}")
                    continue
                for k in lv:
                    if k not in ("z", "c", "label"):
                        ck.fail(f"{where}.{k}", "unknown key")
                z = ck.complex_value(lv.get("z"), f"{where}.z")
                ck.complex_value(lv.get("c"), f"{where}.c")
                if z is not None and z.imag >= 0:
                    ck.fail(f"{where}.z", f"levels must decay (Im z < 0), got {z!r}")
                if "label" in lv and not isinstance(lv["label"], str):
                    ck.fail(f"{where}.label", f"expected a string, got {lv['label']!r}")
    return ck.violations


def _c(v) -> complex:
    return complex(float(v[0]), float(v[1])) if isinstance(v, list) else complex(float(v), 0.0)


def _build(raw: dict) -> ExperimentConfig:
    m, r, s, c = raw["model"], raw["region"], raw["state"], raw["contour"]
    tg, eg, tol, out = raw["time_grid"], raw["energy_grid"], raw["tolerances"], raw["output"]
    res = raw.get("resonance")
    eff = raw.get("effective") or {}
    return ExperimentConfig(
        model=ModelSection(float(m["lambda"]), float(m["a"])),
        region=RegionSection(*(float(r[k]) for k in ("re_min", "re_max", "im_min", "im_max", "grid_density"))),
        state=StateSection(
            tuple(_c(z) for z in s["zeros"]), tuple(_c(w) for w in s["poles"]), tuple(int(p) for p in s["powers"])
        ),
        contour=ContourSection(float(c["theta"]), float(c["radial_cutoff"]), int(c["node_count"])),
        time_grid=GridSection(float(tg["t_min"]), float(tg["t_max"]), int(tg["n_points"])),
        energy_grid=GridSection(float(eg["e_min"]), float(eg["e_max"]), int(eg["n_points"])),
        tolerances=TolerancesSection(*(float(tol[k]) for k in ("pole_tol", "quad_tol", "recon_tol"))),
        output=OutputSection(out["path"], out["format"]),
        resonance=None if res is None else ResonanceSection(float(res["E_R"]), float(res["Gamma"])),
        effective=EffectiveSection(
            tuple(Level(_c(lv["z"]), _c(lv["c"]), lv.get("label")) for lv in eff.get("levels", [])),
            eff.get("poles_csv"),
            int(eff.get("n_levels", 2)),
        ),
    )
