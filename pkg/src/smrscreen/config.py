"""JSON schema for simulation grids, shared by ``simulate`` and ``reproduce``.

Example::

    {
      "schema_version": 1,
      "m": 2000,
      "pis": [0.02, 0.1],
      "mus": [3, 4, 5],
      "designs": [{"kind": "block", "l": 50, "rho": 0.7},
                  {"kind": "sparse"}, {"kind": "two_factor", "n_sample": 100}],
      "sided": "one",
      "n_reps": 50,
      "seed": 1,
      "procedures": ["adsmr", "cvsmr:0.1", "bh:0.5", "bh:0.7", "mdr"],
      "calibration": {"source": "design", "reps": 1000}
    }
"""

from __future__ import annotations

from dataclasses import dataclass

from .experiments import DEFAULT_PROCEDURES, parse_procedure
from .simulation import SCHEMA_VERSION, SimulationConfig, design_from_dict

_REQUIRED = ("m", "pis", "mus", "designs")
_KNOWN = {"schema_version", "m", "pis", "mus", "designs", "sided", "n_reps",
          "seed", "procedures", "calibration"}


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid config: " + "; ".join(self.errors))


@dataclass(frozen=True)
class GridConfig:
    scenarios: tuple           # ((scenario_id, SimulationConfig), ...)
    procedures: tuple
    cal_source: str
    cal_reps: int
    alpha_m: float | None
    raw: dict


def design_label(d) -> str:
    if d.kind == "block":
        tag = "" if d.structure == "exchangeable" else f"-{d.structure}"
        return f"block{tag}-l{d.l}-rho{d.rho:g}"
    if d.kind == "sparse":
        return f"sparse-rho{d.rho:g}-p{d.density:g}"
    if d.kind == "two_factor":
        return f"factor-n{d.n_sample}"
    return d.kind


def _number(errors, raw, key, cond, msg):
    v = raw.get(key)
    if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float)) or not cond(v)):
        errors.append(f"{key}: {msg}")


def parse_grid(raw: dict) -> GridConfig:
    """Validate a grid config; raises :class:`ConfigError` listing every bad field."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a JSON object"])
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: unsupported value {version!r}")
    for key in _REQUIRED:
        if key not in raw:
            errors.append(f"{key}: required")
    for key in sorted(set(raw) - _KNOWN):
        errors.append(f"{key}: unknown field")
    _number(errors, raw, "m", lambda v: isinstance(v, int) and v >= 2, "integer >= 2")
    _number(errors, raw, "n_reps", lambda v: isinstance(v, int) and v >= 1, "integer >= 1")
    _number(errors, raw, "seed", lambda v: isinstance(v, int), "integer")
    for key, ok, msg in (("pis", lambda v: 0 <= v < 1, "numbers in [0, 1)"),
                         ("mus", lambda v: v >= 0, "nonnegative numbers")):
        v = raw.get(key)
        if v is not None and (not isinstance(v, list) or not v or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) and ok(x) for x in v)):
            errors.append(f"{key}: nonempty list of {msg}")
    if raw.get("sided", "one") not in ("one", "two"):
        errors.append("sided: 'one' or 'two'")
    designs = []
    if "designs" in raw:
        if not isinstance(raw["designs"], list) or not raw["designs"]:
            errors.append("designs: nonempty list")
        else:
            for i, d in enumerate(raw["designs"]):
                try:
                    designs.append(design_from_dict(d))
                except (TypeError, ValueError, KeyError, AttributeError) as exc:
                    errors.append(f"designs[{i}]: {exc}")
    procs = []
    for i, p in enumerate(raw.get("procedures", DEFAULT_PROCEDURES)):
        try:
            procs.append(parse_procedure(p))
        except (TypeError, ValueError) as exc:
            errors.append(f"procedures[{i}]: {exc}")
    cal = raw.get("calibration", {})
    if not isinstance(cal, dict):
        errors.append("calibration: object")
        cal = {}
    source = cal.get("source", "design")
    if source not in ("design", "uniform"):
        errors.append("calibration.source: 'design' or 'uniform'")
    cal_reps = cal.get("reps", 1000)
    if not isinstance(cal_reps, int) or cal_reps < 100:
        errors.append("calibration.reps: integer >= 100")
    alpha_m = cal.get("alpha_m")
    if alpha_m is not None and not (isinstance(alpha_m, (int, float)) and 0 < alpha_m < 1):
        errors.append("calibration.alpha_m: number in (0, 1)")
    if errors:
        raise ConfigError(errors)

    scenarios = []
    for d in designs:
        for pi in raw["pis"]:
            for mu in raw["mus"]:
                try:
                    cfg = SimulationConfig(m=raw["m"], pi=float(pi), mu=float(mu),
                                           design=d, sided=raw.get("sided", "one"),
                                           n_reps=raw.get("n_reps", 100),
                                           seed=raw.get("seed", 0))
                except ValueError as exc:
                    raise ConfigError([str(exc)]) from None
                scenarios.append((f"{design_label(d)}_pi{pi:g}_mu{mu:g}", cfg))
    return GridConfig(tuple(scenarios), tuple(procs), source, cal_reps, alpha_m, raw)
