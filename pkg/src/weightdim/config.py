"""JSON problem configs and report encoding.

A problem config looks like::

    {
      "d": 1, "m": 1,
      "tau": ["1", "1/2"],
      "domain": [["0", "1"]],
      "components": [[["1", [2]]]],
      "point": ["414213/1000000"]
    }

``components[j]`` lists ``[coefficient, exponent multi-index]`` pairs of
``f_j``.  Every number is an exact string (``"p/q"``, an integer or a finite
decimal); JSON floats are refused.  Only ``d``, ``m`` and ``tau`` are needed
for the weight-only subcommands.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .core import ManifoldSpec, Polynomial, RationalBox, WeightVector, validate_weights
from .exact import PowerProduct, approx, format_fraction, to_fraction
from .exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    weights: WeightVector
    spec: Optional[ManifoldSpec] = None
    point: Optional[tuple[Fraction, ...]] = None
    a: Optional[tuple[Fraction, ...]] = None

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return dump_config(self) == dump_config(other)


def _exact(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise ValidationError(f"{where}: JSON float {value!r} is not exact; quote it as a string")
    try:
        return to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _int(raw: dict, key: str) -> int:
    value = raw.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"'{key}' must be an integer")
    return value


def parse_config(raw: dict[str, Any]) -> ProblemInstance:
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    d, m = _int(raw, "d"), _int(raw, "m")
    if "tau" not in raw:
        raise ValidationError("config is missing 'tau'")
    taus = [_exact(t, f"tau[{i}]") for i, t in enumerate(raw["tau"])]
    weights = validate_weights(taus, d, m)
    spec = None
    if "domain" in raw or "components" in raw:
        try:
            intervals = [(_exact(lo, "domain"), _exact(hi, "domain")) for lo, hi in raw["domain"]]
            comps = []
            for j, comp in enumerate(raw["components"]):
                terms = [(_exact(c, f"components[{j}]"), tuple(e)) for c, e in comp]
                comps.append(Polynomial(d, terms))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed manifold description: {exc}") from exc
        spec = ManifoldSpec(d, m, RationalBox.from_intervals(intervals), tuple(comps))
    point = tuple(_exact(v, "point") for v in raw["point"]) if raw.get("point") is not None else None
    a = tuple(_exact(v, "a") for v in raw["a"]) if raw.get("a") is not None else None
    return ProblemInstance(weights, spec, point, a)


def load_config(path: str | Path) -> ProblemInstance:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def dump_config(inst: ProblemInstance) -> dict[str, Any]:
    w = inst.weights
    out: dict[str, Any] = {"d": w.d, "m": w.m, "tau": [format_fraction(t) for t in w.taus]}
    if inst.spec is not None:
        out["domain"] = [[format_fraction(lo), format_fraction(hi)] for lo, hi in inst.spec.domain.intervals()]
        out["components"] = [
            [[format_fraction(c), list(e)] for e, c in f.terms.items()] for f in inst.spec.components
        ]
    if inst.point is not None:
        out["point"] = [format_fraction(v) for v in inst.point]
    if inst.a is not None:
        out["a"] = [format_fraction(v) for v in inst.a]
    return out


def parse_rational_list(text: str) -> list[Fraction]:
    """Comma-separated exact rationals, e.g. ``"8/5,6/5"``."""
    try:
        return [to_fraction(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def encode(value) -> Any:
    """JSON-ready form: every rational becomes ``{"exact": "p/q", "approximate": "..."}``."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (Fraction, PowerProduct)):
        exact = format_fraction(value) if isinstance(value, Fraction) else str(value)
        return {"exact": exact, "approximate": approx(value)}
    if isinstance(value, int):
        return value
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__}")


def make_report(command: str, config: Optional[dict], results: dict, provenance: list[str]) -> dict:
    return {
        "tool": "weightdim",
        "version": __version__,
        "command": command,
        "config": config,
        "results": encode(results),
        "provenance": provenance,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"
