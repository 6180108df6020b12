"""JSON run configuration shared by the command-line tools.

A configuration holds a model block, an optional schedule block, the regime
assertion, a seed, the abort depth and the output format::

    {
      "model": {"kind": "binary_ar", "theta0": 0.0, "theta": [0.3],
                "tail": null, "link": "linear", "k0": null, "k_enum": 16},
      "schedule": null,
      "regime": "beta-positive",
      "seed": 7,
      "max_depth": 100000,
      "format": "jsonl"
    }

Model kinds are ``binary_ar``, ``finite_order`` (``alphabet``, ``order``,
``table``), ``iid`` (``alphabet``, ``probabilities``) and ``dary`` (an
``iid`` or ``finite_order`` digit model over ``0..base-1`` with the extra
keys ``base`` and ``resolution``). Schedule kinds are ``constant``
(``value``), ``geometric`` (``ratio``, ``scale``), ``power`` (``exponent``,
``scale``), ``explicit`` (``values``) and ``degenerate`` (``prefix``). A
schedule block replaces the model's own schedule and must stay below it.
"""

import json
import math
from dataclasses import dataclass, field, replace

import jsonschema
import numpy as np

from .core import ThresholdSchedule
from .errors import ConfigError
from .models import BinaryARSpec, FiniteOrderSpec, GeometricTail, PowerTail

__all__ = ["RunConfig", "CONFIG_SCHEMA", "REGIMES", "parse_config", "load_config", "dump_config"]

REGIMES = ("sum-beta-diverges", "beta-positive", "unasserted")
FORMATS = ("jsonl", "csv")
DEFAULT_MAX_DEPTH = 100_000

_number = {"type": "number"}
_count = {"type": "integer", "minimum": 0}

_TAIL = {
    "type": ["object", "null"],
    "properties": {
        "kind": {"enum": ["power", "geometric"]},
        "scale": _number,
        "exponent": _number,
        "ratio": _number,
        "start": {"type": "integer", "minimum": 1},
    },
    "required": ["kind", "scale", "start"],
    "additionalProperties": False,
}

_MODEL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["binary_ar", "finite_order", "iid", "dary"]},
        "theta0": _number,
        "theta": {"type": "array", "items": _number},
        "tail": _TAIL,
        "link": {"enum": ["linear", "logistic"]},
        "k0": {"type": ["integer", "null"], "minimum": 0},
        "k_enum": _count,
        "alphabet": {"type": "array", "minItems": 1},
        "order": _count,
        "table": {"type": "array", "items": {"type": "array", "items": _number}},
        "probabilities": {"type": "array", "items": _number},
        "base": {"type": "integer", "minimum": 2},
        "resolution": _count,
        "digits": {"enum": ["iid", "finite_order"]},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_SCHEDULE = {
    "type": ["object", "null"],
    "properties": {
        "kind": {"enum": ["constant", "geometric", "power", "explicit", "degenerate"]},
        "value": _number,
        "ratio": _number,
        "scale": _number,
        "exponent": _number,
        "values": {"type": "array", "items": _number},
        "prefix": {"type": "array", "items": _number},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "regensim run configuration",
    "type": "object",
    "properties": {
        "model": {"anyOf": [_MODEL, {"type": "null"}]},
        "schedule": _SCHEDULE,
        "regime": {"enum": list(REGIMES)},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "max_depth": {"type": "integer", "minimum": 1},
        "format": {"enum": list(FORMATS)},
    },
    "additionalProperties": False,
}

_MODEL_DEFAULTS = {
    "binary_ar": {"theta0": 0.0, "theta": [], "tail": None, "link": "linear", "k0": None, "k_enum": 16},
    "finite_order": {},
    "iid": {},
    "dary": {"resolution": 8},
}
_MODEL_REQUIRED = {
    "binary_ar": (),
    "finite_order": ("alphabet", "order", "table"),
    "iid": ("alphabet", "probabilities"),
    "dary": ("base",),
}
_SCHEDULE_FIELDS = {
    "constant": {"value": None},
    "geometric": {"ratio": 0.5, "scale": 1.0},
    "power": {"exponent": 2.0, "scale": 0.5},
    "explicit": {"values": None},
    "degenerate": {"prefix": []},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated, normalised configuration.

    Every optional key is filled in, so ``dump_config`` followed by
    ``parse_config`` returns an equal object.
    """

    model: dict = None
    schedule: dict = None
    regime: str = "unasserted"
    seed: int = None
    max_depth: int = DEFAULT_MAX_DEPTH
    format: str = "jsonl"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def with_overrides(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        if "max_depth" in changes and changes["max_depth"] < 1:
            raise ConfigError("max_depth must be >= 1")
        return replace(self, _cache={}, **changes)

    def kernel(self):
        """The specification kernel described by the model block."""
        if "kernel" not in self._cache:
            if self.model is None:
                raise ConfigError("configuration has no model block")
            self._cache["kernel"] = _build_kernel(self.model)
        return self._cache["kernel"]

    def schedule_object(self):
        """The threshold schedule in force: explicit block or the model's own."""
        if "schedule" not in self._cache:
            if self.schedule is not None:
                sched = _build_schedule(self.schedule)
                if self.model is not None:
                    _check_below(sched, self.kernel().schedule())
            elif self.model is not None:
                sched = self.kernel().schedule()
            else:
                raise ConfigError("configuration needs a model or a schedule block")
            self._cache["schedule"] = sched
        return self._cache["schedule"]


def _check_below(lower, upper, n=256):
    for sched in (lower, upper):
        if sched.queryable_length is not None:
            n = min(n, sched.queryable_length)
    a = lower.values(n)
    b = upper.values(n)
    if np.any(a > b + 1e-15):
        k = int(np.argmax(a > b + 1e-15))
        raise ConfigError(
            f"schedule block exceeds the model's thresholds at k={k}: {a[k]!r} > {b[k]!r}"
        )


def _build_kernel(model):
    kind = model["kind"]
    try:
        if kind == "binary_ar":
            tail = model["tail"]
            if tail is not None:
                if tail["kind"] == "power":
                    tail = PowerTail(tail["scale"], tail["exponent"], tail["start"])
                else:
                    tail = GeometricTail(tail["scale"], tail["ratio"], tail["start"])
            return BinaryARSpec(
                model["theta0"], model["theta"], tail, model["link"], model["k0"], model["k_enum"]
            )
        if kind == "finite_order":
            return FiniteOrderSpec(model["alphabet"], model["order"], model["table"])
        if kind == "iid":
            return FiniteOrderSpec(model["alphabet"], 0, [model["probabilities"]])
        # dary: digit model over 0..base-1
        alphabet = list(range(model["base"]))
        if model["digits"] == "iid":
            probs = model.get("probabilities") or [1.0 / model["base"]] * model["base"]
            return FiniteOrderSpec(alphabet, 0, [probs])
        return FiniteOrderSpec(alphabet, model["order"], model["table"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid {kind} model: {exc}") from exc


def _build_schedule(block):
    kind = block["kind"]
    try:
        if kind == "constant":
            return ThresholdSchedule.constant(block["value"])
        if kind == "geometric":
            return ThresholdSchedule.geometric(block["ratio"], block["scale"])
        if kind == "power":
            return ThresholdSchedule.power(block["exponent"], block["scale"])
        if kind == "explicit":
            return ThresholdSchedule.explicit(block["values"])
        return ThresholdSchedule.degenerate(block["prefix"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid {kind} schedule: {exc}") from exc


def _normalise_model(model):
    kind = model["kind"]
    out = dict(_MODEL_DEFAULTS[kind])
    out.update(model)
    missing = [k for k in _MODEL_REQUIRED[kind] if k not in out]
    if missing:
        raise ConfigError(f"{kind} model is missing {', '.join(missing)}")
    if kind == "binary_ar":
        out["theta0"] = float(out["theta0"])
        out["theta"] = [float(x) for x in out["theta"]]
        tail = out["tail"]
        if tail is not None:
            need = "exponent" if tail["kind"] == "power" else "ratio"
            if need not in tail:
                raise ConfigError(f"{tail['kind']} tail needs '{need}'")
            out["tail"] = {"kind": tail["kind"], "scale": float(tail["scale"]),
                           need: float(tail[need]), "start": int(tail["start"])}
    elif kind == "dary":
        out.setdefault("digits", "finite_order" if "table" in out else "iid")
        if out["digits"] == "finite_order" and not {"order", "table"} <= set(out):
            raise ConfigError("finite_order digit model needs 'order' and 'table'")
    return out


def _normalise_schedule(block):
    kind = block["kind"]
    out = {"kind": kind}
    for key, default in _SCHEDULE_FIELDS[kind].items():
        value = block.get(key, default)
        if value is None:
            raise ConfigError(f"{kind} schedule needs '{key}'")
        out[key] = [float(x) for x in value] if isinstance(value, list) else float(value)
    extra = set(block) - set(out)
    if extra:
        raise ConfigError(f"{kind} schedule does not take {', '.join(sorted(extra))}")
    return out


def parse_config(data):
    """Validate a decoded JSON object and return a :class:`RunConfig`.

    Raises
    ------
    ConfigError
        On schema violations or inconsistent blocks.
    """
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc
    model = data.get("model")
    schedule = data.get("schedule")
    if model is None and schedule is None:
        raise ConfigError("configuration needs a model or a schedule block")
    cfg = RunConfig(
        model=_normalise_model(model) if model is not None else None,
        schedule=_normalise_schedule(schedule) if schedule is not None else None,
        regime=data.get("regime", "unasserted"),
        seed=data.get("seed"),
        max_depth=data.get("max_depth", DEFAULT_MAX_DEPTH),
        format=data.get("format", "jsonl"),
    )
    # build eagerly so errors surface at load time
    if cfg.model is not None:
        cfg.kernel()
    cfg.schedule_object()
    return cfg


def load_config(path):
    """Read and parse a JSON configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def dump_config(cfg):
    """Canonical JSON text for ``cfg`` (sorted keys, two-space indent)."""
    data = {
        "model": cfg.model,
        "schedule": cfg.schedule,
        "regime": cfg.regime,
        "seed": cfg.seed,
        "max_depth": cfg.max_depth,
        "format": cfg.format,
    }
    _reject_nonfinite(data)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _reject_nonfinite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ConfigError("configuration contains a non-finite number")
    if isinstance(obj, dict):
        for v in obj.values():
            _reject_nonfinite(v)
    elif isinstance(obj, list):
        for v in obj:
            _reject_nonfinite(v)
