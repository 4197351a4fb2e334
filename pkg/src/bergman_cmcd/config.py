"""Run configuration: a single JSON document with numbers given as decimal strings.

Example::

    {
      "domain": [{"cx": "0.4", "cy": "0", "r": "0.2"}],
      "degrees": [20, 30, 40],
      "precision_bits": 256,
      "family": {"max_len": 14, "prune_tol": "1e-30", "cap": 250000},
      "contour": {"radius": "auto", "M_init": 256, "M_max": 4096},
      "expansion": {"K": 3},
      "outputs": {"directory": "out", "formats": ["csv"]}
    }

Only ``domain`` and ``degrees`` are required.  Decimal strings are kept
verbatim so that serializing a parsed config gives back the same text.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from .errors import ConfigError
from .geometry import CircularDomain, validate

DEFAULTS = {
    "precision_bits": 256,
    "family": {"max_len": 14, "prune_tol": "1e-30", "cap": 250000},
    "contour": {"radius": "auto", "M_init": 256, "M_max": 4096},
    "expansion": {"K": 3},
    "outputs": {"directory": "out", "formats": ["csv"]},
}
_TOP = {"domain", "degrees", *DEFAULTS}
_FORMATS = {"csv", "svg"}


def _decimal(value, where: str) -> str:
    """Normalize a number or decimal string to a canonical decimal string."""
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise ConfigError(f"{where}: expected a number or decimal string")
    try:
        d = Decimal(value if isinstance(value, str) else repr(value))
    except InvalidOperation:
        raise ConfigError(f"{where}: {value!r} is not a decimal number") from None
    if not d.is_finite():
        raise ConfigError(f"{where}: must be finite")
    return value if isinstance(value, str) else repr(value)


def _int(value, where: str, lo: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < lo:
        raise ConfigError(f"{where}: expected an integer >= {lo}")
    return value


def _section(doc: dict, name: str) -> dict:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    extra = set(raw) - set(DEFAULTS[name])
    if extra:
        raise ConfigError(f"{name}: unknown keys {sorted(extra)}")
    out = copy.deepcopy(DEFAULTS[name])
    out.update(raw)
    return out


@dataclass(frozen=True)
class DiskSpec:
    cx: str
    cy: str
    r: str

    @property
    def center(self) -> complex:
        return complex(float(Decimal(self.cx)), float(Decimal(self.cy)))

    @property
    def radius(self) -> float:
        return float(Decimal(self.r))


@dataclass
class RunConfig:
    domain: list[DiskSpec]
    degrees: list[int]
    precision_bits: int = 256
    family: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["family"]))
    contour: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["contour"]))
    expansion: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["expansion"]))
    outputs: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["outputs"]))

    @classmethod
    def from_dict(cls, doc) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(doc) - _TOP
        if extra:
            raise ConfigError(f"unknown keys {sorted(extra)}")
        for key in ("domain", "degrees"):
            if key not in doc:
                raise ConfigError(f"missing required key {key!r}")
        disks = doc["domain"]
        if not isinstance(disks, list) or not disks:
            raise ConfigError("domain: expected a non-empty list of disks")
        specs = []
        for i, d in enumerate(disks, 1):
            if not isinstance(d, dict) or set(d) != {"cx", "cy", "r"}:
                raise ConfigError(f"domain[{i}]: expected exactly the keys cx, cy, r")
            specs.append(DiskSpec(*(_decimal(d[k], f"domain[{i}].{k}") for k in ("cx", "cy", "r"))))
        degrees = doc["degrees"]
        if not isinstance(degrees, list) or not degrees:
            raise ConfigError("degrees: expected a non-empty list")
        degrees = [_int(n, "degrees", 1) for n in degrees]

        family = _section(doc, "family")
        _int(family["max_len"], "family.max_len")
        _int(family["cap"], "family.cap", 1)
        family["prune_tol"] = _decimal(family["prune_tol"], "family.prune_tol")
        contour = _section(doc, "contour")
        if contour["radius"] != "auto":
            contour["radius"] = _decimal(contour["radius"], "contour.radius")
        _int(contour["M_init"], "contour.M_init", 8)
        _int(contour["M_max"], "contour.M_max", 8)
        expansion = _section(doc, "expansion")
        _int(expansion["K"], "expansion.K", 1)
        outputs = _section(doc, "outputs")
        if not isinstance(outputs["directory"], str):
            raise ConfigError("outputs.directory: expected a string")
        fmts = outputs["formats"]
        if not isinstance(fmts, list) or not set(fmts) <= _FORMATS:
            raise ConfigError(f"outputs.formats: expected a subset of {sorted(_FORMATS)}")
        bits = _int(doc.get("precision_bits", DEFAULTS["precision_bits"]), "precision_bits", 53)
        return cls(specs, degrees, bits, family, contour, expansion, outputs)

    def to_dict(self) -> dict:
        return {
            "domain": [{"cx": d.cx, "cy": d.cy, "r": d.r} for d in self.domain],
            "degrees": list(self.degrees),
            "precision_bits": self.precision_bits,
            "family": dict(self.family),
            "contour": dict(self.contour),
            "expansion": dict(self.expansion),
            "outputs": {"directory": self.outputs["directory"], "formats": list(self.outputs["formats"])},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def hash(self) -> str:
        """First 16 hex digits of the SHA-256 of the canonical serialization."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def build_domain(self) -> CircularDomain:
        return validate([(d.center, d.radius) for d in self.domain])

    @property
    def prune_tol(self) -> float:
        return float(Decimal(self.family["prune_tol"]))

    @property
    def contour_radius(self) -> float | None:
        r = self.contour["radius"]
        return None if r == "auto" else float(Decimal(r))


def loads(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON: {e}") from None
    return RunConfig.from_dict(doc)


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    return loads(text)
