"""Run-configuration parsing and formatting.

The format is line-oriented: ``[section]`` headers followed by
``key = value`` entries, where a value is a number, a bare word, an array
``[v, ...]`` or an inline table ``{ k = v, ... }``. Repeated keys are how
collections are written (one ``atom = {...}`` per measure atom, one
``bump = {...}`` per field bump). ``#`` starts a comment. Complex numbers
are written as tables {re, im}. Decimal round-tripping is exact because
floats are formatted with repr.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyson import PropagatorQuery, QuadratureSpec
from .errors import ConfigError
from .field import GaussianBump, TestFunction
from .freeprop import SpacetimePair
from .measure import ExponentialMeasure

__all__ = ["RunConfig", "parse_config", "load_config", "format_config",
           "measure_to_config", "field_to_config"]


@dataclass(frozen=True)
class RunConfig:
    measure: ExponentialMeasure
    theta: TestFunction
    x: np.ndarray
    x0: np.ndarray
    t: float
    t0: float
    g: complex
    hbar: float
    mass: float
    quadrature: QuadratureSpec
    output_format: str
    output_path: str | None

    @property
    def dim(self) -> int:
        return self.measure.dim

    def query(self) -> PropagatorQuery:
        pair = SpacetimePair(self.x, self.x0, self.t, self.t0)
        return PropagatorQuery(pair, self.g, self.theta, self.measure,
                               self.hbar, self.mass)


class _ValueParser:
    def __init__(self, text: str, line: int):
        self.text = text
        self.pos = 0
        self.line = line

    def error(self, msg: str) -> ConfigError:
        return ConfigError(f"{msg} (at column {self.pos + 1}: {self.text!r})",
                           line=self.line)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def parse_value(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("missing value")
        ch = self.text[self.pos]
        if ch == "{":
            return self.parse_table()
        if ch == "[":
            return self.parse_array()
        return self.parse_scalar()

    def parse_table(self):
        self.pos += 1  # consume {
        out = {}
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                raise self.error("unterminated inline table")
            if self.text[self.pos] == "}":
                self.pos += 1
                return out
            key = self.parse_key()
            self.skip_ws()
            if self.pos >= len(self.text) or self.text[self.pos] != "=":
                raise self.error(f"expected '=' after key {key!r}")
            self.pos += 1
            out[key] = self.parse_value()
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1

    def parse_array(self):
        self.pos += 1  # consume [
        out = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                raise self.error("unterminated array")
            if self.text[self.pos] == "]":
                self.pos += 1
                return out
            out.append(self.parse_value())
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1

    def parse_key(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] in "_-"
        ):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a key")
        return self.text[start:self.pos]

    def parse_scalar(self):
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ",]}# \t":
            self.pos += 1
        token = self.text[start:self.pos]
        try:
            return int(token)
        except ValueError:
            pass
        try:
            return float(token)
        except ValueError:
            pass
        if token and all(c.isalnum() or c in "_-." for c in token):
            return token
        raise self.error(f"cannot parse value {token!r}")


def parse_config(text: str) -> dict:
    """Raw parse: {section: [(key, value, line), ...]}."""
    sections: dict[str, list] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", line=lineno)
            name = line[1:-1].strip()
            if not name:
                raise ConfigError("empty section name", line=lineno)
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ConfigError("entry before any [section] header", line=lineno)
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, rest = line.partition("=")
        parser = _ValueParser(rest.strip(), lineno)
        value = parser.parse_value()
        if not parser.at_end():
            raise parser.error("trailing characters after value")
        current.append((key.strip(), value, lineno))
    return sections


def _entries(section: list, key: str) -> list:
    return [(v, ln) for k, v, ln in section if k == key]


def _single(section: list, key: str, default=None, required: bool = False):
    found = _entries(section, key)
    if not found:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    return found[-1][0]


def _as_float(value, line: int, what: str) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError(f"{what} must be a number, got {value!r}", line=line)


def _as_complex(value, line: int, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, dict):
        try:
            return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        except (TypeError, ValueError):
            pass
    raise ConfigError(f"{what} must be a number or {{re, im}}", line=line)


def _as_vector(value, dim: int, line: int, what: str) -> np.ndarray:
    if isinstance(value, (int, float)):
        value = [value]
    if not isinstance(value, list) or not all(isinstance(v, (int, float)) for v in value):
        raise ConfigError(f"{what} must be a number or array", line=line)
    vec = np.asarray(value, dtype=float)
    if vec.shape != (dim,):
        raise ConfigError(f"{what} has length {vec.shape[0]}, expected {dim}",
                          line=line)
    return vec


def _build_measure(section: list) -> ExponentialMeasure:
    dim = _single(section, "dim", required=True)
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError("measure dim must be a positive integer")
    atoms = []
    for value, line in _entries(section, "atom"):
        if not isinstance(value, dict):
            raise ConfigError("atom must be an inline table", line=line)
        weight = complex(
            _as_float(value.get("re", 0.0), line, "atom re"),
            _as_float(value.get("im", 0.0), line, "atom im"),
        )
        if "alpha" not in value:
            raise ConfigError("atom needs an alpha array", line=line)
        alpha = _as_vector(value["alpha"], dim, line, "atom alpha")
        atoms.append((weight, alpha))
    return ExponentialMeasure(dim, tuple(atoms))


def _build_field(section: list | None, dim: int) -> TestFunction:
    if section is None:
        return TestFunction(dim)
    bumps = []
    for value, line in _entries(section, "bump"):
        if not isinstance(value, dict):
            raise ConfigError("bump must be an inline table", line=line)
        comp = value.get("component", 0)
        if not isinstance(comp, int):
            raise ConfigError("bump component must be an integer", line=line)
        try:
            bumps.append(GaussianBump(
                comp,
                _as_float(value.get("c", 0.0), line, "bump c"),
                _as_float(value.get("mu", 0.0), line, "bump mu"),
                _as_float(value.get("w", 1.0), line, "bump w"),
            ))
        except ValueError as exc:
            raise ConfigError(str(exc), line=line) from exc
    try:
        return TestFunction(dim, tuple(bumps))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_quadrature(section: list | None) -> QuadratureSpec:
    if section is None:
        return QuadratureSpec()
    kwargs = {}
    for key, attr in (("points", "points"), ("samples", "samples"),
                      ("seed", "seed"), ("switch_order", "switch_order"),
                      ("scramblings", "scramblings")):
        val = _single(section, key)
        if val is not None:
            if not isinstance(val, int):
                raise ConfigError(f"quadrature {key} must be an integer")
            kwargs[attr] = val
    try:
        return QuadratureSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(text: str) -> RunConfig:
    sections = parse_config(text)
    if "measure" not in sections:
        raise ConfigError("missing [measure] section")
    if "query" not in sections:
        raise ConfigError("missing [query] section")
    measure = _build_measure(sections["measure"])
    query = sections["query"]
    dim = _single(query, "dim", default=measure.dim)
    if dim != measure.dim:
        raise ConfigError(f"query dim {dim} != measure dim {measure.dim}")
    theta = _build_field(sections.get("field"), measure.dim)

    def fval(key, default=None, required=False):
        found = _entries(query, key)
        if not found:
            if required:
                raise ConfigError(f"missing query key {key!r}")
            return default
        value, line = found[-1]
        return _as_float(value, line, f"query {key}")

    x_found = _entries(query, "x")
    if not x_found:
        raise ConfigError("missing query key 'x'")
    x = _as_vector(x_found[-1][0], measure.dim, x_found[-1][1], "query x")
    x0_found = _entries(query, "x0")
    if not x0_found:
        raise ConfigError("missing query key 'x0'")
    x0 = _as_vector(x0_found[-1][0], measure.dim, x0_found[-1][1], "query x0")
    t = fval("t", required=True)
    t0 = fval("t0", default=0.0)
    g_found = _entries(query, "g")
    g = _as_complex(g_found[-1][0], g_found[-1][1], "query g") if g_found else 0j
    hbar = fval("hbar", default=1.0)
    mass = fval("mass", default=1.0)
    if not t0 < t:
        raise ConfigError("query requires t0 < t")

    out = sections.get("output")
    fmt = _single(out, "format", default="json") if out else "json"
    if fmt not in ("json", "csv"):
        raise ConfigError(f"output format must be json or csv, got {fmt!r}")
    path = _single(out, "path") if out else None
    return RunConfig(
        measure=measure, theta=theta, x=x, x0=x0, t=t, t0=t0, g=g,
        hbar=hbar, mass=mass, quadrature=_build_quadrature(sections.get("quadrature")),
        output_format=fmt, output_path=str(path) if path is not None else None,
    )


def measure_to_config(m: ExponentialMeasure) -> str:
    lines = ["[measure]", f"dim = {m.dim}"]
    for w, alpha in m.atoms:
        avals = ", ".join(repr(float(v)) for v in alpha)
        lines.append(
            f"atom = {{ re = {w.real!r}, im = {w.imag!r}, alpha = [{avals}] }}"
        )
    return "\n".join(lines) + "\n"


def field_to_config(theta: TestFunction) -> str:
    lines = ["[field]"]
    for b in theta.bumps:
        lines.append(
            f"bump = {{ component = {b.component}, c = {b.c!r},"
            f" mu = {b.mu!r}, w = {b.w!r} }}"
        )
    return "\n".join(lines) + "\n"


def format_config(cfg: RunConfig) -> str:
    parts = [measure_to_config(cfg.measure)]
    if cfg.theta.bumps:
        parts.append(field_to_config(cfg.theta))
    xs = ", ".join(repr(float(v)) for v in cfg.x)
    x0s = ", ".join(repr(float(v)) for v in cfg.x0)
    parts.append(
        "[query]\n"
        f"dim = {cfg.dim}\n"
        f"x = [{xs}]\n"
        f"x0 = [{x0s}]\n"
        f"t = {cfg.t!r}\n"
        f"t0 = {cfg.t0!r}\n"
        f"g = {{ re = {cfg.g.real!r}, im = {cfg.g.imag!r} }}\n"
        f"hbar = {cfg.hbar!r}\n"
        f"mass = {cfg.mass!r}\n"
    )
    q = cfg.quadrature
    parts.append(
        "[quadrature]\n"
        f"points = {q.points}\n"
        f"samples = {q.samples}\n"
        f"seed = {q.seed}\n"
        f"switch_order = {q.switch_order}\n"
        f"scramblings = {q.scramblings}\n"
    )
    out = f"[output]\nformat = {cfg.output_format}\n"
    if cfg.output_path:
        out += f"path = {cfg.output_path}\n"
    parts.append(out)
    return "\n".join(parts)
