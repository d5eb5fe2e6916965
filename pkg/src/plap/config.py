"""Run-configuration parsing (JSON) and validation.

A config names the domain, exponents, weights, the mode and its parameters:

    {
      "domain": {"kind": "interval", "bounds": [0, 1], "resolution": 256},
      "p": 2.0, "q": 1.5,
      "weights": {"m": 1.0, "a": "1 - x", "f": {"kind": "nodal", "path": "f.json"}},
      "mode": "sweep",
      "mode_params": {"lam_grid": [...], "eta_grid": [...]},
      "seed": 12345,
      "output": {"dir": ".", "csv": "sweep.csv", "report": "report.json"}
    }

Weights may be numbers (constants), strings (expressions over x, y), or
objects: {"kind": "nodal", "values": [...]} / {"kind": "nodal", "path": ...}
(a JSON file holding the value list) / {"kind": "constant", "value": c} /
{"kind": "expression", "src": ...}; an optional "gamma" key carries the
integrability exponent as metadata.  Every error names the offending field
path.  Defaults are filled in and echoed back through the report for
reproducibility.  Seeds default to a fixed constant so bare runs reproduce.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import InvalidConfig, ParseError
from .expr import parse_expr
from .functions import Weight
from .mesh import build_interval, build_rectangle

__all__ = ["RunConfig", "parse_config", "build_mesh", "MODES", "DEFAULT_SEED"]

MODES = ("eigen", "solve", "sweep", "critval", "picone-check", "nonuniformity")
DEFAULT_SEED = 12345


@dataclass
class RunConfig:
    domain: dict
    p: float
    q: float
    weights: dict  # name -> Weight
    mode: str
    mode_params: dict
    seed: int
    output: dict
    echo: dict = field(default_factory=dict)


def _fail(path, reason):
    raise InvalidConfig(f"{path}: {reason}")


def _require_number(obj, path, low=None, high=None):
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        _fail(path, f"expected a number, got {type(obj).__name__}")
    val = float(obj)
    if low is not None and val < low:
        _fail(path, f"must be >= {low}, got {val}")
    if high is not None and val > high:
        _fail(path, f"must be <= {high}, got {val}")
    return val


def _require_int(obj, path, low=None):
    if isinstance(obj, bool) or not isinstance(obj, int):
        _fail(path, f"expected an integer, got {type(obj).__name__}")
    if low is not None and obj < low:
        _fail(path, f"must be >= {low}, got {obj}")
    return obj


def _parse_domain(raw, path):
    if not isinstance(raw, dict):
        _fail(path, "expected an object")
    kind = raw.get("kind")
    if kind not in ("interval", "rectangle"):
        _fail(f"{path}.kind", f"expected 'interval' or 'rectangle', got {kind!r}")
    bounds = raw.get("bounds")
    if kind == "interval":
        if not (isinstance(bounds, list) and len(bounds) == 2):
            _fail(f"{path}.bounds", "interval needs [x0, x1]")
        x0 = _require_number(bounds[0], f"{path}.bounds[0]")
        x1 = _require_number(bounds[1], f"{path}.bounds[1]")
        if x1 <= x0:
            _fail(f"{path}.bounds", f"x1 must exceed x0, got [{x0}, {x1}]")
        res = _require_int(raw.get("resolution", 256), f"{path}.resolution", low=2)
        return {"kind": kind, "bounds": [x0, x1], "resolution": res}
    if not (isinstance(bounds, list) and len(bounds) == 4):
        _fail(f"{path}.bounds", "rectangle needs [x0, x1, y0, y1]")
    vals = [_require_number(b, f"{path}.bounds[{i}]") for i, b in enumerate(bounds)]
    if vals[1] <= vals[0] or vals[3] <= vals[2]:
        _fail(f"{path}.bounds", f"degenerate rectangle {vals}")
    res = raw.get("resolution", [16, 16])
    if isinstance(res, int):
        res = [res, res]
    if not (isinstance(res, list) and len(res) == 2):
        _fail(f"{path}.resolution", "rectangle needs [nx, ny] or a single integer")
    nx = _require_int(res[0], f"{path}.resolution[0]", low=2)
    ny = _require_int(res[1], f"{path}.resolution[1]", low=2)
    return {"kind": kind, "bounds": vals, "resolution": [nx, ny]}


def _parse_weight(raw, path, base_dir):
    gamma = None
    if isinstance(raw, dict) and "gamma" in raw:
        gamma = _require_number(raw["gamma"], f"{path}.gamma", low=1.0)
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return Weight.constant(float(raw), gamma)
    if isinstance(raw, str):
        try:
            return Weight("expression", parse_expr(raw), gamma)
        except ParseError as exc:
            _fail(path, f"bad expression: {exc}")
    if isinstance(raw, dict):
        kind = raw.get("kind")
        if kind == "constant":
            return Weight.constant(_require_number(raw.get("value"), f"{path}.value"), gamma)
        if kind == "expression":
            src = raw.get("src")
            if not isinstance(src, str):
                _fail(f"{path}.src", "expected an expression string")
            try:
                return Weight("expression", parse_expr(src), gamma)
            except ParseError as exc:
                _fail(f"{path}.src", f"bad expression: {exc}")
        if kind == "nodal":
            if "path" in raw:
                file_path = os.path.join(base_dir, raw["path"])
                if not os.path.exists(file_path):
                    _fail(f"{path}.path", f"referenced file {file_path!r} does not exist")
                try:
                    with open(file_path, "r", encoding="utf-8") as handle:
                        values = json.load(handle)
                except (OSError, json.JSONDecodeError) as exc:
                    _fail(f"{path}.path", f"could not read nodal values: {exc}")
            else:
                values = raw.get("values")
            if not isinstance(values, list) or not values:
                _fail(f"{path}.values", "expected a nonempty list of numbers")
            vals = [_require_number(v, f"{path}.values[{i}]") for i, v in enumerate(values)]
            return Weight.nodal(vals, gamma)
        _fail(f"{path}.kind", f"expected 'constant', 'expression' or 'nodal', got {kind!r}")
    _fail(path, f"expected a number, expression string or weight object, got {type(raw).__name__}")


def parse_config(text, base_dir="."):
    """Parse and validate a JSON run configuration.

    Raises InvalidConfig with the field path and reason for every violated
    invariant.  Returns a RunConfig whose echo field holds the fully
    defaulted configuration.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc.msg}", exc.pos)
    if not isinstance(raw, dict):
        _fail("<root>", "top level must be an object")
    for key in ("domain", "p", "q", "weights", "mode"):
        if key not in raw:
            _fail(key, "missing required field")

    domain = _parse_domain(raw["domain"], "domain")
    p = _require_number(raw["p"], "p")
    if p <= 1.0:
        _fail("p", f"must exceed 1, got {p}")
    q = _require_number(raw["q"], "q")
    if not 1.0 < q < p:
        _fail("q", f"must satisfy 1 < q < p = {p}, got {q}")

    weights_raw = raw["weights"]
    if not isinstance(weights_raw, dict):
        _fail("weights", "expected an object with keys m, a, f")
    if "m" not in weights_raw:
        _fail("weights.m", "missing weight")
    weights = {}
    for name in ("m", "a", "f"):
        # a and f default to zero (the unperturbed, source-free problem)
        spec = weights_raw.get(name, 0.0)
        weights[name] = _parse_weight(spec, f"weights.{name}", base_dir)

    mode = raw["mode"]
    if mode not in MODES:
        _fail("mode", f"expected one of {MODES}, got {mode!r}")
    mode_params = raw.get("mode_params", {})
    if not isinstance(mode_params, dict):
        _fail("mode_params", "expected an object")
    seed = raw.get("seed", DEFAULT_SEED)
    seed = _require_int(seed, "seed", low=0)
    output = raw.get("output", {})
    if not isinstance(output, dict):
        _fail("output", "expected an object")
    output = {
        "dir": output.get("dir", "."),
        "csv": output.get("csv", "sweep.csv"),
        "report": output.get("report", f"{mode.replace('-', '_')}_report.json"),
    }

    echo = {
        "domain": domain,
        "p": p,
        "q": q,
        "weights": {name: weights_raw.get(name, 0.0) for name in ("m", "a", "f")},
        "mode": mode,
        "mode_params": mode_params,
        "seed": seed,
        "output": output,
    }
    return RunConfig(
        domain=domain,
        p=p,
        q=q,
        weights=weights,
        mode=mode,
        mode_params=mode_params,
        seed=seed,
        output=output,
        echo=echo,
    )


def build_mesh(config):
    """Construct the Mesh named by a RunConfig's domain block."""
    dom = config.domain
    if dom["kind"] == "interval":
        x0, x1 = dom["bounds"]
        return build_interval(x0, x1, dom["resolution"])
    x0, x1, y0, y1 = dom["bounds"]
    nx, ny = dom["resolution"]
    return build_rectangle(x0, x1, y0, y1, nx, ny)
