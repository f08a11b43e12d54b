"""YAML run configuration: strict parsing, normalisation and round-trip.

``parse_config`` fills defaults and returns a :class:`RunConfig` whose
``data`` is the canonical document; ``dump_config`` writes it back so that
``parse_config(dump_config(rc)) == rc``.
"""

import copy
import math
from dataclasses import dataclass
from importlib import resources

import yaml

from .conductivity import (
    CoefficientVector,
    ExponentProfile,
    ForchheimerLaw,
    Interpolated,
    Multiplicative,
    Piecewise,
    Rational,
)
from .errors import ConfigError, MixedFlowError
from .experiments import INITIAL_KINDS
from .solver import SPACE_KINDS, TIME_KINDS, BoundaryProfile, Grid, SolverConfig, Term

MODEL_KEYS = {
    "interpolated": {"kind", "alpha", "forchheimer_exponents", "coefficients", "perturbed_coefficients"},
    "piecewise": {"kind", "alpha", "s1", "s2", "forchheimer"},
    "rational": {"kind", "a", "b", "c", "beta1", "beta2"},
    "multiplicative": {"kind", "alpha", "forchheimer", "m1"},
}
DERIVED_ONLY = {"c1", "c2", "Z1", "Z2", "M1", "M2", "beta1", "beta2", "xi0", "kbar"}
SOLVER_DEFAULTS = SolverConfig().to_dict()
EXPERIMENT_KINDS = ("none", "energy_decay", "gradient_decay", "uniform_gronwall", "continuous_dependence", "structural_stability")
EXPERIMENT_DEFAULTS = {
    "kind": "none",
    "T": 20.0,
    "tol": None,
    "psi_factor": None,
    "ladder": [1e-1, 1e-2, 1e-3, 1e-4],
    "t_start": 1.0,
    "t_eval": 2.0,
    "factors": [1.0, 10.0, 100.0],
    "teeth": 32,
    "max_ratio": 2.0,
    "bump": None,
    "direction": None,
    "workers": 1,
}
VERIFY_DEFAULTS = {"n_grid": 200, "n_pairs": 100000, "n_adversarial": 1000, "d5_scale": 1.0}
OUTPUT_DEFAULTS = {"snapshots": False}
TOP_KEYS = {"model", "grid", "boundary", "initial", "solver", "experiment", "verify", "output"}


# --------------------------------------------------------------------------
# primitive validators
# --------------------------------------------------------------------------


def _mapping(value, path):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected a mapping, got {type(value).__name__}")
    return value


def _no_unknown(d, allowed, path):
    for k in d:
        if k not in allowed:
            where = f"{path}.{k}" if path else str(k)
            raise ConfigError(where, f"unknown key (allowed: {', '.join(sorted(allowed))})")


def _num(value, path, positive=False, nonneg=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    v = int(value) if integer else float(value)
    if integer and v != value:
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if positive and v <= 0:
        raise ConfigError(path, f"must be > 0, got {value!r}")
    if nonneg and v < 0:
        raise ConfigError(path, f"must be >= 0, got {value!r}")
    return v


def _numlist(value, path, **kw):
    if not isinstance(value, (list, tuple)) or len(value) == 0:
        raise ConfigError(path, f"expected a nonempty list of numbers, got {value!r}")
    return [_num(v, f"{path}[{i}]", **kw) for i, v in enumerate(value)]


def _require(d, key, path):
    if key not in d:
        raise ConfigError(f"{path}.{key}", "required")
    return d[key]


def _wrap(path, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (MixedFlowError, ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None


# --------------------------------------------------------------------------
# sections
# --------------------------------------------------------------------------


def _forchheimer(d, path):
    d = _mapping(d, path)
    _no_unknown(d, {"coefficients", "exponents"}, path)
    c = _numlist(_require(d, "coefficients", path), f"{path}.coefficients", nonneg=True)
    e = _numlist(_require(d, "exponents", path), f"{path}.exponents", positive=True)
    for i, idx in ((0, 0), (len(c) - 1, -1)):
        if c[idx] <= 0:
            raise ConfigError(f"{path}.coefficients[{i}]", "must be > 0 (a_0 and a_N are positive)")
    law = _wrap(path, ForchheimerLaw, tuple(c), tuple(e))
    return {"coefficients": c, "exponents": e}, law


def _model(d):
    path = "model"
    d = _mapping(d, path)
    kind = _require(d, "kind", path)
    if kind not in MODEL_KEYS:
        raise ConfigError(f"{path}.kind", f"unknown model kind {kind!r} (choose from {', '.join(MODEL_KEYS)})")
    for k in d:
        if k in DERIVED_ONLY and k not in MODEL_KEYS[kind]:
            raise ConfigError(f"{path}.{k}", "derived quantity; it cannot be supplied")
    _no_unknown(d, MODEL_KEYS[kind], path)
    out = {"kind": kind}
    second = None
    if kind == "interpolated":
        alpha = _num(_require(d, "alpha", path), f"{path}.alpha")
        ex = _numlist(_require(d, "forchheimer_exponents", path), f"{path}.forchheimer_exponents")
        profile = _wrap(f"{path}.forchheimer_exponents", ExponentProfile, alpha, tuple(ex))
        a = _coefficients(d, "coefficients", path, len(ex))
        model = _wrap(path, Interpolated, profile, CoefficientVector(tuple(a)))
        out.update(alpha=alpha, forchheimer_exponents=ex, coefficients=a)
        if d.get("perturbed_coefficients") is not None:
            a2 = _coefficients(d, "perturbed_coefficients", path, len(ex))
            second = CoefficientVector(tuple(a2))
            out["perturbed_coefficients"] = a2
    elif kind == "piecewise":
        fdict, law = _forchheimer(_require(d, "forchheimer", path), f"{path}.forchheimer")
        alpha = _num(_require(d, "alpha", path), f"{path}.alpha")
        s1 = _num(_require(d, "s1", path), f"{path}.s1", positive=True)
        s2 = _num(_require(d, "s2", path), f"{path}.s2", positive=True)
        if s2 <= s1:
            raise ConfigError(f"{path}.s2", f"must exceed s1={s1:g}")
        model = _wrap(path, Piecewise, alpha, s1, s2, law)
        out.update(alpha=alpha, s1=s1, s2=s2, forchheimer=fdict)
    elif kind == "rational":
        vals = {k: _num(_require(d, k, path), f"{path}.{k}", positive=True) for k in ("a", "b", "c", "beta1", "beta2")}
        if vals["beta2"] >= 1:
            raise ConfigError(f"{path}.beta2", "must lie in (0, 1)")
        model = _wrap(path, Rational, vals["a"], vals["b"], vals["c"], vals["beta1"], vals["beta2"])
        out.update(vals)
    else:
        fdict, law = _forchheimer(_require(d, "forchheimer", path), f"{path}.forchheimer")
        alpha = _num(_require(d, "alpha", path), f"{path}.alpha")
        m1 = _num(_require(d, "m1", path), f"{path}.m1", positive=True)
        model = _wrap(path, Multiplicative, alpha, law, m1)
        out.update(alpha=alpha, forchheimer=fdict, m1=m1)
    return out, model, second


def _coefficients(d, key, path, n_exp):
    p = f"{path}.{key}"
    a = _numlist(_require(d, key, path), p)
    if len(a) != n_exp + 2:
        raise ConfigError(p, f"needs {n_exp + 2} entries (a_-1, a_0, ..., a_N), got {len(a)}")
    if a[0] <= 0:
        raise ConfigError(f"{p}[0]", f"a_-1 must be > 0, got {a[0]:g}")
    if a[-1] <= 0:
        raise ConfigError(f"{p}[{len(a) - 1}]", f"a_N must be > 0, got {a[-1]:g}")
    for i in range(1, len(a) - 1):
        if a[i] < 0:
            raise ConfigError(f"{p}[{i}]", f"must be >= 0, got {a[i]:g}")
    return a


def _grid(d):
    path = "grid"
    d = _mapping(d, path)
    if not d:
        raise ConfigError(path, "grid is empty; give extents and cells")
    _no_unknown(d, {"extents", "cells"}, path)
    ext = _numlist(_require(d, "extents", path), f"{path}.extents", positive=True)
    cells = _numlist(_require(d, "cells", path), f"{path}.cells", positive=True, integer=True)
    if len(ext) != len(cells):
        raise ConfigError(f"{path}.cells", "needs one entry per extent")
    if len(cells) not in (1, 2):
        raise ConfigError(f"{path}.cells", "only 1-D and 2-D grids are supported")
    for i, c in enumerate(cells):
        if c < 4:
            raise ConfigError(f"{path}.cells[{i}]", "need at least 4 cells per axis")
    return {"extents": ext, "cells": cells}, Grid(tuple(ext), tuple(cells))


def _term(d, path):
    d = _mapping(d, path)
    _no_unknown(d, {"amplitude", "space", "space_params", "time", "time_params"}, path)
    space = d.get("space", "affine")
    time = d.get("time", "constant")
    if space not in SPACE_KINDS:
        raise ConfigError(f"{path}.space", f"unknown space factor {space!r}")
    if time not in TIME_KINDS:
        raise ConfigError(f"{path}.time", f"unknown time factor {time!r}")
    sp = dict(_mapping(d.get("space_params"), f"{path}.space_params"))
    tp = dict(_mapping(d.get("time_params"), f"{path}.time_params"))
    for k, v in sp.items():
        sp[k] = _numlist(v, f"{path}.space_params.{k}") if isinstance(v, (list, tuple)) else _num(v, f"{path}.space_params.{k}")
    for k, v in tp.items():
        tp[k] = _num(v, f"{path}.time_params.{k}")
    amp = _num(d.get("amplitude", 1.0), f"{path}.amplitude")
    term = _wrap(path, Term, amp, space, sp, time, tp)
    return term


def _boundary(items, dim):
    path = "boundary"
    if items is None:
        items = []
    if not isinstance(items, list):
        raise ConfigError(path, "expected a list of terms")
    terms = tuple(_term(it, f"{path}[{i}]") for i, it in enumerate(items))
    prof = BoundaryProfile(terms)
    # evaluate once so malformed vector parameters surface as config errors
    probe = Grid((1.0,) * dim, (4,) * dim)
    for i, t in enumerate(terms):
        _wrap(f"{path}[{i}]", BoundaryProfile((t,)).grad, probe.mesh(), 0.0)
    return prof.to_list(), prof


def _initial(d):
    path = "initial"
    d = _mapping(d, path)
    _no_unknown(d, {"kind", "params"}, path)
    kind = d.get("kind", "sine")
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"{path}.kind", f"unknown initial condition {kind!r} (choose from {', '.join(INITIAL_KINDS)})")
    params = dict(_mapping(d.get("params"), f"{path}.params"))
    allowed = {"sine": {"amplitude", "k"}, "profile": {"offset"}, "constant": {"value"}, "sine_plus_profile": {"amplitude", "k"}}[kind]
    _no_unknown(params, allowed, f"{path}.params")
    for k, v in params.items():
        params[k] = _num(v, f"{path}.params.{k}", integer=(k == "k"))
    return {"kind": kind, "params": params}


def _solver(d):
    path = "solver"
    d = _mapping(d, path)
    _no_unknown(d, set(SOLVER_DEFAULTS), path)
    out = dict(SOLVER_DEFAULTS)
    for k, v in d.items():
        if k == "stepper":
            out[k] = v
        elif v is None and k in ("dt", "max_dt", "relaxation"):
            out[k] = None
        else:
            out[k] = _num(v, f"{path}.{k}", positive=True, integer=(k == "picard_maxiter"))
    cfg = _wrap(path, SolverConfig, **out)
    return cfg.to_dict(), cfg


def _experiment(d):
    path = "experiment"
    d = _mapping(d, path)
    _no_unknown(d, set(EXPERIMENT_DEFAULTS), path)
    out = copy.deepcopy(EXPERIMENT_DEFAULTS)
    out.update(d)
    if out["kind"] not in EXPERIMENT_KINDS:
        raise ConfigError(f"{path}.kind", f"unknown experiment {out['kind']!r}")
    for k in ("T", "t_start", "t_eval", "max_ratio"):
        out[k] = _num(out[k], f"{path}.{k}", positive=True)
    for k in ("tol", "psi_factor"):
        if out[k] is not None:
            out[k] = _num(out[k], f"{path}.{k}", positive=True)
    out["teeth"] = _num(out["teeth"], f"{path}.teeth", positive=True, integer=True)
    out["workers"] = _num(out["workers"], f"{path}.workers", positive=True, integer=True)
    out["factors"] = _numlist(out["factors"], f"{path}.factors", positive=True)
    lad = _numlist(out["ladder"], f"{path}.ladder", positive=True)
    if any(b >= a for a, b in zip(lad, lad[1:])):
        raise ConfigError(f"{path}.ladder", "must be strictly decreasing toward 0")
    out["ladder"] = lad
    if out["bump"] is not None:
        out["bump"] = _term(out["bump"], f"{path}.bump").to_dict()
    if out["direction"] is not None:
        out["direction"] = _numlist(out["direction"], f"{path}.direction", nonneg=True)
    return out


def _verify(d):
    path = "verify"
    d = _mapping(d, path)
    _no_unknown(d, set(VERIFY_DEFAULTS), path)
    out = dict(VERIFY_DEFAULTS)
    for k, v in d.items():
        out[k] = _num(v, f"{path}.{k}", positive=True, integer=(k != "d5_scale"))
    return out


def _output(d):
    path = "output"
    d = _mapping(d, path)
    _no_unknown(d, set(OUTPUT_DEFAULTS), path)
    out = dict(OUTPUT_DEFAULTS)
    if "snapshots" in d:
        if not isinstance(d["snapshots"], bool):
            raise ConfigError(f"{path}.snapshots", "expected true or false")
        out["snapshots"] = d["snapshots"]
    return out


# --------------------------------------------------------------------------
# public surface
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    data: dict
    model: object
    second_coefficients: object
    grid: Grid
    profile: BoundaryProfile
    solver: SolverConfig

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.data == other.data

    @property
    def initial(self):
        return self.data["initial"]

    @property
    def experiment(self):
        return self.data["experiment"]

    @property
    def verify(self):
        return self.data["verify"]

    @property
    def output(self):
        return self.data["output"]


def parse_config(text):
    """Parse and validate a YAML document; every error names its field path."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "<document>"
        raise ConfigError(where, f"YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    doc = _mapping(doc, "")
    _no_unknown(doc, TOP_KEYS, "")
    mdata, model, second = _model(doc.get("model"))
    gdata, grid = _grid(doc.get("grid"))
    bdata, profile = _boundary(doc.get("boundary"), grid.dim)
    sdata, solver = _solver(doc.get("solver"))
    data = {
        "model": mdata,
        "grid": gdata,
        "boundary": bdata,
        "initial": _initial(doc.get("initial")),
        "solver": sdata,
        "experiment": _experiment(doc.get("experiment")),
        "verify": _verify(doc.get("verify")),
        "output": _output(doc.get("output")),
    }
    return RunConfig(data, model, second, grid, profile, solver)


def dump_config(rc):
    return yaml.safe_dump(rc.data, sort_keys=True)


def load_config(path):
    """Read a config file; ``preset:NAME`` loads a bundled preset."""
    if str(path).startswith("preset:"):
        name = str(path).split(":", 1)[1]
        try:
            text = resources.files("mixedflow.presets").joinpath(f"{name}.yaml").read_text()
        except FileNotFoundError:
            raise ConfigError("--config", f"no preset named {name!r} (available: {', '.join(list_presets())})") from None
        return parse_config(text)
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None


def list_presets():
    return sorted(p.name[:-5] for p in resources.files("mixedflow.presets").iterdir() if p.name.endswith(".yaml"))
