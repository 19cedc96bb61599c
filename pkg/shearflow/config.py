#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""
Sweep configuration.

A configuration document (YAML or JSON) is merged onto :data:`DEFAULTS`,
then environment variables and keyword overrides are applied, and the
result is validated against :data:`SCHEMA`.

Environment variables:

``SHEARFLOW_GRID``
    Cells per direction (sets both ``grid.nx`` and ``grid.ny``).
``SHEARFLOW_WORKERS``
    Size of the sweep worker pool.
``SHEARFLOW_OUT``
    Output directory.
"""

import copy
import dataclasses
import os
import typing as ty

import jsonschema
import yaml

from shearflow import _log
from shearflow import exceptions
from shearflow.lib import background
from shearflow.lib import elliptic
from shearflow.lib import grid as sf_grid
from shearflow.lib import linsolve

LOG = _log.setup_logging(__name__)

DEFAULTS: ty.Dict[str, ty.Any] = {
    "grid": {"nx": 128, "ny": 128, "L": 0.25},
    "params": {
        "gamma": background.DEFAULT_GAMMA,
        "alpha": list(background.DEFAULT_ALPHA),
        "sigma": background.DEFAULT_SIGMA,
        "delta": background.DEFAULT_DELTA,
        "eta_exponent": 0.55,
    },
    "boundary_data": {
        "a1": "y^2*(2-y)^2",
        "a2": "sin(pi*y)",
        "a3": "sin(pi*y/2)",
        "a4": "sin(pi*y)",
        "b0": "0",
        "b1": "0",
        "h0": "cos(pi*y)",
    },
    "sweep": {
        "eps": [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3],
        "scale_data": True,
        "lambda_scale": 0.5,
        "picard_tol": 1e-9,
        "max_iter": 50,
        "p": 4.0,
        "alpha_mollify": 0.0,
        "inner_tol": linsolve.DEFAULT_INNER_TOL,
        "max_sweeps": linsolve.DEFAULT_MAX_SWEEPS,
        "workers": 1,
        "fail_at": [],
        "subtract_lift": True,
    },
    "tolerances": {
        "solver": elliptic.DEFAULT_SOLVER_TOL,
        "consistency": linsolve.DEFAULT_CONSISTENCY_TOL,
        "lift": 1e-6,
        "bc": linsolve.DEFAULT_BC_TOL,
        "compatibility": 1e-6,
        "residual": linsolve.DEFAULT_RESIDUAL_TOL,
    },
    "acceptance": {
        "rho_slope": 0.85,
        "gap_slope": 0.425,
        "contraction": 0.5,
        "constant_spread": 10.0,
    },
    "output": {"dir": "shearflow-out", "dump_fields": False},
}

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_NUMBERS = {"type": "object", "additionalProperties": _POSITIVE}

SCHEMA: ty.Dict[str, ty.Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nx": {"type": "integer", "minimum": sf_grid.MIN_CELLS},
                "ny": {"type": "integer", "minimum": sf_grid.MIN_CELLS},
                "L": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma": {"type": "number", "exclusiveMinimum": 1},
                "alpha": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 3,
                    "maxItems": 3,
                },
                "sigma": _POSITIVE,
                "delta": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.25},
                "eta_exponent": _POSITIVE,
            },
        },
        "boundary_data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                name: {"type": "string"}
                for name in background.Y_PROFILES + background.X_PROFILES
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eps": {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                    "minItems": 1,
                },
                "scale_data": {"type": "boolean"},
                "lambda_scale": _POSITIVE,
                "picard_tol": _POSITIVE,
                "max_iter": {"type": "integer", "minimum": 1},
                "p": {"type": "number", "minimum": 2},
                "alpha_mollify": {"type": "number", "minimum": 0},
                "inner_tol": _POSITIVE,
                "max_sweeps": {"type": "integer", "minimum": 1},
                "workers": {"type": "integer", "minimum": 1},
                "fail_at": {"type": "array", "items": {"type": "number"}},
                "subtract_lift": {"type": "boolean"},
            },
        },
        "tolerances": _NUMBERS,
        "acceptance": _NUMBERS,
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string", "minLength": 1},
                "dump_fields": {"type": "boolean"},
            },
        },
    },
}

_ENVVARS = {
    "SHEARFLOW_GRID": ("grid", ("nx", "ny"), int),
    "SHEARFLOW_WORKERS": ("sweep", ("workers",), int),
    "SHEARFLOW_OUT": ("output", ("dir",), str),
}


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    """Validated configuration of one sweep."""

    nx: int
    ny: int
    length: float
    gamma: float
    alpha: ty.Tuple[float, float, float]
    sigma: float
    delta: float
    eta_exponent: float
    boundary_data: ty.Dict[str, str]
    eps: ty.Tuple[float, ...]
    scale_data: bool
    lambda_scale: float
    picard_tol: float
    max_iter: int
    p: float
    alpha_mollify: float
    inner_tol: float
    max_sweeps: int
    workers: int
    fail_at: ty.Tuple[float, ...]
    subtract_lift: bool
    tolerances: ty.Dict[str, float]
    acceptance: ty.Dict[str, float]
    out_dir: str
    dump_fields: bool
    document: ty.Dict[str, ty.Any] = dataclasses.field(repr=False, compare=False)

    @classmethod
    def from_document(cls, doc: ty.Dict[str, ty.Any]) -> "SweepConfig":
        grid, params, sweep = doc["grid"], doc["params"], doc["sweep"]
        return cls(
            nx=grid["nx"],
            ny=grid["ny"],
            length=float(grid["L"]),
            gamma=float(params["gamma"]),
            alpha=tuple(float(a) for a in params["alpha"]),
            sigma=float(params["sigma"]),
            delta=float(params["delta"]),
            eta_exponent=float(params["eta_exponent"]),
            boundary_data=dict(doc["boundary_data"]),
            eps=tuple(float(e) for e in sweep["eps"]),
            scale_data=bool(sweep["scale_data"]),
            lambda_scale=float(sweep["lambda_scale"]),
            picard_tol=float(sweep["picard_tol"]),
            max_iter=sweep["max_iter"],
            p=float(sweep["p"]),
            alpha_mollify=float(sweep["alpha_mollify"]),
            inner_tol=float(sweep["inner_tol"]),
            max_sweeps=sweep["max_sweeps"],
            workers=sweep["workers"],
            fail_at=tuple(float(e) for e in sweep["fail_at"]),
            subtract_lift=bool(sweep["subtract_lift"]),
            tolerances=dict(doc["tolerances"]),
            acceptance=dict(doc["acceptance"]),
            out_dir=doc["output"]["dir"],
            dump_fields=bool(doc["output"]["dump_fields"]),
            document=copy.deepcopy(doc),
        )

    def grid(self) -> sf_grid.Grid:
        return sf_grid.Grid(self.nx, self.ny, self.length)

    def params(self, eps: float) -> background.FlowParams:
        """:class:`~shearflow.lib.background.FlowParams` at one viscosity."""
        alpha0, alpha1, alpha2 = self.alpha
        return background.FlowParams.from_exponent(
            eps,
            self.eta_exponent,
            gamma=self.gamma,
            alpha0=alpha0,
            alpha1=alpha1,
            alpha2=alpha2,
            sigma=self.sigma,
            delta=self.delta,
        )

    def boundary_shapes(self, grid, params) -> background.BoundaryData:
        """Shape-only boundary data; ``h0`` carries its ``eta^2`` factor."""
        return background.BoundaryData.from_expressions(grid, self.boundary_data, params.eta)

    def solver_options(self) -> ty.Dict[str, ty.Any]:
        """Keyword arguments for :class:`~shearflow.lib.linsolve.LinearSolver`."""
        tol = self.tolerances
        return {
            "solver_tol": tol.get("solver", elliptic.DEFAULT_SOLVER_TOL),
            "inner_tol": self.inner_tol,
            "max_sweeps": self.max_sweeps,
            "residual_tol": tol.get("residual", linsolve.DEFAULT_RESIDUAL_TOL),
            "consistency_tol": tol.get("consistency", linsolve.DEFAULT_CONSISTENCY_TOL),
            "bc_tol": tol.get("bc", linsolve.DEFAULT_BC_TOL),
        }


def _merge(base, update):
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
    return base


def _read(path: str) -> ty.Dict[str, ty.Any]:
    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except OSError as e:
        raise exceptions.ConfigError(
            "Unable to read configuration {0}: {1}".format(path, e.strerror)
        )
    except yaml.YAMLError as e:
        raise exceptions.ConfigError("Malformed configuration {0}: {1}".format(path, e))
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise exceptions.ConfigError(
            "Configuration {0} must be a mapping at the top level".format(path)
        )
    return doc


def _apply_envvars(doc, environ):
    for var, (section, keys, kind) in _ENVVARS.items():
        raw = environ.get(var)
        if raw in (None, ""):
            continue
        if not isinstance(doc.get(section), dict):
            continue
        try:
            value = kind(raw)
        except ValueError:
            raise exceptions.ConfigError(
                "Environment variable {0} has invalid value {1!r}".format(var, raw)
            )
        LOG.debug("configuration override from %s: %s", var, raw)
        for key in keys:
            doc[section][key] = value


def _apply_overrides(doc, overrides):
    shortcuts = {
        "grid_n": lambda v: doc["grid"].update(nx=v, ny=v),
        "eps": lambda v: doc["sweep"].update(eps=list(v)),
        "workers": lambda v: doc["sweep"].update(workers=v),
        "out_dir": lambda v: doc["output"].update(dir=v),
        "dump_fields": lambda v: doc["output"].update(dump_fields=v),
    }
    for key, value in overrides.items():
        if value is None:
            continue
        if key in shortcuts:
            shortcuts[key](value)
        elif key in DEFAULTS and isinstance(value, dict):
            _merge(doc[key], value)
        else:
            raise exceptions.ConfigError("Unknown configuration override {0!r}".format(key))


def validate(doc: ty.Dict[str, ty.Any]) -> None:
    """Check a merged document.

    :raises: :class:`~shearflow.exceptions.ConfigError`
    """
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise exceptions.ConfigError(
            "Invalid configuration at {0}: {1}".format(where, e.message)
        )
    eps = doc["sweep"]["eps"]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise exceptions.ConfigError(
            "Viscosities must be strictly decreasing", extra_data={"eps": eps}
        )
    alpha = doc["params"]["alpha"]
    if alpha[0] <= 0.0 or alpha[1] + alpha[2] <= 0.0:
        raise exceptions.ConfigError(
            "Shear coefficients need alpha0 > 0 and alpha1 + alpha2 > 0"
        )
    for name, text in doc["boundary_data"].items():
        variable = "x" if name in background.X_PROFILES else "y"
        background.parse_expression(text, variable)


def load_config(
    path: ty.Optional[str] = None,
    load_envvars: bool = True,
    environ: ty.Optional[ty.Mapping[str, str]] = None,
    **overrides,
) -> SweepConfig:
    """Load a :class:`SweepConfig`

    :param str path: YAML or JSON document to merge onto the defaults
    :param bool load_envvars: Whether to apply ``SHEARFLOW_*`` variables
    :param environ: Mapping used instead of ``os.environ``
    :param overrides: Section mappings to merge, or one of the shortcuts
        ``grid_n``, ``eps``, ``workers``, ``out_dir``, ``dump_fields``;
        ``None`` values are ignored

    :returns: :class:`SweepConfig`
    :raises: :class:`~shearflow.exceptions.ConfigError`
    """
    doc = copy.deepcopy(DEFAULTS)
    if path:
        _merge(doc, _read(path))
    if load_envvars:
        _apply_envvars(doc, os.environ if environ is None else environ)
    _apply_overrides(doc, overrides)
    validate(doc)
    return SweepConfig.from_document(doc)
