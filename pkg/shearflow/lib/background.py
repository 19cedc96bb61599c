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
background
----------

The Poiseuille-Couette shear flow ``u_s = a0 + a1 y + a2 y (2 - y)``, its
flow parameters, the boundary perturbation profiles and the smooth cutoff
used to lift them into the channel.
"""

import collections
import dataclasses
import math
import re
import typing as ty

import numpy as np
from numpy.polynomial import Polynomial
import sympy
from sympy.parsing import sympy_parser

from shearflow import _log
from shearflow import exceptions
from shearflow.lib import grid as sf_grid
from shearflow.lib import norms

LOG = _log.setup_logging(__name__)

DEFAULT_GAMMA = 1.4
DEFAULT_ALPHA = (1.0, 1.0, 0.5)
DEFAULT_SIGMA = 0.2
DEFAULT_DELTA = 0.05

Y_PROFILES = ("a1", "a2", "a3", "a4", "h0")
X_PROFILES = ("b0", "b1")

# degree-9 smoothstep on [0, 1]; value and four derivatives match at both ends
_SMOOTHSTEP = Polynomial([0, 0, 0, 0, 0, 126, -420, 540, -315, 70])


@dataclasses.dataclass(frozen=True)
class FlowParams:
    """Physical and asymptotic parameters of one solve.

    Every ``+`` exponent is realized through ``delta``: ``eps^{1/2+}`` reads
    ``eps ** (0.5 + delta)``. The Mach number defaults to that value.
    """

    eps: float
    gamma: float = DEFAULT_GAMMA
    alpha0: float = DEFAULT_ALPHA[0]
    alpha1: float = DEFAULT_ALPHA[1]
    alpha2: float = DEFAULT_ALPHA[2]
    sigma: float = DEFAULT_SIGMA
    delta: float = DEFAULT_DELTA
    eta: ty.Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise exceptions.ParameterError(
                "Viscosity must satisfy 0 < eps < 1, got {0}".format(self.eps)
            )
        if self.gamma <= 1.0:
            raise exceptions.ParameterError(
                "Adiabatic exponent must exceed 1, got {0}".format(self.gamma)
            )
        if self.alpha0 <= 0.0 or self.alpha1 < 0.0 or self.alpha2 < 0.0:
            raise exceptions.ParameterError(
                "Shear coefficients need alpha0 > 0 and alpha1, alpha2 >= 0",
                extra_data={
                    "alpha0": self.alpha0,
                    "alpha1": self.alpha1,
                    "alpha2": self.alpha2,
                },
            )
        if self.alpha1 + self.alpha2 <= 0.0:
            raise exceptions.ParameterError("alpha1 + alpha2 must be positive")
        if self.sigma <= 0.0:
            raise exceptions.ParameterError(
                "Smallness exponent must be positive, got {0}".format(self.sigma)
            )
        if not (0.0 < self.delta <= 0.25):
            raise exceptions.ParameterError(
                "Exponent offset must satisfy 0 < delta <= 0.25, got {0}".format(
                    self.delta
                )
            )
        if self.eta is None:
            object.__setattr__(self, "eta", self.eps ** (0.5 + self.delta))
        ceiling = self.eps ** (0.5 + self.delta / 2.0)
        if not (0.0 < self.eta <= ceiling * (1.0 + 1e-12)):
            raise exceptions.ParameterError(
                "Mach number must satisfy 0 < eta <= eps^(1/2+delta/2)",
                extra_data={"eta": self.eta, "ceiling": ceiling},
            )

    @classmethod
    def from_exponent(cls, eps: float, eta_exponent: ty.Optional[float] = None, **kwargs):
        """Build parameters with ``eta = eps ** eta_exponent``."""
        if eta_exponent is not None:
            kwargs["eta"] = eps**eta_exponent
        return cls(eps=eps, **kwargs)

    @property
    def kappa(self) -> float:
        return 0.5 + self.delta

    @property
    def scale(self) -> float:
        """Amplitude ``eps^{1/2+delta}`` of the remainder in the expansion."""
        return self.eps**self.kappa

    @property
    def tilt(self) -> float:
        """Pressure-tilt coefficient ``2 alpha2 eps^{1/2-delta}``."""
        return 2.0 * self.alpha2 * self.eps ** (0.5 - self.delta)

    @property
    def transport_coefficient(self) -> float:
        return 2.0 * self.eps * self.eta**2

    @property
    def lambda_ceiling(self) -> float:
        return self.eps ** (0.5 + self.sigma)

    def snapshot(self) -> ty.Dict[str, float]:
        return dataclasses.asdict(self)


def eval_us(params: FlowParams, y):
    y = np.asarray(y, dtype=float)
    return params.alpha0 + params.alpha1 * y + params.alpha2 * y * (2.0 - y)


def eval_us_y(params: FlowParams, y):
    y = np.asarray(y, dtype=float)
    return params.alpha1 + 2.0 * params.alpha2 * (1.0 - y)


def eval_us_yy(params: FlowParams, y):
    y = np.asarray(y, dtype=float)
    return np.full_like(y, -2.0 * params.alpha2)


def shear_field(params: FlowParams, grid: sf_grid.Grid) -> sf_grid.ScalarField:
    return grid.field(lambda X, Y: eval_us(params, Y))


def shear_y_field(params: FlowParams, grid: sf_grid.Grid) -> sf_grid.ScalarField:
    return grid.field(lambda X, Y: eval_us_y(params, Y))


def shear_yy_field(params: FlowParams, grid: sf_grid.Grid) -> sf_grid.ScalarField:
    return grid.field(lambda X, Y: eval_us_yy(params, Y))


def _momentum_residual(u, v, pressure, viscosity):
    """Max-norm of the incompressible momentum and mass residuals."""
    w = sf_grid.VectorField(u, v)
    res_x = u * sf_grid.apply_dx(u) + v * sf_grid.apply_dy(u) + sf_grid.apply_dx(pressure)
    res_y = u * sf_grid.apply_dx(v) + v * sf_grid.apply_dy(v) + sf_grid.apply_dy(pressure)
    if viscosity:
        res_x = res_x - viscosity * sf_grid.laplacian(u)
        res_y = res_y - viscosity * sf_grid.laplacian(v)
    return max(res_x.max_abs(), res_y.max_abs(), sf_grid.divergence(w).max_abs())


def euler_residual(params: FlowParams, grid: sf_grid.Grid) -> float:
    """Residual of the stationary Euler equations at ``(u_s, 0, 1)``."""
    return _momentum_residual(
        shear_field(params, grid), grid.zeros(), grid.field(lambda X, Y: 1.0), 0.0
    )


def ns_residual(params: FlowParams, grid: sf_grid.Grid) -> float:
    """Residual of the incompressible Navier-Stokes equations at
    ``(u_s, 0, 1 - 2 eps alpha2 x)``.
    """
    pressure = grid.field(lambda X, Y: 1.0 - 2.0 * params.eps * params.alpha2 * X)
    return _momentum_residual(shear_field(params, grid), grid.zeros(), pressure, params.eps)


def parallel_flow_state(
    params: FlowParams, grid: sf_grid.Grid
) -> ty.Tuple[sf_grid.VectorField, sf_grid.ScalarField]:
    """Strict parallel flow ``(u_s, 0, (1 - 2 eps eta^2 alpha2 x)^{1/gamma})``.

    It balances both momentum equations but violates mass conservation by
    ``-(2/gamma) alpha2 eta^2 eps u_s (1 - 2 eps eta^2 alpha2 x)^{1/gamma - 1}``.
    """
    base = 1.0 - params.transport_coefficient * params.alpha2 * grid.x
    if np.any(base <= 0.0):
        raise exceptions.PositivityError("Parallel-flow density is not positive")
    rho = grid.field(
        lambda X, Y: (1.0 - params.transport_coefficient * params.alpha2 * X)
        ** (1.0 / params.gamma)
    )
    return sf_grid.VectorField(shear_field(params, grid), grid.zeros()), rho


def pressure_tilt_alternative(params: FlowParams) -> ty.Dict[str, float]:
    """Compare the two readings of the pressure-tilt coefficient.

    The solver uses ``2 alpha2 eps^{1/2-delta}``; the other reading is
    ``2 alpha2 eps``. Both are logged so runs can be compared.
    """
    alternative = 2.0 * params.alpha2 * params.eps
    result = {
        "delta_consistent": params.tilt,
        "alternative": alternative,
        "difference": abs(params.tilt - alternative),
    }
    LOG.info(
        "pressure tilt at eps=%g: %.6e (in use), %.6e (alternative)",
        params.eps,
        params.tilt,
        alternative,
    )
    return result


def cutoff_chi(t, derivative: int = 0):
    """Smooth cutoff equal to 1 on [0, 1/2] and 0 on [1, inf).

    :param t: Scalar or array of points, all ``>= 0``
    :param derivative: Order of the derivative to return (0 to 4 keep the
        function continuous)
    :returns: Same shape as ``t``
    :raises: :class:`~shearflow.exceptions.DomainError` for negative ``t``
    """
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise exceptions.DomainError(
            "Cutoff is defined for t >= 0, got min {0}".format(float(np.min(t)))
        )
    inner = (t > 0.5) & (t < 1.0)
    s = 2.0 * t[inner] - 1.0
    if derivative == 0:
        result = np.where(t <= 0.5, 1.0, 0.0)
        result[inner] = 1.0 - _SMOOTHSTEP(s)
    else:
        result = np.zeros_like(t)
        result[inner] = -_SMOOTHSTEP.deriv(derivative)(s) * 2.0**derivative
    return float(result) if scalar else result


_EXPRESSION_CHARS = re.compile(r"^[0-9A-Za-z_+\-*/^().\s]*$")
_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp, "pi": sympy.pi}
_TRANSFORMS = sympy_parser.standard_transformations + (sympy_parser.convert_xor,)
_PARSER_GLOBALS = {"Integer": sympy.Integer, "Float": sympy.Float, "Rational": sympy.Rational}


def parse_expression(text, variable: str) -> sympy.Expr:
    """Parse a boundary profile expression in one variable.

    The grammar is numbers, the variable, ``pi``, ``+ - * / ^``,
    parentheses and ``sin``, ``cos``, ``exp``.

    :raises: :class:`~shearflow.exceptions.ConfigError` on anything else
    """
    if isinstance(text, (int, float)):
        return sympy.Float(text)
    text = str(text)
    if not _EXPRESSION_CHARS.match(text):
        raise exceptions.ConfigError(
            "Expression {0!r} contains unsupported characters".format(text)
        )
    for name in _IDENTIFIER.findall(_NUMBER.sub(" ", text)):
        if name != variable and name not in _FUNCTIONS:
            raise exceptions.ConfigError(
                "Expression {0!r} uses unknown name {1!r}".format(text, name)
            )
    symbol = sympy.Symbol(variable, real=True)
    local = dict(_FUNCTIONS)
    local[variable] = symbol
    try:
        expr = sympy_parser.parse_expr(
            text,
            local_dict=local,
            global_dict=dict(_PARSER_GLOBALS),
            transformations=_TRANSFORMS,
        )
    except (SyntaxError, TypeError, ValueError, NameError) as e:
        raise exceptions.ConfigError(
            "Cannot parse expression {0!r}: {1}".format(text, e)
        )
    if not isinstance(expr, sympy.Expr) or expr.free_symbols - {symbol}:
        raise exceptions.ConfigError(
            "Expression {0!r} is not a function of {1}".format(text, variable)
        )
    return expr


def _one_sided_weights(order: int, lower: bool) -> np.ndarray:
    """Second-order one-sided weights for ``d^order/ds^order`` at an end."""
    npoints = order + 2
    offsets = np.arange(npoints, dtype=float)
    if not lower:
        offsets = -offsets
    vander = np.array(
        [offsets**k / math.factorial(k) for k in range(npoints)], dtype=float
    )
    rhs = np.zeros(npoints)
    rhs[order] = 1.0
    return np.linalg.solve(vander, rhs)


def _evaluate(expr, variable, points, order):
    symbol = sympy.Symbol(variable, real=True)
    if order:
        expr = sympy.diff(expr, symbol, order)
    values = sympy.lambdify(symbol, expr, "numpy")(points)
    return np.asarray(values, dtype=float) * np.ones_like(points)


@dataclasses.dataclass(frozen=True, eq=False)
class Profile:
    """A boundary profile sampled on one side, with an optional closed form.

    Derivatives use the closed form when there is one and fall back to
    finite differences of the samples otherwise.
    """

    name: str
    variable: str
    nodes: np.ndarray
    values: np.ndarray
    expression: ty.Optional[sympy.Expr] = None

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise ValueError(
                "Profile {0} has {1} values for {2} nodes".format(
                    self.name, len(self.values), len(self.nodes)
                )
            )
        if len(self.nodes) < 5:
            raise exceptions.GridError(
                "Profile {0} needs at least 5 samples".format(self.name)
            )

    @classmethod
    def from_expression(cls, name, variable, text, nodes, factor=1.0):
        expr = parse_expression(text, variable) * factor
        nodes = np.asarray(nodes, dtype=float)
        return cls(name, variable, nodes, _evaluate(expr, variable, nodes, 0), expr)

    @classmethod
    def from_values(cls, name, variable, nodes, values):
        return cls(name, variable, np.asarray(nodes, dtype=float),
                   np.asarray(values, dtype=float))

    @classmethod
    def zeros(cls, name, variable, nodes):
        return cls.from_expression(name, variable, "0", nodes)

    @property
    def symbol(self) -> sympy.Symbol:
        return sympy.Symbol(self.variable, real=True)

    def __call__(self, points, order: int = 0):
        """Evaluate the profile (or a derivative) at arbitrary points."""
        points = np.asarray(points, dtype=float)
        if self.expression is not None:
            return _evaluate(self.expression, self.variable, points, order)
        samples = self.derivative(order)
        return np.interp(points, self.nodes, samples)

    def derivative(self, order: int = 1) -> np.ndarray:
        """Derivative of the given order at the sample nodes."""
        if order == 0:
            return np.array(self.values)
        if self.expression is not None:
            return self(self.nodes, order)
        trace = sf_grid.Trace(sf_grid.Side.X0, self.nodes, self.values)
        return sf_grid.trace_derivative(trace, order).values

    def derivative_at(self, order: int, point: float) -> float:
        """Derivative at one point; endpoints of sampled data use one-sided
        stencils of second order.
        """
        if self.expression is not None:
            expr = sympy.diff(self.expression, self.symbol, order)
            return float(expr.subs(self.symbol, point))
        if order == 0:
            return float(np.interp(point, self.nodes, self.values))
        h = float(self.nodes[1] - self.nodes[0])
        for lower, index in ((True, 0), (False, -1)):
            if math.isclose(point, self.nodes[index], abs_tol=1e-12):
                w = _one_sided_weights(order, lower)
                samples = self.values[: len(w)] if lower else self.values[::-1][: len(w)]
                return float(np.dot(w, samples) / h**order)
        return float(np.interp(point, self.nodes, self.derivative(order)))

    def scaled(self, factor: float) -> "Profile":
        expr = None if self.expression is None else self.expression * factor
        return Profile(self.name, self.variable, self.nodes, self.values * factor, expr)

    def sobolev(self, k: int) -> float:
        """H^k norm on the profile's interval."""
        total = 0.0
        for m in range(k + 1):
            trace = sf_grid.Trace(sf_grid.Side.X0, self.nodes, self.derivative(m))
            total += norms.trace_l2(trace) ** 2
        return math.sqrt(total)

    def is_zero(self) -> bool:
        if self.expression is not None:
            return bool(self.expression == 0)
        return not np.any(self.values)


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryData:
    """The perturbation profiles a1..a4, h0 (in y) and b0, b1 (in x)."""

    grid: sf_grid.Grid
    a1: Profile
    a2: Profile
    a3: Profile
    a4: Profile
    b0: Profile
    b1: Profile
    h0: Profile

    @classmethod
    def from_expressions(cls, grid, expressions=None, eta=None) -> "BoundaryData":
        """Sample closed-form profiles on the grid.

        :param grid: The :class:`~shearflow.lib.grid.Grid` to sample on
        :param expressions: Mapping of profile name to expression string;
            missing names are zero
        :param eta: When given, ``h0`` is read as the shape of
            ``eta^-2 h0`` and multiplied by ``eta**2``
        """
        expressions = dict(expressions or {})
        unknown = set(expressions) - set(Y_PROFILES + X_PROFILES)
        if unknown:
            raise exceptions.ConfigError(
                "Unknown boundary profiles: {0}".format(", ".join(sorted(unknown)))
            )
        profiles = {}
        for name in Y_PROFILES:
            factor = eta**2 if (name == "h0" and eta is not None) else 1.0
            profiles[name] = Profile.from_expression(
                name, "y", expressions.get(name, "0"), grid.y, factor
            )
        for name in X_PROFILES:
            profiles[name] = Profile.from_expression(
                name, "x", expressions.get(name, "0"), grid.x
            )
        return cls(grid=grid, **profiles)

    @classmethod
    def from_arrays(cls, grid, arrays) -> "BoundaryData":
        """Wrap sampled profiles; missing names are zero."""
        profiles = {}
        for name in Y_PROFILES + X_PROFILES:
            nodes = grid.y if name in Y_PROFILES else grid.x
            values = arrays.get(name)
            if values is None:
                values = np.zeros(len(nodes))
            variable = "y" if name in Y_PROFILES else "x"
            profiles[name] = Profile.from_values(name, variable, nodes, values)
        return cls(grid=grid, **profiles)

    @classmethod
    def zeros(cls, grid) -> "BoundaryData":
        return cls.from_expressions(grid, {})

    def profiles(self) -> ty.Iterator[Profile]:
        for name in Y_PROFILES + X_PROFILES:
            yield getattr(self, name)

    def scaled(self, factor: float) -> "BoundaryData":
        return BoundaryData(
            grid=self.grid,
            **{p.name: p.scaled(factor) for p in self.profiles()}
        )

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.profiles())


@dataclasses.dataclass(frozen=True)
class CompatibilityReport:
    defects: ty.Dict[str, float]
    tol: float

    @property
    def failed(self) -> ty.List[str]:
        return [name for name, value in self.defects.items() if value > self.tol]

    @property
    def passed(self) -> bool:
        return not self.failed


def check_compatibility(bd: BoundaryData, tol: float = 1e-6) -> CompatibilityReport:
    """Measure the ten corner compatibility conditions.

    :param bd: The :class:`BoundaryData` to check
    :param tol: Absolute tolerance on each defect
    :returns: A :class:`CompatibilityReport`
    """
    length = bd.grid.length
    defects = collections.OrderedDict()
    defects["a1'(0)=b0(0)"] = abs(bd.a1.derivative_at(1, 0.0) - bd.b0.derivative_at(0, 0.0))
    defects["a1'(2)=b1(0)"] = abs(bd.a1.derivative_at(1, 2.0) - bd.b1.derivative_at(0, 0.0))
    defects["a4(0)=b0'(L)"] = abs(bd.a4.derivative_at(0, 0.0) - bd.b0.derivative_at(1, length))
    defects["a4(2)=b1'(L)"] = abs(bd.a4.derivative_at(0, 2.0) - bd.b1.derivative_at(1, length))
    for name in ("a2", "a3"):
        for end in (0.0, 2.0):
            value = getattr(bd, name).derivative_at(0, end)
            defects["{0}({1:g})=0".format(name, end)] = abs(value)
    for end in (0.0, 2.0):
        defects["a4''({0:g})=0".format(end)] = abs(bd.a4.derivative_at(2, end))
    report = CompatibilityReport(dict(defects), tol)
    if not report.passed:
        LOG.debug("compatibility failures: %s", ", ".join(report.failed))
    return report


def require_compatible(bd: BoundaryData, tol: float = 1e-6) -> CompatibilityReport:
    report = check_compatibility(bd, tol)
    if not report.passed:
        raise exceptions.CompatibilityError(
            "Boundary data violate corner compatibility",
            extra_data={name: report.defects[name] for name in report.failed},
            failed=report.failed,
        )
    return report


def background_density(params: FlowParams, bd: BoundaryData) -> sf_grid.ScalarField:
    """``rho_bar = x h0(y) / eta^2`` on the boundary-data grid."""
    h0 = bd.h0.values
    return bd.grid.field(lambda X, Y: X * h0[np.newaxis, :] / params.eta**2)


def lambda_norm(bd: BoundaryData, params: FlowParams) -> float:
    """Aggregate size of the boundary data.

    ``eta^-2 |h0|_{H^3} + sum |a_i|_{H^4} + |b0|_{H^4} + |b1|_{H^4}``
    """
    total = bd.h0.sobolev(3) / params.eta**2
    for name in ("a1", "a2", "a3", "a4", "b0", "b1"):
        total += getattr(bd, name).sobolev(4)
    return total


def lambda_gate(bd: BoundaryData, params: FlowParams) -> float:
    """Return the data size after checking it against ``eps^{1/2+sigma}``."""
    size = lambda_norm(bd, params)
    if size > params.lambda_ceiling:
        raise exceptions.LambdaGateError(
            "Boundary data too large for eps={0}".format(params.eps),
            extra_data={"lambda": size, "ceiling": params.lambda_ceiling},
        )
    return size


def scale_to_lambda(bd: BoundaryData, params: FlowParams, factor: float) -> BoundaryData:
    """Rescale shape-only data so that its size is ``factor * eps^{1/2+sigma}``."""
    size = lambda_norm(bd, params)
    if size == 0.0:
        return bd
    return bd.scaled(factor * params.lambda_ceiling / size)
