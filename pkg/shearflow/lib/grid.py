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
grid
----

Uniform tensor-product grid on the channel (0, L) x (0, 2), node-sampled
fields and the finite-difference operators shared by every solver stage.

Fields are indexed ``values[i, j]`` with ``i`` along x and ``j`` along y.
All first derivatives are second-order centered in the interior with
second-order one-sided closures on the boundary; second derivatives use the
three-point stencil in the interior and the four-point one-sided stencil on
the boundary, so both reproduce quadratics exactly at every node.
"""

import dataclasses
import enum
import typing as ty

import numpy as np
from scipy import integrate as spint

from shearflow import exceptions

HEIGHT = 2.0
MIN_CELLS = 8


class Side(enum.Enum):
    X0 = "x=0"
    XL = "x=L"
    Y0 = "y=0"
    Y2 = "y=2"

    @property
    def axis(self) -> int:
        """Array axis normal to the side."""
        return 0 if self in (Side.X0, Side.XL) else 1

    @property
    def is_lower(self) -> bool:
        return self in (Side.X0, Side.Y0)


@dataclasses.dataclass(frozen=True)
class Grid:
    """Node grid of ``(nx + 1) x (ny + 1)`` points including corners."""

    nx: int
    ny: int
    length: float = 0.25

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise exceptions.GridError(
                "Cell counts must be integers, got nx={0}, ny={1}".format(
                    self.nx, self.ny
                )
            )
        if self.nx < MIN_CELLS or self.ny < MIN_CELLS:
            raise exceptions.GridError(
                "Grid needs at least {0} cells per direction, got {1}x{2}".format(
                    MIN_CELLS, self.nx, self.ny
                )
            )
        if not (0.0 < self.length <= 1.0):
            raise exceptions.GridError(
                "Channel length must satisfy 0 < L <= 1, got {0}".format(self.length)
            )

    @classmethod
    def square(cls, n: int, length: float = 0.25) -> "Grid":
        return cls(nx=n, ny=n, length=length)

    @property
    def height(self) -> float:
        return HEIGHT

    @property
    def hx(self) -> float:
        return self.length / self.nx

    @property
    def hy(self) -> float:
        return self.height / self.ny

    @property
    def shape(self) -> ty.Tuple[int, int]:
        return (self.nx + 1, self.ny + 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.nx + 1)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.height, self.ny + 1)

    def mesh(self) -> ty.Tuple[np.ndarray, np.ndarray]:
        """Return node coordinates ``(X, Y)`` with ``ij`` indexing."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def spacing(self, axis: int) -> float:
        return self.hx if axis == 0 else self.hy

    def side_nodes(self, side: Side) -> np.ndarray:
        """Coordinates along a side: y for the x-sides, x for the y-sides."""
        return self.y if side.axis == 0 else self.x

    def refine(self) -> "Grid":
        return Grid(nx=2 * self.nx, ny=2 * self.ny, length=self.length)

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros(self.shape))

    def field(self, func: ty.Callable[[np.ndarray, np.ndarray], ty.Any]) -> "ScalarField":
        """Sample ``func(X, Y)`` at the nodes; scalars are broadcast."""
        X, Y = self.mesh()
        return ScalarField(self, np.broadcast_to(func(X, Y), self.shape))


def _as_values(grid, other):
    if isinstance(other, ScalarField):
        if other.grid != grid:
            raise ValueError("Fields live on different grids")
        return other.values
    return other


@dataclasses.dataclass(frozen=True, eq=False)
class ScalarField:
    """Grid-sampled real function; values are read-only after construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.shape != self.grid.shape:
            raise ValueError(
                "Field shape {0} does not match grid {1}".format(
                    values.shape, self.grid.shape
                )
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __add__(self, other):
        return ScalarField(self.grid, self.values + _as_values(self.grid, other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - _as_values(self.grid, other))

    def __rsub__(self, other):
        return ScalarField(self.grid, _as_values(self.grid, other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * _as_values(self.grid, other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ScalarField(self.grid, self.values / _as_values(self.grid, other))

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __abs__(self):
        return ScalarField(self.grid, np.abs(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def trace(self, side: Side) -> "Trace":
        return extract_trace(self, side)


@dataclasses.dataclass(frozen=True, eq=False)
class VectorField:
    u: ScalarField
    v: ScalarField

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("Vector components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid.zeros(), grid.zeros())

    def __add__(self, other):
        return VectorField(self.u + other.u, self.v + other.v)

    def __sub__(self, other):
        return VectorField(self.u - other.u, self.v - other.v)

    def __mul__(self, scalar):
        return VectorField(self.u * scalar, self.v * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField(-self.u, -self.v)

    def max_abs(self) -> float:
        return max(self.u.max_abs(), self.v.max_abs())


@dataclasses.dataclass(frozen=True, eq=False)
class Trace:
    """Restriction of a field to one side, corners included."""

    side: Side
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise ValueError(
                "Trace on {0} has {1} values for {2} nodes".format(
                    self.side.value, len(self.values), len(self.nodes)
                )
            )

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])


def _first_derivative(values, h, axis):
    return np.gradient(values, h, axis=axis, edge_order=2)


def _second_derivative(values, h, axis):
    f = np.moveaxis(values, axis, 0)
    d = np.empty_like(f)
    d[1:-1] = f[2:] - 2.0 * f[1:-1] + f[:-2]
    d[0] = 2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]
    d[-1] = 2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]
    return np.moveaxis(d / h**2, 0, axis)


def apply_dx(f: ScalarField) -> ScalarField:
    """Discrete x-derivative of a field.

    :param f: The field to differentiate
    :returns: A new :class:`ScalarField`
    """
    return ScalarField(f.grid, _first_derivative(f.values, f.grid.hx, 0))


def apply_dy(f: ScalarField) -> ScalarField:
    """Discrete y-derivative of a field.

    :param f: The field to differentiate
    :returns: A new :class:`ScalarField`
    """
    return ScalarField(f.grid, _first_derivative(f.values, f.grid.hy, 1))


def apply_dxx(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, _second_derivative(f.values, f.grid.hx, 0))


def apply_dyy(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, _second_derivative(f.values, f.grid.hy, 1))


def apply_dxy(f: ScalarField) -> ScalarField:
    return apply_dy(apply_dx(f))


def gradient(f: ScalarField) -> VectorField:
    return VectorField(apply_dx(f), apply_dy(f))


def divergence(w: VectorField) -> ScalarField:
    """``u_x + v_y``"""
    return apply_dx(w.u) + apply_dy(w.v)


def curl2d(w: VectorField) -> ScalarField:
    """Scalar curl with the channel sign convention ``u_y - v_x``."""
    return apply_dy(w.u) - apply_dx(w.v)


def laplacian(f: ScalarField) -> ScalarField:
    return apply_dxx(f) + apply_dyy(f)


def extract_trace(f: ScalarField, side: Side) -> Trace:
    """Restrict a field to one side of the channel.

    :param f: A field on a valid grid
    :param side: The :class:`Side` to extract
    :returns: A :class:`Trace` whose nodes are y for the x-sides and x for
        the y-sides
    """
    index = 0 if side.is_lower else -1
    if side.axis == 0:
        values = f.values[index, :]
    else:
        values = f.values[:, index]
    return Trace(side, f.grid.side_nodes(side), np.array(values))


def integrate(f: ScalarField) -> float:
    """Trapezoidal quadrature of a field over the channel."""
    inner = spint.trapezoid(f.values, f.grid.y, axis=1)
    return float(spint.trapezoid(inner, f.grid.x))


def integrate_trace(trace: Trace) -> float:
    return float(spint.trapezoid(trace.values, trace.nodes))


def trace_derivative(trace: Trace, order: int = 1) -> Trace:
    """Differentiate a trace along its side with one-dimensional stencils."""
    values = np.asarray(trace.values, dtype=float)
    h = trace.spacing
    for _ in range(order // 2):
        values = _second_derivative(values, h, 0)
    if order % 2:
        values = _first_derivative(values, h, 0)
    return Trace(trace.side, trace.nodes, values)
