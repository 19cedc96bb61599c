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
homogenize
----------

Boundary lift ``(u_bar, v_bar)``: a pair of biharmonic functions carrying
the inhomogeneous boundary data, so that the remainder of the expansion
satisfies homogeneous conditions.

The lift is computed as an explicit extension ``(u0, v0)`` built from the
data with cutoffs, plus a correction solving the biharmonic problem with
homogeneous conditions and source ``-bilaplacian(u0)``.
"""

import collections
import dataclasses
import math
import typing as ty
import warnings

import numpy as np

from shearflow import _log
from shearflow import warnings as sf_warnings
from shearflow.lib import background
from shearflow.lib import elliptic
from shearflow.lib import grid as sf_grid
from shearflow.lib import norms

LOG = _log.setup_logging(__name__)

DEFAULT_LIFT_TOL = 1e-6

Side = sf_grid.Side
chi = background.cutoff_chi


@dataclasses.dataclass(frozen=True, eq=False)
class Lift:
    ubar: sf_grid.ScalarField
    vbar: sf_grid.ScalarField
    h1: sf_grid.ScalarField
    h2: sf_grid.ScalarField
    u0: sf_grid.ScalarField
    v0: sf_grid.ScalarField
    h4_norm_estimate: float
    data_norm: float
    defects: ty.Dict[str, float]

    @property
    def velocity(self) -> sf_grid.VectorField:
        return sf_grid.VectorField(self.ubar, self.vbar)

    @property
    def grid(self) -> sf_grid.Grid:
        return self.ubar.grid

    @property
    def bound_ratio(self) -> float:
        """``||(u_bar, v_bar)||_{H^4}`` over the data size; 0 for zero data."""
        if self.data_norm == 0.0:
            return 0.0
        return self.h4_norm_estimate / self.data_norm

    @classmethod
    def zero(cls, grid: sf_grid.Grid) -> "Lift":
        z = grid.zeros()
        return cls(z, z, z, z, z, z, 0.0, 0.0, {})


def _wall_weights(y):
    """Cutoffs localizing to the lower and upper wall."""
    return chi(2.0 * y), chi(4.0 - 2.0 * y)


def build_h1_h2(
    bd: background.BoundaryData, compat_tol: float = 1e-6
) -> ty.Tuple[sf_grid.ScalarField, sf_grid.ScalarField]:
    """Wall extensions of the slip and normal-velocity data.

    :raises: :class:`~shearflow.exceptions.CompatibilityError`
    """
    background.require_compatible(bd, compat_tol)
    grid = bd.grid
    length = grid.length
    X, Y = grid.mesh()
    lower, upper = _wall_weights(Y)
    b0 = bd.b0.values[:, np.newaxis]
    b1 = bd.b1.values[:, np.newaxis]
    a1_0 = bd.a1.derivative_at(0, 0.0)
    a1_2 = bd.a1.derivative_at(0, 2.0)
    h1 = (a1_0 + b0 * Y) * lower + (a1_2 - (2.0 - Y) * b1) * upper

    a2pp = bd.a2.derivative_at(2, 0.0), bd.a2.derivative_at(2, 2.0)
    a3pp = bd.a3.derivative_at(2, 0.0), bd.a3.derivative_at(2, 2.0)
    h2 = 0.5 * Y**2 * (a2pp[0] * (X - length) + a3pp[0]) * lower + 0.5 * (Y - 2.0) ** 2 * (
        a2pp[1] * (X - length) + a3pp[1]
    ) * upper
    return sf_grid.ScalarField(grid, h1), sf_grid.ScalarField(grid, h2)


def _outflow_slip(bd, order: int, y: np.ndarray) -> np.ndarray:
    """``d^order/dx^order h1`` at ``x = L``."""
    length = bd.grid.length
    lower, upper = _wall_weights(y)
    return (
        bd.b0.derivative_at(order, length) * y * lower
        + bd.b1.derivative_at(order, length) * (y - 2.0) * upper
    )


def outflow_second_derivative(bd: background.BoundaryData) -> np.ndarray:
    """``v_bar_xx(L, y) = u_bar_xy(L, y) - a4(y)`` in closed form."""
    length = bd.grid.length
    y = bd.grid.y
    c0 = bd.b0.derivative_at(1, length)
    c1 = bd.b1.derivative_at(1, length)
    u_xy = c0 * (chi(2.0 * y) + 2.0 * y * chi(2.0 * y, 1)) + c1 * (
        chi(4.0 - 2.0 * y) - 2.0 * (y - 2.0) * chi(4.0 - 2.0 * y, 1)
    )
    return u_xy - bd.a4.values


def ubar_conditions(bd: background.BoundaryData) -> elliptic.BoundarySpec:
    y, x = bd.grid.y, bd.grid.x
    lower, upper = _wall_weights(y)
    inflow_second = (
        bd.b0.derivative_at(2, 0.0) * y * lower
        + bd.b1.derivative_at(2, 0.0) * (y - 2.0) * upper
    )
    return {
        Side.X0: (elliptic.dirichlet(bd.a1.values), elliptic.second(inflow_second)),
        Side.XL: (
            elliptic.neumann(_outflow_slip(bd, 1, y)),
            elliptic.third(_outflow_slip(bd, 3, y)),
        ),
        Side.Y0: (
            elliptic.dirichlet(np.full(len(x), bd.a1.derivative_at(0, 0.0))),
            elliptic.neumann(bd.b0.values),
        ),
        Side.Y2: (
            elliptic.dirichlet(np.full(len(x), bd.a1.derivative_at(0, 2.0))),
            elliptic.neumann(bd.b1.values),
        ),
    }


def vbar_conditions(bd: background.BoundaryData) -> elliptic.BoundarySpec:
    x = bd.grid.x
    length = bd.grid.length

    def wall_second(end):
        return bd.a2.derivative_at(2, end) * (x - length) + bd.a3.derivative_at(2, end)

    return {
        Side.X0: (elliptic.neumann(bd.a2.values), elliptic.third(0.0)),
        Side.XL: (
            elliptic.dirichlet(bd.a3.values),
            elliptic.second(outflow_second_derivative(bd)),
        ),
        Side.Y0: (elliptic.dirichlet(0.0), elliptic.second(wall_second(0.0))),
        Side.Y2: (elliptic.dirichlet(0.0), elliptic.second(wall_second(2.0))),
    }


def extensions(bd, h1, h2):
    """Explicit extensions ``(u0, v0)`` matching the inflow and outflow data."""
    grid = bd.grid
    length = grid.length
    X, Y = grid.mesh()
    inflow = chi(4.0 * X / length)
    outflow = chi(4.0 - 4.0 * X / length)
    a1 = bd.a1.values[np.newaxis, :]
    a2 = bd.a2.values[np.newaxis, :]
    a3 = bd.a3.values[np.newaxis, :]

    u0 = h1.values + (a1 - h1.values[0:1, :]) * inflow

    lower, upper = _wall_weights(Y)
    h2x = 0.5 * Y**2 * bd.a2.derivative_at(2, 0.0) * lower + 0.5 * (
        Y - 2.0
    ) ** 2 * bd.a2.derivative_at(2, 2.0) * upper
    vxx = outflow_second_derivative(bd)[np.newaxis, :]
    v0 = (
        h2.values
        + X * (a2 - h2x) * inflow
        + ((a3 - h2.values[-1:, :]) + 0.5 * (X - length) ** 2 * vxx) * outflow
    )
    return sf_grid.ScalarField(grid, u0), sf_grid.ScalarField(grid, v0)


def lift_defects(bd, ubar, vbar) -> ty.Dict[str, float]:
    """Boundary identities of the lift measured with one-sided stencils."""
    def gap(trace, target):
        return float(np.max(np.abs(trace.values - target)))

    u_y = sf_grid.apply_dy(ubar)
    v_x = sf_grid.apply_dx(vbar)
    outflow_curl_x = sf_grid.apply_dx(u_y - v_x)
    defects = collections.OrderedDict()
    defects["u_y(y=0)=b0"] = gap(u_y.trace(Side.Y0), bd.b0.values)
    defects["u_y(y=2)=b1"] = gap(u_y.trace(Side.Y2), bd.b1.values)
    defects["u(x=0)=a1"] = gap(ubar.trace(Side.X0), bd.a1.values)
    defects["v(y=0)=0"] = gap(vbar.trace(Side.Y0), 0.0)
    defects["v(y=2)=0"] = gap(vbar.trace(Side.Y2), 0.0)
    defects["v(x=L)=a3"] = gap(vbar.trace(Side.XL), bd.a3.values)
    defects["v_x(x=0)=a2"] = gap(v_x.trace(Side.X0), bd.a2.values)
    defects["curl_x(x=L)=a4"] = gap(outflow_curl_x.trace(Side.XL), bd.a4.values)
    return dict(defects)


def build_lift(
    bd: background.BoundaryData,
    lift_tol: float = DEFAULT_LIFT_TOL,
    compat_tol: float = 1e-6,
    backend: str = elliptic.DIRECT,
) -> Lift:
    """Build the boundary lift for the given data.

    :param bd: Compatible :class:`~shearflow.lib.background.BoundaryData`
    :param lift_tol: Defect above which a
        :class:`~shearflow.warnings.LiftToleranceWarning` is emitted
    :returns: :class:`Lift`
    :raises: :class:`~shearflow.exceptions.CompatibilityError`
    """
    grid = bd.grid
    h1, h2 = build_h1_h2(bd, compat_tol)
    if bd.is_zero():
        return Lift.zero(grid)
    u0, v0 = extensions(bd, h1, h2)

    ubc = ubar_conditions(bd)
    vbc = vbar_conditions(bd)
    # u_bar first: the v_bar outflow condition carries u_bar_xy(L, y)
    u_op = elliptic.EllipticOperator(grid, elliptic.BIHARMONIC, elliptic.kinds_of(ubc),
                                     backend=backend)
    ubar = u0 + u_op.correction(u0, None, ubc)
    v_op = elliptic.EllipticOperator(grid, elliptic.BIHARMONIC, elliptic.kinds_of(vbc),
                                     backend=backend)
    vbar = v0 + v_op.correction(v0, None, vbc)

    defects = lift_defects(bd, ubar, vbar)
    worst = max(defects, key=defects.get)
    if defects[worst] > lift_tol:
        warnings.warn(
            "Lift identity {0} off by {1:.3e} (tolerance {2:.1e})".format(
                worst, defects[worst], lift_tol
            ),
            category=sf_warnings.LiftToleranceWarning,
        )
    h4 = math.hypot(norms.hk(ubar, 4), norms.hk(vbar, 4))
    data_norm = sum(getattr(bd, name).sobolev(4) for name in ("a1", "a2", "a3", "a4", "b0", "b1"))
    LOG.debug("lift built: H4=%.3e data=%.3e worst %s=%.3e", h4, data_norm, worst,
              defects[worst])
    return Lift(ubar, vbar, h1, h2, u0, v0, h4, data_norm, defects)
