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
estimates
---------

Audits of the a priori inequalities of the linear problem. Each audit
evaluates the left side on a computed solve and the data side on its
input, and records their ratio as the implied constant. Tracking that
ratio across viscosities is how "C independent of eps and eta" is checked
on a grid.

Audits are observability only: they never stop a solve.

The viscosity weights of the gradient, vorticity and higher-order audits
use :func:`resolved_eps` on both sides. Below the mesh, the wall layer of
width ``sqrt(eps L)`` stops thinning, so discrete derivatives saturate and
a bare ``eps`` weight would shrink the left side with no change in the
solution.
"""

import dataclasses
import math
import typing as ty

from shearflow import _log
from shearflow.lib import grid as sf_grid
from shearflow.lib import linsolve
from shearflow.lib import norms

LOG = _log.setup_logging(__name__)

Side = sf_grid.Side
dx = sf_grid.apply_dx
dy = sf_grid.apply_dy

ZERO = 1e-14
STABILITY_SPREAD = 10.0

DENSITY = "density"
CURL = "curl"
STREAMWISE = "streamwise"
CURL_BOUNDARY = "curl_boundary"
VELOCITY_H2 = "velocity_h2"
DENSITY_SECOND = "density_second"
DIV_GRADIENT = "div_gradient"
WEIGHTED_THIRD = "weighted_third"
LINEAR = "linear"
ITERATION_NORMS = "iteration_norms"
SOLUTION_NORMS = "solution_norms"

AUDIT_NAMES = (
    LINEAR, DENSITY, CURL, STREAMWISE, CURL_BOUNDARY, VELOCITY_H2,
    DENSITY_SECOND, DIV_GRADIENT, WEIGHTED_THIRD, ITERATION_NORMS, SOLUTION_NORMS,
)


@dataclasses.dataclass(frozen=True)
class EstimateAudit:
    """One inequality measured on one solve."""

    name: str
    lhs: float
    rhs_data: float
    params: ty.Dict[str, float]
    length: float
    p: ty.Optional[float] = None
    t: float = 1.0

    @property
    def vacuous(self) -> bool:
        return self.rhs_data <= ZERO and self.lhs <= ZERO

    @property
    def flagged(self) -> bool:
        """Nonzero left side against vanishing data."""
        return self.rhs_data <= ZERO and self.lhs > ZERO

    @property
    def implied_constant(self) -> float:
        if self.rhs_data > ZERO:
            return self.lhs / self.rhs_data
        return math.inf if self.flagged else 0.0

    def row(self) -> ty.Dict[str, ty.Any]:
        return {
            "name": self.name,
            "eps": self.params["eps"],
            "eta": self.params["eta"],
            "L": self.length,
            "p": "" if self.p is None else self.p,
            "lhs": self.lhs,
            "rhs": self.rhs_data,
            "constant": self.implied_constant,
        }


def _lp_many(fields, p):
    return sum(norms.lp(f, p) ** p for f in fields) ** (1.0 / p)


def _w1p(f, p):
    return sum(norms.lp(d, p) ** p for m in range(2) for d in norms.derivatives(f, m)) ** (
        1.0 / p
    )


def _inflow(f):
    return f.trace(Side.X0)


@dataclasses.dataclass(frozen=True)
class DataNorms:
    """Norms of the linear data ``(g0, g1, g2)`` used on the data side."""

    g0_l2: float
    g0_h1: float
    g0_h2: float
    g_l2: float
    g_h1: float
    curl_g_l2: float
    curl_g_h1: float
    g_inflow: float
    g2_inflow: float
    g2y_inflow: float
    g0y_inflow: float
    g0yy_inflow: float
    g0_inflow_h1: float

    @classmethod
    def from_input(cls, inp: linsolve.LinearInput) -> "DataNorms":
        g0, g1, g2 = inp.g0, inp.g.u, inp.g.v
        curl_g = sf_grid.curl2d(inp.g)
        return cls(
            g0_l2=norms.l2(g0),
            g0_h1=norms.h1(g0),
            g0_h2=norms.h2(g0),
            g_l2=norms.l2_many([g1, g2]),
            g_h1=math.hypot(norms.h1(g1), norms.h1(g2)),
            curl_g_l2=norms.l2(curl_g),
            curl_g_h1=norms.h1(curl_g),
            g_inflow=math.hypot(norms.trace_l2(_inflow(g1)), norms.trace_l2(_inflow(g2))),
            g2_inflow=norms.trace_l2(_inflow(g2)),
            g2y_inflow=norms.trace_l2(sf_grid.trace_derivative(_inflow(g2), 1)),
            g0y_inflow=norms.trace_l2(sf_grid.trace_derivative(_inflow(g0), 1)),
            g0yy_inflow=norms.trace_l2(sf_grid.trace_derivative(_inflow(g0), 2)),
            g0_inflow_h1=norms.trace_sobolev(_inflow(g0), 1),
        )

    def low(self, eps: float) -> float:
        """Data side of the iteration-space estimates."""
        return (
            self.g0_h1 + eps * self.g0y_inflow + self.g_l2 + self.curl_g_l2 + self.g2_inflow
        )

    def high(self, eps: float) -> float:
        """Data side of the solution-space estimates."""
        root = math.sqrt(eps)
        return (
            root * self.g0_h2 + self.g_l2 + self.g2_inflow + self.g0_h1 + self.curl_g_l2
            + root * self.curl_g_h1 + eps * self.g0yy_inflow + root * self.g_h1
            + root * self.g2y_inflow
        )


def resolved_eps(grid: sf_grid.Grid, eps: float) -> float:
    """``max(eps, h^2 / L)`` with ``h`` the coarser spacing."""
    h = max(grid.hx, grid.hy)
    return max(eps, h**2 / grid.length)


class _Solved:
    """Derived quantities of one solve shared by the audits."""

    def __init__(self, sol: linsolve.LinearOutput, inp: linsolve.LinearInput):
        self.sol = sol
        self.inp = inp
        self.params = inp.params
        self.eps = resolved_eps(inp.grid, inp.params.eps)
        self.t = inp.t
        self.length = inp.grid.length
        self.w = sol.velocity
        self.curl = sf_grid.curl2d(self.w)
        self.div = sf_grid.divergence(self.w)
        self.u_x, self.v_x = dx(sol.u), dx(sol.v)
        self.rho_x, self.rho_y = dx(sol.rho), dy(sol.rho)
        self.data = DataNorms.from_input(inp)

    def audit(self, name, lhs, rhs, p=None) -> EstimateAudit:
        params = dict(self.params.snapshot(), eps_weight=self.eps)
        result = EstimateAudit(name, float(lhs), float(rhs), params, self.length, p, self.t)
        LOG.debug(
            "audit %s at eps=%g: lhs=%.3e rhs=%.3e C=%.3e", name, self.params.eps,
            result.lhs, result.rhs_data, result.implied_constant,
        )
        return result

    @property
    def a1(self) -> float:
        return self.t * (norms.l2(self.u_x) + norms.l2(self.v_x))

    @property
    def a2(self) -> float:
        curl_x, curl_y = dx(self.curl), dy(self.curl)
        weight = math.sqrt(self.t * self.eps)
        return (
            self.t * norms.l2(curl_x)
            + weight * norms.trace_l2(curl_x.trace(Side.X0))
            + weight * norms.trace_l2(curl_y.trace(Side.XL))
        )


def audit_density(sol, inp, p: float = 2.0) -> EstimateAudit:
    """``L^p`` bounds on the density gradient.

    :param sol: :class:`~shearflow.lib.linsolve.LinearOutput`
    :param inp: The :class:`~shearflow.lib.linsolve.LinearInput` it solves
    :param p: Integrability exponent, ``p >= 2``
    """
    s = _Solved(sol, inp)
    eps, eta = s.params.eps, s.params.eta
    weight = eps ** (1.0 / p) * eta ** (2.0 / p)
    lhs = (
        norms.lp(s.rho_x, p) + norms.lp(s.rho_y, p)
        + norms.trace_lp(s.rho_y.trace(Side.X0), p)
        + weight * norms.column_max_lp([s.rho_x, s.rho_y], p)
    )
    g0y = sf_grid.trace_derivative(_inflow(inp.g0), 1)
    rhs = (
        weight * norms.trace_lp(_inflow(inp.g.v), p)
        + _lp_many([inp.g.u, inp.g.v], p)
        + eps * norms.trace_lp(g0y, p)
        + eps * norms.h2(sol.Hc)
        + s.t * _lp_many([s.u_x, s.v_x], p)
        + eps * _w1p(inp.g0, p)
    )
    return s.audit(DENSITY, lhs, rhs, p)


def audit_curl(sol, inp) -> EstimateAudit:
    """Vorticity in ``H^2`` against the streamwise gradient and data."""
    s = _Solved(sol, inp)
    eps, eta2 = s.eps, s.params.eta**2
    lhs = eps * norms.hk(s.curl, 2) + s.a2
    rhs = (
        s.length * s.a1 + s.data.g0_l2 + s.data.curl_g_l2
        + eta2 * norms.l2_many([s.rho_x, s.rho_y])
    )
    return s.audit(CURL, lhs, rhs)


def audit_A1(sol, inp) -> EstimateAudit:
    """Squared streamwise gradient ``(t ||u_x|| + t ||v_x||)^2``."""
    s = _Solved(sol, inp)
    eps, eta2 = s.eps, s.params.eta**2
    grad_x = [dx(s.u_x), dy(s.u_x), dx(s.v_x), dy(s.v_x)]
    d = s.data
    rhs = (
        s.length * s.a2**2
        + s.length * eps**2 * norms.l2_many(grad_x) ** 2
        + d.g0_h1**2 + d.g2_inflow**2 + eps * d.g0_inflow_h1**2
        + eta2 * norms.l2_many([s.rho_x, s.rho_y]) ** 2
        + eta2**2 * norms.trace_l2(s.rho_x.trace(Side.XL)) ** 2
        + d.g_l2**2
        + norms.l2(s.rho_x) * d.g0_l2
    )
    return s.audit(STREAMWISE, s.a1**2, rhs)


def audit_higher(sol, inp) -> ty.List[EstimateAudit]:
    """The five higher-order bounds, in order: vorticity traces, velocity
    ``H^2``, second density derivatives, divergence gradient and the
    outflow-weighted third derivatives.
    """
    s = _Solved(sol, inp)
    p, d = s.params, s.data
    eps, eta, eta2 = s.eps, p.eta, p.eta**2
    root = math.sqrt(eps)
    high = d.high(eps)
    u, v = sol.u, sol.v
    audits = []

    curl_xx, curl_xy = sf_grid.apply_dxx(s.curl), sf_grid.apply_dxy(s.curl)
    lhs = eps**1.5 * (
        norms.trace_l2(curl_xx.trace(Side.XL)) + norms.trace_l2(curl_xy.trace(Side.X0))
    )
    rhs = (
        eps * d.g0y_inflow + d.g_l2 + d.g2_inflow + d.g0_h1 + d.curl_g_l2
        + root * d.curl_g_h1
    )
    audits.append(s.audit(CURL_BOUNDARY, lhs, rhs))

    rho_xy = dx(s.rho_y)
    lhs = norms.trace_l2(s.u_x.trace(Side.X0)) + root * norms.vector_h2(s.w)
    rhs = (
        root * d.g0_h2 + d.g_l2 + d.g_inflow + d.g0_h1 + d.curl_g_l2
        + math.sqrt(s.length * eps) * eta2 * norms.trace_l2(rho_xy.trace(Side.XL))
        + root * d.g_h1
    )
    audits.append(s.audit(VELOCITY_H2, lhs, rhs))

    rho_xx, rho_yy = sf_grid.apply_dxx(sol.rho), sf_grid.apply_dyy(sol.rho)
    lhs = (
        eps * eta * norms.l2(rho_xx)
        + root * norms.l2_many([rho_xy, rho_yy])
        + eps * eta2 * norms.column_max_l2(rho_xx)
        + eps * eta * norms.column_max_many([rho_xy, rho_yy])
        + root * norms.trace_l2(rho_yy.trace(Side.X0))
    )
    audits.append(s.audit(DENSITY_SECOND, lhs, high))

    div_y = dy(s.div)
    lhs = eps**1.5 * norms.l2_many(norms.derivatives(div_y, 1)) + eps**2 * eta * norms.l2(
        sf_grid.apply_dxx(s.div)
    )
    audits.append(s.audit(DIV_GRADIENT, lhs, high))

    u_y = dy(u)
    lhs = (
        eps**1.5 * norms.l2_many(norms.weighted(f) for f in norms.derivatives(u_y, 2))
        + eps**2 * eta * norms.l2(norms.weighted(dx(sf_grid.apply_dxx(u))))
        + eps**1.5 * norms.l2_many(norms.weighted(f) for f in norms.derivatives(v, 3))
    )
    audits.append(s.audit(WEIGHTED_THIRD, lhs, high))
    return audits


def audit_linear(sol, inp) -> EstimateAudit:
    """Combined estimate in the iteration spaces with its homotopy weights."""
    s = _Solved(sol, inp)
    eps, t = s.params.eps, s.t
    lhs = (
        s.a1 + s.a2
        + norms.norm_Y(sol.rho, s.params).total
        + eps * norms.hk(s.curl, 2)
        + math.sqrt(t * eps) * norms.h1(s.curl)
        + t * norms.vector_h1(s.w)
        + eps * norms.vector_h2(s.w)
        + eps * norms.trace_l2(dy(s.div).trace(Side.X0))
    )
    return s.audit(LINEAR, lhs, s.data.low(eps))


def audit_iteration_norms(sol, inp) -> EstimateAudit:
    s = _Solved(sol, inp)
    eps = s.params.eps
    lhs = (
        norms.norm_Y(sol.rho, s.params).total
        + eps * norms.hk(s.curl, 2)
        + norms.norm_X(s.w, s.params).total
    )
    return s.audit(ITERATION_NORMS, lhs, s.data.low(eps))


def audit_solution_norms(sol, inp, p: float = norms.DEFAULT_P) -> EstimateAudit:
    s = _Solved(sol, inp)
    lhs = norms.norm_B(s.w, s.params, p).total + norms.norm_A(sol.rho, s.params, p).total
    return s.audit(SOLUTION_NORMS, lhs, s.data.high(s.params.eps), p)


def audit_all(sol, inp, p: float = norms.DEFAULT_P) -> ty.List[EstimateAudit]:
    """Every audit of one solve, density at ``p = 2`` and ``p = 4``."""
    audits = [audit_linear(sol, inp)]
    audits.extend(audit_density(sol, inp, q) for q in (2.0, 4.0))
    audits.append(audit_curl(sol, inp))
    audits.append(audit_A1(sol, inp))
    audits.extend(audit_higher(sol, inp))
    audits.append(audit_iteration_norms(sol, inp))
    audits.append(audit_solution_norms(sol, inp, p))
    return audits


def constant_spread(audits: ty.Iterable[EstimateAudit]) -> ty.Dict[str, float]:
    """Max over min implied constant per audit name (and exponent) across
    parameter points, ignoring vacuous and flagged records.
    """
    grouped: ty.Dict[str, ty.List[float]] = {}
    for audit in audits:
        if audit.vacuous or audit.flagged:
            continue
        key = audit.name if audit.p is None else "{0}_p{1:g}".format(audit.name, audit.p)
        grouped.setdefault(key, []).append(audit.implied_constant)
    spread = {}
    for key, values in grouped.items():
        low = min(values)
        spread[key] = max(values) / low if low > 0.0 else math.inf
    return spread
