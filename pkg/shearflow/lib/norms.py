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
norms
-----

The anisotropic Sobolev norms used to measure remainders: the solution
spaces A (density) and B (velocity), the iteration norms X and Y, and the
scalar building blocks (L^p, H^k, column-max L_x^inf L_y^2, weighted and
trace norms) they are assembled from.

Every report keeps its individual terms so that the harness can log which
term dominates at a given viscosity.
"""

import collections
import dataclasses
import itertools
import math
import typing as ty

import numpy as np
from scipy import integrate as spint

from shearflow.lib import grid as sf_grid

DEFAULT_P = 4.0


@dataclasses.dataclass(frozen=True)
class NormReport:
    """Per-term breakdown of one composite norm."""

    kind: str
    terms: ty.Dict[str, float]
    eps: float
    eta: float
    p: ty.Optional[float] = None

    @property
    def total(self) -> float:
        return float(sum(self.terms.values()))

    def __float__(self):
        return self.total

    def rows(self):
        for name, value in self.terms.items():
            yield "{0}:{1}".format(self.kind, name), value
        yield "{0}:total".format(self.kind), self.total


def lp(f: sf_grid.ScalarField, p: float = 2.0) -> float:
    """L^p norm over the channel by trapezoidal quadrature."""
    integrand = sf_grid.ScalarField(f.grid, np.abs(f.values) ** p)
    return sf_grid.integrate(integrand) ** (1.0 / p)


def l2(f: sf_grid.ScalarField) -> float:
    return lp(f, 2.0)


def l2_many(fields: ty.Iterable[sf_grid.ScalarField]) -> float:
    """Euclidean combination of L^2 norms, for vector or tensor fields."""
    return math.sqrt(sum(l2(f) ** 2 for f in fields))


def derivatives(f: sf_grid.ScalarField, order: int) -> ty.List[sf_grid.ScalarField]:
    """All partial derivatives of exactly ``order``, one per multi-index.

    Second derivatives use the dedicated three-point stencils; higher orders
    are built by applying first derivatives on top.
    """
    if order == 0:
        return [f]
    if order == 1:
        return [sf_grid.apply_dx(f), sf_grid.apply_dy(f)]
    if order == 2:
        return [sf_grid.apply_dxx(f), sf_grid.apply_dxy(f), sf_grid.apply_dyy(f)]
    lower = derivatives(f, order - 1)
    # lower[k] is d_x^(order-1-k) d_y^k f
    result = [sf_grid.apply_dx(lower[0])]
    result.extend(sf_grid.apply_dy(d) for d in lower)
    return result


def hk(f: sf_grid.ScalarField, k: int) -> float:
    return math.sqrt(sum(l2(d) ** 2 for m in range(k + 1) for d in derivatives(f, m)))


def h1(f: sf_grid.ScalarField) -> float:
    return hk(f, 1)


def h2(f: sf_grid.ScalarField) -> float:
    return hk(f, 2)


def w2p(f: sf_grid.ScalarField, p: float) -> float:
    """W^{2,p} norm: p-sum of the L^p norms of all derivatives up to order 2."""
    total = sum(lp(d, p) ** p for m in range(3) for d in derivatives(f, m))
    return total ** (1.0 / p)


def column_max_l2(f: sf_grid.ScalarField) -> float:
    """``ess sup_x |f(x, .)|_{L^2(0,2)}`` realized as a max over grid columns."""
    columns = spint.trapezoid(f.values**2, f.grid.y, axis=1)
    return float(math.sqrt(np.max(columns)))


def column_max_many(fields: ty.Sequence[sf_grid.ScalarField]) -> float:
    """Column max of the pointwise Euclidean norm of several fields."""
    squared = sum(f.values**2 for f in fields)
    columns = spint.trapezoid(squared, fields[0].grid.y, axis=1)
    return float(math.sqrt(np.max(columns)))


def column_max_lp(fields: ty.Sequence[sf_grid.ScalarField], p: float) -> float:
    """``ess sup_x |f(x, .)|_{L^p(0,2)}`` of the pointwise Euclidean norm."""
    magnitude = np.sqrt(sum(f.values**2 for f in fields))
    columns = spint.trapezoid(magnitude**p, fields[0].grid.y, axis=1)
    return float(np.max(columns) ** (1.0 / p))


def weighted(f: sf_grid.ScalarField) -> sf_grid.ScalarField:
    """Multiply by the outflow weight ``L - x``."""
    X, _ = f.grid.mesh()
    return f * (f.grid.length - X)


def trace_lp(trace: sf_grid.Trace, p: float = 2.0) -> float:
    return float(spint.trapezoid(np.abs(trace.values) ** p, trace.nodes) ** (1.0 / p))


def trace_l2(trace: sf_grid.Trace) -> float:
    return trace_lp(trace, 2.0)


def trace_sobolev(trace: sf_grid.Trace, k: int) -> float:
    """Full H^k norm of a boundary trace from 1D finite differences."""
    total = 0.0
    for m in range(k + 1):
        total += trace_l2(sf_grid.trace_derivative(trace, m)) ** 2
    return math.sqrt(total)


def sequence_sobolev(values, nodes, k: int) -> float:
    """H^k norm of a sampled 1D profile."""
    trace = sf_grid.Trace(sf_grid.Side.X0, np.asarray(nodes), np.asarray(values))
    return trace_sobolev(trace, k)


def vector_h1(w: sf_grid.VectorField) -> float:
    return math.hypot(h1(w.u), h1(w.v))


def vector_h2(w: sf_grid.VectorField) -> float:
    return math.hypot(h2(w.u), h2(w.v))


def hessian_l2(w: sf_grid.VectorField) -> float:
    """``||grad^2 u||`` over both components."""
    return l2_many(itertools.chain(derivatives(w.u, 2), derivatives(w.v, 2)))


def vector_w2p(w: sf_grid.VectorField, p: float) -> float:
    return (w2p(w.u, p) ** p + w2p(w.v, p) ** p) ** (1.0 / p)


def norm_A(rho: sf_grid.ScalarField, params, p: ty.Optional[float] = None) -> NormReport:
    """Density norm of the solution space.

    :param rho: The density remainder
    :param params: A :class:`~shearflow.lib.background.FlowParams`
    :returns: :class:`NormReport` with eight terms
    """
    eps, eta = params.eps, params.eta
    rho_x, rho_y = sf_grid.apply_dx(rho), sf_grid.apply_dy(rho)
    rho_xx = sf_grid.apply_dxx(rho)
    rho_xy, rho_yy = sf_grid.apply_dx(rho_y), sf_grid.apply_dyy(rho)
    inflow = rho.trace(sf_grid.Side.X0)

    terms = collections.OrderedDict()
    terms["H1"] = h1(rho)
    terms["grad_colmax"] = math.sqrt(eps) * eta * column_max_many([rho_x, rho_y])
    terms["rho_xx"] = eps * eta * l2(rho_xx)
    terms["grad_rho_y"] = math.sqrt(eps) * l2_many([rho_xy, rho_yy])
    terms["rho_xx_colmax"] = eps**1.5 * eta**2 * column_max_l2(rho_xx)
    terms["grad_rho_y_colmax"] = eps * eta * column_max_many([rho_xy, rho_yy])
    terms["inflow_H1"] = trace_sobolev(inflow, 1)
    terms["inflow_rho_yy"] = math.sqrt(eps) * trace_l2(
        sf_grid.trace_derivative(inflow, 2)
    )
    return NormReport("A", dict(terms), eps, eta, p)


def norm_B(w: sf_grid.VectorField, params, p: float = DEFAULT_P) -> NormReport:
    """Velocity norm of the solution space.

    :param w: The velocity remainder
    :param params: A :class:`~shearflow.lib.background.FlowParams`
    :param p: Integrability exponent of the W^{2,p} terms, ``2 <= p``
    :returns: :class:`NormReport` with eleven terms
    """
    eps, eta = params.eps, params.eta
    u, v = w.u, w.v
    curl = sf_grid.curl2d(w)
    div = sf_grid.divergence(w)
    div_y = sf_grid.apply_dy(div)
    u_y = sf_grid.apply_dy(u)
    weight = 2.0 - 2.0 / p

    terms = collections.OrderedDict()
    terms["H1"] = vector_h1(w)
    terms["hessian"] = math.sqrt(eps) * hessian_l2(w)
    terms["curl_H1"] = math.sqrt(eps) * h1(curl)
    terms["W2p"] = eps**weight * vector_w2p(w, p)
    terms["curl_W2p"] = eps**weight * w2p(curl, p)
    terms["inflow_div_yy"] = eps**1.5 * trace_l2(
        sf_grid.trace_derivative(div.trace(sf_grid.Side.X0), 2)
    )
    terms["div_xx"] = eps**2 * eta * l2(sf_grid.apply_dxx(div))
    terms["weighted_hess_u_y"] = eps**1.5 * l2_many(
        weighted(d) for d in derivatives(u_y, 2)
    )
    terms["weighted_grad3_v"] = eps**1.5 * l2_many(
        weighted(d) for d in derivatives(v, 3)
    )
    terms["weighted_u_xxx"] = eps**2 * eta * l2(
        weighted(sf_grid.apply_dx(sf_grid.apply_dxx(u)))
    )
    terms["grad_div_y"] = eps**1.5 * l2_many(derivatives(div_y, 1))
    return NormReport("B", dict(terms), eps, eta, p)


def norm_X(w: sf_grid.VectorField, params) -> NormReport:
    eps = params.eps
    div_y = sf_grid.apply_dy(sf_grid.divergence(w))

    terms = collections.OrderedDict()
    terms["H1"] = vector_h1(w)
    terms["curl_H1"] = math.sqrt(eps) * h1(sf_grid.curl2d(w))
    terms["H2"] = eps * vector_h2(w)
    terms["inflow_div_y"] = eps * trace_l2(div_y.trace(sf_grid.Side.X0))
    return NormReport("X", dict(terms), eps, params.eta)


def norm_Y(rho: sf_grid.ScalarField, params) -> NormReport:
    eps, eta = params.eps, params.eta
    rho_x, rho_y = sf_grid.apply_dx(rho), sf_grid.apply_dy(rho)

    terms = collections.OrderedDict()
    terms["H1"] = h1(rho)
    terms["inflow_rho_y"] = trace_l2(sf_grid.trace_derivative(rho.trace(sf_grid.Side.X0), 1))
    terms["grad_colmax"] = math.sqrt(eps) * eta * column_max_many([rho_x, rho_y])
    return NormReport("Y", dict(terms), eps, eta)
