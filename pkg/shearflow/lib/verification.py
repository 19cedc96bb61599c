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
verification
------------

Manufactured-solution suites. Every suite picks a closed-form solution,
derives the matching data symbolically, solves on a sequence of doubled
grids and reports the max-norm errors and their reduction ratios.
"""

import dataclasses
import typing as ty

import numpy as np
import sympy

from shearflow import _log
from shearflow.lib import background
from shearflow.lib import elliptic
from shearflow.lib import grid as sf_grid
from shearflow.lib import linsolve

LOG = _log.setup_logging(__name__)

Side = sf_grid.Side
X, Y = sympy.symbols("x y")

DEFAULT_SIZES = (16, 32, 64)
SECOND_ORDER_BAND = (3.2, 4.8)
FIRST_ORDER_BAND = (1.8, 4.8)

POISSON_PATTERNS = {
    "dirichlet": {side: ("dirichlet",) for side in Side},
    "curl": linsolve.CURL_KINDS,
    "flux": linsolve.FLUX_KINDS,
    "potential": linsolve.PHI_KINDS,
}


@dataclasses.dataclass(frozen=True)
class SuiteResult:
    name: str
    sizes: ty.Tuple[int, ...]
    errors: ty.Tuple[float, ...]
    band: ty.Tuple[float, float]

    @property
    def ratios(self) -> ty.List[float]:
        return [a / b if b > 0.0 else float("inf")
                for a, b in zip(self.errors, self.errors[1:])]

    @property
    def passed(self) -> bool:
        low, high = self.band
        return all(low <= r <= high for r in self.ratios)


def _sampler(expr, variables=(X, Y)):
    fn = sympy.lambdify(variables, expr, modules="numpy")
    return lambda *args: np.broadcast_to(fn(*args), np.broadcast(*args).shape)


def _field(grid, expr):
    return grid.field(_sampler(expr))


def _derivative_data(grid, expr, side, kind):
    order = elliptic.KIND_ORDER.index(kind)
    var = X if side.axis == 0 else Y
    return _field(grid, sympy.diff(expr, var, order)).trace(side)


def _conditions(grid, expr, kinds):
    return {
        side: tuple(
            elliptic.Condition(kind, _derivative_data(grid, expr, side, kind))
            for kind in kinds[side]
        )
        for side in Side
    }


def _run(name, sizes, band, error_at) -> SuiteResult:
    errors = tuple(float(error_at(n)) for n in sizes)
    result = SuiteResult(name, tuple(sizes), errors, band)
    LOG.info("suite %s: errors %s ratios %s", name,
             ", ".join("{0:.3e}".format(e) for e in errors),
             ", ".join("{0:.2f}".format(r) for r in result.ratios))
    return result


def poisson_suite(pattern: str, sizes=DEFAULT_SIZES, length: float = 0.25) -> SuiteResult:
    """Poisson problem with inhomogeneous data for one boundary pattern."""
    kinds = POISSON_PATTERNS[pattern]
    exact = sympy.sin(3 * X + 0.2) * sympy.cos(1.1 * Y + 0.3) + X * Y**2 / 4
    source = sympy.diff(exact, X, 2) + sympy.diff(exact, Y, 2)

    def error_at(n):
        grid = sf_grid.Grid.square(n, length)
        problem = elliptic.EllipticProblem(
            elliptic.POISSON, _field(grid, source), _conditions(grid, exact, kinds)
        )
        return (elliptic.solve_poisson(problem) - _field(grid, exact)).max_abs()

    return _run("poisson:" + pattern, sizes, SECOND_ORDER_BAND, error_at)


def biharmonic_suite(sizes=DEFAULT_SIZES, length: float = 0.25) -> SuiteResult:
    """Biharmonic problem with the side pairs the boundary lift uses."""
    kinds = {
        Side.X0: (elliptic.DIRICHLET, elliptic.SECOND),
        Side.XL: (elliptic.NEUMANN, elliptic.THIRD),
        Side.Y0: (elliptic.DIRICHLET, elliptic.NEUMANN),
        Side.Y2: (elliptic.DIRICHLET, elliptic.NEUMANN),
    }
    exact = sympy.cos(2 * X + 0.1) * sympy.sin(0.8 * Y + 0.2) + X**2 * Y / 3
    lap = sympy.diff(exact, X, 2) + sympy.diff(exact, Y, 2)
    source = sympy.diff(lap, X, 2) + sympy.diff(lap, Y, 2)

    def error_at(n):
        grid = sf_grid.Grid.square(n, length)
        problem = elliptic.EllipticProblem(
            elliptic.BIHARMONIC, _field(grid, source), _conditions(grid, exact, kinds)
        )
        return (elliptic.solve_biharmonic(problem) - _field(grid, exact)).max_abs()

    return _run("biharmonic", sizes, SECOND_ORDER_BAND, error_at)


def curl_suite(sizes=DEFAULT_SIZES, eps: float = 0.1, length: float = 0.25) -> SuiteResult:
    """Vorticity operator ``eps lap H - u_s H_x`` with homogeneous data."""
    params = background.FlowParams(eps=eps)
    us = params.alpha0 + params.alpha1 * Y + params.alpha2 * Y * (2 - Y)
    exact = sympy.sin(sympy.pi * X / (2 * length)) * sympy.sin(sympy.pi * Y / 2)
    source = eps * (sympy.diff(exact, X, 2) + sympy.diff(exact, Y, 2)) - us * sympy.diff(
        exact, X
    )

    def error_at(n):
        grid = sf_grid.Grid.square(n, length)
        op = elliptic.EllipticOperator(
            grid, elliptic.POISSON, linsolve.CURL_KINDS, coefficient=eps,
            drift=-background.shear_field(params, grid).values,
        )
        bc = {side: (elliptic.dirichlet(),) for side in Side}
        bc[Side.XL] = (elliptic.neumann(),)
        return (op.solve(_field(grid, source), bc) - _field(grid, exact)).max_abs()

    return _run("curl", sizes, SECOND_ORDER_BAND, error_at)


def inflow_ode_suite(sizes=DEFAULT_SIZES, gamma: float = 1.4,
                     coefficient: float = 0.5) -> SuiteResult:
    """``gamma r + a (v0 r)' = S`` on ``[0, 2]`` with ``v0`` vanishing at
    both ends.
    """
    v0 = sympy.sin(sympy.pi * Y) / 2
    exact = sympy.cos(sympy.pi * Y) + Y / 3
    source = gamma * exact + coefficient * sympy.diff(v0 * exact, Y)
    v0_at, exact_at, source_at = (_sampler(e, (Y,)) for e in (v0, exact, source))

    def error_at(n):
        y = np.linspace(0.0, sf_grid.HEIGHT, n + 1)
        r = linsolve.solve_inflow_ode(source_at(y), v0_at(y), y, gamma, coefficient)
        return np.max(np.abs(r.values - exact_at(y)))

    return _run("inflow_ode", sizes, SECOND_ORDER_BAND, error_at)


def transport_suite(sizes=DEFAULT_SIZES, eps: float = 0.5, eta: float = 0.6,
                    gamma: float = 1.4, length: float = 0.25) -> SuiteResult:
    """Upwind transport ``gamma rho + 2 eps eta^2 w . grad rho = S``; first
    order in x.
    """
    coefficient = 2.0 * eps * eta**2
    wu = 1 + Y / 2
    wv = sympy.sin(sympy.pi * Y) / 10
    exact = sympy.sin(4 * X + Y) + Y**2 / 4
    source = gamma * exact + coefficient * (
        wu * sympy.diff(exact, X) + wv * sympy.diff(exact, Y)
    )
    LOG.debug("transport suite coefficient 2 eps eta^2 = %.3e", coefficient)

    def error_at(n):
        grid = sf_grid.Grid.square(n, length)
        w = sf_grid.VectorField(_field(grid, wu), _field(grid, wv))
        inflow = _field(grid, exact).trace(Side.X0).values
        rho = linsolve.march_transport(w, _field(grid, source), inflow, gamma, coefficient)
        return (rho - _field(grid, exact)).max_abs()

    return _run("transport", sizes, FIRST_ORDER_BAND, error_at)


def run_suites(sizes=DEFAULT_SIZES) -> ty.List[SuiteResult]:
    """Every manufactured suite at the given grid sizes."""
    results = [poisson_suite(pattern, sizes) for pattern in POISSON_PATTERNS]
    results.append(biharmonic_suite(sizes))
    results.append(curl_suite(sizes))
    results.append(inflow_ode_suite(sizes))
    results.append(transport_suite(sizes))
    return results
