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
picard
------

Outer nonlinear iteration. The physical fields are expanded as

    u^eps   = u_s + u_bar + e u
    v^eps   = v_bar + e v
    rho^eps = 1 + eta^2 (R0 + e rho),   R0 = -(2/gamma) alpha2 eps x + rho_bar

with ``e = eps^(1/2+delta)``. Each step freezes the transport velocity at
the previous iterate, evaluates the source terms ``g`` from it and solves
the linear problem for the next remainder ``(u, v, rho)``.

The source terms are arranged so that, with the same grid operators,
``L(state) - g(state)`` equals the non-conservative residual of the full
equations divided by ``e``.
"""

import dataclasses
import typing as ty

import numpy as np

from shearflow import _log
from shearflow import exceptions
from shearflow.lib import background
from shearflow.lib import grid as sf_grid
from shearflow.lib import homogenize
from shearflow.lib import linsolve
from shearflow.lib import norms

LOG = _log.setup_logging(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 50
CONTRACTION_LIMIT = 0.95
CONTRACTION_PATIENCE = 3
ENVELOPE_FACTOR = 10.0

dx = sf_grid.apply_dx
dy = sf_grid.apply_dy


@dataclasses.dataclass(frozen=True, eq=False)
class State:
    u: sf_grid.ScalarField
    v: sf_grid.ScalarField
    rho: sf_grid.ScalarField
    n: int = 0

    @property
    def grid(self) -> sf_grid.Grid:
        return self.u.grid

    @property
    def velocity(self) -> sf_grid.VectorField:
        return sf_grid.VectorField(self.u, self.v)

    @classmethod
    def zero(cls, grid: sf_grid.Grid) -> "State":
        z = grid.zeros()
        return cls(z, z, z, 0)

    @classmethod
    def from_output(cls, out: linsolve.LinearOutput, n: int) -> "State":
        return cls(out.u, out.v, out.rho, n)

    def scaled(self, factor: float) -> "State":
        return State(self.u * factor, self.v * factor, self.rho * factor, self.n)


@dataclasses.dataclass(frozen=True, eq=False)
class GTerms:
    g01: sf_grid.ScalarField
    g0r: sf_grid.ScalarField
    g11: sf_grid.ScalarField
    g12: sf_grid.ScalarField
    g1r: sf_grid.ScalarField
    g21: sf_grid.ScalarField
    g22: sf_grid.ScalarField
    g2r: sf_grid.ScalarField

    @property
    def g0(self) -> sf_grid.ScalarField:
        return self.g01 + self.g0r

    @property
    def g1(self) -> sf_grid.ScalarField:
        return self.g11 + self.g12 + self.g1r

    @property
    def g2(self) -> sf_grid.ScalarField:
        return self.g21 + self.g22 + self.g2r

    @property
    def g(self) -> sf_grid.VectorField:
        return sf_grid.VectorField(self.g1, self.g2)


@dataclasses.dataclass(frozen=True)
class IterationRow:
    n: int
    delta_x: float
    delta_y: float
    ratio: ty.Optional[float]
    norm_b: float
    norm_a: float

    @property
    def increment(self) -> float:
        return self.delta_x + self.delta_y


@dataclasses.dataclass
class IterationReport:
    eps: float
    rows: ty.List[IterationRow] = dataclasses.field(default_factory=list)
    converged: bool = False
    envelope: float = 1.0
    residual: ty.Dict[str, float] = dataclasses.field(default_factory=dict)
    last_input: ty.Optional[linsolve.LinearInput] = None
    last_output: ty.Optional[linsolve.LinearOutput] = None

    def __len__(self):
        return len(self.rows)

    @property
    def iterations(self) -> int:
        return len(self.rows)

    @property
    def max_ratio(self) -> float:
        """Largest contraction ratio after the first two iterates."""
        ratios = [r.ratio for r in self.rows if r.ratio is not None]
        return max(ratios) if ratios else 0.0

    @property
    def max_envelope_ratio(self) -> float:
        """Largest ``(||u^n||_B + ||rho^n||_A) / eps^(sigma/2)``."""
        if not self.rows:
            return 0.0
        return max(r.norm_b + r.norm_a for r in self.rows) / self.envelope


def _positive(values: np.ndarray, what: str) -> None:
    if np.min(values) <= 0.0:
        raise exceptions.PositivityError(
            "Reconstructed density is not positive ({0})".format(what),
            extra_data={"min_density": float(np.min(values))},
        )


class Expansion:
    """State-independent parts of the expansion for one ``(params, lift)``.

    :param params: :class:`~shearflow.lib.background.FlowParams`
    :param lift: :class:`~shearflow.lib.homogenize.Lift`
    :param rho_bar: Background density correction ``x h0(y) / eta^2``;
        zero when omitted
    """

    def __init__(self, params, lift, rho_bar=None):
        grid = lift.grid
        self.params = params
        self.lift = lift
        self.grid = grid
        self.rho_bar = grid.zeros() if rho_bar is None else rho_bar
        p = params
        self.e = p.scale
        self.eta2 = p.eta**2
        self.viscous = p.eps / self.e
        self.us = background.shear_field(p, grid)
        self.us_y = background.shear_y_field(p, grid)
        self.R0 = grid.field(lambda X, Y: -(2.0 / p.gamma) * p.alpha2 * p.eps * X) + self.rho_bar
        self.R0x, self.R0y = dx(self.R0), dy(self.R0)
        self.rho_bar_x, self.rho_bar_y = dx(self.rho_bar), dy(self.rho_bar)
        self.base = 1.0 + self.eta2 * self.R0
        _positive(self.base.values, "background")
        self.Pi0 = self.base.values ** (p.gamma - 1.0)
        self.U1 = self.us + lift.ubar
        self.U2 = lift.vbar
        self.div_bar = sf_grid.divergence(lift.velocity)
        self._remainders = self._remainder_terms()

    def _remainder_terms(self):
        p, e, base = self.params, self.e, self.base
        ub, vb = self.lift.ubar, self.lift.vbar
        U1, U2 = self.U1, self.U2
        w0 = U1 * dx(U1) + U2 * dy(U1)
        z0 = U1 * dx(vb) + U2 * dy(vb)
        g0r = -(base * self.div_bar + self.eta2 * (U1 * self.R0x + U2 * self.R0y)) / e
        g1r = -(
            base * w0 / e
            + 2.0 * p.alpha2 * self.viscous * (1.0 - self.Pi0)
            - self.viscous * (sf_grid.laplacian(ub) + dx(self.div_bar))
            + p.gamma * self.rho_bar_x * self.Pi0 / e
        )
        g2r = -(
            base * z0 / e
            - self.viscous * (sf_grid.laplacian(vb) + dy(self.div_bar))
            + p.gamma * self.rho_bar_y * self.Pi0 / e
        )
        return g0r, g1r, g2r

    def density(self, state: State) -> sf_grid.ScalarField:
        values = self.base.values + self.eta2 * self.e * state.rho.values
        _positive(values, "iterate {0}".format(state.n))
        return sf_grid.ScalarField(self.grid, values)

    def transport_velocity(self, state: State) -> sf_grid.VectorField:
        return sf_grid.VectorField(self.U1 + self.e * state.u, self.U2 + self.e * state.v)

    def g_terms(self, state: State) -> GTerms:
        p, e, eta2, base = self.params, self.e, self.eta2, self.base
        gamma = p.gamma
        u, v, rho = state.u, state.v, state.rho
        ub, vb = self.lift.ubar, self.lift.vbar
        self.density(state)

        # pressure factors rho^(gamma-1) - 1 and rho^(gamma-1) - Pi0
        Pi_1 = np.expm1((gamma - 1.0) * np.log1p(eta2 * (self.R0.values + e * rho.values)))
        Pi_Pi0 = self.Pi0 * np.expm1(
            (gamma - 1.0) * np.log1p(eta2 * e * rho.values / base.values)
        )
        ueps = self.transport_velocity(state)
        w = ueps.u * dx(ueps.u) + ueps.v * dy(ueps.u)
        z = ueps.u * dx(ueps.v) + ueps.v * dy(ueps.v)
        ux, uy, vx, vy = dx(u), dy(u), dx(v), dy(v)
        div = ux + vy

        g01 = -eta2 * (
            (self.R0 + e * rho) * div + rho * self.div_bar + u * self.R0x + v * self.R0y
        )
        g11 = -(
            eta2 * rho * w
            - 2.0 * p.alpha2 * self.viscous * Pi_Pi0
            + gamma * self.rho_bar_x * Pi_Pi0 / e
            + gamma * dx(rho) * Pi_1
        )
        g12 = -(
            base * (ub * ux + vb * uy + u * dx(ub) + v * dy(ub) + e * (u * ux + v * uy))
            + eta2 * self.R0 * (self.us * ux + self.us_y * v)
        )
        g21 = -(
            eta2 * rho * z
            + gamma * dy(rho) * Pi_1
            + gamma * self.rho_bar_y * Pi_Pi0 / e
        )
        g22 = -(
            base * (ub * vx + vb * vy + u * dx(vb) + v * dy(vb) + e * (u * vx + v * vy))
            + eta2 * self.R0 * self.us * vx
        )
        g0r, g1r, g2r = self._remainders
        return GTerms(g01, g0r, g11, g12, g1r, g21, g22, g2r)

    def printed_groupings(self, state: State):
        """``g12`` and ``g22`` with the density factor multiplying
        ``u ubar_x + u^eps u_x + v ubar_y + vbar u_y`` and
        ``u^eps v_x + u vbar_x + v^eps v_y + v vbar_y`` respectively.
        """
        e, eta2 = self.e, self.eta2
        u, v = state.u, state.v
        ub, vb = self.lift.ubar, self.lift.vbar
        ux, uy, vx, vy = dx(u), dy(u), dx(v), dy(v)
        ueps = self.transport_velocity(state)
        plain_1 = e * (u * ux + v * uy) + ub * ux + vb * uy + u * dx(ub) + v * dy(ub)
        plain_2 = e * (u * vx + v * vy) + ub * vx + vb * vy + u * dx(vb) + v * dy(vb)
        g12 = -(plain_1 + eta2 * self.R0 * (u * dx(ub) + ueps.u * ux + v * dy(ub) + vb * uy))
        g22 = -(plain_2 + eta2 * self.R0 * (ueps.u * vx + u * dx(vb) + ueps.v * vy + v * dy(vb)))
        return g12, g22

    def grouping_difference(self, state: State) -> float:
        """``max |g_derived - g_printed|`` over ``g12`` and ``g22``."""
        g = self.g_terms(state)
        g12, g22 = self.printed_groupings(state)
        return max((g.g12 - g12).max_abs(), (g.g22 - g22).max_abs())

    def reconstruct(self, state: State, tol: float = 1e-6):
        """Physical fields of ``state``.

        :raises: :class:`~shearflow.exceptions.NormalizationError` when
            ``rho^eps(0, 0)`` differs from 1 by more than ``tol``
        """
        ueps = self.transport_velocity(state)
        rhoeps = self.density(state)
        corner = abs(float(rhoeps.values[0, 0]) - 1.0)
        if corner > tol:
            raise exceptions.NormalizationError(
                "rho^eps(0,0) differs from 1 by {0:.3e}".format(corner),
                extra_data={"rho_corner": float(rhoeps.values[0, 0]), "tol": tol},
            )
        return ueps, rhoeps


def assemble_g(state: State, lift, params, rho_bar=None) -> GTerms:
    """Source terms of the linear problem evaluated at ``state``.

    :param state: The current remainder :class:`State`
    :param lift: The :class:`~shearflow.lib.homogenize.Lift`
    :param params: :class:`~shearflow.lib.background.FlowParams`
    :param rho_bar: Background density correction, zero when omitted
    :returns: :class:`GTerms`
    :raises: :class:`~shearflow.exceptions.PositivityError` when the
        reconstructed density is not positive
    """
    return Expansion(params, lift, rho_bar).g_terms(state)


def reconstruct(state: State, lift, params, rho_bar=None, tol: float = 1e-6):
    """Physical fields ``(u^eps, v^eps)`` and ``rho^eps`` of a state."""
    return Expansion(params, lift, rho_bar).reconstruct(state, tol)


def nonlinear_residual(ueps: sf_grid.VectorField, rhoeps: sf_grid.ScalarField, params,
                       bd: ty.Optional[background.BoundaryData] = None) -> ty.Dict[str, float]:
    """Residuals of the full steady equations with ``mu = lambda = a = 1``.

    Mass is reported both as ``rho div u + u . grad rho`` and in
    conservative form. With ``bd`` the boundary conditions of the full
    problem are measured too.
    """
    if np.min(rhoeps.values) <= 0.0:
        raise exceptions.PositivityError("Density must be positive")
    p = params
    u, v = ueps.u, ueps.v
    div = sf_grid.divergence(ueps)
    rho_x, rho_y = dx(rhoeps), dy(rhoeps)
    pressure = p.gamma * rhoeps.values ** (p.gamma - 1.0) / p.eta**2
    res_x = (
        rhoeps * (u * dx(u) + v * dy(u))
        - p.eps * sf_grid.laplacian(u)
        - p.eps * dx(div)
        + rho_x * pressure
    )
    res_y = (
        rhoeps * (u * dx(v) + v * dy(v))
        - p.eps * sf_grid.laplacian(v)
        - p.eps * dy(div)
        + rho_y * pressure
    )
    mass = rhoeps * div + u * rho_x + v * rho_y
    flux = sf_grid.VectorField(rhoeps * u, rhoeps * v)
    report = {
        "mass": mass.max_abs(),
        "mass_conservative": sf_grid.divergence(flux).max_abs(),
        "momentum_x": res_x.max_abs(),
        "momentum_y": res_y.max_abs(),
    }
    if bd is not None:
        report.update(boundary_defects(ueps, rhoeps, params, bd))
    return report


def boundary_defects(ueps, rhoeps, params, bd) -> ty.Dict[str, float]:
    """Defects of the boundary conditions of the full problem."""
    Side = sf_grid.Side
    p = params

    def gap(trace, target):
        return float(np.max(np.abs(trace.values - target)))

    u, v = ueps.u, ueps.v
    u_y, v_x = dy(u), dx(v)
    y = bd.grid.y
    us = background.eval_us(p, y)
    return {
        "bc:v(y=0)": gap(v.trace(Side.Y0), 0.0),
        "bc:v(y=2)": gap(v.trace(Side.Y2), 0.0),
        "bc:u_y(y=0)": gap(u_y.trace(Side.Y0), background.eval_us_y(p, 0.0) + bd.b0.values),
        "bc:u_y(y=2)": gap(u_y.trace(Side.Y2), background.eval_us_y(p, 2.0) + bd.b1.values),
        "bc:u(x=0)": gap(u.trace(Side.X0), us + bd.a1.values),
        "bc:v_x(x=0)": gap(v_x.trace(Side.X0), bd.a2.values),
        "bc:v(x=L)": gap(v.trace(Side.XL), bd.a3.values),
        "bc:curl_x(x=L)": gap(dx(u_y - v_x).trace(Side.XL), bd.a4.values),
        "bc:rho_x(x=0)": gap(
            dx(rhoeps).trace(Side.X0),
            -(2.0 / p.gamma) * p.eps * p.eta**2 * p.alpha2 + bd.h0.values,
        ),
        "bc:rho(0,0)": abs(float(rhoeps.values[0, 0]) - 1.0),
    }


def picard_iterate(
    bd: background.BoundaryData,
    params: background.FlowParams,
    grid: ty.Optional[sf_grid.Grid] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    lift: ty.Optional[homogenize.Lift] = None,
    initial: ty.Optional[State] = None,
    p: float = norms.DEFAULT_P,
    check_lambda: bool = True,
    alpha_mollify: float = 0.0,
    solver_options: ty.Optional[ty.Dict[str, ty.Any]] = None,
) -> ty.Tuple[State, IterationReport]:
    """Iterate linear solves to the fixed point of the remainder problem.

    :param bd: :class:`~shearflow.lib.background.BoundaryData`
    :param params: :class:`~shearflow.lib.background.FlowParams`
    :param grid: Must match ``bd.grid`` when given
    :param tol: Stop once ``||du||_X + ||drho||_Y < tol``
    :param max_iter: Maximum number of linear solves
    :param lift: Precomputed lift; built from ``bd`` when omitted
    :param initial: Starting state; zero when omitted
    :param p: Exponent of the W^{2,p} terms of the B norm
    :param check_lambda: Enforce ``Lambda <= eps^(1/2+sigma)`` first
    :returns: ``(state, report)``
    :raises: :class:`~shearflow.exceptions.NonContractionError`,
        :class:`~shearflow.exceptions.DivergenceError`,
        :class:`~shearflow.exceptions.PositivityError`,
        :class:`~shearflow.exceptions.LambdaGateError`
    """
    if grid is not None and grid != bd.grid:
        raise exceptions.GridError("Grid does not match the boundary data grid")
    grid = bd.grid
    if check_lambda:
        background.lambda_gate(bd, params)
    if lift is None:
        lift = homogenize.build_lift(bd)
    expansion = Expansion(params, lift, background.background_density(params, bd))
    solver = linsolve.LinearSolver(grid, params, 1.0, **(solver_options or {}))

    envelope = params.eps ** (params.sigma / 2.0)
    report = IterationReport(params.eps, envelope=envelope)
    state = initial if initial is not None else State.zero(grid)
    previous_increment = None
    slow = 0
    for n in range(1, max_iter + 1):
        g = expansion.g_terms(state)
        inp = linsolve.LinearInput(
            expansion.transport_velocity(state), g.g0, g.g, params,
            alpha_mollify=alpha_mollify,
        )
        out = solver.solve(inp, initial=state.velocity)
        report.last_input, report.last_output = inp, out
        new = State.from_output(out, n)

        delta_x = norms.norm_X(new.velocity - state.velocity, params).total
        delta_y = norms.norm_Y(new.rho - state.rho, params).total
        ratio = None
        if previous_increment:
            ratio = (delta_x + delta_y) / previous_increment
        row = IterationRow(
            n, delta_x, delta_y, ratio,
            norms.norm_B(new.velocity, params, p).total,
            norms.norm_A(new.rho, params, p).total,
        )
        report.rows.append(row)
        LOG.info(
            "eps=%g iteration %d: |du|_X=%.3e |drho|_Y=%.3e ratio=%s B=%.3e A=%.3e",
            params.eps, n, delta_x, delta_y,
            "-" if ratio is None else "{0:.3f}".format(ratio), row.norm_b, row.norm_a,
        )
        state = new

        if row.norm_b + row.norm_a > ENVELOPE_FACTOR * envelope:
            raise exceptions.DivergenceError(
                "Iterate {0} left the uniform bound".format(n),
                extra_data={"norm": row.norm_b + row.norm_a, "envelope": envelope},
            )
        if row.increment < tol:
            report.converged = True
            break
        slow = slow + 1 if ratio is not None and ratio > CONTRACTION_LIMIT else 0
        if slow >= CONTRACTION_PATIENCE:
            raise exceptions.NonContractionError(
                "Picard iteration stopped contracting at eps={0}".format(params.eps),
                extra_data={"iteration": n, "ratio": ratio},
            )
        previous_increment = row.increment

    if not report.converged:
        LOG.warning("Picard iteration did not reach %g in %d iterations", tol, max_iter)
    ueps, rhoeps = expansion.reconstruct(state)
    report.residual = nonlinear_residual(ueps, rhoeps, params, bd)
    report.residual["g_grouping"] = expansion.grouping_difference(state)
    LOG.debug("eps=%g printed g grouping differs by %.3e", params.eps,
              report.residual["g_grouping"])
    return state, report


@dataclasses.dataclass(frozen=True)
class UniquenessReport:
    distance: float
    tol: float
    iterations: ty.Tuple[int, int]

    @property
    def passed(self) -> bool:
        return self.distance <= 10.0 * self.tol


def uniqueness_check(bd, params, tol: float = DEFAULT_TOL, perturbation: float = 0.1,
                     **kwargs) -> UniquenessReport:
    """Run two chains, from zero and from a perturbed first iterate, and
    measure the X x Y distance between their limits.
    """
    lift = kwargs.pop("lift", None) or homogenize.build_lift(bd)
    max_iter = kwargs.pop("max_iter", DEFAULT_MAX_ITER)
    kwargs["lift"] = lift
    first, _ = picard_iterate(bd, params, tol=tol, max_iter=1, **kwargs)
    a, report_a = picard_iterate(bd, params, tol=tol, max_iter=max_iter, **kwargs)
    b, report_b = picard_iterate(
        bd, params, tol=tol, max_iter=max_iter, initial=first.scaled(1.0 + perturbation), **kwargs
    )
    distance = (
        norms.norm_X(a.velocity - b.velocity, params).total
        + norms.norm_Y(a.rho - b.rho, params).total
    )
    LOG.info("uniqueness check at eps=%g: distance %.3e", params.eps, distance)
    return UniquenessReport(distance, tol, (report_a.iterations, report_b.iterations))
