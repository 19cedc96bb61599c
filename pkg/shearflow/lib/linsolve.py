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
linsolve
--------

One linearized solve around the shear flow. For a frozen transport
velocity ``ueps`` and data ``(g0, g1, g2)`` it finds ``(u, v, rho)`` with

    t (u_s u_x + u_s' v) - eps lap u - eps d_x div u + gamma rho_x = t g1
    t u_s v_x            - eps lap v - eps d_y div u + gamma rho_y = t g2
    div u + eta^2 ueps . grad rho                                  = t g0

in four stages: the vorticity ``Hc``, the effective viscous flux
``P = gamma rho - 2 eps div u``, the density by transport from the inflow,
and the velocity from its Helmholtz potentials. The velocity-dependent
sources of the first two stages are refreshed by an inner sweep.
"""

import collections
import dataclasses
import typing as ty
import warnings

import numpy as np
from scipy import integrate as spint
from scipy import linalg
from scipy import ndimage
from scipy import sparse
from scipy.sparse import linalg as splinalg

from shearflow import _log
from shearflow import exceptions
from shearflow import warnings as sf_warnings
from shearflow.lib import background
from shearflow.lib import elliptic
from shearflow.lib import grid as sf_grid
from shearflow.lib import norms

LOG = _log.setup_logging(__name__)

Side = sf_grid.Side

DEFAULT_INNER_TOL = 1e-9
DEFAULT_MAX_SWEEPS = 30
#: Multiplies ``min(1, h^2 / eps)``, the relative defect a second-order
#: discretization leaves where the wall layers are resolved.
DEFAULT_RESIDUAL_TOL = 10.0
DEFAULT_CONSISTENCY_TOL = 1e-6
DEFAULT_BC_TOL = 1e-6

CURL_KINDS = {Side.X0: ("dirichlet",), Side.XL: ("neumann",),
              Side.Y0: ("dirichlet",), Side.Y2: ("dirichlet",)}
FLUX_KINDS = {Side.X0: ("dirichlet",), Side.XL: ("neumann",),
              Side.Y0: ("neumann",), Side.Y2: ("neumann",)}
PHI_KINDS = {Side.X0: ("neumann",), Side.XL: ("dirichlet",),
             Side.Y0: ("neumann",), Side.Y2: ("neumann",)}
PSI_KINDS = CURL_KINDS


@dataclasses.dataclass(frozen=True, eq=False)
class LinearInput:
    ueps: sf_grid.VectorField
    g0: sf_grid.ScalarField
    g: sf_grid.VectorField
    params: background.FlowParams
    t: float = 1.0
    alpha_mollify: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0):
            raise exceptions.DomainError(
                "Homotopy weight must lie in [0, 1], got {0}".format(self.t)
            )
        if self.alpha_mollify < 0.0:
            raise exceptions.DomainError("Mollifier width must be >= 0")
        wall = max(
            np.max(np.abs(self.ueps.v.trace(Side.Y0).values)),
            np.max(np.abs(self.ueps.v.trace(Side.Y2).values)),
        )
        if wall > 1e-9 * max(1.0, self.ueps.max_abs()):
            raise exceptions.DomainError(
                "Transport velocity must be tangential on the walls",
                extra_data={"max_wall_v": wall},
            )

    @property
    def grid(self) -> sf_grid.Grid:
        return self.g0.grid

    @classmethod
    def zero_data(cls, ueps, params, **kwargs) -> "LinearInput":
        z = ueps.grid.zeros()
        return cls(ueps, z, sf_grid.VectorField(z, z), params, **kwargs)


@dataclasses.dataclass(frozen=True, eq=False)
class LinearOutput:
    u: sf_grid.ScalarField
    v: sf_grid.ScalarField
    rho: sf_grid.ScalarField
    Hc: sf_grid.ScalarField
    P: sf_grid.ScalarField
    phi: sf_grid.ScalarField
    psi: sf_grid.ScalarField
    rho0y: sf_grid.Trace
    residual_report: ty.Dict[str, float]
    bc_report: ty.Dict[str, float]
    sweeps: int = 1
    converged: bool = True

    @property
    def velocity(self) -> sf_grid.VectorField:
        return sf_grid.VectorField(self.u, self.v)


def _shear(params, grid):
    return (
        background.shear_field(params, grid),
        background.shear_y_field(params, grid),
        background.shear_yy_field(params, grid),
    )


def _homogeneous(kinds):
    return {side: (elliptic.Condition(k[0], 0.0),) for side, k in kinds.items()}


def _ratio(value: float, *scales: float) -> float:
    scale = max(scales)
    if scale > 0.0:
        return value / scale
    return 0.0 if value == 0.0 else np.inf


def _first_difference_matrix(n: int, h: float) -> sparse.csr_matrix:
    """Second-order first-derivative matrix with one-sided end rows."""
    D = sparse.lil_matrix((n, n))
    for j in range(1, n - 1):
        D[j, j - 1] = -0.5 / h
        D[j, j + 1] = 0.5 / h
    D[0, 0:3] = np.array([-1.5, 2.0, -0.5]) / h
    D[n - 1, n - 3:n] = np.array([0.5, -2.0, 1.5]) / h
    return D.tocsr()


def mollify(trace: sf_grid.Trace, alpha: float) -> sf_grid.Trace:
    """Gaussian smoothing of width ``alpha`` truncated at four widths."""
    if alpha <= 0.0:
        return trace
    sigma = alpha / trace.spacing
    values = ndimage.gaussian_filter1d(trace.values, sigma, mode="nearest", truncate=4.0)
    return sf_grid.Trace(trace.side, trace.nodes, values)


class LinearSolver:
    """Factorized operators of one linearized problem.

    The four elliptic operators depend only on ``eps``, ``t`` and the shear
    profile, so one instance serves every iteration of a Picard chain.

    :param grid: The :class:`~shearflow.lib.grid.Grid`
    :param params: The :class:`~shearflow.lib.background.FlowParams`
    :param t: Homotopy weight in ``[0, 1]``
    """

    def __init__(
        self,
        grid: sf_grid.Grid,
        params: background.FlowParams,
        t: float = 1.0,
        backend: str = elliptic.DIRECT,
        solver_tol: float = elliptic.DEFAULT_SOLVER_TOL,
        inner_tol: float = DEFAULT_INNER_TOL,
        max_sweeps: int = DEFAULT_MAX_SWEEPS,
        residual_tol: float = DEFAULT_RESIDUAL_TOL,
        consistency_tol: float = DEFAULT_CONSISTENCY_TOL,
        bc_tol: float = DEFAULT_BC_TOL,
    ):
        self.grid = grid
        self.params = params
        self.t = t
        self.inner_tol = inner_tol
        self.max_sweeps = max_sweeps
        self.residual_tol = residual_tol
        self.consistency_tol = consistency_tol
        self.bc_tol = bc_tol
        self.us, self.us_y, self.us_yy = _shear(params, grid)
        options = dict(backend=backend, solver_tol=solver_tol)
        self.curl_op = elliptic.EllipticOperator(
            grid, elliptic.POISSON, CURL_KINDS, coefficient=params.eps,
            drift=-t * self.us.values, **options
        )
        self.flux_op = elliptic.EllipticOperator(grid, elliptic.POISSON, FLUX_KINDS, **options)
        self.phi_op = elliptic.EllipticOperator(grid, elliptic.POISSON, PHI_KINDS, **options)
        self.psi_op = elliptic.EllipticOperator(grid, elliptic.POISSON, PSI_KINDS, **options)

    def _check(self, inp: LinearInput):
        if inp.grid != self.grid or inp.params != self.params or inp.t != self.t:
            raise ValueError("Input does not match the solver's grid, parameters or t")

    def step_curl(self, inp: LinearInput, current: ty.Optional[sf_grid.VectorField] = None):
        """Vorticity of the solution.

        Solves ``eps lap Hc - t u_s Hc_x = -t curl g + t u_s' div u +
        t u_s'' v`` with ``Hc = 0`` on ``x = 0`` and the walls and
        ``Hc_x = 0`` on ``x = L``; ``u`` is the current sweep's velocity.
        """
        t = inp.t
        rhs = -t * (sf_grid.apply_dy(inp.g.u) - sf_grid.apply_dx(inp.g.v))
        if current is not None:
            rhs = rhs + t * (self.us_y * sf_grid.divergence(current) + self.us_yy * current.v)
        return self.curl_op.solve(rhs, _homogeneous(CURL_KINDS))

    def inflow_flux(self, inp: LinearInput, Hc: sf_grid.ScalarField) -> np.ndarray:
        """``P(0, y) = -2 t eps g0(0, 0) + int_0^y (t g2 - eps Hc_x)(0, s) ds``"""
        eps, t = inp.params.eps, inp.t
        slope = (t * inp.g.v - eps * sf_grid.apply_dx(Hc)).trace(Side.X0)
        start = -2.0 * t * eps * inp.g0.values[0, 0]
        return start + spint.cumulative_trapezoid(slope.values, slope.nodes, initial=0.0)

    def step_flux(self, inp: LinearInput, Hc, current=None):
        """Effective viscous flux and its inflow trace.

        ``lap P = t div g - t (u_s d_x div u + 2 u_s' v_x)`` with ``P`` given
        on ``x = 0``, ``P_y = t g2 - eps Hc_x`` on the walls and
        ``P_x = t g1 - t u_s u_x + eps Hc_y`` on ``x = L``.
        """
        eps, t = inp.params.eps, inp.t
        g1, g2 = inp.g.u, inp.g.v
        rhs = t * sf_grid.divergence(inp.g)
        outflow = t * g1 + eps * sf_grid.apply_dy(Hc)
        if current is not None:
            rhs = rhs - t * (
                self.us * sf_grid.apply_dx(sf_grid.divergence(current))
                + 2.0 * self.us_y * sf_grid.apply_dx(current.v)
            )
            outflow = outflow - t * self.us * sf_grid.apply_dx(current.u)
        wall = t * g2 - eps * sf_grid.apply_dx(Hc)
        P0 = self.inflow_flux(inp, Hc)
        self._check_corners(P0, wall.trace(Side.X0).values)
        bc = {
            Side.X0: (elliptic.dirichlet(P0),),
            Side.XL: (elliptic.neumann(outflow.trace(Side.XL)),),
            Side.Y0: (elliptic.neumann(wall.trace(Side.Y0)),),
            Side.Y2: (elliptic.neumann(wall.trace(Side.Y2)),),
        }
        P = self.flux_op.solve(rhs, bc)
        return P, sf_grid.Trace(Side.X0, self.grid.y, P0)

    def _check_corners(self, P0, slope):
        hy = self.grid.hy
        curvature = sf_grid.trace_derivative(sf_grid.Trace(Side.X0, self.grid.y, slope), 2)
        scale = max(np.max(np.abs(slope)), np.max(np.abs(curvature.values)), 1.0)
        threshold = max(self.consistency_tol, hy**2) * scale
        lower = (-1.5 * P0[0] + 2.0 * P0[1] - 0.5 * P0[2]) / hy
        upper = (0.5 * P0[-3] - 2.0 * P0[-2] + 1.5 * P0[-1]) / hy
        for name, measured, target in (("(0,0)", lower, slope[0]), ("(0,2)", upper, slope[-1])):
            if abs(measured - target) > threshold:
                warnings.warn(
                    "Flux data disagree at corner {0} by {1:.3e}".format(
                        name, abs(measured - target)
                    ),
                    category=sf_warnings.CornerCompatibilityWarning,
                )

    def step_inflow_ode(self, inp: LinearInput, Hc) -> sf_grid.Trace:
        """``rho_y`` on the inflow side.

        Solves ``gamma r + 2 eps eta^2 (v0 r)' = (t g2 + 2 eps t g0_y -
        eps Hc_x)(0, y)`` with ``Hc_x`` mollified when ``alpha_mollify > 0``.
        """
        p, t = inp.params, inp.t
        Hx = mollify(sf_grid.apply_dx(Hc).trace(Side.X0), inp.alpha_mollify)
        source = (
            t * inp.g.v.trace(Side.X0).values
            + 2.0 * p.eps * t * sf_grid.apply_dy(inp.g0).trace(Side.X0).values
            - p.eps * Hx.values
        )
        v0 = inp.ueps.v.trace(Side.X0).values
        return solve_inflow_ode(source, v0, self.grid.y, p.gamma, p.transport_coefficient)

    def step_transport(self, inp: LinearInput, P, rho0y: sf_grid.Trace):
        """Density by upwind marching from the inflow column.

        ``gamma rho + 2 eps eta^2 ueps . grad rho = P + 2 t eps g0`` with
        ``rho(0, y) = int_0^y rho0y``.
        """
        p = inp.params
        source = P + 2.0 * inp.t * p.eps * inp.g0
        inflow = spint.cumulative_trapezoid(rho0y.values, rho0y.nodes, initial=0.0)
        return march_transport(
            inp.ueps, source, inflow, p.gamma, p.transport_coefficient
        )

    def step_helmholtz(self, inp: LinearInput, Hc, P, rho):
        """Velocity from ``lap phi = (gamma rho - P) / (2 eps)`` and
        ``lap psi = Hc``: ``u = psi_y + phi_x``, ``v = -psi_x + phi_y``.

        Normal derivatives of the potentials on their Neumann sides are set
        to the imposed zero, so ``u(0, y)``, ``v(x, 0)``, ``v(x, 2)`` and
        ``v(L, y)`` vanish exactly. The derivative conditions are then
        closed by :func:`close_boundary`.
        """
        p = inp.params
        phi = self.phi_op.solve(
            (p.gamma * rho - P) / (2.0 * p.eps),
            _homogeneous(PHI_KINDS),
        )
        psi = self.psi_op.solve(Hc, _homogeneous(PSI_KINDS))
        phi_x = np.array(sf_grid.apply_dx(phi).values)
        phi_y = np.array(sf_grid.apply_dy(phi).values)
        psi_x = np.array(sf_grid.apply_dx(psi).values)
        psi_y = sf_grid.apply_dy(psi).values
        phi_x[0, :] = 0.0
        phi_y[:, 0] = 0.0
        phi_y[:, -1] = 0.0
        psi_x[-1, :] = 0.0
        u, v = close_boundary(psi_y + phi_x, -psi_x + phi_y, self.grid)
        return u, v, phi, psi

    def sweep(self, inp, current):
        Hc = self.step_curl(inp, current)
        P, _ = self.step_flux(inp, Hc, current)
        rho0y = self.step_inflow_ode(inp, Hc)
        rho = self.step_transport(inp, P, rho0y)
        u, v, phi, psi = self.step_helmholtz(inp, Hc, P, rho)
        return u, v, rho, Hc, P, phi, psi, rho0y

    def solve(self, inp: LinearInput, initial: ty.Optional[sf_grid.VectorField] = None):
        """Run the inner sweep to a fixed point and audit the result.

        :param inp: A :class:`LinearInput` matching this solver
        :param initial: Starting velocity for the sweep (zero by default)
        :returns: :class:`LinearOutput`
        :raises: :class:`~shearflow.exceptions.ResidualError` when a
            boundary condition is off by more than ``bc_tol``, or when the
            relative residual, an identity or the gauge exceeds
            :meth:`allowance`
        """
        self._check(inp)
        current = initial if initial is not None else sf_grid.VectorField.zeros(self.grid)
        converged = False
        sweeps = 0
        for sweeps in range(1, self.max_sweeps + 1):
            u, v, rho, Hc, P, phi, psi, rho0y = self.sweep(inp, current)
            update = sf_grid.VectorField(u, v)
            change = norms.norm_X(update - current, inp.params).total
            size = norms.norm_X(update, inp.params).total
            LOG.debug("inner sweep %d: change %.3e (size %.3e)", sweeps, change, size)
            current = update
            if change <= self.inner_tol * max(1.0, size):
                converged = True
                break
        if not converged:
            warnings.warn(
                "Inner sweep stopped after {0} sweeps".format(sweeps),
                category=sf_warnings.InnerSweepWarning,
            )
        bcs = boundary_report(u, v)
        self.check_boundary(bcs, sf_grid.VectorField(u, v).max_abs())
        residuals = self.residuals(inp, u, v, rho, Hc, P)
        self.check_residuals(residuals)
        if inp.alpha_mollify > 0.0:
            residuals["inflow_identity"] = inflow_identity_defect(inp, rho, Hc)
        return LinearOutput(u, v, rho, Hc, P, phi, psi, rho0y, residuals, bcs,
                            sweeps, converged)

    def allowance(self) -> float:
        """Relative defect tolerated in the equations and identities.

        ``consistency_tol + residual_tol * min(1, h^2 / eps)`` with ``h``
        the coarser spacing.
        """
        h = max(self.grid.hx, self.grid.hy)
        return self.consistency_tol + self.residual_tol * min(1.0, h**2 / self.params.eps)

    def check_boundary(self, bcs: ty.Dict[str, float], size: float):
        """Raise unless every homogeneous condition holds to ``bc_tol``."""
        threshold = self.bc_tol * max(1.0, size)
        failed = {name: value for name, value in bcs.items() if value > threshold}
        if failed:
            raise exceptions.ResidualError(
                "Boundary conditions {0} off by more than {1:.3e}".format(
                    ", ".join(sorted(failed)), threshold
                ),
                extra_data=failed,
            )

    def check_residuals(self, residuals: ty.Dict[str, float]):
        """Raise when the equations, identities or gauge exceed :meth:`allowance`."""
        allowance = self.allowance()
        failed = {
            name: residuals[name]
            for name in ("relative", "curl_identity_relative", "flux_identity_relative")
            if residuals[name] > allowance
        }
        if residuals["gauge_flagged"]:
            failed["gauge_magnitude"] = residuals["gauge_magnitude"]
        if failed:
            raise exceptions.ResidualError(
                "Linear solve inconsistent beyond {0:.3e}: {1}".format(
                    allowance,
                    ", ".join("{0}={1:.3e}".format(k, failed[k]) for k in sorted(failed)),
                ),
                extra_data=failed,
            )

    def gauge_fields(self, inp, u, v, Hc, P, with_scale=False):
        """The momentum equations written through ``(Hc, P)``.

        With ``with_scale`` the largest term is returned alongside.
        """
        t, eps = inp.t, inp.params.eps
        terms_1 = [
            t * self.us * sf_grid.apply_dx(u) + t * self.us_y * v,
            -eps * sf_grid.apply_dy(Hc),
            sf_grid.apply_dx(P),
            -t * inp.g.u,
        ]
        terms_2 = [
            t * self.us * sf_grid.apply_dx(v),
            eps * sf_grid.apply_dx(Hc),
            sf_grid.apply_dy(P),
            -t * inp.g.v,
        ]
        F = sf_grid.VectorField(sum(terms_1[1:], terms_1[0]), sum(terms_2[1:], terms_2[0]))
        if not with_scale:
            return F
        return F, max(f.max_abs() for f in terms_1 + terms_2)

    def residuals(self, inp, u, v, rho, Hc, P) -> ty.Dict[str, float]:
        """Residuals of the three linear equations and the identities that
        tie ``(Hc, P)`` back to ``(u, v, rho)``.
        """
        p, t = inp.params, inp.t
        w = sf_grid.VectorField(u, v)
        div = sf_grid.divergence(w)
        rho_x, rho_y = sf_grid.apply_dx(rho), sf_grid.apply_dy(rho)
        terms_x = [
            t * (self.us * sf_grid.apply_dx(u) + self.us_y * v),
            -p.eps * sf_grid.laplacian(u),
            -p.eps * sf_grid.apply_dx(div),
            p.gamma * rho_x,
            -t * inp.g.u,
        ]
        terms_y = [
            t * self.us * sf_grid.apply_dx(v),
            -p.eps * sf_grid.laplacian(v),
            -p.eps * sf_grid.apply_dy(div),
            p.gamma * rho_y,
            -t * inp.g.v,
        ]
        terms_m = [
            div,
            p.eta**2 * (inp.ueps.u * rho_x + inp.ueps.v * rho_y),
            -t * inp.g0,
        ]
        report = collections.OrderedDict()
        relative = 0.0
        for name, terms in (("momentum_x", terms_x), ("momentum_y", terms_y),
                            ("mass", terms_m)):
            total = sum(terms[1:], terms[0])
            report[name] = total.max_abs()
            scale = max(f.max_abs() for f in terms)
            if scale > 0.0:
                relative = max(relative, report[name] / scale)
        report["relative"] = relative
        curl = sf_grid.curl2d(w)
        report["curl_identity"] = (curl - Hc).max_abs()
        report["curl_identity_relative"] = _ratio(
            report["curl_identity"], curl.max_abs(), Hc.max_abs())
        report["flux_identity"] = (2.0 * p.eps * div + P - p.gamma * rho).max_abs()
        report["flux_identity_relative"] = _ratio(
            report["flux_identity"], P.max_abs(), (p.gamma * rho).max_abs(),
            (2.0 * p.eps * div).max_abs())
        F, scale = self.gauge_fields(inp, u, v, Hc, P, with_scale=True)
        gauge = elliptic.harmonic_gauge_check(F, self.allowance(), scale)
        report["gauge_div"] = gauge.div
        report["gauge_curl"] = gauge.curl
        report["gauge_magnitude"] = gauge.magnitude
        report["gauge_flagged"] = float(gauge.flagged)
        return dict(report)


def solve_inflow_ode(source, v0, nodes, gamma: float, coefficient: float) -> sf_grid.Trace:
    """Solve ``gamma r + coefficient (v0 r)' = source`` on the inflow side."""
    n = len(nodes)
    D = _first_difference_matrix(n, float(nodes[1] - nodes[0]))
    matrix = gamma * sparse.identity(n, format="csr") + coefficient * (D @ sparse.diags(v0))
    r = splinalg.spsolve(matrix.tocsc(), np.asarray(source, dtype=float))
    if not np.all(np.isfinite(r)):
        raise exceptions.SingularProblem("Inflow density equation is singular")
    return sf_grid.Trace(Side.X0, np.asarray(nodes), r)


def march_transport(ueps, source, inflow, gamma: float, coefficient: float):
    """Backward-Euler march of ``gamma rho + coefficient ueps . grad rho =
    source`` in x, centered in y.

    :raises: :class:`~shearflow.exceptions.FlowReversalError` if the
        streamwise velocity is not strictly positive
    """
    grid = source.grid
    ue, ve = ueps.u.values, ueps.v.values
    if np.min(ue) <= 0.0:
        raise exceptions.FlowReversalError(
            "Streamwise transport velocity is not positive",
            extra_data={"min_u": float(np.min(ue))},
        )
    hx, hy = grid.hx, grid.hy
    ny = grid.ny
    rho = np.zeros(grid.shape)
    rho[0, :] = inflow
    S = source.values
    for i in range(1, grid.nx + 1):
        upwind = coefficient * ue[i] / hx
        off = coefficient * ve[i] / (2.0 * hy)
        banded = np.zeros((3, ny + 1))
        banded[1, :] = gamma + upwind
        # walls carry no normal transport
        banded[0, 2:] = off[1:-1]
        banded[2, :-2] = -off[1:-1]
        rhs = S[i] + upwind * rho[i - 1]
        rho[i] = linalg.solve_banded((1, 1), banded, rhs)
    return sf_grid.ScalarField(grid, rho)


def inflow_identity_defect(inp: LinearInput, rho, Hc) -> float:
    """Defect of ``2 eta^2 rho_x(0, y) = (1/ueps) int_0^y (Hc_x^alpha -
    Hc_x)(0, s) ds``.
    """
    Hx = sf_grid.apply_dx(Hc).trace(Side.X0)
    smooth = mollify(Hx, inp.alpha_mollify)
    integral = spint.cumulative_trapezoid(smooth.values - Hx.values, Hx.nodes, initial=0.0)
    rhs = integral / inp.ueps.u.trace(Side.X0).values
    lhs = 2.0 * inp.params.eta**2 * sf_grid.apply_dx(rho).trace(Side.X0).values
    return float(np.max(np.abs(lhs - rhs)))


def close_boundary(u, v, grid: sf_grid.Grid):
    """Adjust boundary-adjacent velocity values so the derivative conditions
    hold for the one-sided stencils of :func:`boundary_report`.

    ``u`` on the walls and ``v`` on the inflow column take the value that
    zeroes their one-sided normal derivative. ``v`` one column upstream of
    the outflow absorbs ``curl_x(L, y)``: a change ``d`` there moves it by
    ``2.75 d / hx^2`` and leaves every other condition untouched.

    :param u: Streamwise velocity values
    :param v: Wall-normal velocity values
    :returns: The closed pair as :class:`~shearflow.lib.grid.ScalarField`
    """
    u = np.array(u, dtype=float)
    v = np.array(v, dtype=float)
    u[:, 0] = (4.0 * u[:, 1] - u[:, 2]) / 3.0
    u[:, -1] = (4.0 * u[:, -2] - u[:, -3]) / 3.0
    v[0, :] = (4.0 * v[1, :] - v[2, :]) / 3.0
    u = sf_grid.ScalarField(grid, u)
    curl_x = sf_grid.apply_dx(sf_grid.curl2d(sf_grid.VectorField(u, sf_grid.ScalarField(grid, v))))
    v[-2, 1:-1] -= curl_x.values[-1, 1:-1] * grid.hx**2 / 2.75
    return u, sf_grid.ScalarField(grid, v)


def boundary_report(u, v) -> ty.Dict[str, float]:
    """The eight homogeneous boundary conditions of the remainder."""
    curl_x = sf_grid.apply_dx(sf_grid.curl2d(sf_grid.VectorField(u, v)))
    u_y = sf_grid.apply_dy(u)
    v_x = sf_grid.apply_dx(v)
    pairs = (
        ("u(x=0)", u.trace(Side.X0)),
        ("v_x(x=0)", v_x.trace(Side.X0)),
        ("v(x=L)", v.trace(Side.XL)),
        ("curl_x(x=L)", curl_x.trace(Side.XL)),
        ("u_y(y=0)", u_y.trace(Side.Y0)),
        ("u_y(y=2)", u_y.trace(Side.Y2)),
        ("v(y=0)", v.trace(Side.Y0)),
        ("v(y=2)", v.trace(Side.Y2)),
    )
    return {name: float(np.max(np.abs(trace.values))) for name, trace in pairs}


def _solver_for(inp: LinearInput, **kwargs) -> LinearSolver:
    return LinearSolver(inp.grid, inp.params, inp.t, **kwargs)


def step_curl(inp: LinearInput, current=None, **kwargs):
    return _solver_for(inp, **kwargs).step_curl(inp, current)


def step_flux(inp: LinearInput, Hc, current=None, **kwargs):
    return _solver_for(inp, **kwargs).step_flux(inp, Hc, current)


def step_inflow_ode(inp: LinearInput, Hc, **kwargs):
    return _solver_for(inp, **kwargs).step_inflow_ode(inp, Hc)


def step_transport(inp: LinearInput, P, rho0y, **kwargs):
    return _solver_for(inp, **kwargs).step_transport(inp, P, rho0y)


def step_helmholtz(inp: LinearInput, Hc, P, rho, **kwargs):
    """Helmholtz recomposition as a standalone step; returns the velocity
    pair together with both potentials.
    """
    return _solver_for(inp, **kwargs).step_helmholtz(inp, Hc, P, rho)


def solve_linear(inp: LinearInput, initial=None, **kwargs) -> LinearOutput:
    return _solver_for(inp, **kwargs).solve(inp, initial)
