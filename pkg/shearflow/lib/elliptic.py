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
elliptic
--------

Sparse solvers for the second-order (Poisson with optional x-drift) and
fourth-order (biharmonic) problems on the channel.

Problems are assembled on the node grid extended by one (Poisson) or two
(biharmonic) ghost layers. Every extended node owns exactly one matrix row:

* physical nodes on a side with a value condition carry that value,
* every other physical node carries the PDE stencil,
* ghost layer ``k`` of a side carries the ``k``-th derivative condition of
  that side, centered at the boundary node; surplus ghosts are pinned to 0.

The matrix therefore depends only on the condition kinds and coefficients,
so an :class:`EllipticOperator` is factorized once and reused for any data.
"""

import dataclasses
import math
import typing as ty
import warnings

import numpy as np
from scipy import integrate as spint
from scipy import sparse
from scipy.sparse import linalg as splinalg

from shearflow import _log
from shearflow import exceptions
from shearflow import warnings as sf_warnings
from shearflow.lib import grid as sf_grid

LOG = _log.setup_logging(__name__)

POISSON = "poisson"
BIHARMONIC = "biharmonic"

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
SECOND = "second"
THIRD = "third"

KIND_ORDER = (DIRICHLET, NEUMANN, SECOND, THIRD)

DIRECT = "direct"
ITERATIVE = "iterative"

DEFAULT_SOLVER_TOL = 1e-10
DEFAULT_COMPAT_TOL = 1e-2
DEFAULT_MAX_ITER = 2000

# derivative order and coordinate-offset weights (before dividing by h**order)
_STENCILS = {
    NEUMANN: (1, {-1: -0.5, 1: 0.5}),
    SECOND: (2, {-1: 1.0, 0: -2.0, 1: 1.0}),
    THIRD: (3, {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}),
}

_BIHARMONIC_PAIRS = (
    (DIRICHLET, NEUMANN),
    (DIRICHLET, SECOND),
    (NEUMANN, THIRD),
)


class Condition(ty.NamedTuple):
    """One boundary condition: a kind and its data along the side."""

    kind: str
    data: ty.Any = 0.0


def dirichlet(data=0.0) -> Condition:
    return Condition(DIRICHLET, data)


def neumann(data=0.0) -> Condition:
    """Coordinate derivative ``u_x`` on the x-sides, ``u_y`` on the walls."""
    return Condition(NEUMANN, data)


def second(data=0.0) -> Condition:
    return Condition(SECOND, data)


def third(data=0.0) -> Condition:
    return Condition(THIRD, data)


BoundarySpec = ty.Mapping[sf_grid.Side, ty.Sequence[Condition]]


def _normalize(conditions) -> ty.Tuple[Condition, ...]:
    if isinstance(conditions, Condition):
        conditions = (conditions,)
    for c in conditions:
        if c.kind not in KIND_ORDER:
            raise exceptions.IllPosedProblem(
                "Unknown boundary condition kind {0!r}".format(c.kind)
            )
    return tuple(sorted(conditions, key=lambda c: KIND_ORDER.index(c.kind)))


def kinds_of(bc: BoundarySpec) -> ty.Dict[sf_grid.Side, ty.Tuple[str, ...]]:
    return {side: tuple(c.kind for c in _normalize(bc[side])) for side in sf_grid.Side}


def _side_values(data, length: int) -> np.ndarray:
    if isinstance(data, sf_grid.Trace):
        data = data.values
    return np.broadcast_to(np.asarray(data, dtype=float), (length,))


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    h = nodes[1] - nodes[0]
    w = np.full(len(nodes), h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclasses.dataclass(frozen=True)
class EllipticProblem:
    """A boundary value problem ``coefficient * L u + drift * u_x = rhs``.

    ``L`` is the Laplacian for :data:`POISSON` and the bilaplacian for
    :data:`BIHARMONIC`. Each side carries one condition (Poisson) or two
    (biharmonic).
    """

    kind: str
    rhs: sf_grid.ScalarField
    bc: BoundarySpec
    coefficient: float = 1.0
    drift: ty.Any = None

    def operator(self, **kwargs) -> "EllipticOperator":
        return EllipticOperator(
            self.rhs.grid,
            self.kind,
            kinds_of(self.bc),
            coefficient=self.coefficient,
            drift=self.drift,
            **kwargs
        )


class EllipticOperator:
    """Assembled and lazily factorized discrete operator.

    :param grid: The :class:`~shearflow.lib.grid.Grid`
    :param kind: :data:`POISSON` or :data:`BIHARMONIC`
    :param kinds: Mapping of side to the tuple of condition kinds
    :param coefficient: Factor in front of the principal part
    :param drift: Coefficient of ``u_x`` (Poisson only); a scalar, an array
        broadcastable to the grid shape, or a field
    :param backend: :data:`DIRECT` (sparse LU) or :data:`ITERATIVE`
        (ILU-preconditioned BiCGSTAB)
    :param solver_tol: Backward-error level above which a
        :class:`~shearflow.warnings.SolverToleranceWarning` is emitted
    """

    def __init__(
        self,
        grid: sf_grid.Grid,
        kind: str,
        kinds,
        coefficient: float = 1.0,
        drift=None,
        backend: str = DIRECT,
        solver_tol: float = DEFAULT_SOLVER_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
    ):
        if kind not in (POISSON, BIHARMONIC):
            raise exceptions.IllPosedProblem("Unknown problem kind {0!r}".format(kind))
        if backend not in (DIRECT, ITERATIVE):
            raise ValueError("Unknown backend {0!r}".format(backend))
        self.grid = grid
        self.kind = kind
        self.coefficient = float(coefficient)
        self.backend = backend
        self.solver_tol = solver_tol
        self.max_iter = max_iter
        self.ghost = 1 if kind == POISSON else 2
        self.kinds = {side: tuple(kinds[side]) for side in sf_grid.Side}
        if isinstance(drift, sf_grid.ScalarField):
            drift = drift.values
        self.drift = (
            None
            if drift is None or not np.any(drift)
            else np.broadcast_to(np.asarray(drift, dtype=float), grid.shape)
        )
        self._validate()
        self.pure_neumann = kind == POISSON and not any(
            DIRICHLET in k for k in self.kinds.values()
        )
        if self.pure_neumann and self.drift is not None:
            raise exceptions.IllPosedProblem(
                "Pure-Neumann problems are only supported without drift"
            )
        self._ext_shape = (grid.nx + 1 + 2 * self.ghost, grid.ny + 1 + 2 * self.ghost)
        self._factor = None
        self._ilu = None
        self._assemble()

    def _validate(self):
        expected = 1 if self.kind == POISSON else 2
        for side, kinds in self.kinds.items():
            if len(kinds) != expected:
                raise exceptions.IllPosedProblem(
                    "{0} problem needs {1} condition(s) on {2}, got {3}".format(
                        self.kind, expected, side.value, len(kinds)
                    )
                )
            if self.kind == POISSON and kinds[0] not in (DIRICHLET, NEUMANN):
                raise exceptions.IllPosedProblem(
                    "Poisson side {0} accepts dirichlet or neumann, got {1}".format(
                        side.value, kinds[0]
                    )
                )
            if self.kind == BIHARMONIC and kinds not in _BIHARMONIC_PAIRS:
                raise exceptions.IllPosedProblem(
                    "Unsupported biharmonic pair {0} on {1}".format(kinds, side.value)
                )
        if self.kind == BIHARMONIC:
            for xs in (sf_grid.Side.X0, sf_grid.Side.XL):
                for ys in (sf_grid.Side.Y0, sf_grid.Side.Y2):
                    if DIRICHLET not in self.kinds[xs] and DIRICHLET not in self.kinds[ys]:
                        raise exceptions.IllPosedProblem(
                            "Corner {0}/{1} has no value condition".format(
                                xs.value, ys.value
                            )
                        )

    @property
    def size(self) -> int:
        n = self._ext_shape[0] * self._ext_shape[1]
        return n + 1 if self.pure_neumann else n

    def _flat(self, I, J):
        return I * self._ext_shape[1] + J

    def _line(self, side: sf_grid.Side, offset: int):
        """Extended indices of the line parallel to ``side`` at ``offset``
        nodes from it in the coordinate direction.
        """
        g, nx, ny = self.ghost, self.grid.nx, self.grid.ny
        if side.axis == 0:
            J = g + np.arange(ny + 1)
            I = np.full_like(J, (g if side.is_lower else g + nx) + offset)
        else:
            I = g + np.arange(nx + 1)
            J = np.full_like(I, (g if side.is_lower else g + ny) + offset)
        return I, J

    def _derivative_kinds(self, side):
        return [k for k in self.kinds[side] if k != DIRICHLET]

    def _pde_stencil(self):
        hx, hy = self.grid.hx, self.grid.hy
        a = self.coefficient
        if self.kind == POISSON:
            return [
                (0, 0, a * (-2.0 / hx**2 - 2.0 / hy**2)),
                (1, 0, a / hx**2),
                (-1, 0, a / hx**2),
                (0, 1, a / hy**2),
                (0, -1, a / hy**2),
            ]
        stencil = []
        for d, c in ((-2, 1.0), (-1, -4.0), (1, -4.0), (2, 1.0)):
            stencil.append((d, 0, a * c / hx**4))
            stencil.append((0, d, a * c / hy**4))
        cross = 2.0 * a / (hx**2 * hy**2)
        second_diff = {-1: 1.0, 0: -2.0, 1: 1.0}
        center = a * (6.0 / hx**4 + 6.0 / hy**4)
        for di, ci in second_diff.items():
            for dj, cj in second_diff.items():
                if di == 0 and dj == 0:
                    center += cross * ci * cj
                else:
                    stencil.append((di, dj, cross * ci * cj))
        stencil.append((0, 0, center))
        return stencil

    def _assemble(self):
        grid, g = self.grid, self.ghost
        rows, cols, vals = [], [], []
        assigned = np.zeros(self._ext_shape, dtype=bool)

        # value rows; x-sides are written last so they own the corners
        value_owner = np.full(grid.shape, None, dtype=object)
        for side in (sf_grid.Side.Y0, sf_grid.Side.Y2, sf_grid.Side.X0, sf_grid.Side.XL):
            if DIRICHLET in self.kinds[side]:
                index = 0 if side.is_lower else -1
                if side.axis == 0:
                    value_owner[index, :] = side
                else:
                    value_owner[:, index] = side
        self._value_rows = []
        for side in sf_grid.Side:
            I, J = np.nonzero(value_owner == side)
            if len(I) == 0:
                continue
            position = J if side.axis == 0 else I
            k = self._flat(I + g, J + g)
            rows.append(k)
            cols.append(k)
            vals.append(np.ones(len(k)))
            assigned[I + g, J + g] = True
            self._value_rows.append((k, side, position))

        pde_mask = np.equal(value_owner, None)
        Ip, Jp = np.nonzero(pde_mask)
        self._pde_ij = (Ip, Jp)
        self._pde_rows = self._flat(Ip + g, Jp + g)
        assigned[Ip + g, Jp + g] = True
        referenced = np.zeros(self._ext_shape, dtype=bool)
        for di, dj, c in self._pde_stencil():
            rows.append(self._pde_rows)
            cols.append(self._flat(Ip + g + di, Jp + g + dj))
            vals.append(np.full(len(Ip), c))
            referenced[Ip + g + di, Jp + g + dj] = True
        if self.drift is not None:
            b = self.drift[Ip, Jp] / (2.0 * grid.hx)
            rows.extend([self._pde_rows, self._pde_rows])
            cols.extend([self._flat(Ip + g + 1, Jp + g), self._flat(Ip + g - 1, Jp + g)])
            vals.extend([b, -b])

        self._ghost_rows = []
        constrained = np.zeros(self._ext_shape, dtype=bool)
        for side in sf_grid.Side:
            derivative_kinds = self._derivative_kinds(side)
            h = grid.spacing(side.axis)
            for layer in range(1, g + 1):
                offset = -layer if side.is_lower else layer
                gI, gJ = self._line(side, offset)
                k = self._flat(gI, gJ)
                assigned[gI, gJ] = True
                if layer > len(derivative_kinds):
                    rows.append(k)
                    cols.append(k)
                    vals.append(np.ones(len(k)))
                    continue
                kind = derivative_kinds[layer - 1]
                order, weights = _STENCILS[kind]
                for o, w in weights.items():
                    sI, sJ = self._line(side, o)
                    rows.append(k)
                    cols.append(self._flat(sI, sJ))
                    vals.append(np.full(len(k), w / h**order))
                constrained[gI, gJ] = True
                slot = layer - 1
                self._ghost_rows.append((k, side, kind, slot))

        # remaining ghosts (corner regions) are pinned to zero
        rI, rJ = np.nonzero(~assigned)
        k = self._flat(rI, rJ)
        rows.append(k)
        cols.append(k)
        vals.append(np.ones(len(k)))

        ghost_mask = np.ones(self._ext_shape, dtype=bool)
        ghost_mask[g:g + grid.nx + 1, g:g + grid.ny + 1] = False
        if np.any(referenced & ghost_mask & ~constrained):
            raise exceptions.IllPosedProblem(
                "PDE stencil reaches an unconstrained ghost node"
            )

        n = self._ext_shape[0] * self._ext_shape[1]
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        if self.pure_neumann:
            wx = _trapezoid_weights(grid.x)
            wy = _trapezoid_weights(grid.y)
            mean_cols = self._pde_rows
            rows = np.concatenate([rows, self._pde_rows, np.full(len(mean_cols), n)])
            cols = np.concatenate([cols, np.full(len(self._pde_rows), n), mean_cols])
            vals = np.concatenate(
                [vals, np.ones(len(self._pde_rows)), (wx[Ip] * wy[Jp])]
            )
        self.matrix = sparse.csc_matrix(
            sparse.coo_matrix((vals, (rows, cols)), shape=(self.size, self.size))
        )
        LOG.debug(
            "assembled %s operator: %d unknowns, %d nonzeros",
            self.kind,
            self.size,
            self.matrix.nnz,
        )

    def _data_for(self, bc: BoundarySpec):
        normalized = {side: _normalize(bc[side]) for side in sf_grid.Side}
        for side, conds in normalized.items():
            if tuple(c.kind for c in conds) != self.kinds[side]:
                raise exceptions.IllPosedProblem(
                    "Boundary kinds on {0} do not match the operator".format(side.value)
                )
        return normalized

    def _side_length(self, side):
        return len(self.grid.side_nodes(side))

    def rhs_vector(self, rhs, bc: BoundarySpec) -> np.ndarray:
        """Right-hand side for the assembled rows."""
        normalized = self._data_for(bc)
        b = np.zeros(self.size)
        if rhs is not None:
            values = rhs.values if isinstance(rhs, sf_grid.ScalarField) else rhs
            values = np.broadcast_to(np.asarray(values, dtype=float), self.grid.shape)
            b[self._pde_rows] = values[self._pde_ij]
        for k, side, position in self._value_rows:
            cond = normalized[side][0]
            b[k] = _side_values(cond.data, self._side_length(side))[position]
        for k, side, kind, slot in self._ghost_rows:
            conds = [c for c in normalized[side] if c.kind != DIRICHLET]
            b[k] = _side_values(conds[slot].data, self._side_length(side))
        return b

    def _factorize(self):
        if self.backend == DIRECT:
            if self._factor is None:
                self._factor = splinalg.splu(self.matrix)
                LOG.debug("factorized %s operator (%d unknowns)", self.kind, self.size)
        elif self._ilu is None:
            self._ilu = splinalg.spilu(self.matrix, drop_tol=1e-6, fill_factor=20)

    def solve_vector(self, b: np.ndarray) -> np.ndarray:
        self._factorize()
        if self.backend == DIRECT:
            x = self._factor.solve(b)
        else:
            precond = splinalg.LinearOperator(self.matrix.shape, self._ilu.solve)
            x, info = splinalg.bicgstab(
                self.matrix,
                b,
                rtol=self.solver_tol,
                atol=0.0,
                maxiter=self.max_iter,
                M=precond,
            )
            if info != 0:
                raise exceptions.ConvergenceError(
                    "BiCGSTAB did not converge",
                    extra_data={"info": info, "kind": self.kind},
                )
        self._check_residual(x, b)
        return x

    def backward_error(self, x: np.ndarray, b: np.ndarray) -> float:
        r = np.max(np.abs(self.matrix @ x - b))
        scale = splinalg.norm(self.matrix, np.inf) * np.max(np.abs(x)) + np.max(
            np.abs(b)
        )
        return float(r / scale) if scale > 0 else 0.0

    def _check_residual(self, x, b):
        error = self.backward_error(x, b)
        if error > self.solver_tol:
            warnings.warn(
                "{0} solve backward error {1:.3e} exceeds {2:.1e}".format(
                    self.kind, error, self.solver_tol
                ),
                category=sf_warnings.SolverToleranceWarning,
            )

    def physical(self, x: np.ndarray) -> np.ndarray:
        g, grid = self.ghost, self.grid
        ext = x[: self._ext_shape[0] * self._ext_shape[1]].reshape(self._ext_shape)
        return ext[g:g + grid.nx + 1, g:g + grid.ny + 1]

    def check_compatibility(self, rhs, bc, tol: float = DEFAULT_COMPAT_TOL) -> float:
        """Relative defect of ``a * (boundary flux) = integral of rhs``."""
        normalized = self._data_for(bc)
        source = sf_grid.integrate(rhs)
        magnitude = sf_grid.integrate(abs(rhs))
        flux = 0.0
        for side in sf_grid.Side:
            nodes = self.grid.side_nodes(side)
            data = _side_values(normalized[side][0].data, len(nodes))
            sign = -1.0 if side.is_lower else 1.0
            flux += sign * float(spint.trapezoid(data, nodes))
            magnitude += self.coefficient * float(spint.trapezoid(np.abs(data), nodes))
        defect = abs(source - self.coefficient * flux)
        relative = defect / magnitude if magnitude > 0 else 0.0
        if relative > tol:
            raise exceptions.SingularProblem(
                "Pure-Neumann data are incompatible",
                extra_data={"source": source, "flux": self.coefficient * flux},
            )
        return relative

    def solve(self, rhs, bc: BoundarySpec, compat_tol: float = DEFAULT_COMPAT_TOL):
        """Solve for a field.

        :param rhs: Right-hand side field (or array/scalar), or ``None``
        :param bc: Mapping of side to conditions with the operator's kinds
        :returns: :class:`~shearflow.lib.grid.ScalarField`
        :raises: :class:`~shearflow.exceptions.SingularProblem` for
            incompatible pure-Neumann data
        """
        if self.pure_neumann:
            field = self.grid.zeros() + (0.0 if rhs is None else rhs)
            self.check_compatibility(field, bc, compat_tol)
        x = self.solve_vector(self.rhs_vector(rhs, bc))
        return sf_grid.ScalarField(self.grid, self.physical(x))

    def extend(self, field: sf_grid.ScalarField, bc: BoundarySpec) -> np.ndarray:
        """Fill the ghost layers of ``field`` from the derivative conditions.

        Corner ghost regions stay zero. Returns the extended array.
        """
        normalized = self._data_for(bc)
        g, grid = self.ghost, self.grid
        ext = np.zeros(self._ext_shape)
        ext[g:g + grid.nx + 1, g:g + grid.ny + 1] = field.values
        for side in sf_grid.Side:
            conds = [c for c in normalized[side] if c.kind != DIRICHLET]
            h = grid.spacing(side.axis)
            for layer, cond in enumerate(conds[:g], start=1):
                order, weights = _STENCILS[cond.kind]
                ghost_offset = -layer if side.is_lower else layer
                total = _side_values(cond.data, self._side_length(side)) * h**order
                for o, w in weights.items():
                    if o != ghost_offset:
                        total = total - w * ext[self._line(side, o)]
                ext[self._line(side, ghost_offset)] = total / weights[ghost_offset]
        return ext

    def apply_extended(self, ext: np.ndarray) -> np.ndarray:
        x = ext.ravel()
        if self.pure_neumann:
            x = np.append(x, 0.0)
        return self.matrix @ x

    def correction(self, field, rhs, bc: BoundarySpec) -> sf_grid.ScalarField:
        """Solve for the correction ``w`` such that ``field + w`` solves the
        problem, with ``field`` ghost-filled from ``bc``.

        The correction satisfies homogeneous value and derivative conditions
        whenever ``field`` already matches the value data.
        """
        ext = self.extend(field, bc)
        residual = self.rhs_vector(rhs, bc) - self.apply_extended(ext)
        x = self.solve_vector(residual)
        return sf_grid.ScalarField(self.grid, self.physical(x))


def solve_poisson(problem: EllipticProblem, **kwargs) -> sf_grid.ScalarField:
    if problem.kind != POISSON:
        raise exceptions.IllPosedProblem("Not a Poisson problem")
    compat_tol = kwargs.pop("compat_tol", DEFAULT_COMPAT_TOL)
    return problem.operator(**kwargs).solve(problem.rhs, problem.bc, compat_tol)


def solve_biharmonic(problem: EllipticProblem, **kwargs) -> sf_grid.ScalarField:
    if problem.kind != BIHARMONIC:
        raise exceptions.IllPosedProblem("Not a biharmonic problem")
    return problem.operator(**kwargs).solve(problem.rhs, problem.bc)


def apply_biharmonic(field: sf_grid.ScalarField, bc: BoundarySpec) -> sf_grid.ScalarField:
    """Discrete bilaplacian of ``field`` after filling ghosts from ``bc``.

    Nodes carrying a value condition report zero.
    """
    op = EllipticOperator(field.grid, BIHARMONIC, kinds_of(bc))
    y = op.apply_extended(op.extend(field, bc))
    out = np.zeros(field.grid.shape)
    out[op._pde_ij] = y[op._pde_rows]
    return sf_grid.ScalarField(field.grid, out)


def boundary_defects(field: sf_grid.ScalarField, bc: BoundarySpec) -> ty.Dict[str, float]:
    """Max defect of every condition measured with one-sided grid stencils."""
    derivatives = {
        0: {DIRICHLET: lambda f: f, NEUMANN: sf_grid.apply_dx, SECOND: sf_grid.apply_dxx,
            THIRD: lambda f: sf_grid.apply_dx(sf_grid.apply_dxx(f))},
        1: {DIRICHLET: lambda f: f, NEUMANN: sf_grid.apply_dy, SECOND: sf_grid.apply_dyy,
            THIRD: lambda f: sf_grid.apply_dy(sf_grid.apply_dyy(f))},
    }
    report = {}
    for side in sf_grid.Side:
        for cond in _normalize(bc[side]):
            measured = derivatives[side.axis][cond.kind](field).trace(side).values
            target = _side_values(cond.data, len(measured))
            report["{0}:{1}".format(side.value, cond.kind)] = float(
                np.max(np.abs(measured - target))
            )
    return report


@dataclasses.dataclass(frozen=True)
class GaugeReport:
    div: float
    curl: float
    magnitude: float
    tol: float

    @property
    def flagged(self) -> bool:
        # div and curl are one derivative rougher; only F itself is gated
        return self.magnitude > self.tol


def harmonic_gauge_check(
    F: sf_grid.VectorField, tol: float = 1e-6, scale: float = 1.0
) -> GaugeReport:
    """Measure how far ``F`` is from vanishing.

    ``div F = curl F = 0`` alone leaves a harmonic gradient; the momentum
    equations are recovered only when ``F`` itself is zero.
    """
    report = GaugeReport(
        div=sf_grid.divergence(F).max_abs(),
        curl=sf_grid.curl2d(F).max_abs(),
        magnitude=F.max_abs(),
        tol=tol * max(scale, math.ulp(1.0)),
    )
    if report.flagged:
        LOG.debug(
            "gauge check: div=%.3e curl=%.3e |F|=%.3e", report.div, report.curl,
            report.magnitude,
        )
    return report
