#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.
#

import numpy as np
import testscenarios

from shearflow import exceptions
from shearflow.lib import elliptic
from shearflow.lib import grid as sf_grid
from shearflow.lib import linsolve
from shearflow.lib import verification

from shearflow.tests import fakes
from shearflow.tests.unit import base
from shearflow.tests.unit import utils

Side = sf_grid.Side

# u = x^2 + x y + 2 y^2 and its partial derivatives
QUADRATIC = {
    elliptic.DIRICHLET: (lambda X, Y: X**2 + X * Y + 2 * Y**2,) * 2,
    elliptic.NEUMANN: (lambda X, Y: 2 * X + Y, lambda X, Y: X + 4 * Y),
    elliptic.SECOND: (lambda X, Y: 2.0 + 0 * X, lambda X, Y: 4.0 + 0 * X),
    elliptic.THIRD: (lambda X, Y: 0 * X, lambda X, Y: 0 * X),
}


def exact_bc(grid, kinds, table=QUADRATIC):
    bc = {}
    for side in Side:
        bc[side] = tuple(
            elliptic.Condition(kind, utils.sample(grid, table[kind][side.axis]).trace(side))
            for kind in kinds[side]
        )
    return bc


class TestPoissonPatterns(testscenarios.WithScenarios, base.TestCase):

    scenarios = [
        (name, {"pattern": name}) for name in sorted(verification.POISSON_PATTERNS)
    ]

    def test_quadratic_reproduced(self):
        grid = fakes.make_grid(12)
        kinds = verification.POISSON_PATTERNS[self.pattern]
        problem = elliptic.EllipticProblem(
            elliptic.POISSON, grid.zeros() + 6.0, exact_bc(grid, kinds))
        u = elliptic.solve_poisson(problem)
        exact = utils.sample(grid, QUADRATIC[elliptic.DIRICHLET][0])
        np.testing.assert_allclose(exact.values, u.values, atol=1e-9)

    def test_second_order(self):
        result = verification.poisson_suite(self.pattern, sizes=(16, 32, 64))
        self.assertTrue(result.passed, result)


class TestPoisson(base.TestCase):

    def setUp(self):
        super(TestPoisson, self).setUp()
        self.grid = fakes.make_grid(16)
        self.neumann = {side: (elliptic.NEUMANN,) for side in Side}

    def test_pure_neumann_up_to_constant(self):
        problem = elliptic.EllipticProblem(
            elliptic.POISSON, self.grid.zeros() + 6.0, exact_bc(self.grid, self.neumann))
        u = elliptic.solve_poisson(problem)
        exact = utils.sample(self.grid, QUADRATIC[elliptic.DIRICHLET][0])
        shift = u.values[0, 0] - exact.values[0, 0]
        np.testing.assert_allclose(exact.values + shift, u.values, atol=1e-8)

    def test_pure_neumann_incompatible(self):
        bc = {side: (elliptic.neumann(),) for side in Side}
        problem = elliptic.EllipticProblem(elliptic.POISSON, self.grid.zeros() + 1.0, bc)
        self.assertRaises(exceptions.SingularProblem, elliptic.solve_poisson, problem)

    def test_pure_neumann_rejects_drift(self):
        self.assertRaises(exceptions.IllPosedProblem, elliptic.EllipticOperator,
                          self.grid, elliptic.POISSON, self.neumann, drift=1.0)

    def test_iterative_backend(self):
        kinds = linsolve.CURL_KINDS
        bc = exact_bc(self.grid, kinds)
        rhs = self.grid.zeros() + 6.0
        direct = elliptic.EllipticOperator(self.grid, elliptic.POISSON, kinds).solve(rhs, bc)
        iterative = elliptic.EllipticOperator(
            self.grid, elliptic.POISSON, kinds, backend=elliptic.ITERATIVE,
            solver_tol=1e-12,
        ).solve(rhs, bc)
        np.testing.assert_allclose(direct.values, iterative.values, atol=1e-7)

    def test_operator_reused(self):
        op = elliptic.EllipticOperator(self.grid, elliptic.POISSON, linsolve.FLUX_KINDS)
        bc = exact_bc(self.grid, linsolve.FLUX_KINDS)
        first = op.solve(self.grid.zeros() + 6.0, bc)
        second = op.solve(self.grid.zeros() + 12.0, {
            side: tuple(elliptic.Condition(c.kind, 2.0 * c.data.values) for c in conds)
            for side, conds in bc.items()
        })
        np.testing.assert_allclose(2.0 * first.values, second.values, atol=1e-9)

    def test_drift(self):
        kinds = linsolve.CURL_KINDS
        bc = exact_bc(self.grid, kinds)
        # 0.1 lap u - 2 u_x for the quadratic
        rhs = 0.6 - 2.0 * utils.sample(self.grid, QUADRATIC[elliptic.NEUMANN][0])
        op = elliptic.EllipticOperator(self.grid, elliptic.POISSON, kinds,
                                       coefficient=0.1, drift=-2.0)
        exact = utils.sample(self.grid, QUADRATIC[elliptic.DIRICHLET][0])
        np.testing.assert_allclose(exact.values, op.solve(rhs, bc).values, atol=1e-9)

    def test_boundary_defects(self):
        bc = exact_bc(self.grid, linsolve.PHI_KINDS)
        exact = utils.sample(self.grid, QUADRATIC[elliptic.DIRICHLET][0])
        defects = elliptic.boundary_defects(exact, bc)
        self.assertEqual(4, len(defects))
        self.assertLess(max(defects.values()), 1e-9)
        self.assertIn("x=0:neumann", defects)


class TestBiharmonic(base.TestCase):

    def setUp(self):
        super(TestBiharmonic, self).setUp()
        self.grid = fakes.make_grid(16)
        self.kinds = {
            Side.X0: (elliptic.DIRICHLET, elliptic.SECOND),
            Side.XL: (elliptic.NEUMANN, elliptic.THIRD),
            Side.Y0: (elliptic.DIRICHLET, elliptic.NEUMANN),
            Side.Y2: (elliptic.DIRICHLET, elliptic.NEUMANN),
        }
        self.exact = utils.sample(self.grid, QUADRATIC[elliptic.DIRICHLET][0])

    def test_quadratic_reproduced(self):
        problem = elliptic.EllipticProblem(
            elliptic.BIHARMONIC, self.grid.zeros(), exact_bc(self.grid, self.kinds))
        u = elliptic.solve_biharmonic(problem)
        np.testing.assert_allclose(self.exact.values, u.values, atol=1e-8)

    def test_apply(self):
        lap2 = elliptic.apply_biharmonic(self.exact, exact_bc(self.grid, self.kinds))
        np.testing.assert_allclose(0.0, lap2.values, atol=1e-5)

    def test_correction_of_solution_vanishes(self):
        bc = exact_bc(self.grid, self.kinds)
        op = elliptic.EllipticOperator(self.grid, elliptic.BIHARMONIC, self.kinds)
        w = op.correction(self.exact, None, bc)
        self.assertLess(w.max_abs(), 1e-8)

    def test_second_order(self):
        self.assertTrue(verification.biharmonic_suite(sizes=(16, 32, 64)).passed)

    def test_corner_without_value(self):
        kinds = dict(self.kinds)
        kinds[Side.Y0] = (elliptic.NEUMANN, elliptic.THIRD)
        self.assertRaises(exceptions.IllPosedProblem, elliptic.EllipticOperator,
                          self.grid, elliptic.BIHARMONIC, kinds)

    def test_unsupported_pair(self):
        kinds = dict(self.kinds)
        kinds[Side.Y2] = (elliptic.NEUMANN, elliptic.SECOND)
        self.assertRaises(exceptions.IllPosedProblem, elliptic.EllipticOperator,
                          self.grid, elliptic.BIHARMONIC, kinds)


class TestValidation(base.TestCase):

    def setUp(self):
        super(TestValidation, self).setUp()
        self.grid = fakes.make_grid(8)

    def test_wrong_count(self):
        kinds = {side: (elliptic.DIRICHLET, elliptic.NEUMANN) for side in Side}
        self.assertRaises(exceptions.IllPosedProblem, elliptic.EllipticOperator,
                          self.grid, elliptic.POISSON, kinds)

    def test_unknown_kind(self):
        bc = {side: (elliptic.Condition("robin", 0.0),) for side in Side}
        self.assertRaises(exceptions.IllPosedProblem, elliptic.kinds_of, bc)

    def test_unknown_problem(self):
        self.assertRaises(exceptions.IllPosedProblem, elliptic.EllipticOperator,
                          self.grid, "helmholtz", linsolve.CURL_KINDS)

    def test_kinds_mismatch(self):
        op = elliptic.EllipticOperator(self.grid, elliptic.POISSON, linsolve.CURL_KINDS)
        bc = {side: (elliptic.dirichlet(),) for side in Side}
        self.assertRaises(exceptions.IllPosedProblem, op.solve, self.grid.zeros(), bc)

    def test_wrong_solver(self):
        problem = elliptic.EllipticProblem(
            elliptic.POISSON, self.grid.zeros(), {side: (elliptic.dirichlet(),) for side in Side})
        self.assertRaises(exceptions.IllPosedProblem, elliptic.solve_biharmonic, problem)


class TestGauge(base.TestCase):

    def setUp(self):
        super(TestGauge, self).setUp()
        self.grid = fakes.make_grid(16)

    def test_zero(self):
        report = elliptic.harmonic_gauge_check(sf_grid.VectorField.zeros(self.grid))
        self.assertFalse(report.flagged)

    def test_harmonic_gradient_flagged(self):
        F = sf_grid.VectorField(utils.sample(self.grid, lambda X, Y: 2 * X),
                                utils.sample(self.grid, lambda X, Y: -2 * Y))
        report = elliptic.harmonic_gauge_check(F)
        self.assertLess(report.div, 1e-10)
        self.assertLess(report.curl, 1e-10)
        self.assertTrue(report.flagged)

    def test_rough_small_field_not_flagged(self):
        # alternating in x: the one-sided edge stencils give div ~ 4e-7 / hx
        sign = np.where(np.arange(self.grid.nx + 1) % 2 == 0, 1.0, -1.0)
        values = 1e-7 * np.repeat(sign[:, np.newaxis], self.grid.ny + 1, axis=1)
        F = sf_grid.VectorField(sf_grid.ScalarField(self.grid, values), self.grid.zeros())
        report = elliptic.harmonic_gauge_check(F)
        self.assertGreater(report.div, 1e-6)
        self.assertFalse(report.flagged)
