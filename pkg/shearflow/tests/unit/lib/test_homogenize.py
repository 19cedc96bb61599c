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

from shearflow import exceptions
from shearflow import warnings as sf_warnings
from shearflow.lib import background
from shearflow.lib import grid as sf_grid
from shearflow.lib import homogenize

from shearflow.tests import fakes
from shearflow.tests.unit import base

Side = sf_grid.Side


class TestLift(base.TestCase):

    def setUp(self):
        super(TestLift, self).setUp()
        self.grid = fakes.make_grid(16)
        self.params = fakes.make_params(1e-2)
        self.bd = fakes.make_boundary_data(self.grid, self.params)
        self.lift = homogenize.build_lift(self.bd)

    def test_value_conditions_exact(self):
        np.testing.assert_allclose(
            self.bd.a1.values, self.lift.ubar.trace(Side.X0).values, atol=1e-12)
        np.testing.assert_allclose(
            self.bd.a3.values, self.lift.vbar.trace(Side.XL).values, atol=1e-12)
        self.assertLess(np.max(np.abs(self.lift.vbar.trace(Side.Y0).values)), 1e-12)
        self.assertLess(np.max(np.abs(self.lift.vbar.trace(Side.Y2).values)), 1e-12)

    def test_defects(self):
        self.assertEqual(8, len(self.lift.defects))
        for key in ("u(x=0)=a1", "v(y=0)=0", "v(y=2)=0", "v(x=L)=a3"):
            self.assertLess(self.lift.defects[key], 1e-12, key)

    def test_velocity(self):
        velocity = self.lift.velocity
        self.assertIs(self.lift.ubar, velocity.u)
        self.assertIs(self.lift.vbar, velocity.v)
        self.assertEqual(self.grid, self.lift.grid)

    def test_bound_ratio(self):
        self.assertGreater(self.lift.data_norm, 0.0)
        self.assertTrue(np.isfinite(self.lift.bound_ratio))
        self.assertGreater(self.lift.bound_ratio, 0.0)

    def test_zero_data(self):
        bd = background.BoundaryData.zeros(self.grid)
        lift = homogenize.build_lift(bd)
        self.assertEqual(0.0, lift.ubar.max_abs())
        self.assertEqual(0.0, lift.vbar.max_abs())
        self.assertEqual(0.0, lift.bound_ratio)

    def test_incompatible(self):
        shapes = dict(fakes.SHAPES, a3="1+y")
        bd = background.BoundaryData.from_expressions(self.grid, shapes, self.params.eta)
        self.assertRaises(exceptions.CompatibilityError, homogenize.build_lift, bd)


class TestWallExtensions(base.TestCase):

    def setUp(self):
        super(TestWallExtensions, self).setUp()
        self.grid = fakes.make_grid(16)
        params = fakes.make_params(1e-2)
        shapes = dict(fakes.SHAPES, b0="x^2*(x-0.25)^2", b1="x^2*(0.25-x)^2")
        self.bd = fakes.make_boundary_data(self.grid, params, shapes=shapes)

    def test_h1_walls(self):
        h1, _ = homogenize.build_h1_h2(self.bd)
        np.testing.assert_allclose(self.bd.a1.derivative_at(0, 0.0),
                                   h1.trace(Side.Y0).values, atol=1e-14)
        np.testing.assert_allclose(self.bd.a1.derivative_at(0, 2.0),
                                   h1.trace(Side.Y2).values, atol=1e-14)

    def test_h2_vanishes_on_walls(self):
        _, h2 = homogenize.build_h1_h2(self.bd)
        self.assertEqual(0.0, np.max(np.abs(h2.trace(Side.Y0).values)))
        self.assertEqual(0.0, np.max(np.abs(h2.trace(Side.Y2).values)))

    def test_outflow_second_derivative(self):
        vxx = homogenize.outflow_second_derivative(self.bd)
        self.assertEqual((self.grid.ny + 1,), vxx.shape)


class TestLiftWarnings(base.TestWarnings):

    def test_tolerance_warning(self):
        grid = fakes.make_grid(8)
        params = fakes.make_params(1e-2)
        bd = fakes.make_boundary_data(grid, params)
        homogenize.build_lift(bd, lift_tol=0.0)
        self.assertIn(sf_warnings.LiftToleranceWarning, self.categories())
