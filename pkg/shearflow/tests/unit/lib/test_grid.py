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

import ddt
import numpy as np

from shearflow import exceptions
from shearflow.lib import grid as sf_grid

from shearflow.tests.unit import base
from shearflow.tests.unit import utils

Side = sf_grid.Side


@ddt.ddt
class TestGrid(base.TestCase):

    def test_geometry(self):
        grid = sf_grid.Grid(16, 32, 0.25)
        self.assertEqual((17, 33), grid.shape)
        self.assertClose(0.25 / 16, grid.hx)
        self.assertClose(2.0 / 32, grid.hy)
        self.assertEqual(0.0, grid.x[0])
        self.assertClose(0.25, grid.x[-1])
        self.assertClose(2.0, grid.y[-1])

    def test_refine(self):
        grid = sf_grid.Grid.square(16).refine()
        self.assertEqual(sf_grid.Grid(32, 32, 0.25), grid)

    @ddt.data(
        (4, 16, 0.25),
        (16, 7, 0.25),
        (16, 16, 0.0),
        (16, 16, 1.5),
        (16.5, 16, 0.25),
    )
    @ddt.unpack
    def test_invalid(self, nx, ny, length):
        self.assertRaises(exceptions.GridError, sf_grid.Grid, nx, ny, length)

    def test_side_nodes(self):
        grid = sf_grid.Grid(8, 10)
        np.testing.assert_array_equal(grid.y, grid.side_nodes(Side.X0))
        np.testing.assert_array_equal(grid.x, grid.side_nodes(Side.Y2))


class TestFields(base.TestCase):

    def setUp(self):
        super(TestFields, self).setUp()
        self.grid = sf_grid.Grid(16, 16)

    def test_values_frozen(self):
        f = self.grid.zeros()
        self.assertFalse(f.values.flags.writeable)

    def test_shape_mismatch(self):
        self.assertRaises(ValueError, sf_grid.ScalarField, self.grid, np.zeros((3, 3)))

    def test_non_finite(self):
        values = np.zeros(self.grid.shape)
        values[2, 2] = np.nan
        self.assertRaises(ValueError, sf_grid.ScalarField, self.grid, values)

    def test_mixed_grids(self):
        other = sf_grid.Grid(8, 8).zeros()
        self.assertRaises(ValueError, lambda: self.grid.zeros() + other)

    def test_arithmetic(self):
        f = utils.sample(self.grid, lambda X, Y: X + Y)
        g = 2.0 * f - f / 2.0 + 1.0
        np.testing.assert_allclose(1.5 * f.values + 1.0, g.values)
        self.assertClose(f.max_abs(), (-f).max_abs())
        self.assertClose(0.25 + 2.0, abs(-f).max_abs())

    def test_vector_arithmetic(self):
        w = sf_grid.VectorField(self.grid.zeros() + 1.0, self.grid.zeros() - 2.0)
        self.assertClose(4.0, (w * 2.0).max_abs())
        self.assertClose(0.0, (w - w).max_abs())


@ddt.ddt
class TestOperators(base.TestCase):

    def setUp(self):
        super(TestOperators, self).setUp()
        self.grid = sf_grid.Grid(12, 20, 0.5)
        self.f = utils.sample(self.grid, lambda X, Y: X**2 + 3 * X * Y + Y**2)

    def test_first_derivatives_exact_for_quadratics(self):
        fx = utils.sample(self.grid, lambda X, Y: 2 * X + 3 * Y)
        fy = utils.sample(self.grid, lambda X, Y: 3 * X + 2 * Y)
        np.testing.assert_allclose(fx.values, sf_grid.apply_dx(self.f).values, atol=1e-11)
        np.testing.assert_allclose(fy.values, sf_grid.apply_dy(self.f).values, atol=1e-11)

    def test_second_derivatives_exact_for_cubics(self):
        f = utils.sample(self.grid, lambda X, Y: X**3 - 2 * Y**3 + X * Y)
        np.testing.assert_allclose(
            utils.sample(self.grid, lambda X, Y: 6 * X).values,
            sf_grid.apply_dxx(f).values, atol=1e-8)
        np.testing.assert_allclose(
            utils.sample(self.grid, lambda X, Y: -12 * Y).values,
            sf_grid.apply_dyy(f).values, atol=1e-8)
        np.testing.assert_allclose(
            np.ones(self.grid.shape), sf_grid.apply_dxy(f).values, atol=1e-9)

    def test_laplacian(self):
        np.testing.assert_allclose(
            np.full(self.grid.shape, 4.0), sf_grid.laplacian(self.f).values, atol=1e-8)

    @ddt.data(
        (lambda X, Y: Y, lambda X, Y: X, 0.0, 2.0),
        (lambda X, Y: Y, lambda X, Y: -X, 2.0, 0.0),
        (lambda X, Y: X, lambda X, Y: Y, 0.0, 2.0),
    )
    @ddt.unpack
    def test_curl_and_divergence(self, u, v, curl, div):
        w = sf_grid.VectorField(utils.sample(self.grid, u), utils.sample(self.grid, v))
        np.testing.assert_allclose(curl, sf_grid.curl2d(w).values, atol=1e-11)
        np.testing.assert_allclose(div, sf_grid.divergence(w).values, atol=1e-11)

    def test_gradient(self):
        g = sf_grid.gradient(self.f)
        self.assertIsInstance(g, sf_grid.VectorField)
        np.testing.assert_allclose(sf_grid.apply_dx(self.f).values, g.u.values)

    def test_first_derivative_second_order(self):
        errors = []
        for n in (16, 32, 64):
            grid = sf_grid.Grid.square(n)
            f = utils.sample(grid, lambda X, Y: np.sin(3 * X) * np.cos(Y))
            exact = utils.sample(grid, lambda X, Y: 3 * np.cos(3 * X) * np.cos(Y))
            errors.append((sf_grid.apply_dx(f) - exact).max_abs())
        for coarse, fine in zip(errors, errors[1:]):
            self.assertTrue(3.2 <= coarse / fine <= 4.8, errors)


class TestTraces(base.TestCase):

    def setUp(self):
        super(TestTraces, self).setUp()
        self.grid = sf_grid.Grid(10, 16, 0.25)
        self.f = utils.sample(self.grid, lambda X, Y: X + 10 * Y)

    def test_extract(self):
        t = self.f.trace(Side.X0)
        np.testing.assert_allclose(10 * self.grid.y, t.values)
        t = self.f.trace(Side.XL)
        np.testing.assert_allclose(0.25 + 10 * self.grid.y, t.values)
        t = self.f.trace(Side.Y2)
        np.testing.assert_allclose(self.grid.x + 20.0, t.values)
        np.testing.assert_array_equal(self.grid.x, t.nodes)

    def test_extract_trace_function(self):
        t = sf_grid.extract_trace(self.f, Side.Y0)
        self.assertEqual(Side.Y0, t.side)
        np.testing.assert_allclose(self.grid.x, t.values)

    def test_trace_length_mismatch(self):
        self.assertRaises(ValueError, sf_grid.Trace, Side.X0, np.zeros(3), np.zeros(4))

    def test_spacing(self):
        self.assertClose(self.grid.hy, self.f.trace(Side.X0).spacing)

    def test_trace_derivative(self):
        y = self.grid.y
        t = sf_grid.Trace(Side.X0, y, y**3)
        np.testing.assert_allclose(3 * y**2, sf_grid.trace_derivative(t).values, atol=0.05)
        np.testing.assert_allclose(6 * y, sf_grid.trace_derivative(t, 2).values, atol=1e-9)

    def test_integrals(self):
        self.assertClose(0.25**2 / 2 * 2 + 10 * 2.0 * 0.25, sf_grid.integrate(self.f))
        self.assertClose(10 * 2.0, sf_grid.integrate_trace(self.f.trace(Side.X0)))
