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

import math

import ddt
import numpy as np

from shearflow.lib import grid as sf_grid
from shearflow.lib import norms

from shearflow.tests import fakes
from shearflow.tests.unit import base
from shearflow.tests.unit import utils


@ddt.ddt
class TestScalarNorms(base.TestCase):

    def setUp(self):
        super(TestScalarNorms, self).setUp()
        self.grid = fakes.make_grid(32)
        self.area = 2.0 * self.grid.length
        self.const = self.grid.zeros() - 3.0

    @ddt.data(1.0, 2.0, 4.0, 7.5)
    def test_lp_constant(self, p):
        self.assertClose(3.0 * self.area ** (1.0 / p), norms.lp(self.const, p), rtol=1e-12)

    def test_l2_many(self):
        self.assertClose(math.sqrt(2.0) * norms.l2(self.const),
                         norms.l2_many([self.const, self.const]))

    def test_derivatives(self):
        f = utils.sample(self.grid, lambda X, Y: X**3 + X * Y**2)
        self.assertEqual(1, len(norms.derivatives(f, 0)))
        self.assertEqual(2, len(norms.derivatives(f, 1)))
        self.assertEqual(3, len(norms.derivatives(f, 2)))
        third = norms.derivatives(f, 3)
        self.assertEqual(4, len(third))
        np.testing.assert_allclose(6.0, third[0].values, atol=1e-7)
        np.testing.assert_allclose(0.0, third[1].values, atol=1e-7)
        np.testing.assert_allclose(2.0, third[2].values, atol=1e-7)

    def test_sobolev_of_constant(self):
        expected = 3.0 * math.sqrt(self.area)
        self.assertClose(expected, norms.h1(self.const), rtol=1e-10)
        self.assertClose(expected, norms.h2(self.const), rtol=1e-10)
        self.assertClose(expected, norms.hk(self.const, 4), rtol=1e-10)
        self.assertClose(3.0 * self.area**0.25, norms.w2p(self.const, 4.0), rtol=1e-10)

    def test_h1_of_linear(self):
        f = utils.sample(self.grid, lambda X, Y: 2.0 * X + Y)
        L = self.grid.length
        exact = 4 * 2 * L**3 / 3 + 2 * 2 * L**2 * 2 / 2 + L * 8 / 3 + (4.0 + 1.0) * self.area
        self.assertClose(math.sqrt(exact), norms.h1(f), rtol=1e-3)

    def test_column_max(self):
        f = utils.sample(self.grid, lambda X, Y: X)
        L = self.grid.length
        self.assertClose(L * math.sqrt(2.0), norms.column_max_l2(f), rtol=1e-12)
        self.assertClose(2.0 * L, norms.column_max_many([f, f]), rtol=1e-12)
        self.assertClose(L * 2.0 ** 0.25, norms.column_max_lp([f], 4.0), rtol=1e-12)

    def test_weighted(self):
        w = norms.weighted(self.grid.zeros() + 1.0)
        np.testing.assert_allclose(self.grid.length - self.grid.x, w.values[:, 0])


class TestTraceNorms(base.TestCase):

    def test_constant_trace(self):
        y = np.linspace(0.0, 2.0, 17)
        t = sf_grid.Trace(sf_grid.Side.X0, y, np.full_like(y, 2.0))
        self.assertClose(2.0 * math.sqrt(2.0), norms.trace_l2(t), rtol=1e-12)
        self.assertClose(2.0 * 2.0 ** 0.25, norms.trace_lp(t, 4.0), rtol=1e-12)
        self.assertClose(2.0 * math.sqrt(2.0), norms.trace_sobolev(t, 3), rtol=1e-10)

    def test_sequence_sobolev(self):
        y = np.linspace(0.0, 2.0, 33)
        t = sf_grid.Trace(sf_grid.Side.X0, y, np.sin(y))
        self.assertClose(norms.trace_sobolev(t, 2), norms.sequence_sobolev(np.sin(y), y, 2))


class TestCompositeNorms(base.TestCase):

    def setUp(self):
        super(TestCompositeNorms, self).setUp()
        self.grid = fakes.make_grid(24)
        self.params = fakes.make_params(1e-2)
        u = utils.sample(self.grid, lambda X, Y: np.sin(np.pi * Y) * (1 + X**2))
        v = utils.sample(self.grid, lambda X, Y: X * np.sin(np.pi * Y / 2))
        self.w = sf_grid.VectorField(u, v)
        self.rho = utils.sample(self.grid, lambda X, Y: np.cos(Y) + X)

    def test_term_counts(self):
        self.assertEqual(8, len(norms.norm_A(self.rho, self.params).terms))
        self.assertEqual(11, len(norms.norm_B(self.w, self.params).terms))
        self.assertEqual(4, len(norms.norm_X(self.w, self.params).terms))
        self.assertEqual(3, len(norms.norm_Y(self.rho, self.params).terms))

    def test_zero(self):
        zero = sf_grid.VectorField.zeros(self.grid)
        self.assertEqual(0.0, norms.norm_B(zero, self.params).total)
        self.assertEqual(0.0, norms.norm_X(zero, self.params).total)
        self.assertEqual(0.0, norms.norm_A(self.grid.zeros(), self.params).total)

    def test_homogeneous(self):
        for norm, arg in ((norms.norm_B, self.w), (norms.norm_X, self.w),
                          (norms.norm_A, self.rho), (norms.norm_Y, self.rho)):
            self.assertClose(2.0 * norm(arg, self.params).total,
                             norm(2.0 * arg, self.params).total, rtol=1e-10)

    def test_shared_terms(self):
        b = norms.norm_B(self.w, self.params)
        x = norms.norm_X(self.w, self.params)
        self.assertClose(b.terms["H1"], x.terms["H1"])
        self.assertClose(b.terms["curl_H1"], x.terms["curl_H1"])
        a = norms.norm_A(self.rho, self.params)
        y = norms.norm_Y(self.rho, self.params)
        self.assertClose(a.terms["H1"], y.terms["H1"])
        self.assertClose(a.terms["grad_colmax"], y.terms["grad_colmax"])

    def test_report(self):
        report = norms.norm_Y(self.rho, self.params)
        rows = dict(report.rows())
        self.assertEqual(report.total, rows["Y:total"])
        self.assertEqual(float(report), report.total)
        self.assertEqual(self.params.eps, report.eps)
        self.assertIn("Y:H1", rows)

    def test_exponent_recorded(self):
        self.assertEqual(6.0, norms.norm_B(self.w, self.params, 6.0).p)
