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
import sympy

from shearflow import exceptions
from shearflow.lib import background

from shearflow.tests import fakes
from shearflow.tests.unit import base


@ddt.ddt
class TestFlowParams(base.TestCase):

    def test_defaults(self):
        params = background.FlowParams(eps=1e-2)
        self.assertClose(0.55, params.kappa)
        self.assertClose(1e-2 ** 0.55, params.eta)
        self.assertClose(1e-2 ** 0.55, params.scale)
        self.assertClose(2 * 0.5 * 1e-2 ** 0.45, params.tilt)
        self.assertClose(2 * 1e-2 * params.eta**2, params.transport_coefficient)
        self.assertClose(1e-2 ** 0.7, params.lambda_ceiling)

    def test_from_exponent(self):
        params = background.FlowParams.from_exponent(1e-3, 0.6)
        self.assertClose(1e-3 ** 0.6, params.eta)

    def test_snapshot(self):
        snap = fakes.make_params(1e-2).snapshot()
        self.assertEqual(1e-2, snap["eps"])
        self.assertEqual(background.FlowParams(**snap), background.FlowParams(**snap))

    @ddt.data(
        {"eps": 0.0},
        {"eps": 1.0},
        {"eps": 0.1, "gamma": 1.0},
        {"eps": 0.1, "alpha0": 0.0},
        {"eps": 0.1, "alpha1": 0.0, "alpha2": 0.0},
        {"eps": 0.1, "alpha2": -1.0},
        {"eps": 0.1, "sigma": 0.0},
        {"eps": 0.1, "delta": 0.3},
        {"eps": 0.1, "eta": 0.5},
    )
    def test_invalid(self, kwargs):
        self.assertRaises(exceptions.ParameterError, background.FlowParams, **kwargs)


class TestShearFlow(base.TestCase):

    def setUp(self):
        super(TestShearFlow, self).setUp()
        self.params = background.FlowParams(eps=1e-2, alpha0=1.0, alpha1=0.5, alpha2=2.0)
        self.grid = fakes.make_grid(16)

    def test_profile(self):
        y = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose([1.0, 3.5, 2.0], background.eval_us(self.params, y))
        np.testing.assert_allclose([4.5, 0.5, -3.5], background.eval_us_y(self.params, y))
        np.testing.assert_allclose([-4.0] * 3, background.eval_us_yy(self.params, y))

    def test_fields(self):
        us = background.shear_field(self.params, self.grid)
        np.testing.assert_allclose(
            background.eval_us(self.params, self.grid.y), us.values[3])
        self.assertClose(-4.0, background.shear_yy_field(self.params, self.grid).values[0, 0])

    def test_euler_residual_vanishes(self):
        self.assertLess(background.euler_residual(self.params, self.grid), 1e-10)

    def test_ns_residual_vanishes(self):
        self.assertLess(background.ns_residual(self.params, self.grid), 1e-10)

    def test_parallel_flow_state(self):
        w, rho = background.parallel_flow_state(self.params, self.grid)
        self.assertEqual(0.0, w.v.max_abs())
        expected = (1.0 - self.params.transport_coefficient * 2.0 * self.grid.x[-1]) ** (
            1.0 / self.params.gamma)
        self.assertClose(expected, rho.values[-1, 5])
        self.assertClose(1.0, rho.values[0, 0])

    def test_pressure_tilt_alternative(self):
        result = background.pressure_tilt_alternative(self.params)
        self.assertClose(self.params.tilt, result["delta_consistent"])
        self.assertClose(2 * 2.0 * 1e-2, result["alternative"])
        self.assertClose(abs(result["delta_consistent"] - result["alternative"]),
                         result["difference"])


class TestCutoff(base.TestCase):

    def test_values(self):
        self.assertEqual(1.0, background.cutoff_chi(0.0))
        self.assertEqual(1.0, background.cutoff_chi(0.5))
        self.assertEqual(0.0, background.cutoff_chi(1.0))
        self.assertEqual(0.0, background.cutoff_chi(3.0))
        self.assertClose(0.5, background.cutoff_chi(0.75), atol=1e-12)

    def test_monotone(self):
        t = np.linspace(0.0, 1.2, 241)
        chi = background.cutoff_chi(t)
        self.assertTrue(np.all(np.diff(chi) <= 1e-15))

    def test_smooth_joins(self):
        for k in range(1, 4):
            self.assertClose(0.0, background.cutoff_chi(0.5 + 1e-9, k), atol=1e-6)
            self.assertClose(0.0, background.cutoff_chi(1.0 - 1e-9, k), atol=1e-6)

    def test_negative(self):
        self.assertRaises(exceptions.DomainError, background.cutoff_chi, -0.1)
        self.assertRaises(exceptions.DomainError, background.cutoff_chi, np.array([0.2, -1.0]))


@ddt.ddt
class TestExpressions(base.TestCase):

    def test_parse(self):
        y = sympy.Symbol("y", real=True)
        expr = background.parse_expression("y^2*(2-y)^2", "y")
        self.assertEqual(0, sympy.simplify(expr - y**2 * (2 - y) ** 2))

    def test_scientific_literal(self):
        expr = background.parse_expression("2.5e-3*sin(pi*y)", "y")
        self.assertAlmostEqual(2.5e-3, float(expr.subs(sympy.Symbol("y", real=True), 0.5)))

    def test_number(self):
        self.assertEqual(sympy.Float(2.5), background.parse_expression(2.5, "y"))

    @ddt.data(
        "x + 1",
        "sqrt(y)",
        "__import__('os')",
        "y; 1",
        "y +",
    )
    def test_rejected(self, text):
        self.assertRaises(exceptions.ConfigError, background.parse_expression, text, "y")


class TestProfile(base.TestCase):

    def setUp(self):
        super(TestProfile, self).setUp()
        self.y = np.linspace(0.0, 2.0, 33)

    def test_closed_form_derivatives(self):
        p = background.Profile.from_expression("a4", "y", "sin(pi*y)", self.y)
        np.testing.assert_allclose(np.pi * np.cos(np.pi * self.y), p.derivative(1), atol=1e-12)
        self.assertClose(-np.pi**2 * math.sin(np.pi * 0.5), p.derivative_at(2, 0.5))

    def test_sampled_endpoint_derivative(self):
        p = background.Profile.from_values("a1", "y", self.y, self.y**2 - 3 * self.y)
        self.assertClose(-3.0, p.derivative_at(1, 0.0), rtol=1e-9)
        self.assertClose(1.0, p.derivative_at(1, 2.0), rtol=1e-9)
        self.assertClose(2.0, p.derivative_at(2, 2.0), rtol=1e-9)

    def test_scaled(self):
        p = background.Profile.from_expression("a2", "y", "y", self.y).scaled(2.0)
        np.testing.assert_allclose(2 * self.y, p.values)
        self.assertClose(2.0, p.derivative_at(1, 1.0))

    def test_sobolev(self):
        p = background.Profile.from_expression("a2", "y", "1", self.y)
        self.assertClose(math.sqrt(2.0), p.sobolev(3), rtol=1e-12)

    def test_zero(self):
        self.assertTrue(background.Profile.zeros("b0", "x", self.y).is_zero())
        self.assertFalse(background.Profile.from_values("b0", "x", self.y, self.y).is_zero())

    def test_too_short(self):
        self.assertRaises(exceptions.GridError, background.Profile.from_values,
                          "a1", "y", [0.0, 1.0], [0.0, 0.0])


class TestBoundaryData(base.TestCase):

    def setUp(self):
        super(TestBoundaryData, self).setUp()
        self.grid = fakes.make_grid(16)
        self.params = fakes.make_params(1e-2)

    def test_zeros(self):
        bd = background.BoundaryData.zeros(self.grid)
        self.assertTrue(bd.is_zero())
        self.assertEqual(0.0, background.lambda_norm(bd, self.params))

    def test_unknown_profile(self):
        self.assertRaises(exceptions.ConfigError, background.BoundaryData.from_expressions,
                          self.grid, {"a5": "y"})

    def test_h0_carries_eta_squared(self):
        bd = background.BoundaryData.from_expressions(self.grid, {"h0": "1"}, self.params.eta)
        np.testing.assert_allclose(self.params.eta**2, bd.h0.values)
        rho_bar = background.background_density(self.params, bd)
        np.testing.assert_allclose(self.grid.x, rho_bar.values[:, 4])

    def test_from_arrays(self):
        bd = background.BoundaryData.from_arrays(self.grid, {"a2": np.sin(np.pi * self.grid.y)})
        self.assertFalse(bd.is_zero())
        self.assertTrue(bd.a1.is_zero())

    def test_default_shapes_compatible(self):
        bd = background.BoundaryData.from_expressions(self.grid, fakes.SHAPES)
        report = background.require_compatible(bd)
        self.assertTrue(report.passed)
        self.assertEqual(10, len(report.defects))

    def test_incompatible(self):
        bd = background.BoundaryData.from_expressions(self.grid, {"a1": "y", "a3": "1"})
        report = background.check_compatibility(bd)
        self.assertIn("a1'(0)=b0(0)", report.failed)
        self.assertIn("a3(0)=0", report.failed)
        e = self.assertRaises(exceptions.CompatibilityError,
                              background.require_compatible, bd)
        self.assertEqual(report.failed, e.failed)

    def test_scale_to_lambda(self):
        bd = fakes.make_boundary_data(self.grid, self.params, factor=0.5)
        self.assertClose(0.5 * self.params.lambda_ceiling,
                         background.lambda_norm(bd, self.params), rtol=1e-10)
        self.assertClose(background.lambda_norm(bd, self.params),
                         background.lambda_gate(bd, self.params))

    def test_lambda_gate(self):
        bd = fakes.make_boundary_data(self.grid, self.params, factor=2.0)
        self.assertRaises(exceptions.LambdaGateError, background.lambda_gate, bd, self.params)

    def test_scale_zero_data(self):
        bd = background.BoundaryData.zeros(self.grid)
        self.assertIs(bd, background.scale_to_lambda(bd, self.params, 0.5))
