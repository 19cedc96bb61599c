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

from shearflow.lib import verification

from shearflow.tests.unit import base


class TestSuiteResult(base.TestCase):

    def test_ratios(self):
        result = verification.SuiteResult(
            "x", (8, 16, 32), (1.0, 0.25, 0.0625), verification.SECOND_ORDER_BAND)
        self.assertEqual([4.0, 4.0], result.ratios)
        self.assertTrue(result.passed)

    def test_outside_band(self):
        result = verification.SuiteResult(
            "x", (8, 16, 32), (1.0, 0.5, 0.25), verification.SECOND_ORDER_BAND)
        self.assertFalse(result.passed)
        result = verification.SuiteResult(
            "x", (8, 16, 32), (1.0, 0.5, 0.25), verification.FIRST_ORDER_BAND)
        self.assertTrue(result.passed)

    def test_exact_error(self):
        result = verification.SuiteResult(
            "x", (8, 16), (1e-3, 0.0), verification.SECOND_ORDER_BAND)
        self.assertEqual([math.inf], result.ratios)
        self.assertFalse(result.passed)


class TestSuites(base.TestCase):

    def test_inflow_ode(self):
        result = verification.inflow_ode_suite()
        self.assertEqual("inflow_ode", result.name)
        self.assertTrue(result.passed, result)

    def test_curl(self):
        self.assertTrue(verification.curl_suite().passed)

    def test_transport_first_order(self):
        result = verification.transport_suite()
        self.assertEqual(verification.FIRST_ORDER_BAND, result.band)
        self.assertTrue(result.passed, result)
        self.assertTrue(all(e > 0.0 for e in result.errors))
