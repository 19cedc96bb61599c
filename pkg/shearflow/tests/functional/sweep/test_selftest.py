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

from shearflow.lib import verification

from shearflow.tests.functional.sweep import base


class TestSelftest(base.BaseSweepTest):

    def test_suites_converge(self):
        results = verification.run_suites()
        self.assertEqual(len(verification.POISSON_PATTERNS) + 4, len(results))
        failed = [(r.name, r.ratios) for r in results if not r.passed]
        self.assertEqual([], failed)
