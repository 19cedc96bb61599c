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

"""pytest collection wiring for testscenarios.

``testscenarios.WithScenarios`` multiplies tests inside ``run()``, which
pytest's unittest integration bypasses. Expand each scenario into its own
collected class instead, mirroring what the unittest runner does.
"""

import testscenarios

from _pytest import unittest as pytest_unittest


def pytest_pycollect_makeitem(collector, name, obj):
    if not (isinstance(obj, type)
            and issubclass(obj, testscenarios.WithScenarios)
            and getattr(obj, "scenarios", None)):
        return None
    items = []
    for scenario, attrs in obj.scenarios:
        expanded = "{0}({1})".format(name, scenario)
        cls = type(expanded, (obj,), dict(attrs, scenarios=None,
                                          __module__=obj.__module__))
        item = pytest_unittest.UnitTestCase.from_parent(collector, name=expanded)
        item._obj = cls
        items.append(item)
    return items
