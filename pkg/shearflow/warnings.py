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


class ShearflowWarning(Warning):
    """Base class for warnings emitted by the solver."""


class CornerCompatibilityWarning(ShearflowWarning):
    """Boundary data of the flux problem disagree at a corner."""


class LiftToleranceWarning(ShearflowWarning):
    """A lifted boundary identity exceeds the configured tolerance."""


class InnerSweepWarning(ShearflowWarning):
    """The inner fixed-point sweep of a linear solve did not converge."""


class SolverToleranceWarning(ShearflowWarning):
    """A direct elliptic solve left a residual above solver_tol."""
