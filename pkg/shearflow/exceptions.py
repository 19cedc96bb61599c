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
Exception definitions.
"""


class ShearflowException(Exception):
    """The base exception class for all exceptions this library raises."""

    def __init__(self, message=None, extra_data=None):
        self.message = self.__class__.__name__ if message is None else message
        self.extra_data = extra_data
        super(ShearflowException, self).__init__(self.message)

    def __str__(self):
        if self.extra_data:
            return "{0} ({1})".format(self.message, _format_extra(self.extra_data))
        return self.message


def _format_extra(extra_data):
    if isinstance(extra_data, dict):
        return ", ".join("{0}={1}".format(k, v) for k, v in sorted(extra_data.items()))
    return str(extra_data)


class ConfigError(ShearflowException):
    """The configuration document is missing, malformed or invalid."""


class GridError(ShearflowException):
    """A grid was requested with invalid dimensions."""


class ParameterError(ShearflowException):
    """Flow parameters violate their admissible ranges."""


class DomainError(ShearflowException):
    """An argument lies outside the domain of the operation."""


class CompatibilityError(ShearflowException):
    """Boundary data violate the corner compatibility conditions."""

    def __init__(self, message=None, extra_data=None, failed=None):
        super(CompatibilityError, self).__init__(message, extra_data)
        self.failed = failed or []


class IllPosedProblem(ShearflowException):
    """An elliptic problem has an unsupported or ill-posed set of conditions."""


class SingularProblem(IllPosedProblem):
    """A pure-Neumann problem was given incompatible data."""


class ConvergenceError(ShearflowException):
    """An iterative process failed to converge."""


class FlowReversalError(ShearflowException):
    """The transport velocity is not strictly positive."""


class PositivityError(ShearflowException):
    """The reconstructed density is not strictly positive."""


class NormalizationError(ShearflowException):
    """The reconstructed density is not 1 at the inflow corner."""


class ResidualError(ShearflowException):
    """A linear solve produced residuals beyond the breakdown threshold."""


class NonContractionError(ConvergenceError):
    """The Picard iteration stopped contracting."""


class DivergenceError(ConvergenceError):
    """Picard iterates left the uniform-bound envelope."""


class LambdaGateError(ShearflowException):
    """Boundary data are too large for the requested viscosity."""


class InsufficientPointsError(ShearflowException):
    """Too few data points to fit a convergence rate."""
