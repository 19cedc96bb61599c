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

import typing as ty

from shearflow._log import enable_logging
from shearflow import config as sf_config
from shearflow.harness import sweep

__all__ = [
    "solve",
    "enable_logging",
]


def solve(
    eps: float,
    config: ty.Optional[str] = None,
    load_envvars: bool = True,
    **overrides,
) -> sweep.PointResult:
    """Solve the steady problem at one viscosity

    :param float eps:
        The viscosity. It replaces the configured sweep.
    :param string config:
        Path of a YAML or JSON configuration merged onto the defaults.
    :param bool load_envvars:
        Whether or not to apply ``SHEARFLOW_*`` environment variables.
        Defaults to True.
    :param overrides:
        Configuration sections or shortcuts, see
        :func:`~shearflow.config.load_config`.

    :returns: :class:`~shearflow.harness.sweep.PointResult`
    :raises: :class:`~shearflow.exceptions.ConfigError` on an invalid
        configuration, or the solver error that stopped the point
    """
    overrides["eps"] = [eps]
    cfg = sf_config.load_config(config, load_envvars=load_envvars, **overrides)
    return sweep.run_point(cfg, eps)
