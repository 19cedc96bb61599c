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
Viscosity sweeps and rate fits.

Each point of a sweep gates the configured boundary data, first scaled to
``lambda_scale * eps^(1/2+sigma)`` when ``scale_data`` is set. It then
builds the lift, runs the Picard chain and measures the distance of the
reconstructed flow from the shear flow. Points run on a bounded thread
pool; results are merged in the configured viscosity order.
"""

import concurrent.futures
import dataclasses
import math
import typing as ty

import numpy as np
from scipy import stats

from shearflow import _log
from shearflow import config as sf_config
from shearflow import exceptions
from shearflow.lib import background
from shearflow.lib import estimates
from shearflow.lib import grid as sf_grid
from shearflow.lib import homogenize
from shearflow.lib import picard

LOG = _log.setup_logging(__name__)

OK = "ok"
FAILED = "failed"
SKIPPED = "skipped"

MIN_FIT_POINTS = 4
CONTRACTION_EPS = 1e-2

U_GAP = "u_gap"
GRAD_U_GAP = "grad_u_gap"
GRAD_U_GAP_WEIGHTED = "grad_u_gap_weighted"
V_GAP = "v_gap"
GRAD_V_GAP = "grad_v_gap"
GRAD_V_GAP_WEIGHTED = "grad_v_gap_weighted"
RHO_GAP = "rho_gap"

QUANTITIES = (
    U_GAP, GRAD_U_GAP, GRAD_U_GAP_WEIGHTED,
    V_GAP, GRAD_V_GAP, GRAD_V_GAP_WEIGHTED,
    RHO_GAP,
)


@dataclasses.dataclass
class PointResult:
    eps: float
    eta: float
    status: str
    reason: str = ""
    quantities: ty.Dict[str, float] = dataclasses.field(default_factory=dict)
    report: ty.Optional[picard.IterationReport] = None
    audits: ty.List[estimates.EstimateAudit] = dataclasses.field(default_factory=list)
    lambda_value: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == OK

    def summary(self) -> ty.Dict[str, ty.Any]:
        """JSON-ready description without fields."""
        data = {
            "eps": self.eps,
            "eta": self.eta,
            "status": self.status,
            "reason": self.reason,
            "lambda": self.lambda_value,
            "quantities": dict(self.quantities),
        }
        if self.report is not None:
            data.update(
                iterations=self.report.iterations,
                converged=self.report.converged,
                max_ratio=self.report.max_ratio,
                max_envelope_ratio=self.report.max_envelope_ratio,
                residual=dict(self.report.residual),
            )
        return data


@dataclasses.dataclass(frozen=True)
class RateFit:
    """Least-squares slope of ``log value`` against ``log eps``."""

    name: str
    eps: ty.Tuple[float, ...]
    values: ty.Tuple[float, ...]
    slope: float
    intercept: float
    half_width: float
    max_residual: float
    target: ty.Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.target is None or self.slope >= self.target

    def predict(self, eps):
        return math.exp(self.intercept) * np.asarray(eps) ** self.slope

    def summary(self) -> ty.Dict[str, ty.Any]:
        return {
            "name": self.name,
            "slope": self.slope,
            "ci": self.half_width,
            "target": self.target,
            "points": len(self.eps),
            "max_residual": self.max_residual,
            "pass": self.passed,
        }


def _injected(cfg: sf_config.SweepConfig, eps: float) -> bool:
    return any(math.isclose(eps, e, rel_tol=1e-12) for e in cfg.fail_at)


def gap_quantities(ueps, rhoeps, params, lift=None) -> ty.Dict[str, float]:
    """Distances of a reconstructed flow from the shear flow.

    :param ueps: Reconstructed velocity :class:`~shearflow.lib.grid.VectorField`
    :param rhoeps: Reconstructed density
    :param params: :class:`~shearflow.lib.background.FlowParams`
    :param lift: When given, its velocity is subtracted as well so the
        gaps measure the remainder alone
    :returns: dict keyed by :data:`QUANTITIES`
    """
    du = ueps.u - background.shear_field(params, ueps.grid)
    dv = ueps.v
    if lift is not None:
        du = du - lift.ubar
        dv = dv - lift.vbar

    def gradient_max(f):
        return max(sf_grid.apply_dx(f).max_abs(), sf_grid.apply_dy(f).max_abs())

    grad_u, grad_v = gradient_max(du), gradient_max(dv)
    weight = params.scale
    return {
        U_GAP: du.max_abs(),
        GRAD_U_GAP: grad_u,
        GRAD_U_GAP_WEIGHTED: weight * grad_u,
        V_GAP: dv.max_abs(),
        GRAD_V_GAP: grad_v,
        GRAD_V_GAP_WEIGHTED: weight * grad_v,
        RHO_GAP: (rhoeps - 1.0).max_abs(),
    }


def run_point(cfg: sf_config.SweepConfig, eps: float,
              grid: ty.Optional[sf_grid.Grid] = None) -> PointResult:
    """Solve at one viscosity.

    The configured data are rescaled only with ``scale_data``. A data size
    above ``eps^(1/2+sigma)`` marks the point skipped; every other failure
    propagates.

    :param cfg: :class:`~shearflow.config.SweepConfig`
    :param eps: Viscosity of the point
    :param grid: Overrides ``cfg.grid()``
    :returns: :class:`PointResult`
    """
    params = cfg.params(eps)
    if _injected(cfg, eps):
        raise exceptions.ShearflowException(
            "Injected failure at eps={0}".format(eps), extra_data={"fail_at": cfg.fail_at}
        )
    grid = grid or cfg.grid()
    bd = cfg.boundary_shapes(grid, params)
    if cfg.scale_data:
        LOG.debug("eps=%g: configured data of size %.3e scaled by %g", eps,
                  background.lambda_norm(bd, params), cfg.lambda_scale)
        bd = background.scale_to_lambda(bd, params, cfg.lambda_scale)
    try:
        size = background.lambda_gate(bd, params)
    except exceptions.LambdaGateError as e:
        LOG.info("eps=%g skipped: %s", eps, e)
        return PointResult(eps, params.eta, SKIPPED, reason=str(e),
                           lambda_value=background.lambda_norm(bd, params))

    tol = cfg.tolerances
    lift = homogenize.build_lift(
        bd,
        lift_tol=tol.get("lift", homogenize.DEFAULT_LIFT_TOL),
        compat_tol=tol.get("compatibility", 1e-6),
    )
    rho_bar = background.background_density(params, bd)
    state, report = picard.picard_iterate(
        bd, params,
        tol=cfg.picard_tol,
        max_iter=cfg.max_iter,
        lift=lift,
        p=cfg.p,
        check_lambda=False,
        alpha_mollify=cfg.alpha_mollify,
        solver_options=cfg.solver_options(),
    )
    ueps, rhoeps = picard.reconstruct(state, lift, params, rho_bar)
    quantities = gap_quantities(ueps, rhoeps, params, lift if cfg.subtract_lift else None)
    audits = estimates.audit_all(report.last_output, report.last_input, cfg.p)
    LOG.info(
        "eps=%g eta=%.3e: %d iterations, max ratio %.3f, rho gap %.3e",
        eps, params.eta, report.iterations, report.max_ratio, quantities[RHO_GAP],
    )
    return PointResult(eps, params.eta, OK, quantities=quantities, report=report,
                       audits=audits, lambda_value=size)


def _isolated(cfg, eps, grid):
    try:
        return run_point(cfg, eps, grid)
    except Exception as e:
        LOG.warning("eps=%g failed: %s: %s", eps, type(e).__name__, e)
        return PointResult(eps, cfg.params(eps).eta, FAILED,
                           reason="{0}: {1}".format(type(e).__name__, e))


def run_sweep(cfg: sf_config.SweepConfig) -> ty.List[PointResult]:
    """Run every configured viscosity.

    Failures at one point are logged and recorded on its
    :class:`PointResult`; the remaining points still run.

    :param cfg: :class:`~shearflow.config.SweepConfig`
    :returns: list of :class:`PointResult` in configured order
    :raises: :class:`~shearflow.exceptions.ConfigError` for an empty sweep
    """
    if not cfg.eps:
        raise exceptions.ConfigError("Sweep has no viscosities")
    grid = cfg.grid()
    LOG.info("sweep of %d points on %dx%d cells, %d workers",
             len(cfg.eps), grid.nx, grid.ny, cfg.workers)
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        futures = [executor.submit(_isolated, cfg, eps, grid) for eps in cfg.eps]
        return [f.result() for f in futures]


def fit_rate(name: str, eps, values, target: ty.Optional[float] = None) -> RateFit:
    """Fit ``log value = slope * log eps + intercept``.

    Non-positive values are dropped.

    :raises: :class:`~shearflow.exceptions.InsufficientPointsError` with
        fewer than four usable points
    """
    pairs = [(float(e), float(v)) for e, v in zip(eps, values) if v > 0.0]
    if len(pairs) < MIN_FIT_POINTS:
        raise exceptions.InsufficientPointsError(
            "Rate fit of {0} needs {1} positive points, got {2}".format(
                name, MIN_FIT_POINTS, len(pairs)
            )
        )
    e, v = (np.array(c) for c in zip(*pairs))
    x, y = np.log(e), np.log(v)
    coeffs, cov = np.polyfit(x, y, 1, cov=True)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    half_width = float(stats.t.ppf(0.975, len(x) - 2) * math.sqrt(max(cov[0, 0], 0.0)))
    residual = float(np.max(np.abs(y - np.polyval(coeffs, x))))
    if not math.isfinite(slope):
        raise exceptions.InsufficientPointsError(
            "Rate fit of {0} is degenerate".format(name)
        )
    return RateFit(name, tuple(e), tuple(v), slope, intercept, half_width, residual, target)


def slope_targets(acceptance: ty.Mapping[str, float]) -> ty.Dict[str, ty.Optional[float]]:
    """Expected minimum slope per quantity; unweighted gradients are reported
    without a target.
    """
    gap = acceptance.get("gap_slope")
    return {
        U_GAP: gap,
        GRAD_U_GAP: None,
        GRAD_U_GAP_WEIGHTED: gap,
        V_GAP: gap,
        GRAD_V_GAP: None,
        GRAD_V_GAP_WEIGHTED: gap,
        RHO_GAP: acceptance.get("rho_slope"),
    }


def fit_rates(results: ty.Sequence[PointResult],
              acceptance: ty.Optional[ty.Mapping[str, float]] = None,
              strict: bool = False) -> ty.List[RateFit]:
    """Rate fits of every gap quantity over the successful points.

    :param results: Output of :func:`run_sweep`
    :param acceptance: Slope thresholds, see :func:`slope_targets`
    :param strict: Raise instead of skipping quantities with too few points
    :returns: list of :class:`RateFit`
    :raises: :class:`~shearflow.exceptions.InsufficientPointsError` when
        ``strict``
    """
    targets = slope_targets(acceptance or sf_config.DEFAULTS["acceptance"])
    done = [r for r in results if r.ok]
    fits = []
    for name in QUANTITIES:
        eps = [r.eps for r in done]
        values = [r.quantities[name] for r in done]
        try:
            fit = fit_rate(name, eps, values, targets[name])
        except exceptions.InsufficientPointsError as e:
            if strict:
                raise
            LOG.warning("%s", e)
            continue
        LOG.info("rate %s: slope %.3f +/- %.3f (target %s)", name, fit.slope,
                 fit.half_width, "-" if fit.target is None else fit.target)
        fits.append(fit)
    return fits


def collect_audits(results: ty.Sequence[PointResult]) -> ty.List[estimates.EstimateAudit]:
    return [a for r in results if r.ok for a in r.audits]


def evaluate_acceptance(results: ty.Sequence[PointResult], fits: ty.Sequence[RateFit],
                        acceptance: ty.Mapping[str, float]) -> ty.Dict[str, bool]:
    """Pass flags of the sweep-level checks.

    ``contraction`` applies to points with ``eps <= 1e-2``; ``envelope``
    compares ``||u^n||_B + ||rho^n||_A`` against ``eps^(sigma/2)``.
    """
    done = [r for r in results if r.ok]
    small = [r for r in done if r.eps <= CONTRACTION_EPS]
    spread = estimates.constant_spread(collect_audits(results))
    checks = {
        "points": all(r.status != FAILED for r in results),
        "contraction": all(
            r.report.max_ratio <= acceptance["contraction"] for r in small
        ),
        "envelope": all(r.report.max_envelope_ratio <= 1.0 for r in done),
        "constant_spread": all(
            v <= acceptance["constant_spread"] for v in spread.values()
        ),
        "slopes": all(f.passed for f in fits),
    }
    for name, passed in sorted(checks.items()):
        if not passed:
            LOG.warning("acceptance check %s failed", name)
    return checks
