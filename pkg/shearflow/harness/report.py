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
report
------

Sweep artifacts: result and audit tables, a gnuplot script with the fitted
rates, a JSON summary and raw field dumps of single solves.
"""

import csv
import json
import os
import typing as ty

import numpy as np

from shearflow import _log
from shearflow import exceptions
from shearflow.lib import background
from shearflow.lib import grid as sf_grid
from shearflow.lib import linsolve

LOG = _log.setup_logging(__name__)

RESULTS_CSV = "results.csv"
ITERATIONS_CSV = "iterations.csv"
AUDITS_CSV = "audits.csv"
RATES_SCRIPT = "rates.gp"
SUMMARY_JSON = "summary.json"
FIELDS_BIN = "fields.bin"
FIELDS_JSON = "fields.json"

RESULTS_HEADER = ("name", "eps", "eta", "L", "grid", "value")
ITERATIONS_HEADER = ("eps", "n", "delta_x", "delta_y", "ratio", "norm_b", "norm_a")
AUDITS_HEADER = ("name", "eps", "eta", "L", "p", "lhs", "rhs", "constant")

INPUT_FIELDS = ("ueps_u", "ueps_v", "g0", "g1", "g2")
OUTPUT_FIELDS = ("u", "v", "rho", "Hc", "P", "phi", "psi")
DTYPE = "<f8"


def _num(value) -> str:
    if value is None or value == "":
        return ""
    return "{0:.16e}".format(value)


def _open(path: str, mode: str = "w"):
    try:
        return open(path, mode, newline="" if "b" not in mode else None)
    except OSError as e:
        raise exceptions.ShearflowException(
            "Unable to open {0}: {1}".format(path, e.strerror), extra_data={"path": path}
        )


def _write_rows(path: str, header, rows) -> None:
    with _open(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def result_rows(results, length: float, grid_label: str):
    for r in results:
        if not r.ok:
            continue
        for name in sorted(r.quantities):
            yield (name, _num(r.eps), _num(r.eta), _num(length), grid_label,
                   _num(r.quantities[name]))


def iteration_rows(results):
    for r in results:
        if r.report is None:
            continue
        for row in r.report.rows:
            yield (_num(r.eps), row.n, _num(row.delta_x), _num(row.delta_y),
                   _num(row.ratio), _num(row.norm_b), _num(row.norm_a))


def audit_rows(audits):
    for audit in audits:
        row = audit.row()
        yield tuple(
            row[k] if k == "name" else _num(row[k]) for k in AUDITS_HEADER
        )


def write_audits(audits, path: str) -> str:
    """Write the audit table to ``path``."""
    _write_rows(path, AUDITS_HEADER, audit_rows(audits))
    return path


def rates_script(fits) -> str:
    """gnuplot script plotting each fitted quantity on log-log axes."""
    lines = [
        "# log-log plots of the measured gaps with their fitted rates",
        "set logscale xy",
        "set xlabel 'eps'",
        "set key left top",
        "set terminal pngcairo size 800,600",
    ]
    for i, fit in enumerate(fits):
        block = "$" + fit.name
        lines.append("{0} << EOD".format(block))
        lines.extend("{0} {1}".format(_num(e), _num(v)) for e, v in zip(fit.eps, fit.values))
        lines.append("EOD")
        lines.append("set output '{0}.png'".format(fit.name))
        lines.append("set title '{0}: slope {1:.3f} +/- {2:.3f}'".format(
            fit.name, fit.slope, fit.half_width))
        lines.append("f{0}(x) = {1!r} * x**{2!r}".format(
            i, float(np.exp(fit.intercept)), fit.slope))
        lines.append(
            "plot {0} using 1:2 with linespoints title '{1}', f{2}(x) title 'fit'".format(
                block, fit.name, i)
        )
    return "\n".join(lines) + "\n"


def summary_document(results, fits, audits, acceptance=None, config_echo=None):
    checks = dict(acceptance or {})
    return {
        "config_echo": config_echo or {},
        "points": [r.summary() for r in results],
        "fits": [f.summary() for f in fits],
        "audits": [a.row() for a in audits],
        "skipped": [{"eps": r.eps, "reason": r.reason}
                    for r in results if r.status == "skipped"],
        "failed": [{"eps": r.eps, "reason": r.reason}
                   for r in results if r.status == "failed"],
        "acceptance": checks,
        "passed": bool(checks) and all(checks.values()),
    }


def emit_report(results, fits, path: str, audits=None, acceptance=None, cfg=None,
                grid: ty.Optional[sf_grid.Grid] = None) -> ty.Dict[str, str]:
    """Write the sweep artifacts into ``path``.

    :param results: :class:`~shearflow.harness.sweep.PointResult` list
    :param fits: :class:`~shearflow.harness.sweep.RateFit` list
    :param path: Output directory, created when missing
    :param audits: Audits to tabulate; those of the successful points when
        omitted
    :param acceptance: Mapping of check name to pass flag
    :param cfg: :class:`~shearflow.config.SweepConfig` echoed in the summary
    :returns: dict of artifact name to written path
    :raises: :class:`~shearflow.exceptions.ShearflowException` with the
        offending path on I/O errors
    """
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise exceptions.ShearflowException(
            "Unable to create output directory {0}: {1}".format(path, e.strerror),
            extra_data={"path": path},
        )
    if audits is None:
        audits = [a for r in results if r.ok for a in r.audits]
    if grid is None and cfg is not None:
        grid = cfg.grid()
    length = grid.length if grid is not None else float("nan")
    label = "{0}x{1}".format(grid.nx + 1, grid.ny + 1) if grid is not None else ""

    written = {name: os.path.join(path, name) for name in (
        RESULTS_CSV, ITERATIONS_CSV, AUDITS_CSV, RATES_SCRIPT, SUMMARY_JSON)}
    _write_rows(written[RESULTS_CSV], RESULTS_HEADER, result_rows(results, length, label))
    _write_rows(written[ITERATIONS_CSV], ITERATIONS_HEADER, iteration_rows(results))
    write_audits(audits, written[AUDITS_CSV])
    with _open(written[RATES_SCRIPT]) as f:
        f.write(rates_script(fits))
    doc = summary_document(results, fits, audits, acceptance,
                           cfg.document if cfg is not None else None)
    with _open(written[SUMMARY_JSON]) as f:
        json.dump(doc, f, sort_keys=True, indent=2)
        f.write("\n")
    LOG.info("report written to %s", path)
    return written


def dump_fields(inp: linsolve.LinearInput, out: linsolve.LinearOutput,
                path: str) -> ty.Dict[str, str]:
    """Store one linear solve as flat little-endian doubles plus a JSON
    header describing the grid, the parameters and the field order.
    """
    grid = inp.grid
    arrays = [inp.ueps.u, inp.ueps.v, inp.g0, inp.g.u, inp.g.v]
    arrays += [getattr(out, name) for name in OUTPUT_FIELDS]
    header = {
        "grid": {"nx": grid.nx, "ny": grid.ny, "L": grid.length},
        "params": inp.params.snapshot(),
        "t": inp.t,
        "alpha_mollify": inp.alpha_mollify,
        "names": list(INPUT_FIELDS + OUTPUT_FIELDS) + ["rho0y"],
        "dtype": DTYPE,
    }
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise exceptions.ShearflowException(
            "Unable to create dump directory {0}: {1}".format(path, e.strerror),
            extra_data={"path": path},
        )
    files = {"data": os.path.join(path, FIELDS_BIN), "header": os.path.join(path, FIELDS_JSON)}
    with _open(files["data"], "wb") as f:
        for field in arrays:
            np.ascontiguousarray(field.values, dtype=DTYPE).tofile(f)
        np.ascontiguousarray(out.rho0y.values, dtype=DTYPE).tofile(f)
    with _open(files["header"]) as f:
        json.dump(header, f, sort_keys=True, indent=2)
        f.write("\n")
    LOG.debug("fields of eps=%g dumped to %s", inp.params.eps, path)
    return files


def load_fields(path: str) -> ty.Tuple[linsolve.LinearInput, linsolve.LinearOutput]:
    """Restore a solve written by :func:`dump_fields`.

    Residual and boundary reports are not stored and come back empty.

    :raises: :class:`~shearflow.exceptions.ShearflowException` on missing
        or inconsistent files
    """
    header_path = os.path.join(path, FIELDS_JSON)
    data_path = os.path.join(path, FIELDS_BIN)
    with _open(header_path, "r") as f:
        try:
            header = json.load(f)
        except ValueError as e:
            raise exceptions.ShearflowException(
                "Malformed field header {0}: {1}".format(header_path, e)
            )
    g = header["grid"]
    grid = sf_grid.Grid(g["nx"], g["ny"], g["L"])
    try:
        data = np.fromfile(data_path, dtype=header.get("dtype", DTYPE))
    except OSError as e:
        raise exceptions.ShearflowException(
            "Unable to read {0}: {1}".format(data_path, e.strerror),
            extra_data={"path": data_path},
        )
    size = grid.shape[0] * grid.shape[1]
    count = len(INPUT_FIELDS) + len(OUTPUT_FIELDS)
    if data.size != count * size + grid.shape[1]:
        raise exceptions.ShearflowException(
            "Field dump {0} holds {1} values, expected {2}".format(
                data_path, data.size, count * size + grid.shape[1]),
            extra_data={"path": data_path},
        )
    fields = {
        name: sf_grid.ScalarField(grid, data[k * size:(k + 1) * size].reshape(grid.shape))
        for k, name in enumerate(INPUT_FIELDS + OUTPUT_FIELDS)
    }
    params = background.FlowParams(**header["params"])
    inp = linsolve.LinearInput(
        sf_grid.VectorField(fields["ueps_u"], fields["ueps_v"]),
        fields["g0"],
        sf_grid.VectorField(fields["g1"], fields["g2"]),
        params,
        t=header["t"],
        alpha_mollify=header["alpha_mollify"],
    )
    rho0y = sf_grid.Trace(sf_grid.Side.X0, grid.y, data[count * size:])
    out = linsolve.LinearOutput(
        *(fields[name] for name in OUTPUT_FIELDS), rho0y=rho0y,
        residual_report={}, bc_report={},
    )
    return inp, out
