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
``shearflow`` command line.

Verbs:

``solve``
    One viscosity; writes the single-point report.
``sweep``
    The configured viscosity sweep with rate fits and acceptance checks.
``audit``
    Estimate audits of a solve dumped with ``--dump-fields``.
``selftest``
    Manufactured-solution suites.

Exit codes: 0 when every check passes, 2 when the run completed with
failures, 3 on configuration errors.
"""

import argparse
import json
import os
import sys
import typing as ty

from shearflow import _log
from shearflow import config as sf_config
from shearflow import exceptions
from shearflow.harness import report
from shearflow.harness import sweep
from shearflow.lib import estimates
from shearflow.lib import verification

LOG = _log.setup_logging(__name__)

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_CONFIG = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML or JSON configuration")
    common.add_argument("--out", metavar="DIR", help="Output directory")
    common.add_argument("--grid", metavar="N", type=int, help="Cells per direction")
    common.add_argument("--workers", metavar="K", type=int, help="Sweep worker pool size")
    common.add_argument("--dump-fields", action="store_true", default=None,
                        help="Store the last linear solve of every point")
    common.add_argument("--debug", action="store_true", help="Verbose logging to stderr")

    parser = argparse.ArgumentParser(
        prog="shearflow",
        description="Steady compressible flow near a shear profile: solver and "
                    "zero-viscosity verification harness",
    )
    verbs = parser.add_subparsers(dest="verb", metavar="VERB")
    verbs.required = True

    p = verbs.add_parser("solve", parents=[common], help="Solve at one viscosity")
    p.add_argument("--eps", metavar="X", type=float,
                   help="Viscosity; first configured value when omitted")
    p.set_defaults(func=do_solve)

    p = verbs.add_parser("sweep", parents=[common], help="Run the viscosity sweep")
    p.add_argument("--eps", metavar="X", type=float, nargs="+",
                   help="Viscosities, strictly decreasing")
    p.set_defaults(func=do_sweep)

    p = verbs.add_parser("audit", parents=[common], help="Audit a dumped solve")
    p.add_argument("fields", metavar="DUMP", help="Directory written by --dump-fields")
    p.add_argument("--p", type=float, default=None, help="Exponent of the W^{2,p} terms")
    p.set_defaults(func=do_audit)

    p = verbs.add_parser("selftest", parents=[common], help="Manufactured-solution suites")
    p.add_argument("--sizes", metavar="N", type=int, nargs="+",
                   default=list(verification.DEFAULT_SIZES),
                   help="Grid sizes, each doubling the previous")
    p.set_defaults(func=do_selftest)
    return parser


def load(args) -> sf_config.SweepConfig:
    eps = getattr(args, "eps", None)
    if isinstance(eps, float):
        eps = [eps]
    return sf_config.load_config(
        args.config,
        grid_n=args.grid,
        eps=eps,
        workers=args.workers,
        out_dir=args.out,
        dump_fields=args.dump_fields,
    )


def _dump_dir(cfg, result) -> str:
    return os.path.join(cfg.out_dir, "fields", "eps_{0:g}".format(result.eps))


def _dump(cfg, results) -> None:
    if not cfg.dump_fields:
        return
    for r in results:
        if r.ok:
            report.dump_fields(r.report.last_input, r.report.last_output, _dump_dir(cfg, r))


def do_solve(args) -> int:
    cfg = load(args)
    result = sweep.run_point(cfg, cfg.eps[0])
    report.emit_report([result], [], cfg.out_dir, cfg=cfg)
    _dump(cfg, [result])
    print(json.dumps(result.summary(), sort_keys=True, indent=2))
    return EXIT_OK if result.ok else EXIT_FAILED


def do_sweep(args) -> int:
    cfg = load(args)
    results = sweep.run_sweep(cfg)
    fits = sweep.fit_rates(results, cfg.acceptance)
    checks = sweep.evaluate_acceptance(results, fits, cfg.acceptance)
    report.emit_report(results, fits, cfg.out_dir, acceptance=checks, cfg=cfg)
    _dump(cfg, results)
    for fit in fits:
        print("{0:<22} slope {1:7.3f} +/- {2:.3f}  {3}".format(
            fit.name, fit.slope, fit.half_width, "pass" if fit.passed else "FAIL"))
    for name in sorted(checks):
        print("{0:<22} {1}".format(name, "pass" if checks[name] else "FAIL"))
    return EXIT_OK if all(checks.values()) else EXIT_FAILED


def do_audit(args) -> int:
    cfg = load(args)
    inp, out = report.load_fields(args.fields)
    p = cfg.p if args.p is None else args.p
    audits = estimates.audit_all(out, inp, p)
    os.makedirs(cfg.out_dir, exist_ok=True)
    report.write_audits(audits, os.path.join(cfg.out_dir, report.AUDITS_CSV))
    for audit in audits:
        print("{0:<16} p={1:<4} C={2:.3e}".format(
            audit.name, "-" if audit.p is None else "{0:g}".format(audit.p),
            audit.implied_constant))
    return EXIT_FAILED if any(a.flagged for a in audits) else EXIT_OK


def do_selftest(args) -> int:
    results = verification.run_suites(tuple(args.sizes))
    for r in results:
        print("{0:<20} ratios {1}  {2}".format(
            r.name, " ".join("{0:.2f}".format(x) for x in r.ratios),
            "pass" if r.passed else "FAIL"))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def main(argv: ty.Optional[ty.List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        _log.enable_logging(debug=True, stream=sys.stderr)
    try:
        return args.func(args)
    except exceptions.ConfigError as e:
        print("shearflow: {0}".format(e), file=sys.stderr)
        return EXIT_CONFIG
    except exceptions.ShearflowException as e:
        LOG.error("%s failed: %s", args.verb, e)
        print("shearflow: {0}".format(e), file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
