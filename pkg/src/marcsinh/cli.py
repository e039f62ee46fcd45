"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 one or more grid
cells (or gradient checks) failed.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .bench import RunSpec, render_table, run_suite
from .data import (
    BUNDLED_NAMES,
    DataError,
    default_manifest_path,
    fetch,
    load_manifest,
    seed_bundled,
)
from .functions import m_arcsinh, m_arcsinh_derivative
from .mlp import gradient_check

USAGE_ERROR, DATA_ERROR, CELLS_FAILED = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _build_parser():
    parser = _Parser(
        prog="marcsinh",
        description="m-arcsinh SVM/MLP benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fetch = sub.add_parser("fetch", help="download the manifest datasets")
    p_fetch.add_argument("--manifest", default=None, help="manifest JSON (default: built-in)")
    p_fetch.add_argument("--dest", default="data", help="download directory")

    p_seed = sub.add_parser(
        "seed-bundled",
        help="write the scikit-learn-bundled datasets (wdbc/iris/wine/digits) "
        "without network access",
    )
    p_seed.add_argument("--dest", default="data", help="output directory")
    p_seed.add_argument(
        "--datasets",
        default=",".join(BUNDLED_NAMES),
        help="comma-separated subset of " + ",".join(BUNDLED_NAMES),
    )

    p_run = sub.add_parser("run", help="run the benchmark grid")
    p_run.add_argument("--manifest", default=None, help="manifest JSON (default: built-in)")
    p_run.add_argument("--data", default="data", help="directory with fetched datasets")
    p_run.add_argument("--datasets", default=None, help="comma-separated names (default: all)")
    p_run.add_argument("--classifiers", default="svm,mlp", help="comma-separated: svm,mlp")
    p_run.add_argument(
        "--functions",
        default=None,
        help="comma-separated kernel/activation names (default: all per classifier)",
    )
    p_run.add_argument("--format", choices=("csv", "md"), default="csv")
    p_run.add_argument("--out", default=None, help="output file (default: stdout)")
    p_run.add_argument("--derivative-mode", choices=("paper", "exact"), default="paper")

    sub.add_parser("gradcheck", help="verify derivatives against finite differences")
    return parser


def _manifest_entries(path):
    return load_manifest(path if path else default_manifest_path())


def _cmd_fetch(args):
    entries = _manifest_entries(args.manifest)
    results = fetch(entries, args.dest)
    failed = False
    for r in results:
        if r.error:
            failed = True
            print(f"{r.name}: FAILED ({r.error})", file=sys.stderr)
        else:
            print(f"{r.name}: {len(r.downloaded)} downloaded, {len(r.skipped)} up to date")
    return DATA_ERROR if failed else 0


def _cmd_seed_bundled(args):
    names = tuple(n for n in args.datasets.split(",") if n)
    written = seed_bundled(args.dest, names)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_run(args):
    entries = _manifest_entries(args.manifest)
    dataset_names = (
        tuple(n for n in args.datasets.split(",") if n)
        if args.datasets
        else tuple(e.name for e in entries)
    )
    classifiers = tuple(c for c in args.classifiers.split(",") if c)
    functions = (
        tuple(f for f in args.functions.split(",") if f) if args.functions else None
    )
    try:
        spec = RunSpec(
            datasets=dataset_names,
            classifiers=classifiers,
            functions=functions,
            output_format=args.format,
            output_path=args.out,
            derivative_mode=args.derivative_mode,
        )
        rows = run_suite(
            spec,
            entries,
            args.data,
            warn=lambda msg: print(f"warning: {msg}", file=sys.stderr),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    if not rows:
        print("error: no datasets could be loaded", file=sys.stderr)
        return DATA_ERROR
    text = render_table(rows, args.format)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    for row in rows:
        if row.error:
            print(f"cell failed: {row.dataset}/{row.classifier}/{row.function}: {row.error}",
                  file=sys.stderr)
    return CELLS_FAILED if any(r.error for r in rows) else 0


def _cmd_gradcheck(_args):
    failed = False

    def check(label, value, bound):
        nonlocal failed
        ok = value <= bound
        failed = failed or not ok
        print(f"{'PASS' if ok else 'FAIL'} {label}: {value:.3e} (allowed {bound:g})")

    # closed-form derivative vs central differences across both sign ranges
    xs = np.concatenate([-np.geomspace(0.01, 50, 300), np.geomspace(0.01, 50, 300)])
    h = 1e-6
    fd = (m_arcsinh(xs + h) - m_arcsinh(xs - h)) / (2 * h)
    check("m_arcsinh derivative vs finite differences", float(np.abs(m_arcsinh_derivative(xs) - fd).max()), 1e-6)

    zero = m_arcsinh_derivative(0.0)
    ok = zero == 0.0 and np.isfinite(zero)
    failed = failed or not ok
    print(f"{'PASS' if ok else 'FAIL'} m_arcsinh derivative at 0 is exactly 0 and finite")

    for activation in ("identity", "logistic", "tanh", "m_arcsinh"):
        check(
            f"mlp weight gradients ({activation}, exact mode)",
            gradient_check(activation=activation, derivative_mode="exact"),
            1e-4,
        )
    return CELLS_FAILED if failed else 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "fetch":
            return _cmd_fetch(args)
        if args.command == "seed-bundled":
            return _cmd_seed_bundled(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_gradcheck(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
