"""Benchmark harness: run the {dataset x classifier x function} grid and
render the result tables."""

import io
import csv as csv_mod
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from time import perf_counter

from .data import DataError, load_dataset, split
from .functions import ACTIVATIONS, KERNELS, Kernel
from .metrics import confusion_matrix, weighted_report
from .mlp import MlpClassifier, MlpConfig
from .svm import ConvergenceError, SvmClassifier, SvmConfig

CLASSIFIER_FUNCTIONS = {"svm": KERNELS, "mlp": ACTIVATIONS}

CSV_HEADER = (
    "dataset,classifier,function,train_time_s,accuracy,"
    "weighted_precision,weighted_recall,weighted_f1,converged"
)

_DISPLAY = {
    "m_arcsinh": "m-arcsinh",
    "rbf": "RBF",
    "relu": "ReLU",
    "svm": "SVM",
    "mlp": "MLP",
    "tanh": "tanh",
}


def resolve_functions(classifiers, functions):
    """Map each classifier to the functions it should run, in canonical order.

    functions=None selects every function of each classifier.  A requested
    function that fits none of the requested classifiers is an error.
    """
    for c in classifiers:
        if c not in CLASSIFIER_FUNCTIONS:
            raise ValueError(f"unknown classifier {c!r}; expected svm and/or mlp")
    if functions is None:
        return {c: list(CLASSIFIER_FUNCTIONS[c]) for c in classifiers}
    bad = [
        f for f in functions if all(f not in CLASSIFIER_FUNCTIONS[c] for c in classifiers)
    ]
    if bad:
        raise ValueError(
            f"function(s) {bad} are not valid for classifier(s) {list(classifiers)}"
        )
    return {c: [f for f in CLASSIFIER_FUNCTIONS[c] if f in functions] for c in classifiers}


@dataclass(frozen=True)
class RunSpec:
    """One benchmark request: which grid to run and how to report it."""

    datasets: tuple
    classifiers: tuple = ("svm", "mlp")
    functions: tuple = None  # None -> all functions per classifier
    output_format: str = "csv"
    output_path: str = None
    svm_seed: int = 13
    mlp_seed: int = 1
    derivative_mode: str = "paper"

    def __post_init__(self):
        resolve_functions(self.classifiers, self.functions)
        if self.output_format not in ("csv", "md", "markdown"):
            raise ValueError("output_format must be 'csv' or 'md'")
        if self.derivative_mode not in ("paper", "exact"):
            raise ValueError("derivative_mode must be 'paper' or 'exact'")


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    classifier: str
    function: str
    train_time_s: float
    report: object  # EvalReport, or None when the cell failed
    converged: bool
    error: str = None


def _run_cell(train, test, classifier, function, spec):
    start = perf_counter()
    try:
        if classifier == "svm":
            config = SvmConfig(kernel=Kernel(function), seed=spec.svm_seed)
            model = SvmClassifier(config).fit(train.X, train.y)
        else:
            config = MlpConfig(
                activation=function,
                seed=spec.mlp_seed,
                derivative_mode=spec.derivative_mode,
            )
            model = MlpClassifier(config).fit(train.X, train.y)
        elapsed = perf_counter() - start
    except ConvergenceError as exc:
        return ResultRow(
            train.name, classifier, function, perf_counter() - start, None, False, str(exc)
        )
    except Exception as exc:  # isolate the cell, keep the rest of the grid alive
        return ResultRow(
            train.name,
            classifier,
            function,
            perf_counter() - start,
            None,
            False,
            f"{type(exc).__name__}: {exc}",
        )
    pred = model.predict(test.X)
    cm = confusion_matrix(test.y, pred, test.n_classes)
    report = weighted_report(cm, train_time_s=elapsed, converged=True)
    return ResultRow(train.name, classifier, function, elapsed, report, True, None)


def load_partitions(entry, data_dir):
    """Train/test datasets for one manifest entry (splitting if needed)."""
    loaded = load_dataset(entry, data_dir)
    if isinstance(loaded, tuple):
        return loaded
    return split(loaded, entry.test_fraction)


def run_suite(spec, entries, data_dir, warn=None):
    """Run every cell of the grid; one ResultRow per (dataset, classifier,
    function) in the declared order.

    Unknown dataset names raise ValueError before anything runs.  A dataset
    whose files are missing or unreadable is skipped with a warning; a cell
    that fails to train produces a row with converged=False and no metrics
    but never suppresses other cells.
    """
    warn = warn or (lambda msg: None)
    by_name = {e.name: e for e in entries}
    unknown = [d for d in spec.datasets if d not in by_name]
    if unknown:
        raise ValueError(f"unknown dataset(s) {unknown}; not in the manifest")
    functions = resolve_functions(spec.classifiers, spec.functions)

    rows = []
    for name in spec.datasets:
        try:
            train, test = load_partitions(by_name[name], data_dir)
        except DataError as exc:
            warn(f"skipping {name}: {exc}")
            continue
        for classifier in spec.classifiers:
            for function in functions[classifier]:
                rows.append(_run_cell(train, test, classifier, function, spec))
    return rows


def _round_half_away(x, places):
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def _display(name):
    return _DISPLAY.get(name, name.capitalize())


def render_table(rows, output_format):
    """Render result rows as machine CSV or paper-style markdown tables.

    CSV keeps full float precision; markdown rounds metrics to two decimals
    (half away from zero) and renders failed cells as N/A.
    """
    if not rows:
        raise ValueError("no result rows to render")
    if output_format == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            if r.report is not None:
                metrics = [
                    repr(r.report.accuracy),
                    repr(r.report.weighted_precision),
                    repr(r.report.weighted_recall),
                    repr(r.report.weighted_f1),
                ]
            else:
                metrics = ["", "", "", ""]
            lines.append(
                ",".join(
                    [
                        r.dataset,
                        r.classifier,
                        r.function,
                        repr(float(r.train_time_s)),
                        *metrics,
                        "true" if r.converged else "false",
                    ]
                )
            )
        return "\n".join(lines) + "\n"
    if output_format in ("md", "markdown"):
        lines = []
        for name in dict.fromkeys(r.dataset for r in rows):
            lines.append(f"### {name}")
            lines.append("")
            lines.append(
                "| Classifier | Function | Training time (s) | Accuracy | "
                "Weighted precision | Weighted recall | Weighted F1 |"
            )
            lines.append("|---|---|---|---|---|---|---|")
            for r in rows:
                if r.dataset != name:
                    continue
                if r.report is not None:
                    cells = [
                        _round_half_away(r.train_time_s, 3),
                        _round_half_away(r.report.accuracy, 2),
                        _round_half_away(r.report.weighted_precision, 2),
                        _round_half_away(r.report.weighted_recall, 2),
                        _round_half_away(r.report.weighted_f1, 2),
                    ]
                else:
                    cells = ["Did not converge", "N/A", "N/A", "N/A", "N/A"]
                lines.append(
                    "| " + " | ".join([_display(r.classifier), _display(r.function), *cells]) + " |"
                )
            lines.append("")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown output format {output_format!r}")


def parse_csv(text):
    """Parse render_table csv output back into a list of plain dicts."""
    reader = csv_mod.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append(
            {
                "dataset": rec["dataset"],
                "classifier": rec["classifier"],
                "function": rec["function"],
                "train_time_s": float(rec["train_time_s"]),
                "accuracy": float(rec["accuracy"]) if rec["accuracy"] else None,
                "weighted_precision": (
                    float(rec["weighted_precision"]) if rec["weighted_precision"] else None
                ),
                "weighted_recall": (
                    float(rec["weighted_recall"]) if rec["weighted_recall"] else None
                ),
                "weighted_f1": float(rec["weighted_f1"]) if rec["weighted_f1"] else None,
                "converged": rec["converged"] == "true",
            }
        )
    return rows
