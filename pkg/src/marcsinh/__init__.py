"""m-arcsinh as an SVM kernel and MLP activation, with the from-scratch
classifiers and benchmark harness used to evaluate it."""

from .bench import (
    CSV_HEADER,
    ResultRow,
    RunSpec,
    load_partitions,
    parse_csv,
    render_table,
    run_suite,
)
from .data import (
    BUNDLED_NAMES,
    DataError,
    Dataset,
    ManifestEntry,
    default_manifest_path,
    fetch,
    load_dataset,
    load_manifest,
    seed_bundled,
    split,
)
from .functions import (
    ACTIVATIONS,
    KERNELS,
    Kernel,
    apply_activation,
    apply_activation_derivative,
    gram_matrix,
    m_arcsinh,
    m_arcsinh_derivative,
)
from .metrics import ClassStats, EvalReport, confusion_matrix, weighted_report
from .mlp import MlpClassifier, MlpConfig, TrainingDivergedError, gradient_check
from .svm import (
    ConvergenceError,
    PairModel,
    SvmClassifier,
    SvmConfig,
    balanced_class_weights,
    smo_solve,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIVATIONS",
    "BUNDLED_NAMES",
    "CSV_HEADER",
    "ClassStats",
    "ConvergenceError",
    "DataError",
    "Dataset",
    "EvalReport",
    "Kernel",
    "KERNELS",
    "ManifestEntry",
    "MlpClassifier",
    "MlpConfig",
    "PairModel",
    "ResultRow",
    "RunSpec",
    "SvmClassifier",
    "SvmConfig",
    "TrainingDivergedError",
    "apply_activation",
    "apply_activation_derivative",
    "balanced_class_weights",
    "confusion_matrix",
    "default_manifest_path",
    "fetch",
    "gradient_check",
    "gram_matrix",
    "load_dataset",
    "load_manifest",
    "load_partitions",
    "m_arcsinh",
    "m_arcsinh_derivative",
    "parse_csv",
    "render_table",
    "run_suite",
    "seed_bundled",
    "smo_solve",
    "split",
    "weighted_report",
]
