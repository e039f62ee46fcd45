"""Manifest-driven dataset download, parsing, and deterministic splits.

The manifest is a JSON file with one object per dataset under "datasets":

    {
      "datasets": [
        {
          "name": "haberman",                # identifier, also the file stem
          "urls": ["https://..."],           # 1 url, or 2 for predefined
                                             # train+test partitions (train first)
          "file_format": "comma",            # comma | tab | whitespace
          "has_header": false,
          "label_position": "last",          # first | last | <column name>
          "drop_columns": [],                # column names or 0-based indices
          "test_fraction": 0.2               # only for single-url entries
        }
      ]
    }

Single-url entries are stored as <name>.data; two-url entries as
<name>.train / <name>.test.  Features are parsed as floats; labels are kept
as raw strings and encoded to 0..k-1 in sorted order (numeric sort when all
labels parse as numbers).
"""

import json
import math
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

_DELIMITERS = {"comma": ",", "tab": "\t", "whitespace": None}


class DataError(Exception):
    """Manifest, download, or file-content problem."""


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    urls: tuple
    file_format: str = "comma"
    has_header: bool = False
    label_position: object = "last"  # "first" | "last" | named column
    drop_columns: tuple = ()
    test_fraction: float = None

    def __post_init__(self):
        if self.file_format not in _DELIMITERS:
            raise DataError(
                f"{self.name}: file_format must be one of {sorted(_DELIMITERS)}"
            )
        if len(self.urls) not in (1, 2):
            raise DataError(f"{self.name}: expected 1 or 2 urls, got {len(self.urls)}")
        if len(self.urls) == 1:
            if self.test_fraction is None:
                raise DataError(f"{self.name}: single-file entry needs test_fraction")
            if not 0.0 < self.test_fraction < 1.0:
                raise DataError(f"{self.name}: test_fraction must be in (0, 1)")
        elif self.test_fraction is not None:
            raise DataError(
                f"{self.name}: test_fraction is meaningless with predefined partitions"
            )
        if (
            isinstance(self.label_position, str)
            and self.label_position not in ("first", "last")
            and not self.has_header
        ):
            raise DataError(
                f"{self.name}: named label column requires has_header=true"
            )

    def filenames(self):
        if len(self.urls) == 1:
            return (f"{self.name}.data",)
        return (f"{self.name}.train", f"{self.name}.test")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, encoded labels, and the label table they map back to."""

    name: str
    X: np.ndarray
    y: np.ndarray
    class_names: tuple

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1 or self.X.shape[0] != self.y.size:
            raise DataError(f"{self.name}: inconsistent feature/label shapes")
        if not np.isfinite(self.X).all():
            raise DataError(f"{self.name}: non-finite feature values")
        if len(self.class_names) < 2:
            raise DataError(f"{self.name}: need at least 2 classes")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise DataError(f"{self.name}: label index out of range")

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)


def default_manifest_path():
    """Path of the manifest shipped inside the package (all 13 datasets)."""
    return Path(resources.files("marcsinh") / "manifest.json")


def load_manifest(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("datasets"), list):
        raise DataError(f"manifest {path} must contain a 'datasets' list")
    entries = []
    for item in raw["datasets"]:
        known = {
            "name",
            "urls",
            "file_format",
            "has_header",
            "label_position",
            "drop_columns",
            "test_fraction",
        }
        unknown = set(item) - known
        if unknown:
            raise DataError(f"manifest entry has unknown keys: {sorted(unknown)}")
        try:
            entries.append(
                ManifestEntry(
                    name=item["name"],
                    urls=tuple(item["urls"]),
                    file_format=item.get("file_format", "comma"),
                    has_header=bool(item.get("has_header", False)),
                    label_position=item.get("label_position", "last"),
                    drop_columns=tuple(item.get("drop_columns", ())),
                    test_fraction=item.get("test_fraction"),
                )
            )
        except KeyError as exc:
            raise DataError(f"manifest entry missing required key {exc}") from exc
    names = [e.name for e in entries]
    if len(names) != len(set(names)):
        raise DataError("manifest contains duplicate dataset names")
    return entries


@dataclass
class FetchResult:
    name: str
    downloaded: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    error: str = None


def _remote_size(url):
    req = urllib.request.Request(url, method="HEAD")
    with urllib.request.urlopen(req, timeout=30) as resp:
        length = resp.headers.get("Content-Length")
    return int(length) if length is not None else None


def fetch(entries, dest_dir):
    """Download every manifest entry into dest_dir.

    Existing files are kept when their size matches the server's
    Content-Length (or when no length is advertised), so reruns are cheap.
    A failing entry is reported in its FetchResult and does not stop the
    remaining entries.
    """
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    results = []
    for entry in entries:
        result = FetchResult(name=entry.name)
        for url, filename in zip(entry.urls, entry.filenames()):
            target = dest / filename
            try:
                if target.exists() and target.stat().st_size > 0:
                    try:
                        size = _remote_size(url)
                    except (urllib.error.URLError, OSError):
                        size = None
                    if size is None or size == target.stat().st_size:
                        result.skipped.append(filename)
                        continue
                with urllib.request.urlopen(url, timeout=60) as resp:
                    target.write_bytes(resp.read())
                result.downloaded.append(filename)
            except (urllib.error.URLError, OSError) as exc:
                result.error = f"{url}: {exc}"
                break
        results.append(result)
    return results


def _parse_rows(path, delimiter, has_header):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    header = None
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(delimiter)]
        if header is None and has_header:
            header = cells
            width = len(cells)
            continue
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataError(
                f"{path}: malformed row at line {lineno} "
                f"(expected {width} columns, found {len(cells)})"
            )
        rows.append(cells)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return header, rows


def _resolve_columns(entry, header, width, path):
    def column_index(ref):
        if isinstance(ref, int):
            if not 0 <= ref < width:
                raise DataError(f"{path}: column index {ref} out of range")
            return ref
        if header is None:
            raise DataError(
                f"{path}: column {ref!r} referenced by name but file has no header"
            )
        try:
            return header.index(ref)
        except ValueError:
            raise DataError(f"{path}: no column named {ref!r}") from None

    dropped = {column_index(ref) for ref in entry.drop_columns}
    kept = [i for i in range(width) if i not in dropped]
    if entry.label_position == "first":
        label_idx = kept[0]
    elif entry.label_position == "last":
        label_idx = kept[-1]
    else:
        label_idx = column_index(entry.label_position)
        if label_idx in dropped:
            raise DataError(f"{path}: label column is also listed in drop_columns")
    feature_idx = [i for i in kept if i != label_idx]
    if not feature_idx:
        raise DataError(f"{path}: no feature columns left")
    return feature_idx, label_idx


def _extract(entry, path):
    header, rows = _parse_rows(path, _DELIMITERS[entry.file_format], entry.has_header)
    feature_idx, label_idx = _resolve_columns(entry, header, len(rows[0]), path)
    X = np.empty((len(rows), len(feature_idx)))
    labels = []
    for r, cells in enumerate(rows):
        for c, idx in enumerate(feature_idx):
            try:
                X[r, c] = float(cells[idx])
            except ValueError:
                colname = header[idx] if header else f"column {idx}"
                raise DataError(
                    f"{path}: non-numeric feature value {cells[idx]!r} in {colname}"
                ) from None
        labels.append(cells[label_idx])
    return X, labels


def _sorted_classes(labels):
    unique = sorted(set(labels))
    try:
        unique.sort(key=float)
    except ValueError:
        pass  # non-numeric labels keep lexicographic order
    return tuple(unique)


def _encode(labels, class_names):
    mapping = {name: i for i, name in enumerate(class_names)}
    return np.array([mapping[v] for v in labels], dtype=int)


def load_dataset(entry, data_dir):
    """Build Dataset(s) from the files of one manifest entry.

    Returns a single Dataset for single-url entries and a (train, test)
    pair for entries with predefined partitions; the pair shares one label
    table so class indices agree.
    """
    data_dir = Path(data_dir)
    paths = [data_dir / f for f in entry.filenames()]
    for p in paths:
        if not p.exists():
            raise DataError(f"{entry.name}: missing data file {p} (run fetch first)")
    if len(paths) == 1:
        X, labels = _extract(entry, paths[0])
        classes = _sorted_classes(labels)
        return Dataset(entry.name, X, _encode(labels, classes), classes)
    X_train, lab_train = _extract(entry, paths[0])
    X_test, lab_test = _extract(entry, paths[1])
    if X_train.shape[1] != X_test.shape[1]:
        raise DataError(
            f"{entry.name}: train/test feature counts differ "
            f"({X_train.shape[1]} vs {X_test.shape[1]})"
        )
    classes = _sorted_classes(lab_train + lab_test)
    return (
        Dataset(entry.name, X_train, _encode(lab_train, classes), classes),
        Dataset(entry.name, X_test, _encode(lab_test, classes), classes),
    )


def split(dataset, test_fraction):
    """Deterministic head/tail split: no shuffling, train takes the ceiling.

    train = first ceil((1 - test_fraction) * n) rows, test = the rest, so
    concatenating the two partitions reproduces the original dataset.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DataError("test_fraction must be in (0, 1)")
    n = dataset.n_samples
    n_train = math.ceil((1.0 - test_fraction) * n)
    if n_train == 0 or n_train == n:
        raise DataError(
            f"{dataset.name}: test_fraction {test_fraction} leaves an empty partition"
        )
    train = Dataset(
        dataset.name,
        dataset.X[:n_train].copy(),
        dataset.y[:n_train].copy(),
        dataset.class_names,
    )
    test = Dataset(
        dataset.name,
        dataset.X[n_train:].copy(),
        dataset.y[n_train:].copy(),
        dataset.class_names,
    )
    return train, test


# Datasets whose source files can be rebuilt from scikit-learn's bundled
# copies, for running the harness without network access.  The written
# files use the same layout the manifest describes for the real downloads.
BUNDLED_NAMES = ("wdbc", "iris", "wine", "digits")


def seed_bundled(dest_dir, names=BUNDLED_NAMES):
    """Materialise wdbc/iris/wine/digits data files from scikit-learn.

    Returns the list of files written.  Raises DataError when scikit-learn
    is not installed or an unknown name is requested.
    """
    try:
        from sklearn import datasets as skdata
    except ImportError as exc:
        raise DataError(
            "seed_bundled needs scikit-learn (pip install scikit-learn); "
            "alternatively download the files with fetch"
        ) from exc

    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    unknown = set(names) - set(BUNDLED_NAMES)
    if unknown:
        raise DataError(f"not bundled with scikit-learn: {sorted(unknown)}")

    def fmt(v):
        return str(int(v)) if float(v).is_integer() else repr(float(v))

    written = []
    if "wdbc" in names:
        d = skdata.load_breast_cancer()
        tags = np.where(d.target == 0, "M", "B")  # 0 = malignant in the bundle
        lines = [
            ",".join([str(800000 + i), tags[i]] + [fmt(v) for v in row])
            for i, row in enumerate(d.data)
        ]
        (dest / "wdbc.data").write_text("\n".join(lines) + "\n")
        written.append(dest / "wdbc.data")
    if "iris" in names:
        d = skdata.load_iris()
        species = [f"Iris-{d.target_names[t]}" for t in d.target]
        lines = [
            ",".join([fmt(v) for v in row] + [species[i]])
            for i, row in enumerate(d.data)
        ]
        (dest / "iris.data").write_text("\n".join(lines) + "\n")
        written.append(dest / "iris.data")
    if "wine" in names:
        d = skdata.load_wine()
        lines = [
            ",".join([str(d.target[i] + 1)] + [fmt(v) for v in row])
            for i, row in enumerate(d.data)
        ]
        (dest / "wine.data").write_text("\n".join(lines) + "\n")
        written.append(dest / "wine.data")
    if "digits" in names:
        d = skdata.load_digits()
        lines = [
            ",".join([str(int(v)) for v in row] + [str(d.target[i])])
            for i, row in enumerate(d.data)
        ]
        (dest / "digits.data").write_text("\n".join(lines) + "\n")
        written.append(dest / "digits.data")
    return written
