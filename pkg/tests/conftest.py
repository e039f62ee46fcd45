import os
from pathlib import Path

import pytest

from marcsinh import BUNDLED_NAMES, DataError, seed_bundled


@pytest.fixture(scope="session")
def data_dir():
    """Directory with benchmark dataset files.

    Defaults to tests/_data (override with MARCSINH_DATA, e.g. pointing at a
    directory populated by `marcsinh fetch`).  The scikit-learn-bundled
    datasets are materialised automatically when missing so the offline part
    of the suite can run without network access.
    """
    root = Path(os.environ.get("MARCSINH_DATA", Path(__file__).parent / "_data"))
    root.mkdir(parents=True, exist_ok=True)
    missing = tuple(n for n in BUNDLED_NAMES if not (root / f"{n}.data").exists())
    if missing:
        try:
            seed_bundled(root, missing)
        except DataError:
            pass  # no scikit-learn: dataset-dependent tests will skip
    return root


def require_files(data_dir, entry):
    missing = [f for f in entry.filenames() if not (data_dir / f).exists()]
    if missing:
        pytest.skip(
            f"dataset '{entry.name}' not available (missing {missing}); "
            f"populate with: marcsinh fetch --dest {data_dir}"
        )
