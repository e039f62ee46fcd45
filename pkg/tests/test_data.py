import importlib.util
import json
import threading
from functools import partial
from http.server import HTTPServer, SimpleHTTPRequestHandler

import numpy as np
import pytest

from marcsinh import (
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


def entry(**kw):
    defaults = dict(name="toy", urls=("http://x/toy.csv",), test_fraction=0.2)
    defaults.update(kw)
    return ManifestEntry(**defaults)


class TestManifestEntry:
    def test_single_url_needs_fraction(self):
        with pytest.raises(DataError, match="test_fraction"):
            entry(test_fraction=None)

    def test_two_urls_reject_fraction(self):
        with pytest.raises(DataError, match="predefined"):
            entry(urls=("http://x/a", "http://x/b"), test_fraction=0.2)

    def test_fraction_range(self):
        with pytest.raises(DataError, match="test_fraction"):
            entry(test_fraction=1.0)

    def test_url_count(self):
        with pytest.raises(DataError, match="urls"):
            entry(urls=("a", "b", "c"), test_fraction=None)

    def test_named_label_needs_header(self):
        with pytest.raises(DataError, match="header"):
            entry(label_position="status")

    def test_bad_format(self):
        with pytest.raises(DataError, match="file_format"):
            entry(file_format="excel")

    def test_filenames(self):
        assert entry().filenames() == ("toy.data",)
        two = entry(urls=("http://x/a", "http://x/b"), test_fraction=None)
        assert two.filenames() == ("toy.train", "toy.test")


class TestLoadManifest:
    def test_round_trip(self, tmp_path):
        payload = {
            "datasets": [
                {"name": "a", "urls": ["http://x/a"], "test_fraction": 0.3},
                {"name": "b", "urls": ["http://x/b1", "http://x/b2"],
                 "label_position": "first"},
            ]
        }
        path = tmp_path / "m.json"
        path.write_text(json.dumps(payload))
        entries = load_manifest(path)
        assert [e.name for e in entries] == ["a", "b"]
        assert entries[0].test_fraction == 0.3
        assert entries[1].filenames() == ("b.train", "b.test")

    def test_duplicate_names(self, tmp_path):
        payload = {"datasets": [
            {"name": "a", "urls": ["u"], "test_fraction": 0.5},
            {"name": "a", "urls": ["u"], "test_fraction": 0.5},
        ]}
        path = tmp_path / "m.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(DataError, match="duplicate"):
            load_manifest(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"datasets": [{"name": "a", "urls": ["u"],
                                                  "test_fraction": 0.5, "sep": ","}]}))
        with pytest.raises(DataError, match="unknown keys"):
            load_manifest(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("not json")
        with pytest.raises(DataError, match="JSON"):
            load_manifest(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            load_manifest(tmp_path / "nope.json")

    def test_default_manifest_ships_thirteen_datasets(self):
        entries = load_manifest(default_manifest_path())
        names = {e.name for e in entries}
        assert len(entries) == 13
        assert {"wdbc", "iris", "digits", "wine", "optdigits", "heart_failure",
                "parkinsons", "haberman", "spectf", "german", "pendigits",
                "wifi", "coimbra"} == names
        assert entries[[e.name for e in entries].index("iris")].test_fraction == 0.2


class TestLoadDataset:
    def write(self, tmp_path, name, text):
        (tmp_path / name).write_text(text)
        return tmp_path

    def test_label_last_and_encoding(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1.0,2.0,dog\n3.0,4.0,cat\n5.0,6.0,dog\n")
        ds = load_dataset(entry(), d)
        assert ds.class_names == ("cat", "dog")
        assert np.array_equal(ds.y, [1, 0, 1])
        assert np.array_equal(ds.X, [[1, 2], [3, 4], [5, 6]])
        # encoding round-trips back to the raw labels
        assert [ds.class_names[i] for i in ds.y] == ["dog", "cat", "dog"]

    def test_label_first_with_dropped_id_column(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "id1,M,1.5\nid2,B,2.5\n")
        ds = load_dataset(entry(label_position="first", drop_columns=(0,)), d)
        assert ds.class_names == ("B", "M")
        assert np.array_equal(ds.y, [1, 0])
        assert np.array_equal(ds.X, [[1.5], [2.5]])

    def test_named_label_and_drop_by_name(self, tmp_path):
        d = self.write(
            tmp_path, "toy.data",
            "name,f1,status,f2\nrec1,1.0,1,4.0\nrec2,2.0,0,5.0\n",
        )
        ds = load_dataset(
            entry(has_header=True, label_position="status", drop_columns=("name",)), d
        )
        assert ds.class_names == ("0", "1")
        assert np.array_equal(ds.X, [[1.0, 4.0], [2.0, 5.0]])
        assert np.array_equal(ds.y, [1, 0])

    def test_whitespace_format(self, tmp_path):
        d = self.write(tmp_path, "toy.data", " 1  2   3\n4 5\t6\n")
        ds = load_dataset(entry(file_format="whitespace"), d)
        assert np.array_equal(ds.X, [[1, 2], [4, 5]])

    def test_tab_format(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1\t2\t4\n3\t4\t2\n")
        ds = load_dataset(entry(file_format="tab"), d)
        assert ds.class_names == ("2", "4")

    def test_numeric_label_sort(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1,10\n2,2\n3,1\n4,10\n")
        ds = load_dataset(entry(), d)
        assert ds.class_names == ("1", "2", "10")  # numeric, not lexicographic
        assert np.array_equal(ds.y, [2, 1, 0, 2])

    def test_malformed_row_reports_line(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1,2,a\n3,4\n")
        with pytest.raises(DataError, match="line 2"):
            load_dataset(entry(), d)

    def test_non_numeric_feature_reports_column(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1,x,a\n2,3,b\n")
        with pytest.raises(DataError, match="column 1"):
            load_dataset(entry(), d)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="missing data file"):
            load_dataset(entry(), tmp_path)

    def test_predefined_partition_pair_shares_classes(self, tmp_path):
        two = entry(urls=("u1", "u2"), test_fraction=None)
        self.write(tmp_path, "toy.train", "1,2,a\n3,4,a\n")
        self.write(tmp_path, "toy.test", "5,6,b\n")
        train, test = load_dataset(two, tmp_path)
        assert train.class_names == test.class_names == ("a", "b")
        assert np.array_equal(train.y, [0, 0])
        assert np.array_equal(test.y, [1])

    def test_partition_feature_mismatch(self, tmp_path):
        two = entry(urls=("u1", "u2"), test_fraction=None)
        self.write(tmp_path, "toy.train", "1,2,a\n")
        self.write(tmp_path, "toy.test", "5,b\n")
        with pytest.raises(DataError, match="feature counts differ"):
            load_dataset(two, tmp_path)

    def test_non_finite_rejected(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1,nan,a\n2,3,b\n")
        with pytest.raises(DataError, match="non-finite"):
            load_dataset(entry(), d)

    def test_loading_is_deterministic(self, tmp_path):
        d = self.write(tmp_path, "toy.data", "1.25,2,a\n3,4.5,b\n1,2,a\n")
        first = load_dataset(entry(), d)
        second = load_dataset(entry(), d)
        assert np.array_equal(first.X, second.X)
        assert np.array_equal(first.y, second.y)
        assert first.class_names == second.class_names


class TestSplit:
    def make(self, n):
        return Dataset("t", np.arange(n * 2, dtype=float).reshape(n, 2),
                       np.arange(n) % 2, ("a", "b"))

    def test_deterministic_slicing(self):
        train, test = split(self.make(10), 0.3)
        assert train.n_samples == 7 and test.n_samples == 3
        assert np.array_equal(train.X, self.make(10).X[:7])
        assert np.array_equal(test.X, self.make(10).X[7:])

    def test_partition_property(self):
        ds = self.make(13)
        train, test = split(ds, 0.25)
        assert np.array_equal(np.vstack([train.X, test.X]), ds.X)
        assert np.array_equal(np.concatenate([train.y, test.y]), ds.y)

    def test_iris_sized_counts(self):
        ds = Dataset("t", np.zeros((150, 1)), np.arange(150) % 2, ("a", "b"))
        train, test = split(ds, 0.2)
        assert (train.n_samples, test.n_samples) == (120, 30)

    def test_empty_partition(self):
        with pytest.raises(DataError, match="empty partition"):
            split(self.make(3), 0.1)  # ceil(2.7) == 3 leaves no test rows

    def test_fraction_validation(self):
        with pytest.raises(DataError, match="test_fraction"):
            split(self.make(4), 0.0)


class _QuietHandler(SimpleHTTPRequestHandler):
    def log_message(self, *args):
        pass


@pytest.fixture()
def http_dir(tmp_path_factory):
    serve = tmp_path_factory.mktemp("served")
    handler = partial(_QuietHandler, directory=str(serve))
    server = HTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield serve, f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    thread.join()


class TestFetch:
    def test_download_idempotence_and_error_isolation(self, http_dir, tmp_path):
        serve, base = http_dir
        (serve / "good.csv").write_text("1,2,a\n3,4,b\n")
        (serve / "train.csv").write_text("1,a\n")
        (serve / "test.csv").write_text("2,b\n")
        entries = [
            ManifestEntry("good", (f"{base}/good.csv",), test_fraction=0.5),
            ManifestEntry("pair", (f"{base}/train.csv", f"{base}/test.csv")),
            ManifestEntry("broken", (f"{base}/missing.csv",), test_fraction=0.5),
        ]
        dest = tmp_path / "data"
        results = {r.name: r for r in fetch(entries, dest)}
        assert results["good"].downloaded == ["good.data"]
        assert results["pair"].downloaded == ["pair.train", "pair.test"]
        assert results["broken"].error and "missing.csv" in results["broken"].error
        assert (dest / "good.data").read_text() == "1,2,a\n3,4,b\n"

        # rerun: sizes match, nothing is downloaded again
        again = {r.name: r for r in fetch(entries[:2], dest)}
        assert again["good"].downloaded == [] and again["good"].skipped == ["good.data"]
        assert again["pair"].skipped == ["pair.train", "pair.test"]

    def test_changed_size_triggers_redownload(self, http_dir, tmp_path):
        serve, base = http_dir
        (serve / "f.csv").write_text("1,a\n2,b\n")
        e = ManifestEntry("f", (f"{base}/f.csv",), test_fraction=0.5)
        dest = tmp_path / "data"
        fetch([e], dest)
        (serve / "f.csv").write_text("1,a\n2,b\n3,c\n")
        result = fetch([e], dest)[0]
        assert result.downloaded == ["f.data"]
        assert (dest / "f.data").read_text().count("\n") == 3


@pytest.mark.skipif(
    importlib.util.find_spec("sklearn") is None,
    reason="seed_bundled needs scikit-learn",
)
class TestSeedBundled:
    def test_written_files_load_with_published_shapes(self, tmp_path):
        seed_bundled(tmp_path)
        entries = {e.name: e for e in load_manifest(default_manifest_path())}
        expected = {
            "iris": (150, 4, 3),
            "wdbc": (569, 30, 2),
            "wine": (178, 13, 3),
            "digits": (1797, 64, 10),
        }
        for name, (n, d, k) in expected.items():
            ds = load_dataset(entries[name], tmp_path)
            assert (ds.n_samples, ds.n_features, ds.n_classes) == (n, d, k), name

    def test_unknown_name(self, tmp_path):
        with pytest.raises(DataError, match="not bundled"):
            seed_bundled(tmp_path, ("haberman",))

    def test_round_trip_values_match_sklearn(self, tmp_path):
        from sklearn import datasets as skdata

        seed_bundled(tmp_path, ("iris",))
        entries = {e.name: e for e in load_manifest(default_manifest_path())}
        ds = load_dataset(entries["iris"], tmp_path)
        ref = skdata.load_iris()
        assert np.array_equal(ds.X, ref.data)
        assert np.array_equal(ds.y, ref.target)  # same sorted class order
