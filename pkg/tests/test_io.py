import json
import os

import numpy as np
import pytest

from multicoap.core.config import FitConfig
from multicoap.core.data import MultiStudyDataset
from multicoap.core.errors import DataFileError, EmptyDatasetError
from multicoap.engine import fit
from multicoap.io import (
    RunManifest,
    fit_summary,
    load_dataset,
    load_truth,
    read_matrix,
    read_vector,
    save_dataset,
    save_fit,
    save_truth,
    write_matrix,
)


def test_matrix_files_keep_full_precision(tmp_path, rng):
    M = rng.standard_normal((4, 3)) * np.array([1e-300, 1.0, 1e300])
    path = write_matrix(str(tmp_path / "m.csv"), M, prefix="f")
    loaded, names = read_matrix(path)
    np.testing.assert_array_equal(loaded, M)
    assert names == ["f1", "f2", "f3"]
    with open(path) as f:
        assert f.readline().strip() == "f1,f2,f3"


def test_vectors_are_written_as_one_column(tmp_path):
    path = write_matrix(str(tmp_path / "a.csv"), np.array([1.0, 2.5]), header=["a"])
    np.testing.assert_array_equal(read_vector(path), [1.0, 2.5])
    with pytest.raises(DataFileError):
        read_vector(write_matrix(str(tmp_path / "b.csv"), np.ones((2, 2))))


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(DataFileError, match="file not found"):
        read_matrix(str(tmp_path / "missing.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("v1,v2\n1,abc\n")
    with pytest.raises(DataFileError):
        read_matrix(str(bad))
    with pytest.raises(DataFileError):
        write_matrix(str(tmp_path / "c.csv"), np.ones((2, 2)), header=["only"])


def test_dataset_directory_round_trip(tmp_path, small_sim):
    _, data, _ = small_sim
    save_dataset(data, str(tmp_path))
    assert sorted(os.listdir(tmp_path)) == ["X_1.csv", "X_2.csv", "Z_1.csv", "Z_2.csv", "a_1.csv", "a_2.csv"]
    loaded = load_dataset(str(tmp_path))
    assert loaded.S == data.S
    for original, study in zip(data, loaded):
        np.testing.assert_array_equal(study.X, original.X)
        np.testing.assert_array_equal(study.Z, original.Z)
        np.testing.assert_array_equal(study.a, original.a)
        assert study.X.dtype == np.int64


def test_optional_files_default(tmp_path):
    X = np.array([[1, 0, 2], [3, 1, 0]])
    write_matrix(str(tmp_path / "X_1.csv"), X, integer=True)
    loaded = load_dataset(str(tmp_path))
    np.testing.assert_array_equal(loaded[0].a, 1.0)
    np.testing.assert_array_equal(loaded[0].Z, np.ones((2, 1)))


def test_empty_or_missing_directory(tmp_path):
    with pytest.raises(EmptyDatasetError):
        load_dataset(str(tmp_path))
    with pytest.raises(DataFileError):
        load_dataset(str(tmp_path / "nowhere"))


def test_truth_round_trip(tmp_path, small_sim):
    _, _, truth = small_sim
    save_truth(truth, str(tmp_path))
    loaded = load_truth(str(tmp_path))
    np.testing.assert_array_equal(loaded.beta0, truth.beta0)
    np.testing.assert_array_equal(loaded.A0, truth.A0)
    for s in range(2):
        np.testing.assert_array_equal(loaded.B0[s], truth.B0[s])
        np.testing.assert_array_equal(loaded.F[s], truth.F[s])
        np.testing.assert_array_equal(loaded.H[s], truth.H[s])
    assert loaded.sigma0_sq == truth.sigma0_sq


def test_fit_files(tmp_path, small_sim):
    _, data, _ = small_sim
    result = fit(data, FitConfig(q=2, qs=[0, 1], max_iter=5))
    save_fit(result, str(tmp_path))
    files = set(os.listdir(tmp_path))
    assert {"beta.csv", "A.csv", "lambda.csv", "elbo_trace.csv", "Mf_1.csv", "Sf_2.csv", "B_2.csv"} <= files
    assert not {"B_1.csv", "Mh_1.csv", "Sh_1.csv"} & files
    np.testing.assert_array_equal(read_matrix(str(tmp_path / "A.csv"))[0], result.params.A)
    np.testing.assert_array_equal(read_vector(str(tmp_path / "elbo_trace.csv")), result.elbo_trace)

    summary = json.loads(json.dumps(fit_summary(result)))
    assert summary["qs"] == [0, 1]
    assert summary["iterations"] == result.iterations


def test_manifest(tmp_path):
    manifest = RunManifest(command="fit", config=FitConfig(q=1, qs=[1]).to_dict(), seeds={"fit": 1})
    path = manifest.write(str(tmp_path))
    with open(path) as f:
        payload = json.load(f)
    assert payload["command"] == "fit"
    assert payload["config"]["q"] == 1
    assert payload["version"] == "0.1.0"
    assert set(payload["environment"]) == {"python", "numpy"}


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    data = MultiStudyDataset.from_arrays([np.ones((3, 4), dtype=int)])
    with pytest.raises(DataFileError):
        save_dataset(data, str(blocker / "sub"))
