#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
import math
import os
import tempfile
import unittest

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bagged_gp import dataset
from bagged_gp.dataset import Dataset, DatasetError, Standardization


class TestDelimitedFiles(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name, text):
        path = os.path.join(self.directory.name, name)
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(text)
        return path

    def test_drops_rows_with_non_numeric_cells(self):
        path = self.write("data.csv", "a,b,y\n1,2,3\n4,oops,6\n7,8,9\n")
        with self.assertLogs("bagged_gp.dataset", level="WARNING") as captured:
            data, dropped = dataset.read_delimited(path, "y")
        assert dropped == 1
        assert data.n_rows == 2
        assert data.feature_names == ("a", "b")
        assert "Dropped 1 rows" in captured.output[0]

    def test_drops_non_finite_and_missing_values(self):
        path = self.write("data.csv", "x;y\n1;nan\n2;inf\n3;\n4;5\n")
        data, dropped = dataset.read_delimited(path, "y", delimiter=";")
        assert dropped == 3
        assert_allclose(data.X, [[4.0]])

    def test_header_only_file(self):
        path = self.write("empty.csv", "x,y\n")
        with pytest.raises(DatasetError):
            dataset.load_delimited(path, "y")

    def test_missing_target(self):
        path = self.write("data.csv", "x,z\n1,2\n")
        with pytest.raises(DatasetError):
            dataset.load_delimited(path, "y")

    def test_missing_file(self):
        with pytest.raises(DatasetError):
            dataset.load_delimited(os.path.join(self.directory.name, "absent.csv"), "y")

    def test_load_standardizes_by_default(self):
        path = self.write("data.csv", "x,y\n1,10\n2,20\n3,30\n")
        data = dataset.load_delimited(path, "y")
        assert data.standardization is not None
        assert abs(data.y.mean()) < 1e-15
        assert_allclose(data.raw_y(), [10.0, 20.0, 30.0], rtol=1e-14)
        assert dataset.load_delimited(path, "y", standardize=False).standardization is None

    def test_feature_selection(self):
        path = self.write("data.csv", "a,b,c,y\n1,2,3,4\n5,6,7,8\n")
        data, _ = dataset.read_delimited(path, "y", features=["c", "a"])
        assert_allclose(data.X, [[3.0, 1.0], [7.0, 5.0]])

    def test_write_then_read_keeps_values(self):
        rng = np.random.default_rng(4)
        original = Dataset(X=rng.normal(size=(20, 3)), y=rng.normal(size=20), feature_names=("p", "q", "r"))
        path = os.path.join(self.directory.name, "round.csv")
        dataset.write_delimited(original.standardized(), path)
        restored, dropped = dataset.read_delimited(path, "y")
        assert dropped == 0
        assert np.max(np.abs(restored.X - original.X)) <= 1e-12
        assert np.max(np.abs(restored.y - original.y)) <= 1e-12

    def test_feature_matrix_rejects_bad_rows(self):
        path = self.write("query.csv", "x,other\n1,a\n2,b\n")
        assert_allclose(dataset.read_feature_matrix(path, ["x"]), [[1.0], [2.0]])
        bad = self.write("bad.csv", "x\n1\nnope\n")
        with pytest.raises(DatasetError):
            dataset.read_feature_matrix(bad, ["x"])


class TestDataset(unittest.TestCase):
    def test_validation(self):
        with pytest.raises(DatasetError):
            Dataset(X=np.zeros((3, 1)), y=np.zeros(2))
        with pytest.raises(DatasetError):
            Dataset(X=np.array([[np.nan]]), y=np.zeros(1))
        with pytest.raises(DatasetError):
            Dataset(X=np.zeros((0, 1)), y=np.zeros(0))

    def test_one_dimensional_inputs_become_columns(self):
        data = Dataset(X=np.arange(4.0), y=np.arange(4.0))
        assert data.X.shape == (4, 1)
        assert len(data) == 4
        assert data.feature_names == ("x0",)

    def test_subset_keeps_duplicates(self):
        data = Dataset(X=np.arange(4.0), y=np.arange(4.0) * 2)
        part = data.subset([1, 1, 3])
        assert_allclose(part.y, [2.0, 2.0, 6.0])

    def test_standardization_round_trip(self):
        rng = np.random.default_rng(1)
        X = rng.normal(5.0, 3.0, size=(50, 2))
        y = rng.normal(-2.0, 10.0, size=50)
        standardized = Dataset(X=X, y=y).standardized()
        assert_allclose(standardized.X.mean(axis=0), 0.0, atol=1e-12)
        assert_allclose(standardized.X.std(axis=0), 1.0, rtol=1e-12)
        assert_allclose(standardized.raw_X(), X, rtol=1e-12)
        restored = Standardization.from_dict(standardized.standardization.to_dict())
        assert_allclose(restored.inverse_response(standardized.y), y, rtol=1e-12)

    def test_constant_columns_keep_unit_scale(self):
        data = Dataset(X=np.ones((5, 1)), y=np.full(5, 3.0)).standardized()
        assert data.standardization.response_scale == 1.0
        assert_allclose(data.y, 0.0)
        assert_allclose(data.raw_y(), 3.0)

    def test_already_standardized(self):
        data = Dataset(X=np.arange(3.0), y=np.arange(3.0)).standardized()
        assert data.standardized() is data
        with pytest.raises(DatasetError):
            data.with_standardization(data.standardization)


class TestSinc(unittest.TestCase):
    def test_removable_singularity(self):
        assert dataset.sinc(0.0) == 1.0
        assert abs(dataset.sinc(math.pi)) <= 1e-12
        assert abs(dataset.sinc(1.0) - math.sin(1.0)) < 1e-15

    def test_generation_is_seeded(self):
        first = dataset.generate_sinc(100000, seed=42)
        second = dataset.generate_sinc(100000, seed=42)
        assert np.array_equal(first.X, second.X)
        assert np.array_equal(first.y, second.y)
        assert first.X.min() >= -15.0 and first.X.max() <= 15.0
        assert_allclose(first.y, dataset.sinc(first.X[:, 0]), rtol=0, atol=0)

    def test_noise(self):
        clean = dataset.generate_sinc(2000, seed=1)
        noisy = dataset.generate_sinc(2000, noise_sd=0.1, seed=1)
        assert np.array_equal(clean.X, noisy.X)
        assert 0.08 < np.std(noisy.y - clean.y) < 0.12

    def test_invalid_size(self):
        with pytest.raises(DatasetError):
            dataset.generate_sinc(0)


class TestTrainTestSplit(unittest.TestCase):
    def test_seventy_thirty(self):
        data = Dataset(X=np.arange(100.0), y=np.arange(100.0))
        train, test = dataset.train_test_split(data, 0.7, seed=3)
        assert train.n_rows == 70 and test.n_rows == 30
        assert sorted(np.concatenate([train.y, test.y])) == list(np.arange(100.0))
        again, _ = dataset.train_test_split(data, 0.7, seed=3)
        assert np.array_equal(train.y, again.y)

    def test_invalid_fraction(self):
        data = Dataset(X=np.arange(10.0), y=np.arange(10.0))
        for fraction in (0.0, 1.0, 1.5):
            with pytest.raises(ValueError):
                dataset.train_test_split(data, fraction)
