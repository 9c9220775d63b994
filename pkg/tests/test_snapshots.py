import numpy as np
import pytest

from mhdlab.errors import UsageError
from mhdlab.fields import Grid
from mhdlab.snapshots import read_snapshot, write_snapshot

from conftest import random_scalar


def test_round_trip(tmp_path, rng):
    grid = Grid(2, 16, 3.5)
    comps = [random_scalar(grid, rng).values for _ in range(5)]
    path = tmp_path / "state.mhdf"
    write_snapshot(path, grid, comps)
    grid2, back = read_snapshot(path)
    assert grid2 == grid
    assert len(back) == 5
    for a, b in zip(comps, back):
        assert np.array_equal(a, b)


def test_header_layout(tmp_path):
    grid = Grid(2, 8, 1.0)
    path = tmp_path / "one.mhdf"
    write_snapshot(path, grid, [np.zeros(grid.shape)])
    raw = path.read_bytes()
    assert raw[:4] == b"MHDF"
    assert len(raw) == 28 + 8 * 8 * 8  # header + one f64 component


def test_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.mhdf"
    path.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(UsageError):
        read_snapshot(path)


def test_rejects_truncation(tmp_path):
    grid = Grid(2, 8, 1.0)
    path = tmp_path / "t.mhdf"
    write_snapshot(path, grid, [np.ones(grid.shape)])
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(UsageError):
        read_snapshot(path)


def test_rejects_wrong_shape(tmp_path):
    grid = Grid(2, 8, 1.0)
    with pytest.raises(UsageError):
        write_snapshot(tmp_path / "x.mhdf", grid, [np.zeros((4, 4))])
