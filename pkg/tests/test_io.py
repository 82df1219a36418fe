import io
import math

import numpy as np
import pytest

from src.exceptions import InputError
from src.io import load_trajectory, save_matrix, save_trajectory, write_trajectory
from src.models import PivotRecord, Trajectory


@pytest.fixture
def trajectory():
    return Trajectory(
        label="sample",
        times=[0.0, 0.5, 1.0],
        states=[[0.1, 0.2], [0.15, 0.25], [0.3, 0.4]],
        sample_pivots=[[0.1, 0.2], [0.1, 0.2], [0.3, 0.4]],
        sample_switched=[False, False, True],
        pivots=[PivotRecord(time=0.0, s=[0.1, 0.2]), PivotRecord(time=1.0, s=[0.3, 0.4])],
        switch_events=[1.0],
    )


class TestTrajectoryCsv:
    def test_header_and_rows(self, trajectory):
        buffer = io.StringIO()
        write_trajectory(trajectory, buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "t,x0,x1,s0,s1,switched"
        assert len(lines) == 4
        assert lines[1].startswith("0.00000000000000000e+00,1.00000000000000006e-01")
        assert lines[3].endswith(",1")

    def test_divergence_trailer(self, trajectory):
        trajectory.divergence = 1.01
        buffer = io.StringIO()
        write_trajectory(trajectory, buffer)
        assert buffer.getvalue().splitlines()[-1] == "# diverged at t=1.01000000000000001e+00"

    def test_reload_keeps_values(self, trajectory, tmp_path):
        trajectory.divergence = 1.01
        path = tmp_path / "run.csv"
        save_trajectory(trajectory, path)
        loaded = load_trajectory(path)
        assert loaded.times == trajectory.times
        assert loaded.states == trajectory.states
        assert loaded.sample_switched == trajectory.sample_switched
        assert loaded.divergence == 1.01

    def test_missing_pivots_are_written_as_nan(self, tmp_path):
        traj = Trajectory(times=[0.0], states=[[0.5]], sample_pivots=[None], sample_switched=[False])
        path = tmp_path / "reference.csv"
        save_trajectory(traj, path)
        assert "nan" in path.read_text().splitlines()[1]
        assert load_trajectory(path).sample_pivots == [None]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x0\n0,1\n")
        with pytest.raises(InputError):
            load_trajectory(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(InputError):
            load_trajectory(path)


class TestMatrixCsv:
    def test_values_survive(self, tmp_path):
        matrix = np.array([[0.0, 1.0 / 3.0], [-2.0, math.pi]])
        path = tmp_path / "matrix.csv"
        save_matrix(matrix, path)
        loaded = np.loadtxt(path, delimiter=",")
        np.testing.assert_array_equal(loaded, matrix)
