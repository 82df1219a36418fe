import csv
import math
import re
from pathlib import Path
from typing import TextIO

import numpy as np
from numpy.typing import NDArray

from .exceptions import InputError
from .models import Trajectory

DIVERGENCE_TRAILER = re.compile(r"^#\s*diverged at t=(?P<time>\S+)\s*$")


def _fmt(value: float) -> str:
    return f"{value:.17e}"


def write_trajectory(traj: Trajectory, stream: TextIO) -> None:
    n = traj.n
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["t"] + [f"x{i}" for i in range(n)] + [f"s{i}" for i in range(n)] + ["switched"])
    for t, x, s, switched in zip(traj.times, traj.states, traj.sample_pivots, traj.sample_switched):
        pivot = s if s is not None else [math.nan] * n
        writer.writerow([_fmt(t)] + [_fmt(v) for v in x] + [_fmt(v) for v in pivot] + [int(switched)])
    if traj.divergence is not None:
        stream.write(f"# diverged at t={_fmt(traj.divergence)}\n")


def save_trajectory(traj: Trajectory, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_trajectory(traj, handle)


def load_trajectory(path: Path) -> Trajectory:
    lines = path.read_text(encoding="utf-8").splitlines()
    divergence = None
    data_lines = []
    for line in lines:
        if line.startswith("#"):
            match = DIVERGENCE_TRAILER.match(line)
            if match:
                divergence = float(match.group("time"))
            continue
        if line.strip():
            data_lines.append(line)

    rows = list(csv.reader(data_lines))
    if not rows:
        raise InputError(f"Trajectory file {path} is empty")
    header = [column.strip() for column in rows[0]]
    if header[0] != "t" or header[-1] != "switched" or (len(header) - 2) % 2:
        raise InputError(f"Trajectory file {path} has an unexpected header: {header}")
    n = (len(header) - 2) // 2

    traj = Trajectory(label=path.stem, divergence=divergence)
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: row {number} has {len(row)} fields, expected {len(header)}")
        values = [float(v) for v in row[:-1]]
        pivot = values[1 + n : 1 + 2 * n]
        traj.times.append(values[0])
        traj.states.append(values[1 : 1 + n])
        traj.sample_pivots.append(None if all(math.isnan(v) for v in pivot) else pivot)
        traj.sample_switched.append(row[-1].strip() == "1")
    return Trajectory.model_validate(traj.model_dump())


def write_matrix(matrix: NDArray[np.float64], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    for row in matrix:
        writer.writerow([_fmt(v) for v in row])


def save_matrix(matrix: NDArray[np.float64], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_matrix(matrix, handle)
