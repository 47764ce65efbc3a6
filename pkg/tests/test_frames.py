import io

import numpy as np
import pytest

from gdnls.errors import ConfigurationError
from gdnls.frames import (
    read_frames,
    spacetime_to_csv,
    spectral_from_csv,
    spectral_to_csv,
    to_string,
    write_frames,
)
from gdnls.picard import SpaceTimeFunction, TimeGrid
from gdnls.spectrum import FrequencyGrid, SpectralFunction


@pytest.fixture
def sample():
    grid = FrequencyGrid.symmetric(4.0, 0.5)
    tg = TimeGrid(t_max=1.0, steps=4)
    rng = np.random.default_rng(42)
    data = rng.normal(size=(5, grid.count)) + 1j * rng.normal(size=(5, grid.count))
    return SpaceTimeFunction(tg, grid, data)


def test_binary_round_trip(sample, tmp_path):
    path = tmp_path / "frames.niqk1"
    write_frames(sample, path)
    back = read_frames(path)
    assert np.array_equal(back.frames, sample.frames)
    assert back.grid == sample.grid
    assert back.time_grid == sample.time_grid


def test_binary_writes_are_deterministic(sample, tmp_path):
    a, b = tmp_path / "a.niqk1", tmp_path / "b.niqk1"
    write_frames(sample, a)
    write_frames(sample, b)
    assert a.read_bytes() == b.read_bytes()


def test_binary_magic(sample, tmp_path):
    path = tmp_path / "frames.niqk1"
    write_frames(sample, path)
    assert path.read_bytes()[:5] == b"NIQK1"


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.niqk1"
    path.write_bytes(b"WRONG" + b"\0" * 64)
    with pytest.raises(ConfigurationError):
        read_frames(path)


def test_truncated_file_rejected(sample, tmp_path):
    path = tmp_path / "frames.niqk1"
    write_frames(sample, path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(ConfigurationError):
        read_frames(path)
    path.write_bytes(blob[:10])
    with pytest.raises(ConfigurationError):
        read_frames(path)


def test_spectral_csv_round_trip(sample):
    f = sample.at_index(0)
    text = to_string(spectral_to_csv, f)
    assert text.splitlines()[0] == "xi,re,im"
    back = spectral_from_csv(io.StringIO(text))
    assert np.array_equal(back.values, f.values)
    assert back.grid == f.grid


def test_spectral_csv_requires_header():
    with pytest.raises(ConfigurationError):
        spectral_from_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_spectral_csv_requires_uniform_grid():
    text = "xi,re,im\n0.0,1.0,0.0\n1.0,1.0,0.0\n3.0,1.0,0.0\n"
    with pytest.raises(ConfigurationError):
        spectral_from_csv(io.StringIO(text))


def test_spacetime_csv_layout(sample):
    text = to_string(spacetime_to_csv, sample)
    lines = text.splitlines()
    assert lines[0] == "t,xi,re,im"
    assert len(lines) == 1 + 5 * sample.grid.count
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == sample.grid.xi_min
