"""Serialization: CSV for spectra and space-time data, and the compact
binary frame format.

Binary layout (little-endian):

    bytes 0-4   magic b"NIQK1"
    uint32      frame count (time nodes)
    uint32      grid point count
    float64     t_max
    float64     xi_min
    float64     delta_xi
    float64[*]  frames, row-major (time outer, frequency inner),
                interleaved re, im
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .picard import SpaceTimeFunction, TimeGrid
from .spectrum import FrequencyGrid, SpectralFunction

MAGIC = b"NIQK1"
_HEADER = struct.Struct("<5sII3d")

__all__ = [
    "write_frames",
    "read_frames",
    "spectral_to_csv",
    "spectral_from_csv",
    "spacetime_to_csv",
]


def write_frames(stf: SpaceTimeFunction, path: str | Path) -> None:
    grid = stf.grid
    header = _HEADER.pack(
        MAGIC, stf.frames.shape[0], grid.count, stf.time_grid.t_max, grid.xi_min, grid.delta_xi
    )
    interleaved = np.empty(stf.frames.size * 2, dtype="<f8")
    interleaved[0::2] = stf.frames.real.ravel()
    interleaved[1::2] = stf.frames.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def read_frames(path: str | Path) -> SpaceTimeFunction:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ConfigurationError(f"{path}: truncated header")
        magic, nframes, count, t_max, xi_min, delta_xi = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ConfigurationError(f"{path}: bad magic {magic!r}")
        payload = fh.read()
    if len(payload) != 16 * nframes * count:
        raise ConfigurationError(f"{path}: payload size mismatch")
    data = np.frombuffer(payload, dtype="<f8")
    frames = (data[0::2] + 1j * data[1::2]).reshape(nframes, count)
    grid = FrequencyGrid(xi_min=xi_min, delta_xi=delta_xi, count=count)
    tg = TimeGrid(t_max=t_max, steps=nframes - 1)
    return SpaceTimeFunction(tg, grid, frames)


def spectral_to_csv(f: SpectralFunction, path_or_buf) -> None:
    buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
    try:
        buf.write("xi,re,im\n")
        for xi, v in zip(f.grid.xis, f.values):
            buf.write(f"{float(xi)!r},{float(v.real)!r},{float(v.imag)!r}\n")
    finally:
        if buf is not path_or_buf:
            buf.close()


def spectral_from_csv(path_or_buf) -> SpectralFunction:
    buf = path_or_buf if hasattr(path_or_buf, "read") else open(path_or_buf)
    try:
        rows = [line.strip().split(",") for line in buf if line.strip()]
    finally:
        if buf is not path_or_buf:
            buf.close()
    if not rows or rows[0] != ["xi", "re", "im"]:
        raise ConfigurationError("expected CSV header 'xi,re,im'")
    data = np.array([[float(c) for c in row] for row in rows[1:]])
    if data.shape[0] < 2:
        raise ConfigurationError("need at least two grid points")
    xis = data[:, 0]
    steps = np.diff(xis)
    delta = float(steps[0])
    if not np.allclose(steps, delta, rtol=1e-9, atol=0.0):
        raise ConfigurationError("CSV frequency column is not uniformly spaced")
    grid = FrequencyGrid(xi_min=float(xis[0]), delta_xi=delta, count=len(xis))
    return SpectralFunction(grid, data[:, 1] + 1j * data[:, 2])


def spacetime_to_csv(stf: SpaceTimeFunction, path_or_buf) -> None:
    buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
    try:
        buf.write("t,xi,re,im\n")
        for t, frame in zip(stf.time_grid.times, stf.frames):
            for xi, v in zip(stf.grid.xis, frame):
                buf.write(f"{float(t)!r},{float(xi)!r},{float(v.real)!r},{float(v.imag)!r}\n")
    finally:
        if buf is not path_or_buf:
            buf.close()


def to_string(writer, obj) -> str:
    buf = io.StringIO()
    writer(obj, buf)
    return buf.getvalue()
