"""File formats: SLC rasters, float rasters, and portable graymaps.

The SLC format is little-endian interleaved float32 (real, imag),
row-major, with a mandatory sidecar text header ``<file>.hdr`` holding
``key=value`` lines.  Header floats are written with ``repr`` so the
metadata round-trips bit-exactly.  All writers go through a temp file
plus atomic rename, so a failed run never leaves a partial artifact.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .core import RasterError, SlcImage

_HDR_KEYS = (
    "rows", "cols", "range_spacing", "azimuth_spacing",
    "doppler_center", "doppler_width", "range_center", "range_width",
    "wavelength",
)


def atomic_write_bytes(path: str, payload: bytes) -> None:
    """Write ``payload`` to ``path`` via temp file + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def header_path(path: str) -> str:
    return path + ".hdr"


def write_slc(path: str, img: SlcImage) -> None:
    """Write an SLC raster and its sidecar header."""
    interleaved = np.empty((img.rows, img.cols, 2), dtype="<f4")
    interleaved[..., 0] = img.data.real
    interleaved[..., 1] = img.data.imag
    values = {
        "rows": str(img.rows),
        "cols": str(img.cols),
        "range_spacing": repr(float(img.range_spacing)),
        "azimuth_spacing": repr(float(img.azimuth_spacing)),
        "doppler_center": repr(float(img.doppler_band[0])),
        "doppler_width": repr(float(img.doppler_band[1])),
        "range_center": repr(float(img.range_band[0])),
        "range_width": repr(float(img.range_band[1])),
        "wavelength": repr(float(img.wavelength)),
    }
    header = "".join(f"{key}={values[key]}\n" for key in _HDR_KEYS)
    atomic_write_bytes(path, interleaved.tobytes())
    atomic_write_text(header_path(path), header)


def _parse_header(path: str) -> dict:
    fields = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise RasterError(f"malformed header line in {path}: {line!r}")
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip()
    missing = [key for key in _HDR_KEYS if key not in fields]
    if missing:
        raise RasterError(f"header {path} missing keys: {missing}")
    return fields

def read_slc(path: str) -> SlcImage:
    """Read an SLC raster; rejects size mismatches against the header."""
    fields = _parse_header(header_path(path))
    rows, cols = int(fields["rows"]), int(fields["cols"])
    expected = rows * cols * 2 * 4
    actual = os.path.getsize(path)
    if actual != expected:
        raise RasterError(
            f"{path}: size {actual} B does not match header "
            f"{rows}x{cols} complex float32 ({expected} B)"
        )
    raw = np.fromfile(path, dtype="<f4").reshape(rows, cols, 2)
    data = raw[..., 0].astype(np.float64) + 1j * raw[..., 1].astype(np.float64)
    return SlcImage(
        data=data,
        range_spacing=float(fields["range_spacing"]),
        azimuth_spacing=float(fields["azimuth_spacing"]),
        doppler_band=(float(fields["doppler_center"]), float(fields["doppler_width"])),
        range_band=(float(fields["range_center"]), float(fields["range_width"])),
        wavelength=float(fields["wavelength"]),
    )


def write_float_raster(path: str, arr: np.ndarray) -> None:
    """Write a real float32 raster with a minimal rows/cols sidecar."""
    arr = np.asarray(arr, dtype="<f4")
    if arr.ndim != 2:
        raise RasterError(f"expected a 2D raster, got shape {arr.shape}")
    atomic_write_bytes(path, arr.tobytes())
    atomic_write_text(header_path(path), f"rows={arr.shape[0]}\ncols={arr.shape[1]}\n")


def read_float_raster(path: str) -> np.ndarray:
    with open(header_path(path), "r", encoding="utf-8") as handle:
        fields = dict(line.strip().split("=", 1) for line in handle if "=" in line)
    rows, cols = int(fields["rows"]), int(fields["cols"])
    expected = rows * cols * 4
    actual = os.path.getsize(path)
    if actual != expected:
        raise RasterError(f"{path}: size {actual} B does not match {rows}x{cols} float32")
    return np.fromfile(path, dtype="<f4").reshape(rows, cols).astype(np.float64)


def write_pgm_db(path: str, magnitude: np.ndarray, floor_db: float = -60.0) -> None:
    """Write a binary PGM of a magnitude raster, dB-scaled above a floor."""
    mag = np.abs(np.asarray(magnitude, dtype=np.float64))
    peak = mag.max()
    if peak <= 0.0:
        gray = np.zeros(mag.shape, dtype=np.uint8)
    else:
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mag / peak)
        db = np.maximum(db, floor_db)
        gray = np.round((db - floor_db) / (-floor_db) * 255.0).astype(np.uint8)
    header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + gray.tobytes())
