"""Sub-pixel offset tracking between master/slave sub-aperture pairs.

Master and slave images of a pair occupy disjoint Doppler bands, so
each patch is first demodulated to baseband using its own band-center
metadata; the complex cross-correlation of the basebanded patches then
peaks at the envelope offset.  The correlation surface is oversampled
by zero-padding the cross spectrum and the peak refined with a 3-point
quadratic fit per axis.  Offsets are reported as (range, azimuth)
sample shifts of the slave relative to the master, and the per-pixel
sequence across the bank is the vibration phasor series

    y(i) = a_i + j b_i

(range shift as real part, azimuth shift as imaginary part) that the
tomographic inversion consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import SlcImage
from .subaperture import SubApertureBank

DEFAULT_WINDOW = 32
DEFAULT_OVERSAMPLE = 16
SUSPECT_QUALITY = 0.3  # entries below this are suspect but kept


class DegenerateInputError(ValueError):
    """Patch without usable signal content."""


class AssemblyError(ValueError):
    """Track is incomplete and cannot form a phasor series."""


def _baseband(patch: SlcImage) -> np.ndarray:
    """Remove the patch's band-center carriers along both axes."""
    rc = patch.range_band[0]
    dc = patch.doppler_band[0]
    data = patch.data
    if rc != 0.0:
        data = data * np.exp(-2j * np.pi * rc * np.arange(patch.rows))[:, None]
    if dc != 0.0:
        data = data * np.exp(-2j * np.pi * dc * np.arange(patch.cols))[None, :]
    return np.asarray(data, dtype=np.complex128)


def _quadratic_refine(left: float, center: float, right: float) -> float:
    denom = left - 2.0 * center + right
    if denom >= 0.0:  # not a local maximum; keep the integer peak
        return 0.0
    return 0.5 * (left - right) / denom


def estimate_shift(
    master_patch: SlcImage,
    slave_patch: SlcImage,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> Tuple[float, float, float]:
    """Sub-pixel offset (d_range, d_azimuth, quality) of slave vs master.

    A positive offset means the slave content sits at higher sample
    index than the master's.  Quality is the normalized correlation
    peak in [0, 1]; it is invariant to global amplitude scaling of
    either patch.
    """
    if master_patch.shape != slave_patch.shape:
        raise ValueError(
            f"patch shapes differ: {master_patch.shape} vs {slave_patch.shape}"
        )
    rows, cols = master_patch.shape
    if rows < 16 or cols < 16:
        raise ValueError(f"patches must be at least 16x16, got {rows}x{cols}")
    if oversample < 2 or (oversample & (oversample - 1)) != 0:
        raise ValueError(f"oversample must be a power of two >= 2, got {oversample}")

    m = _baseband(master_patch)
    s = _baseband(slave_patch)
    energy_m = float(np.sum(np.abs(m) ** 2))
    energy_s = float(np.sum(np.abs(s) ** 2))
    if energy_m == 0.0 or energy_s == 0.0:
        raise DegenerateInputError("all-zero patch has no correlation peak")

    cross = np.fft.fft2(s) * np.conj(np.fft.fft2(m))
    big_r, big_c = rows * oversample, cols * oversample
    padded = np.zeros((big_r, big_c), dtype=np.complex128)
    shifted = np.fft.fftshift(cross)
    r0 = (big_r - rows) // 2
    c0 = (big_c - cols) // 2
    padded[r0:r0 + rows, c0:c0 + cols] = shifted
    surface = np.abs(np.fft.ifft2(np.fft.ifftshift(padded))) * (oversample**2)
    surface = np.fft.fftshift(surface)

    peak = int(np.argmax(surface))
    pi, pj = np.unravel_index(peak, surface.shape)
    quality = min(surface[pi, pj] / np.sqrt(energy_m * energy_s), 1.0)

    d_range = (pi - big_r // 2) / oversample
    d_azimuth = (pj - big_c // 2) / oversample
    if 0 < pi < big_r - 1:
        d_range += _quadratic_refine(
            surface[pi - 1, pj], surface[pi, pj], surface[pi + 1, pj]
        ) / oversample
    if 0 < pj < big_c - 1:
        d_azimuth += _quadratic_refine(
            surface[pi, pj - 1], surface[pi, pj], surface[pi, pj + 1]
        ) / oversample
    return float(d_range), float(d_azimuth), float(quality)


@dataclass(frozen=True)
class VibrationTrack:
    """Per-pixel shift sequence across a sub-aperture bank.

    ``shifts[i]`` is the (range, azimuth) offset of slave i relative to
    master i at this pixel, or None if that band failed; ``quality[i]``
    is the corresponding correlation peak.  ``error`` flags a pixel
    whose window could not be evaluated at all.
    """

    pixel: Tuple[int, int]
    shifts: tuple  # of Optional[(float, float)]
    quality: tuple
    error: Optional[str] = None

    def complete(self) -> bool:
        return self.error is None and all(s is not None for s in self.shifts)

    def suspect_indices(self) -> list:
        return [i for i, q in enumerate(self.quality) if q < SUSPECT_QUALITY]


def track_pixels(
    bank: SubApertureBank,
    pixels: Sequence[Tuple[int, int]],
    window: int = DEFAULT_WINDOW,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> List[VibrationTrack]:
    """Track every requested pixel through all master/slave pairs.

    Output order follows the input pixel order.  A pixel whose window
    clips the raster gets an error entry; other pixels are unaffected.
    """
    rows, cols = bank.master[0].shape
    half = window // 2
    tracks: List[VibrationTrack] = []
    for (row, col) in pixels:
        row0, col0 = int(row) - half, int(col) - half
        if row0 < 0 or col0 < 0 or row0 + window > rows or col0 + window > cols:
            tracks.append(
                VibrationTrack(
                    pixel=(int(row), int(col)),
                    shifts=(None,) * bank.size,
                    quality=(0.0,) * bank.size,
                    error=f"window {window}x{window} at ({row}, {col}) clips the raster",
                )
            )
            continue
        shifts, quality = [], []
        for i in range(bank.size):
            m_patch = bank.master[i].window(row0, col0, window, window)
            s_patch = bank.slave[i].window(row0, col0, window, window)
            try:
                dr, da, q = estimate_shift(m_patch, s_patch, oversample)
            except DegenerateInputError:
                shifts.append(None)
                quality.append(0.0)
            else:
                shifts.append((dr, da))
                quality.append(q)
        tracks.append(
            VibrationTrack(
                pixel=(int(row), int(col)),
                shifts=tuple(shifts),
                quality=tuple(quality),
            )
        )
    return tracks


def phasor_series(track: VibrationTrack) -> np.ndarray:
    """Complex data vector y(i) = a_i + j b_i of a complete track."""
    if track.error is not None:
        raise AssemblyError(f"track at {track.pixel} failed: {track.error}")
    missing = [i for i, s in enumerate(track.shifts) if s is None]
    if missing:
        raise AssemblyError(f"track at {track.pixel} is missing band indices {missing}")
    return np.array([complex(a, b) for a, b in track.shifts])


def write_tracks_csv(path: str, tracks: Sequence[VibrationTrack]) -> None:
    """Emit tracks as CSV rows: row, col, band_index, a, b, quality."""
    from .slcio import atomic_write_text

    lines = ["row,col,band_index,a,b,quality"]
    for track in tracks:
        for i, (shift, q) in enumerate(zip(track.shifts, track.quality)):
            a, b = ("nan", "nan") if shift is None else (f"{shift[0]:.17g}", f"{shift[1]:.17g}")
            lines.append(f"{track.pixel[0]},{track.pixel[1]},{i},{a},{b},{q:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")
