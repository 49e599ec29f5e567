"""Repeat-pass interferometric products: phase fringes and coherence.

The interferometric phase is the per-pixel argument of master times
conjugate slave, wrapped to (-pi, pi].  Coherence is the magnitude of
the windowed normalized cross-correlation, estimated with a boxcar
window whose edge pixels fall back to the valid (clipped) window.  No
phase unwrapping is performed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SlcImage


def _box_sum(arr: np.ndarray, window: int) -> np.ndarray:
    """Sum over a window x window box, clipped at the raster edges."""
    half = window // 2
    rows, cols = arr.shape
    integral = np.zeros((rows + 1, cols + 1), dtype=arr.dtype)
    integral[1:, 1:] = np.cumsum(np.cumsum(arr, axis=0), axis=1)
    r = np.arange(rows)
    c = np.arange(cols)
    r_lo = np.clip(r - half, 0, rows)[:, None]
    r_hi = np.clip(r + half + 1, 0, rows)[:, None]
    c_lo = np.clip(c - half, 0, cols)[None, :]
    c_hi = np.clip(c + half + 1, 0, cols)[None, :]
    return (
        integral[r_hi, c_hi]
        - integral[r_lo, c_hi]
        - integral[r_hi, c_lo]
        + integral[r_lo, c_lo]
    )


def interferogram(master: SlcImage, slave: SlcImage) -> np.ndarray:
    """Wrapped interferometric phase arg(master * conj(slave))."""
    if master.shape != slave.shape:
        raise ValueError(f"image shapes differ: {master.shape} vs {slave.shape}")
    return np.angle(master.data * np.conj(slave.data))


def coherence(master: SlcImage, slave: SlcImage, window: int = 5):
    """Windowed coherence raster in [0, 1] plus a zero-energy flag mask.

    |sum m conj(s)| / sqrt(sum |m|^2 * sum |s|^2) over the window; a
    window without energy in either image gets coherence 0 and a raised
    flag.
    """
    if master.shape != slave.shape:
        raise ValueError(f"image shapes differ: {master.shape} vs {slave.shape}")
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be an odd size >= 3, got {window}")
    cross = _box_sum(master.data * np.conj(slave.data), window)
    power_m = _box_sum(np.abs(master.data) ** 2, window).real
    power_s = _box_sum(np.abs(slave.data) ** 2, window).real
    denom = np.sqrt(power_m * power_s)
    zero_energy = denom == 0.0
    coh = np.zeros(master.shape, dtype=np.float64)
    np.divide(np.abs(cross), denom, out=coh, where=~zero_energy)
    return np.clip(coh, 0.0, 1.0), zero_energy


@dataclass(frozen=True)
class Interferogram:
    """Phase and coherence rasters of one repeat-pass pair."""

    phase: np.ndarray
    coherence: np.ndarray
    window: int
    zero_energy: np.ndarray

    def __post_init__(self):
        for name in ("phase", "coherence", "zero_energy"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def make_interferogram(master: SlcImage, slave: SlcImage, window: int = 5) -> Interferogram:
    phase = interferogram(master, slave)
    coh, flags = coherence(master, slave, window)
    return Interferogram(phase=phase, coherence=coh, window=window, zero_energy=flags)
