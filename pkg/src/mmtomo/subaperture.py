"""Master/slave Doppler sub-aperture decomposition.

Half of the Doppler band (by default) is held back from the matched
filter as sensitivity margin; the retained width is split into a lower
(master) and upper (slave) half, and that rigid master/slave pair is
stepped across the margin in ``n_steps`` equal shifts.  Extracting each
band from the image spectrum yields an ordered bank of reduced-azimuth-
resolution image pairs whose band centers sweep the acquisition in
slow time: the raw material of the multi-chromatic vibration analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .core import SlcImage
from .sim import band_bins, inverse_spectrum_2d, spectrum_2d


class AllocationError(ValueError):
    """Band plan does not fit inside the available Doppler support."""


@dataclass(frozen=True)
class BandPlan:
    """Doppler band allocation for a sub-aperture bank.

    Bands are (center, width) pairs in the spectral units of the image
    the plan is built for (cycles/sample).  ``master[i]`` and
    ``slave[i]`` are the lower and upper halves of the retained width,
    both rigidly shifted by ``i * step`` from the low edge of the
    support; consecutive centers differ by exactly ``step``.
    """

    full_doppler_width: float
    full_doppler_center: float
    reserved_width: float
    n_steps: int
    step: float
    master: tuple  # of (center, width)
    slave: tuple   # of (center, width)

    @property
    def half_band_width(self) -> float:
        return self.master[0][1]

    def master_centers(self) -> np.ndarray:
        return np.array([band[0] for band in self.master])

    def slave_centers(self) -> np.ndarray:
        return np.array([band[0] for band in self.slave])


def allocate_bands(
    full_doppler_width: float,
    n_steps: int,
    reserved_fraction: float = 0.5,
    full_doppler_center: float = 0.0,
) -> BandPlan:
    """Plan the master/slave band ladder inside a Doppler support.

    ``reserved_fraction`` is the share of the support left out of the
    matched filter (default one half); the retained remainder is the
    rigid master+slave width and the reserve is swept in ``n_steps``
    equal shifts of ``step = width * (1 - reserved_fraction) / n_steps``.
    """
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    if not 0.0 < reserved_fraction < 1.0:
        raise ValueError(
            f"reserved_fraction must lie strictly in (0, 1), got {reserved_fraction!r}"
        )
    if full_doppler_width <= 0.0:
        raise ValueError("full_doppler_width must be > 0")

    retained = full_doppler_width * (1.0 - reserved_fraction)
    step = retained / n_steps
    half = retained / 2.0
    low = full_doppler_center - full_doppler_width / 2.0
    high = full_doppler_center + full_doppler_width / 2.0

    master, slave = [], []
    for i in range(n_steps):
        base = low + i * step
        m_band = (base + half / 2.0, half)
        s_band = (base + 1.5 * half, half)
        for name, band in (("master", m_band), ("slave", s_band)):
            lo_edge = band[0] - band[1] / 2.0
            hi_edge = band[0] + band[1] / 2.0
            if lo_edge < low - 1e-12 or hi_edge > high + 1e-12:
                raise AllocationError(
                    f"{name} band {i} [{lo_edge:.6g}, {hi_edge:.6g}] exceeds the "
                    f"Doppler support [{low:.6g}, {high:.6g}]"
                )
        master.append(m_band)
        slave.append(s_band)

    return BandPlan(
        full_doppler_width=full_doppler_width,
        full_doppler_center=full_doppler_center,
        reserved_width=full_doppler_width * reserved_fraction,
        n_steps=n_steps,
        step=step,
        master=tuple(master),
        slave=tuple(slave),
    )


def plan_for_image(img: SlcImage, n_steps: int, reserved_fraction: float = 0.5) -> BandPlan:
    """Band plan matched to an image's Doppler band metadata."""
    center, width = img.doppler_band
    return allocate_bands(width, n_steps, reserved_fraction, center)


def extract_subaperture(spec: SlcImage, band, taper: bool = False) -> SlcImage:
    """Re-image one Doppler band of a centered spectrum.

    Bins outside the band are zeroed and the result inverse-transformed;
    the output's ``doppler_band`` is set to the requested (center,
    width), so its azimuth resolution is coarser than the parent's by
    the width ratio.  Extraction is rectangular (no taper) by default,
    matching the flat spectral model; ``taper`` applies a raised cosine
    across the band.
    """
    center, width = float(band[0]), float(band[1])
    if width <= 0.0:
        raise ValueError(f"band width must be > 0, got {width!r}")
    if center - width / 2.0 < -0.5 - 1e-12 or center + width / 2.0 > 0.5 + 1e-12:
        raise ValueError(f"band {band!r} exceeds the spectral axis [-0.5, 0.5)")
    cols = spec.cols
    keep = band_bins(cols, (center, width))
    if keep.size == 0:
        raise ValueError(f"band {band!r} covers no spectral bins of a {cols}-column raster")
    data = np.zeros_like(spec.data)
    data[:, keep] = spec.data[:, keep]
    if taper:
        ramp = np.linspace(0.0, 1.0, keep.size, endpoint=False) + 0.5 / keep.size
        data[:, keep] *= 0.5 - 0.5 * np.cos(2.0 * np.pi * ramp)
    img = inverse_spectrum_2d(spec.with_data(data))
    return img.with_data(img.data, doppler_band=(center, width))


@dataclass(frozen=True)
class SubApertureBank:
    """Ordered master/slave sub-aperture image pairs plus their plan."""

    master: tuple  # of SlcImage, ascending band center
    slave: tuple   # of SlcImage
    plan: BandPlan

    def __post_init__(self):
        if len(self.master) != self.plan.n_steps or len(self.slave) != self.plan.n_steps:
            raise ValueError("bank lists must match the plan's n_steps")
        shape = self.master[0].shape
        for img in (*self.master, *self.slave):
            if img.shape != shape:
                raise ValueError("all bank rasters must share one shape")

    @property
    def size(self) -> int:
        return self.plan.n_steps


def build_bank(slc: SlcImage, plan: BandPlan) -> SubApertureBank:
    """Decompose a full-resolution SLC into its planned sub-aperture bank."""
    if abs(slc.doppler_band[1] - plan.full_doppler_width) > 1e-9 or abs(
        slc.doppler_band[0] - plan.full_doppler_center
    ) > 1e-9:
        raise ValueError(
            f"plan was allocated for Doppler band "
            f"({plan.full_doppler_center}, {plan.full_doppler_width}) but the image "
            f"carries {slc.doppler_band}"
        )
    spec = spectrum_2d(slc)
    master = tuple(extract_subaperture(spec, band) for band in plan.master)
    slave = tuple(extract_subaperture(spec, band) for band in plan.slave)
    return SubApertureBank(master=master, slave=slave, plan=plan)
