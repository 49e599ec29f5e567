"""Depth focusing of per-pixel vibration phasors.

The k-entry phasor series of a pixel is modeled as the response of
sources distributed along depth: a source at depth z contributes
``exp(j kz_i z)`` to entry i, with the vertical wavenumber

    kz_i = 4 pi B_i / (lambda_s * r * sin(theta))

driven by a per-entry synthetic baseline B_i, the sound wavelength
lambda_s, the slant range and the incidence angle.  Baselines are
assigned uniformly over [0, aperture], which makes the steering matrix
a discrete Fourier kernel: matched-mode inversion (conjugate transpose
over k) is then exactly a DFT evaluated on the depth grid, and the
depth resolution follows the aperture law lambda_s * R / (2 * A).  A
ridge-regularized least-squares mode is provided as the alternative
reading of the pseudo-inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import SlcImage
from .coreg import phasor_series, track_pixels
from .subaperture import BandPlan, build_bank


class IllConditionedError(RuntimeError):
    """Normal matrix is numerically singular; re-run with reg > 0."""


def resolution(sound_wavelength: float, slant_range: float, aperture: float) -> float:
    """Depth resolution lambda_s * R / (2 * A) in meters."""
    if sound_wavelength <= 0.0 or slant_range <= 0.0 or aperture <= 0.0:
        raise ValueError("sound_wavelength, slant_range and aperture must all be > 0")
    return sound_wavelength * slant_range / (2.0 * aperture)


def wavenumbers(
    baselines: Sequence[float],
    sound_wavelength: float,
    slant_range: float,
    incidence: float,
) -> np.ndarray:
    """Vertical wavenumbers 4*pi*B/(lambda_s * r * sin(theta)), rad/m."""
    if sound_wavelength <= 0.0:
        raise ValueError("sound_wavelength must be > 0")
    if slant_range <= 0.0:
        raise ValueError("slant_range must be > 0")
    if not 0.0 < incidence < np.pi / 2:
        raise ValueError(f"incidence must lie in (0, pi/2), got {incidence!r}")
    baselines = np.asarray(baselines, dtype=np.float64)
    return 4.0 * np.pi * baselines / (sound_wavelength * slant_range * np.sin(incidence))


def uniform_baselines(aperture: float, k: int) -> np.ndarray:
    """Synthetic baselines spanning [0, aperture] uniformly.

    The zero first baseline puts an all-ones row at the top of the
    steering matrix, and the uniform spacing is what turns matched-mode
    inversion into a plain DFT over depth.
    """
    if k < 2:
        raise ValueError(f"at least 2 baselines are required, got {k}")
    if aperture <= 0.0:
        raise ValueError("aperture must be > 0")
    return np.linspace(0.0, aperture, k)


@dataclass(frozen=True)
class SteeringMatrix:
    """Complex k x F matrix with entries exp(j kz_i z_f).

    Depth is positive downward.  ``baselines`` and the geometry fields
    are populated when the matrix was built from an acquisition
    geometry and are informational otherwise.
    """

    kz: np.ndarray        # (k,) rad/m
    z_grid: np.ndarray    # (F,) m, strictly increasing
    matrix: np.ndarray    # (k, F)
    baselines: Optional[np.ndarray] = None
    sound_wavelength: Optional[float] = None
    slant_range: Optional[float] = None
    incidence: Optional[float] = None

    def __post_init__(self):
        for name in ("kz", "z_grid", "matrix"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.z_grid.size > 1 and np.any(np.diff(self.z_grid) <= 0.0):
            raise ValueError("z_grid must be strictly increasing")
        if self.matrix.shape != (self.kz.size, self.z_grid.size):
            raise ValueError("matrix shape must be (len(kz), len(z_grid))")

    @property
    def k(self) -> int:
        return self.kz.size

    @property
    def depths(self) -> int:
        return self.z_grid.size


def steering(kz: Sequence[float], z_grid: Sequence[float], **geometry) -> SteeringMatrix:
    """Build the steering matrix for given wavenumbers and depth grid."""
    kz = np.asarray(kz, dtype=np.float64)
    z_grid = np.asarray(z_grid, dtype=np.float64)
    if kz.size == 0 or z_grid.size == 0:
        raise ValueError("kz and z_grid must be non-empty")
    matrix = np.exp(1j * np.outer(kz, z_grid))
    return SteeringMatrix(kz=kz, z_grid=z_grid, matrix=matrix, **geometry)


def forward(a: SteeringMatrix, h: Sequence[complex]) -> np.ndarray:
    """Data vector Y = A h of a depth reflectivity profile."""
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (a.depths,):
        raise ValueError(f"h must have length {a.depths}, got shape {h.shape}")
    return a.matrix @ h


def invert(
    a: SteeringMatrix,
    y: Sequence[complex],
    mode: str = "matched",
    reg: float = 0.0,
) -> np.ndarray:
    """Focus a data vector along depth.

    ``matched`` applies the conjugate transpose scaled by 1/k — the
    Fourier reading of the inversion, exact pulse compression for
    uniformly spaced wavenumbers.  ``pinv`` solves the ridge-regularized
    normal equations (A^H A + reg I) h = A^H y.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (a.k,):
        raise ValueError(f"y must have length {a.k}, got shape {y.shape}")
    ah = a.matrix.conj().T
    if mode == "matched":
        return ah @ y / a.k
    if mode == "pinv":
        gram = ah @ a.matrix
        if reg > 0.0:
            gram = gram + reg * np.eye(a.depths)
        elif np.linalg.cond(gram) > 1e12:
            raise IllConditionedError(
                "normal matrix is numerically singular; pass reg > 0"
            )
        return np.linalg.solve(gram, ah @ y)
    raise ValueError(f"unknown inversion mode {mode!r} (expected 'matched' or 'pinv')")


@dataclass(frozen=True)
class TomoGeometry:
    """Acquisition geometry mapped onto the synthetic baseline ladder."""

    aperture: float          # m, maximum synthetic baseline
    sound_speed: float       # m/s
    frequency: float         # Hz, investigation frequency
    slant_range: float       # m
    incidence: float         # rad

    def __post_init__(self):
        for name in ("aperture", "sound_speed", "frequency", "slant_range"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.incidence < np.pi / 2:
            raise ValueError("incidence must lie in (0, pi/2)")

    @property
    def sound_wavelength(self) -> float:
        return self.sound_speed / self.frequency

    def depth_resolution(self) -> float:
        return resolution(self.sound_wavelength, self.slant_range, self.aperture)

    def steering_for(self, k: int, z_grid: Sequence[float]) -> SteeringMatrix:
        baselines = uniform_baselines(self.aperture, k)
        kz = wavenumbers(baselines, self.sound_wavelength, self.slant_range, self.incidence)
        return steering(
            kz,
            z_grid,
            baselines=baselines,
            sound_wavelength=self.sound_wavelength,
            slant_range=self.slant_range,
            incidence=self.incidence,
        )


@dataclass(frozen=True)
class Tomogram:
    """|h(z)| over a depth grid for each pixel of a tomographic line."""

    line_pixels: tuple
    z_grid: np.ndarray
    magnitude: np.ndarray            # (n_pixels, F)
    h_complex: Optional[np.ndarray] = None
    failed: tuple = ()               # indices of pixels that yielded no track

    def __post_init__(self):
        for name in ("z_grid", "magnitude"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_pixels(self) -> int:
        return len(self.line_pixels)


def build_tomogram(
    slc: SlcImage,
    line: Sequence[Tuple[int, int]],
    plan: BandPlan,
    geometry: TomoGeometry,
    z_grid: Sequence[float],
    mode: str = "matched",
    reg: float = 0.0,
    window: int = 32,
    oversample: int = 16,
) -> Tomogram:
    """Full per-pixel pipeline: bank, tracking, phasors, depth focusing.

    A pixel whose tracking fails contributes a flagged all-zero column
    instead of aborting the tomogram.  The depth grid must sample at or
    below half the depth resolution.
    """
    z_grid = np.asarray(z_grid, dtype=np.float64)
    line = [(int(r), int(c)) for r, c in line]
    if len(line) == 0:
        return Tomogram(line_pixels=(), z_grid=z_grid, magnitude=np.zeros((0, z_grid.size)))
    if z_grid.size > 1:
        spacing = float(np.max(np.diff(z_grid)))
        nyquist = geometry.depth_resolution() / 2.0
        if spacing > nyquist * (1.0 + 1e-9):
            raise ValueError(
                f"z_grid spacing {spacing:.4g} m exceeds half the depth "
                f"resolution ({nyquist:.4g} m)"
            )
    a = geometry.steering_for(plan.n_steps, z_grid)
    bank = build_bank(slc, plan)
    tracks = track_pixels(bank, line, window=window, oversample=oversample)
    magnitude = np.zeros((len(line), z_grid.size))
    h_all = np.zeros((len(line), z_grid.size), dtype=np.complex128)
    failed = []
    for idx, track in enumerate(tracks):
        if not track.complete():
            failed.append(idx)
            continue
        h = invert(a, phasor_series(track), mode=mode, reg=reg)
        h_all[idx] = h
        magnitude[idx] = np.abs(h)
    return Tomogram(
        line_pixels=tuple(line),
        z_grid=z_grid,
        magnitude=magnitude,
        h_complex=h_all,
        failed=tuple(failed),
    )
