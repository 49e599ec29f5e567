"""Shared domain types and resolution arithmetic.

Conventions used throughout the package:

* Rasters are indexed ``[k, x]`` with rows = range samples (k) and
  columns = azimuth samples (x).
* Spectral frequencies are normalized to cycles/sample and span
  ``[-0.5, 0.5)`` per axis.  A band is a ``(center, width)`` pair in
  those units; the occupied support is ``[center - width/2,
  center + width/2)``.
* The Doppler bandwidth of an acquisition, ``4*N*d / (wavelength * r)``,
  is a spatial frequency in cycles per meter of along-track position.
  Its reciprocal is the azimuth resolution in meters, so
  ``azimuth_resolution * doppler_bandwidth == 1`` for a fixed pulse
  count.

All types are immutable after construction (raster buffers are marked
read-only) and all operations are pure functions, so everything here is
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

SPEED_OF_LIGHT = 299792458.0


class InvalidConfigError(ValueError):
    """Raised when a radar configuration violates its invariants."""


class RasterError(ValueError):
    """Raised when raster dimensions or metadata are inconsistent."""


@dataclass(frozen=True)
class RadarConfig:
    """Platform and waveform geometry driving synthesis and resolutions.

    ``reference_range`` doubles as the zero-Doppler distance and the
    slant range at mid-aperture; the acquisition model in this package
    does not distinguish the two (they coincide for a target at the
    scene center, and the differences are absorbed by the per-target
    range coordinate).

    ``pulse_spacing`` is the along-track distance between pulses and is
    pinned to ``platform_velocity / prf``.  Pass it explicitly only to
    assert the value; a mismatch raises.
    """

    wavelength_radar: float      # m, electromagnetic carrier
    chirp_bandwidth: float       # Hz
    prf: float                   # Hz
    platform_velocity: float     # m/s
    reference_range: float       # m
    antenna_length: float        # m
    incidence_angle: float       # rad, in (0, pi/2)
    acquisition_duration: float  # s
    pulse_spacing: Optional[float] = None  # m, defaults to V / prf

    def __post_init__(self):
        positive = {
            "wavelength_radar": self.wavelength_radar,
            "chirp_bandwidth": self.chirp_bandwidth,
            "prf": self.prf,
            "platform_velocity": self.platform_velocity,
            "reference_range": self.reference_range,
            "antenna_length": self.antenna_length,
            "acquisition_duration": self.acquisition_duration,
        }
        for name, value in positive.items():
            if not np.isfinite(value) or value <= 0.0:
                raise InvalidConfigError(f"{name} must be strictly positive, got {value!r}")
        if not 0.0 < self.incidence_angle < np.pi / 2:
            raise InvalidConfigError(
                f"incidence_angle must lie in (0, pi/2), got {self.incidence_angle!r}"
            )
        derived = self.platform_velocity / self.prf
        if self.pulse_spacing is None:
            object.__setattr__(self, "pulse_spacing", derived)
        elif abs(self.pulse_spacing - derived) > 1e-9 * derived:
            raise InvalidConfigError(
                f"pulse_spacing {self.pulse_spacing!r} inconsistent with "
                f"platform_velocity/prf = {derived!r}"
            )

    @property
    def pulse_interval(self) -> float:
        """Pulse repetition interval in seconds (always 1/prf)."""
        return 1.0 / self.prf

    def n_pulses(self) -> int:
        """Pulse count over the full acquisition."""
        return int(round(self.prf * self.acquisition_duration))

    def with_duration(self, duration: float) -> "RadarConfig":
        return replace(self, acquisition_duration=duration, pulse_spacing=None)


def default_config(wavelength: float = 0.031) -> RadarConfig:
    """Spaceborne X-band stripmap defaults used by the CLI and tests.

    The wavelength is not part of the published acquisition sheet, so it
    must always be stated; 0.031 m (X band) is the shipped default.  The
    PRT implied by these numbers is 0.5 ms (1/prf); the PRF is the
    authoritative quantity.
    """
    return RadarConfig(
        wavelength_radar=wavelength,
        chirp_bandwidth=250e6,
        prf=2000.0,
        platform_velocity=7000.0,
        reference_range=650000.0,
        antenna_length=6.0,
        incidence_angle=np.deg2rad(30.0),
        acquisition_duration=5.0,
    )


def synthetic_aperture_length(cfg: RadarConfig, n_pulses: int) -> float:
    """Synthetic aperture length 2*N*d in meters for a pulse count N."""
    if n_pulses < 2:
        raise ValueError(f"n_pulses must be >= 2, got {n_pulses}")
    return 2.0 * n_pulses * cfg.pulse_spacing


def doppler_bandwidth(cfg: RadarConfig, n_pulses: int) -> float:
    """Doppler bandwidth 4*N*d/(wavelength*r) in cycles per meter.

    Doubles when the pulse count doubles.  Multiply by an azimuth
    sample spacing to get the normalized (cycles/sample) bandwidth of a
    raster sampled at that spacing.
    """
    if n_pulses < 2:
        raise ValueError(f"n_pulses must be >= 2, got {n_pulses}")
    return (4.0 * n_pulses * cfg.pulse_spacing) / (
        cfg.wavelength_radar * cfg.reference_range
    )


def azimuth_resolution(cfg: RadarConfig, synthetic_aperture: float) -> float:
    """Azimuth resolution wavelength*R/(2*L_sa) in meters.

    Monotonically decreasing in the aperture length.  The same formula
    with a sound wavelength gives the depth resolution of the
    vibration tomography (see :mod:`mmtomo.tomo`).
    """
    if synthetic_aperture <= 0.0:
        raise ValueError(f"synthetic_aperture must be > 0, got {synthetic_aperture!r}")
    return cfg.wavelength_radar * cfg.reference_range / (2.0 * synthetic_aperture)


def range_resolution(cfg: RadarConfig) -> float:
    """Slant-range resolution c/(2*B) in meters."""
    return SPEED_OF_LIGHT / (2.0 * cfg.chirp_bandwidth)


def _validate_band(band, name: str):
    center, width = float(band[0]), float(band[1])
    if not (np.isfinite(center) and np.isfinite(width)) or width < 0.0:
        raise RasterError(f"{name} must be a finite (center, width>=0) pair, got {band!r}")
    if width > 1.0 + 1e-12:
        raise RasterError(f"{name} width {width!r} exceeds the sampling band")
    return (center, width)


@dataclass(frozen=True)
class SlcImage:
    """Complex raster with sample spacings and spectral-band metadata.

    ``doppler_band`` describes the occupied azimuth (column) spectrum,
    ``range_band`` the range (row) spectrum, both as ``(center, width)``
    in cycles/sample.  ``wavelength`` records the carrier of the
    synthesizing configuration and rides along mostly for the file
    header.
    """

    data: np.ndarray
    range_spacing: float    # m per row
    azimuth_spacing: float  # m per column
    doppler_band: tuple = (0.0, 1.0)
    range_band: tuple = (0.0, 1.0)
    wavelength: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise RasterError(f"data must be a non-empty 2D raster, got shape {arr.shape}")
        if self.range_spacing <= 0.0 or self.azimuth_spacing <= 0.0:
            raise RasterError("sample spacings must be strictly positive")
        object.__setattr__(self, "doppler_band", _validate_band(self.doppler_band, "doppler_band"))
        object.__setattr__(self, "range_band", _validate_band(self.range_band, "range_band"))
        arr = arr.copy() if not arr.flags.owndata or arr.flags.writeable else arr
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def with_data(self, data: np.ndarray, **band_overrides) -> "SlcImage":
        """New image sharing this one's metadata but holding ``data``."""
        kwargs = dict(
            range_spacing=self.range_spacing,
            azimuth_spacing=self.azimuth_spacing,
            doppler_band=self.doppler_band,
            range_band=self.range_band,
            wavelength=self.wavelength,
        )
        kwargs.update(band_overrides)
        return SlcImage(data=data, **kwargs)

    def window(self, row0: int, col0: int, rows: int, cols: int) -> "SlcImage":
        """Crop a window; band metadata is inherited unchanged."""
        if row0 < 0 or col0 < 0 or row0 + rows > self.rows or col0 + cols > self.cols:
            raise RasterError(
                f"window [{row0}:{row0 + rows}, {col0}:{col0 + cols}] exceeds "
                f"raster shape {self.shape}"
            )
        return self.with_data(self.data[row0:row0 + rows, col0:col0 + cols])

    def energy(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))


@dataclass(frozen=True)
class MotionParams:
    """Constant-velocity/acceleration target motion in the slant plane.

    The expansion behind the moving-target model assumes the target is
    much slower than the platform; velocities beyond 10% of the platform
    speed trigger a warning rather than an error.
    """

    v_r: float = 0.0  # m/s, range velocity (positive shortens the range)
    v_a: float = 0.0  # m/s, azimuth velocity
    a_r: float = 0.0  # m/s^2, range acceleration
    a_a: float = 0.0  # m/s^2, azimuth acceleration

    def __post_init__(self):
        for name in ("v_r", "v_a", "a_r", "a_a"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def is_zero(self) -> bool:
        return self.v_r == 0.0 and self.v_a == 0.0 and self.a_r == 0.0 and self.a_a == 0.0


@dataclass(frozen=True)
class OscillatorParams:
    """Spring-mass parameters of the per-pixel vibration model.

    ``damping`` is the velocity-damping coefficient of the equation of
    motion (named to avoid any collision with the radar wavelength).
    ``shift_a``/``shift_b`` are the range/azimuth oscillation amplitudes
    in image samples; they feed the closed-form trajectory used by the
    vibrating-target synthesizers.
    """

    spring_length: float          # m, length at maximum tension
    rest_length: float            # m, unloaded length
    elastic_constant: float       # N/m
    mass: float                   # kg
    damping: float = 0.0          # 1/s
    shift_a: float = 0.0          # samples, range amplitude
    shift_b: float = 0.0          # samples, azimuth amplitude

    def __post_init__(self):
        if self.spring_length <= 0.0:
            raise ValueError("spring_length must be > 0")
        if not 0.0 <= self.rest_length <= self.spring_length:
            raise ValueError("rest_length must lie in [0, spring_length]")
        if self.mass <= 0.0:
            raise ValueError("mass must be > 0")
        if self.damping < 0.0:
            raise ValueError("damping must be >= 0")


@dataclass(frozen=True)
class SceneTarget:
    """Point target placed at metric coordinates within the raster.

    Positions are meters from the raster origin (sample ``[0, 0]``);
    they map to sample coordinates through the image spacings and may be
    fractional.  ``amplitude`` is the peak complex magnitude of the
    focused response; the constant pulse-count/pulse-duration prefactor
    of the compression model is absorbed into it.
    """

    range_position: float
    azimuth_position: float
    amplitude: float = 1.0
    motion: Optional[MotionParams] = None
    oscillator: Optional[OscillatorParams] = None

    def __post_init__(self):
        if not (np.isfinite(self.range_position) and np.isfinite(self.azimuth_position)):
            raise ValueError("target positions must be finite")
        if not np.isfinite(self.amplitude) or self.amplitude < 0.0:
            raise ValueError("amplitude must be finite and >= 0")
