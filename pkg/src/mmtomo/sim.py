"""Point-target SLC synthesis and the 2D spectral transform pair.

The focused response of a stationary point target is modeled as a
separable product of cardinal sines,

    amplitude * exp(-j 4 pi r / lambda)
              * sinc(b_r (k - k0)) * sinc(b_D (x - x0)),

with ``sinc`` the normalized cardinal sine (first null one resolution
cell from the peak) and ``b_r``/``b_D`` the normalized bandwidths in
cycles/sample.  Its 2D spectrum is a flat rectangle over the occupied
band times a linear phase ramp proportional to the peak coordinates,
which is what the sub-aperture and coregistration stages exploit.

Moving targets are rendered through the residual phase left after
matched filtering against the stationary reference: a constant range
velocity displaces the azimuth peak by ``-R0 * v_r / V`` meters, while
azimuth velocity or range acceleration leave a residual quadratic phase
across the aperture that smears the azimuth mainlobe.  Vibrating
targets encode a slow-time displacement trajectory as phase ramps that
vary across the Doppler spectrum, so that master/slave sub-aperture
pairs observe the trajectory sampled at their band centers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    MotionParams,
    OscillatorParams,
    RadarConfig,
    RasterError,
    SceneTarget,
    SlcImage,
    doppler_bandwidth,
    range_resolution,
    synthetic_aperture_length,
)
from . import oscillator as osc_mod

_SLOW_TARGET_FRACTION = 0.1
_CHIRP_QUADRATURE_NODES = 16384


class OutOfBoundsError(ValueError):
    """Target placed outside the raster footprint."""


class SimulationError(RuntimeError):
    """Non-finite trajectory or other synthesis failure."""


@dataclass(frozen=True)
class EpsilonTriple:
    """Dimensionless motion anomalies of the moving-target range model.

    eps_r1 = v_r / V, eps_r2 = a_r * R0 / V**2, eps_c1 = v_a / V.
    """

    eps_r1: float
    eps_r2: float
    eps_c1: float


@dataclass(frozen=True)
class RasterGeometry:
    """Sample spacings and normalized bandwidths of a synthesis run."""

    range_spacing: float
    azimuth_spacing: float
    range_bandwidth: float    # cycles/sample
    doppler_bandwidth: float  # cycles/sample
    aperture_length: float    # m
    n_pulses: int


def raster_geometry(
    cfg: RadarConfig,
    n_pulses: Optional[int] = None,
    range_oversample: float = 1.25,
    azimuth_oversample: float = 1.25,
) -> RasterGeometry:
    """Derive raster spacings from the configuration.

    Sample spacings are the physical resolutions divided by the
    oversampling factors, which makes the normalized bandwidths exactly
    ``1/oversample`` in both axes.
    """
    if range_oversample < 1.0 or azimuth_oversample < 1.0:
        raise ValueError("oversampling factors must be >= 1")
    n = cfg.n_pulses() if n_pulses is None else int(n_pulses)
    aperture = synthetic_aperture_length(cfg, n)
    delta_az = cfg.wavelength_radar * cfg.reference_range / (2.0 * aperture)
    delta_rg = range_resolution(cfg)
    return RasterGeometry(
        range_spacing=delta_rg / range_oversample,
        azimuth_spacing=delta_az / azimuth_oversample,
        range_bandwidth=1.0 / range_oversample,
        doppler_bandwidth=1.0 / azimuth_oversample,
        aperture_length=aperture,
        n_pulses=n,
    )


def _target_samples(target: SceneTarget, geom: RasterGeometry, rows: int, cols: int):
    k0 = target.range_position / geom.range_spacing
    x0 = target.azimuth_position / geom.azimuth_spacing
    if not (0.0 <= k0 <= rows - 1 and 0.0 <= x0 <= cols - 1):
        raise OutOfBoundsError(
            f"target at sample ({k0:.2f}, {x0:.2f}) lies outside the "
            f"{rows}x{cols} raster"
        )
    return k0, x0


def _carrier_phase(cfg: RadarConfig, target: SceneTarget) -> complex:
    r = cfg.reference_range + target.range_position
    return np.exp(-4j * np.pi * r / cfg.wavelength_radar)


def synthesize_slc(
    cfg: RadarConfig,
    targets: Sequence[SceneTarget],
    rows: int,
    cols: int,
    n_pulses: Optional[int] = None,
    range_oversample: float = 1.25,
    azimuth_oversample: float = 1.25,
) -> SlcImage:
    """Render stationary point targets as separable sinc responses.

    Any motion or oscillator attached to the targets is ignored here;
    use :func:`synthesize_scene` to dispatch on target kind.  An empty
    target list yields an all-zero raster.
    """
    if rows < 8 or cols < 8:
        raise RasterError(f"raster must be at least 8x8, got {rows}x{cols}")
    geom = raster_geometry(cfg, n_pulses, range_oversample, azimuth_oversample)
    k = np.arange(rows, dtype=np.float64)[:, None]
    x = np.arange(cols, dtype=np.float64)[None, :]
    data = np.zeros((rows, cols), dtype=np.complex128)
    for target in targets:
        k0, x0 = _target_samples(target, geom, rows, cols)
        profile_r = np.sinc(geom.range_bandwidth * (k - k0))
        profile_a = np.sinc(geom.doppler_bandwidth * (x - x0))
        data += target.amplitude * _carrier_phase(cfg, target) * profile_r * profile_a
    return SlcImage(
        data=data,
        range_spacing=geom.range_spacing,
        azimuth_spacing=geom.azimuth_spacing,
        doppler_band=(0.0, geom.doppler_bandwidth),
        range_band=(0.0, geom.range_bandwidth),
        wavelength=cfg.wavelength_radar,
    )


# ---------------------------------------------------------------------------
# 2D spectrum


def spectrum_2d(img: SlcImage) -> SlcImage:
    """Centered, unitary 2D spectrum of an image (DC at the array center)."""
    spec = np.fft.fftshift(np.fft.fft2(img.data, norm="ortho"))
    return img.with_data(spec)


def inverse_spectrum_2d(spec: SlcImage) -> SlcImage:
    """Inverse of :func:`spectrum_2d`."""
    data = np.fft.ifft2(np.fft.ifftshift(spec.data), norm="ortho")
    return spec.with_data(data)


def centered_freqs(n: int) -> np.ndarray:
    """Normalized frequency of each bin of a centered spectrum."""
    return np.fft.fftshift(np.fft.fftfreq(n))


def band_bins(n: int, band) -> np.ndarray:
    """Indices of the centered-spectrum bins inside a (center, width) band.

    Membership is half-open, ``center - width/2 <= f < center + width/2``,
    so adjacent bands partition their union without double-counting.
    """
    center, width = band
    freqs = centered_freqs(n)
    return np.nonzero((freqs >= center - width / 2) & (freqs < center + width / 2))[0]


def apply_subpixel_shift(img: SlcImage, shift_range: float, shift_azimuth: float) -> SlcImage:
    """Displace an image by (possibly fractional) samples.

    Implemented as an exact spectral phase ramp, so there is no
    interpolation error budget; the shift is circular across raster
    edges.
    """
    fk = np.fft.fftfreq(img.rows)[:, None]
    fx = np.fft.fftfreq(img.cols)[None, :]
    ramp = np.exp(-2j * np.pi * (fk * shift_range + fx * shift_azimuth))
    data = np.fft.ifft2(np.fft.fft2(img.data) * ramp)
    return img.with_data(data)


# ---------------------------------------------------------------------------
# Moving-target range model


def range_history(cfg: RadarConfig, m: MotionParams, t) -> np.ndarray:
    """Expanded range history of a moving target.

    R0 - v_r*t - a_r*t**2/2 + V**2*t**2/(2*R0) - V*v_a*t**2/R0; the
    cubic azimuth-acceleration term is dropped (it is negligible over
    the apertures of interest).  Returns R0 exactly at t = 0.
    """
    t = np.asarray(t, dtype=np.float64)
    _check_time(cfg, t)
    v, r0 = cfg.platform_velocity, cfg.reference_range
    return (
        r0
        - m.v_r * t
        - 0.5 * m.a_r * t**2
        + v**2 * t**2 / (2.0 * r0)
        - v * m.v_a * t**2 / r0
    )


def exact_range_history(cfg: RadarConfig, m: MotionParams, t) -> np.ndarray:
    """Exact square-root range history (kept as the oracle of record)."""
    t = np.asarray(t, dtype=np.float64)
    _check_time(cfg, t)
    s_r = m.v_r * t + 0.5 * m.a_r * t**2
    s_a = m.v_a * t + 0.5 * m.a_a * t**2
    v, r0 = cfg.platform_velocity, cfg.reference_range
    return np.sqrt((v * t - s_a) ** 2 + (r0 - s_r) ** 2)


def _check_time(cfg: RadarConfig, t: np.ndarray) -> None:
    half = cfg.acquisition_duration / 2.0
    if np.any(np.abs(t) > half * (1.0 + 1e-12)):
        raise ValueError(f"|t| must not exceed half the acquisition duration ({half} s)")


def motion_epsilons(cfg: RadarConfig, m: MotionParams) -> EpsilonTriple:
    """Dimensionless anomaly parameters of the expanded range history."""
    v = cfg.platform_velocity
    if max(abs(m.v_r), abs(m.v_a)) >= _SLOW_TARGET_FRACTION * v:
        warnings.warn(
            "target velocity exceeds 10% of the platform velocity; the "
            "slow-mover expansion degrades",
            RuntimeWarning,
            stacklevel=2,
        )
    return EpsilonTriple(
        eps_r1=m.v_r / v,
        eps_r2=m.a_r * cfg.reference_range / v**2,
        eps_c1=m.v_a / v,
    )


def azimuth_displacement(cfg: RadarConfig, m: MotionParams) -> float:
    """Azimuth peak displacement -R0*v_r/V in meters.

    The sign follows the image azimuth axis convention of this package;
    a target closing in range appears displaced toward lower column
    indices.
    """
    return -cfg.reference_range * m.v_r / cfg.platform_velocity


def synthesize_moving_target(
    cfg: RadarConfig,
    target: SceneTarget,
    rows: int,
    cols: int,
    n_pulses: Optional[int] = None,
    range_oversample: float = 1.25,
    azimuth_oversample: float = 1.25,
) -> SlcImage:
    """Focused image of a moving point target under a stationary matched filter.

    With all-zero motion this is bitwise identical to
    :func:`synthesize_slc`.  Pure range velocity yields an exactly
    shifted sinc; azimuth velocity or range acceleration leave a
    residual quadratic phase that is integrated numerically across the
    aperture, producing the characteristic mainlobe smearing.  Range
    walk is not modeled (it stays far below a range cell for slow
    movers over the supported apertures).
    """
    m = target.motion or MotionParams()
    if m.is_zero():
        return synthesize_slc(
            cfg, [target], rows, cols, n_pulses, range_oversample, azimuth_oversample
        )
    if rows < 8 or cols < 8:
        raise RasterError(f"raster must be at least 8x8, got {rows}x{cols}")
    eps = motion_epsilons(cfg, m)
    kappa = (1.0 - eps.eps_c1) ** 2 - eps.eps_r2
    shifted = SceneTarget(
        range_position=target.range_position,
        azimuth_position=target.azimuth_position + azimuth_displacement(cfg, m),
        amplitude=target.amplitude,
    )
    if kappa == 1.0:
        return synthesize_slc(
            cfg, [shifted], rows, cols, n_pulses, range_oversample, azimuth_oversample
        )

    geom = raster_geometry(cfg, n_pulses, range_oversample, azimuth_oversample)
    k0, x0 = _target_samples(shifted, geom, rows, cols)
    # Residual quadratic phase across the normalized aperture u in
    # [-1/2, 1/2]; at kappa == 1 the integral collapses to the sinc.
    chirp = np.pi * (1.0 - kappa) * geom.aperture_length * (
        2.0 * geom.aperture_length / (cfg.wavelength_radar * cfg.reference_range)
    )
    nodes = (np.arange(_CHIRP_QUADRATURE_NODES) + 0.5) / _CHIRP_QUADRATURE_NODES - 0.5
    weights = np.exp(1j * chirp * nodes**2) / _CHIRP_QUADRATURE_NODES
    x = np.arange(cols, dtype=np.float64)
    response = np.empty(cols, dtype=np.complex128)
    step = 64  # bounds the cols x nodes scratch matrix
    for lo in range(0, cols, step):
        hi = min(lo + step, cols)
        phases = np.exp(
            -2j * np.pi * geom.doppler_bandwidth * np.outer(x[lo:hi] - x0, nodes)
        )
        response[lo:hi] = phases @ weights
    k = np.arange(rows, dtype=np.float64)[:, None]
    profile_r = np.sinc(geom.range_bandwidth * (k - k0))
    data = target.amplitude * _carrier_phase(cfg, target) * profile_r * response[None, :]
    return SlcImage(
        data=data,
        range_spacing=geom.range_spacing,
        azimuth_spacing=geom.azimuth_spacing,
        doppler_band=(0.0, geom.doppler_bandwidth),
        range_band=(0.0, geom.range_bandwidth),
        wavelength=cfg.wavelength_radar,
    )


# ---------------------------------------------------------------------------
# Vibrating targets


def _oscillator_shifts(
    osc: OscillatorParams, times: np.ndarray, omega0: Optional[float]
) -> np.ndarray:
    w0 = osc_mod.natural_frequency(osc) if omega0 is None else float(omega0)
    return osc_mod.closed_form(osc, w0, times)


def _require_finite_shifts(shifts: np.ndarray) -> np.ndarray:
    shifts = np.asarray(shifts, dtype=np.float64)
    if shifts.ndim != 2 or shifts.shape[1] != 2:
        raise SimulationError(f"shift trajectory must have shape (n, 2), got {shifts.shape}")
    if not np.all(np.isfinite(shifts)):
        bad = int(np.nonzero(~np.isfinite(shifts).all(axis=1))[0][0])
        raise SimulationError(f"oscillator trajectory diverged at sample {bad}")
    return shifts


def synthesize_vibrating_pixel_series(
    cfg: RadarConfig,
    target: SceneTarget,
    osc: OscillatorParams,
    n_frames: int,
    rows: int,
    cols: int,
    shifts: Optional[np.ndarray] = None,
    omega0: Optional[float] = None,
    **raster_kwargs,
) -> list:
    """Image series of a point target displaced by an oscillator trajectory.

    Frame i shows the target displaced by the trajectory sampled at the
    midpoint of the i-th of ``n_frames`` equal time slots spanning the
    acquisition.  Displacements are applied as spectral phase ramps
    (sub-sample accurate).  ``shifts`` overrides the closed-form
    trajectory with explicit (range, azimuth) sample offsets per frame.
    """
    if n_frames < 2:
        raise ValueError(f"n_frames must be >= 2, got {n_frames}")
    times = (np.arange(n_frames) + 0.5) * cfg.acquisition_duration / n_frames
    if shifts is None:
        shifts = _oscillator_shifts(osc, times, omega0)
    shifts = _require_finite_shifts(shifts)
    if shifts.shape[0] != n_frames:
        raise SimulationError(f"expected {n_frames} shift samples, got {shifts.shape[0]}")
    base = synthesize_slc(cfg, [target], rows, cols, **raster_kwargs)
    return [apply_subpixel_shift(base, dr, dx) for dr, dx in shifts]


@dataclass(frozen=True)
class VibrationEncoding:
    """Per-bin ground truth of a vibrating-target synthesis.

    ``support_cols`` are the azimuth spectral bins carrying the target
    band (ascending frequency); ``range_shift``/``azimuth_shift`` hold
    the displacement, in samples, encoded on each of those bins.  Tests
    use these arrays as the injected-shift oracle.
    """

    support_cols: np.ndarray
    freqs: np.ndarray
    slot_times: np.ndarray
    range_shift: np.ndarray
    azimuth_shift: np.ndarray


def synthesize_vibrating_slc(
    cfg: RadarConfig,
    target: SceneTarget,
    osc: OscillatorParams,
    rows: int,
    cols: int,
    n_slots: int = 64,
    shifts: Optional[np.ndarray] = None,
    omega0: Optional[float] = None,
    **raster_kwargs,
):
    """Collapse a vibration trajectory into a single SLC.

    The Doppler support of a stationary synthesis is partitioned into
    ``n_slots`` contiguous slots, slot j standing for the j-th of
    ``n_slots`` equal time intervals of the acquisition.  Each slot is
    phase-ramped by the trajectory sampled at its midpoint: range
    displacement as a ramp along the range-frequency axis, azimuth
    displacement as the local slope of a continuous piecewise-linear
    phase along the Doppler axis.  Sub-aperture pairs extracted from the
    result therefore observe the trajectory evaluated around their band
    centers, which is what the multi-chromatic tracking stage measures.

    Returns ``(image, encoding)`` with the per-bin ground truth.
    """
    if n_slots < 2:
        raise ValueError(f"n_slots must be >= 2, got {n_slots}")
    times = (np.arange(n_slots) + 0.5) * cfg.acquisition_duration / n_slots
    if shifts is None:
        shifts = _oscillator_shifts(osc, times, omega0)
    shifts = _require_finite_shifts(shifts)
    if shifts.shape[0] != n_slots:
        raise SimulationError(f"expected {n_slots} shift samples, got {shifts.shape[0]}")

    base = synthesize_slc(cfg, [target], rows, cols, **raster_kwargs)
    spec = spectrum_2d(base)
    cols_in_band = band_bins(cols, base.doppler_band)
    if cols_in_band.size < n_slots:
        raise SimulationError(
            f"Doppler support of {cols_in_band.size} bins cannot carry {n_slots} slots"
        )
    slot_of_bin = (np.arange(cols_in_band.size) * n_slots) // cols_in_band.size
    dr_bin = shifts[slot_of_bin, 0]
    dx_bin = shifts[slot_of_bin, 1]

    # Azimuth phase: continuous piecewise-linear with slope -2*pi*dx per
    # bin step, so each band's local group delay is its slot shift.
    dnu = 1.0 / cols
    phase_az = -2.0 * np.pi * dnu * (np.cumsum(dx_bin) - 0.5 * dx_bin)
    f_range = centered_freqs(rows)[:, None]
    ramp = np.exp(1j * (phase_az[None, :] - 2.0 * np.pi * f_range * dr_bin[None, :]))

    data = np.array(spec.data)
    data[:, cols_in_band] *= ramp
    out = inverse_spectrum_2d(spec.with_data(data))
    encoding = VibrationEncoding(
        support_cols=cols_in_band,
        freqs=centered_freqs(cols)[cols_in_band],
        slot_times=times,
        range_shift=dr_bin,
        azimuth_shift=dx_bin,
    )
    return out, encoding


def synthesize_scene(
    cfg: RadarConfig,
    targets: Sequence[SceneTarget],
    rows: int,
    cols: int,
    n_slots: int = 64,
    omega0: Optional[float] = None,
    **raster_kwargs,
) -> SlcImage:
    """Render a mixed scene, dispatching per target on its kind.

    Stationary targets accumulate through :func:`synthesize_slc`;
    targets with motion go through the moving-target model; targets
    with an oscillator are collapsed vibrating responses.
    """
    stationary = [t for t in targets if t.motion is None and t.oscillator is None]
    out = synthesize_slc(cfg, stationary, rows, cols, **raster_kwargs)
    data = np.array(out.data)
    for t in targets:
        if t.motion is not None:
            img = synthesize_moving_target(cfg, t, rows, cols, **raster_kwargs)
            data += img.data
        elif t.oscillator is not None:
            img, _ = synthesize_vibrating_slc(
                cfg, t, t.oscillator, rows, cols, n_slots=n_slots, omega0=omega0,
                **raster_kwargs,
            )
            data += img.data
    return out.with_data(data)
