"""Spring-mass vibration model of a resolution cell.

A point mass hangs from a stretched spring of maximum-tension length L,
unloaded length L0 and elastic constant xi.  The exact transverse
restoring force is

    F(r) = -4 xi r (1 - L0 / sqrt(L^2 + 4 r^2)),

whose small-displacement expansion is a cubic (Duffing-type) force.
The linearized rate is omega0 = sqrt((4 xi / m) (L - L0) / L); the
bracketed quantity has units of omega0**2, so the oscillation rate is
its square root.  With damping and below the nonlinear regime the
trajectory reduces to the two-degree-of-freedom closed form

    r(t) = (a cos(omega0 t), b sin(omega0 t)) * exp(-damping t / 2),

whose samples across sub-apertures are exactly the phasor series that
the tomographic stage inverts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import OscillatorParams

__all__ = [
    "OscillatorParams",
    "Trajectory",
    "DivergenceError",
    "InvalidParamsError",
    "restoring_force",
    "cubic_force",
    "natural_frequency",
    "xi_nonlinear",
    "integrate",
    "closed_form",
    "write_trajectory_csv",
]


class InvalidParamsError(ValueError):
    pass


class DivergenceError(RuntimeError):
    """Integration produced a non-finite state."""


def restoring_force(p: OscillatorParams, r) -> np.ndarray:
    """Exact transverse restoring force, odd in r and zero at r = 0."""
    r = np.asarray(r, dtype=np.float64)
    return -4.0 * p.elastic_constant * r * (
        1.0 - p.rest_length / np.sqrt(p.spring_length**2 + 4.0 * r**2)
    )


def cubic_force(p: OscillatorParams, r) -> np.ndarray:
    """Cubic approximation of :func:`restoring_force` for |r| << L.

    F = -4 xi (L - L0)(r/L) [1 + (2 L0/(L - L0)) (r/L)^2]

    For L == L0 the bracketed factor degenerates; the L -> L0 limit
    -8 xi L0 (r/L)^3 is returned instead and a warning is emitted, since
    the motion is then dominated by the nonlinearity.
    """
    r = np.asarray(r, dtype=np.float64)
    length, rest, xi = p.spring_length, p.rest_length, p.elastic_constant
    if np.any(np.abs(r) >= length):
        raise ValueError("cubic force expansion requires |r| < spring_length")
    rel = r / length
    if length == rest:
        warnings.warn(
            "spring_length == rest_length: returning the degenerate cubic limit",
            RuntimeWarning,
            stacklevel=2,
        )
        return -8.0 * xi * rest * rel**3
    return -4.0 * xi * (length - rest) * rel * (
        1.0 + (2.0 * rest / (length - rest)) * rel**2
    )


def natural_frequency(p: OscillatorParams) -> float:
    """Linearized oscillation rate sqrt((4 xi / m) (L - L0) / L) in rad/s."""
    if p.spring_length <= p.rest_length:
        raise InvalidParamsError("natural frequency requires spring_length > rest_length")
    return float(
        np.sqrt(
            (4.0 * p.elastic_constant / p.mass)
            * (p.spring_length - p.rest_length)
            / p.spring_length
        )
    )


def xi_nonlinear(p: OscillatorParams) -> float:
    """Nonlinearity coefficient (2 L0 / L^2)(L - L0) of the cubic term.

    Distinct from the elastic constant, which the restoring-force
    expressions call xi as well.
    """
    return (
        2.0
        * p.rest_length
        / p.spring_length**2
        * (p.spring_length - p.rest_length)
    )


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step integration result; arrays are read-only."""

    t: np.ndarray        # (n,)
    r: np.ndarray        # (n, 2) displacement
    v: np.ndarray        # (n, 2) velocity

    def __post_init__(self):
        for name in ("t", "r", "v"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def integrate(
    p: OscillatorParams,
    forcing: Optional[Callable[[float], np.ndarray]],
    t_span: float,
    dt: float,
    r0: Optional[np.ndarray] = None,
    v0: Optional[np.ndarray] = None,
) -> Trajectory:
    """Integrate r'' + damping r' + omega0^2 (1 + xi_nl |r|^2) r = f(t).

    Classic fixed-step 4th-order Runge-Kutta; the fixed step keeps runs
    bitwise reproducible.  ``forcing`` maps time to a 2-vector (None
    means unforced).  Initial conditions default to the closed-form
    start ``r(0) = (shift_a, 0)``, ``v(0) = (0, omega0 * shift_b)``, so
    an unforced, undamped, linear run reproduces the closed form.

    The step must satisfy dt * omega0 < 0.1 (accuracy contract of the
    fixed-step scheme).
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if t_span <= 0.0:
        raise ValueError("t_span must be > 0")
    w0 = natural_frequency(p)
    if dt * w0 >= 0.1:
        raise ValueError(f"dt*omega0 = {dt * w0:.3f} violates the accuracy contract (< 0.1)")
    xi_nl = xi_nonlinear(p)
    lam = p.damping
    w0sq = w0 * w0

    r = np.array([p.shift_a, 0.0], dtype=np.float64) if r0 is None else np.array(r0, dtype=np.float64)
    v = np.array([0.0, w0 * p.shift_b], dtype=np.float64) if v0 is None else np.array(v0, dtype=np.float64)

    def accel(t: float, rr: np.ndarray, vv: np.ndarray) -> np.ndarray:
        a = -lam * vv - w0sq * (1.0 + xi_nl * (rr @ rr)) * rr
        if forcing is not None:
            a = a + np.asarray(forcing(t), dtype=np.float64)
        return a

    n_steps = int(round(t_span / dt))
    t_out = np.arange(n_steps + 1) * dt
    r_out = np.empty((n_steps + 1, 2))
    v_out = np.empty((n_steps + 1, 2))
    r_out[0], v_out[0] = r, v
    for i in range(n_steps):
        t = t_out[i]
        k1r = v
        k1v = accel(t, r, v)
        k2r = v + 0.5 * dt * k1v
        k2v = accel(t + 0.5 * dt, r + 0.5 * dt * k1r, k2r)
        k3r = v + 0.5 * dt * k2v
        k3v = accel(t + 0.5 * dt, r + 0.5 * dt * k2r, k3r)
        k4r = v + dt * k3v
        k4v = accel(t + dt, r + dt * k3r, k4r)
        r = r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise DivergenceError(f"state became non-finite at step {i + 1} (t = {t + dt:.6g} s)")
        r_out[i + 1], v_out[i + 1] = r, v
    return Trajectory(t=t_out, r=r_out, v=v_out)


def closed_form(p: OscillatorParams, omega0: float, t) -> np.ndarray:
    """Damped two-degree-of-freedom trajectory sampled at t.

    (a cos(omega0 t), b sin(omega0 t)) * exp(-damping t / 2) with
    (a, b) = (shift_a, shift_b).  Scalar t gives shape (2,), an array of
    n times gives (n, 2).
    """
    t_arr = np.asarray(t, dtype=np.float64)
    envelope = np.exp(-p.damping * t_arr / 2.0)
    out = np.stack(
        [
            p.shift_a * np.cos(omega0 * t_arr) * envelope,
            p.shift_b * np.sin(omega0 * t_arr) * envelope,
        ],
        axis=-1,
    )
    return out


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    """Emit a trajectory as CSV with columns t, r_x, r_y."""
    from .slcio import atomic_write_text

    lines = ["t,r_x,r_y"]
    for t, (rx, ry) in zip(traj.t, traj.r):
        lines.append(f"{t:.17g},{rx:.17g},{ry:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")
