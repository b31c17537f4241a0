"""Reference states and their exact linear evolution.

The linear generator here is ``H0 = (1/2)(-Lap + omega^2 |x|^2) -
omega*Lz`` with ``Lz = -i (x1 d2 - x2 d1)``.  Its low eigenstates have
closed forms, and a displaced Gaussian evolves as a coherent state
whose center follows the classical equations of motion in the rotating
frame.  Everything downstream of this module is tested against these
states, so the classical orbit is obtained by numerical integration of
the Hamiltonian system (high-order Runge-Kutta, tight tolerances)
rather than from a transcribed closed-form orbit -- that keeps the
check independent of the operator algebra it is meant to validate.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ResolutionTooLow
from .grid import Field, GridSpec, PhysicsParams, gradient_arrays, laplacian_array, _fftn, inner, lp_norm

__all__ = [
    "ground_state",
    "vortex_state",
    "coherent_state",
    "random_smooth_field",
    "make_state",
    "classical_orbit",
    "exact_linear_evolution",
    "generator_apply",
    "generator_expectation",
]

STATE_KINDS = ("ground", "vortex_plus", "vortex_minus", "coherent")


def _gaussian_envelope(grid: GridSpec, omega: float) -> np.ndarray:
    return np.exp(-0.5 * omega * grid.r2)


def _check_resolution(
    grid: GridSpec, omega: float, center: tuple[float, float, float] = (0.0, 0.0, 0.0)
) -> None:
    """Reject grids that cannot represent a trap Gaussian of scale ``1/sqrt(omega)``.

    Two requirements: the +-2 sigma core must span at least six grid
    cells, and the envelope must decay through at least four e-foldings
    between the state's center and the nearest box face.
    """
    sigma = 1.0 / np.sqrt(omega)
    if 4.0 * sigma < 6.0 * grid.h:
        raise ResolutionTooLow(
            f"state core 4*sigma = {4 * sigma:.3g} spans fewer than six grid "
            f"cells (h = {grid.h:.3g}); refine the grid or shrink the box"
        )
    margin = grid.extent - max(abs(c) for c in center)
    if margin <= 0.0 or margin**2 < 8.0 * sigma**2:
        raise ResolutionTooLow(
            f"envelope decays only {max(margin, 0.0) ** 2 / (2 * sigma**2):.2f} "
            "e-foldings between the state center and the box face; "
            "at least four are required"
        )


def ground_state(grid: GridSpec, params: PhysicsParams) -> Field:
    """Normalized trap ground state ``(omega/pi)^(3/4) exp(-omega |x|^2 / 2)``.

    Rotation eigenvalue 0, generator eigenvalue ``3*omega/2``.
    """
    w = params.omega
    _check_resolution(grid, w)
    data = (w / np.pi) ** 0.75 * _gaussian_envelope(grid, w)
    return Field(grid, data.astype(np.complex128))


def vortex_state(grid: GridSpec, params: PhysicsParams, charge: int = +1) -> Field:
    """Normalized single vortex ``sqrt(omega) (omega/pi)^(3/4) (x1 +/- i x2) exp(-omega |x|^2 / 2)``.

    ``charge = +1`` has rotation eigenvalue +1 and generator eigenvalue
    ``3*omega/2`` (the rotation term cancels one trap quantum);
    ``charge = -1`` has rotation eigenvalue -1 and generator eigenvalue
    ``7*omega/2``.
    """
    if charge not in (+1, -1):
        raise ValueError(f"vortex charge must be +1 or -1, got {charge}")
    w = params.omega
    _check_resolution(grid, w)
    data = (
        np.sqrt(w)
        * (w / np.pi) ** 0.75
        * (grid.x1 + 1j * charge * grid.x2)
        * _gaussian_envelope(grid, w)
    )
    return Field(grid, data)


def coherent_state(
    grid: GridSpec,
    params: PhysicsParams,
    center: tuple[float, float, float],
    kick: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> Field:
    """Displaced, momentum-kicked ground state ``exp(i p.x) phi0(x - a)``."""
    a = np.asarray(center, dtype=float)
    p = np.asarray(kick, dtype=float)
    if a.shape != (3,) or p.shape != (3,):
        raise ValueError("center and kick must be 3-vectors")
    kmax = np.pi / grid.h
    if np.max(np.abs(p)) > 0.5 * kmax:
        raise ResolutionTooLow(
            f"coherent-state kick {p} exceeds half the grid Nyquist wavenumber {kmax:.3g}"
        )
    w = params.omega
    _check_resolution(grid, w, tuple(a))
    shifted = (
        (grid.x1 - a[0]) ** 2 + (grid.x2 - a[1]) ** 2 + (grid.x3 - a[2]) ** 2
    )
    phase = p[0] * grid.x1 + p[1] * grid.x2 + p[2] * grid.x3
    data = (w / np.pi) ** 0.75 * np.exp(-0.5 * w * shifted) * np.exp(1j * phase)
    return Field(grid, data)


def random_smooth_field(
    grid: GridSpec,
    rng: np.random.Generator,
    k_cut: float | None = None,
    width: float | None = None,
) -> Field:
    """Normalized random field: band-limited noise under a Gaussian envelope.

    ``k_cut`` is the hard spectral cutoff (default: a third of the
    Nyquist wavenumber); ``width`` the envelope scale (default:
    ``extent / 3``).  Deterministic for a given generator state.
    """
    n = grid.n
    kmax = np.pi / grid.h
    if k_cut is None:
        k_cut = kmax / 3.0
    if k_cut <= 0 or k_cut > kmax:
        raise ResolutionTooLow(f"k_cut {k_cut:.3g} outside (0, {kmax:.3g}]")
    if width is None:
        width = grid.extent / 3.0
    noise_hat = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
    k = grid.freq
    mask = (
        (np.abs(k).reshape(n, 1, 1) <= k_cut)
        & (np.abs(k).reshape(1, n, 1) <= k_cut)
        & (np.abs(k).reshape(1, 1, n) <= k_cut)
    )
    from scipy import fft as _sfft

    data = _sfft.ifftn(noise_hat * mask, norm="ortho")
    data *= np.exp(-0.5 * grid.r2 / width**2)
    f = Field(grid, data)
    scale = lp_norm(f, 2)
    if scale == 0.0:
        raise ValueError("random field degenerated to zero")
    return Field(grid, f.data / scale)


def make_state(grid: GridSpec, params: PhysicsParams, kind: str, **kwargs) -> Field:
    """Build a named reference state (``ground``, ``vortex_plus``, ...)."""
    if kind == "ground":
        return ground_state(grid, params)
    if kind == "vortex_plus":
        return vortex_state(grid, params, +1)
    if kind == "vortex_minus":
        return vortex_state(grid, params, -1)
    if kind == "coherent":
        return coherent_state(
            grid,
            params,
            kwargs.get("center", (1.0, 0.0, 0.0)),
            kwargs.get("kick", (0.0, 0.0, 0.0)),
        )
    raise ValueError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")


# --------------------------------------------------------------------------
# classical orbit and exact evolutions
# --------------------------------------------------------------------------


def classical_orbit(
    params: PhysicsParams,
    center: tuple[float, float, float],
    kick: tuple[float, float, float],
    times: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate the rotating-frame Hamiltonian system for a point particle.

    Equations of motion (the rotation couples the transverse pairs)::

        q1' = p1 + omega*q2      p1' = -omega^2 q1 + omega*p2
        q2' = p2 - omega*q1      p2' = -omega^2 q2 - omega*p1
        q3' = p3                 p3' = -omega^2 q3

    together with the action integral ``theta' = (omega^2 |q|^2 - |p|^2)/2``
    that fixes the coherent state's global phase.  Returns arrays
    ``q[len(times), 3]``, ``p[len(times), 3]``, ``theta[len(times)]``.
    """
    w = params.omega
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise ValueError("times must be non-empty")
    if np.any(times < 0):
        raise ValueError("orbit times must be >= 0")

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        q = y[0:3]
        p = y[3:6]
        dq = np.array([p[0] + w * q[1], p[1] - w * q[0], p[2]])
        dp = np.array([-w**2 * q[0] + w * p[1], -w**2 * q[1] - w * p[0], -w**2 * q[2]])
        dtheta = 0.5 * (w**2 * np.dot(q, q) - np.dot(p, p))
        return np.concatenate([dq, dp, [dtheta]])

    y0 = np.concatenate([np.asarray(center, float), np.asarray(kick, float), [0.0]])
    order = np.argsort(times)
    sorted_times = times[order]
    t_end = float(sorted_times[-1])
    if t_end == 0.0:
        sol_y = np.tile(y0[:, None], (1, times.size))
    else:
        sol = solve_ivp(
            rhs,
            (0.0, t_end),
            y0,
            method="DOP853",
            t_eval=sorted_times,
            rtol=1e-12,
            atol=1e-14,
        )
        if not sol.success:
            raise RuntimeError(f"orbit integration failed: {sol.message}")
        sol_y = np.empty((7, times.size))
        sol_y[:, order] = sol.y
    q = sol_y[0:3].T.copy()
    p = sol_y[3:6].T.copy()
    theta = sol_y[6].copy()
    return q, p, theta


def exact_linear_evolution(
    grid: GridSpec,
    params: PhysicsParams,
    kind: str,
    t: float,
    center: tuple[float, float, float] = (1.0, 0.0, 0.0),
    kick: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> Field:
    """Closed-form solution of the linear flow at time ``t`` for a named state.

    Eigenstates pick up pure phases (``exp(-i*3*omega*t/2)`` for the
    ground state and the charge +1 vortex, ``exp(-i*7*omega*t/2)`` for
    the charge -1 vortex).  The coherent state follows its classical
    orbit with the ground-state phase times the integrated action.
    """
    w = params.omega
    if kind == "ground":
        base = ground_state(grid, params)
        return Field(grid, np.exp(-1.5j * w * t) * base.data)
    if kind == "vortex_plus":
        base = vortex_state(grid, params, +1)
        return Field(grid, np.exp(-1.5j * w * t) * base.data)
    if kind == "vortex_minus":
        base = vortex_state(grid, params, -1)
        return Field(grid, np.exp(-3.5j * w * t) * base.data)
    if kind == "coherent":
        q, p, theta = classical_orbit(params, center, kick, np.array([t]))
        moving = coherent_state(grid, params, tuple(q[0]), tuple(p[0]))
        return Field(grid, np.exp(-1.5j * w * t + 1j * theta[0]) * moving.data)
    raise ValueError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")


# --------------------------------------------------------------------------
# brute-force generator, for residual checks
# --------------------------------------------------------------------------


def generator_apply(f: Field, params: PhysicsParams) -> Field:
    """Apply the linear generator ``(1/2)(-Lap + omega^2 |x|^2) - omega*Lz``."""
    grid = f.grid
    w = params.omega
    data_hat = _fftn(f.data)
    lap = laplacian_array(grid, f.data, data_hat)
    d1, d2, _ = gradient_arrays(grid, f.data, data_hat)
    lz = -1j * (grid.x1 * d2 - grid.x2 * d1)
    out = -0.5 * lap + 0.5 * w**2 * grid.r2 * f.data - w * lz
    return Field(grid, out)


def generator_expectation(f: Field, params: PhysicsParams) -> float:
    """Rayleigh quotient of the linear generator on ``f``."""
    hf = generator_apply(f, params)
    nrm = lp_norm(f, 2)
    return float(np.real(inner(f, hf)) / nrm**2)
