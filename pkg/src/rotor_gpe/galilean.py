"""Dressed Galilean operators adapted to the rotating trap.

In a resonantly rotating harmonic trap the usual Galilean generators
``-i grad`` and ``omega x`` are dressed by trigonometric rotation
factors.  With ``theta = omega*t`` and the twisted companions (the same
twist that appears in the propagator kernel's phase)::

    x_twist    = (-x2, x1, tan(theta/2) * x3)
    grad_twist = (-d2, d1, tan(theta/2) * d3)

the dressed momentum and dressed position act as::

    J(t) u = omega*sin(theta) * (cos(theta) x + sin(theta) x_twist) u
             - i*cos(theta)   * (cos(theta) grad + sin(theta) grad_twist) u
    H(t) u = omega*cos(theta) * (cos(theta) x + sin(theta) x_twist) u
             + i*sin(theta)   * (cos(theta) grad + sin(theta) grad_twist) u

so ``J(0) = -i grad`` and ``H(0) = omega x``.  Both intertwine with the
linear propagator: ``J(t) S(t) u0 = S(t) (-i grad u0)`` and
``H(t) S(t) u0 = S(t) (omega x u0)``.  In the third component the mixed
coefficient collapses by the half-angle identity,
``cos(theta) + sin(theta) tan(theta/2) = 1``, so the axial parts reduce
to the plain 1D harmonic generators
``J_3 = omega sin(theta) x3 - i cos(theta) d3`` and
``H_3 = omega cos(theta) x3 + i sin(theta) d3``, regular on the whole
window.

Each operator also factors through a quadratic chirp: with
``M(t) = exp(-i omega |x|^2 tan(theta)/2)`` and
``Q(t) = exp(+i omega |x|^2 cot(theta)/2)``::

    J(t) = -i cos(theta) * M(t) (cos(theta) grad + sin(theta) grad_rot) M(-t)
    H(t) = +i sin(theta) * Q(t) (cos(theta) grad + sin(theta) grad_rot) Q(-t)

The Q factorization does not exist at t = 0 (the cotangent diverges).

Only the third components fail to commute with the transverse rotation
structure; the resulting corrections are the axial defect operators::

    O_J(t) u = 2i omega^2 sin^2(theta) x3 u + 2 omega sin(theta) cos(theta) d3 u
    O_H(t) u = 2i omega^2 sin(theta) cos(theta) x3 u - 2 omega sin^2(theta) d3 u

which are exactly proportional to the third dressed components with one
shared constant: ``O_J = 2i omega sin(theta) J_3`` and
``O_H = 2i omega sin(theta) H_3``.
"""

from __future__ import annotations

import numpy as np

from .errors import QFactorizationSingular
from .grid import Field, GridSpec, PhysicsParams, gradient_arrays, _fftn

__all__ = [
    "angular_momentum",
    "galilean_momentum",
    "galilean_position",
    "galilean_momentum_chirped",
    "galilean_position_chirped",
    "momentum_defect",
    "position_defect",
    "chirp_pair",
]


def angular_momentum(f: Field) -> Field:
    """Apply the axial angular momentum ``Lz = -i (x1 d2 - x2 d1)``."""
    grid = f.grid
    d1, d2, _ = gradient_arrays(grid, f.data)
    return Field(grid, -1j * (grid.x1 * d2 - grid.x2 * d1))


def _dressed_arrays(
    f: Field,
    t: float,
    params: PhysicsParams,
    derivs: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Shared kernel of both dressed operators.

    Returns ``(mix_x, mix_d)`` where ``mix_x[j] = (cos x + sin x_twist)_j f``
    and ``mix_d[j] = (cos grad + sin grad_twist)_j f``.  The third
    coefficient ``cos + sin*tan(theta/2)`` is identically 1 (half-angle
    identity), so it is not spelled out.
    """
    grid = f.grid
    theta = params.omega * t
    c, s = np.cos(theta), np.sin(theta)
    d1, d2, d3 = derivs if derivs is not None else gradient_arrays(grid, f.data)
    u = f.data
    mix_x = [
        (c * grid.x1 - s * grid.x2) * u,
        (c * grid.x2 + s * grid.x1) * u,
        grid.x3 * u,
    ]
    mix_d = [
        c * d1 - s * d2,
        c * d2 + s * d1,
        d3,
    ]
    return mix_x, mix_d


def galilean_momentum(
    f: Field,
    t: float,
    params: PhysicsParams,
    derivs: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> tuple[Field, Field, Field]:
    """Apply the dressed momentum ``J(t)`` componentwise.

    ``derivs`` may carry precomputed spectral partials of ``f.data`` to
    share transforms with other diagnostics.
    """
    theta = params.omega * t
    c, s = np.cos(theta), np.sin(theta)
    mix_x, mix_d = _dressed_arrays(f, t, params, derivs)
    w = params.omega
    return tuple(
        Field(f.grid, w * s * mix_x[j] - 1j * c * mix_d[j]) for j in range(3)
    )


def galilean_position(
    f: Field,
    t: float,
    params: PhysicsParams,
    derivs: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> tuple[Field, Field, Field]:
    """Apply the dressed position ``H(t)`` componentwise."""
    theta = params.omega * t
    c, s = np.cos(theta), np.sin(theta)
    mix_x, mix_d = _dressed_arrays(f, t, params, derivs)
    w = params.omega
    return tuple(
        Field(f.grid, w * c * mix_x[j] + 1j * s * mix_d[j]) for j in range(3)
    )


# --------------------------------------------------------------------------
# chirp factorizations
# --------------------------------------------------------------------------


def chirp_pair(grid: GridSpec, params: PhysicsParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic chirp multipliers ``(M(t), Q(t))`` on the grid.

    ``M(t) = exp(-i omega |x|^2 tan(omega t)/2)`` and
    ``Q(t) = exp(+i omega |x|^2 cot(omega t)/2)``.  Raises
    :class:`QFactorizationSingular` where the cotangent blows up
    (``sin(omega t) = 0``, in particular t = 0) and ``ValueError`` where
    the tangent does (``cos(omega t) = 0``).
    """
    theta = params.omega * t
    s, c = np.sin(theta), np.cos(theta)
    if abs(s) < 1e-300:
        raise QFactorizationSingular(
            f"cotangent chirp undefined at t = {t!r} (sin(omega*t) = 0)"
        )
    if abs(c) < 1e-300:
        raise ValueError(f"tangent chirp undefined at t = {t!r} (cos(omega*t) = 0)")
    w = params.omega
    m_phase = np.exp(-0.5j * w * (s / c) * grid.r2)
    q_phase = np.exp(+0.5j * w * (c / s) * grid.r2)
    return m_phase, q_phase


def _carrier_derivatives(f: Field, theta: float) -> list[np.ndarray]:
    """Apply ``cos(theta) grad + sin(theta) grad_twist`` to a field's data."""
    c, s = np.cos(theta), np.sin(theta)
    d1, d2, d3 = gradient_arrays(f.grid, f.data)
    return [c * d1 - s * d2, c * d2 + s * d1, d3]


def galilean_momentum_chirped(f: Field, t: float, params: PhysicsParams) -> tuple[Field, Field, Field]:
    """Dressed momentum via the tangent-chirp factorization (regular at t = 0)."""
    grid = f.grid
    theta = params.omega * t
    c = np.cos(theta)
    if abs(c) < 1e-300:
        raise ValueError(f"tangent chirp undefined at t = {t!r}")
    w = params.omega
    m_phase = np.exp(-0.5j * w * np.tan(theta) * grid.r2)
    inner_field = Field(grid, np.conj(m_phase) * f.data)  # M(-t) f
    carried = _carrier_derivatives(inner_field, theta)
    return tuple(Field(grid, -1j * c * m_phase * arr) for arr in carried)


def galilean_position_chirped(f: Field, t: float, params: PhysicsParams) -> tuple[Field, Field, Field]:
    """Dressed position via the cotangent-chirp factorization (singular at t = 0)."""
    grid = f.grid
    theta = params.omega * t
    s = np.sin(theta)
    if abs(s) < 1e-300:
        raise QFactorizationSingular(
            f"cotangent chirp undefined at t = {t!r} (sin(omega*t) = 0)"
        )
    w = params.omega
    q_phase = np.exp(0.5j * w * (np.cos(theta) / s) * grid.r2)
    inner_field = Field(grid, np.conj(q_phase) * f.data)  # Q(-t) f
    carried = _carrier_derivatives(inner_field, theta)
    return tuple(Field(grid, 1j * s * q_phase * arr) for arr in carried)


# --------------------------------------------------------------------------
# axial defects
# --------------------------------------------------------------------------


def momentum_defect(
    f: Field,
    t: float,
    params: PhysicsParams,
    d3: np.ndarray | None = None,
) -> Field:
    """Axial commutator defect ``O_J(t)`` of the dressed momentum.

    Only the third component of ``J`` picks up a correction; this
    returns that scalar field,
    ``2i omega^2 sin^2(theta) x3 f + 2 omega sin(theta) cos(theta) d3 f``.
    """
    grid = f.grid
    w = params.omega
    theta = w * t
    c, s = np.cos(theta), np.sin(theta)
    if d3 is None:
        d3 = gradient_arrays(grid, f.data)[2]
    return Field(grid, 2j * w**2 * s**2 * grid.x3 * f.data + 2.0 * w * s * c * d3)


def position_defect(
    f: Field,
    t: float,
    params: PhysicsParams,
    d3: np.ndarray | None = None,
) -> Field:
    """Axial commutator defect ``O_H(t)`` of the dressed position.

    Returns ``2i omega^2 sin(theta) cos(theta) x3 f - 2 omega sin^2(theta) d3 f``.
    """
    grid = f.grid
    w = params.omega
    theta = w * t
    c, s = np.cos(theta), np.sin(theta)
    return Field(
        grid,
        2j * w**2 * s * c * grid.x3 * f.data
        - 2.0 * w * s**2 * (d3 if d3 is not None else gradient_arrays(grid, f.data)[2]),
    )
