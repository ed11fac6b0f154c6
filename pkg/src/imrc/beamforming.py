"""Relay zero-forcing beamforming and the resulting effective channel.

For user i the relay's (scaled) beam vector t_i0 must cancel the residual
cross interference at the unintended receiver j,

    h_ij + hRj . t_i0 = 0,

while spending exactly the user's relay power share,

    ||t_i0||^2 = rho_i * PR / (P - p_i).

Geometrically that intersects a line with a circle: two solutions, labeled
by the branch sign n_i. Writing the solution as the line's closest point to
the origin plus a signed displacement along the line direction gives

    t_i0 = (-h_ij * hRj + n_i * sqrt(radicand) * [hRj2, -hRj1]) / ||hRj||^2,
    radicand = -h_ij^2 + ||hRj||^2 * rho_i*PR/(P - p_i),

valid for every nonzero hRj (no special case for a zero component).

At the boundary p_i = P the source spends nothing on the repeated message,
the relay alone carries it, and zero forcing degenerates to orthogonality:
t_i0 = n_i * sqrt(rho_i*PR) * (unit vector perpendicular to hRj), giving the
abundant-relay-power gain |hRi . t_i0|^2 = rho_i*PR*det^2(H)/||hRj||^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRelayChannel, InfeasibleRadicand, LinearizationInfeasible
from .model import (RADICAND_RTOL, ChannelSetup, PowerAllocation,
                    linear_radicand, user_links)

__all__ = [
    "BeamVectors",
    "EffectiveChannel",
    "beam_vector",
    "boundary_beam_vector",
    "beam_vectors",
    "effective_gains",
    "zero_forcing_residual",
    "approx_beam_vector",
]


@dataclass(frozen=True)
class BeamVectors:
    """Both users' scaled beam vectors plus which construction was used."""

    t10: tuple[float, float]
    t20: tuple[float, float]
    boundary1: bool
    boundary2: bool


@dataclass(frozen=True)
class EffectiveChannel:
    """Gains of the equivalent interference channel after beamforming.
    Cross gains are untouched: f12 = h12 and f21 = h21 exactly."""

    f11: float
    f22: float
    f12: float
    f21: float


def _solve_zero_forcing(h_cross: float, hRj: tuple[float, float],
                        norm2_target: float, sign: int) -> np.ndarray:
    """Intersect the zero-forcing line with the ||t||^2 = norm2_target circle."""
    norm2 = hRj[0] ** 2 + hRj[1] ** 2
    if norm2 == 0.0:
        raise DegenerateRelayChannel("relay-to-receiver vector is zero")
    scale = norm2 * norm2_target
    radicand = -h_cross ** 2 + scale
    if radicand < -RADICAND_RTOL * abs(scale):
        raise InfeasibleRadicand(
            f"zero-forcing infeasible: radicand {radicand:.3e} < 0 "
            f"(cross gain {h_cross}, power budget {norm2_target:.3e})")
    root = math.sqrt(max(radicand, 0.0))
    return np.array([
        (-h_cross * hRj[0] + sign * root * hRj[1]) / norm2,
        (-h_cross * hRj[1] - sign * root * hRj[0]) / norm2,
    ])


def beam_vector(setup: ChannelSetup, alloc: PowerAllocation, user: int) -> np.ndarray:
    """Scaled beam vector t_i0 for `user` with p_i < P.

    Satisfies h_ij + hRj.t_i0 = 0 and ||t_i0||^2 = rho_i*PR/(P - p_i);
    the branch is chosen by the allocation's sign n_i.
    """
    h_cross, hRj, _, rho_i, n_i, p_i = user_links(setup, alloc, user)
    if p_i > setup.P:
        raise ValueError(f"p{user} = {p_i} exceeds the power budget P = {setup.P}")
    if p_i >= setup.P:
        raise ValueError(
            f"p{user} = P is the boundary case; use boundary_beam_vector")
    return _solve_zero_forcing(h_cross, hRj, rho_i * setup.PR / (setup.P - p_i), n_i)


def boundary_beam_vector(setup: ChannelSetup, rho_i: float, user: int,
                         sign: int = 1) -> np.ndarray:
    """Beam vector for the p_i = P boundary: orthogonal to hRj with
    ||t_i0||^2 = rho_i*PR. The default sign +1 picks the orientation with
    hRi . t_i0 >= 0 (coherent with the direct link)."""
    if user == 1:
        hRj, hRi = setup.hR2, setup.hR1
    elif user == 2:
        hRj, hRi = setup.hR1, setup.hR2
    else:
        raise ValueError(f"user must be 1 or 2, got {user}")
    norm2 = hRj[0] ** 2 + hRj[1] ** 2
    if norm2 == 0.0:
        raise DegenerateRelayChannel("relay-to-receiver vector is zero")
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    unit = np.array([hRj[1], -hRj[0]]) / math.sqrt(norm2)
    if hRi[0] * unit[0] + hRi[1] * unit[1] < 0.0:
        unit = -unit
    return sign * math.sqrt(rho_i * setup.PR) * unit


def beam_vectors(setup: ChannelSetup, alloc: PowerAllocation) -> BeamVectors:
    """Both users' beam vectors, dispatching to the boundary construction
    for any user with p_i = P."""
    out = {}
    flags = {}
    for user in (1, 2):
        _, _, _, rho_i, n_i, p_i = user_links(setup, alloc, user)
        if p_i >= setup.P:
            if p_i > setup.P:
                raise ValueError(
                    f"p{user} = {p_i} exceeds the power budget P = {setup.P}")
            vec = boundary_beam_vector(setup, rho_i, user, n_i)
            flags[user] = True
        else:
            vec = beam_vector(setup, alloc, user)
            flags[user] = False
        out[user] = (float(vec[0]), float(vec[1]))
    return BeamVectors(out[1], out[2], flags[1], flags[2])


def effective_gains(setup: ChannelSetup, alloc: PowerAllocation,
                    vectors: BeamVectors | None = None) -> EffectiveChannel:
    """Effective gains after beamforming: f_ii = h_ii + hRi.t_i0 away from
    the boundary; at p_i = P the source contributes nothing to the repeated
    message, so f_ii = hRi.t_i0 alone."""
    if vectors is None:
        vectors = beam_vectors(setup, alloc)
    relay1 = setup.hR1[0] * vectors.t10[0] + setup.hR1[1] * vectors.t10[1]
    relay2 = setup.hR2[0] * vectors.t20[0] + setup.hR2[1] * vectors.t20[1]
    f11 = relay1 if vectors.boundary1 else setup.h11 + relay1
    f22 = relay2 if vectors.boundary2 else setup.h22 + relay2
    return EffectiveChannel(f11=f11, f22=f22, f12=setup.h12, f21=setup.h21)


def zero_forcing_residual(setup: ChannelSetup, alloc: PowerAllocation,
                          user: int) -> float:
    """Leftover interference at the unintended receiver: h_ij + hRj.t_i0
    away from the boundary, hRj.t_i0 at it. Zero up to rounding by
    construction; exposed for tests and diagnostics."""
    vectors = beam_vectors(setup, alloc)
    h_cross, hRj, _, _, _, _ = user_links(setup, alloc, user)
    t = vectors.t10 if user == 1 else vectors.t20
    boundary = vectors.boundary1 if user == 1 else vectors.boundary2
    projection = hRj[0] * t[0] + hRj[1] * t[1]
    return projection if boundary else h_cross + projection


def approx_beam_vector(setup: ChannelSetup, alloc: PowerAllocation,
                       user: int) -> np.ndarray:
    """First-order (in p_i/P) approximation of beam_vector, obtained by
    expanding the square root around p_i = 0:

        sqrt(radicand(p_i)) ~ S_i + ||hRj||^2 * rho_i*PR * p_i / (2 P^2 S_i),

    with S_i the p_i = 0 value. Exact at p_i = 0; a rough approximation as
    p_i approaches P."""
    h_cross, hRj, _, rho_i, n_i, p_i = user_links(setup, alloc, user)
    norm2 = hRj[0] ** 2 + hRj[1] ** 2
    if norm2 == 0.0:
        raise DegenerateRelayChannel("relay-to-receiver vector is zero")
    s_sq = linear_radicand(setup, rho_i, user)
    if s_sq <= 0.0:
        raise LinearizationInfeasible(
            f"low-power expansion undefined for user {user}: S^2 = {s_sq:.3e} <= 0")
    s_i = math.sqrt(s_sq)
    root = s_i + norm2 * rho_i * setup.PR * p_i / (2.0 * setup.P ** 2 * s_i)
    return np.array([
        (-h_cross * hRj[0] + n_i * root * hRj[1]) / norm2,
        (-h_cross * hRj[1] - n_i * root * hRj[0]) / norm2,
    ])
