"""Brute-force and root-finding oracles.

Everything here is deliberately assumption-free: the grid search evaluates
the exact scheme sum rate at every (p1, p2, rho1, n1, n2) combination
rather than trusting any closed-form shortcut, bisection finds curve
intersections by sign changes alone, and the hull is plain monotone chain.
These are the references the analytical results are checked against.

The per-block evaluation (fixed rho1 and signs, all power pairs at once)
mirrors beam_vector / effective_gains / scheme_rate_point arithmetically --
including the radicand feasibility tolerance -- but works on whole arrays,
never materializing beam vectors.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import (DegenerateRelayChannel, InfeasibleRadicand,
                     NoFeasiblePoint, NoFeasibleRho, NoSignChange)
from .lowpower import sum_rate_allocation
from .model import RADICAND_RTOL, ChannelSetup, PowerAllocation, validate
from .rates import scheme_rate_point

__all__ = [
    "GridSpec",
    "SearchResult",
    "SweepPolicy",
    "SweepRow",
    "SweepTable",
    "grid_search_sum_rate",
    "bisect_intersection",
    "hull2d",
    "sweep_P",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform search grid: n_p points per power axis on [0, P] (the last
    one dropped when include_boundary is false) and n_rho interior points
    k/(n_rho + 1) on (0, 1)."""

    n_p: int = 101
    n_rho: int = 99
    include_boundary: bool = True

    def __post_init__(self):
        if self.n_p < 2:
            raise ValueError(f"n_p must be >= 2, got {self.n_p}")
        if self.n_rho < 1:
            raise ValueError(f"n_rho must be >= 1, got {self.n_rho}")

    def p_values(self, P: float) -> np.ndarray:
        values = np.linspace(0.0, float(P), self.n_p)
        return values if self.include_boundary else values[:-1]

    def rho_values(self) -> np.ndarray:
        return np.arange(1, self.n_rho + 1, dtype=float) / (self.n_rho + 1.0)


@dataclass(frozen=True)
class SearchResult:
    allocation: PowerAllocation
    sum_rate: float


@dataclass(frozen=True)
class SweepPolicy:
    """How each sweep row is computed: the coarse grid, whether each sign
    block's best cell is sharpened by a nested zoom around its argmax, and
    the relay budget rule (None means PR = P row by row)."""

    grid: GridSpec = GridSpec()
    refine: bool = True
    PR: float | None = None


@dataclass(frozen=True)
class SweepRow:
    """One budget point: the searched optimum, the closed-form low-power
    allocation, and the exact scheme sum rates of all strategies. The
    sqrt split is only defined for P >= 1 (None otherwise)."""

    P: float
    best_alloc: PowerAllocation
    phat1: float
    phat2: float
    R_sum_exact: float
    R_sum_closed: float
    R_sum_half: float
    R_sum_sqrt: float | None


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    def __post_init__(self):
        budgets = [row.P for row in self.rows]
        if any(b <= a for a, b in zip(budgets, budgets[1:])):
            raise ValueError("sweep rows must be strictly increasing in P")


def _worker_count(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("IMRC_THREADS", "").strip()
        if env:
            workers = int(env)
        else:
            workers = min(8, os.cpu_count() or 1)
    return max(1, int(workers))


def _map_rhos(fn, rhos, workers: int | None) -> list:
    count = _worker_count(workers)
    if count <= 1 or len(rhos) <= 1:
        return [fn(rho) for rho in rhos]
    # numpy releases the GIL on the big array ops, so threads scale here
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, rhos))


def _user_signal(setup: ChannelSetup, rho1: float, user: int, sign: int,
                 pv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Received power of user i's repeated message over a p_i grid, plus
    the zero-forcing feasibility mask. Entries at p_i = P use the boundary
    construction (always feasible); interior entries replicate the
    beam-vector algebra in closed form:

        f_ii = h_ii - h_ij (hRi.hRj)/||hRj||^2 +/- n_i sqrt(rad) det(H)/||hRj||^2
    """
    if user == 1:
        h_own, h_cross, norm2 = setup.h11, setup.h12, setup.hR2_norm2
        rho_i, orient = rho1, 1.0
    else:
        h_own, h_cross, norm2 = setup.h22, setup.h21, setup.hR1_norm2
        rho_i, orient = 1.0 - rho1, -1.0
    pv = np.asarray(pv, dtype=float)
    sig = np.zeros_like(pv)
    ok = np.zeros(pv.shape, dtype=bool)
    if norm2 == 0.0:
        return sig, ok  # no direction cancels the cross link; nothing feasible
    det = setup.relay_det()
    dot = setup.relay_dot()
    boundary = pv >= setup.P
    interior = ~boundary
    remaining = setup.P - pv[interior]
    scale = norm2 * (rho_i * setup.PR / remaining)
    rad = scale - h_cross ** 2
    feasible = rad >= -RADICAND_RTOL * np.abs(scale)
    root = np.sqrt(np.maximum(rad, 0.0))
    f_own = h_own - h_cross * dot / norm2 + orient * sign * det * root / norm2
    sig[interior] = np.where(feasible, f_own * f_own * remaining, 0.0)
    ok[interior] = feasible
    sig[boundary] = rho_i * setup.PR * det * det / norm2
    ok[boundary] = True
    return sig, ok


def _block_objective(setup: ChannelSetup, rho1: float, n1: int, n2: int,
                     p1v: np.ndarray, p2v: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Exact scheme sum rate on the outer grid p1v x p2v at fixed rho1 and
    signs; infeasible cells carry -inf. Agrees with scheme_rate_point up to
    rounding (sum-cap truncation preserves the sum, so the objective is
    simply min(R1 + R2, Rsum_mac))."""
    p1v = np.asarray(p1v, dtype=float)
    p2v = np.asarray(p2v, dtype=float)
    sig1, ok1 = _user_signal(setup, rho1, 1, n1, p1v)
    sig2, ok2 = _user_signal(setup, rho1, 2, n2, p2v)
    r1mac = np.log2(1.0 + setup.g1R_norm2 * p1v)
    r2mac = np.log2(1.0 + setup.g2R_norm2 * p2v)
    g11, g12 = setup.g1R
    g21, g22 = setup.g2R
    alpha = (g11 * g22) ** 2 + (g21 * g12) ** 2 - 2.0 * g12 * g21 * g11 * g22
    rsum_mac = np.log2(alpha * np.outer(p1v, p2v)
                       + setup.g1R_norm2 * p1v[:, None]
                       + setup.g2R_norm2 * p2v[None, :] + 1.0)
    r1ic = np.log2(1.0 + sig1[:, None] / (1.0 + setup.h21 ** 2 * p2v)[None, :])
    r2ic = np.log2(1.0 + sig2[None, :] / (1.0 + setup.h12 ** 2 * p1v)[:, None])
    total = np.minimum(r1mac[:, None], r1ic) + np.minimum(r2mac[None, :], r2ic)
    ok = ok1[:, None] & ok2[None, :]
    return np.where(ok, np.minimum(total, rsum_mac), -np.inf), ok


def _block_argmax(obj: np.ndarray) -> tuple[float, int, int] | None:
    flat = int(np.argmax(obj))  # first maximum, row-major: smallest (p1, p2)
    i, j = divmod(flat, obj.shape[1])
    value = float(obj[i, j])
    if value == float("-inf"):
        return None
    return value, i, j


def _refine_block(setup: ChannelSetup, rho1: float, n1: int, n2: int,
                  c1: float, c2: float, half: float,
                  rounds: int = 3, points: int = 21
                  ) -> tuple[float, float, float] | None:
    """Deterministic zoom around a coarse argmax cell: re-grid a window of
    +/- half around the current best with `points` samples per axis, keep
    the argmax, shrink the window to the new sample spacing, repeat. The
    window is clamped to [0, P] with exact endpoints so p = P stays
    reachable. Monotone by construction at the caller (which keeps the
    coarse value if no zoom point beats it)."""
    big_p = setup.P
    best = None
    for _ in range(rounds):
        p1v = np.linspace(max(0.0, c1 - half), min(big_p, c1 + half), points)
        p2v = np.linspace(max(0.0, c2 - half), min(big_p, c2 + half), points)
        obj, _ = _block_objective(setup, rho1, n1, n2, p1v, p2v)
        found = _block_argmax(obj)
        if found is None:
            return best
        value, i, j = found
        c1, c2 = float(p1v[i]), float(p2v[j])
        if best is None or value > best[0]:
            best = (value, c1, c2)
        half /= 10.0  # the sampled spacing of a 21-point +/-half window
    return best


_Candidate = tuple[float, tuple[float, float, float, int, int]]


def _better(cand: _Candidate, best: _Candidate) -> bool:
    # max value; on exact ties the smallest (rho1, p1, p2, n1, n2) wins
    return cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1])


def _search_rho(setup: ChannelSetup, rho1: float, pv: np.ndarray,
                refine: bool, step: float) -> _Candidate | None:
    best = None
    for n1 in (-1, 1):
        for n2 in (-1, 1):
            obj, ok = _block_objective(setup, rho1, n1, n2, pv, pv)
            if not ok.any():
                continue
            found = _block_argmax(obj)
            if found is None:
                continue
            value, i, j = found
            c1, c2 = float(pv[i]), float(pv[j])
            if refine:
                sharper = _refine_block(setup, rho1, n1, n2, c1, c2, step)
                if sharper is not None and sharper[0] > value:
                    value, c1, c2 = sharper
            cand = (value, (rho1, c1, c2, n1, n2))
            if best is None or _better(cand, best):
                best = cand
    return best


def _merge(candidates) -> _Candidate | None:
    best = None
    for cand in candidates:
        if cand is None:
            continue
        if best is None or _better(cand, best):
            best = cand
    return best


def grid_search_sum_rate(setup: ChannelSetup, grid: GridSpec | None = None,
                         workers: int | None = None) -> SearchResult:
    """Maximize the exact scheme sum rate over the full grid x both sign
    choices per user. Pure enumeration -- every grid point is evaluated,
    no structure assumed. Deterministic: exact-value ties resolve to the
    smallest (rho1, p1, p2, n1, n2), and the parallel merge applies the
    same rule after an order-preserving map."""
    validate(setup)
    if grid is None:
        grid = GridSpec()
    pv = grid.p_values(setup.P)

    def one(rho1):
        return _search_rho(setup, float(rho1), pv, refine=False, step=0.0)

    best = _merge(_map_rhos(one, grid.rho_values(), workers))
    if best is None:
        raise NoFeasiblePoint("no grid point admits zero-forcing for both users")
    _, (rho1, p1, p2, n1, n2) = best
    alloc = PowerAllocation(p1=p1, p2=p2, rho1=rho1, n1=n1, n2=n2)
    return SearchResult(allocation=alloc,
                        sum_rate=scheme_rate_point(setup, alloc).sum_rate)


def bisect_intersection(curve_pair, interval, tol: float = 1e-12) -> float:
    """Intersection of two scalar curves on an interval by bisection on
    their difference. An endpoint where the curves already coincide is
    returned as-is; otherwise the difference must change sign across the
    interval. The returned abscissa is within tol * (initial width) of the
    crossing."""
    curve_a, curve_b = curve_pair
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError(f"interval must satisfy lo < hi, got [{lo}, {hi}]")
    d_lo = curve_a(lo) - curve_b(lo)
    d_hi = curve_a(hi) - curve_b(hi)
    if d_lo == 0.0:
        return lo
    if d_hi == 0.0:
        return hi
    if (d_lo > 0.0) == (d_hi > 0.0):
        raise NoSignChange(
            f"curve difference has the same sign at both endpoints "
            f"({d_lo:.3e} and {d_hi:.3e})")
    span = hi - lo
    for _ in range(200):  # hard stop well past float resolution
        if hi - lo <= tol * span:
            break
        mid = 0.5 * (lo + hi)
        d_mid = curve_a(mid) - curve_b(mid)
        if d_mid == 0.0:
            return mid
        if (d_mid > 0.0) == (d_lo > 0.0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hull2d(points) -> list[tuple[float, float]]:
    """Convex hull by monotone chain: counterclockwise vertex list starting
    from the lexicographically smallest point, collinear points dropped.
    Degenerate inputs (single point, segment, all collinear) come back as
    the 1 or 2 extreme points."""
    pts = sorted({(float(x), float(y)) for x, y in points})
    if not pts:
        raise ValueError("hull2d needs at least one point")
    if len(pts) <= 2:
        return pts

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _fixed_split_rate(setup: ChannelSetup, p: float) -> float:
    """Exact scheme sum rate at p1 = p2 = p with rho1 = 1/2, maximized over
    the four sign pairs ((+1,+1) kept on ties); NaN when zero-forcing is
    infeasible at that split."""
    best = float("nan")
    for n1, n2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        alloc = PowerAllocation(p1=p, p2=p, rho1=0.5, n1=n1, n2=n2)
        try:
            value = scheme_rate_point(setup, alloc).sum_rate
        except (InfeasibleRadicand, DegenerateRelayChannel):
            continue
        if math.isnan(best) or value > best:
            best = value
    return best


def _sweep_row(setup: ChannelSetup, policy: SweepPolicy,
               workers: int | None) -> SweepRow:
    grid = policy.grid
    pv = grid.p_values(setup.P)
    step = float(pv[1] - pv[0]) if len(pv) > 1 else 0.0
    refine = policy.refine and step > 0.0

    def one(rho1):
        return _search_rho(setup, float(rho1), pv, refine=refine, step=step)

    best = _merge(_map_rhos(one, grid.rho_values(), workers))
    if best is None:
        raise NoFeasiblePoint(f"no feasible allocation at P = {setup.P}")
    _, (rho1, p1, p2, n1, n2) = best
    best_alloc = PowerAllocation(p1=p1, p2=p2, rho1=rho1, n1=n1, n2=n2)
    r_exact = scheme_rate_point(setup, best_alloc).sum_rate

    try:
        closed_alloc = sum_rate_allocation(setup, grid.rho_values().tolist())
        phat1, phat2 = closed_alloc.p1, closed_alloc.p2
        r_closed = scheme_rate_point(setup, closed_alloc).sum_rate
    except NoFeasibleRho:
        phat1 = phat2 = r_closed = float("nan")

    r_half = _fixed_split_rate(setup, 0.5 * setup.P)
    r_sqrt = (_fixed_split_rate(setup, math.sqrt(setup.P))
              if setup.P >= 1.0 else None)
    return SweepRow(P=setup.P, best_alloc=best_alloc, phat1=phat1,
                    phat2=phat2, R_sum_exact=r_exact, R_sum_closed=r_closed,
                    R_sum_half=r_half, R_sum_sqrt=r_sqrt)


def sweep_P(setup_template: ChannelSetup, P_values,
            policy: SweepPolicy | None = None,
            workers: int | None = None) -> SweepTable:
    """One SweepRow per budget P, ascending. Each row re-derives the setup
    with that P (and PR = P unless the policy pins PR), then runs the grid
    search, the closed-form low-power allocation, and the fixed splits
    p = P/2 and -- when P >= 1 -- p = sqrt(P)."""
    if policy is None:
        policy = SweepPolicy()
    budgets = [float(v) for v in P_values]
    if not budgets:
        raise ValueError("P_values must be nonempty")
    if any(b <= a for a, b in zip(budgets, budgets[1:])):
        raise ValueError("P_values must be strictly increasing")
    rows = []
    for big_p in budgets:
        relay_p = big_p if policy.PR is None else policy.PR
        setup = validate(replace(setup_template, P=big_p, PR=relay_p))
        rows.append(_sweep_row(setup, policy, workers))
    return SweepTable(rows=tuple(rows))
