"""Command-line front end.

Subcommands wrap the library one computation each: `validate`, `beam`,
`rates`, `phat`, `region`, `sweep`, and `figure {2|3|4|5}` (CSV data behind
the standard plots). Output goes to stdout as plain `name = value` lines;
`--out FILE` additionally writes a CSV (header row, comma separated,
12 significant digits, LF endings -- byte-stable across runs).

Exit codes: 0 success, 1 usage/input error, 2 infeasible computation.
Power flags accept linear values or decibels: `--P 0.1` or `--P -10dB`.
The environment variable IMRC_THREADS caps grid-search workers.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import beamforming, search
from .errors import ImrcError
from .lowpower import (best_sign_powers, full_region, linearized_rates,
                       taylor_coeffs)
from .model import (ChannelSetup, PowerAllocation, feasibility,
                    resolve_channel, validate)
from .rates import block_penalty, ic_rates, mac_rates, scheme_rate_point
from .search import GridSpec, SweepPolicy, bisect_intersection, sweep_P

DEFAULT_DB_RANGE = "-30:20:1"


class UsageError(Exception):
    """Bad command line or config; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse from calling sys.exit itself
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, parsed and converted (dB already
    linear). P/PR of None mean "use the channel file's values"."""

    channel: str
    rho: float
    p1: float
    p2: float
    n1: int
    n2: int
    B: int | None
    P: float | None
    PR: float | None
    grid: GridSpec | None
    p_db: tuple[float, ...]
    out: str | None
    figure: int | None = None


def parse_power(text: str) -> float:
    """`0.5` -> 0.5 linear; `-10dB` -> 10**(-1)."""
    s = text.strip()
    if s.lower().endswith("db"):
        return 10.0 ** (float(s[:-2]) / 10.0)
    return float(s)


def parse_grid(text: str) -> GridSpec:
    left, sep, right = text.partition("x")
    if not sep:
        raise ValueError(f"grid must look like 101x99, got {text!r}")
    return GridSpec(n_p=int(left), n_rho=int(right))


def parse_db_range(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be MIN:MAX:STEP in dB, got {text!r}")
    lo, hi, step = (float(x) for x in parts)
    if step <= 0.0 or hi < lo:
        raise ValueError(f"range must be ascending with step > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(lo + k * step for k in range(count))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _setup(config: RunConfig) -> ChannelSetup:
    setup = resolve_channel(config.channel)
    if config.P is not None:
        setup = replace(setup, P=config.P)
    if config.PR is not None:
        setup = replace(setup, PR=config.PR)
    return validate(setup)


def _alloc(config: RunConfig) -> PowerAllocation:
    try:
        return PowerAllocation(p1=config.p1, p2=config.p2, rho1=config.rho,
                               n1=config.n1, n2=config.n2)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_validate(config: RunConfig) -> int:
    setup = _setup(config)
    for name in ("h11", "h12", "h21", "h22", "g1R", "g2R", "hR1", "hR2",
                 "P", "PR"):
        print(f"{name} = {getattr(setup, name)}")
    print(f"||g1R||^2 = {_fmt(setup.g1R_norm2)}")
    print(f"||g2R||^2 = {_fmt(setup.g2R_norm2)}")
    print(f"||hR1||^2 = {_fmt(setup.hR1_norm2)}")
    print(f"||hR2||^2 = {_fmt(setup.hR2_norm2)}")
    print(f"det(H) = {_fmt(setup.relay_det())}")
    report = feasibility(setup, _alloc(config))
    print(f"zero-forcing feasible: user1={report.exact1} user2={report.exact2}")
    print(f"low-power expansion:   user1={report.linear1} user2={report.linear2}")
    print("channel ok")
    return 0


def cmd_beam(config: RunConfig) -> int:
    setup = _setup(config)
    alloc = _alloc(config)
    vectors = beamforming.beam_vectors(setup, alloc)
    print(f"t10 = [{_fmt(vectors.t10[0])}, {_fmt(vectors.t10[1])}]")
    print(f"t20 = [{_fmt(vectors.t20[0])}, {_fmt(vectors.t20[1])}]")
    res1 = beamforming.zero_forcing_residual(setup, alloc, 1)
    res2 = beamforming.zero_forcing_residual(setup, alloc, 2)
    print(f"residual1 = {_fmt(res1)}")
    print(f"residual2 = {_fmt(res2)}")
    if config.out:
        write_csv(config.out, ["user", "t_1", "t_2", "boundary"],
                  [(1, vectors.t10[0], vectors.t10[1], vectors.boundary1),
                   (2, vectors.t20[0], vectors.t20[1], vectors.boundary2)])
        print(f"wrote {config.out}")
    return 0


def cmd_rates(config: RunConfig) -> int:
    setup = _setup(config)
    alloc = _alloc(config)
    rates = scheme_rate_point(setup, alloc)
    for name in ("R1", "R2", "R1mac", "R2mac", "Rsum_mac", "R1ic", "R2ic"):
        print(f"{name} = {_fmt(getattr(rates, name))}")
    print(f"truncated = {rates.truncated}")
    if config.B is not None:
        with_blocks = block_penalty(rates.point, config.B)
        print(f"R1 x (B-1)/B = {_fmt(with_blocks.R1)}")
        print(f"R2 x (B-1)/B = {_fmt(with_blocks.R2)}")
    if config.out:
        write_csv(config.out,
                  ["R1", "R2", "R1mac", "R2mac", "Rsum_mac", "R1ic", "R2ic",
                   "truncated"],
                  [(rates.R1, rates.R2, rates.R1mac, rates.R2mac,
                    rates.Rsum_mac, rates.R1ic, rates.R2ic, rates.truncated)])
        print(f"wrote {config.out}")
    return 0


def cmd_phat(config: RunConfig) -> int:
    setup = _setup(config)
    best = best_sign_powers(setup, config.rho)
    print(f"phat1 = {_fmt(best.p1)} (n1 = {best.n1:+d})")
    print(f"phat2 = {_fmt(best.p2)} (n2 = {best.n2:+d})")
    if config.out:
        write_csv(config.out, ["rho1", "phat1", "phat2", "n1", "n2"],
                  [(config.rho, best.p1, best.p2, best.n1, best.n2)])
        print(f"wrote {config.out}")
    return 0


def cmd_region(config: RunConfig) -> int:
    setup = _setup(config)
    rho_grid = config.grid.rho_values().tolist() if config.grid else None
    region = full_region(setup, rho_grid)
    print(f"vertices = {len(region.vertices)}")
    for r1, r2 in region.vertices:
        print(f"  ({_fmt(r1)}, {_fmt(r2)})")
    if config.out:
        write_csv(config.out, ["R1", "R2"], list(region.vertices))
        print(f"wrote {config.out}")
    return 0


def _budgets(config: RunConfig) -> list[float]:
    return [10.0 ** (db / 10.0) for db in config.p_db]


def cmd_sweep(config: RunConfig) -> int:
    setup = _setup(config)
    policy = SweepPolicy(grid=config.grid or GridSpec(), PR=config.PR)
    table = sweep_P(setup, _budgets(config), policy)
    for db, row in zip(config.p_db, table.rows):
        line = (f"P = {db:g} dB: exact = {_fmt(row.R_sum_exact)}, "
                f"closed = {_fmt(row.R_sum_closed)}, half = {_fmt(row.R_sum_half)}")
        if row.R_sum_sqrt is not None:
            line += f", sqrt = {_fmt(row.R_sum_sqrt)}"
        print(line)
    if config.out:
        rows = [(db, row.best_alloc.rho1, row.best_alloc.p1, row.best_alloc.p2,
                 row.best_alloc.n1, row.best_alloc.n2, row.phat1, row.phat2,
                 row.R_sum_exact, row.R_sum_closed, row.R_sum_half,
                 row.R_sum_sqrt)
                for db, row in zip(config.p_db, table.rows)]
        write_csv(config.out,
                  ["P_dB", "rho1", "p1", "p2", "n1", "n2", "phat1", "phat2",
                   "R_sum_exact", "R_sum_closed", "R_sum_half", "R_sum_sqrt"],
                  rows)
        print(f"wrote {config.out}")
    return 0


def figure2_rows(setup: ChannelSetup, rho1: float, n1: int) -> list[tuple]:
    """Beam vector components, exact vs first-order, as p1 sweeps [0, 0.99P]."""
    rows = []
    for k in range(100):
        frac = k / 100.0
        alloc = PowerAllocation(p1=frac * setup.P, p2=0.0, rho1=rho1, n1=n1)
        exact = beamforming.beam_vector(setup, alloc, 1)
        approx = beamforming.approx_beam_vector(setup, alloc, 1)
        rows.append((frac, exact[0], exact[1], approx[0], approx[1]))
    return rows


def figure3_rows(setup: ChannelSetup, rho1: float, n1: int,
                 p2: float) -> tuple[list[tuple], float]:
    """User 1's two caps, linearized and exact, on the same p1 sweep, plus
    the linearized curves' intersection (the closed-form optimum)."""
    coeffs = taylor_coeffs(setup, rho1, n1=n1)
    rows = []
    for k in range(100):
        frac = k / 100.0
        p1 = frac * setup.P
        lin = linearized_rates(coeffs, setup, p1, p2)
        mac = mac_rates(setup, p1, p2)
        ic = ic_rates(setup, PowerAllocation(p1=p1, p2=p2, rho1=rho1, n1=n1))
        rows.append((frac, lin.r1mac, lin.r1ic, mac.R1mac, ic.R1))
    crossing = bisect_intersection(
        (lambda p: linearized_rates(coeffs, setup, p, p2).r1mac,
         lambda p: linearized_rates(coeffs, setup, p, p2).r1ic),
        (0.0, setup.P))
    return rows, crossing


def _refine_1d(setup: ChannelSetup, rho1: float, n1: int, center: float,
               half: float) -> tuple[float, float] | None:
    """Zoom on the 1-D (p2 = 0) objective around a coarse argmax."""
    p2v = np.zeros(1)
    best = None
    for _ in range(3):
        pv = np.linspace(max(0.0, center - half), min(setup.P, center + half), 21)
        obj, _ = search._block_objective(setup, rho1, n1, 1, pv, p2v)
        column = obj[:, 0]
        i = int(np.argmax(column))
        value = float(column[i])
        if value == float("-inf"):
            return best
        if best is None or value > best[0]:
            best = (value, float(pv[i]))
        center = float(pv[i])
        half /= 10.0
    return best


def figure4_rows(setup_template: ChannelSetup, db_values, PR: float | None,
                 rho1: float, n_p: int) -> list[tuple]:
    """Best p1/P with p2 = 0 across budgets: refined 1-D exhaustive search
    vs the closed form, both maximized over the branch sign."""
    rows = []
    p2v = np.zeros(1)
    for db in db_values:
        big_p = 10.0 ** (db / 10.0)
        setup = validate(replace(setup_template, P=big_p,
                                 PR=big_p if PR is None else PR))
        pv = np.linspace(0.0, big_p, n_p)
        step = float(pv[1] - pv[0])
        best = None  # (value, p1); sign +1 kept on ties
        for n1 in (1, -1):
            obj, _ = search._block_objective(setup, rho1, n1, 1, pv, p2v)
            column = obj[:, 0]
            i = int(np.argmax(column))
            value = float(column[i])
            if value == float("-inf"):
                continue
            candidate = (value, float(pv[i]))
            sharper = _refine_1d(setup, rho1, n1, candidate[1], step)
            if sharper is not None and sharper[0] > candidate[0]:
                candidate = sharper
            if best is None or candidate[0] > best[0]:
                best = candidate
        closed = best_sign_powers(setup, rho1).p1
        rows.append((db, best[1] / big_p if best else float("nan"),
                     closed / big_p))
    return rows


def figure5_rows(setup_template: ChannelSetup, db_values, PR: float | None,
                 grid: GridSpec | None) -> list[tuple]:
    """Sum rates of the four strategies, each normalized by
    log2(1 + h11^2 P) + log2(1 + h22^2 P)."""
    policy = SweepPolicy(grid=grid or GridSpec(), PR=PR)
    budgets = [10.0 ** (db / 10.0) for db in db_values]
    table = sweep_P(setup_template, budgets, policy)
    rows = []
    for db, row in zip(db_values, table.rows):
        norm = (math.log2(1.0 + setup_template.h11 ** 2 * row.P)
                + math.log2(1.0 + setup_template.h22 ** 2 * row.P))
        rows.append((db, row.R_sum_exact / norm, row.R_sum_closed / norm,
                     row.R_sum_half / norm,
                     None if row.R_sum_sqrt is None else row.R_sum_sqrt / norm))
    return rows


def cmd_figure(config: RunConfig) -> int:
    setup = _setup(config)
    out = config.out or f"fig{config.figure}.csv"
    if config.figure == 2:
        header = ["p1_over_P", "t10_1_exact", "t10_2_exact",
                  "t10_1_approx", "t10_2_approx"]
        rows = figure2_rows(setup, config.rho, config.n1)
    elif config.figure == 3:
        header = ["p1_over_P", "r1_mac", "r1_ic", "R1_mac_exact", "R1_ic_exact"]
        rows, crossing = figure3_rows(setup, config.rho, config.n1,
                                      config.p2 if config.p2 > 0.0 else 1e-4)
        print(f"intersection p1 = {_fmt(crossing)}")
    elif config.figure == 4:
        header = ["P_dB", "phat1_grid_over_P", "phat1_closed_over_P"]
        n_p = config.grid.n_p if config.grid else 2001
        rows = figure4_rows(setup, config.p_db, config.PR, config.rho, n_p)
    else:
        header = ["P_dB", "norm_sum_grid", "norm_sum_closed",
                  "norm_sum_half", "norm_sum_sqrt"]
        rows = figure5_rows(setup, config.p_db, config.PR, config.grid)
    write_csv(out, header, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "beam": cmd_beam,
    "rates": cmd_rates,
    "phat": cmd_phat,
    "region": cmd_region,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="imrc",
                     description="Two-user interference channel with a "
                                 "two-antenna relay: rates, beamforming, "
                                 "power allocation, figure data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        if name == "figure":
            p.add_argument("which", type=int, choices=(2, 3, 4, 5),
                           help="figure number to reproduce")
        p.add_argument("--channel", default="paper-example",
                       help="channel config file, or the built-in 'paper-example'")
        p.add_argument("--rho", type=float, default=0.5,
                       help="relay power share of user 1 (default 0.5)")
        p.add_argument("--p1", type=float, default=0.0)
        p.add_argument("--p2", type=float, default=0.0)
        p.add_argument("--n1", type=int, choices=(-1, 1), default=1)
        p.add_argument("--n2", type=int, choices=(-1, 1), default=1)
        p.add_argument("--B", type=int, default=None,
                       help="block count; reported rates get the (B-1)/B factor")
        p.add_argument("--P", type=parse_power, default=None, metavar="VAL[dB]",
                       help="override node power budget")
        p.add_argument("--PR", type=parse_power, default=None, metavar="VAL[dB]",
                       help="override relay power budget (sweeps: pin PR instead of PR = P)")
        p.add_argument("--grid", type=parse_grid, default=None, metavar="NPxNRHO")
        p.add_argument("--p-db-range", type=parse_db_range,
                       default=parse_db_range(DEFAULT_DB_RANGE), metavar="MIN:MAX:STEP",
                       help=f"budget sweep in dB (default {DEFAULT_DB_RANGE})")
        p.add_argument("--out", default=None, help="write CSV here")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(channel=args.channel, rho=args.rho, p1=args.p1,
                     p2=args.p2, n1=args.n1, n2=args.n2, B=args.B, P=args.P,
                     PR=args.PR, grid=args.grid, p_db=args.p_db_range,
                     out=args.out, figure=getattr(args, "which", None))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](_config(args))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ImrcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
