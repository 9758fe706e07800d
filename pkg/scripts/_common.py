"""Shared helpers for the experiment scripts."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dmcss.baselines import DCRK, DMCSS, GCSS, LORA, SSK_ICS  # noqa: E402
from dmcss.simharness import NoBracketError, SweepConfig, required_snr_at_target, run_sweep  # noqa: E402

SCHEMES = (DMCSS, LORA, SSK_ICS, GCSS, DCRK)


def base_parser(doc: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--lam", type=int, default=9)
    return p


def curve(scheme, lam, channel, grid, args):
    cfg = SweepConfig(scheme, lam, channel, tuple(grid), args.trials, 1e-3, args.seed)
    return run_sweep(cfg, args.threads)


def crossing(points) -> float:
    try:
        return required_snr_at_target(points, 1e-3).ebn0_db_at_target
    except NoBracketError:
        return float("nan")


def print_curve(label, points):
    print(f"{label:<28}" + " ".join(f"{p.ber:9.2e}" for p in points), flush=True)
