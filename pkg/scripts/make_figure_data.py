#!/usr/bin/env python3
"""Generate the sweep CSVs consumed by the figure frontend.

Writes into frontend/fixtures/ by default.  The committed fixtures were made
with exactly this script; rerunning reproduces them byte for byte.
"""
import argparse
import math
from pathlib import Path

from sqmzi.runner import SchemeConfig, rows_to_csv, sweep

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"


def write(path: Path, rows):
    path.write_text(rows_to_csv(rows))
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", type=Path, default=DEFAULT_OUT)
    parser.add_argument("--trajectories", type=int, default=4000)
    args = parser.parse_args()
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)

    # sensitivity vs squeezing for the single-mode scheme: smooth analytic
    # curve plus Monte Carlo points showing the depletion-induced dip
    r_values = [round(1.0 + 0.2 * k, 2) for k in range(16)]  # 1.0 .. 4.0
    base = SchemeConfig(scheme="single_mode", n_atoms=1e5, engine="analytic")
    rows = sweep(base, "r", r_values)
    tw = SchemeConfig(scheme="single_mode", n_atoms=1e5, engine="tw",
                      trajectories=args.trajectories, seed=2024)
    rows += sweep(tw, "r", r_values[::3])
    write(out / "r_sweep.csv", rows)

    # sensitivity vs transfer efficiency, with and without recycling
    q_values = [round(0.05 * k, 2) for k in range(1, 21)]
    base = SchemeConfig(scheme="single_mode", n_atoms=1e6, r=3.8,
                        recycled=True, engine="analytic")
    write(out / "q_sweep.csv", sweep(base, "Q", q_values))

    # loss comparison at eta = 0.95, r = 3: one CSV per loss site
    for site in ("pre_qst_optical", "post_qst_atomic",
                 "transmitted_optical", "symmetric_interferometer"):
        cfg = SchemeConfig(scheme="single_mode", n_atoms=1e6, r=3.0, q=0.5,
                           recycled=True, engine="analytic", eta={site: 1.0})
        write(out / f"loss_{site}.csv", sweep(cfg, "eta", [0.95]))

    # depletion of the double-input scheme: normalized sensitivity vs N_t
    rows = []
    for nb in (2e4, 8e4, 1.6e5, 3e5):
        r = math.asinh(math.sqrt(nb / 2))
        cfg = SchemeConfig(scheme="two_mode_double_input", n_atoms=1e6, r=r,
                           recycled=True, trajectories=args.trajectories, seed=2025)
        rows += sweep(cfg, "r", [r])
    for i, row in enumerate(rows):
        row["axis_value"] = row["n_t"]
    rows = sorted(rows, key=lambda r: (r["axis_value"], r["signal_variant"]))
    write(out / "depletion.csv", rows)

    # sensitivity across the fringe for the single-mode scheme
    phi_values = [round(0.5 + 0.2 * k, 2) for k in range(12)]
    cfg = SchemeConfig(scheme="single_mode", n_atoms=1e4, r=2.0,
                       trajectories=args.trajectories, seed=2026)
    write(out / "phase_fringe.csv", sweep(cfg, "phi", phi_values))


if __name__ == "__main__":
    main()
