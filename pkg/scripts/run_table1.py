#!/usr/bin/env python3
"""Print the nine-entry scheme comparison against the published values."""
import argparse

from sqmzi.runner import reproduce_table1


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trajectories", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=20240810)
    args = parser.parse_args()
    rows = reproduce_table1(args.trajectories, args.seed)
    print(f"{'scheme':<24}{'column':<10}{'delta_phi':>12}{'stderr':>10}"
          f"{'published':>10}{'ratio':>8}{'Q':>7}{'N_t':>11}")
    for row in rows:
        print(f"{row['scheme']:<24}{row['column']:<10}{row['delta_phi']:>12.3e}"
              f"{row['stderr']:>10.1e}{row['published']:>10.1e}{row['ratio']:>8.2f}"
              f"{row['q_achieved']:>7.3f}{row['n_t']:>11.3e}")


if __name__ == "__main__":
    main()
