#!/usr/bin/env python3
"""Regenerate the sample CSVs shipped with the plots package.

The samples are small but real: a three-value coupling sweep of chain
observables (N=6, 60 periods) and a 2x2 block of Husimi grids from the
same run, plus the analytic grid of a spin pinned to |up>.  Everything
is seeded, so reruns are byte-identical.
"""

import argparse
from pathlib import Path

import numpy as np

from kickchain.bath import BathSpec, generate_schedule
from kickchain.chain import ChainConfig
from kickchain.observables import (ObservableRecord, husimi, reduce,
                                   write_chain_csv, write_husimi_csv)
from kickchain.propagator import iter_trajectory

N_SPINS = 6
N_PERIODS = 60
HUSIMI_RES = 60
HUSIMI_PERIODS = (0, 5)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir",
                        default=Path(__file__).resolve().parent.parent
                        / "plots" / "samples")
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    bath = BathSpec(kind="drift", d0=1.0, seed=0)
    for j in (0.01, 0.1, 1.0):
        chain = ChainConfig(n_spins=N_SPINS, coupling="heisenberg",
                            j_over_w0=j)
        schedule = generate_schedule(bath, N_SPINS, N_PERIODS)
        states = list(iter_trajectory(chain, schedule))
        record = ObservableRecord.from_states(iter(states), N_SPINS)
        write_chain_csv(outdir / f"chain_J={j:g}.csv", record)
        if j == 1.0:
            for spin in (1, 2):
                for period in HUSIMI_PERIODS:
                    grid = husimi(reduce(states[period][1], spin, N_SPINS),
                                  HUSIMI_RES, HUSIMI_RES,
                                  spin=spin, period=period)
                    write_husimi_csv(
                        outdir / f"husimi_spin{spin}_period{period}.csv",
                        grid)

    up = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    write_husimi_csv(outdir / "husimi_up.csv",
                     husimi(up, HUSIMI_RES, HUSIMI_RES, spin=1, period=0))

    print(f"samples written to {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
