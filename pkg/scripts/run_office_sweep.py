#!/usr/bin/env python3
"""Run the office-corridor protocol comparison and print median rounds.

Sweeps office counts, runs the randomized schedule against the decay and
SINR-style baselines over a batch of seeds, and prints one CSV-ish line per
network size. Use --out to also keep the raw per-run rows.
"""
import argparse
import statistics
import sys

from affsim import (
    OfficeGridSpec,
    ProtocolSpec,
    characterize,
    generate_office_layer,
    sinr_defaults,
    sweep,
    write_csv,
)


def parse_args(argv):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--offices", type=int, nargs="+",
                        default=list(range(2, 15)),
                        help="office counts to sweep (n = 3 per office)")
    parser.add_argument("--seeds", type=int, default=30)
    parser.add_argument("--max-rounds", type=int, default=10 ** 5)
    parser.add_argument("--out", help="optional CSV path for raw rows")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    all_rows = []
    print("n,randomized,decay,sinr,slot_bound")
    for offices in args.offices:
        spec = OfficeGridSpec(offices=offices)
        A = generate_office_layer(spec)
        char = characterize(A)
        protocols = [
            ProtocolSpec("randomized"),
            ProtocolSpec("decay"),
            ProtocolSpec("sinr", sinr_defaults(spec)),
        ]
        rows = sweep([(f"office-{offices}", A)], protocols,
                     list(range(args.seeds)), max_rounds=args.max_rounds)
        all_rows.extend(rows)
        medians = {
            name: statistics.median(
                r.rounds for r in rows if r.protocol == name
            )
            for name in ("randomized", "decay", "sinr")
        }
        print(f"{A.n},{medians['randomized']},{medians['decay']},"
              f"{medians['sinr']},{char.slot_bound}")
    if args.out:
        write_csv(all_rows, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
