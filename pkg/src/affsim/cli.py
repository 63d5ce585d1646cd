"""Command-line front end: generate instances, characterize them, build
schedules, and run comparison sweeps.

Exit codes: 0 success, 1 validation error, 2 capacity errors or sweeps whose
results include truncated runs.
"""
from __future__ import annotations

import argparse
import sys

from .core import (
    CapacityError,
    InstanceError,
    characterize,
    schedule_to_text,
    verify_selective,
)
from .engine import (
    MAX_ROUNDS_DEFAULT,
    ProtocolSpec,
    summarize,
    sweep,
    write_csv,
)
from .protocols import (
    RandomizedParams,
    ScheduleError,
    deterministic_schedule,
    randomized_schedule,
)
from .scenario import (
    generate_office_layer,
    load_instance,
    load_scenario,
    save_instance,
    sinr_defaults,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CAPACITY = 2


def _add_instance_args(parser, repeatable=False):
    if repeatable:
        parser.add_argument("--instance", action="append", default=[],
                            help="instance JSON file (repeatable)")
    else:
        parser.add_argument("--instance", required=True, help="instance JSON file")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="affsim",
        description="Interference-aware layer dissemination: schedules and sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", help="print instance characterization")
    _add_instance_args(p)
    p.add_argument("--c", type=float, default=None,
                   help="interference-to-degree ratio constant (derived if omitted)")

    p = sub.add_parser("generate", help="write an office instance file")
    p.add_argument("--scenario", required=True, help="scenario spec JSON")
    p.add_argument("--out", required=True)

    p = sub.add_parser("schedule", help="build and verify a schedule")
    _add_instance_args(p)
    p.add_argument("--protocol", required=True,
                   choices=["randomized", "deterministic"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--m-override", type=int, default=None)
    p.add_argument("--fallback", action="store_true",
                   help="size phases from n alone")
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--samples", type=int, default=4096)

    p = sub.add_parser("sweep", help="run instances x protocols x seeds to CSV")
    _add_instance_args(p, repeatable=True)
    p.add_argument("--scenario", default=None, help="scenario spec JSON")
    p.add_argument("--protocol", action="append", default=[],
                   choices=["randomized", "deterministic", "decay", "sinr"])
    p.add_argument("--seeds", type=int, default=1, help="number of seeds")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=MAX_ROUNDS_DEFAULT)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--m-override", type=int, default=None)
    p.add_argument("--density", type=int, default=None)
    p.add_argument("--dilution", type=int, default=None)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    return parser


def cmd_characterize(args):
    A = load_instance(args.instance)
    char = characterize(A, c=args.c)
    print("receiver  |F_w|  abar_w")
    for w in A.topo.receivers:
        print(f"{w:8d}  {len(A.topo.f(w)):5d}  {char.abar_w[w - 1]:.6f}")
    print(f"abar={char.abar:.6f} c={char.c:.6f} b={char.b:.6f} d={char.d:.6f}")
    print(f"m={char.m} phases={char.phases} slot_bound={char.slot_bound}")
    return EXIT_OK


def cmd_generate(args):
    specs = load_scenario(args.scenario)
    if len(specs) != 1:
        raise InstanceError("generate needs a scenario with a single office count")
    save_instance(generate_office_layer(specs[0]), args.out)
    print(f"wrote {args.out} (n={specs[0].n})")
    return EXIT_OK


def cmd_schedule(args):
    A = load_instance(args.instance)
    char = characterize(A, c=args.c)
    if args.protocol == "randomized":
        params = RandomizedParams(
            characterization=char,
            seed=args.seed,
            fallback_mode=args.fallback,
            m_override=args.m_override,
        )
        sched = randomized_schedule(params, A.n)
    else:
        mode = "exact" if args.mode == "exact" else "monte_carlo"
        sched = deterministic_schedule(A, char, mode=mode,
                                       mc_samples=args.samples, seed=args.seed)
    with open(args.out, "w") as fh:
        fh.write(schedule_to_text(sched))
    report = verify_selective(A, sched)
    print(f"slots={len(sched)} covered={len(report.covered)}/{A.n}")
    if report.uncovered:
        print(f"uncovered={sorted(report.uncovered)}")
    return EXIT_OK


def _sweep_instances(args):
    instances = []
    for path in args.instance:
        instances.append((path, load_instance(path)))
    office_specs = {}
    if args.scenario:
        for spec in load_scenario(args.scenario):
            A = generate_office_layer(spec)
            instances.append((f"office_n{spec.n}", A))
            office_specs[f"office_n{spec.n}"] = spec
    if not instances:
        raise InstanceError("sweep needs --instance or --scenario")
    return instances, office_specs


def _sweep_protocols(args, instances, office_specs):
    protocols = []
    for name in args.protocol:
        if name == "randomized":
            opts = {"c": args.c}
            if args.m_override:
                opts["m_override"] = args.m_override
            protocols.append(ProtocolSpec(name, opts))
        elif name == "deterministic":
            mode = "exact" if args.mode == "exact" else "monte_carlo"
            protocols.append(ProtocolSpec(name, {"c": args.c, "mode": mode}))
        elif name == "sinr":
            opts = {}
            if args.density and args.dilution:
                opts = {"density": args.density, "dilution": args.dilution}
            elif office_specs:
                opts = sinr_defaults(next(iter(office_specs.values())))
            else:
                raise InstanceError(
                    "sinr needs --density and --dilution for non-office sweeps"
                )
            protocols.append(ProtocolSpec(name, opts))
        else:
            protocols.append(ProtocolSpec(name, {}))
    if not protocols:
        raise InstanceError("sweep needs at least one --protocol")
    return protocols


def cmd_sweep(args):
    instances, office_specs = _sweep_instances(args)
    protocols = _sweep_protocols(args, instances, office_specs)
    all_seeds = list(range(args.seed_base, args.seed_base + args.seeds))
    rows = []
    for spec in protocols:
        seeds = all_seeds if spec.uses_seed else all_seeds[:1]
        rows.extend(sweep(instances, [spec], seeds, max_rounds=args.max_rounds))
    write_csv(rows, args.out)
    stats = summarize(rows)
    bounds = {}
    for instance_id, A in instances:
        if any(spec.name == "randomized" for spec in protocols):
            bounds[instance_id] = characterize(A, c=args.c).slot_bound
    print("instance_id,protocol,runs,mean,median,max,bound")
    for (instance_id, protocol), stat in sorted(stats.items()):
        bound = bounds.get(instance_id, "") if protocol == "randomized" else ""
        print(
            f"{instance_id},{protocol},{stat['runs']},{stat['mean']:.1f},"
            f"{stat['median']:.1f},{stat['max']},{bound}"
        )
    if any(not row.completed for row in rows):
        print("warning: truncated runs present", file=sys.stderr)
        return EXIT_CAPACITY
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "characterize": cmd_characterize,
        "generate": cmd_generate,
        "schedule": cmd_schedule,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except (InstanceError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CapacityError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    raise SystemExit(main())
