#!/usr/bin/env python3
"""Throughput check: N re-observed agents, full pairwise recomputation per cycle."""
import argparse
import time

from sitrep.engine import Engine
from sitrep.fsf import FSF, Coord, EntityId


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--agents", type=int, default=500)
    parser.add_argument("--cycles", type=int, default=100)
    parser.add_argument("--spacing", type=int, default=25_000)
    args = parser.parse_args()

    side = int(args.agents**0.5) + 1
    engine = Engine()
    started = time.perf_counter()
    for cycle in range(args.cycles):
        for i in range(args.agents):
            engine.submit(
                FSF(
                    EntityId("fire", i),
                    (("fieriness", 1), ("inDangerNeighbours", 2), ("burningNeighbours", 1)),
                    Coord((i % side) * args.spacing, (i // side) * args.spacing),
                    time=cycle,
                )
            )
        engine.run_cycle()
    elapsed = time.perf_counter() - started
    pairs = args.agents * (args.agents - 1) // 2
    entries = sum(len(a.acquaintances) for a in engine.agents.values())
    print(
        f"{args.agents} agents x {args.cycles} cycles: {elapsed:.2f}s"
        f" ({1000 * elapsed / args.cycles:.1f} ms/cycle, {pairs} pairs scanned,"
        f" {entries} acquaintance entries live)"
    )


if __name__ == "__main__":
    main()
