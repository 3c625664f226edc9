#!/usr/bin/env python3
"""Replay the bundled fig9 scenario and print the final agents table.

Usage: python scripts/fig9_demo.py [--cycles N]
"""
import argparse

from sitrep.engine import Engine
from sitrep.scenario import bundled_scenario_path, load_scenario_path, run_scenario


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--history", type=int, default=6, help="indicator history tail to show")
    args = parser.parse_args()

    engine = Engine()
    scenario = load_scenario_path(bundled_scenario_path())
    cycles = run_scenario(engine, scenario)
    print(f"scenario {scenario.meta.name!r}: {len(scenario.events)} events, {cycles} cycles\n")

    header = f"{'agent':>24}  {'state':<9} {'AI':>10} {'PI':>8}  acquaintances"
    print(header)
    print("-" * len(header))
    for agent in sorted(engine.agents.values(), key=lambda a: a.id):
        acq = ", ".join(
            f"#{other}:{pb.total:+.3f}" for other, pb in sorted(agent.acquaintances.items())
        )
        print(
            f"{str(agent.entity_id):>24}  {agent.state:<9} {agent.indicators.ai:>10.4f}"
            f" {agent.indicators.pi:>8.2f}  {acq or '-'}"
        )

    print("\nindicator tails (AI series):")
    for agent in sorted(engine.agents.values(), key=lambda a: a.id):
        tail = agent.indicators.history[-args.history :]
        series = " ".join(f"{ai:.3f}" for ai, _ in tail)
        print(f"  {str(agent.entity_id):>24}  {series}")


if __name__ == "__main__":
    main()
