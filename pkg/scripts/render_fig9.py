#!/usr/bin/env python3
"""Regenerate the bundled fig9 scenario file from its programmatic source."""
from pathlib import Path

from sitrep.scenario import fig9_scenario, format_scenario

OUT = Path(__file__).resolve().parent.parent / "src" / "sitrep" / "data" / "fig9.scenario"


def main() -> None:
    OUT.write_text(format_scenario(fig9_scenario()), encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
