from __future__ import annotations

import pytest

from sitrep.ontology import bundled_rcr_schema

# The three sample observations exercised throughout the suite.
SAMPLE_BRIGADE = (
    "(fireBrigade#5, hit point, 100, fires, 2, team, 3, action, extinguish,"
    " target, building#5, localisation, 7|9, time, 5)"
)
SAMPLE_FIRE = (
    "(fire#14, fieriness, 1, inDangerNeighbours, 3, burningNeighbours, 2,"
    " localisation, 20|25, time, 7)"
)
SAMPLE_FIRE_ALIASED = "(fire#266324026, f, 1, bn, 3, idn, 5, l, 22991200|3525000, t, 29)"
SAMPLE_FIRE_ALIASED_CANONICAL = (
    "(fire#266324026, fieriness, 1, burningNeighbours, 3, inDangerNeighbours, 5,"
    " localisation, 22991200|3525000, time, 29)"
)


@pytest.fixture(scope="session")
def schema():
    return bundled_rcr_schema()
