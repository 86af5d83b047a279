from __future__ import annotations

import pytest

from tangentgeom.connections import ChristoffelField, connection_from_christoffel, pullback_connection
from tangentgeom.dsl import parse_map

ACCEPTANCE_LINES: list[str] = []


def christoffel(n, entries):
    if isinstance(entries, dict):
        return connection_from_christoffel(ChristoffelField.sparse(n, entries))
    return connection_from_christoffel(ChristoffelField.parse(n, entries))


def battery():
    """(label, connection) pairs used by the FTF and lifting checks."""
    zero1 = christoffel(1, "0")
    zero2 = christoffel(2, "0")
    out = [
        ("zero n=1", zero1),
        ("zero n=2", zero2),
        ("n=1 G=1", christoffel(1, "1")),
        ("n=1 G=x0", christoffel(1, "x0")),
        ("n=1 G=sin(x0)", christoffel(1, "sin(x0)")),
        ("n=1 G=exp(x0)*x0^2-3", christoffel(1, "exp(x0)*x0^2-3")),
        ("pullback exp", pullback_connection(zero1, parse_map("exp(x0)", 1, 1), parse_map("log(x0)", 1, 1))),
        ("pullback shear", pullback_connection(zero2, parse_map("x0; x1+x0^2", 2, 2), parse_map("x0; x1-x0^2", 2, 2))),
        ("pullback exp-cubic", pullback_connection(
            zero2, parse_map("exp(x0); x1+x0^3", 2, 2), parse_map("log(x0); x1-log(x0)^3", 2, 2))),
        ("n=2 G^0_00=1", christoffel(2, {(0, 0, 0): "1"})),
        ("n=2 G^0_00=x0", christoffel(2, {(0, 0, 0): "x0"})),
        ("n=2 torsion G^0_01=1", christoffel(2, {(0, 0, 1): "1"})),
        ("n=2 torsion G^1_01=x0", christoffel(2, {(1, 0, 1): "x0"})),
        ("n=2 curvature G^0_00=x1", christoffel(2, {(0, 0, 0): "x1"})),
        ("n=2 curvature symmetric", christoffel(2, {(0, 0, 0): "x1", (1, 0, 1): "1", (1, 1, 0): "1"})),
    ]
    return out


@pytest.fixture(scope="session")
def connection_battery():
    return battery()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
