"""Builders for the shipped fixture corpus.

``python -m interlevel.corpus [DIR]`` regenerates every JSON file in
src/interlevel/fixtures (or DIR).
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

from .algebra import TranslationGroup
from .pl_geometry import (
    WAVY_ROWS,
    PLFunction,
    PLInput,
    SimplicialComplex,
    circle_identity,
    extended_persistence,
    genus_two,
    klein_projection,
    octahedron,
    polygon,
    torus7,
    torus_projection,
)

SCHEMA_VERSION = 1

# vertex orders of two perfect functions on genus_two(), found by random search
GENUS_TWO_ORDERS = {
    "stacked": [1, 9, 10, 3, 6, 4, 8, 7, 5, 0, 2],
    "nested": [9, 8, 7, 0, 6, 3, 1, 4, 2, 5, 10],
}


def _pl(name, maximal, theta, field="Q") -> PLInput:
    X = SimplicialComplex.from_maximal(list(maximal) + [(v,) for v in theta])
    return PLInput(X, PLFunction({v: Fraction(x) for v, x in theta.items()}), field, name)


def interval() -> PLInput:
    return _pl("interval", [(0, 1), (1, 2), (2, 3)], {0: 0, 1: 2, 2: 1, 3: 3})


def circle_height() -> PLInput:
    return _pl("circle", polygon(4), {0: 0, 1: Fraction(1, 2), 2: 1, 3: Fraction(1, 3)})


def sphere_height() -> PLInput:
    return _pl("sphere", octahedron(), {0: 0, 1: 2, 2: 1, 3: 5, 4: 3, 5: 4})


def torus_height() -> PLInput:
    return _pl("torus", torus7(), {v: x for v, x in enumerate([0, 4, 2, 6, 1, 5, 3])})


def _critical_remap(X: SimplicialComplex, theta: dict) -> dict:
    """Send the critical values to 0, 1, 2, ... and spread the rest between them."""
    f = PLFunction(theta)
    ep = extended_persistence(X, f, "Q")
    crit = sorted({x for pairs in (ep.ordinary, ep.relative, ep.extended) for _, b, d in pairs for x in (b, d)})
    out = {}
    for v, x in theta.items():
        i = sum(1 for c in crit if c <= x) - 1
        if crit[i] == x:
            out[v] = Fraction(i)
            continue
        hi = crit[i + 1] if i + 1 < len(crit) else x + 1
        out[v] = i + (x - crit[i]) / (hi - crit[i])
    return out


def genus_two_height(kind: str) -> PLInput:
    X = SimplicialComplex.from_maximal(genus_two())
    order = GENUS_TWO_ORDERS[kind]
    theta = _critical_remap(X, {v: Fraction(r) for v, r in enumerate(order)})
    return PLInput(X, PLFunction(theta), "Q", f"genus2_{kind}")


def torus_circle() -> PLInput:
    return torus_projection(rows=WAVY_ROWS)


def klein_circle() -> PLInput:
    return klein_projection(rows=WAVY_ROWS)


def block_file(name: str, blocks: list, lambda0=None, field="Q") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "blocks",
        "name": name,
        "field": field,
        "gamma": TranslationGroup(lambda0).to_json(),
        "blocks": blocks,
    }


def block_files() -> dict[str, dict]:
    return {
        "block_peup": block_file("block_peup", [{"kind": "PEup", "a": "0", "L": "1", "k": 0}]),
        "block_pedown": block_file("block_pedown", [{"kind": "PEdown", "b": "1", "L": "1", "k": 0}]),
        "block_pm": block_file("block_pm", [{"kind": "PM", "a": "0", "b": "1", "k": 0}]),
        "block_pr": block_file("block_pr", [{"kind": "PR", "T": [{"0": "-1", "1": "1"}], "k": 0}], lambda0=1),
        "block_mixed": block_file(
            "block_mixed",
            [
                {"kind": "PM", "a": "0", "b": "3/2", "k": 0},
                {"kind": "PM", "a": "1", "b": "1/2", "k": 1},
                {"kind": "PEup", "a": "1/3", "L": "2", "k": 0},
                {"kind": "PEdown", "b": "2", "L": "1/2", "k": 1},
                {"kind": "PR", "T": [{"0": "-1", "1": "1"}, {"0": "1", "1": "-2", "2": "1"}], "k": 1},
            ],
            lambda0=1,
        ),
    }


def _pn_file(name: str, n: int, degrees: dict, D: dict, lambda0=None, field="Q") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "pn",
        "name": name,
        "field": field,
        "gamma": TranslationGroup(lambda0).to_json(),
        "n": n,
        "degrees": degrees,
        "D": D,
    }


def pn_files() -> dict[str, dict]:
    one, zero = {"0": "1"}, {}
    out = {
        "pn_weakdualstrict": _pn_file(
            "pn_weakdualstrict",
            0,
            {"0": {"rank": 1, "values": ["0"], "S": [[one]]}},
            {"0": [[{"-1": "1", "1": "1"}]]},
            lambda0=1,
        )
    }
    pairings = {"stacked": [(0, 1), (2, 3)], "nested": [(0, 3), (1, 2)]}
    S1 = [[one if j in (i, i + 1) else zero for j in range(4)] for i in range(4)]
    for kind, pairs in pairings.items():
        J = [[zero] * 4 for _ in range(4)]
        for a, b in pairs:
            J[a][b], J[b][a] = one, {"0": "-1"}
        name = f"pn_genus2_{kind}"
        out[name] = _pn_file(
            name,
            2,
            {
                "0": {"rank": 1, "values": ["0"], "S": [[one]]},
                "1": {"rank": 4, "values": ["1", "2", "3", "4"], "S": S1},
                "2": {"rank": 1, "values": ["5"], "S": [[one]]},
            },
            {"0": [[one]], "1": J, "2": [[one]]},
        )
    return out


def pl_fixtures() -> dict[str, PLInput]:
    items = [
        interval(),
        circle_height(),
        sphere_height(),
        torus_height(),
        genus_two_height("stacked"),
        genus_two_height("nested"),
        circle_identity(),
        torus_circle(),
        klein_circle(),
    ]
    return {p.name: p for p in items}


def all_fixtures() -> dict[str, dict]:
    out = {}
    for name, p in pl_fixtures().items():
        out[name] = {"schema_version": SCHEMA_VERSION, "type": "pl", **p.to_json()}
    out.update(block_files())
    out.update(pn_files())
    return out


def write_all(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, data in all_fixtures().items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(data, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("fixtures")
    for p in write_all(target):
        print(p)
