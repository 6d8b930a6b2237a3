"""Built-in reference experiment instance.

A hand-built two-tree forest of height 2 over three binary attributes whose
exact normalized forecast for the reference input is 0.1596 (raw forecast
0.5596 on leaf labels spanning [0.4, 1.4]).  At grid size t = 32 the nearest
estimate on the sin^2(pi k / 32) grid is sin^2(pi/8) ~= 0.14645, which a
single run returns with high probability, so repeated runs reproduce the
expected classical/quantum pair (0.1596, 0.14645).
"""
from __future__ import annotations

from .model import Attribute, DecisionTree, InputObject, Predicate, RandomForest

REFERENCE_T = 32
REFERENCE_RUNS = 10


def reference_forest() -> RandomForest:
    binary = Attribute("discrete", 2)
    tree0 = DecisionTree(
        height=2,
        nodes={
            1: Predicate("equals", 1, 2.0),
            2: Predicate("equals", 2, 2.0),
            3: Predicate("equals", 3, 1.0),
        },
        leaves={4: 0.5, 5: 1.4, 6: 0.4, 7: 0.9},
    )
    tree1 = DecisionTree(
        height=2,
        nodes={
            1: Predicate("equals", 3, 1.0),
            2: Predicate("equals", 2, 1.0),
            3: Predicate("equals", 1, 1.0),
        },
        leaves={4: 0.4, 5: 1.4, 6: 0.7, 7: 0.6192},
    )
    return RandomForest((tree0, tree1), (binary, binary, binary))


def reference_input() -> InputObject:
    return InputObject.of(1, 1, 1)
