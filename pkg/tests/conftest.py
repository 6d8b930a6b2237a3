import numpy as np
import pytest

from qrforest.model import (
    Attribute,
    DecisionTree,
    InputObject,
    Predicate,
    RandomForest,
    generate_random_forest,
    generate_random_input,
)
from qrforest.reference import reference_forest, reference_input

MIXED_SCHEMA = (
    Attribute("real"),
    Attribute("discrete", 2),
    Attribute("discrete", 3),
    Attribute("real"),
)


@pytest.fixture
def reference():
    return reference_forest(), reference_input()


def random_instance(n, h, seed, schema=MIXED_SCHEMA, value_range=(-1.0, 3.0)):
    """Seeded (forest, input) pair over a schema mixing attribute kinds."""
    forest = generate_random_forest(n, h, schema, value_range, seed)
    return forest, generate_random_input(schema, seed + 10_000)


def two_leaf_tree(false_label=3.0, true_label=7.0, threshold=0.5):
    return DecisionTree(
        height=1,
        nodes={1: Predicate("threshold-greater", 1, threshold)},
        leaves={2: false_label, 3: true_label},
    )


def single_attr_forest(*trees):
    return RandomForest(tuple(trees), (Attribute("real"),))


def random_statevector(num_qubits, rng):
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return amps / np.linalg.norm(amps)


def random_unitary_2x2(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(a)
    return q @ np.diag(np.diagonal(r) / np.abs(np.diagonal(r)))


def gate_menu(num_qubits, rng):
    """One randomly parameterized gate of every kind, on random qubits."""
    from qrforest import gates as g

    def pick(k):
        return tuple(int(q) for q in rng.choice(num_qubits, size=k, replace=False))

    (q1,) = pick(1)
    c1, t1 = pick(2)
    a2, b2 = pick(2)
    cs, csa, csb = pick(3)
    sel = pick(3)
    menu = [
        ("h", g.h(q1)),
        ("x", g.x(q1)),
        ("ry", g.ry(q1, float(rng.uniform(-2 * np.pi, 2 * np.pi)))),
        ("u", g.one_qubit(q1, random_unitary_2x2(rng))),
        ("cnot", g.cnot(c1, t1)),
        ("anti-controlled-x", g.Gate("x", (t1,), controls=((c1, 0),))),
        ("swap", g.swap(a2, b2)),
        ("controlled-swap", g.Gate("swap", (csa, csb), controls=((cs, 1),))),
        ("ucg", g.ucg(sel[:-1], sel[-1], [random_unitary_2x2(rng) for _ in range(4)])),
        ("ucr", g.ucr(sel[:-1], sel[-1], rng.uniform(-np.pi, np.pi, size=4))),
        ("reflection", g.reflection_about_zero(tuple(range(num_qubits)))),
        ("z", g.pauli_z(q1)),
    ]
    return menu


def mean_forecast_oracle(forest, x):
    """Independent forecast: explicit per-tree recursive walks, then sum/divide."""
    total = 0.0
    for tree in forest.trees:
        total += recursive_walk_oracle(tree, x)[1]
    return total / len(forest.trees)


def recursive_walk_oracle(tree, x):
    """Recursive-descent walk over an explicitly linked tree (no heap
    index arithmetic); returns (leaf index, label)."""

    class Node:
        def __init__(self, index):
            self.index = index
            if index in tree.leaves:
                self.label, self.pred = tree.leaves[index], None
            else:
                self.pred = tree.nodes[index]
                self.low = Node(2 * index)
                self.high = Node(2 * index + 1)

    def descend(node):
        if node.pred is None:
            return node.index, node.label
        return descend(node.high if node.pred.evaluate(x.values) else node.low)

    return descend(Node(1))


__all__ = [
    "MIXED_SCHEMA",
    "random_instance",
    "two_leaf_tree",
    "single_attr_forest",
    "random_statevector",
    "mean_forecast_oracle",
    "recursive_walk_oracle",
    "reference_forest",
    "reference_input",
    "InputObject",
]
