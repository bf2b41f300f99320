import pytest

from ctlenum import HampathInstance, KripkeModel, parse_formula

MICROWAVE_WORLDS = [
    ("w1", []),
    ("w2", ["Start", "Error"]),
    ("w3", ["Close"]),
    ("w4", ["Close", "Heat"]),
    ("w5", ["Start", "Close", "Error"]),
    ("w6", ["Start", "Close"]),
    ("w7", ["Start", "Close", "Heat"]),
]

MICROWAVE_EDGES = [
    ("w1", "w2"),
    ("w1", "w3"),
    ("w2", "w5"),
    ("w3", "w1"),
    ("w3", "w6"),
    ("w4", "w1"),
    ("w4", "w3"),
    ("w4", "w4"),
    ("w5", "w2"),
    ("w5", "w3"),
    ("w5", "w6"),
    ("w6", "w7"),
    ("w7", "w4"),
]


@pytest.fixture(scope="session")
def microwave():
    """Seven-world oven model, with the faulty (w5, w6) transition."""
    return KripkeModel.of(MICROWAVE_WORLDS, MICROWAVE_EDGES, "w1")


@pytest.fixture(scope="session")
def microwave_cut():
    """Same model with the faulty transition removed (12 edges)."""
    edges = [e for e in MICROWAVE_EDGES if e != ("w5", "w6")]
    return KripkeModel.of(MICROWAVE_WORLDS, edges, "w1")


@pytest.fixture(scope="session")
def microwave_formula():
    return parse_formula("AG (Error -> A[!Heat U !Start])")


@pytest.fixture(scope="session")
def cycle_counterexample():
    """Four worlds where EG EF x holds but no submodel satisfies AG AF x."""
    return KripkeModel.of(
        [("w1", []), ("w2", []), ("w3", ["x"]), ("w4", [])],
        [("w1", "w2"), ("w1", "w3"), ("w2", "w1"), ("w2", "w3"), ("w3", "w4"), ("w4", "w4")],
        "w1",
    )


@pytest.fixture(scope="session")
def revisit_example():
    """Five worlds admitting a submodel that revisits an x-world forever."""
    return KripkeModel.of(
        [("w1", []), ("w2", ["x"]), ("w3", ["x"]), ("w4", []), ("w5", [])],
        [
            ("w1", "w2"),
            ("w1", "w3"),
            ("w2", "w5"),
            ("w3", "w2"),
            ("w3", "w4"),
            ("w4", "w3"),
            ("w5", "w5"),
        ],
        "w1",
    )


@pytest.fixture(scope="session")
def two_world_model():
    return KripkeModel.of(
        [("r", []), ("w", [])], [("r", "r"), ("r", "w"), ("w", "w")], "r"
    )


@pytest.fixture(scope="session")
def xor_formula():
    return parse_formula("(x1 & !x2) | (!x1 & x2)")


@pytest.fixture(scope="session")
def square_digraph():
    """Four vertices with Hamiltonian path s, a, b, t."""
    return HampathInstance(
        vertices=("s", "a", "b", "t"),
        edges=(
            ("s", "a"),
            ("a", "b"),
            ("b", "a"),
            ("b", "t"),
            ("s", "b"),
            ("s", "t"),
            ("t", "a"),
        ),
        source="s",
        target="t",
    )
