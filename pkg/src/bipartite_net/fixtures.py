"""Built-in example networks g1-g4 and their weight matrices."""
from __future__ import annotations

import numpy as np

from .network import MatrixGraph

A_DEF = np.array([[3, 0, 2, 0], [0, 1, 0, 0], [2, 0, 3, 0], [0, 0, 0, 2]], float)
A1 = np.array([[2, 2, 0, 0], [2, 2, 0, 0], [0, 0, 1, -1], [0, 0, -1, 1]], float)
A2 = np.array([[3, 2, 0, 0], [2, 3, 0, 0], [0, 0, 3, -3], [0, 0, -3, 3]], float)
A3 = np.array([[4, 1, 0, 0], [1, 4, 0, 0], [0, 0, 1, -1], [0, 0, -1, 1]], float)
A4 = np.array([[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]], float)
A5 = np.array([[2, -2, 0, 0], [-2, 2, 0, 0], [0, 0, 5, 1], [0, 0, 1, 5]], float)
A6 = np.array([[3, 0, 1, 0], [0, 0, 0, 0], [1, 0, 2, 0], [0, 0, 0, 2]], float)
A7 = np.array([[2, 2, 0, 0], [2, 2, 0, 0], [0, 0, 3, -1], [0, 0, -1, 3]], float)
A8 = np.array([[0, 0, 0, 0], [0, 4, 1, 1], [0, 1, 3, 1], [0, 1, 1, 3]], float)

MATRICES = {"A_def": A_DEF, "A1": A1, "A2": A2, "A3": A3, "A4": A4,
            "A5": A5, "A6": A6, "A7": A7, "A8": A8}

# definite skeleton shared by g1, g3 and g4: continents {1,2,3} and {4,5,6}
_SKELETON = [(1, 2, -A_DEF), (2, 3, -A_DEF), (4, 5, A_DEF), (5, 6, -A_DEF)]


def _g1_edges():
    return _SKELETON + [
        (1, 3, -A1), (4, 6, A2), (1, 9, -A3), (2, 5, A4),
        (4, 9, -A4), (4, 8, -A4), (1, 7, A5), (7, 8, A6),
    ]


def g1() -> MatrixGraph:
    return MatrixGraph.from_edges(9, 4, _g1_edges())


def g2() -> MatrixGraph:
    return MatrixGraph.from_edges(7, 4, [
        (1, 2, A_DEF), (1, 3, A_DEF), (4, 5, A_DEF), (4, 6, -A_DEF),
        (2, 3, -A1), (5, 6, A2), (1, 7, A7), (4, 7, A8),
    ])


def g3() -> MatrixGraph:
    return g1().with_weights({(7, 8): A4})


def g4() -> MatrixGraph:
    return MatrixGraph.from_edges(9, 4, _SKELETON + [
        (1, 3, -A1), (4, 6, A1), (2, 5, A4), (1, 9, A5),
        (4, 9, -A6), (1, 7, -A3), (7, 8, A6), (4, 8, -A8),
    ])


BUILTINS = {"g1": g1, "g2": g2, "g3": g3, "g4": g4}

DESCRIPTIONS = {
    "g1": "two continents {1,2,3}, {4,5,6} joined by three semidefinite paths; all conditions hold",
    "g2": "two continents joined by one semidefinite path through node 7; Condition (1) fails",
    "g3": "g1 with W((7,8)) = A4; Condition (3) fails on path 1-7-8-4",
    "g4": "g1 topology with (1,7) in the balancing set; Condition (4) fails",
}


def builtin(name: str) -> MatrixGraph:
    try:
        return BUILTINS[name.lower()]()
    except KeyError:
        raise KeyError(f"unknown built-in network {name!r}; choose from {sorted(BUILTINS)}") from None
