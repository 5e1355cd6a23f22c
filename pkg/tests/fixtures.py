"""Operator tables transcribed by hand, cell by cell.

Cells are symbolic in the row index ``i`` and column index ``j``; lettered
cells refer to the conditional cases below each table. Nothing here imports
the package, so a mistake in the operator code cannot validate itself.
"""

import re

ENHANCED_HEADER = ["++^j", "+^j", "+?", "0", "-?", "-^j", "--^j", "?"]
ENHANCED_ROWS = ["++^i", "+^i", "+?", "0", "-?", "-^i", "--^i", "?"]

TIMES_ENHANCED = [
    ["++^{i+j}", "+^j", "+?", "0", "-?", "-^j", "--^{i+j}", "?"],
    ["+^i", "+^{i+j}", "+^i", "0", "-^i", "-^{i+j}", "-^i", "?"],
    ["+?", "+^j", "+?", "0", "-?", "-^j", "-?", "?"],
    ["0", "0", "0", "0", "0", "0", "0", "0"],
    ["-?", "-^j", "-?", "0", "+?", "+^j", "+?", "?"],
    ["-^i", "-^{i+j}", "-^i", "0", "+^i", "+^{i+j}", "+^i", "?"],
    ["--^{i+j}", "-^j", "-?", "0", "+?", "+^j", "++^{i+j}", "?"],
    ["?", "?", "?", "0", "?", "?", "?", "?"],
]

PLUS_ENHANCED = [
    ["++^m", "++^i", "++^i", "++^i", "?", "a)", "?", "?"],
    ["++^j", "+?", "+?", "+^i", "?", "?", "d)", "?"],
    ["++^j", "+?", "+?", "+?", "?", "?", "?", "?"],
    ["++^j", "+^j", "+?", "0", "-?", "-^j", "--^j", "?"],
    ["?", "?", "?", "-?", "-?", "-?", "--^j", "?"],
    ["b)", "?", "?", "-^i", "-?", "-?", "--^j", "?"],
    ["?", "c)", "?", "--^i", "--^i", "--^i", "--^m", "?"],
    ["?", "?", "?", "?", "?", "?", "?", "?"],
]

# letter -> (result, condition)
PLUS_CASES = {
    "a": ("+?", "i <= j"),
    "b": ("+?", "j <= i"),
    "c": ("-?", "i <= j"),
    "d": ("-?", "j <= i"),
}

REGULAR_SIGNS = ["+", "-", "0", "?"]
TIMES_REGULAR = [
    ["+", "-", "0", "?"],
    ["-", "+", "0", "?"],
    ["0", "0", "0", "0"],
    ["?", "?", "0", "?"],
]
PLUS_REGULAR = [
    ["+", "?", "+", "?"],
    ["?", "-", "-", "?"],
    ["+", "-", "0", "?"],
    ["?", "?", "?", "?"],
]

_INDEX = {
    "i": lambda i, j: i,
    "j": lambda i, j: j,
    "{i+j}": lambda i, j: i + j,
    "m": lambda i, j: min(i, j),
}


def instantiate(symbol: str, i: int, j: int) -> str:
    """Concrete sign token for a table symbol at indices ``i`` and ``j``."""
    case = re.fullmatch(r"([a-d])\)", symbol)
    if case:
        result, cond = PLUS_CASES[case.group(1)]
        holds = i <= j if cond == "i <= j" else j <= i
        return result if holds else "?"
    base, _, index = symbol.partition("^")
    if not index:
        return base
    return f"{base}^{_INDEX[index](i, j)}"


QPN_HEAD = "qpn 1\nnode A\nnode B\nnode C\n"
BN_HEAD = "bn 1\nnode A\nnode B A\n"

# malformed files: (parser, text, line, column) of the first offending token
MALFORMED = [
    ("qpn", "", 1, 1),
    ("qpn", "node A\n", 1, 1),
    ("qpn", "qpn 2\n", 1, 5),
    ("qpn", "qpn\n", 1, 4),
    ("qpn", "qpn 1 extra\n", 1, 7),
    ("qpn", QPN_HEAD + "influence A B ++^3\n", 5, 15),
    ("qpn", QPN_HEAD + "influence A Z +\n", 5, 13),
    ("qpn", QPN_HEAD + "influence A B\n", 5, 14),
    ("qpn", QPN_HEAD + "influence A B +++\n", 5, 15),
    ("qpn", QPN_HEAD + "influence A A +\n", 5, 13),
    ("qpn", QPN_HEAD + "influence A B +\ninfluence A B -\n", 6, 1),
    ("qpn", QPN_HEAD + "reverse A B +?\n", 5, 1),
    ("qpn", QPN_HEAD + "delta 1.5\n", 5, 7),
    ("qpn", QPN_HEAD + "delta abc\n", 5, 7),
    ("qpn", QPN_HEAD + "delta 0.3\ndelta 0.4\n", 6, 1),
    ("qpn", QPN_HEAD + "node A\n", 5, 6),
    ("qpn", QPN_HEAD + "node a-b\n", 5, 6),
    ("qpn", QPN_HEAD + "arc A B +\n", 5, 1),
    ("qpn", QPN_HEAD + "synergy A B C=maybe -?\n", 5, 13),
    ("qpn", QPN_HEAD + "synergy A A C=true -?\n", 5, 11),
    ("qpn", QPN_HEAD + "synergy A B C=true -?\nsynergy B A C=true -?\n", 6, 1),
    ("qpn", QPN_HEAD + "influence A B + # fine\n  influence B C ++ junk\n", 6, 20),
    ("bn", "bn 1\ncpt A : 0.5\n", 2, 5),
    ("bn", "bn 1\nnode A\ncpt A : 0.5\ncpt A : 0.5\n", 4, 5),
    ("bn", "bn 1\nnode A\ncpt A : 1.5\n", 3, 9),
    ("bn", "bn 1\nnode A\ncpt A : -0.1\n", 3, 9),
    ("bn", "bn 1\nnode A Q\n", 2, 8),
    ("bn", "bn 1\nnode A\nnode A\n", 3, 6),
    ("bn", BN_HEAD + "cpt A : 0.5\ncpt B | A=true : 0.1\n", 3, 6),
    ("bn", BN_HEAD + "cpt A : 0.5\ncpt B | X=true : 0.1\n", 5, 9),
    ("bn", BN_HEAD + "cpt A : 0.5\ncpt B | A=yes : 0.1\n", 5, 9),
    ("bn", BN_HEAD + "cpt A : 0.5\ncpt B : 0.1\n", 5, 7),
    ("bn", BN_HEAD + "cpt A : 0.5\ncpt B | A=true A=false : 0.1\n", 5, 16),
    ("bn", BN_HEAD + "cpt A 0.5\n", 4, 7),
    ("bn", BN_HEAD + "cpt A :\n", 4, 8),
    ("bn", BN_HEAD + "cpt A : 0.5 0.6\n", 4, 13),
    ("bn", "bn 1\nvariable A\n", 2, 1),
    ("bn", "qpn 1\n", 1, 1),
]
