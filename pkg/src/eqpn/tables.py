"""Symbolic rendering of the operator tables.

Cells are recovered by probing the operators with concrete index pairs and
naming the resulting index (``i+j``, ``i``, ``j`` or ``m = min(i, j)``) or,
where the outcome depends on how ``i`` and ``j`` compare, a lettered case.
"""

from __future__ import annotations

from eqpn.signs import (
    EnhancedSign,
    Kind,
    RegularSign,
    plus_enhanced,
    plus_regular,
    times_enhanced,
    times_regular,
)

_PROBES = [(1, 2), (2, 1), (2, 2), (3, 5), (5, 3), (4, 4), (0, 3), (3, 0)]
_ORDER = [Kind.POS_STRONG, Kind.POS_WEAK, Kind.POS_AMBIGUOUS, Kind.ZERO, Kind.NEG_AMBIGUOUS, Kind.NEG_WEAK, Kind.NEG_STRONG, Kind.UNKNOWN]
_INDEX_EXPRS = [
    ("i+j", lambda i, j: i + j),
    ("i", lambda i, j: i),
    ("j", lambda i, j: j),
    ("m", min),
]
_CONDITIONS = [
    ("i ≤ j", lambda i, j: i <= j),
    ("j ≤ i", lambda i, j: j <= i),
]


def _label(kind: Kind, var: str) -> str:
    return f"{kind.value}^{var}" if kind.indexed else kind.value


def _make(kind: Kind, index: int) -> EnhancedSign:
    return EnhancedSign(kind, index if kind.indexed else None)


def _symbol(results: list[tuple[int, int, EnhancedSign]]) -> str:
    kinds = {r.kind for _, _, r in results}
    if len(kinds) != 1:
        raise ValueError("conditional cell")
    kind = kinds.pop()
    if not kind.indexed:
        return kind.value
    for name, fn in _INDEX_EXPRS:
        if all(r.index == fn(i, j) for i, j, r in results):
            return f"{kind.value}^{name}" if len(name) == 1 else f"{kind.value}^{{{name}}}"
    raise ValueError(f"index of {kind.value} not expressible in i and j")


def _conditional(results) -> tuple[str, str]:
    """(result symbol, condition) for a cell that is ``?`` unless the condition holds."""
    determinate = [r for _, _, r in results if r.kind is not Kind.UNKNOWN]
    symbol = _symbol([x for x in results if x[2].kind is not Kind.UNKNOWN])
    for cond, fn in _CONDITIONS:
        if all((r.kind is not Kind.UNKNOWN) == fn(i, j) for i, j, r in results):
            return symbol, cond
    raise ValueError(f"no case condition explains {determinate}")


def enhanced_table(op: str) -> tuple[list[str], list[list[str]], list[str]]:
    """Header, rows and legend lines for the enhanced ``times`` or ``plus`` operator."""
    fn = {"times": times_enhanced, "plus": plus_enhanced}[op]
    cells: dict[tuple[Kind, Kind], str] = {}
    cases: dict[tuple[Kind, Kind], tuple[str, str]] = {}
    uses_min = False
    for a in _ORDER:
        for b in _ORDER:
            results = [(i, j, fn(_make(a, i), _make(b, j))) for i, j in _PROBES]
            try:
                cells[(a, b)] = _symbol(results)
                uses_min |= cells[(a, b)].endswith("^m")
            except ValueError:
                cases[(a, b)] = _conditional(results)
    # letters: positive results before negative, i ≤ j before j ≤ i
    ordered = sorted(set(cases.values()), key=lambda c: (not c[0].startswith("+"), c[1] != "i ≤ j"))
    letters = {case: "abcdefgh"[k] for k, case in enumerate(ordered)}
    for cell, case in cases.items():
        cells[cell] = f"{letters[case]})"
    header = ["⊗" if op == "times" else "⊕"] + [_label(b, "j") for b in _ORDER]
    rows = [[_label(a, "i")] + [cells[(a, b)] for b in _ORDER] for a in _ORDER]
    legend = []
    if uses_min:
        legend.append("where m = min(i, j),")
    for case in ordered:
        symbol, cond = case
        legend.append(f"{letters[case]}) {symbol}, if {cond}; ?, otherwise")
    return header, rows, legend


def regular_table(op: str) -> tuple[list[str], list[list[str]], list[str]]:
    fn = {"times": times_regular, "plus": plus_regular}[op]
    signs = [RegularSign.PLUS, RegularSign.MINUS, RegularSign.ZERO, RegularSign.UNKNOWN]
    header = ["⊗" if op == "times" else "⊕"] + [s.value for s in signs]
    rows = [[a.value] + [fn(a, b).value for b in signs] for a in signs]
    return header, rows, []


def render_table(op: str, mode: str) -> str:
    header, rows, legend = enhanced_table(op) if mode == "enhanced" else regular_table(op)
    grid = [header] + rows
    width = max(len(c) for r in grid for c in r)
    lines = ["  ".join(c.ljust(width) for c in r).rstrip() for r in grid]
    if legend:
        lines.append("")
        lines.extend(legend)
    return "\n".join(lines) + "\n"
