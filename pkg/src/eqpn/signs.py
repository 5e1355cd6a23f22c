"""Regular and enhanced qualitative signs, with their product and sum operators.

An enhanced sign splits the regular ``+``/``-`` into three magnitudes:
strong (``++``/``--``), weak (``+``/``-``) and ambiguous (``+?``/``-?``).
Strong and weak signs carry a multiplication index ``i``: a strong sign with
index ``i`` bounds a probability difference from below by ``delta**i``, a weak
sign bounds it from above by ``delta**i``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "Kind",
    "EnhancedSign",
    "RegularSign",
    "SignParseError",
    "pos_strong",
    "pos_weak",
    "neg_strong",
    "neg_weak",
    "POS_AMBIGUOUS",
    "NEG_AMBIGUOUS",
    "ZERO",
    "UNKNOWN",
    "times_enhanced",
    "plus_enhanced",
    "times_regular",
    "plus_regular",
    "strip",
    "negate",
    "all_enhanced_signs",
]


class SignParseError(ValueError):
    """Raised for a token outside the sign grammar."""


class Kind(enum.Enum):
    POS_STRONG = "++"
    POS_WEAK = "+"
    POS_AMBIGUOUS = "+?"
    ZERO = "0"
    NEG_AMBIGUOUS = "-?"
    NEG_WEAK = "-"
    NEG_STRONG = "--"
    UNKNOWN = "?"

    @property
    def indexed(self) -> bool:
        return self in _INDEXED

    @property
    def direction(self) -> Optional[int]:
        """+1, -1, 0, or None for ``?``."""
        return _DIRECTION[self]

    @property
    def magnitude(self) -> Optional[str]:
        """'strong', 'weak', 'ambiguous', or None for ``0`` and ``?``."""
        return _MAGNITUDE[self]


_INDEXED = frozenset({Kind.POS_STRONG, Kind.POS_WEAK, Kind.NEG_WEAK, Kind.NEG_STRONG})
_DIRECTION = {
    Kind.POS_STRONG: 1,
    Kind.POS_WEAK: 1,
    Kind.POS_AMBIGUOUS: 1,
    Kind.ZERO: 0,
    Kind.NEG_AMBIGUOUS: -1,
    Kind.NEG_WEAK: -1,
    Kind.NEG_STRONG: -1,
    Kind.UNKNOWN: None,
}
_MAGNITUDE = {
    Kind.POS_STRONG: "strong",
    Kind.POS_WEAK: "weak",
    Kind.POS_AMBIGUOUS: "ambiguous",
    Kind.ZERO: None,
    Kind.NEG_AMBIGUOUS: "ambiguous",
    Kind.NEG_WEAK: "weak",
    Kind.NEG_STRONG: "strong",
    Kind.UNKNOWN: None,
}
_BY_PARTS = {
    (d, m): k for k, d in _DIRECTION.items() for m in [_MAGNITUDE[k]] if m is not None
}

_TOKEN_RE = re.compile(r"^(\+\+|--|\+|-)(?:\^(\d+))?$")


@dataclass(frozen=True)
class EnhancedSign:
    kind: Kind
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind.indexed:
            if not isinstance(self.index, int) or isinstance(self.index, bool):
                raise ValueError(f"{self.kind.value} requires an integer index")
            if self.index < 0:
                raise ValueError(f"negative multiplication index {self.index}")
        elif self.index is not None:
            raise ValueError(f"{self.kind.value} carries no index")

    @classmethod
    def build(cls, direction: Optional[int], magnitude: Optional[str], index: Optional[int] = None) -> EnhancedSign:
        if direction is None:
            return UNKNOWN
        if direction == 0:
            return ZERO
        kind = _BY_PARTS[(direction, magnitude)]
        return cls(kind, index if kind.indexed else None)

    @property
    def direction(self) -> Optional[int]:
        return self.kind.direction

    @property
    def magnitude(self) -> Optional[str]:
        return self.kind.magnitude

    @property
    def is_strong(self) -> bool:
        return self.magnitude == "strong"

    @property
    def is_weak(self) -> bool:
        return self.magnitude == "weak"

    @property
    def is_ambiguous(self) -> bool:
        return self.magnitude == "ambiguous"

    def with_index(self, index: int) -> EnhancedSign:
        return EnhancedSign(self.kind, index)

    @classmethod
    def parse(cls, token: str) -> EnhancedSign:
        """Parse ``++^i``, ``+^i``, ``+?``, ``0``, ``-?``, ``-^i``, ``--^i`` or ``?``.

        A missing ``^i`` suffix means index 1.
        """
        for k in (Kind.POS_AMBIGUOUS, Kind.NEG_AMBIGUOUS, Kind.ZERO, Kind.UNKNOWN):
            if token == k.value:
                return cls(k)
        m = _TOKEN_RE.match(token)
        if not m:
            raise SignParseError(f"not a sign token: {token!r}")
        kind = Kind(m.group(1))
        return cls(kind, int(m.group(2)) if m.group(2) is not None else 1)

    def __str__(self) -> str:
        if self.kind.indexed and self.index != 1:
            return f"{self.kind.value}^{self.index}"
        return self.kind.value

    def __repr__(self) -> str:
        return f"EnhancedSign({self})"

    def __mul__(self, other: EnhancedSign) -> EnhancedSign:
        return times_enhanced(self, other)

    def __add__(self, other: EnhancedSign) -> EnhancedSign:
        return plus_enhanced(self, other)

    def __neg__(self) -> EnhancedSign:
        return negate(self)


def pos_strong(index: int = 1) -> EnhancedSign:
    return EnhancedSign(Kind.POS_STRONG, index)


def pos_weak(index: int = 1) -> EnhancedSign:
    return EnhancedSign(Kind.POS_WEAK, index)


def neg_strong(index: int = 1) -> EnhancedSign:
    return EnhancedSign(Kind.NEG_STRONG, index)


def neg_weak(index: int = 1) -> EnhancedSign:
    return EnhancedSign(Kind.NEG_WEAK, index)


POS_AMBIGUOUS = EnhancedSign(Kind.POS_AMBIGUOUS)
NEG_AMBIGUOUS = EnhancedSign(Kind.NEG_AMBIGUOUS)
ZERO = EnhancedSign(Kind.ZERO)
UNKNOWN = EnhancedSign(Kind.UNKNOWN)


def all_enhanced_signs(indices=range(5)) -> list[EnhancedSign]:
    """Every enhanced sign, with the indexed variants instantiated over ``indices``."""
    out = []
    for k in Kind:
        if k.indexed:
            out.extend(EnhancedSign(k, i) for i in indices)
        else:
            out.append(EnhancedSign(k))
    return out


def times_enhanced(a: EnhancedSign, b: EnhancedSign) -> EnhancedSign:
    """Enhanced product of two signs (sign along a trail)."""
    if a.kind is Kind.ZERO or b.kind is Kind.ZERO:
        return ZERO
    if a.kind is Kind.UNKNOWN or b.kind is Kind.UNKNOWN:
        return UNKNOWN
    direction = a.direction * b.direction
    match (a.magnitude, b.magnitude):
        case ("strong", "strong"):
            return EnhancedSign.build(direction, "strong", a.index + b.index)
        case ("weak", "weak"):
            return EnhancedSign.build(direction, "weak", a.index + b.index)
        case ("weak", _):
            # a weak factor bounds the product by its own delta power
            return EnhancedSign.build(direction, "weak", a.index)
        case (_, "weak"):
            return EnhancedSign.build(direction, "weak", b.index)
        case _:
            return EnhancedSign.build(direction, "ambiguous")


def plus_enhanced(a: EnhancedSign, b: EnhancedSign) -> EnhancedSign:
    """Enhanced sum of two signs (parallel trails). Not associative."""
    if a.kind is Kind.UNKNOWN or b.kind is Kind.UNKNOWN:
        return UNKNOWN
    if a.kind is Kind.ZERO:
        return b
    if b.kind is Kind.ZERO:
        return a
    if a.direction == b.direction:
        match (a.magnitude, b.magnitude):
            case ("strong", "strong"):
                return a.with_index(min(a.index, b.index))
            case ("strong", _):
                return a
            case (_, "strong"):
                return b
            case _:
                return EnhancedSign.build(a.direction, "ambiguous")
    # opposite directions: only a strong term facing a weak term of no smaller
    # index keeps its direction
    match (a.magnitude, b.magnitude):
        case ("strong", "weak") if a.index <= b.index:
            return EnhancedSign.build(a.direction, "ambiguous")
        case ("weak", "strong") if b.index <= a.index:
            return EnhancedSign.build(b.direction, "ambiguous")
        case _:
            return UNKNOWN


def strip(a: EnhancedSign) -> RegularSign:
    """Forget magnitude and index."""
    return _STRIP[a.direction]


def negate(a: EnhancedSign) -> EnhancedSign:
    if a.direction in (0, None):
        return a
    return EnhancedSign.build(-a.direction, a.magnitude, a.index)


class RegularSign(enum.Enum):
    PLUS = "+"
    MINUS = "-"
    ZERO = "0"
    UNKNOWN = "?"

    @classmethod
    def parse(cls, token: str) -> RegularSign:
        try:
            return cls(token)
        except ValueError:
            raise SignParseError(f"not a regular sign token: {token!r}") from None

    def __str__(self) -> str:
        return self.value

    def __mul__(self, other: RegularSign) -> RegularSign:
        return times_regular(self, other)

    def __add__(self, other: RegularSign) -> RegularSign:
        return plus_regular(self, other)

    def __neg__(self) -> RegularSign:
        return {RegularSign.PLUS: RegularSign.MINUS, RegularSign.MINUS: RegularSign.PLUS}.get(self, self)


_STRIP = {1: RegularSign.PLUS, -1: RegularSign.MINUS, 0: RegularSign.ZERO, None: RegularSign.UNKNOWN}

_P, _M, _Z, _Q = RegularSign.PLUS, RegularSign.MINUS, RegularSign.ZERO, RegularSign.UNKNOWN

_TIMES_REGULAR = {
    _P: {_P: _P, _M: _M, _Z: _Z, _Q: _Q},
    _M: {_P: _M, _M: _P, _Z: _Z, _Q: _Q},
    _Z: {_P: _Z, _M: _Z, _Z: _Z, _Q: _Z},
    _Q: {_P: _Q, _M: _Q, _Z: _Z, _Q: _Q},
}
_PLUS_REGULAR = {
    _P: {_P: _P, _M: _Q, _Z: _P, _Q: _Q},
    _M: {_P: _Q, _M: _M, _Z: _M, _Q: _Q},
    _Z: {_P: _P, _M: _M, _Z: _Z, _Q: _Q},
    _Q: {_P: _Q, _M: _Q, _Z: _Q, _Q: _Q},
}


def times_regular(a: RegularSign, b: RegularSign) -> RegularSign:
    return _TIMES_REGULAR[a][b]


def plus_regular(a: RegularSign, b: RegularSign) -> RegularSign:
    return _PLUS_REGULAR[a][b]
