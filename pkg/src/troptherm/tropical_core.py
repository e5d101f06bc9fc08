"""Scalar max-plus semiring and its pointwise vector extension.

Elements live in R ∪ {-inf, +inf} with ⊕ = max and ⊗ = +. The two
infinities are tagged states rather than IEEE floats, so the convention
(-inf) ⊗ (+inf) = -inf is enforced structurally and can never round-trip
through a NaN. Comparisons between finite values are exact; no tolerance
enters at this level.
"""

from __future__ import annotations

import math
from typing import Iterable, Union

_NEG, _FIN, _POS = -1, 0, 1

Number = Union[int, float]


class TropValue:
    """A single tropical scalar: a finite real or one of the two infinities."""

    __slots__ = ("_tag", "_num")

    def __init__(self, value: Number):
        value = float(value)
        if math.isnan(value):
            raise ValueError("NaN has no tropical meaning")
        if math.isinf(value):
            self._tag = _POS if value > 0 else _NEG
            self._num = 0.0
        else:
            self._tag = _FIN
            self._num = value

    @property
    def is_finite(self) -> bool:
        return self._tag == _FIN

    @property
    def is_neg_inf(self) -> bool:
        return self._tag == _NEG

    @property
    def is_pos_inf(self) -> bool:
        return self._tag == _POS

    @property
    def finite(self) -> float:
        """The finite payload; raises on infinities."""
        if self._tag != _FIN:
            raise ValueError("not a finite tropical value")
        return self._num

    def to_float(self) -> float:
        """IEEE view, for display and numeric hand-off only."""
        if self._tag == _NEG:
            return -math.inf
        if self._tag == _POS:
            return math.inf
        return self._num

    def _key(self):
        return (self._tag, self._num)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropValue):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: "TropValue") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "TropValue") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "TropValue") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "TropValue") -> bool:
        return self._key() >= other._key()

    def __repr__(self) -> str:
        if self._tag == _NEG:
            return "NEG_INF"
        if self._tag == _POS:
            return "POS_INF"
        return f"TropValue({self._num!r})"


NEG_INF = TropValue(-math.inf)
POS_INF = TropValue(math.inf)


def as_trop(x: Union[TropValue, Number]) -> TropValue:
    return x if isinstance(x, TropValue) else TropValue(x)


def t_add(a: TropValue, b: TropValue) -> TropValue:
    """Tropical addition: max under the order -inf < reals < +inf."""
    return a if a >= b else b


def t_mul(a: TropValue, b: TropValue) -> TropValue:
    """Tropical multiplication: ordinary +, with -inf absorbing +inf."""
    if a._tag == _NEG or b._tag == _NEG:
        return NEG_INF
    if a._tag == _POS or b._tag == _POS:
        return POS_INF
    return TropValue(a._num + b._num)


def trop_to_json(a: TropValue):
    """A number, or the sentinel strings \"-inf\" / \"+inf\"."""
    if a.is_neg_inf:
        return "-inf"
    if a.is_pos_inf:
        return "+inf"
    return a.finite


def trop_from_json(x) -> TropValue:
    if x == "-inf":
        return NEG_INF
    if x == "+inf":
        return POS_INF
    if isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x):
        return TropValue(x)
    raise ValueError(f"not a tropical JSON value: {x!r}")


class TropVector:
    """State-indexed table of tropical values (a function on a finite state set)."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[Union[TropValue, Number]]):
        vals = tuple(as_trop(e) for e in entries)
        if not vals:
            raise ValueError("a tropical vector needs at least one entry")
        self._entries = vals

    @classmethod
    def constant(cls, n: int, value: Union[TropValue, Number]) -> "TropVector":
        return cls([as_trop(value)] * n)

    @property
    def entries(self) -> tuple:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, i: int) -> TropValue:
        return self._entries[i]

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropVector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self) -> str:
        return f"TropVector({[trop_to_json(e) for e in self._entries]})"

    @property
    def is_finite(self) -> bool:
        return all(e.is_finite for e in self._entries)

    def sup(self) -> TropValue:
        """⊕ over all entries."""
        best = self._entries[0]
        for e in self._entries[1:]:
            if e > best:
                best = e
        return best

    def to_json(self) -> list:
        return [trop_to_json(e) for e in self._entries]

    @classmethod
    def from_json(cls, data: list) -> "TropVector":
        return cls([trop_from_json(x) for x in data])


def vec_add(u: TropVector, v: TropVector) -> TropVector:
    """Pointwise ⊕."""
    _check_len(u, v)
    return TropVector([t_add(a, b) for a, b in zip(u, v)])


def vec_scale(lam: TropValue, u: TropVector) -> TropVector:
    """Pointwise λ ⊗ u."""
    return TropVector([t_mul(lam, a) for a in u])


def vec_leq(u: TropVector, v: TropVector) -> bool:
    """Pointwise order u ≼ v."""
    _check_len(u, v)
    return all(a <= b for a, b in zip(u, v))


def residual(u: TropVector, v: TropVector) -> TropValue:
    """The residuation u ⊘ v = sup{λ : λ ⊗ v ≼ u}.

    Computed as the inf over states of u(x) - v(x) with the conventions:
    the term is +inf when v(x) = -inf (no constraint), -inf when
    v(x) = +inf and u(x) ≠ +inf (only λ = -inf survives, by the
    -inf ⊗ +inf = -inf convention), and an empty constraint set yields
    the top element.
    """
    _check_len(u, v)
    best = POS_INF
    for ux, vx in zip(u, v):
        if vx._tag == _NEG:
            term = POS_INF
        elif vx._tag == _POS:
            term = POS_INF if ux._tag == _POS else NEG_INF
        elif ux._tag == _NEG:
            term = NEG_INF
        elif ux._tag == _POS:
            term = POS_INF
        else:
            term = TropValue(ux._num - vx._num)
        if term < best:
            best = term
    return best


def sup_distance(u: TropVector, v: TropVector) -> float:
    """Sup-norm distance as a plain float.

    Entries that are the same infinity contribute 0; a mismatch involving
    an infinity contributes +inf.
    """
    _check_len(u, v)
    worst = 0.0
    for a, b in zip(u, v):
        if a._tag != b._tag:
            return math.inf
        if a._tag == _FIN:
            d = abs(a._num - b._num)
            if d > worst:
                worst = d
    return worst


def _check_len(u: TropVector, v: TropVector) -> None:
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
