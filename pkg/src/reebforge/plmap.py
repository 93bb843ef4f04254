"""Piecewise-linear maps given by exact rational vertex values."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .complex import SimplicialComplex
from .errors import DomainMismatch, InputError


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class PLMap:
    """Vertex values in [0, 1] plus a tie-breaking vertex permutation.

    Vertices are compared by ``(value, position in tie_break)``, which is a
    strict total order however many values coincide.
    """

    domain: SimplicialComplex = field(repr=False)
    values: Dict[int, Fraction] = field(hash=False)
    tie_break: Tuple[int, ...] = ()

    def __post_init__(self):
        vals = {int(v): as_fraction(x) for v, x in self.values.items()}
        object.__setattr__(self, "values", vals)
        verts = set(self.domain.vertices)
        if set(vals) != verts:
            missing = sorted(verts - set(vals))
            extra = sorted(set(vals) - verts)
            raise DomainMismatch(f"values do not match the domain (missing {missing[:5]}, extra {extra[:5]})")
        for v, x in vals.items():
            if not 0 <= x <= 1:
                raise InputError(f"value of vertex {v} is {x}, outside [0, 1]")
        tb = tuple(self.tie_break) if self.tie_break else tuple(sorted(verts))
        if len(tb) != len(verts) or set(tb) != verts:
            raise InputError("tie_break must be a permutation of the domain vertices")
        object.__setattr__(self, "tie_break", tb)

    @cached_property
    def rank(self) -> Dict[int, int]:
        return {v: i for i, v in enumerate(self.tie_break)}

    def key(self, v: int):
        return (self.values[v], self.rank[v])

    def below(self, u: int, v: int) -> bool:
        return self.key(u) < self.key(v)

    def ordered_vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.values, key=self.key))

    def level(self, value) -> Tuple[int, ...]:
        value = as_fraction(value)
        return tuple(sorted(v for v, x in self.values.items() if x == value))

    def preimage(self, value) -> SimplicialComplex:
        """Exact preimage of a vertex-attained value: the full subcomplex on it."""
        return self.domain.full_subcomplex(self.level(value))

    def with_values(self, values: Mapping[int, Fraction]) -> "PLMap":
        return PLMap(self.domain, dict(values), self.tie_break)

    @classmethod
    def from_order(cls, domain: SimplicialComplex, values: Mapping[int, Fraction],
                   order_key=None) -> "PLMap":
        """Build a map whose tie-break sorts vertices by ``(value, order_key)``."""
        order_key = order_key or (lambda v: v)
        tb = sorted(values, key=lambda v: (as_fraction(values[v]), order_key(v)))
        return cls(domain, dict(values), tuple(tb))


def rank_values(vertices: Sequence[int], lo: Fraction, hi: Fraction) -> Dict[int, Fraction]:
    """Spread an ordered vertex list injectively over the open interval (lo, hi)."""
    n = len(vertices)
    step = (hi - lo) / (n + 1)
    return {v: lo + step * (i + 1) for i, v in enumerate(vertices)}
