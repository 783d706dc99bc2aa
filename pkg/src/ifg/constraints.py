"""Terms, unification constraints, and constraint sets.

A constraint couples an identification set with labeled access relations:
``[[A,B],(l,C)]`` reads "A and B denote the same feature structure, and
attribute l of that structure is C".  Terms are either variables or
atomic constants.  A constraint set is a finite sequence of constraints,
or the distinguished impossible set ``TOP`` that no structure satisfies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class Variable:
    """A feature-structure variable.

    Carries a human-readable base name plus a freshness counter so that
    renamed copies stay legible in debug output.  Identity is exact: two
    variables are equal iff base and index both match.
    """

    base: str
    index: int = 0

    def __str__(self) -> str:
        return self.base if self.index == 0 else f"{self.base}_{self.index}"

    def __repr__(self) -> str:
        return str(self)


@dataclass(frozen=True, slots=True)
class Constant:
    """An atomic feature structure such as ``sg`` or ``read``."""

    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


Term = Union[Variable, Constant]
Label = str


class NameSupply:
    """Issues variables whose (base, index) identity is session-unique.

    A single supply hands out strictly increasing indexes, so variables
    created through it never collide with each other nor with parse-time
    variables, which always carry index 0.
    """

    def __init__(self, start: int = 1):
        self._next = start

    def fresh(self, base: str = "V") -> Variable:
        v = Variable(base, self._next)
        self._next += 1
        return v


@dataclass(frozen=True)
class Constraint:
    """One identification set plus its access relations.

    ``ident`` lists the terms that must denote a single structure; order
    is preserved for deterministic output and duplicates are silently
    dropped, keeping the first occurrence.  Each ``(label, term)`` pair in
    ``access`` gives the value of one attribute of that structure.
    """

    ident: tuple[Term, ...]
    access: tuple[tuple[Label, Term], ...] = ()

    def __post_init__(self):
        seen = []
        for t in self.ident:
            if t not in seen:
                seen.append(t)
        if not seen:
            raise ValueError("identification set must contain at least one term")
        object.__setattr__(self, "ident", tuple(seen))
        object.__setattr__(self, "access", tuple((l, t) for l, t in self.access))

    def terms(self) -> Iterator[Term]:
        yield from self.ident
        for _, t in self.access:
            yield t

    def labels(self) -> list[Label]:
        return [l for l, _ in self.access]

    def __str__(self) -> str:
        parts = ["[" + ",".join(str(t) for t in self.ident) + "]"]
        parts.extend(f"({l},{t})" for l, t in self.access)
        return "[" + ",".join(parts) + "]"

    def __repr__(self) -> str:
        return str(self)


@dataclass(frozen=True)
class ConstraintSet:
    """A finite sequence of constraints, or the impossible set ``TOP``."""

    constraints: tuple[Constraint, ...] = ()
    top: bool = False

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.top and self.constraints:
            raise ValueError("TOP carries no constraints")

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def terms(self) -> Iterator[Term]:
        for c in self.constraints:
            yield from c.terms()

    def variables(self) -> list[Variable]:
        """Variables in document order, without duplicates."""
        out: list[Variable] = []
        seen = set()
        for t in self.terms():
            if isinstance(t, Variable) and t not in seen:
                seen.add(t)
                out.append(t)
        return out

    def __str__(self) -> str:
        if self.top:
            return "TOP"
        return "{" + ", ".join(str(c) for c in self.constraints) + "}"

    def __repr__(self) -> str:
        return str(self)


TOP = ConstraintSet(top=True)
EMPTY = ConstraintSet()
