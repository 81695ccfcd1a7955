"""Grading-group arithmetic.

Three carriers cover every grading we need on upper-triangular matrices:
free groups (reduced words), cyclic groups (residues) and arbitrary finite
groups given by a multiplication table.  Elements are immutable and
hashable, so they can serve as degree keys.  The module also provides
homomorphisms (used to induce coarser gradings from the fine one) and
partial involutive maps on a finite support.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Union

# A reduced free-group word: letters (generator index 1..rank, exponent +-1),
# with no adjacent cancelling pair.
Word = tuple[tuple[int, int], ...]


def _concat_reduce(left: Word, right: Word) -> Word:
    out = list(left)
    for gen, exp in right:
        if out and out[-1][0] == gen and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


def reduce_word(letters: Iterable[tuple[int, int]]) -> Word:
    """Cancel adjacent inverse pairs until no pair remains."""
    out: Word = ()
    for letter in letters:
        out = _concat_reduce(out, (letter,))
    return out


@dataclass(frozen=True)
class FreeGroup:
    """Free group on generators r1..r_rank (rank 0 gives the trivial group)."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError(f"free group rank must be >= 0, got {self.rank}")

    @property
    def kind(self) -> str:
        return "free"

    def identity(self) -> "GroupElement":
        return GroupElement(self, ())

    def generator(self, i: int) -> "GroupElement":
        if not 1 <= i <= self.rank:
            raise ValueError(f"generator index {i} outside 1..{self.rank}")
        return GroupElement(self, ((i, 1),))

    def generators(self) -> list["GroupElement"]:
        return [self.generator(i) for i in range(1, self.rank + 1)]

    def element(self, letters: Iterable[tuple[int, int]]) -> "GroupElement":
        word = reduce_word(letters)
        for gen, exp in word:
            if not 1 <= gen <= self.rank:
                raise ValueError(f"generator index {gen} outside 1..{self.rank}")
            if exp not in (1, -1):
                raise ValueError(f"letter exponent must be +-1, got {exp}")
        return GroupElement(self, word)

    def parse_element(self, text: str) -> "GroupElement":
        """Parse literals like "r1*r2^-1*r1"; "1" denotes the identity."""
        text = text.strip().replace(" ", "")
        if text == "1" or text == "":
            return self.identity()
        letters: list[tuple[int, int]] = []
        for piece in text.split("*"):
            mm = re.fullmatch(r"r(\d+)(\^-?\d+)?", piece)
            if mm is None:
                raise ValueError(f"bad free-group element literal: {piece!r}")
            gen = int(mm.group(1))
            power = int(mm.group(2)[1:]) if mm.group(2) else 1
            sign = 1 if power >= 0 else -1
            letters.extend((gen, sign) for _ in range(abs(power)))
        return self.element(letters)


@dataclass(frozen=True)
class CyclicGroup:
    """Cyclic group of the given order, written additively on residues."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"cyclic order must be >= 1, got {self.order}")

    @property
    def kind(self) -> str:
        return "cyclic"

    def identity(self) -> "GroupElement":
        return GroupElement(self, 0)

    def generator(self) -> "GroupElement":
        return GroupElement(self, 1 % self.order)

    def element(self, residue: int) -> "GroupElement":
        return GroupElement(self, residue % self.order)

    def elements(self) -> list["GroupElement"]:
        return [GroupElement(self, k) for k in range(self.order)]

    def parse_element(self, text: str) -> "GroupElement":
        return self.element(int(text))


@dataclass(frozen=True)
class TableGroup:
    """Finite group presented by its full multiplication table.

    table[a][b] is the index of the product ab.  Associativity, the identity
    and the existence of inverses are checked exhaustively at construction.
    """

    table: tuple[tuple[int, ...], ...]
    identity_index: int = 0

    def __post_init__(self):
        s = len(self.table)
        if s == 0:
            raise ValueError("empty multiplication table")
        for row in self.table:
            if len(row) != s or any(not 0 <= v < s for v in row):
                raise ValueError("multiplication table is not square over 0..size-1")
        e = self.identity_index
        if not 0 <= e < s:
            raise ValueError("identity index out of range")
        for a in range(s):
            if self.table[e][a] != a or self.table[a][e] != a:
                raise ValueError(f"{e} is not a two-sided identity")
        for a in range(s):
            if e not in self.table[a]:
                raise ValueError(f"element {a} has no inverse")
        for a in range(s):
            for b in range(s):
                for c in range(s):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError(f"table not associative at ({a},{b},{c})")

    @property
    def kind(self) -> str:
        return "table"

    @property
    def size(self) -> int:
        return len(self.table)

    def identity(self) -> "GroupElement":
        return GroupElement(self, self.identity_index)

    def element(self, index: int) -> "GroupElement":
        if not 0 <= index < self.size:
            raise ValueError(f"element index {index} outside 0..{self.size - 1}")
        return GroupElement(self, index)

    def elements(self) -> list["GroupElement"]:
        return [GroupElement(self, k) for k in range(self.size)]

    def inverse_index(self, a: int) -> int:
        return self.table[a].index(self.identity_index)

    def parse_element(self, text: str) -> "GroupElement":
        return self.element(int(text))


Group = Union[FreeGroup, CyclicGroup, TableGroup]


@dataclass(frozen=True)
class GroupElement:
    """An element of one of the supported group kinds.

    The payload is a reduced word (free), a residue (cyclic) or a table
    index.  Elements compare and hash by (group, payload), so a reduced
    canonical form makes equality a plain comparison.
    """

    group: Group
    value: Union[Word, int]

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.group != other.group:
            raise ValueError(
                f"cannot multiply elements of {self.group} and {other.group}"
            )
        g = self.group
        if isinstance(g, FreeGroup):
            return GroupElement(g, _concat_reduce(self.value, other.value))
        if isinstance(g, CyclicGroup):
            return GroupElement(g, (self.value + other.value) % g.order)
        return GroupElement(g, g.table[self.value][other.value])

    def inverse(self) -> "GroupElement":
        g = self.group
        if isinstance(g, FreeGroup):
            return GroupElement(
                g, tuple((gen, -exp) for gen, exp in reversed(self.value))
            )
        if isinstance(g, CyclicGroup):
            return GroupElement(g, (-self.value) % g.order)
        return GroupElement(g, g.inverse_index(self.value))

    def __pow__(self, k: int) -> "GroupElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.group.identity()
        for _ in range(k):
            out = out * self
        return out

    def is_identity(self) -> bool:
        return self == self.group.identity()

    def sort_key(self):
        """Deterministic total order within one group (used for canonical
        block and support ordering)."""
        if isinstance(self.group, FreeGroup):
            return (len(self.value), self.value)
        return (0, self.value)

    def __str__(self) -> str:
        if isinstance(self.group, FreeGroup):
            if not self.value:
                return "1"
            return "*".join(
                f"r{gen}" if exp == 1 else f"r{gen}^-1" for gen, exp in self.value
            )
        return str(self.value)

    def __repr__(self) -> str:
        return f"<{self}>"


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism given by generator images (free or cyclic source) or by
    a full element map (table source).  Multiplicativity is validated on a
    generating set, exhaustively for table sources."""

    source: Group
    target: Group
    images: tuple[GroupElement, ...]

    def __post_init__(self):
        for img in self.images:
            if img.group != self.target:
                raise ValueError("homomorphism image lies outside the target group")
        if isinstance(self.source, FreeGroup):
            if len(self.images) != self.source.rank:
                raise ValueError(
                    f"need {self.source.rank} generator images, got {len(self.images)}"
                )
        elif isinstance(self.source, CyclicGroup):
            if len(self.images) != 1:
                raise ValueError("cyclic source needs exactly one generator image")
            if not (self.images[0] ** self.source.order).is_identity():
                raise ValueError(
                    "generator image order does not divide the cyclic order"
                )
        else:
            if len(self.images) != self.source.size:
                raise ValueError("table source needs the full element map")
            if not self.images[self.source.identity_index].is_identity():
                raise ValueError("identity must map to identity")
            for a in range(self.source.size):
                for b in range(self.source.size):
                    lhs = self.images[self.source.table[a][b]]
                    rhs = self.images[a] * self.images[b]
                    if lhs != rhs:
                        raise ValueError(f"map is not multiplicative at ({a},{b})")

    def __call__(self, a: GroupElement) -> GroupElement:
        if a.group != self.source:
            raise ValueError("element does not belong to the source group")
        if isinstance(self.source, FreeGroup):
            out = self.target.identity()
            for gen, exp in a.value:
                img = self.images[gen - 1]
                out = out * (img if exp == 1 else img.inverse())
            return out
        if isinstance(self.source, CyclicGroup):
            return self.images[0] ** a.value
        return self.images[a.value]


@dataclass
class InvolutionCheck:
    """Outcome of checking a partial map against the involution axioms."""

    ok: bool
    message: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


class GroupInvolutionMap:
    """A partial map psi on a finite subset of a group (the grading support).

    Intended to satisfy psi(psi(g)) = g and psi(gh) = psi(h)psi(g) wherever
    the elements involved stay inside the domain; `check_involution_map`
    verifies exactly that.
    """

    def __init__(self, mapping: dict[GroupElement, GroupElement]):
        self.mapping = dict(mapping)

    def __call__(self, g: GroupElement) -> GroupElement:
        try:
            return self.mapping[g]
        except KeyError:
            raise KeyError(f"involution map undefined on {g}") from None

    def __contains__(self, g: GroupElement) -> bool:
        return g in self.mapping

    def domain(self) -> list[GroupElement]:
        return sorted(self.mapping, key=lambda g: g.sort_key())

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupInvolutionMap) and self.mapping == other.mapping

    def __repr__(self) -> str:
        pairs = ", ".join(f"{g} -> {h}" for g, h in sorted(
            self.mapping.items(), key=lambda kv: kv[0].sort_key()))
        return f"GroupInvolutionMap({pairs})"


def check_involution_map(
    psi: GroupInvolutionMap, support: Iterable[GroupElement]
) -> InvolutionCheck:
    """Verify psi o psi = id on the support and anti-multiplicativity on every
    composable triple inside it; report the first violation found."""
    supp = sorted(set(support), key=lambda g: g.sort_key())
    for g in supp:
        if g not in psi:
            raise KeyError(f"involution map undefined on support element {g}")
    supp_set = set(supp)
    for g in supp:
        h = psi(g)
        if h in supp_set and h in psi and psi(h) != g:
            return InvolutionCheck(
                False, f"psi(psi({g})) = {psi(h)} != {g}", (g, h)
            )
    for g, h in itertools.product(supp, repeat=2):
        gh = g * h
        if gh in supp_set:
            if psi(gh) != psi(h) * psi(g):
                return InvolutionCheck(
                    False,
                    f"psi({g}*{h}) = {psi(gh)} but psi({h})*psi({g}) = {psi(h) * psi(g)}",
                    (g, h),
                )
    return InvolutionCheck(True)


def group_from_json(obj: dict) -> Group:
    """Build a group from its JSON description.

    Schemas: {"kind":"free","rank":k}, {"kind":"cyclic","order":q},
    {"kind":"table","size":s,"mul":[[...]],"identity":e}.
    """
    kind = obj.get("kind")
    if kind == "free":
        return FreeGroup(int(obj["rank"]))
    if kind == "cyclic":
        return CyclicGroup(int(obj["order"]))
    if kind == "table":
        table = tuple(tuple(int(v) for v in row) for row in obj["mul"])
        if "size" in obj and int(obj["size"]) != len(table):
            raise ValueError("declared size does not match the table")
        return TableGroup(table, int(obj.get("identity", 0)))
    raise ValueError(f"unknown group kind: {kind!r}")


def group_to_json(group: Group) -> dict:
    if isinstance(group, FreeGroup):
        return {"kind": "free", "rank": group.rank}
    if isinstance(group, CyclicGroup):
        return {"kind": "cyclic", "order": group.order}
    return {
        "kind": "table",
        "size": group.size,
        "mul": [list(row) for row in group.table],
        "identity": group.identity_index,
    }
