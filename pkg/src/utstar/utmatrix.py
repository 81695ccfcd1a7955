"""Exact upper-triangular matrix algebra with involutions and gradings.

Matrices are sparse maps from 1-based positions (i, j), i <= j, to rational
entries.  Two involutions are supported: the orthogonal one (reflection
along the secondary diagonal) and, for even sizes, the symplectic one
(the same reflection conjugated by diag(1..1,-1..-1)).  Gradings are the
elementary ones, encoded by the degrees of the superdiagonal matrix units.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Union

from .errors import IncompatibleRequest
from .groups import (
    CyclicGroup,
    FreeGroup,
    Group,
    GroupElement,
    GroupHom,
    GroupInvolutionMap,
    check_involution_map,
    group_from_json,
    group_to_json,
)


class InvolutionKind(str, Enum):
    ORTHOGONAL = "orthogonal"
    SYMPLECTIC = "symplectic"


def _check_kind(kind: InvolutionKind, n: int) -> None:
    if kind == InvolutionKind.SYMPLECTIC and n % 2 != 0:
        raise IncompatibleRequest(
            f"the symplectic involution needs an even size, got n={n}"
        )


class UTMatrix:
    """Sparse upper-triangular matrix over the rationals (1-based indices)."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Optional[dict] = None):
        if n < 1:
            raise ValueError(f"matrix size must be >= 1, got {n}")
        self.n = n
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in (entries or {}).items():
            if not 1 <= i <= j <= n:
                raise ValueError(f"position ({i},{j}) not upper-triangular for n={n}")
            v = Fraction(v)
            if v:
                clean[(i, j)] = v
        self.entries = clean

    def __getitem__(self, pos: tuple[int, int]) -> Fraction:
        return self.entries.get(pos, Fraction(0))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UTMatrix)
            and self.n == other.n
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.n, frozenset(self.entries.items())))

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "UTMatrix") -> "UTMatrix":
        if self.n != other.n:
            raise ValueError("size mismatch")
        out = dict(self.entries)
        for pos, v in other.entries.items():
            out[pos] = out.get(pos, 0) + v
        return UTMatrix(self.n, out)

    def __sub__(self, other: "UTMatrix") -> "UTMatrix":
        return self + (-other)

    def __neg__(self) -> "UTMatrix":
        return UTMatrix(self.n, {pos: -v for pos, v in self.entries.items()})

    def scale(self, c) -> "UTMatrix":
        c = Fraction(c)
        return UTMatrix(self.n, {pos: c * v for pos, v in self.entries.items()})

    def __mul__(self, other: "UTMatrix") -> "UTMatrix":
        if self.n != other.n:
            raise ValueError("size mismatch")
        out: dict[tuple[int, int], Fraction] = {}
        cols: dict[int, list[tuple[int, Fraction]]] = {}
        for (k, j), v in other.entries.items():
            cols.setdefault(k, []).append((j, v))
        for (i, k), u in self.entries.items():
            for j, v in cols.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + u * v
        return UTMatrix(self.n, out)

    def __repr__(self) -> str:
        if not self.entries:
            return f"UTMatrix({self.n}, 0)"
        body = " + ".join(
            (f"e[{i},{j}]" if v == 1 else f"({v})*e[{i},{j}]")
            for (i, j), v in sorted(self.entries.items())
        )
        return f"UTMatrix({self.n}, {body})"


def matrix_unit(i: int, j: int, n: int) -> UTMatrix:
    if not 1 <= i <= j <= n:
        raise ValueError(f"matrix unit ({i},{j}) is not upper-triangular for n={n}")
    return UTMatrix(n, {(i, j): Fraction(1)})


def identity(n: int) -> UTMatrix:
    return UTMatrix(n, {(i, i): Fraction(1) for i in range(1, n + 1)})


def mat_mul(a: UTMatrix, b: UTMatrix) -> UTMatrix:
    return a * b


def mat_add(a: UTMatrix, b: UTMatrix) -> UTMatrix:
    return a + b


def star_unit_position(i: int, j: int, n: int, kind: InvolutionKind) -> tuple[int, tuple[int, int]]:
    """Image of the matrix unit (i, j) under the involution, as (sign, position).

    The reflection sends (i, j) to (n-j+1, n-i+1); the symplectic variant
    conjugates by D = diag(1..1,-1..-1), so the entry picks up the product of
    the two diagonal signs at the reflected position.
    """
    _check_kind(kind, n)
    i2, j2 = n - j + 1, n - i + 1
    if kind == InvolutionKind.ORTHOGONAL:
        return 1, (i2, j2)
    half = n // 2
    sign = (1 if i2 <= half else -1) * (1 if j2 <= half else -1)
    return sign, (i2, j2)


def apply_star(a: UTMatrix, kind: InvolutionKind) -> UTMatrix:
    _check_kind(kind, a.n)
    out: dict[tuple[int, int], Fraction] = {}
    for (i, j), v in a.entries.items():
        sign, pos = star_unit_position(i, j, a.n, kind)
        out[pos] = sign * v
    return UTMatrix(a.n, out)


def upper_positions(n: int) -> list[tuple[int, int]]:
    """All upper-triangular positions of an n x n matrix in row-major order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


@dataclass(frozen=True)
class ElementaryGrading:
    """Elementary grading of UT_n determined by the superdiagonal degrees.

    The degree of the unit e_{ij} is the product h_i h_{i+1} ... h_{j-1}
    (empty product = identity), which makes every matrix unit homogeneous
    and satisfies deg(e_{ij}) deg(e_{jk}) = deg(e_{ik}).
    """

    group: Group
    n: int
    superdiagonal: tuple[GroupElement, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.superdiagonal) != self.n - 1:
            raise ValueError(
                f"need {self.n - 1} superdiagonal degrees, got {len(self.superdiagonal)}"
            )
        for h in self.superdiagonal:
            if h.group != self.group:
                raise ValueError("superdiagonal degree outside the grading group")

    @cached_property
    def _degrees(self) -> dict[tuple[int, int], GroupElement]:
        deg: dict[tuple[int, int], GroupElement] = {}
        for i in range(1, self.n + 1):
            acc = self.group.identity()
            deg[(i, i)] = acc
            for j in range(i + 1, self.n + 1):
                acc = acc * self.superdiagonal[j - 2]
                deg[(i, j)] = acc
        return deg

    def degree(self, i: int, j: int) -> GroupElement:
        if not 1 <= i <= j <= self.n:
            raise ValueError(f"position ({i},{j}) not upper-triangular for n={self.n}")
        return self._degrees[(i, j)]

    @cached_property
    def support(self) -> tuple[GroupElement, ...]:
        return tuple(
            sorted(set(self._degrees.values()), key=lambda g: g.sort_key())
        )

    def component(self, g: GroupElement) -> list[tuple[int, int]]:
        """All unit positions of degree g (empty when g is not in the support)."""
        if g.group != self.group:
            raise ValueError("degree belongs to a different group")
        return [pos for pos in upper_positions(self.n) if self._degrees[pos] == g]

    def is_trivial(self) -> bool:
        return all(h.is_identity() for h in self.superdiagonal)

    def describe(self) -> str:
        if self.is_trivial():
            return f"trivial grading of UT_{self.n}"
        degs = ", ".join(str(h) for h in self.superdiagonal)
        return f"elementary grading of UT_{self.n} with superdiagonal ({degs})"


def trivial_grading(n: int, group: Optional[Group] = None) -> ElementaryGrading:
    group = group if group is not None else CyclicGroup(1)
    return ElementaryGrading(group, n, tuple(group.identity() for _ in range(n - 1)))


def fine_grading(n: int) -> ElementaryGrading:
    """The elementary grading by the free group on r_1..r_{n-1} that assigns
    r_i to the i-th superdiagonal unit; every grading of UT_n is induced from
    it by a group homomorphism."""
    fg = FreeGroup(n - 1)
    return ElementaryGrading(fg, n, tuple(fg.generators()))


def induce_grading(grading: ElementaryGrading, hom: GroupHom) -> ElementaryGrading:
    if hom.source != grading.group:
        raise ValueError("homomorphism source does not match the grading group")
    return ElementaryGrading(
        hom.target, grading.n, tuple(hom(h) for h in grading.superdiagonal)
    )


@dataclass
class HomInvolutionCert:
    """Certificate that an involution is homogeneous for a grading: the map
    psi with deg(e^*) = psi(deg e) for every matrix unit e."""

    grading: ElementaryGrading
    kind: InvolutionKind
    psi: GroupInvolutionMap


@dataclass
class HomogeneityConflict:
    """Two same-degree units whose starred images land in different
    components, or a psi that fails the involution-map axioms."""

    grading: ElementaryGrading
    kind: InvolutionKind
    message: str
    units: tuple = ()

    def __bool__(self) -> bool:
        return False


def homogeneous_involution_map(
    grading: ElementaryGrading, kind: InvolutionKind
) -> Union[HomInvolutionCert, HomogeneityConflict]:
    """Construct psi(g) = degree of e^* for a unit e of degree g, verify all
    units of degree g agree, and check the involution axioms on the support."""
    n = grading.n
    _check_kind(kind, n)
    psi_map: dict[GroupElement, GroupElement] = {}
    chosen: dict[GroupElement, tuple[int, int]] = {}
    for i, j in upper_positions(n):
        g = grading.degree(i, j)
        _, (i2, j2) = star_unit_position(i, j, n, kind)
        image = grading.degree(i2, j2)
        if g in psi_map:
            if psi_map[g] != image:
                return HomogeneityConflict(
                    grading,
                    kind,
                    f"units {chosen[g]} and ({i},{j}) share degree {g} but their "
                    f"starred images have degrees {psi_map[g]} and {image}",
                    (chosen[g], (i, j)),
                )
        else:
            psi_map[g] = image
            chosen[g] = (i, j)
    psi = GroupInvolutionMap(psi_map)
    check = check_involution_map(psi, grading.support)
    if not check:
        return HomogeneityConflict(
            grading, kind, f"induced map fails involution axioms: {check.message}",
            check.witness,
        )
    return HomInvolutionCert(grading, kind, psi)


def grading_from_json(obj: dict) -> ElementaryGrading:
    """Parse {"group": <group>, "n": n, "superdiagonal": ["<elt>", ...]}."""
    group = group_from_json(obj["group"])
    n = int(obj["n"])
    literals = obj["superdiagonal"]
    if len(literals) != n - 1:
        raise ValueError(f"need {n - 1} superdiagonal entries, got {len(literals)}")
    sup = tuple(group.parse_element(str(s)) for s in literals)
    return ElementaryGrading(group, n, sup)


def grading_to_json(grading: ElementaryGrading) -> dict:
    return {
        "group": group_to_json(grading.group),
        "n": grading.n,
        "superdiagonal": [str(h) for h in grading.superdiagonal],
    }
