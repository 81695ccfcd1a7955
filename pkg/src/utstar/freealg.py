"""Multilinear slice of the free associative algebra with involution.

A monomial is an ordered product of distinct variables, each occurrence
optionally starred, with an optional degree attached to every variable.
Polynomials are sparse rational combinations of such monomials.  On top of
that the module builds left-normed commutator expansions and the two
families whose linear independence drives the codimension bounds: the
ordinary family of products (prefix of increasing variables) x (n-1
commutators), and its starred refinement where the first floor((n-1)/2)
commutator heads may carry a star.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .groups import GroupElement, GroupInvolutionMap

# degrees are stored as a tuple of (variable, group element), sorted by variable
DegreeVector = tuple[tuple[int, GroupElement], ...]


def degree_vector(mapping: dict[int, GroupElement]) -> DegreeVector:
    return tuple(sorted(mapping.items()))


@dataclass(frozen=True)
class StarMonomial:
    """Multilinear monomial: ordered (variable, starred) factors, each
    variable occurring exactly once, plus an optional per-variable degree."""

    factors: tuple[tuple[int, bool], ...]
    degrees: Optional[DegreeVector] = None

    def __post_init__(self):
        vs = [v for v, _ in self.factors]
        if len(set(vs)) != len(vs):
            raise ValueError(f"repeated variable in monomial: {vs}")
        if self.degrees is not None:
            dvars = [v for v, _ in self.degrees]
            if sorted(dvars) != sorted(vs) or list(dvars) != sorted(dvars):
                raise ValueError("degree vector does not match the variable set")

    @property
    def m(self) -> int:
        return len(self.factors)

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.factors)

    def flags(self) -> tuple[bool, ...]:
        return tuple(s for _, s in self.factors)

    def degree_of(self, var: int) -> GroupElement:
        if self.degrees is None:
            raise ValueError("monomial carries no degree assignment")
        for v, g in self.degrees:
            if v == var:
                return g
        raise KeyError(var)

    def sort_key(self):
        deg_key = (
            ()
            if self.degrees is None
            else tuple((v, g.sort_key()) for v, g in self.degrees)
        )
        return (self.variables(), self.flags(), deg_key)

    def concat(self, other: "StarMonomial") -> "StarMonomial":
        """Juxtaposition; the variable sets must be disjoint."""
        deg = None
        if (self.degrees is None) != (other.degrees is None):
            raise ValueError("cannot concatenate degree-carrying with degree-free")
        if self.degrees is not None:
            deg = tuple(sorted(self.degrees + other.degrees))
        return StarMonomial(self.factors + other.factors, deg)

    def star(self, psi: Optional[GroupInvolutionMap] = None) -> "StarMonomial":
        """Reverse the factors and toggle every star flag; degrees, when
        present, are sent through psi."""
        factors = tuple((v, not s) for v, s in reversed(self.factors))
        deg = self.degrees
        if deg is not None:
            if psi is None:
                raise ValueError("degree-carrying monomial needs psi to be starred")
            deg = tuple((v, psi(g)) for v, g in deg)
        elif psi is not None:
            raise ValueError("psi given but the monomial carries no degrees")
        return StarMonomial(factors, deg)

    def with_degrees(self, mapping: dict[int, GroupElement]) -> "StarMonomial":
        return StarMonomial(self.factors, degree_vector(mapping))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " ".join(f"x{v}^*" if s else f"x{v}" for v, s in self.factors)

    def __repr__(self) -> str:
        return f"<{self}>"


def monomial(variables: Sequence[int], flags: Optional[Sequence[bool]] = None,
             degrees: Optional[DegreeVector] = None) -> StarMonomial:
    if flags is None:
        flags = [False] * len(variables)
    return StarMonomial(tuple(zip(variables, flags)), degrees)


class SparsePolynomial:
    """Finite rational combination of star monomials (zero terms dropped)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[StarMonomial, Fraction]] = None):
        clean: dict[StarMonomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[mono] = c
        self.terms = clean

    @classmethod
    def from_monomial(cls, mono: StarMonomial, coef=1) -> "SparsePolynomial":
        return cls({mono: Fraction(coef)})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def m(self) -> int:
        for mono in self.terms:
            return mono.m
        return 0

    def variables(self) -> tuple[int, ...]:
        for mono in self.terms:
            return tuple(sorted(mono.variables()))
        return ()

    def sorted_terms(self) -> list[tuple[StarMonomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return SparsePolynomial(out)

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "SparsePolynomial":
        c = Fraction(c)
        return SparsePolynomial({m: c * v for m, v in self.terms.items()})

    def __neg__(self) -> "SparsePolynomial":
        return self.scale(-1)

    def __mul__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        out: dict[StarMonomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = m1.concat(m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return SparsePolynomial(out)

    def star(self, psi: Optional[GroupInvolutionMap] = None) -> "SparsePolynomial":
        return SparsePolynomial(
            {mono.star(psi): c for mono, c in self.terms.items()}
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsePolynomial) and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = str(mono) if mag == 1 else f"{mag} {mono}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    def __repr__(self) -> str:
        return f"SparsePolynomial({self})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {
                    "coef": str(c),
                    "factors": [{"var": v, "star": s} for v, s in mono.factors],
                }
                for mono, c in self.sorted_terms()
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SparsePolynomial":
        terms: dict[StarMonomial, Fraction] = {}
        for t in obj["terms"]:
            mono = StarMonomial(
                tuple((int(f["var"]), bool(f["star"])) for f in t["factors"])
            )
            terms[mono] = terms.get(mono, Fraction(0)) + Fraction(t["coef"])
        return cls(terms)


def star_of_polynomial(
    p: SparsePolynomial, psi: Optional[GroupInvolutionMap] = None
) -> SparsePolynomial:
    return p.star(psi)


def expand_commutator(
    indices: Sequence[int], head_starred: bool = False
) -> SparsePolynomial:
    """Left-normed commutator [x_{j1}, x_{j2}, ..., x_{jt}] expanded into its
    2^(t-1) signed monomials; only the head variable carries the star flag."""
    if len(indices) < 2:
        raise ValueError("a commutator needs at least two entries")
    if len(set(indices)) != len(indices):
        raise ValueError(f"repeated index in commutator: {indices}")
    acc = SparsePolynomial.from_monomial(monomial([indices[0]], [head_starred]))
    for j in indices[1:]:
        xj = SparsePolynomial.from_monomial(monomial([j]))
        acc = acc * xj - xj * acc
    return acc


@dataclass(frozen=True)
class CommutatorShape:
    """One family member: an increasing prefix, an ordered tuple of commutator
    index sequences (head greater than the minimum, tail ascending) and a star
    flag per commutator."""

    prefix: tuple[int, ...]
    commutators: tuple[tuple[int, ...], ...]
    flags: tuple[bool, ...]

    def __post_init__(self):
        if len(self.flags) != len(self.commutators):
            raise ValueError("one flag per commutator required")
        if list(self.prefix) != sorted(self.prefix):
            raise ValueError("prefix must be increasing")
        seen = list(self.prefix)
        for seq in self.commutators:
            if len(seq) < 2:
                raise ValueError("commutators need length >= 2")
            if seq[1] != min(seq):
                raise ValueError(f"second entry must be the minimum: {seq}")
            if list(seq[2:]) != sorted(seq[2:]) or (seq[2:] and seq[2] <= seq[1]):
                raise ValueError(f"tail must ascend strictly: {seq}")
            seen.extend(seq)
        if sorted(seen) != list(range(1, len(seen) + 1)):
            raise ValueError("shape must use the variables 1..m exactly once each")
        half = len(self.commutators) // 2
        if any(self.flags[half:]):
            raise ValueError(
                "star flags are only allowed on the first floor(k/2) commutators"
            )

    @property
    def m(self) -> int:
        return len(self.prefix) + sum(len(seq) for seq in self.commutators)

    def polynomial(self) -> SparsePolynomial:
        acc = SparsePolynomial.from_monomial(monomial(self.prefix))
        for seq, flag in zip(self.commutators, self.flags):
            acc = acc * expand_commutator(seq, flag)
        return acc

    def __str__(self) -> str:
        pre = "".join(f"x{v}" for v in self.prefix)
        comms = "".join(
            "[" + ("x%d^*" % seq[0] if flag else "x%d" % seq[0])
            + "".join(f",x{v}" for v in seq[1:]) + "]"
            for seq, flag in zip(self.commutators, self.flags)
        )
        return (pre + comms) or "1"


def _block_sequences(block: tuple[int, ...]) -> list[tuple[int, ...]]:
    # block arrives sorted; head runs over everything except the minimum,
    # the rest follows in ascending order
    low, rest = block[0], block[1:]
    out = []
    for head in rest:
        out.append((head, low) + tuple(x for x in rest if x != head))
    return out


def _ordered_partitions(
    elems: tuple[int, ...], k: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Ordered tuples of k disjoint blocks of size >= 2 covering elems."""
    if k == 0:
        if not elems:
            yield ()
        return
    if len(elems) < 2 * k:
        return
    for size in range(2, len(elems) - 2 * (k - 1) + 1):
        for block in itertools.combinations(elems, size):
            block_set = set(block)
            remaining = tuple(x for x in elems if x not in block_set)
            for rest in _ordered_partitions(remaining, k - 1):
                yield (block,) + rest


def drensky_shapes(n: int, m: int) -> Iterator[CommutatorShape]:
    """All multilinear shapes on 1..m with exactly n-1 commutators and no
    stars, in a deterministic order (empty when m < 2(n-1))."""
    if n < 2:
        raise ValueError("n must be >= 2")
    k = n - 1
    all_vars = tuple(range(1, m + 1))
    no_flags = (False,) * k
    for r in range(0, m - 2 * k + 1):
        for prefix in itertools.combinations(all_vars, r):
            taken = set(prefix)
            rest = tuple(x for x in all_vars if x not in taken)
            for blocks in _ordered_partitions(rest, k):
                for seqs in itertools.product(
                    *[_block_sequences(b) for b in blocks]
                ):
                    yield CommutatorShape(prefix, seqs, no_flags)


def drensky_family(n: int, m: int) -> list[SparsePolynomial]:
    return [shape.polynomial() for shape in drensky_shapes(n, m)]


def family_size(n: int, m: int) -> int:
    """Number of shapes produced by drensky_shapes(n, m), by combinatorial
    counting: choose the prefix, split the rest into an ordered tuple of
    blocks of sizes s_1..s_{n-1} (s_i >= 2), and pick one of s_i - 1 heads
    per block."""
    if n < 2:
        raise ValueError("n must be >= 2")
    k = n - 1
    total = 0
    for sizes in _compositions_at_least_two(k, m):
        s = sum(sizes)
        ways = math.comb(m, m - s) * math.factorial(s)
        for si in sizes:
            ways = ways // math.factorial(si) * (si - 1)
        total += ways
    return total


def _compositions_at_least_two(k: int, total_max: int) -> Iterator[tuple[int, ...]]:
    """All (s_1..s_k) with s_i >= 2 and sum <= total_max."""
    if 2 * k > total_max:
        return
    for extra in range(0, total_max - 2 * k + 1):
        for cuts in itertools.combinations(range(extra + k - 1), k - 1):
            sizes = []
            prev = -1
            for c in cuts:
                sizes.append(c - prev - 1 + 2)
                prev = c
            sizes.append(extra + k - 1 - prev - 1 + 2)
            yield tuple(sizes)


def star_family_shapes(n: int, m: int, kind=None) -> list[CommutatorShape]:
    """Every ordinary shape crossed with all admissible star-flag vectors:
    the first floor((n-1)/2) commutator heads may be starred, the rest not."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if m < 2 * (n - 1):
        raise ValueError(
            f"the star family needs m >= 2(n-1), got m={m} for n={n}"
        )
    k = n - 1
    free = k // 2
    out = []
    for shape in drensky_shapes(n, m):
        for bits in itertools.product((False, True), repeat=free):
            flags = tuple(bits) + (False,) * (k - free)
            out.append(CommutatorShape(shape.prefix, shape.commutators, flags))
    return out


def star_family(n: int, m: int, kind=None) -> list[SparsePolynomial]:
    return [shape.polynomial() for shape in star_family_shapes(n, m, kind)]


def enumerate_monomials(
    m: int,
    star: bool = False,
    degree_assignments: Optional[Iterable[dict[int, GroupElement]]] = None,
) -> Iterator[StarMonomial]:
    """All multilinear monomials on 1..m in canonical order: permutations
    lexicographically, then star-flag vectors, per degree assignment."""
    if degree_assignments is None:
        deg_vectors: list[Optional[DegreeVector]] = [None]
    else:
        deg_vectors = [degree_vector(d) for d in degree_assignments]
    flag_space = (
        list(itertools.product((False, True), repeat=m)) if star else [(False,) * m]
    )
    for deg in deg_vectors:
        for perm in itertools.permutations(range(1, m + 1)):
            for flags in flag_space:
                yield StarMonomial(tuple(zip(perm, flags)), deg)
