"""Exact sparse rank computation over the rationals and prime fields.

Two backends: fraction-free (Bareiss) elimination with a Markowitz pivot
heuristic for proven ranks, and a streaming row-echelon reduction modulo a
random 31-bit prime for large instances.  A modular rank never exceeds the
rational one, so a modular rank that reaches the row count (or the smaller
dimension) is accepted as an exact full-rank certificate; otherwise ranks
agreed by several primes are reported as such.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import BudgetExceeded

Entry = tuple[int, int, Union[int, Fraction]]


class SparseMatrix:
    """Sparse matrix, entries keyed by (row, col), no stored zeros.

    Integer-valued matrices are kept in parallel numpy arrays; anything with
    genuine fractions falls back to python lists.
    """

    __slots__ = ("nrows", "ncols", "_rows", "_cols", "_vals", "integral")

    def __init__(self, nrows: int, ncols: int, entries: Iterable[Entry] = ()):
        self.nrows = nrows
        self.ncols = ncols
        rows: list[int] = []
        cols: list[int] = []
        vals: list = []
        integral = True
        seen: set[tuple[int, int]] = set()
        for r, c, v in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ValueError(f"entry ({r},{c}) out of bounds")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry at ({r},{c})")
            seen.add((r, c))
            if isinstance(v, Fraction):
                if v.denominator == 1:
                    v = v.numerator
                else:
                    integral = False
            if v:
                rows.append(r)
                cols.append(c)
                vals.append(v)
        self._rows = rows
        self._cols = cols
        self._vals = vals
        self.integral = integral

    @classmethod
    def from_arrays(cls, nrows: int, ncols: int, rows, cols, vals) -> "SparseMatrix":
        """Integer fast path: parallel numpy arrays, assumed in-bounds, unique
        positions and free of zeros."""
        out = cls.__new__(cls)
        out.nrows = nrows
        out.ncols = ncols
        out._rows = np.asarray(rows, dtype=np.int64)
        out._cols = np.asarray(cols, dtype=np.int64)
        out._vals = np.asarray(vals, dtype=np.int64)
        out.integral = True
        return out

    @classmethod
    def from_row_dicts(
        cls, row_dicts: Sequence[dict[int, Union[int, Fraction]]], ncols: int
    ) -> "SparseMatrix":
        entries = [
            (r, c, v) for r, row in enumerate(row_dicts) for c, v in row.items()
        ]
        return cls(len(row_dicts), ncols, entries)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        entries = [
            (r, c, Fraction(v))
            for r, row in enumerate(dense)
            for c, v in enumerate(row)
            if v
        ]
        return cls(nrows, ncols, entries)

    @property
    def nnz(self) -> int:
        return len(self._vals)

    def iter_entries(self) -> Iterator[Entry]:
        if isinstance(self._vals, np.ndarray):
            for r, c, v in zip(self._rows, self._cols, self._vals):
                yield int(r), int(c), int(v)
        else:
            yield from zip(self._rows, self._cols, self._vals)

    def row_dicts(self) -> list[dict[int, Union[int, Fraction]]]:
        rows: list[dict[int, Union[int, Fraction]]] = [
            {} for _ in range(self.nrows)
        ]
        for r, c, v in self.iter_entries():
            rows[r][c] = v
        return rows

    def transpose(self) -> "SparseMatrix":
        out = SparseMatrix(self.ncols, self.nrows, ())
        out._rows = self._cols
        out._cols = self._rows
        out._vals = self._vals
        out.integral = self.integral
        return out

    def to_coordinate_text(self) -> str:
        """One-line header "rows cols nnz", then "row col value" lines."""
        lines = [f"{self.nrows} {self.ncols} {self.nnz}"]
        for r, c, v in sorted(self.iter_entries(), key=lambda e: (e[0], e[1])):
            lines.append(f"{r} {c} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_coordinate_text(cls, text: str) -> "SparseMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        nrows, ncols, nnz = (int(t) for t in lines[0].split())
        entries = []
        for ln in lines[1 : nnz + 1]:
            r, c, v = ln.split()
            entries.append((int(r), int(c), Fraction(v)))
        return cls(nrows, ncols, entries)


@dataclass
class RankResult:
    value: int
    mode: str  # "exact" | "modular-agreed"
    primes: tuple[int, ...] = ()
    steps: int = 0


@dataclass(frozen=True)
class RankPolicy:
    """How ranks get certified.

    mode "exact" forces fraction-free elimination, "modp" forces the modular
    backend, "auto" switches on the row count.  A modular rank equal to the
    smaller matrix dimension (or, with expect_full_rank, to the row count)
    upgrades to an exact certificate.
    """

    mode: str = "auto"
    exact_rows: int = 5000
    prime_count: int = 2
    seed: int = 41
    expect_full_rank: bool = False
    max_extra_primes: int = 4
    max_steps: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("exact", "modp", "auto"):
            raise ValueError(f"unknown rank mode {self.mode!r}")
        if self.prime_count < 1:
            raise ValueError("prime_count must be >= 1")


def _integer_rows(matrix: SparseMatrix) -> list[dict[int, int]]:
    """Rows with denominators cleared (row scaling preserves rank)."""
    rows = matrix.row_dicts()
    out: list[dict[int, int]] = []
    for row in rows:
        lcm = 1
        for v in row.values():
            if isinstance(v, Fraction):
                lcm = lcm * v.denominator // gcd(lcm, v.denominator)
        out.append({c: int(v * lcm) for c, v in row.items()})
    return out


def rank_fraction_free(
    matrix: SparseMatrix, max_steps: Optional[int] = None
) -> RankResult:
    """Exact rank over the rationals by fraction-free (Bareiss) elimination.

    Pivots are chosen by the Markowitz fill score (nnz_row - 1)(nnz_col - 1)
    with ties broken by the lowest (row, col), which makes the elimination
    deterministic.  Every intermediate entry is a minor of the input, so the
    division by the previous pivot is exact.
    """
    rows = _integer_rows(matrix)
    active_rows = {r for r, row in enumerate(rows) if row}
    col_count: dict[int, int] = {}
    for r in active_rows:
        for c in rows[r]:
            col_count[c] = col_count.get(c, 0) + 1
    prev_pivot = 1
    rank = 0
    steps = 0
    while True:
        best = None
        for r in sorted(active_rows):
            row = rows[r]
            if not row:
                continue
            rl = len(row) - 1
            for c in sorted(row):
                score = rl * (col_count[c] - 1)
                key = (score, r, c)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, pr, pc = best
        if max_steps is not None and steps >= max_steps:
            raise BudgetExceeded(
                f"fraction-free elimination exceeded {max_steps} steps"
            )
        pivot_row = rows[pr]
        pivot = pivot_row[pc]
        for c in pivot_row:
            col_count[c] -= 1
        active_rows.discard(pr)
        for r in list(active_rows):
            row = rows[r]
            a = row.pop(pc, 0)
            if a:
                col_count[pc] -= 1
            new_row: dict[int, int] = {}
            touched = set(row)
            if a:
                touched.update(c for c in pivot_row if c != pc)
            for c in touched:
                num = pivot * row.get(c, 0) - a * pivot_row.get(c, 0)
                if num:
                    q, rem = divmod(num, prev_pivot)
                    if rem:
                        raise ArithmeticError("inexact division in elimination")
                    new_row[c] = q
                if (c in row) != (c in new_row):
                    col_count[c] = col_count.get(c, 0) + (1 if c in new_row else -1)
            rows[r] = new_row
            if not new_row:
                active_rows.discard(r)
        prev_pivot = pivot
        rank += 1
        steps += 1
    return RankResult(rank, "exact", (), steps)


def _modular_values(vals, p: int) -> np.ndarray:
    if isinstance(vals, np.ndarray):
        return np.mod(vals, p)
    out = np.empty(len(vals), dtype=np.int64)
    for k, v in enumerate(vals):
        if isinstance(v, Fraction):
            if v.denominator % p == 0:
                raise ValueError(f"prime {p} divides a denominator")
            out[k] = v.numerator * pow(v.denominator, -1, p) % p
        else:
            out[k] = v % p
    return out


def rank_mod_p(matrix: SparseMatrix, p: int) -> int:
    """Rank over the p-element field via streaming row-echelon reduction.

    Rows are reduced against the growing pivot basis with dense numpy row
    vectors; each basis row starts at its pivot column, so one increasing
    sweep per pass terminates.
    """
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    if matrix.nnz == 0:
        return 0
    rows_idx = np.asarray(matrix._rows, dtype=np.int64)
    cols_idx = np.asarray(matrix._cols, dtype=np.int64)
    vals = _modular_values(matrix._vals, p)
    order = np.lexsort((cols_idx, rows_idx))
    rows_idx, cols_idx, vals = rows_idx[order], cols_idx[order], vals[order]
    boundaries = np.searchsorted(rows_idx, np.arange(matrix.nrows + 1))
    ncols = matrix.ncols
    basis: list[np.ndarray] = []
    pivcols: list[int] = []
    pivarr = np.empty(0, dtype=np.int64)
    buf = np.zeros(ncols, dtype=np.int64)
    for r in range(matrix.nrows):
        lo, hi = boundaries[r], boundaries[r + 1]
        if lo == hi:
            continue
        cs = cols_idx[lo:hi]
        buf[cs] = vals[lo:hi]
        while True:
            hits = np.nonzero(buf[pivarr])[0] if len(pivcols) else ()
            if len(hits) == 0:
                break
            for k in hits:
                f = int(buf[pivcols[k]]) % p
                if f:
                    np.subtract(buf, f * basis[k], out=buf)
                    buf %= p
        nz = np.nonzero(buf)[0]
        if nz.size:
            pc = int(nz[0])
            inv = pow(int(buf[pc]), -1, p)
            newrow = (buf * inv) % p
            at = int(np.searchsorted(pivarr, pc))
            basis.insert(at, newrow)
            pivcols.insert(at, pc)
            pivarr = np.insert(pivarr, at, pc)
            buf[nz] = 0
    return len(basis)


_MR_BASES = (2, 3, 5, 7)  # deterministic Miller-Rabin below 3,215,031,751


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    for b in _MR_BASES:
        if x % b == 0:
            return x == b
    d, s = x - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        y = pow(b, d, x)
        if y in (1, x - 1):
            continue
        for _ in range(s - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def random_prime_31bit(rng: random.Random) -> int:
    """A random prime in (2^30, 2^31)."""
    while True:
        cand = rng.randrange(2**30 + 1, 2**31, 2)
        if is_prime(cand):
            return cand


def rank_certified(matrix: SparseMatrix, policy: RankPolicy = RankPolicy()) -> RankResult:
    """Rank under the given certification policy.

    Small matrices (or mode "exact") go through fraction-free elimination.
    Otherwise ranks modulo random 31-bit primes are combined: a modular rank
    can only undershoot the rational one, so hitting the relevant dimension
    bound certifies exactness, and otherwise the maximum over agreeing
    primes is reported as "modular-agreed".
    """
    use_exact = policy.mode == "exact" or (
        policy.mode == "auto" and matrix.nrows <= policy.exact_rows
    )
    if use_exact:
        return rank_fraction_free(matrix, policy.max_steps)
    rng = random.Random(policy.seed)
    bound = matrix.nrows if policy.expect_full_rank else min(matrix.nrows, matrix.ncols)
    primes: list[int] = []
    ranks: list[int] = []
    steps = 0
    while True:
        p = random_prime_31bit(rng)
        if p in primes:
            continue
        primes.append(p)
        rk = rank_mod_p(matrix, p)
        ranks.append(rk)
        steps += rk
        if rk == bound:
            # a modular rank never exceeds the rational one
            return RankResult(rk, "exact", tuple(primes), steps)
        if len(ranks) >= policy.prime_count:
            if len(set(ranks)) == 1:
                return RankResult(rk, "modular-agreed", tuple(primes), steps)
            if len(ranks) >= policy.prime_count + policy.max_extra_primes:
                raise RuntimeError(
                    f"primes exhausted: ranks {ranks} never agreed"
                )
