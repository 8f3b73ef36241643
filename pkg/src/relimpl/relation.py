"""Finite homogeneous binary relations and the 16 unary operations on them.

A relation on the domain {0..n-1} is a packed row-major bit word: bit
x*n + y is set iff x R y.  An operation p is a 4-bit code; each bit says
whether a pair (x, y) survives in one of the four cases of (xRy, yRx):

    p8: not xRy, not yRx     p4: not xRy, yRx
    p2: xRy, not yRx         p1: xRy, yRx
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

import numba
import numpy as np

HEX = "0123456789ABCDEF"
OPS = range(16)

# (xRy, yRx) -> bit of the operation code governing that case
CASE_BIT = {(False, False): 8, (False, True): 4, (True, False): 2, (True, True): 1}


@dataclass(frozen=True, order=True)
class Relation:
    """Relation on {0..n-1}; bits holds n*n booleans, row-major."""

    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative domain size")
        if self.bits < 0 or self.bits >> (self.n * self.n):
            raise ValueError("bits outside the n*n matrix")

    @classmethod
    def from_pairs(cls, n: int, pairs) -> Relation:
        bits = 0
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair {(x, y)} outside domain of size {n}")
            bits |= 1 << (x * n + y)
        return cls(n, bits)

    @classmethod
    def empty(cls, n: int) -> Relation:
        return cls(n, 0)

    @classmethod
    def universal(cls, n: int) -> Relation:
        return cls(n, (1 << (n * n)) - 1)

    @classmethod
    def identity(cls, n: int) -> Relation:
        return cls.from_pairs(n, ((x, x) for x in range(n)))

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.bits >> (x * self.n + y) & 1)

    def pairs(self) -> list[tuple[int, int]]:
        n = self.n
        return [(i // n, i % n) for i in range(n * n) if self.bits >> i & 1]

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def transpose(self) -> Relation:
        return Relation(self.n, transpose_bits(self.bits, self.n))

    def complement(self) -> Relation:
        return Relation(self.n, ~self.bits & ((1 << self.n * self.n) - 1))

    def issubset(self, other: Relation) -> bool:
        return self.n == other.n and self.bits & ~other.bits == 0

    def __str__(self) -> str:
        return "{" + ",".join(f"({x},{y})" for x, y in self.pairs()) + "}"


_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_pairs(text: str, n: int | None = None) -> Relation:
    """Parse "{(0,1),(2,0)}"; n defaults to one more than the largest element."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"not a pair list: {text!r}")
    inner = body[1:-1].strip()
    pairs = [(int(a), int(b)) for a, b in _PAIR.findall(inner)]
    if _PAIR.sub("", inner).replace(",", "").strip():
        raise ValueError(f"not a pair list: {text!r}")
    if n is None:
        n = 1 + max((max(p) for p in pairs), default=-1)
    return Relation.from_pairs(n, pairs)


def transpose_bits(bits: int, n: int) -> int:
    out = 0
    for x in range(n):
        row = bits >> (x * n)
        for y in range(n):
            if row >> y & 1:
                out |= 1 << (y * n + x)
    return out


def diag_bits(n: int) -> int:
    return sum(1 << (x * n + x) for x in range(n))


def apply_bits(op: int, bits: int, n: int) -> int:
    full = (1 << n * n) - 1
    t = transpose_bits(bits, n)
    out = 0
    if op & 1:
        out |= bits & t
    if op & 2:
        out |= bits & ~t
    if op & 4:
        out |= ~bits & t
    if op & 8:
        out |= ~bits & ~t
    return out & full


def apply(op: int, r: Relation) -> Relation:
    """The image R^op."""
    return Relation(r.n, apply_bits(op, r.bits, r.n))


def compose(p: int, q: int) -> int:
    """The operation p∘q with R^(p∘q) = (R^q)^p, computed on the code bits.

    For each case bit c of q, the image R^q at (x, y) is q's bit for c and
    at (y, x) is q's bit for the mirrored case; that pair selects p's bit.
    """
    out = 0
    for (fwd, bwd), c in CASE_BIT.items():
        there = bool(q & c)
        back = bool(q & CASE_BIT[(bwd, fwd)])
        if p & CASE_BIT[(there, back)]:
            out |= c
    return out


COMPOSE = tuple(tuple(compose(p, q) for q in OPS) for p in OPS)


def op_not(p: int) -> int:
    return ~p & 15


def op_and(p: int, q: int) -> int:
    return p & q


def op_or(p: int, q: int) -> int:
    return p | q


def op_subseteq(p: int, q: int) -> bool:
    return p & ~q == 0


def mask_of(ops) -> int:
    m = 0
    for p in ops:
        m |= 1 << p
    return m


def members(mask: int) -> list[int]:
    return [p for p in OPS if mask >> p & 1]


def left_inverses(p: int, q: int) -> int:
    """OpSet mask of all x with compose(x, q) == p."""
    return mask_of(x for x in OPS if COMPOSE[x][q] == p)


def right_inverses(p: int, q: int) -> int:
    """OpSet mask of all x with compose(p, x) == q."""
    return mask_of(x for x in OPS if COMPOSE[p][x] == q)


def fmt_ops(mask: int) -> str:
    return "".join(HEX[p] for p in members(mask))


def fmt_set(mask: int) -> str:
    return "{" + ",".join(HEX[p] for p in members(mask)) + "}"


@dataclass(frozen=True)
class ClosedSetCensus:
    closed: list[int]
    with_identity: int
    maximal_groups: list[int]
    extra_monoids: list[int]

    def lines(self) -> list[str]:
        return [
            f"closed={len(self.closed)}",
            f"closed_with_3={self.with_identity}",
            "maximal_groups=" + " ".join(fmt_set(g) for g in self.maximal_groups),
            "extra_maximal_monoids=" + " ".join(fmt_set(m) for m in self.extra_monoids),
        ]


def _closed_masks() -> np.ndarray:
    # bit q of prod[p] set iff compose(p, q) lands inside the candidate set;
    # a set S is closed iff every p in S maps all of S into S
    masks = np.arange(1 << 16, dtype=np.int64)
    ok = np.ones(1 << 16, dtype=bool)
    for p in OPS:
        has_p = (masks >> p) & 1 == 1
        for q in OPS:
            r = COMPOSE[p][q]
            need = has_p & ((masks >> q) & 1 == 1)
            ok &= ~need | ((masks >> r) & 1 == 1)
    return masks[ok]


def _neutral(mask: int) -> int | None:
    ms = members(mask)
    for e in ms:
        if all(COMPOSE[e][x] == x and COMPOSE[x][e] == x for x in ms):
            return e
    return None


def _is_group(mask: int) -> bool:
    e = _neutral(mask)
    if e is None:
        return False
    ms = members(mask)
    return all(any(COMPOSE[x][y] == e and COMPOSE[y][x] == e for y in ms) for x in ms)


def _maximal(masks: list[int]) -> list[int]:
    return [m for m in masks if not any(m != o and m & o == m for o in masks)]


def census_closed_sets() -> ClosedSetCensus:
    closed = [int(m) for m in _closed_masks() if m]
    groups = _maximal([m for m in closed if _is_group(m)])
    ident = 1 << 3
    with_identity = sum(1 for m in closed if m & ident)
    # monoids without the identity operation, maximal among those
    monoids = [m for m in closed if not m & ident and _neutral(m) is not None]
    extra = [m for m in _maximal(monoids) if not any(m & g == m for g in groups)]
    return ClosedSetCensus(closed, with_identity, groups, extra)


def composition_table() -> str:
    head = "  | " + " ".join(HEX)
    lines = [head, "--+" + "-" * (len(head) - 3)]
    for p in OPS:
        lines.append(f"{HEX[p]} | " + " ".join(HEX[COMPOSE[p][q]] for q in OPS))
    return "\n".join(lines)


def _inverse_table(fn) -> str:
    cells = [[fmt_ops(fn(p, q)) or "-" for q in OPS] for p in OPS]
    width = max(len(c) for row in cells for c in row)
    head = "  | " + " ".join(h.rjust(width) for h in HEX)
    lines = [head, "--+" + "-" * (len(head) - 3)]
    for p in OPS:
        lines.append(f"{HEX[p]} | " + " ".join(c.rjust(width) for c in cells[p]))
    return "\n".join(lines)


def left_inverse_table() -> str:
    return _inverse_table(left_inverses)


def right_inverse_table() -> str:
    return _inverse_table(right_inverses)


def all_relations(n: int):
    """Every relation on n elements in ascending packed-word order."""
    for bits in range(1 << (n * n)):
        yield Relation(n, bits)


def symmetric_relations(n: int):
    cells = [(x, y) for x in range(n) for y in range(x, n)]
    for choice in product((0, 1), repeat=len(cells)):
        yield Relation.from_pairs(
            n, [p for c, (x, y) in zip(choice, cells) if c for p in ((x, y), (y, x))]
        )


# ---------------------------------------------------------------------------
# word-level kernels for the enumeration loops (int64 words, n <= 8)


@numba.njit(cache=True)
def transpose_word(w, n):
    t = 0
    for x in range(n):
        row = w >> (x * n)
        for y in range(n):
            if row >> y & 1:
                t |= 1 << (y * n + x)
    return t


@numba.njit(cache=True)
def apply_word(op, w, t, full):
    out = 0
    if op & 1:
        out |= w & t
    if op & 2:
        out |= w & ~t
    if op & 4:
        out |= ~w & t
    if op & 8:
        out |= ~w & ~t
    return out & full


def full_word(n: int) -> int:
    """All-ones mask for n*n bits as a signed 64-bit value."""
    return to_signed((1 << n * n) - 1)


def to_signed(bits: int) -> int:
    return bits - (1 << 64) if bits >= 1 << 63 else bits


def to_unsigned(word: int) -> int:
    return word + (1 << 64) if word < 0 else word
