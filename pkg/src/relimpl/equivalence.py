"""Partition refinement of the 384 lifted properties into extensional classes."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .properties import (
    NLIFTED,
    PROPS,
    Lifted,
    check_lifted,
    exhaustive_profiles,
    parse_lifted,
    profile_bits,
    property_vector,
    sampled_profiles,
)
from .relation import COMPOSE, HEX, Relation

# default representatives in rank order
REP_NAMES = (
    "0-rf 0-sy 3-sy 2-de 9-an 1-tr 7-tr 8-tr 9-tr E-tr "
    "3-as C-as 3-an C-an 3-rf C-rf 1-s1 2-s1 3-s1 7-s1 C-s1 2-s2 3-s2 C-s2 "
    "2-at 3-at C-at 2-tr 3-tr C-tr D-tr 3-de C-de "
    "7-as E-as 7-an E-an 1-at 6-at 7-at 8-at E-at 1-de 6-de 7-de 8-de E-de "
    "3-le 5-le A-le C-le "
    "1-ls 2-ls 3-ls 4-ls 5-ls 6-ls 7-ls 8-ls A-ls C-ls E-ls "
    "1-lu 2-lu 3-lu 4-lu 5-lu 6-lu 7-lu 8-lu A-lu C-lu E-lu "
    "1-lq 3-lq 5-lq 7-lq 8-lq A-lq C-lq E-lq"
).split()
REPS = tuple(parse_lifted(s) for s in REP_NAMES)
NCLASSES = len(REPS)
FALSE, TRUE = 0, 1
SYM3, DENSE2 = 2, 3


@dataclass
class Partitioning:
    blocks: list[frozenset[int]]
    n: int
    visited: int = 0
    seed: int | None = None

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            if seen & b:
                raise ValueError("blocks overlap")
            seen |= b
        if len(seen) != NLIFTED:
            raise ValueError("blocks do not cover all lifted properties")

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, lp: Lifted) -> frozenset[int]:
        for b in self.blocks:
            if lp.index in b:
                return b
        raise KeyError(lp)

    def same(self, a: Lifted, b: Lifted) -> bool:
        return b.index in self.block_of(a)

    def chains(self) -> list[str]:
        return [chain(b) for b in sorted(self.blocks, key=_member_key_min)]


def _member_key(i: int):
    lp = Lifted.from_index(i)
    return (lp.prop, lp.op)


def _member_key_min(block):
    return min(_member_key(i) for i in block)


def chain(block) -> str:
    return " = ".join(Lifted.from_index(i).long() for i in sorted(block, key=_member_key))


class Refiner:
    """Splits blocks of lifted properties by the vectors it is shown."""

    def __init__(self):
        self.labels = np.zeros(NLIFTED, dtype=np.int64)
        self.visited = 0

    def visit(self, vector: int) -> None:
        bits = np.array([vector >> i & 1 for i in range(NLIFTED)], dtype=np.int64)
        self._split(bits[None, :])
        self.visited += 1

    def visit_matrix(self, bits: np.ndarray, count: int | None = None) -> None:
        """bits: [k,384] booleans, one row per visited relation (or profile)."""
        self._split(bits)
        self.visited += len(bits) if count is None else count

    def _split(self, bits: np.ndarray) -> None:
        packed = np.packbits(np.asarray(bits, dtype=bool).T, axis=1)
        keys = {}
        new = np.empty_like(self.labels)
        for i in range(NLIFTED):
            key = (int(self.labels[i]), packed[i].tobytes())
            new[i] = keys.setdefault(key, len(keys))
        self.labels = new

    def blocks(self) -> list[frozenset[int]]:
        groups: dict[int, set[int]] = {}
        for i, lab in enumerate(self.labels):
            groups.setdefault(int(lab), set()).add(i)
        return [frozenset(g) for g in groups.values()]

    def partitioning(self, n: int, seed: int | None = None) -> Partitioning:
        return Partitioning(self.blocks(), n, self.visited, seed)


def _cache_dir() -> Path:
    base = os.environ.get("RELIMPL_CACHE") or Path.home() / ".cache" / "relimpl"
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def profiles(n: int, use_cache: bool = True):
    """Distinct profiles over every relation on n elements (cached for n = 5)."""
    if n < 5 or not use_cache:
        return exhaustive_profiles(n)
    path = _cache_dir() / f"profiles_n{n}.npz"
    if path.exists():
        data = np.load(path)
        return data["masks"], data["words"]
    masks, words = exhaustive_profiles(n)
    np.savez(path, masks=masks, words=words)
    return masks, words


def refine(
    n: int,
    mode: str = "exhaustive",
    samples: int = 0,
    seed: int = 0,
    start: Partitioning | None = None,
    use_cache: bool = True,
) -> Partitioning:
    """Refine the 384 lifted properties by their behaviour on relations of size n."""
    ref = Refiner()
    if start is not None:
        for lab, block in enumerate(start.blocks):
            for i in block:
                ref.labels[i] = lab
    if mode == "exhaustive":
        if n >= 7:
            raise ValueError("exhaustive refinement is out of reach for n >= 7")
        if n > 5:
            raise ValueError("exhaustive refinement above n = 5 is not supported; use sampling")
        masks, _ = profiles(n, use_cache)
        ref.visit_matrix(profile_bits(masks), count=1 << (n * n))
        return ref.partitioning(n)
    if mode == "sampled":
        masks, _ = sampled_profiles(n, samples, seed)
        ref.visit_matrix(profile_bits(masks), count=samples)
        return ref.partitioning(n, seed)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# final classes


@dataclass(frozen=True)
class EqClass:
    rank: int
    rep: Lifted
    members: frozenset[Lifted] = field(compare=False)

    def __str__(self) -> str:
        if self.rank == FALSE:
            return "-"
        if self.rank == TRUE:
            return "+"
        return self.rep.short()


def witness_2dense_not_3sym() -> Relation:
    """A 7-element tournament (x -> x+1, x+2, x+4 mod 7) that is 2-dense but not symmetric."""
    r = Relation.from_pairs(7, [(x, (x + d) % 7) for x in range(7) for d in (1, 2, 4)])
    two_dense, four_dense, sym = Lifted(2, 20), Lifted(4, 20), Lifted(3, 6)
    if not check_lifted(two_dense, r) or check_lifted(sym, r):
        raise AssertionError("stored 2-dense witness fails verification")
    if check_lifted(two_dense, r) != check_lifted(four_dense, r):
        raise AssertionError("2-dense and 4-dense disagree on the witness")
    return r


class Classes:
    """The 81 classes with normalization and the operation action on them."""

    def __init__(self, classes: list[EqClass]):
        if len(classes) != NCLASSES:
            raise ValueError(f"expected {NCLASSES} classes, got {len(classes)}")
        self.classes = classes
        self.norm = np.full(NLIFTED, -1, dtype=np.int64)
        for c in classes:
            for lp in c.members:
                self.norm[lp.index] = c.rank
        if (self.norm < 0).any():
            raise ValueError("classes do not cover all lifted properties")
        # opmap[c][p]: class of I(R^p) for I in class c
        self.opmap = [
            [self.normalize(Lifted(COMPOSE[c.rep.op][p], c.rep.prop)) for p in range(16)]
            for c in classes
        ]

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, rank: int) -> EqClass:
        return self.classes[rank]

    def normalize(self, lp: Lifted) -> int:
        return int(self.norm[lp.index])

    def rank_of(self, text: str) -> int:
        return self.normalize(parse_lifted(text))

    def name(self, rank: int) -> str:
        return str(self.classes[rank])

    def plain(self, rank: int) -> Lifted:
        """The unlifted member of a class if it has one, else its representative."""
        c = self.classes[rank]
        basic = sorted(m.prop for m in c.members if m.op == 3)
        return Lifted(3, basic[0]) if basic else c.rep

    def reps(self) -> list[Lifted]:
        return [c.rep for c in self.classes]

    def matrix(self) -> str:
        """The 16 x 24 table of default representations, one row per property."""
        width = 5
        lines = [" " * 12 + " ".join(h.ljust(width) for h in HEX)]
        for p in PROPS:
            cells = [self.name(self.normalize(Lifted(q, p.index))) for q in range(16)]
            lines.append(f"{p.long:12s}" + " ".join(c.ljust(width) for c in cells).rstrip())
        return "\n".join(lines)

    def chains(self) -> list[str]:
        return [
            f"{c.rank:2d} {self.name(c.rank)}: " + chain(lp.index for lp in c.members)
            for c in self.classes
        ]


def final_classes(part: Partitioning) -> Classes:
    """Split {2-de, 4-de} off the 3-sy block and rank blocks by their representative."""
    sym_block = part.block_of(REPS[SYM3])
    dense = {Lifted(2, 20).index, Lifted(4, 20).index}
    if not dense <= sym_block:
        raise AssertionError("2-Dense and 3-Sym are not in one block; checker bug?")
    witness = witness_2dense_not_3sym()
    vec = property_vector(witness)
    rest = sym_block - dense
    if any(vec >> i & 1 for i in rest) or not all(vec >> i & 1 for i in dense):
        raise AssertionError("witness does not separate exactly {2-de, 4-de}")
    blocks = [b for b in part.blocks if b is not sym_block] + [frozenset(rest), frozenset(dense)]
    by_rank: dict[int, frozenset[int]] = {}
    for b in blocks:
        ranks = [r for r, rep in enumerate(REPS) if rep.index in b]
        if len(ranks) != 1:
            names = ", ".join(REP_NAMES[r] for r in ranks) or "none"
            raise AssertionError(f"block {chain(b)} holds representatives: {names}")
        by_rank[ranks[0]] = b
    return Classes(
        [
            EqClass(r, REPS[r], frozenset(Lifted.from_index(i) for i in by_rank[r]))
            for r in range(NCLASSES)
        ]
    )


def dump_classes(cls: Classes) -> str:
    lines = []
    for c in cls.classes:
        members = " ".join(lp.short() for lp in sorted(c.members, key=lambda l: (l.prop, l.op)))
        lines.append(f"{c.rank} {members}")
    return "\n".join(lines) + "\n"


def parse_classes(text: str) -> Classes:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rank, *names = line.split()
        r = int(rank)
        members = frozenset(parse_lifted(s) for s in names)
        out.append(EqClass(r, REPS[r], members))
    out.sort(key=lambda c: c.rank)
    return Classes(out)


@lru_cache(maxsize=1)
def classes() -> Classes:
    """The shipped 81-class table (produced by refine(5) + final_classes)."""
    text = resources.files("relimpl.data").joinpath("classes.txt").read_text()
    return parse_classes(text)

