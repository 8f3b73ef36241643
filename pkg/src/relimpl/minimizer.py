"""Shrinking a generating set of valid implications to an axiom set.

A derivation is orderly when every inference concludes a cell strictly
greater, under a fixed total order, than each of its premises.  Given a
kernel that derives every valid cell, the members that are not orderly
derivable from the rest still derive everything; one ascending pass over
the valid cells finds them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numba
import numpy as np

from .counterexamples import refuted_cells
from .equivalence import FALSE, NCLASSES, TRUE, Classes, classes
from .inference import PAIR_WORDS, _bits, _put, close_positive, initialize
from .store import AXIOM, NCELLS, VALID, Store, decode_index, encode_index, short_name, triple

N = NCLASSES

# ---------------------------------------------------------------------------
# orders


def simplicity(idx: int, cls: Classes | None = None) -> int:
    """Lower is simpler: few distinct atoms, then few lifted (non-basic) atoms."""
    cls = cls or classes()
    i, j, k = triple(idx)
    atoms = {x for x in (i, j, k) if x not in (TRUE, FALSE)}
    lifted = sum(1 for x in atoms if cls.plain(x).op != 3)
    return len(atoms) * 4 + lifted


@lru_cache(maxsize=1)
def simplicity_table() -> np.ndarray:
    cls = classes()
    out = np.empty(NCELLS, np.int64)
    atoms = np.zeros(N, np.int64)
    for x in range(N):
        atoms[x] = 0 if x in (TRUE, FALSE) else (2 if cls.plain(x).op != 3 else 1)
    cells = np.arange(NCELLS)
    i, j, k = cells // (N * N), cells // N % N, cells % N
    distinct = (atoms[i] > 0).astype(np.int64)
    distinct += (atoms[j] > 0) & (j != i)
    distinct += (atoms[k] > 0) & (k != i) & (k != j)
    lifted = (atoms[i] == 2).astype(np.int64)
    lifted += (atoms[j] == 2) & (j != i)
    lifted += (atoms[k] == 2) & (k != i) & (k != j)
    out[:] = distinct * 4 + lifted
    return out


@dataclass(frozen=True)
class ProofOrder:
    """Cells compare by (not init, simplicity, permuted and xor-masked digits)."""

    permutation: tuple[int, ...] = (0, 1, 2, 3)
    mask: int = 0
    use_simplicity: bool = True

    def __post_init__(self):
        if sorted(self.permutation) != [0, 1, 2, 3]:
            raise ValueError("permutation must reorder the four code positions")

    def keys(self, init: np.ndarray) -> np.ndarray:
        cells = np.arange(NCELLS, dtype=np.int64)
        digits = [(cells // 27**(3 - p)) % 27 for p in range(4)]
        key = np.zeros(NCELLS, np.int64)
        for p in self.permutation:
            key = key * 32 + (digits[p] ^ self.mask)
        if self.use_simplicity:
            key += simplicity_table() << 20
        key += (~init).astype(np.int64) << 40
        return key

    def ranks(self, init: np.ndarray) -> np.ndarray:
        """rank[cell]: position of the cell in the order (a permutation of all cells)."""
        order = np.argsort(self.keys(init), kind="stable")
        rank = np.empty(NCELLS, np.int64)
        rank[order] = np.arange(NCELLS)
        return rank

    def __str__(self) -> str:
        return f"perm={''.join(map(str, self.permutation))} mask={self.mask}"


DEFAULT_ORDERS = tuple(
    ProofOrder(perm, mask)
    for perm in ((0, 1, 2, 3), (2, 3, 0, 1), (3, 2, 1, 0), (1, 0, 3, 2))
    for mask in (0, 21)
)


# ---------------------------------------------------------------------------
# orderly derivability


@numba.njit(cache=True)
def _orderly(valid, leaf, rank, opmap):
    """derived[c]: c has an orderly rule instance whose premises are all reachable."""
    cells = np.flatnonzero(valid)
    order = cells[np.argsort(rank[cells])]
    inO = np.zeros(NCELLS, np.bool_)
    derived = np.zeros(NCELLS, np.bool_)
    D = np.zeros((N, N, 2), np.uint64)
    PH = np.zeros((N, PAIR_WORDS), np.uint64)
    xs = np.empty(N, np.int64)
    ks = np.empty(N, np.int64)
    for c in order:
        if not (leaf[c] or derived[c]):
            continue
        inO[c] = True
        ab = c // N
        a = ab // N
        b = ab % N
        k = c % N
        _put(D[a, b], k)
        _put(PH[k], ab)
        rc = rank[c]
        # c is the largest premise of every instance fired here
        t = (b * N + a) * N + k
        if valid[t] and rank[t] > rc:
            derived[t] = True
        for p in range(16):
            t = (opmap[a, p] * N + opmap[b, p]) * N + opmap[k, p]
            if valid[t] and rank[t] > rc:
                derived[t] = True
        m = _bits(D[a, b, 0], D[a, b, 1], xs)
        for yi in range(m):
            y = xs[yi]
            n2 = _bits(D[k, y, 0], D[k, y, 1], ks)
            for ki in range(n2):
                t = ab * N + ks[ki]
                if rank[t] > rc:
                    derived[t] = True
            n2 = _bits(D[y, k, 0], D[y, k, 1], ks)
            for ki in range(n2):
                t = ab * N + ks[ki]
                if rank[t] > rc:
                    derived[t] = True
        for w in range(PAIR_WORDS):
            word = PH[a, w] & PH[b, w]
            if word == 0:
                continue
            for bit in range(64):
                if (word >> np.uint64(bit)) & np.uint64(1):
                    t = (w * 64 + bit) * N + k
                    if rank[t] > rc:
                        derived[t] = True
    return inO, derived


@dataclass
class AxiomSet:
    members: list[int]
    order: ProofOrder | None = None
    derives_all: bool = False
    trajectory: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def codes(self) -> list[str]:
        return [encode_index(c) for c in self.members]


class Minimizer:
    """Holds the valid set and the trivially initialized cells it reduces against."""

    def __init__(self, valid: np.ndarray, cls: Classes | None = None):
        self.cls = cls or classes()
        self.valid = np.asarray(valid, dtype=np.bool_)
        base = Store()
        initialize(base, self.cls)
        self.init = base.value == VALID
        self.opmap = np.array(self.cls.opmap, dtype=np.int64)
        self.total = int(self.valid.sum())

    def orderly(self, kernel, order: ProofOrder):
        leaf = self.init.copy()
        leaf[np.asarray(list(kernel), dtype=np.int64)] = True
        return _orderly(self.valid, leaf & self.valid, order.ranks(self.init), self.opmap)

    def reduce(self, kernel, order: ProofOrder) -> AxiomSet:
        """Kernel members with no orderly derivation from the other members."""
        kernel = sorted(int(c) for c in kernel if not self.init[c])
        _, derived = self.orderly(kernel, order)
        members = [c for c in kernel if not derived[c]]
        result = AxiomSet(members, order, trajectory=[len(kernel), len(members)])
        result.derives_all = self.derives_all(members)
        if not result.derives_all:
            raise AssertionError(f"reduced set misses {self.first_missing(members)}")
        return result

    def iterate(self, kernel, orders=DEFAULT_ORDERS) -> AxiomSet:
        current = sorted(int(c) for c in kernel if not self.init[c])
        trajectory = [len(current)]
        result = None
        for order in orders:
            result = self.reduce(current, order)
            current = result.members
            trajectory.append(len(current))
        result.trajectory = trajectory
        return result

    def closure(self, members) -> Store:
        s = Store()
        initialize(s, self.cls)
        for c in members:
            s.leaf(int(c), VALID, AXIOM, encode_index(int(c)))
        close_positive(s, cls=self.cls)
        return s

    def derives_all(self, members) -> bool:
        got = self.closure(members).value == VALID
        return bool(np.array_equal(got, self.valid))

    def first_missing(self, members) -> str | None:
        got = self.closure(members).value == VALID
        miss = np.flatnonzero(self.valid & ~got)
        return encode_index(int(miss[0])) if len(miss) else None

    def greedy_drop(self, axioms, order: ProofOrder | None = None, candidates=None) -> AxiomSet:
        """Drop members one at a time, least simple first, while the rest still derive all.

        candidates restricts which members are tried; each try is one full closure.
        """
        table = simplicity_table()
        keep = list(int(c) for c in axioms)
        tries = keep if candidates is None else [int(c) for c in candidates]
        for c in sorted(tries, key=lambda c: (-int(table[c]), -c)):
            rest = [x for x in keep if x != c]
            if self.derives_all(rest):
                keep = rest
        return AxiomSet(sorted(keep), order, derives_all=True)

    def is_minimal(self, members, order: ProofOrder) -> bool:
        """No member has an orderly derivation from the others."""
        _, derived = self.orderly(members, order)
        return not any(derived[c] for c in members)


# ---------------------------------------------------------------------------
# the published axiom table


@dataclass(frozen=True)
class AxiomRow:
    code: str
    min_card: int
    names: tuple[str, str, str]

    @property
    def index(self) -> int:
        return decode_index(self.code)


@lru_cache(maxsize=1)
def published_axioms() -> tuple[AxiomRow, ...]:
    """The shipped 124-row axiom table; names are checked against the codes."""
    cls = classes()
    text = resources.files("relimpl.data").joinpath("axioms.txt").read_text()
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        code, card, *names = line.split()
        ranks = tuple(FALSE if s == "-" else cls.rank_of(s) for s in names)
        if ranks != triple(decode_index(code)):
            raise AssertionError(f"axiom row {code} names {names} disagree with its code")
        rows.append(AxiomRow(code, int(card), tuple(names)))
    return tuple(rows)


def load_axioms(store: Store) -> int:
    added = 0
    for row in published_axioms():
        if store.leaf(row.code, VALID, AXIOM, row.code):
            added += 1
        store.mincard[row.index] = row.min_card
    return added


@dataclass
class AxiomReport:
    unsound: list[tuple[str, int]]  # (code, n) refuted at or above the stated minimum
    thresholds: dict[str, list[int]]  # code -> the n in 1..max_n that refute it
    valid_count: int

    @property
    def sound(self) -> bool:
        return not self.unsound


def verify_published_axioms(max_n: int = 5, store: Store | None = None) -> AxiomReport:
    """Soundness at each size from the stated minimum up to max_n, and the closure size."""
    rows = published_axioms()
    idx = np.array([r.index for r in rows])
    refuted_at = {r.code: [] for r in rows}
    for n in range(1, max_n + 1):
        first, _ = refuted_cells(n)
        for r, hit in zip(rows, first[idx] >= 0):
            if hit:
                refuted_at[r.code].append(n)
    unsound = [(r.code, n) for r in rows for n in refuted_at[r.code] if n >= r.min_card]
    if store is None:
        store = Store()
        initialize(store)
        load_axioms(store)
        close_positive(store)
    return AxiomReport(unsound, refuted_at, store.valid)


def render_axioms(members, cls: Classes | None = None) -> str:
    """One row per axiom: code, minimum cardinality, then the three atoms."""
    cls = cls or classes()
    cards = {r.code: r.min_card for r in published_axioms()}
    lines = []
    for c in sorted(members, key=lambda c: (simplicity(c, cls), c)):
        code = encode_index(c)
        i, j, k = triple(c)
        card = cards.get(code, 1)
        note = f"≥{card}" if card > 1 else ""
        atoms = [short_name(x, cls) for x in (i, j, k)]
        if i == j:
            atoms = ["", atoms[1], atoms[2]]
        lines.append(f"{code} {note:3s} {atoms[0]:>5s} {atoms[1]:>5s} → {atoms[2]}")
    return "\n".join(lines)
