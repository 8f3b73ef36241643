"""Refuting 3-implications with concrete relations.

Three sources of invalid cells: the bulk sweep over every relation of one
domain size, a catalog of hand-built finite witnesses on larger domains, and
a catalog of infinite-domain facts that are trusted with a citation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numba
import numpy as np

from .equivalence import NCLASSES, Classes, classes, profiles
from .properties import check_lifted, property_vector, sampled_profiles
from .relation import Relation, all_relations, to_unsigned
from .store import (
    CEX,
    INVALID,
    NCELLS,
    TRUSTED,
    UNKNOWN,
    VALID,
    ConsistencyError,
    Store,
    decode,
    decode_index,
    describe,
    encode_index,
)

N = NCLASSES


@dataclass(frozen=True)
class Witness:
    kind: str  # "generated", "manual-finite" or "trusted-infinite"
    targets: tuple[str, ...]
    relation: Relation | None = None
    citation: str = ""

    def refutes(self, code: str, cls: Classes | None = None) -> bool:
        """Antecedents hold on the relation and the conclusion fails."""
        if self.relation is None:
            return False
        return refutes(self.relation, code, cls)

    def serialize(self) -> str:
        pairs = ",".join(f"({x},{y})" for x, y in self.relation.pairs())
        return f"n={self.relation.n}; pairs={pairs}; targets={' '.join(self.targets)}; citation={self.citation}"


def class_vector(r: Relation, cls: Classes | None = None) -> int:
    """81-bit integer; bit c is the truth of class c on r."""
    cls = cls or classes()
    vec = property_vector(r)
    out = 0
    for c in cls.classes:
        if vec >> c.rep.index & 1:
            out |= 1 << c.rank
    return out


def refutes(r: Relation, code, cls: Classes | None = None) -> bool:
    i, j, k = decode(code) if isinstance(code, str) else code
    v = class_vector(r, cls)
    return bool(v >> i & 1 and v >> j & 1 and not v >> k & 1)


def search(code: str, max_n: int = 5, cls: Classes | None = None) -> Witness | None:
    """First relation, by domain size then packed word, refuting the implication."""
    if max_n > 5:
        raise ValueError("search is limited to domains of at most 5 elements")
    cls = cls or classes()
    i, j, k = decode(code)
    reps = [cls[x].rep for x in (i, j, k)]
    for n in range(1, max_n + 1):
        if n <= 3:
            for r in all_relations(n):
                if _refutes_reps(r, reps):
                    return Witness("generated", (code,), r, f"search n={n}")
            continue
        masks, words = profiles(n)
        hit = _first_refuting(masks, *(np.int64(x) for x in _rep_args(reps)))
        if hit >= 0:
            return Witness("generated", (code,), Relation(n, int(words[hit])), f"search n={n}")
    return None


def _refutes_reps(r: Relation, reps) -> bool:
    a, b, c = reps
    return check_lifted(a, r) and check_lifted(b, r) and not check_lifted(c, r)


def _rep_args(reps):
    return [x for lp in reps for x in (lp.op, lp.prop)]


@numba.njit(cache=True)
def _first_refuting(masks, q1, p1, q2, p2, q3, p3):
    for r in range(masks.shape[0]):
        if (masks[r, q1] >> p1) & 1 and (masks[r, q2] >> p2) & 1 and not (masks[r, q3] >> p3) & 1:
            return r
    return -1


# ---------------------------------------------------------------------------
# bulk sweep


def class_vectors(masks: np.ndarray, cls: Classes | None = None) -> np.ndarray:
    """[P, 2] uint64 class bitsets from [P, 16] basic masks."""
    cls = cls or classes()
    out = np.zeros((len(masks), 2), np.uint64)
    for c in cls.classes:
        bit = ((masks[:, c.rep.op] >> c.rep.prop) & 1).astype(np.uint64)
        out[:, c.rank // 64] |= bit << np.uint64(c.rank % 64)
    return out


@numba.njit(cache=True)
def _refuted(vecs):
    """first[cell]: index of the first vector refuting the cell, or -1."""
    first = np.full(NCELLS, -1, np.int64)
    seen = np.zeros((N, N, 2), np.uint64)
    full1 = (np.uint64(1) << np.uint64(N - 64)) - np.uint64(1)
    ones = np.empty(N, np.int64)
    for r in range(vecs.shape[0]):
        v0 = vecs[r, 0]
        v1 = vecs[r, 1]
        m = 0
        for i in range(N):
            w = v0 if i < 64 else v1
            if (w >> np.uint64(i & 63)) & np.uint64(1):
                ones[m] = i
                m += 1
        miss0 = ~v0
        miss1 = ~v1 & full1
        for a in range(m):
            i = ones[a]
            for b in range(m):
                j = ones[b]
                new0 = miss0 & ~seen[i, j, 0]
                new1 = miss1 & ~seen[i, j, 1]
                if new0 == 0 and new1 == 0:
                    continue
                seen[i, j, 0] |= new0
                seen[i, j, 1] |= new1
                base = (i * N + j) * N
                for k in range(N):
                    w = new0 if k < 64 else new1
                    if (w >> np.uint64(k & 63)) & np.uint64(1):
                        first[base + k] = r
    return first


def refuted_cells(n: int, cls: Classes | None = None):
    """(first, words): per cell the index into words of its smallest refuting relation."""
    masks, words = profiles(n)
    return _refuted(class_vectors(masks, cls)), words


def sweep(store: Store, max_n: int = 5, min_n: int | None = None, cls: Classes | None = None) -> int:
    """Mark invalid every cell refuted by some relation with min_n <= n <= max_n.

    min_n defaults to max_n: a few valid laws need a large enough domain, so
    smaller domains would refute them.
    """
    if max_n > 5:
        raise ValueError("the sweep enumerates every relation; domains above 5 are out of reach")
    min_n = max_n if min_n is None else min_n
    added = 0
    for n in range(min_n, max_n + 1):
        first, words = refuted_cells(n, cls)
        cells = np.flatnonzero(first >= 0)
        clash = cells[store.value[cells] == VALID]
        if len(clash):
            idx = int(clash[0])
            w = to_unsigned(int(words[first[idx]]))
            raise ConsistencyError(
                f"{encode_index(idx)} {describe(idx)}: already + by "
                f"{store.justification(idx).label()}, now - by cex:n{n}:{w}"
            )
        fresh = cells[store.value[cells] == UNKNOWN]
        used = np.unique(first[fresh])
        tag_of = {int(u): store.intern(f"n{n}:{to_unsigned(int(words[u]))}") for u in used}
        lookup = np.vectorize(tag_of.__getitem__, otypes=[np.int64])
        store.value[fresh] = INVALID
        store.rule[fresh] = CEX
        store.prem[fresh] = -1
        store.depth[fresh] = 0
        if len(fresh):
            store.aux[fresh] = lookup(first[fresh])
        added += len(fresh)
    return added


def relation_of_tag(tag: str) -> Relation:
    """The relation behind a "n5:<word>" counter-example tag."""
    m = re.fullmatch(r"n(\d+):(\d+)", tag)
    if not m:
        raise ValueError(f"not a generated counter-example tag: {tag!r}")
    return Relation(int(m.group(1)), int(m.group(2)))


def sampled_refutations(n: int, count: int, seed: int, cls: Classes | None = None):
    """Like refuted_cells but over pseudo-random relations on larger domains."""
    masks, words = sampled_profiles(n, count, seed)
    return _refuted(class_vectors(masks, cls)), words


# ---------------------------------------------------------------------------
# catalogs


_LINE = re.compile(r"^n=(\d+);\s*pairs=(.*?);\s*targets=([0a-z ]+);\s*citation=(.*)$")


def parse_witness(line: str, kind: str = "manual-finite") -> Witness:
    m = _LINE.match(line.strip())
    if not m:
        raise ValueError(f"malformed witness line: {line!r}")
    n = int(m.group(1))
    pairs = [(int(a), int(b)) for a, b in re.findall(r"\((\d+),(\d+)\)", m.group(2))]
    return Witness(kind, tuple(m.group(3).split()), Relation.from_pairs(n, pairs), m.group(4).strip())


@lru_cache(maxsize=1)
def manual_finite_catalog() -> tuple[Witness, ...]:
    """Hand-built witnesses on 6 or more elements, re-verified on load."""
    text = resources.files("relimpl.data").joinpath("witnesses.txt").read_text()
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        w = parse_witness(line)
        for code in w.targets:
            if not w.refutes(code):
                raise AssertionError(f"witness for {code} does not refute {describe(code)}")
        out.append(w)
    return tuple(out)


@lru_cache(maxsize=1)
def trusted_infinite_catalog() -> tuple[Witness, ...]:
    """Invalid cells justified by infinite structures; trusted, not checked."""
    text = resources.files("relimpl.data").joinpath("trusted.txt").read_text()
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        code, citation = line.split(None, 1)
        decode_index(code)
        out.append(Witness("trusted-infinite", (code,), None, citation.strip()))
    return tuple(out)


def apply_catalogs(store: Store) -> int:
    added = 0
    for w in manual_finite_catalog():
        rel = f"n{w.relation.n}:{w.relation.bits}"
        for code in w.targets:
            added += store.leaf(code, INVALID, CEX, rel)
    for w in trusted_infinite_catalog():
        added += store.leaf(w.targets[0], INVALID, TRUSTED, w.citation)
    return added
