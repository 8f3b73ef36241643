"""Trivial initialization, the six inference rules and proof tree extraction.

Rules, on class ranks (a, b, k) standing for a ∧ b → k:

    1  a∧b→k  gives  b∧a→k
    2  b∧a↛k  gives  a∧b↛k
    3  a∧b→x, a∧b→y, x∧y→k  give  a∧b→k   (cut; with x = a this is the
       textbook "I∧J→K, H∧I→J" form, with y = false it yields explosion)
    4  the contrapositives of 3: an invalid conclusion plus two valid
       premises make the third premise invalid
    5  a∧b→k  gives  a^p∧b^p→k^p for every operation p
    6  a^p∧b^p↛k^p  gives  a∧b↛k

Rules 1, 3 and 5 run to a fixed point first; 2, 4 and 6 then run against the
final valid set, so every instance of 4 sees all of its valid premises.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numba
import numpy as np

from .equivalence import FALSE, NCLASSES, TRUE, Classes, classes
from .properties import implied_by_mono
from .store import (
    INIT,
    INVALID,
    NCELLS,
    UNKNOWN,
    VALID,
    ConsistencyError,
    Store,
    describe,
    encode_index,
    _idx,
    triple,
)

N = NCLASSES
NPAIRS = N * N
PAIR_WORDS = (NPAIRS + 63) // 64

INIT_RULES = {
    1: "x ∧ y → true",
    2: "x ∧ false → z",
    3: "false ∧ y → z",
    4: "x ∧ y → x' by monotonicity",
    5: "x ∧ y → y' by monotonicity",
}


def mono_successors(cls: Classes | None = None) -> list[set[int]]:
    """succ[x]: classes x' with x → x' known from (anti)monotonicity of members."""
    cls = cls or classes()
    succ = [{c.rank} for c in cls.classes]
    for x in cls.classes:
        for y in cls.classes:
            if y.rank in succ[x.rank]:
                continue
            if any(implied_by_mono(m, m2) for m in x.members for m2 in y.members):
                succ[x.rank].add(y.rank)
    return succ


def init_rule(i: int, j: int, k: int, succ) -> int:
    """Number of the first initialization rule covering the cell, or 0."""
    if k == TRUE:
        return 1
    if j == FALSE:
        return 2
    if i == FALSE:
        return 3
    if k in succ[i]:
        return 4
    if k in succ[j]:
        return 5
    return 0


def initialize(store: Store, cls: Classes | None = None) -> int:
    """Mark every trivially valid cell; returns the number newly set."""
    succ = mono_successors(cls)
    vals = np.zeros(NCELLS, dtype=np.int8)
    for i in range(N):
        for j in range(N):
            base = (i * N + j) * N
            for k in range(N):
                vals[base + k] = init_rule(i, j, k, succ)
    cells = np.flatnonzero(vals)
    clash = cells[store.value[cells] == INVALID]
    if len(clash):
        idx = int(clash[0])
        raise ConsistencyError(
            f"{encode_index(idx)} {describe(idx)}: already - by "
            f"{store.justification(idx).label()}, now + by init"
        )
    fresh = cells[store.value[cells] == UNKNOWN]
    tags = [store.intern(str(r)) for r in range(6)]
    store.value[fresh] = VALID
    store.rule[fresh] = INIT
    store.prem[fresh] = -1
    store.aux[fresh] = np.array(tags, dtype=np.int64)[vals[fresh]]
    store.depth[fresh] = 0
    return len(fresh)


# ---------------------------------------------------------------------------
# numba kernels; bitsets are uint64 words, D[a, b] holds the valid k of (a, b)


@numba.njit(cache=True)
def _has(words, i):
    return (words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)


@numba.njit(cache=True)
def _put(words, i):
    words[i >> 6] |= np.uint64(1) << np.uint64(i & 63)


@numba.njit(cache=True)
def _bits(w0, w1, out):
    m = 0
    for i in range(64):
        if (w0 >> np.uint64(i)) & np.uint64(1):
            out[m] = i
            m += 1
    for i in range(N - 64):
        if (w1 >> np.uint64(i)) & np.uint64(1):
            out[m] = 64 + i
            m += 1
    return m


@numba.njit(cache=True)
def _valid_sets(val):
    D = np.zeros((N, N, 2), np.uint64)
    PH = np.zeros((N, PAIR_WORDS), np.uint64)
    E = np.zeros((N, N, 2), np.uint64)  # E[x, k]: the l with (x, l, k) valid
    for c in range(NCELLS):
        if val[c] == 1:
            ab = c // N
            a = ab // N
            b = ab % N
            k = c % N
            _put(D[a, b], k)
            _put(PH[k], ab)
            _put(E[a, k], b)
    return D, PH, E


@numba.njit(cache=True)
def _derive(t, want, r, p0, p1, p2, ax, val, rule, prem, aux, depth, state):
    """Record cell t with value want; state = [tail, conflict cell, conflict source]."""
    v = val[t]
    if v == want:
        return False
    if v != 0:
        state[1] = t
        state[2] = p0
        return False
    val[t] = want
    rule[t] = r
    prem[t, 0] = p0
    prem[t, 1] = p1
    prem[t, 2] = p2
    aux[t] = ax
    d = depth[p0]
    if p1 >= 0 and depth[p1] > d:
        d = depth[p1]
    if p2 >= 0 and depth[p2] > d:
        d = depth[p2]
    depth[t] = d + 1
    return True


@numba.njit(cache=True)
def _push(queue, state, t):
    queue[state[0]] = t
    state[0] += 1


@numba.njit(cache=True)
def _positive(val, rule, prem, aux, depth, opmap, lifo):
    D, PH, _ = _valid_sets(val)
    queue = np.empty(NCELLS, np.int32)
    state = np.zeros(3, np.int64)
    state[1] = -1
    head = 0
    if lifo:
        for c in range(NCELLS - 1, -1, -1):
            if val[c] == 1:
                _push(queue, state, c)
    else:
        for c in range(NCELLS):
            if val[c] == 1:
                _push(queue, state, c)
    xs = np.empty(N, np.int64)
    ks = np.empty(N, np.int64)
    added = 0
    while True:
        if lifo:
            if state[0] == 0:
                break
            state[0] -= 1
            c = queue[state[0]]
        else:
            if head == state[0]:
                break
            c = queue[head]
            head += 1
        ab = c // N
        a = ab // N
        b = ab % N
        k = c % N
        # rule 1
        t = (b * N + a) * N + k
        if _derive(t, 1, 1, c, -1, -1, -1, val, rule, prem, aux, depth, state):
            _put(D[b, a], k)
            _put(PH[k], b * N + a)
            _push(queue, state, t)
            added += 1
        if state[1] >= 0:
            return added, state[1], state[2]
        # rule 5
        for p in range(16):
            a2 = opmap[a, p]
            b2 = opmap[b, p]
            k2 = opmap[k, p]
            t = (a2 * N + b2) * N + k2
            if _derive(t, 1, 5, c, -1, -1, p, val, rule, prem, aux, depth, state):
                _put(D[a2, b2], k2)
                _put(PH[k2], a2 * N + b2)
                _push(queue, state, t)
                added += 1
            if state[1] >= 0:
                return added, state[1], state[2]
        # rule 3, c as a premise a∧b→x; y runs over D[a, b]
        m = _bits(D[a, b, 0], D[a, b, 1], xs)
        for yi in range(m):
            y = xs[yi]
            n2 = _bits(D[k, y, 0] & ~D[a, b, 0], D[k, y, 1] & ~D[a, b, 1], ks)
            for ki in range(n2):
                k2 = ks[ki]
                t = ab * N + k2
                if _derive(t, 1, 3, c, ab * N + y, (k * N + y) * N + k2, -1,
                           val, rule, prem, aux, depth, state):
                    _put(D[a, b], k2)
                    _put(PH[k2], ab)
                    _push(queue, state, t)
                    added += 1
                if state[1] >= 0:
                    return added, state[1], state[2]
        # c as a premise a∧b→y; x runs over D[a, b]
        m = _bits(D[a, b, 0], D[a, b, 1], xs)
        for xi in range(m):
            x = xs[xi]
            n2 = _bits(D[x, k, 0] & ~D[a, b, 0], D[x, k, 1] & ~D[a, b, 1], ks)
            for ki in range(n2):
                k2 = ks[ki]
                t = ab * N + k2
                if _derive(t, 1, 3, ab * N + x, c, (x * N + k) * N + k2, -1,
                           val, rule, prem, aux, depth, state):
                    _put(D[a, b], k2)
                    _put(PH[k2], ab)
                    _push(queue, state, t)
                    added += 1
                if state[1] >= 0:
                    return added, state[1], state[2]
        # c as the premise x∧y→k; pairs (A, B) deriving both a and b
        for w in range(PAIR_WORDS):
            word = PH[a, w] & PH[b, w]
            if word == 0:
                continue
            for bit in range(64):
                if not (word >> np.uint64(bit)) & np.uint64(1):
                    continue
                pair = w * 64 + bit
                A = pair // N
                B = pair % N
                if _has(D[A, B], k):
                    continue
                t = pair * N + k
                if _derive(t, 1, 3, pair * N + a, pair * N + b, c, -1,
                           val, rule, prem, aux, depth, state):
                    _put(D[A, B], k)
                    _put(PH[k], pair)
                    _push(queue, state, t)
                    added += 1
                if state[1] >= 0:
                    return added, state[1], state[2]
    return added, -1, -1


@numba.njit(cache=True)
def _negative(val, rule, prem, aux, depth, pre_start, pre_items, lifo):
    D, _, E = _valid_sets(val)
    queue = np.empty(NCELLS, np.int32)
    state = np.zeros(3, np.int64)
    state[1] = -1
    head = 0
    if lifo:
        for c in range(NCELLS - 1, -1, -1):
            if val[c] == 2:
                _push(queue, state, c)
    else:
        for c in range(NCELLS):
            if val[c] == 2:
                _push(queue, state, c)
    xs = np.empty(N, np.int64)
    ys = np.empty(N, np.int64)
    added = 0
    while True:
        if lifo:
            if state[0] == 0:
                break
            state[0] -= 1
            c = queue[state[0]]
        else:
            if head == state[0]:
                break
            c = queue[head]
            head += 1
        ab = c // N
        a = ab // N
        b = ab % N
        k = c % N
        # rule 2
        t = (b * N + a) * N + k
        if _derive(t, 2, 2, c, -1, -1, -1, val, rule, prem, aux, depth, state):
            _push(queue, state, t)
            added += 1
        if state[1] >= 0:
            return added, state[1], state[2]
        # rule 6: every cell whose image under p is c
        for p in range(16):
            for ia in range(pre_start[p, a], pre_start[p, a + 1]):
                a2 = pre_items[p, ia]
                for ib in range(pre_start[p, b], pre_start[p, b + 1]):
                    b2 = pre_items[p, ib]
                    for ik in range(pre_start[p, k], pre_start[p, k + 1]):
                        k2 = pre_items[p, ik]
                        t = (a2 * N + b2) * N + k2
                        if _derive(t, 2, 6, c, -1, -1, p, val, rule, prem, aux, depth, state):
                            _push(queue, state, t)
                            added += 1
                        if state[1] >= 0:
                            return added, state[1], state[2]
        # rule 4: a∧b→x and a∧b→y valid, so x∧y→k cannot be
        m = _bits(D[a, b, 0], D[a, b, 1], xs)
        for xi in range(m):
            x = xs[xi]
            for yi in range(m):
                y = xs[yi]
                t = (x * N + y) * N + k
                if _derive(t, 2, 4, c, ab * N + x, ab * N + y, -1,
                           val, rule, prem, aux, depth, state):
                    _push(queue, state, t)
                    added += 1
                if state[1] >= 0:
                    return added, state[1], state[2]
            # a∧b→x and x∧l→k valid, so a∧b→l cannot be
            n2 = _bits(E[x, k, 0], E[x, k, 1], ys)
            for li in range(n2):
                l = ys[li]
                t = ab * N + l
                if _derive(t, 2, 4, c, ab * N + x, (x * N + l) * N + k, -1,
                           val, rule, prem, aux, depth, state):
                    _push(queue, state, t)
                    added += 1
                if state[1] >= 0:
                    return added, state[1], state[2]
    return added, -1, -1


def _opmap(cls: Classes) -> np.ndarray:
    return np.array(cls.opmap, dtype=np.int64)


def _preimages(cls: Classes):
    """CSR lists per operation: classes x with opmap[x][p] == y."""
    om = _opmap(cls)
    start = np.zeros((16, N + 1), np.int64)
    items = np.zeros((16, N), np.int64)
    for p in range(16):
        pos = 0
        for y in range(N):
            start[p, y] = pos
            for x in range(N):
                if om[x, p] == y:
                    items[p, pos] = x
                    pos += 1
        start[p, N] = pos
    return start, items


def _conflict(store: Store, cell: int, source: int, value: int) -> ConsistencyError:
    other = {VALID: "+", INVALID: "-"}
    return ConsistencyError(
        f"{encode_index(cell)} {describe(cell)}: already {other[int(store.value[cell])]} by "
        f"{store.justification(cell).label()}, now {other[value]} inferred from "
        f"{encode_index(source)} ({store.justification(source).label()})"
    )


STRATEGIES = ("breadth", "depth")


def close_positive(store: Store, strategy: str = "breadth", cls: Classes | None = None) -> int:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    cls = cls or classes()
    added, cell, source = _positive(
        store.value, store.rule, store.prem, store.aux, store.depth, _opmap(cls), strategy == "depth"
    )
    if cell >= 0:
        raise _conflict(store, int(cell), int(source), VALID)
    return int(added)


def close_negative(store: Store, strategy: str = "breadth", cls: Classes | None = None) -> int:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    cls = cls or classes()
    start, items = _preimages(cls)
    added, cell, source = _negative(
        store.value, store.rule, store.prem, store.aux, store.depth, start, items, strategy == "depth"
    )
    if cell >= 0:
        raise _conflict(store, int(cell), int(source), INVALID)
    return int(added)


def close(store: Store, strategy: str = "breadth", cls: Classes | None = None) -> int:
    """Apply all six rules to a fixed point; returns the number of inferred cells."""
    return close_positive(store, strategy, cls) + close_negative(store, strategy, cls)


# ---------------------------------------------------------------------------
# proof trees


@dataclass
class ProofNode:
    code: str
    index: int
    sign: str
    label: str
    premises: list[ProofNode] = field(default_factory=list)
    shared: bool = False

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def leaves(self) -> list[ProofNode]:
        if not self.premises:
            return [self]
        return [leaf for p in self.premises for leaf in p.leaves()]

    def render(self, indent: int = 0) -> list[str]:
        i, j, k = triple(self.index)
        line = f"{'  ' * indent}{self.code} [{i}][{j}][{k}] {self.sign} {describe(self.index)}"
        line += f"  ({self.label}{', see above' if self.shared else ''})"
        out = [line]
        for p in self.premises:
            out.extend(p.render(indent + 1))
        return out

    def __str__(self) -> str:
        return "\n".join(self.render())


def justify(store: Store, code) -> ProofNode | None:
    """The recorded derivation of a cell; None while it is undecided.

    A cell reached twice in one tree is expanded at its first occurrence only.
    """
    root = _idx(code)
    if store.value[root] == UNKNOWN:
        return None
    seen: set[int] = set()

    def build(idx: int) -> ProofNode:
        just = store.justification(idx)
        sign = "+" if store.value[idx] == VALID else "-"
        node = ProofNode(encode_index(idx), idx, sign, just.label())
        if idx in seen and just.premises:
            node.shared = True
            return node
        seen.add(idx)
        node.premises = [build(p) for p in just.premises]
        return node

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, int(store.depth.max()) * 4 + 1000))
    try:
        return build(root)
    finally:
        sys.setrecursionlimit(limit)
