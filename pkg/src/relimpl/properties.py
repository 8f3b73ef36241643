"""The 24 basic relation properties, lifted properties and monotonicity data."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numba
import numpy as np

from .relation import HEX, Relation, apply, apply_word, to_signed, transpose_word


class Mono(Enum):
    MONOTONIC = "monotonic"
    ANTITONIC = "antitonic"
    NEITHER = "neither"


@dataclass(frozen=True)
class BasicProperty:
    index: int
    long: str
    code2: str
    mono: Mono


_M, _A, _N = Mono.MONOTONIC, Mono.ANTITONIC, Mono.NEITHER

PROPS = tuple(
    BasicProperty(i, long, short, mono)
    for i, (long, short, mono) in enumerate(
        [
            ("Refl", "rf", _M),
            ("Irrefl", "ir", _A),
            ("CoRefl", "cr", _A),
            ("LfQuasiRefl", "lq", _N),
            ("RgQuasiRefl", "rq", _N),
            ("QuasiRefl", "qr", _N),
            ("Sym", "sy", _N),
            ("ASym", "as", _A),
            ("AntiSym", "an", _A),
            ("SemiConnex", "sc", _M),
            ("Connex", "co", _M),
            ("Trans", "tr", _N),
            ("AntiTrans", "at", _A),
            ("QuasiTrans", "qt", _N),
            ("RgEucl", "re", _N),
            ("LfEucl", "le", _N),
            ("SemiOrd1", "s1", _N),
            ("SemiOrd2", "s2", _N),
            ("RgSerial", "rs", _M),
            ("LfSerial", "ls", _M),
            ("Dense", "de", _N),
            ("IncTrans", "it", _N),
            ("LfUnique", "lu", _A),
            ("RgUnique", "ru", _A),
        ]
    )
)
NPROPS = len(PROPS)
NLIFTED = 16 * NPROPS

_BY_NAME = {p.long.lower(): p for p in PROPS} | {p.code2: p for p in PROPS}


def prop(name: str | int) -> BasicProperty:
    if isinstance(name, int):
        return PROPS[name]
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown property {name!r}") from None


@dataclass(frozen=True, order=True)
class Lifted:
    """The lifted property op-prop: R has it iff R^op has prop."""

    op: int
    prop: int

    @property
    def index(self) -> int:
        return self.op * NPROPS + self.prop

    @classmethod
    def from_index(cls, i: int) -> Lifted:
        return cls(i // NPROPS, i % NPROPS)

    def short(self) -> str:
        return f"{HEX[self.op]}-{PROPS[self.prop].code2}"

    def long(self) -> str:
        return f"{HEX[self.op]}-{PROPS[self.prop].long}"

    def __str__(self) -> str:
        return self.short()


def parse_lifted(text: str) -> Lifted:
    """Accepts "3-tr", "C-Refl", "tr" (meaning 3-tr), "8-LfUnique"."""
    text = text.strip()
    if len(text) > 2 and text[1] == "-" and text[0].upper() in HEX:
        return Lifted(HEX.index(text[0].upper()), prop(text[2:]).index)
    return Lifted(3, prop(text).index)


# ---------------------------------------------------------------------------
# word kernels; a relation is (w, t) with t its transpose, rows of n bits


@numba.njit(cache=True)
def _row(w, x, n, low):
    return (w >> (x * n)) & low


@numba.njit(cache=True)
def _trans(w, n, low):
    for x in range(n):
        rx = _row(w, x, n, low)
        for y in range(n):
            if rx >> y & 1 and _row(w, y, n, low) & ~rx:
                return False
    return True


@numba.njit(cache=True)
def basic_mask(w, t, n):
    """Bit i set iff the relation has basic property i (PROPS order)."""
    low = (1 << n) - 1
    full = 0
    diag = 0
    for x in range(n):
        full |= low << (x * n)
        diag |= 1 << (x * n + x)
    refl = w & diag == diag
    irrefl = w & diag == 0
    corefl = w & ~diag == 0
    lq = True
    rq = True
    serial_r = True
    uniq_r = True
    uniq_l = True
    cols_any = 0
    for x in range(n):
        rx = _row(w, x, n, low)
        cx = _row(t, x, n, low)
        loop = rx >> x & 1
        if rx != 0 and not loop:
            lq = False
        if cx != 0 and not loop:
            rq = False
        if rx == 0:
            serial_r = False
        if rx & (rx - 1):
            uniq_r = False
        if cx & (cx - 1):
            uniq_l = False
        cols_any |= rx
    sym = w == t
    asym = w & t == 0
    antisym = w & t & ~diag == 0
    semiconnex = (w | t | diag) & full == full
    connex = (w | t) & full == full
    trans = _trans(w, n, low)
    quasitrans = _trans(w & ~t, n, low)
    inctrans = _trans(~w & ~t & full, n, low)
    antitrans = True
    reucl = True
    leucl = True
    dense = True
    for x in range(n):
        rx = _row(w, x, n, low)
        cx = _row(t, x, n, low)
        for y in range(n):
            if rx >> y & 1:
                ry = _row(w, y, n, low)
                if ry & rx:
                    antitrans = False
                if rx & ~ry:
                    reucl = False
                if rx & _row(t, y, n, low) == 0:
                    dense = False
            if cx >> y & 1:
                if cx & ~_row(w, y, n, low):
                    leucl = False
    s1 = True
    for x in range(n):
        if not s1:
            break
        rx = _row(w, x, n, low)
        cx = _row(t, x, n, low)
        inc = ~(rx | cx) & low
        for y in range(n):
            if inc >> y & 1:
                ry = _row(w, y, n, low)
                for v in range(n):
                    if cx >> v & 1 and ry & ~_row(w, v, n, low):
                        s1 = False
                        break
            if not s1:
                break
    s2 = True
    for x in range(n):
        if not s2:
            break
        rx = _row(w, x, n, low)
        kx = rx | _row(t, x, n, low)
        for y in range(n):
            if rx >> y & 1:
                ry = _row(w, y, n, low)
                kxy = kx | ry | _row(t, y, n, low)
                for z in range(n):
                    if ry >> z & 1:
                        if kxy | _row(w, z, n, low) | _row(t, z, n, low) != low:
                            s2 = False
                            break
            if not s2:
                break
    serial_l = cols_any == low
    bits = (
        (refl, irrefl, corefl, lq, rq, lq and rq, sym, asym, antisym, semiconnex,
         connex, trans, antitrans, quasitrans, reucl, leucl, s1, s2, serial_r,
         serial_l, dense, inctrans, uniq_l, uniq_r)
    )
    m = 0
    for i in range(24):
        if bits[i]:
            m |= 1 << i
    return m


@numba.njit(cache=True)
def lifted_masks(w, n, out):
    """out[q] = basic_mask of R^q for all 16 operations."""
    full = 0
    low = (1 << n) - 1
    for x in range(n):
        full |= low << (x * n)
    t = transpose_word(w, n)
    for q in range(16):
        img = apply_word(q, w, t, full)
        out[q] = basic_mask(img, transpose_word(img, n), n)


def check(p: BasicProperty | int | str, r: Relation) -> bool:
    """Truth of the basic property on r."""
    i = p.index if isinstance(p, BasicProperty) else prop(p).index
    return bool(basic_of(r) >> i & 1)


def basic_of(r: Relation) -> int:
    if r.n > 8:
        return _basic_slow(r)
    w = to_signed(r.bits)
    return int(basic_mask(w, transpose_word(w, r.n), r.n))


def check_lifted(lp: Lifted, r: Relation) -> bool:
    return check(lp.prop, apply(lp.op, r))


def property_vector(r: Relation) -> int:
    """384-bit integer; bit q*24 + p is the truth of q-p on r."""
    if r.n > 8:
        masks = [_basic_slow(apply(q, r)) for q in range(16)]
    else:
        out = np.zeros(16, dtype=np.int64)
        lifted_masks(to_signed(r.bits), r.n, out)
        masks = [int(m) for m in out]
    v = 0
    for q, m in enumerate(masks):
        v |= m << (q * NPROPS)
    return v


def vector_bit(vec: int, lp: Lifted) -> bool:
    return bool(vec >> lp.index & 1)


# ---------------------------------------------------------------------------
# direct first-order definitions, used for domains beyond a machine word and
# as an independent oracle for the word kernels


def _basic_slow(r: Relation) -> int:
    n = r.n
    D = range(n)

    def R(x, y):
        return (x, y) in r

    def inc(x, y):
        return not R(x, y) and not R(y, x)

    def asy(x, y):
        return R(x, y) and not R(y, x)

    lq = all(not R(x, y) or R(x, x) for x in D for y in D)
    rq = all(not R(x, y) or R(y, y) for x in D for y in D)
    truth = [
        all(R(x, x) for x in D),
        all(not R(x, x) for x in D),
        all(not R(x, y) or x == y for x in D for y in D),
        lq,
        rq,
        lq and rq,
        all(not R(x, y) or R(y, x) for x in D for y in D),
        all(not R(x, y) or not R(y, x) for x in D for y in D),
        all(not (R(x, y) and x != y) or not R(y, x) for x in D for y in D),
        all(R(x, y) or R(y, x) or x == y for x in D for y in D),
        all(R(x, y) or R(y, x) for x in D for y in D),
        all(not (R(x, y) and R(y, z)) or R(x, z) for x in D for y in D for z in D),
        all(not (R(x, y) and R(y, z)) or not R(x, z) for x in D for y in D for z in D),
        all(
            not (asy(x, y) and asy(y, z)) or asy(x, z) for x in D for y in D for z in D
        ),
        all(not (R(x, y) and R(x, z)) or R(y, z) for x in D for y in D for z in D),
        all(not (R(y, x) and R(z, x)) or R(y, z) for x in D for y in D for z in D),
        all(
            not (R(w, x) and inc(x, y) and R(y, z)) or R(w, z)
            for w in D for x in D for y in D for z in D
        ),
        all(
            not (R(x, y) and R(y, z)) or not (inc(w, x) and inc(w, y) and inc(w, z))
            for w in D for x in D for y in D for z in D
        ),
        all(any(R(x, y) for y in D) for x in D),
        all(any(R(x, y) for x in D) for y in D),
        all(not R(x, z) or any(R(x, y) and R(y, z) for y in D) for x in D for z in D),
        all(
            not (inc(x, y) and inc(y, z)) or inc(x, z) for x in D for y in D for z in D
        ),
        all(
            not (R(a, y) and R(b, y)) or a == b for a in D for b in D for y in D
        ),
        all(
            not (R(x, a) and R(x, b)) or a == b for x in D for a in D for b in D
        ),
    ]
    return sum(1 << i for i, v in enumerate(truth) if v)


def check_definition(p: BasicProperty | int | str, r: Relation) -> bool:
    """The property evaluated straight from its first-order sentence."""
    i = p.index if isinstance(p, BasicProperty) else prop(p).index
    return bool(_basic_slow(r) >> i & 1)


# ---------------------------------------------------------------------------
# monotonicity


def _chain(pairs1, green, red):
    r1 = Relation.from_pairs(4, pairs1)
    r2 = Relation.from_pairs(4, list(pairs1) + [green])
    r3 = Relation.from_pairs(4, list(pairs1) + [green, red])
    return r1, r2, r3


# R1 lacks the property, adding the middle pair gains it, the last pair loses it
_CHAINS = {
    "LfQuasiRefl": ([(0, 1)], (0, 0), (1, 2)),
    "RgQuasiRefl": ([(0, 0), (0, 1)], (1, 1), (1, 2)),
    "QuasiRefl": ([(0, 0), (0, 1)], (1, 1), (1, 2)),
    "Sym": ([(0, 1)], (1, 0), (0, 2)),
    "Trans": ([(0, 1), (1, 2)], (0, 2), (2, 3)),
    "QuasiTrans": ([(0, 1), (1, 2)], (0, 2), (2, 3)),
    "RgEucl": ([(0, 1)], (1, 1), (0, 0)),
    "LfEucl": ([(0, 1)], (0, 0), (1, 0)),
    "SemiOrd1": ([(0, 0), (1, 1)], (0, 1), (2, 2)),
    "SemiOrd2": ([(0, 1), (1, 2)], (0, 3), (0, 0)),
    "Dense": ([(0, 1)], (0, 0), (1, 2)),
    "IncTrans": ([(0, 1), (1, 2)], (1, 3), (0, 0)),
}


def monotonicity_witnesses() -> list[tuple[BasicProperty, tuple[Relation, Relation, Relation]]]:
    """Chains R1 ⊂ R2 ⊂ R3 showing a property is neither monotonic nor antitonic."""
    out = []
    for name, spec in _CHAINS.items():
        p = prop(name)
        chain = _chain(*spec)
        r1, r2, r3 = chain
        if not (check(p, r2) and not check(p, r1) and not check(p, r3)):
            raise AssertionError(f"witness chain for {name} does not verify")
        out.append((p, chain))
    return out


def implied_by_mono(a: Lifted, b: Lifted) -> bool:
    """True when a -> b follows from op containment and (anti)monotonicity."""
    if a.prop != b.prop:
        return False
    if a.op == b.op:
        return True
    mono = PROPS[a.prop].mono
    if mono is Mono.MONOTONIC:
        return a.op & ~b.op == 0
    if mono is Mono.ANTITONIC:
        return b.op & ~a.op == 0
    return False


# a name -> property list table for the usual kinds of relations
KINDS = {
    "equivalence": ("Refl", "Sym", "Trans"),
    "partial equivalence": ("Sym", "Trans"),
    "tolerance": ("Refl", "Sym"),
    "idempotent": ("Dense", "Trans"),
    "trichotomous": ("Irrefl", "ASym", "SemiConnex"),
    "non-strict partial order": ("Refl", "AntiSym", "Trans"),
    "strict partial order": ("Irrefl", "ASym", "Trans"),
    "semi-order": ("ASym", "SemiOrd1", "SemiOrd2"),
    "preorder": ("Refl", "Trans"),
    "weak ordering": ("Irrefl", "ASym", "Trans", "IncTrans"),
    "partial function": ("RgUnique",),
    "total function": ("RgUnique", "RgSerial"),
    "injective function": ("LfUnique", "RgUnique", "RgSerial"),
    "surjective function": ("RgUnique", "LfSerial", "RgSerial"),
    "bijective function": ("LfUnique", "RgUnique", "LfSerial", "RgSerial"),
}


# ---------------------------------------------------------------------------
# bulk enumeration: distinct 384-bit profiles over every relation of a size


@numba.njit(cache=True)
def _spread_table(n):
    sp = np.zeros(1 << n, np.int64)
    for r in range(1 << n):
        v = 0
        for y in range(n):
            if r >> y & 1:
                v |= 1 << (y * n)
        sp[r] = v
    return sp


@numba.njit(cache=True)
def _fast_transpose(w, n, low, sp):
    t = 0
    for x in range(n):
        t |= sp[(w >> (x * n)) & low] << x
    return t


@numba.njit(cache=True)
def _basic_table(n, sp):
    size = 1 << (n * n)
    low = (1 << n) - 1
    out = np.empty(size, np.int32)
    for w in range(size):
        out[w] = basic_mask(w, _fast_transpose(w, n, low, sp), n)
    return out


@numba.njit(cache=True)
def _masks_from_table(start, count, n, tab, sp, out):
    low = (1 << n) - 1
    full = (1 << (n * n)) - 1
    for i in range(count):
        w = start + i
        t = _fast_transpose(w, n, low, sp)
        for q in range(16):
            out[i, q] = tab[apply_word(q, w, t, full)]


@numba.njit(cache=True)
def _masks_direct(words, n, out):
    buf = np.zeros(16, np.int64)
    for i in range(words.shape[0]):
        lifted_masks(words[i], n, buf)
        for q in range(16):
            out[i, q] = buf[q]


def _dedup(masks: np.ndarray, words: np.ndarray):
    rows = np.ascontiguousarray(masks).view(np.dtype((np.void, masks.shape[1] * 4))).ravel()
    _, first = np.unique(rows, return_index=True)
    first.sort()
    return masks[first], words[first]


def _merge(parts):
    masks = np.concatenate([m for m, _ in parts])
    words = np.concatenate([w for _, w in parts])
    order = np.argsort(words, kind="stable")
    return _dedup(masks[order], words[order])


def masks_of_words(words: np.ndarray, n: int) -> np.ndarray:
    """Per relation word, the 16 basic masks of its images (int32 [k,16])."""
    out = np.empty((len(words), 16), np.int32)
    _masks_direct(np.asarray(words, dtype=np.int64), n, out)
    return out


def exhaustive_profiles(n: int, chunk: int = 1 << 20, progress=None):
    """Distinct profiles over all 2^(n*n) relations on n elements.

    Returns (masks, words): masks[i] holds the 16 basic masks of a profile and
    words[i] the smallest relation word producing it; rows sorted by word.
    """
    if n > 5:
        raise ValueError("exhaustive profiles are limited to n <= 5")
    size = 1 << (n * n)
    sp = _spread_table(n)
    tab = _basic_table(n, sp)
    parts = []
    buf = np.empty((min(chunk, size), 16), np.int32)
    for start in range(0, size, chunk):
        count = min(chunk, size - start)
        _masks_from_table(start, count, n, tab, sp, buf)
        words = np.arange(start, start + count, dtype=np.int64)
        parts.append(_dedup(buf[:count].copy(), words))
        if len(parts) >= 8:
            parts = [_merge(parts)]
        if progress:
            progress(start + count, size)
    return _merge(parts)


def sampled_profiles(n: int, count: int, seed: int, chunk: int = 1 << 18):
    """Distinct profiles over count pseudo-random relations on n elements."""
    if not 1 <= n <= 8:
        raise ValueError("sampling needs 1 <= n <= 8")
    rng = np.random.default_rng(seed)
    bits = n * n
    parts = []
    done = 0
    while done < count:
        k = min(chunk, count - done)
        raw = rng.integers(0, 1 << 63, size=k, dtype=np.int64, endpoint=False)
        if bits < 64:
            raw &= (1 << bits) - 1
        else:
            raw ^= rng.integers(0, 2, size=k, dtype=np.int64) << 63
        parts.append(_dedup(masks_of_words(raw, n), raw))
        if len(parts) >= 8:
            parts = [_merge(parts)]
        done += k
    return _merge(parts)


def profile_bits(masks: np.ndarray) -> np.ndarray:
    """Expand [k,16] masks to a [k,384] boolean matrix, column q*24+p."""
    shifts = np.arange(NPROPS, dtype=np.int32)
    return ((masks[:, :, None] >> shifts) & 1).astype(bool).reshape(len(masks), NLIFTED)
