"""The 81^3 array of three-atom implications, its base-27 codes and text files."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .equivalence import NCLASSES, Classes, classes

NCELLS = NCLASSES**3
DIGITS = "0abcdefghijklmnopqrstuvwxyz"

UNKNOWN, VALID, INVALID = 0, 1, 2
SIGN = {VALID: "+", INVALID: "-"}

# justification kinds; 1..6 are the inference rules, the rest leaves
INIT, AXIOM, MANUAL, PROVER, CEX, TRUSTED = 10, 11, 12, 13, 14, 15
LEAF_NAMES = {
    INIT: "init",
    AXIOM: "axiom",
    MANUAL: "manual",
    PROVER: "prover",
    CEX: "cex",
    TRUSTED: "trusted",
}


class ConsistencyError(Exception):
    """A cell was decided both valid and invalid."""


class ParseError(ValueError):
    pass


def index(i: int, j: int, k: int) -> int:
    return (i * NCLASSES + j) * NCLASSES + k


def triple(idx: int) -> tuple[int, int, int]:
    ij, k = divmod(idx, NCLASSES)
    i, j = divmod(ij, NCLASSES)
    return i, j, k


def encode_index(idx: int) -> str:
    if not 0 <= idx < NCELLS:
        raise ValueError(f"index {idx} out of range")
    out = []
    for _ in range(4):
        idx, d = divmod(idx, 27)
        out.append(DIGITS[d])
    return "".join(reversed(out))


def encode(i: int, j: int, k: int) -> str:
    return encode_index(index(i, j, k))


_CODE = re.compile(r"^[0a-z]{4}$")


def decode_index(code: str) -> int:
    if not _CODE.match(code):
        raise ValueError(f"malformed code {code!r}")
    idx = 0
    for ch in code:
        idx = idx * 27 + DIGITS.index(ch)
    if idx >= NCELLS:
        raise ValueError(f"code {code!r} beyond the last cell")
    return idx


def decode(code: str) -> tuple[int, int, int]:
    return triple(decode_index(code))


def describe(code_or_idx, cls: Classes | None = None, long: bool = False) -> str:
    """"s1 ∧ rf → co" style text; basic properties lose the "3-" prefix."""
    cls = cls or classes()
    idx = decode_index(code_or_idx) if isinstance(code_or_idx, str) else code_or_idx
    names = [short_name(r, cls, long) for r in triple(idx)]
    return f"{names[0]} ∧ {names[1]} → {names[2]}"


def short_name(rank: int, cls: Classes | None = None, long: bool = False) -> str:
    cls = cls or classes()
    if rank in (0, 1):
        return str(cls[rank])
    lp = cls.plain(rank)
    text = lp.long() if long else lp.short()
    return text[2:] if lp.op == 3 else text


@dataclass(frozen=True)
class Justification:
    kind: int
    premises: tuple[int, ...] = ()
    aux: int = -1
    tag: str = ""

    def label(self) -> str:
        if self.kind <= 6:
            return f"rule {self.kind}" + (f" op {self.aux:X}" if self.kind in (5, 6) else "")
        return LEAF_NAMES[self.kind] + (f" {self.tag}" if self.tag else "")


class Store:
    """Truth values for all cells plus a justification per decided cell."""

    def __init__(self):
        self.value = np.zeros(NCELLS, dtype=np.int8)
        self.rule = np.zeros(NCELLS, dtype=np.int8)
        self.prem = np.full((NCELLS, 3), -1, dtype=np.int32)
        self.aux = np.full(NCELLS, -1, dtype=np.int64)
        self.depth = np.zeros(NCELLS, dtype=np.int32)
        self.tags: list[str] = []
        self.tag_id: dict[str, int] = {}
        self.mincard = np.ones(NCELLS, dtype=np.int8)

    # counters are derived from the array so they cannot drift
    @property
    def valid(self) -> int:
        return int(np.count_nonzero(self.value == VALID))

    @property
    def invalid(self) -> int:
        return int(np.count_nonzero(self.value == INVALID))

    @property
    def unknown(self) -> int:
        return int(np.count_nonzero(self.value == UNKNOWN))

    def census(self) -> dict[str, int]:
        return {"valid": self.valid, "invalid": self.invalid, "unknown": self.unknown}

    def get(self, code) -> int:
        return int(self.value[_idx(code)])

    def justification(self, code) -> Justification | None:
        idx = _idx(code)
        if self.value[idx] == UNKNOWN:
            return None
        kind = int(self.rule[idx])
        prem = tuple(int(p) for p in self.prem[idx] if p >= 0)
        aux = int(self.aux[idx])
        tag = self.tags[aux] if kind > 6 and aux >= 0 else ""
        return Justification(kind, prem, aux if kind <= 6 else -1, tag)

    def intern(self, tag: str) -> int:
        if tag not in self.tag_id:
            self.tag_id[tag] = len(self.tags)
            self.tags.append(tag)
        return self.tag_id[tag]

    def set(self, code, value: int, just: Justification) -> bool:
        """Record a decision; returns True when the cell was newly decided."""
        idx = _idx(code)
        old = int(self.value[idx])
        if old == value:
            return False
        if old != UNKNOWN:
            raise ConsistencyError(
                f"{encode_index(idx)} {describe(idx)}: already {SIGN[old]} by "
                f"{self.justification(idx).label()}, now {SIGN[value]} by {just.label()}"
            )
        self.value[idx] = value
        self.rule[idx] = just.kind
        self.prem[idx] = -1
        for n, p in enumerate(just.premises):
            self.prem[idx, n] = p
        self.aux[idx] = self.intern(just.tag) if just.kind > 6 else just.aux
        if just.premises:
            self.depth[idx] = 1 + max(int(self.depth[p]) for p in just.premises)
        return True

    def leaf(self, code, value: int, kind: int, tag: str = "") -> bool:
        return self.set(code, value, Justification(kind, (), -1, tag))

    def tag(self, idx: int) -> str:
        kind = int(self.rule[idx])
        if kind <= 6:
            prem = ",".join(encode_index(int(p)) for p in self.prem[idx] if p >= 0)
            op = f":{int(self.aux[idx]):X}" if kind in (5, 6) else ""
            return f"infer:{kind}:{prem}{op}"
        text = self.tags[int(self.aux[idx])] if self.aux[idx] >= 0 else ""
        return LEAF_NAMES[kind] + (f":{text}" if text else "")

    def decided(self) -> np.ndarray:
        return np.flatnonzero(self.value != UNKNOWN)

    def copy(self) -> Store:
        other = Store()
        for name in ("value", "rule", "prem", "aux", "depth", "mincard"):
            setattr(other, name, getattr(self, name).copy())
        other.tags = list(self.tags)
        other.tag_id = dict(self.tag_id)
        return other


def _idx(code) -> int:
    if isinstance(code, str):
        return decode_index(code)
    return int(code)


def save(store: Store, path: str | Path) -> None:
    with open(path, "w") as fh:
        for idx in store.decided():
            idx = int(idx)
            fh.write(f"{encode_index(idx)} {SIGN[int(store.value[idx])]} {store.tag(idx)}\n")


_KINDS = {v: k for k, v in LEAF_NAMES.items()}


def parse_tag(tag: str) -> Justification:
    head, _, rest = tag.partition(":")
    if head == "infer":
        parts = rest.split(":")
        if not parts[0].isdigit() or not 1 <= int(parts[0]) <= 6:
            raise ValueError(f"bad rule in {tag!r}")
        prem = tuple(decode_index(c) for c in parts[1].split(",") if c) if len(parts) > 1 else ()
        aux = int(parts[2], 16) if len(parts) > 2 else -1
        return Justification(int(parts[0]), prem, aux)
    if head not in _KINDS:
        raise ValueError(f"unknown justification {tag!r}")
    return Justification(_KINDS[head], (), -1, rest)


def load(path: str | Path, store: Store | None = None) -> Store:
    """Read a store file; a sign clash with an existing decision raises."""
    store = store or Store()
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split(None, 2)
            if len(parts) != 3 or parts[1] not in "+-" or len(parts[1]) != 1:
                raise ParseError(f"{path} line {lineno}: malformed record {line.rstrip()!r}")
            try:
                idx = decode_index(parts[0])
                just = parse_tag(parts[2].strip())
            except ValueError as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
            records.append((idx, VALID if parts[1] == "+" else INVALID, just))
    for idx, value, just in records:
        store.set(idx, value, just)
    return store
