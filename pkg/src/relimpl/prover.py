"""First-order problem files for a resolution prover, and its verdicts.

Properties are built as small formula trees over one binary predicate r.
A lifted atom R^q(x, y) unfolds into a boolean combination of r(x, y) and
r(y, x).  The same trees print as TPTP fof text, parse back, and evaluate on
finite relations, which is how the unfolding is checked.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from itertools import product
from pathlib import Path

from .equivalence import FALSE, Classes, classes
from .properties import NPROPS, Lifted
from .relation import Relation
from .store import MANUAL, PROVER, UNKNOWN, VALID, Store, decode, decode_index, describe, encode_index

# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    x: str
    y: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Not:
    f: object


@dataclass(frozen=True)
class And:
    fs: tuple


@dataclass(frozen=True)
class Or:
    fs: tuple


@dataclass(frozen=True)
class Implies:
    a: object
    b: object


@dataclass(frozen=True)
class Iff:
    a: object
    b: object


@dataclass(frozen=True)
class Quant:
    kind: str  # "!" for all, "?" for some
    vars: tuple
    body: object


@dataclass(frozen=True)
class Const:
    value: bool


TRUE_F, FALSE_F = Const(True), Const(False)


def conj(*fs):
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def disj(*fs):
    return fs[0] if len(fs) == 1 else Or(tuple(fs))


def forall(vs: str, body):
    return Quant("!", tuple(vs.split()), body)


def exists(vs: str, body):
    return Quant("?", tuple(vs.split()), body)


def lifted_atom(q: int, x: str, y: str):
    """R^q(x, y) in terms of r(x, y) and r(y, x)."""
    f, b = Atom(x, y), Atom(y, x)
    nf, nb = Not(f), Not(b)
    table = {
        0: FALSE_F,
        1: conj(f, b),
        2: conj(f, nb),
        3: f,
        4: conj(nf, b),
        5: b,
        6: Not(Iff(f, b)),
        7: disj(f, b),
        8: conj(nf, nb),
        9: Iff(f, b),
        10: nb,
        11: disj(f, nb),
        12: nf,
        13: disj(nf, b),
        14: Not(conj(f, b)),
        15: TRUE_F,
    }
    return table[q]


def sentence(lp: Lifted):
    """The defining sentence of lp with R^op unfolded."""
    def R(x, y):
        return lifted_atom(lp.op, x, y)

    def asy(x, y):
        return conj(R(x, y), Not(R(y, x)))

    def inc(x, y):
        return conj(Not(R(x, y)), Not(R(y, x)))

    ne = lambda x, y: Not(Eq(x, y))  # noqa: E731
    defs = [
        lambda: forall("X", R("X", "X")),
        lambda: forall("X", Not(R("X", "X"))),
        lambda: forall("X Y", Implies(R("X", "Y"), Eq("X", "Y"))),
        lambda: forall("X Y", Implies(R("X", "Y"), R("X", "X"))),
        lambda: forall("X Y", Implies(R("X", "Y"), R("Y", "Y"))),
        lambda: forall("X Y", Implies(R("X", "Y"), conj(R("X", "X"), R("Y", "Y")))),
        lambda: forall("X Y", Implies(R("X", "Y"), R("Y", "X"))),
        lambda: forall("X Y", Implies(R("X", "Y"), Not(R("Y", "X")))),
        lambda: forall("X Y", Implies(conj(R("X", "Y"), R("Y", "X")), Eq("X", "Y"))),
        lambda: forall("X Y", Implies(ne("X", "Y"), disj(R("X", "Y"), R("Y", "X")))),
        lambda: forall("X Y", disj(R("X", "Y"), R("Y", "X"))),
        lambda: forall("X Y Z", Implies(conj(R("X", "Y"), R("Y", "Z")), R("X", "Z"))),
        lambda: forall("X Y Z", Implies(conj(R("X", "Y"), R("Y", "Z")), Not(R("X", "Z")))),
        lambda: forall("X Y Z", Implies(conj(asy("X", "Y"), asy("Y", "Z")), asy("X", "Z"))),
        lambda: forall("X Y Z", Implies(conj(R("X", "Y"), R("X", "Z")), R("Y", "Z"))),
        lambda: forall("X Y Z", Implies(conj(R("Y", "X"), R("Z", "X")), R("Y", "Z"))),
        lambda: forall(
            "W X Y Z", Implies(conj(R("W", "X"), inc("X", "Y"), R("Y", "Z")), R("W", "Z"))
        ),
        lambda: forall(
            "W X Y Z",
            Implies(
                conj(R("X", "Y"), R("Y", "Z")),
                Not(conj(inc("W", "X"), inc("W", "Y"), inc("W", "Z"))),
            ),
        ),
        lambda: forall("X", exists("Y", R("X", "Y"))),
        lambda: forall("Y", exists("X", R("X", "Y"))),
        lambda: forall("X Z", Implies(R("X", "Z"), exists("Y", conj(R("X", "Y"), R("Y", "Z"))))),
        lambda: forall("X Y Z", Implies(conj(inc("X", "Y"), inc("Y", "Z")), inc("X", "Z"))),
        lambda: forall("A B Y", Implies(conj(R("A", "Y"), R("B", "Y")), Eq("A", "B"))),
        lambda: forall("X A B", Implies(conj(R("X", "A"), R("X", "B")), Eq("A", "B"))),
    ]
    assert len(defs) == NPROPS
    return defs[lp.prop]()


def evaluate(f, r: Relation, env: dict | None = None) -> bool:
    """Truth of f on the finite relation r; free names are looked up in env."""
    env = env or {}
    if isinstance(f, Atom):
        return (env[f.x], env[f.y]) in r
    if isinstance(f, Eq):
        return env[f.x] == env[f.y]
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.f, r, env)
    if isinstance(f, And):
        return all(evaluate(g, r, env) for g in f.fs)
    if isinstance(f, Or):
        return any(evaluate(g, r, env) for g in f.fs)
    if isinstance(f, Implies):
        return not evaluate(f.a, r, env) or evaluate(f.b, r, env)
    if isinstance(f, Iff):
        return evaluate(f.a, r, env) == evaluate(f.b, r, env)
    if isinstance(f, Quant):
        test = all if f.kind == "!" else any
        return test(
            evaluate(f.body, r, {**env, **dict(zip(f.vars, vals))})
            for vals in product(range(r.n), repeat=len(f.vars))
        )
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# TPTP text


def to_tptp(f) -> str:
    if isinstance(f, Atom):
        return f"r({f.x},{f.y})"
    if isinstance(f, Eq):
        return f"{f.x} = {f.y}"
    if isinstance(f, Const):
        return "$true" if f.value else "$false"
    if isinstance(f, Not):
        if isinstance(f.f, Eq):
            return f"{f.f.x} != {f.f.y}"
        return f"~ {_wrap(f.f)}"
    if isinstance(f, And):
        return " & ".join(_wrap(g) for g in f.fs)
    if isinstance(f, Or):
        return " | ".join(_wrap(g) for g in f.fs)
    if isinstance(f, Implies):
        return f"{_wrap(f.a)} => {_wrap(f.b)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.a)} <=> {_wrap(f.b)}"
    if isinstance(f, Quant):
        return f"{f.kind} [{','.join(f.vars)}] : {_wrap(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f) -> str:
    text = to_tptp(f)
    if isinstance(f, (Atom, Const)):
        return text
    return f"({text})"


_TOKEN = re.compile(r"\s*(<=>|=>|!=|\$true|\$false|[!?\[\]:(),&|~=]|[A-Za-z_][A-Za-z0-9_]*)")


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected input at {text[pos:pos + 20]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise ValueError(f"expected {want!r}, found {tok!r}")
        self.i += 1
        return tok

    def formula(self):
        left = self.disjunction()
        if self.peek() == "=>":
            self.take()
            return Implies(left, self.disjunction())
        if self.peek() == "<=>":
            self.take()
            return Iff(left, self.disjunction())
        return left

    def disjunction(self):
        fs = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            fs.append(self.conjunction())
        return disj(*fs)

    def conjunction(self):
        fs = [self.unary()]
        while self.peek() == "&":
            self.take()
            fs.append(self.unary())
        return conj(*fs)

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("!", "?"):
            self.take()
            self.take("[")
            vs = [self.take()]
            while self.peek() == ",":
                self.take()
                vs.append(self.take())
            self.take("]")
            self.take(":")
            return Quant(tok, tuple(vs), self.unary())
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok == "$true":
            self.take()
            return TRUE_F
        if tok == "$false":
            self.take()
            return FALSE_F
        if tok == "r":
            self.take()
            self.take("(")
            x = self.take()
            self.take(",")
            y = self.take()
            self.take(")")
            return Atom(x, y)
        x = self.take()
        op = self.take()
        y = self.take()
        if op == "=":
            return Eq(x, y)
        if op == "!=":
            return Not(Eq(x, y))
        raise ValueError(f"bad term comparison {x} {op} {y}")


def parse_formula(text: str):
    p = _Parser(text)
    f = p.formula()
    if p.peek() is not None:
        raise ValueError(f"trailing input {p.peek()!r}")
    return f


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class ProverTask:
    code: str
    min_card: int = 1
    kind: str = "implication"  # or "contradiction": the antecedents alone are refuted

    def __post_init__(self):
        decode_index(self.code)
        if not 1 <= self.min_card <= 8:
            raise ValueError("minimum cardinality must lie in 1..8")
        if self.kind not in ("implication", "contradiction"):
            raise ValueError(f"unknown task kind {self.kind!r}")

    @property
    def filename(self) -> str:
        return f"{self.code}_n{self.min_card}.p"


@dataclass(frozen=True)
class Problem:
    antecedents: tuple
    cardinality: tuple  # the disequalities, or the non-emptiness axiom
    conjecture: object
    constants: tuple


def cardinality_axioms(n: int):
    consts = tuple(f"c{i}" for i in range(1, n + 1))
    if n == 1:
        return consts, (Not(forall("X", FALSE_F)),)
    return consts, tuple(
        Not(Eq(a, b)) for i, a in enumerate(consts) for b in consts[i + 1:]
    )


def emit(task: ProverTask, cls: Classes | None = None) -> str:
    cls = cls or classes()
    i, j, k = decode(task.code)
    lps = [cls.plain(x) for x in (i, j, k)]
    consts, card = cardinality_axioms(task.min_card)
    lines = [f"% {task.code}: {describe(task.code, cls, long=True)}"]
    plural = "s" if task.min_card > 1 else ""
    lines.append(f"% domain of at least {task.min_card} element{plural}")
    for name, lp in (("lp1", lps[0]), ("lp2", lps[1])):
        lines.append(f"fof({name}, axiom, {to_tptp(sentence(lp))}).  % {lp.long()}")
    for n, f in enumerate(card, 1):
        name = "nonempty" if task.min_card == 1 else f"distinct{n}"
        lines.append(f"fof({name}, axiom, {to_tptp(f)}).")
    goal = FALSE_F if task.kind == "contradiction" else sentence(lps[2])
    note = "contradiction" if task.kind == "contradiction" else lps[2].long()
    lines.append(f"fof(goal, conjecture, {to_tptp(goal)}).  % {note}")
    return "\n".join(lines) + "\n"


_FOF = re.compile(r"^fof\((\w+),\s*(axiom|conjecture),\s*(.*)\)\.\s*(?:%.*)?$")


def parse_problem(text: str) -> Problem:
    ante, card, goal = [], [], None
    consts = set()
    for line in text.splitlines():
        if not line.startswith("fof("):
            continue
        m = _FOF.match(line)
        if not m:
            raise ValueError(f"malformed fof line: {line!r}")
        name, role, body = m.groups()
        f = parse_formula(body)
        if role == "conjecture":
            goal = f
        elif name.startswith("lp"):
            ante.append(f)
        else:
            card.append(f)
            if isinstance(f, Not) and isinstance(f.f, Eq):
                consts |= {f.f.x, f.f.y}
    if goal is None:
        raise ValueError("problem has no conjecture")
    return Problem(tuple(ante), tuple(card), goal, tuple(sorted(consts)))


def task_for(code: str, min_card: int = 1) -> ProverTask:
    """Cells concluding the "-" class become contradiction tasks."""
    _, _, k = decode(code)
    return ProverTask(code, min_card, "contradiction" if k == FALSE else "implication")


def emit_undecided(store: Store, out_dir: str | Path, min_card: int = 1) -> list[Path]:
    """One problem file per unknown cell."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for idx in (store.value == UNKNOWN).nonzero()[0]:
        task = task_for(encode_index(int(idx)), min_card)
        path = out / task.filename
        path.write_text(emit(task))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    code: str
    verdict: str  # "proved" or "unknown"
    min_card: int
    tag: str = ""


def parse_results(text: str) -> list[Verdict]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 3)
        if len(parts) < 3 or parts[1] not in ("proved", "unknown") or not parts[2].isdigit():
            raise ValueError(f"line {lineno}: expected 'code verdict minCard', got {line!r}")
        decode_index(parts[0])
        out.append(Verdict(parts[0], parts[1], int(parts[2]), parts[3] if len(parts) > 3 else ""))
    return out


def ingest(store: Store, verdicts, kind: int = PROVER) -> int:
    """Record proved verdicts as valid cells; returns the number newly decided."""
    added = 0
    for v in verdicts:
        if v.verdict != "proved":
            continue
        idx = decode_index(v.code)
        if store.leaf(idx, VALID, kind, v.tag):
            store.mincard[idx] = v.min_card
            added += 1
    return added


def manual_proofs() -> list[Verdict]:
    """The laws proven by hand, in results-file format."""
    text = resources.files("relimpl.data").joinpath("manual_proofs.txt").read_text()
    return parse_results(text)


def ingest_manual(store: Store) -> int:
    return ingest(store, manual_proofs(), MANUAL)
