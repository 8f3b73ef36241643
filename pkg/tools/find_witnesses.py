"""Search finite relations refuting given implications with a SAT solver.

Development helper that produced the hand-built witness catalog; needs the
z3-solver package, which the library itself does not import.

    python tools/find_witnesses.py aiir qij0 --min-n 6 --max-n 9
"""

import argparse
from itertools import product

import z3

from relimpl.counterexamples import refutes
from relimpl.equivalence import classes
from relimpl.prover import And, Atom, Const, Eq, Iff, Implies, Not, Or, Quant, sentence
from relimpl.relation import Relation
from relimpl.store import decode


def ground(f, r, n, env):
    if isinstance(f, Atom):
        return r[env[f.x]][env[f.y]]
    if isinstance(f, Eq):
        return z3.BoolVal(env[f.x] == env[f.y])
    if isinstance(f, Const):
        return z3.BoolVal(f.value)
    if isinstance(f, Not):
        return z3.Not(ground(f.f, r, n, env))
    if isinstance(f, And):
        return z3.And([ground(g, r, n, env) for g in f.fs])
    if isinstance(f, Or):
        return z3.Or([ground(g, r, n, env) for g in f.fs])
    if isinstance(f, Implies):
        return z3.Implies(ground(f.a, r, n, env), ground(f.b, r, n, env))
    if isinstance(f, Iff):
        return ground(f.a, r, n, env) == ground(f.b, r, n, env)
    if isinstance(f, Quant):
        parts = [
            ground(f.body, r, n, {**env, **dict(zip(f.vars, vals))})
            for vals in product(range(n), repeat=len(f.vars))
        ]
        return z3.And(parts) if f.kind == "!" else z3.Or(parts)
    raise TypeError(f)


def find(code, n, timeout_ms):
    cls = classes()
    i, j, k = decode(code)
    r = [[z3.Bool(f"r_{x}_{y}") for y in range(n)] for x in range(n)]
    s = z3.Solver()
    s.set("timeout", timeout_ms)
    s.add(ground(sentence(cls[i].rep), r, n, {}))
    s.add(ground(sentence(cls[j].rep), r, n, {}))
    s.add(z3.Not(ground(sentence(cls[k].rep), r, n, {})))
    if s.check() != z3.sat:
        return None
    m = s.model()
    pairs = [(x, y) for x in range(n) for y in range(n) if z3.is_true(m.eval(r[x][y]))]
    rel = Relation.from_pairs(n, pairs)
    assert refutes(rel, code)
    return rel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("codes", nargs="+")
    ap.add_argument("--min-n", type=int, default=6)
    ap.add_argument("--max-n", type=int, default=9)
    ap.add_argument("--timeout", type=int, default=600_000)
    args = ap.parse_args()
    for code in args.codes:
        for n in range(args.min_n, args.max_n + 1):
            rel = find(code, n, args.timeout)
            if rel is not None:
                pairs = ",".join(f"({x},{y})" for x, y in rel.pairs())
                print(f"n={n}; pairs={pairs}; targets={code}; citation=solver", flush=True)
                break
        else:
            print(f"# {code}: nothing up to n={args.max_n}", flush=True)


if __name__ == "__main__":
    main()
