"""Facts about lifted properties checked over every relation with up to four elements.

Each column of the profile table is one lifted property evaluated on one
representative of every distinct profile, so a statement over all relations
is a statement over all rows.
"""

import numpy as np
import pytest

from conftest import column, lifted_table
from relimpl.equivalence import classes
from relimpl.relation import Relation, all_relations, apply
from relimpl.store import decode, decode_index

SIZES = (1, 2, 3, 4)


def always(n, *names):
    return all(column(n, name).all() for name in names)


def never(n, *names):
    return not any(column(n, name).any() for name in names)


def equivalent(n, *names):
    first = column(n, names[0])
    return all(np.array_equal(first, column(n, name)) for name in names[1:])


def implies(n, a, b):
    return bool((~column(n, a) | column(n, b)).all())


def lifted(ops, prop):
    return [f"{q}-{prop}" for q in ops]


# ---------------------------------------------------------------------------
# what single operations force


@pytest.mark.parametrize("n", range(0, 4))
def test_constant_operations(n):
    for r in all_relations(n):
        assert apply(0x0, r) == Relation.empty(n)
        assert apply(0xF, r) == Relation.universal(n)


@pytest.mark.parametrize("n", SIZES)
def test_operations_forcing_properties(n):
    assert always(n, *lifted("BDF", "Connex"))
    assert always(n, *lifted("0246", "Irrefl"))
    assert always(n, *lifted("024", "ASym"))
    assert always(n, *lifted("9BDF", "Refl"))
    assert always(n, *lifted("09BDF", "Dense"))
    assert always(n, *lifted("9BDF", "LfSerial"))
    assert always(n, *lifted("09BDF", "LfQuasiRefl"))
    assert always(n, *lifted("0BDF", "SemiOrd1"))
    assert always(n, *lifted("0BDF", "SemiOrd2"))
    assert always(n, *lifted("016789EF", "Sym"))


@pytest.mark.parametrize("n", SIZES)
def test_operations_keeping_or_flipping_reflexivity(n):
    for q in "1357":
        assert equivalent(n, f"{q}-Refl", "Refl")
        assert equivalent(n, f"{q}-Irrefl", "Irrefl")
    for q in "8ACE":
        assert equivalent(n, f"{q}-Refl", "Irrefl")
        assert equivalent(n, f"{q}-Irrefl", "Refl")


# ---------------------------------------------------------------------------
# unsatisfiable lifted properties, with the size they need


UNSAT = [(1, p) for p in lifted("9BDF", "ASym") + lifted("9BDF", "AntiTrans") + ["0-LfSerial"]]
UNSAT += [(1, p) for p in lifted("0246", "Refl")]
UNSAT += [(2, "F-AntiSym")] + [(4, p) for p in lifted("BDF", "LfUnique")]


@pytest.mark.parametrize("size, name", UNSAT)
def test_unsatisfiable_from_size(size, name):
    assert all(never(n, name) for n in SIZES if n >= size)


def test_smallest_unsatisfiable_sizes():
    # the stated sizes are sufficient; connexity already rules out a left-unique
    # relation on two elements
    smallest = {name: min(n for n in SIZES if all(never(m, name) for m in SIZES if m >= n)) for _, name in UNSAT}
    assert smallest == {name: 2 if name[2:] in ("AntiSym", "LfUnique") else 1 for _, name in UNSAT}


# ---------------------------------------------------------------------------
# redundant properties


REDUNDANT = [
    ("RgSerial", "5-LfSerial"),
    ("RgEucl", "5-LfEucl"),
    ("RgUnique", "5-LfUnique"),
    ("RgQuasiRefl", "5-LfQuasiRefl"),
    ("QuasiRefl", "7-LfQuasiRefl"),
    ("Irrefl", "C-Refl"),
    ("Connex", "C-ASym"),
    ("SemiConnex", "C-AntiSym"),
    ("IncTrans", "8-Trans"),
    ("CoRefl", "7-AntiSym"),
    ("QuasiTrans", "2-Trans"),
]


@pytest.mark.parametrize("n", SIZES)
def test_redundant_properties(n):
    for a, b in REDUNDANT:
        assert equivalent(n, a, b), (a, b)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_universal_and_empty_through_asymmetry(n):
    for r in all_relations(n):
        assert (apply(0xE, r) == Relation.empty(n)) == (r == Relation.universal(n))
        assert (apply(0x7, r) == Relation.empty(n)) == (r == Relation.empty(n))


# ---------------------------------------------------------------------------
# symmetry, semi-orders, density, anti-symmetry


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetric_and_asymmetric_relations_collapse_operations(n):
    empty, univ = Relation.empty(n), Relation.universal(n)
    for r in all_relations(n):
        if r == apply(0x5, r):
            assert all(apply(q, r) == empty for q in (0x0, 0x2, 0x4, 0x6))
            assert all(apply(q, r) == univ for q in (0x9, 0xB, 0xD, 0xF))
        if not any((y, x) in r for x, y in r.pairs()):
            assert apply(0x1, r) == empty and apply(0xE, r) == univ


SYMMETRY = (
    ["6-AntiSym", "6-ASym"]
    + lifted("246", "LfQuasiRefl")
    + lifted("246BD", "LfEucl")
    + lifted("69", "SemiOrd1")
    + ["9-SemiOrd2"]
    + lifted("2345ABCD", "Sym")
    + ["6-Trans"]
)


@pytest.mark.parametrize("n", SIZES)
def test_characterizations_of_symmetry(n):
    assert equivalent(n, "Sym", *SYMMETRY)


@pytest.mark.parametrize("n", SIZES)
def test_complement_keeps_semi_order_one_under_symmetry(n):
    both = column(n, "Sym") & column(n, "SemiOrd1")
    assert (~both | column(n, "C-SemiOrd1")).all()


@pytest.mark.parametrize("n", SIZES)
def test_complement_and_semi_order_two(n):
    assert implies(n, "Trans", "C-SemiOrd2")
    both = column(n, "Sym") & column(n, "SemiOrd2")
    assert (~both | column(n, "C-Trans")).all()


@pytest.mark.parametrize("n", SIZES)
def test_transitivity_equals_left_euclid_under_symmetric_operations(n):
    for q in "016789EF":
        assert equivalent(n, f"{q}-Trans", f"{q}-LfEucl")


@pytest.mark.parametrize("n", SIZES)
def test_density_of_strict_parts(n):
    assert equivalent(n, "2-Dense", "4-Dense")
    assert implies(n, "Sym", "2-Dense")


@pytest.mark.parametrize("n", SIZES)
def test_antisymmetric_semiconnex(n):
    both = column(n, "AntiSym") & column(n, "SemiConnex")
    for name in ("9-LfUnique", "9-AntiSym", "B-AntiSym", "D-AntiSym"):
        assert np.array_equal(both, column(n, name)), name


@pytest.mark.parametrize("n", [1, 2, 3])
def test_antisymmetric_semiconnex_means_identity_sym_part(n):
    ident = Relation.identity(n)
    for r in all_relations(n):
        total = all((x, y) in r or (y, x) in r for x in range(n) for y in range(n) if x != y)
        anti = all(x == y for x, y in r.pairs() if (y, x) in r)
        assert (anti and total) == (apply(0x9, r) == ident)


# ---------------------------------------------------------------------------
# equivalences derived by moving along operations


SELF_DUAL = ["Refl", "QuasiRefl", "Sym", "ASym", "AntiSym", "Trans", "AntiTrans", "SemiOrd1", "SemiOrd2", "Dense"]


@pytest.mark.parametrize("n", SIZES)
def test_derived_equivalences(n):
    for p in SELF_DUAL:
        assert equivalent(n, f"3-{p}", f"5-{p}")
        assert equivalent(n, f"2-{p}", f"4-{p}")
        assert equivalent(n, f"A-{p}", f"C-{p}")
        assert equivalent(n, f"B-{p}", f"D-{p}")
    for p in ["Refl", "ASym", "AntiSym"]:
        assert equivalent(n, f"1-{p}", f"3-{p}")
        for a, b in ("04", "15", "8A", "9B", "8C"):
            assert equivalent(n, f"{a}-{p}", f"{b}-{p}")
    for p in ["Refl", "QuasiRefl"]:
        assert equivalent(n, f"3-{p}", f"7-{p}")
        for a, b in ("26", "46", "57", "AE", "BF", "CE", "DF"):
            assert equivalent(n, f"{a}-{p}", f"{b}-{p}")
    for p in ["Sym", "SemiOrd1"]:
        assert equivalent(n, f"1-{p}", f"E-{p}")
        for a, b in ("0F", "69", "78"):
            assert equivalent(n, f"{a}-{p}", f"{b}-{p}")


def test_derived_equivalences_fail_for_other_properties():
    # the hypotheses matter: LfSerial is not self-dual
    assert not equivalent(3, "3-LfSerial", "5-LfSerial")


# ---------------------------------------------------------------------------
# individually proven laws


PROVEN = (
    "0t0p 0ucf 0udt 0vcy 0vyd 0wyx 0xjz 0xzj 0yen 0zet biuv cjdj cnyy d0gh dcaa dspx "
    "dsqv ewvq faok fbao fbar fkdd fkdo g0rw gknw gtlu hlmf hpr0 ikuv ild0 jlmq lmco "
    "oskj owg0 owgk owht phfb qudq uivk ujry ukaa uklu ulmt uydr voye voyr vxfj wfyp "
    "xlfr xtlr xxcn xzgd xzhs xzkv xzog yqnt"
).split()

# sizes below the stated minimum on which a law still fails
SMALL_FAILURES = {
    "hpr0": [1, 2, 3],
    "uivk": [3],
    "uydr": [2, 3, 4],
    "voye": [2, 3, 4],
    "voyr": [2, 3, 4],
    "wfyp": [2, 3, 4],
}


def law_holds(n, code):
    cls = classes()
    i, j, k = (lifted_table(n)[:, cls.plain(x).index] for x in decode(code))
    return bool((~(i & j) | k).all())


def test_proven_laws_are_published_axioms_or_cjdj():
    from relimpl.minimizer import published_axioms

    axioms = {row.code for row in published_axioms()}
    assert len(PROVEN) == 56
    assert set(PROVEN) - axioms == {"cjdj"}


def test_proven_laws_on_small_domains():
    failures = {}
    for code in PROVEN:
        bad = [n for n in SIZES if not law_holds(n, code)]
        if bad:
            failures[code] = bad
    assert failures == SMALL_FAILURES


def test_small_failures_lie_below_stated_minimum():
    from relimpl.minimizer import published_axioms

    cards = {row.code: row.min_card for row in published_axioms()}
    for code, sizes in SMALL_FAILURES.items():
        assert max(sizes) < cards[code]


@pytest.mark.parametrize("n", SIZES)
def test_cjdj(n):
    targets = ["CoRefl", "LfEucl", "LfUnique", "Sym", "AntiTrans", "ASym", "AntiSym", "Trans", "SemiOrd1", "Dense"]
    for t in targets:
        assert implies(n, "ASym", f"1-{t}"), t
    assert law_holds(n, "cjdj")
    assert decode_index("cjdj") >= 0
