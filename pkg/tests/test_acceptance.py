"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
printed even when output capture is on.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
import pytest

import test_equivalence as eqv
import test_inference as inf
import test_lemmas as lem
from relimpl import counterexamples as cex
from relimpl import inference, minimizer, prover
from relimpl.equivalence import NCLASSES, final_classes, refine, witness_2dense_not_3sym
from relimpl.minimizer import DEFAULT_ORDERS, Minimizer, published_axioms, verify_published_axioms
from relimpl.properties import check_lifted, parse_lifted
from relimpl.relation import (
    COMPOSE,
    all_relations,
    census_closed_sets,
    fmt_set,
    left_inverses,
    mask_of,
    right_inverses,
)
from relimpl.store import NCELLS, Store, decode, decode_index, encode, encode_index, load, save

DATA = Path(__file__).parent / "data"


@pytest.fixture
def verdict(capsys):
    def report(number: int, title: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail}")
        assert ok, detail

    return report


def read_ops_table(name: str) -> list[list[int]]:
    """Rows of hex operation sets; "-" is empty, "*" is every operation."""
    rows = []
    for line in (DATA / name).read_text().splitlines():
        cells = []
        for cell in line.split():
            if cell == "-":
                cells.append(0)
            elif cell == "*":
                cells.append(0xFFFF)
            else:
                cells.append(mask_of(int(ch, 16) for ch in cell))
        rows.append(cells)
    return rows


def test_operation_algebra(verdict):
    t0 = time.perf_counter()
    comp = read_ops_table("composition.txt")
    left = read_ops_table("left_inverses.txt")
    right = read_ops_table("right_inverses.txt")
    mismatches = sum(comp[p][q] != 1 << COMPOSE[p][q] for p in range(16) for q in range(16))
    mismatches += sum(left[p][q] != left_inverses(p, q) for p in range(16) for q in range(16))
    mismatches += sum(right[p][q] != right_inverses(p, q) for p in range(16) for q in range(16))
    census = census_closed_sets()
    elapsed = time.perf_counter() - t0
    groups = {fmt_set(m) for m in census.maximal_groups}
    monoids = {fmt_set(m) for m in census.extra_monoids}
    expected_groups = {"{3,5,A,C}", "{0}", "{F}", "{1,E}", "{2,4}", "{7,8}", "{B,D}"}
    expected_monoids = {"{0,1,E,F}", "{0,2,4}", "{0,7,8,F}", "{B,D,F}"}
    ok = (
        mismatches == 0
        and len(census.closed) == 461
        and census.with_identity == 296
        and groups == expected_groups
        and monoids == expected_monoids
        and elapsed < 1.0
    )
    verdict(
        1,
        "operation algebra",
        ok,
        f"table mismatches={mismatches}/768 closed={len(census.closed)} (want 461) "
        f"with 3={census.with_identity} (want 296) groups_ok={groups == expected_groups} "
        f"monoids_ok={monoids == expected_monoids} time={elapsed:.2f}s",
    )


def test_equivalence_classes(verdict):
    t0 = time.perf_counter()
    smoke = len(refine(4))
    smoke_time = time.perf_counter() - t0
    t0 = time.perf_counter()
    part = refine(5)
    full_time = time.perf_counter() - t0
    pure = all(
        eqv.shown_block(part, f"{g[0]}-{p}") == {f"{c}-{p}" for c in g}
        for p, groups in eqv.PURE.items()
        for g in groups
    )
    single = all(eqv.shown_block(part, f"{c}-{p}") == {f"{c}-{p}"} for p, ops in eqv.SINGLE.items() for c in ops)
    mixed = all(eqv.shown_block(part, line.split()[0]) == set(line.split()) for line in eqv.MIXED)
    redundant = all(part.same(parse_lifted(a), parse_lifted(b)) for a, b in eqv.REDUNDANT)
    univ_empty = all(
        check_lifted(parse_lifted("E-ASym"), r) == (r.bits == (1 << r.n * r.n) - 1)
        and check_lifted(parse_lifted("7-ASym"), r) == (r.bits == 0)
        for r in all_relations(3)
    )
    cls = final_classes(part)
    w = witness_2dense_not_3sym()
    split = (
        check_lifted(parse_lifted("2-de"), w)
        and check_lifted(parse_lifted("4-de"), w)
        and not check_lifted(parse_lifted("3-sy"), w)
        and cls.rank_of("2-de") == cls.rank_of("4-de") != cls.rank_of("3-sy")
    )
    ok = (
        smoke == 80 and smoke_time < 5 and len(part) == 80 and pure and single and mixed
        and redundant and univ_empty and len(cls) == NCLASSES == 81 and split
    )
    verdict(
        2,
        "equivalence classes",
        ok,
        f"n=4 blocks={smoke} ({smoke_time:.1f}s) n=5 blocks={len(part)} ({full_time:.1f}s) "
        f"figure_blocks={pure and single and mixed} redundancies={redundant and univ_empty} "
        f"classes={len(cls)} dense_split={split} witness_n={w.n}",
    )


def test_codec(verdict):
    idx = np.arange(NCELLS)
    codes = [encode_index(int(i)) for i in idx]
    bijective = len(set(codes)) == NCELLS and all(decode_index(c) == i for i, c in enumerate(codes))
    anchors = decode("faok") == (18, 14, 11) and decode("ijrj") == (28, 15, 10)
    anchors = anchors and encode(18, 14, 11) == "faok" and encode(28, 15, 10) == "ijrj"
    verdict(3, "codec", bijective and anchors, f"bijective={bijective} anchors={anchors}")


def test_census_reproduction(verdict, closed_store, decided_store, tmp_path):
    s = Store()
    init = inference.initialize(s)
    c = decided_store.census()
    # resume: a store saved after the positive closure continues to the same result
    path = tmp_path / "store.txt"
    save(closed_store, path)
    resumed = load(path)
    t0 = time.perf_counter()
    prover.ingest_manual(resumed)
    minimizer.load_axioms(resumed)
    inference.close_positive(resumed)
    cex.sweep(resumed, 5)
    cex.apply_catalogs(resumed)
    inference.close_negative(resumed)
    resume_time = time.perf_counter() - t0
    same = np.array_equal(resumed.value, decided_store.value)
    ok = init == 42657 and c == {"valid": 156384, "invalid": 375057, "unknown": 0} and same
    verdict(
        4,
        "census reproduction",
        ok,
        f"init={init} valid={c['valid']} invalid={c['invalid']} unknown={c['unknown']} "
        f"conflicts=0 resumed_identical={same} ({resume_time:.0f}s)",
    )


def test_axiom_soundness(verdict, closed_store):
    report = verify_published_axioms(5, store=closed_store)
    cards = {row.code: row.min_card for row in published_axioms()}

    def flips_at(code):
        want = list(range(1, cards[code]))
        return report.thresholds[code] == want

    ok = len(cards) == 124 and report.sound and flips_at("hpr0") and flips_at("wfzb")
    verdict(
        5,
        "axiom soundness",
        ok,
        f"axioms={len(cards)} unsound={len(report.unsound)} "
        f"hpr0 refuted at {report.thresholds['hpr0']} (min {cards['hpr0']}) "
        f"wfzb refuted at {report.thresholds['wfzb']} (min {cards['wfzb']})",
    )


def test_minimizer_properties(verdict, valid_mask):
    mini = Minimizer(valid_mask)
    results = {}
    for name, kernel in (
        ("axiom table", [row.index for row in published_axioms()]),
        ("valid set", np.flatnonzero(valid_mask)),
    ):
        result = mini.iterate(kernel, DEFAULT_ORDERS)
        audited = mini.derives_all(result.members) and mini.is_minimal(result.members, result.order)
        results[name] = (len(result), audited, result.trajectory)
    ok = all(audited for _, audited, _ in results.values())
    detail = "; ".join(
        f"{name}: {size} axioms (published table: 124) audited={audited} trajectory={'→'.join(map(str, traj))}"
        for name, (size, audited, traj) in results.items()
    )
    verdict(6, "minimizer", ok, detail)


def test_inference_soundness(verdict, decided_store):
    vectors = {n: inf._vectors(n) for n in range(1, 4)}
    cells = inf.sample_instances(decided_store, 200, seed=11)
    violations = 0
    for t in cells:
        try:
            inf.check_instance(decided_store, t, vectors)
        except AssertionError:
            violations += 1
    rules = sorted({int(decided_store.rule[c]) for c in cells})
    verdict(
        7,
        "inference soundness",
        violations == 0 and len(cells) == 200,
        f"instances={len(cells)} rules={rules} relations n<=3 violations={violations}",
    )


LEMMA_CHECKS = [
    (lem.test_operations_forcing_properties, lem.SIZES),
    (lem.test_operations_keeping_or_flipping_reflexivity, lem.SIZES),
    (lem.test_redundant_properties, lem.SIZES),
    (lem.test_characterizations_of_symmetry, lem.SIZES),
    (lem.test_complement_keeps_semi_order_one_under_symmetry, lem.SIZES),
    (lem.test_complement_and_semi_order_two, lem.SIZES),
    (lem.test_transitivity_equals_left_euclid_under_symmetric_operations, lem.SIZES),
    (lem.test_density_of_strict_parts, lem.SIZES),
    (lem.test_antisymmetric_semiconnex, lem.SIZES),
    (lem.test_derived_equivalences, lem.SIZES),
    (lem.test_cjdj, lem.SIZES),
    (lem.test_constant_operations, (0, 1, 2, 3)),
    (lem.test_universal_and_empty_through_asymmetry, (1, 2, 3)),
    (lem.test_symmetric_and_asymmetric_relations_collapse_operations, (1, 2, 3)),
    (lem.test_antisymmetric_semiconnex_means_identity_sym_part, (1, 2, 3)),
]


def test_lemma_regression(verdict):
    t0 = time.perf_counter()
    failed = []
    total = 0
    for check, sizes in LEMMA_CHECKS:
        for n in sizes:
            total += 1
            try:
                check(n)
            except AssertionError:
                failed.append(f"{check.__name__}[{n}]")
    for size, name in lem.UNSAT:
        total += 1
        try:
            lem.test_unsatisfiable_from_size(size, name)
        except AssertionError:
            failed.append(f"unsat {name}")
    for check in (lem.test_proven_laws_on_small_domains, lem.test_small_failures_lie_below_stated_minimum):
        total += 1
        try:
            check()
        except AssertionError:
            failed.append(check.__name__)
    elapsed = time.perf_counter() - t0
    verdict(
        8,
        "lemma regression",
        not failed and elapsed < 120,
        f"checks={total} failed={len(failed)} {' '.join(failed)} laws={len(lem.PROVEN)} time={elapsed:.1f}s",
    )
