import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relimpl import prover
from relimpl.equivalence import classes
from relimpl.inference import initialize
from relimpl.properties import NLIFTED, Lifted, check_lifted
from relimpl.relation import Relation, all_relations
from relimpl.store import CEX, INVALID, MANUAL, PROVER, UNKNOWN, VALID, ConsistencyError, Store, decode, decode_index


def test_emit_faok():
    text = prover.emit(prover.task_for("faok"))
    assert text.startswith("% faok: SemiOrd1 ∧ Refl → Connex")
    assert "fof(goal, conjecture, ! [X,Y] : (r(X,Y) | r(Y,X)))." in text
    assert "fof(lp2, axiom, ! [X] : r(X,X))." in text
    assert "nonempty" in text


def test_min_card_gives_pairwise_disequalities():
    problem = prover.parse_problem(prover.emit(prover.ProverTask("faok", 3)))
    assert problem.constants == ("c1", "c2", "c3")
    assert len(problem.cardinality) == 3
    assert all(isinstance(f, prover.Not) and isinstance(f.f, prover.Eq) for f in problem.cardinality)


def test_false_conclusion_becomes_contradiction_task():
    task = prover.task_for("hpr0", 4)
    assert task.kind == "contradiction" and task.filename == "hpr0_n4.p"
    problem = prover.parse_problem(prover.emit(task))
    assert problem.conjecture == prover.FALSE_F
    assert len(problem.antecedents) == 2 and len(problem.cardinality) == 6


@pytest.mark.parametrize("kwargs", [{"min_card": 0}, {"min_card": 9}, {"kind": "sideways"}])
def test_task_validation(kwargs):
    with pytest.raises(ValueError):
        prover.ProverTask("faok", **kwargs)
    with pytest.raises(ValueError):
        prover.ProverTask("fa1k")


@pytest.mark.parametrize("idx", range(0, NLIFTED, 5))
def test_sentence_round_trips_through_text(idx):
    f = prover.sentence(Lifted.from_index(idx))
    assert prover.parse_formula(prover.to_tptp(f)) == f


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sentences_agree_with_checkers(n):
    rels = list(all_relations(n))
    for idx in range(NLIFTED):
        lp = Lifted.from_index(idx)
        f = prover.sentence(lp)
        for r in rels[:: max(1, len(rels) // 40)]:
            assert prover.evaluate(f, r) == check_lifted(lp, r), (lp, r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, NLIFTED - 1), st.integers(0, (1 << 16) - 1))
def test_sentences_agree_on_four_elements(idx, bits):
    lp, r = Lifted.from_index(idx), Relation(4, bits)
    assert prover.evaluate(prover.sentence(lp), r) == check_lifted(lp, r)


def test_parse_errors():
    with pytest.raises(ValueError):
        prover.parse_formula("r(X,Y) &")
    with pytest.raises(ValueError):
        prover.parse_formula("r(X,Y) r(Y,X)")
    with pytest.raises(ValueError):
        prover.parse_problem("fof(lp1, axiom, $true).\n")


def test_emit_undecided(tmp_path):
    s = Store()
    s.value[:] = VALID
    s.value[[5, 6]] = UNKNOWN
    paths = prover.emit_undecided(s, tmp_path, 2)
    assert sorted(p.name for p in paths) == ["000e_n2.p", "000f_n2.p"]
    assert all(prover.parse_problem(p.read_text()).constants == ("c1", "c2") for p in paths)


def test_parse_results():
    text = "# comment\nfaok proved 1 vampire 4.8\nijrj unknown 3\n\n"
    got = prover.parse_results(text)
    assert got == [prover.Verdict("faok", "proved", 1, "vampire 4.8"), prover.Verdict("ijrj", "unknown", 3)]
    with pytest.raises(ValueError, match="line 1"):
        prover.parse_results("faok maybe 1")
    with pytest.raises(ValueError):
        prover.parse_results("FAOK proved 1")


def test_ingest_records_proved_only():
    s = Store()
    verdicts = prover.parse_results("faok proved 2 run\nijrj unknown 1\n")
    assert prover.ingest(s, verdicts) == 1
    assert s.get("faok") == VALID and s.justification("faok").kind == PROVER
    assert s.mincard[decode_index("faok")] == 2
    assert s.get("ijrj") == UNKNOWN
    assert prover.ingest(s, verdicts) == 0


def test_ingest_conflict_with_counter_example():
    s = Store()
    s.leaf("clcn", INVALID, CEX, "n1:0")
    with pytest.raises(ConsistencyError, match="clcn"):
        prover.ingest(s, prover.parse_results("clcn proved 1\n"))


def test_manual_proofs():
    proofs = prover.manual_proofs()
    assert len(proofs) == 7
    assert {v.min_card for v in proofs if v.code == "uydr"} == {5}
    s = Store()
    initialize(s)
    added = prover.ingest_manual(s)
    assert added == 7
    assert all(s.justification(v.code).kind == MANUAL for v in proofs)


def test_manual_proofs_hold_from_their_cardinality():
    cls = classes()
    proofs = [v for v in prover.manual_proofs() if v.min_card <= 4]
    for v in proofs:
        i, j, k = (cls.plain(x) for x in decode(v.code))
        for n in range(v.min_card, 5):
            for r in all_relations(n):
                if check_lifted(i, r) and check_lifted(j, r):
                    assert check_lifted(k, r), (v.code, r)
