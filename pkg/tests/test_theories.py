from __future__ import annotations

import itertools

import pytest

from posmt import corpus
from posmt.errors import SignatureError
from posmt.formulas import HUniversalSentence
from posmt.morphisms import Morphism, search_homs
from posmt.structures import FiniteStructure, Signature, enumerate_structures
from posmt.theories import (
    Budget, Theory, bounded_pc_models, companion_check_bounded, diagram,
    diag_plus_star_set, expand_with_constants, is_T_complete_pair,
    is_jc_bounded, is_model, is_pc_within, jc_characterization_report,
    joint_consistency_bounded, kaiser_hull_bounded, models, pair_diagrams,
    theory_from_diagram, tu_star_set, tu_ti_extremality_check,
)

from conftest import SIG_F, SIG_LE, make_theory

SMALL = Budget(n=2, N=2, k=2)


# ---------------------------------------------------------------------------
# models


def test_poset_models_n2(t_pos):
    ms = models(t_pos, Budget(n=2))
    assert len(ms) == 3  # point, 2-chain, 2-antichain


def test_fixed_point_models_n1():
    t = make_theory(SIG_F, "positive: exists x. f(x) = x;", "T_fix")
    assert len(models(t, Budget(n=1))) == 1


def test_inconsistent_theory_has_no_models():
    t = make_theory(SIG_LE, "hinductive: true -> false;", "T_bot")
    assert models(t, Budget(n=2)) == []


def test_models_agree_with_enumeration_filter(t_pos):
    filtered = [
        s.canonical_key()
        for s in enumerate_structures(SIG_LE, 2)
        if is_model(s, t_pos)
    ]
    assert sorted(filtered) == sorted(
        s.canonical_key() for s in models(t_pos, Budget(n=2))
    )


# ---------------------------------------------------------------------------
# diagrams


def test_expand_with_constants(chain2):
    sig2, c2 = expand_with_constants(chain2)
    assert len(sig2.constants) == 2
    assert {c2.const(c) for c in sig2.constants} == {"a", "b"}


def test_diag_plus_of_chain(chain2):
    ds = diagram(chain2, "Diag+", SMALL)
    assert len(ds.sentences) == 3  # le(ca,ca), le(ca,cb), le(cb,cb)


def test_diag_contains_negated_atoms(chain2):
    ds = diagram(chain2, "Diag", SMALL)
    negated = [s for s in ds.sentences if isinstance(s, HUniversalSentence)]
    assert negated  # le(cb,ca) and ca=cb are denied
    assert len(ds.sentences) == 3 + 2


def test_tu_star_of_loop_excludes_true_sentences(loop):
    ds = diagram(loop, "Tu*", SMALL)
    # the loop satisfies every CQ over {f/1}, so its Tu* is empty
    assert ds.sentences == ()


def test_relative_diagram_requires_subset(chain2):
    with pytest.raises(ValueError):
        diagram(chain2, "Tu(A|B)", SMALL)
    rel = diagram(chain2, "Tu(A|B)", SMALL, subset=("a",))
    assert len(rel.signature.constants) == 1


# ---------------------------------------------------------------------------
# joint consistency


def test_jc_of_positive_diagrams(chain2, antichain2, t_pos):
    da, db = pair_diagrams(chain2, antichain2, "Diag+", SMALL)
    assert joint_consistency_bounded([da, db], Budget(n=2, N=1, k=2)).is_yes
    assert joint_consistency_bounded([da, db, t_pos], SMALL).is_yes


def test_jc_atomic_contradiction(chain2):
    full = diagram(chain2, "Diag", SMALL)
    clash = make_theory(
        full.signature, "positive: c_a = c_b;", "clash"
    )
    v = joint_consistency_bounded([full, clash], SMALL)
    assert v.status == "no"
    assert v.certificate  # ground refutation


def test_is_jc_bounded(t_pos):
    assert is_jc_bounded(t_pos, Budget(n=2, N=1, k=2)).is_yes


def test_is_jc_vacuous_for_inconsistent():
    t = make_theory(SIG_LE, "hinductive: true -> false;", "T_bot")
    assert is_jc_bounded(t, SMALL).is_yes


# ---------------------------------------------------------------------------
# pc models


def test_point_is_pc(point, t_pos):
    assert is_pc_within(point, t_pos, Budget(n=3)).is_yes


def test_chain_is_not_pc(chain2, t_pos):
    v = is_pc_within(chain2, t_pos, SMALL)
    assert v.status == "no"
    counter = v.certificate
    assert counter  # the collapse hom is not an immersion


def test_bounded_pc_models_of_poset_theory(t_pos):
    pcs = bounded_pc_models(t_pos, Budget(n=2, N=2, k=2))
    assert len(pcs) == 1 and pcs[0].size() == 1


# ---------------------------------------------------------------------------
# T-completeness, companionship, hull


def test_t_complete_self(t_pos):
    assert is_T_complete_pair(t_pos, t_pos, t_pos, Budget(n=2, N=1, k=2)).is_yes


def test_t_complete_existential_witnesses_clash():
    # T1-models include points carrying both R and S, and those cannot map
    # into any model of T, so the pair is not T-complete at this bound
    sig = Signature.make(relations={"R": 1, "S": 1})
    t1 = make_theory(sig, "positive: exists x. R(x);", "T1")
    t2 = make_theory(sig, "positive: exists x. S(x);", "T2")
    t = make_theory(sig, "hinductive: forall x. R(x) & S(x) -> false;", "T")
    assert is_T_complete_pair(t1, t2, t, Budget(n=1, N=2, k=2)).status == "no"
    # restricting T1, T2 to separated witnesses makes the pair T-complete
    t1s = make_theory(
        sig, "positive: exists x. R(x); hinductive: forall x. S(x) -> false;", "T1s"
    )
    t2s = make_theory(
        sig, "positive: exists x. S(x); hinductive: forall x. R(x) -> false;", "T2s"
    )
    assert is_T_complete_pair(t1s, t2s, t, Budget(n=1, N=2, k=2)).is_yes


def test_t_complete_forced_clash():
    sig = Signature.make(relations={"R": 1, "S": 1})
    t1 = make_theory(sig, "hinductive: forall x. true -> R(x);", "T1")
    t2 = make_theory(sig, "hinductive: forall x. true -> S(x);", "T2")
    t = make_theory(sig, "hinductive: forall x. R(x) & S(x) -> false;", "T")
    assert is_T_complete_pair(t1, t2, t, Budget(n=1, N=2, k=2)).status == "no"


def test_companion_redundant_axiom(t_pos):
    t2 = make_theory(
        SIG_LE,
        "hinductive: forall x. true -> le(x,x);"
        "hinductive: forall x y z. le(x,y) & le(y,z) -> le(x,z);"
        "hinductive: forall x y. le(x,y) & le(y,x) -> x = y;"
        "hinductive: forall x. true -> le(x,x);",
        "T_pos2",
    )
    assert companion_check_bounded(t_pos, t2, SMALL).is_yes


def test_companion_signature_mismatch(t_pos):
    other = make_theory(SIG_F, "positive: exists x. f(x) = x;", "T_fix")
    with pytest.raises(SignatureError):
        companion_check_bounded(t_pos, other, SMALL)


def test_companionship_lemma_instance(loop):
    b = SMALL
    tu = theory_from_diagram(diagram(loop, "Tu*", b), "Tu*")
    ti = theory_from_diagram(diagram(loop, "Ti*", b), "Ti*")
    assert companion_check_bounded(tu, ti, b).is_yes


def test_kaiser_hull_contains_reflexivity(t_pos):
    from posmt.formulas import eval_formula

    b = Budget(n=2, N=2, k=2)
    hull, _tu = kaiser_hull_bounded(t_pos, b)
    refl = make_theory(SIG_LE, "hinductive: forall x. true -> le(x,x);").sentences[0].sentence
    probe = list(enumerate_structures(SIG_LE, 2))
    # some hull sentence is semantically reflexivity on the probe corpus
    assert any(
        all(eval_formula(x, s, {}) == eval_formula(x, refl, {}) for x in probe)
        for s in hull.sentences
    )


def test_kaiser_hull_self_consistency():
    t = make_theory(SIG_F, "positive: exists x. f(x) = x;", "T_fix")
    b = Budget(n=2, N=2, k=2)
    hull, _ = kaiser_hull_bounded(t, b)
    for m in bounded_pc_models(t, b):
        assert all(is_model(m, Theory.make(SIG_F, [s], "s")) for s in hull.sentences)


# ---------------------------------------------------------------------------
# characterization, extremality


def test_jc_characterization_poset(t_pos):
    rep = jc_characterization_report(t_pos, Budget(n=2, N=2, k=2))
    assert rep["is_jc"] == "yes"
    assert all(rep["conditions"].values())
    assert all(rep["agreement"].values())


def test_jc_characterization_inconsistent():
    t = make_theory(SIG_LE, "hinductive: true -> false;", "T_bot")
    rep = jc_characterization_report(t, SMALL)
    assert all(rep["conditions"].values())


def test_extremality(t_pos):
    assert tu_ti_extremality_check(t_pos, SMALL).is_yes


# ---------------------------------------------------------------------------
# Remark properties (a)-(e), small slice; the 500-pair run is criterion 6


def _pairs(sig, size=2):
    structs = list(enumerate_structures(sig, size))
    return [(a, b) for a in structs for b in structs]


@pytest.mark.parametrize("sig", [SIG_LE, SIG_F])
def test_remark_a_hom_reverses_tu_star(sig):
    k = 2
    for a, b in _pairs(sig):
        if any(True for _ in search_homs(a, b)):
            assert tu_star_set(b, k) <= tu_star_set(a, k)


@pytest.mark.parametrize("sig", [SIG_LE, SIG_F])
def test_remark_c_tu_star_is_unsat_cqs(sig):
    k = 2
    for a in enumerate_structures(sig, 2):
        ev = corpus.evaluator(sig, k, a)
        expected = frozenset(
            c for c in corpus.cq_corpus(sig, k) if not ev.cq_true(c)
        )
        assert tu_star_set(a, k) == expected


@pytest.mark.parametrize("sig", [SIG_LE, SIG_F])
def test_remark_d_diag_star_vs_tu_star(sig):
    k = 2
    for a, b in _pairs(sig):
        lhs = diag_plus_star_set(a, k) <= diag_plus_star_set(b, k)
        rhs = tu_star_set(b, k) <= tu_star_set(a, k)
        assert lhs == rhs


def test_remark_e_tu_star_inclusion_gives_jc(chain2, antichain2, point):
    k = 2
    for a, b in itertools.permutations((chain2, antichain2, point), 2):
        if tu_star_set(a, k) <= tu_star_set(b, k):
            da, db = pair_diagrams(a, b, "Diag+", Budget(n=2, N=4, k=k))
            n_bound = a.size() + b.size()
            v = joint_consistency_bounded(
                [da, db], Budget(n=2, N=n_bound, k=k, node_cap=10**7)
            )
            assert v.is_yes
