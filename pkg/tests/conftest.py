from __future__ import annotations

import pytest

from posmt.parser import parse_sentences
from posmt.structures import FiniteStructure, Signature
from posmt.theories import Theory

SIG_LE = Signature.make(relations={"le": 2})
SIG_F = Signature.make(functions={"f": 1})

POSET_AXIOMS = """
hinductive: forall x. true -> le(x,x);
hinductive: forall x y z. le(x,y) & le(y,z) -> le(x,z);
hinductive: forall x y. le(x,y) & le(y,x) -> x = y;
"""


def make_theory(sig: Signature, text: str, name: str = "T") -> Theory:
    return Theory.make(sig, parse_sentences(text, sig), name)


@pytest.fixture(scope="session")
def t_pos() -> Theory:
    return make_theory(SIG_LE, POSET_AXIOMS, "T_pos")


@pytest.fixture(scope="session")
def point() -> FiniteStructure:
    return FiniteStructure(SIG_LE, ("a",), {"le": frozenset({("a", "a")})})


@pytest.fixture(scope="session")
def chain2() -> FiniteStructure:
    return FiniteStructure(
        SIG_LE, ("a", "b"), {"le": frozenset({("a", "a"), ("a", "b"), ("b", "b")})}
    )


@pytest.fixture(scope="session")
def antichain2() -> FiniteStructure:
    return FiniteStructure(
        SIG_LE, ("a", "b"), {"le": frozenset({("a", "a"), ("b", "b")})}
    )


@pytest.fixture(scope="session")
def loop() -> FiniteStructure:
    return FiniteStructure(SIG_F, ("a",), functions={"f": {("a",): "a"}})


@pytest.fixture(scope="session")
def swap2() -> FiniteStructure:
    return FiniteStructure(
        SIG_F, ("a", "b"), functions={"f": {("a",): "b", ("b",): "a"}}
    )
