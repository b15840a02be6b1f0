"""Text file formats and JSON report serialization.

Block formats (whitespace-insensitive, `#` line comments):

    signature S { relations: leq/2; functions: f/1; constants: e; }
    structure A over S { universe: a, b; leq: (a,a),(a,b); f: a->b, b->a; e = a; }
    morphism m from A to B { map: a -> x, b -> y; }
    theory T over S { hinductive: forall x. true -> leq(x,x); positive: ...; }
    amalgamation P { base: A; left: m1; right: m2; kinds: [i,i,h,h];
                     class: theory T; strong: true; budget: { N: 6; }; }

Verdicts and reports serialize to JSON as
    {"schema": "posmt-report/1", "verdict": ..., "budget": {...},
     "certificate": {...}, "notes": [...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import ParseError, PosmtError, SignatureError, StructureError
from .formulas import Formula, pp_formula
from .morphisms import Morphism, MorphismKind
from .parser import Token, parse_sentences, tokenize
from .structures import FiniteStructure, Signature
from .theories import Budget, Theory, Verdict

SCHEMA = "posmt-report/1"


@dataclass
class RawProblem:
    name: str
    base: str
    left: str
    right: str
    kinds: str
    theory: Optional[str]
    strong: bool
    strict_strong: bool
    budget_overrides: Dict[str, int]


@dataclass
class Workspace:
    signatures: Dict[str, Signature] = field(default_factory=dict)
    structures: Dict[str, FiniteStructure] = field(default_factory=dict)
    structure_signame: Dict[str, str] = field(default_factory=dict)
    morphisms: Dict[str, Morphism] = field(default_factory=dict)
    theories: Dict[str, Theory] = field(default_factory=dict)
    problems: Dict[str, RawProblem] = field(default_factory=dict)

    def signature(self, name: str) -> Signature:
        if name not in self.signatures:
            raise StructureError(f"unknown signature {name!r}")
        return self.signatures[name]

    def structure(self, name: str) -> FiniteStructure:
        if name not in self.structures:
            raise StructureError(f"unknown structure {name!r}")
        return self.structures[name]

    def morphism(self, name: str) -> Morphism:
        if name not in self.morphisms:
            raise StructureError(f"unknown morphism {name!r}")
        return self.morphisms[name]

    def theory(self, name: str) -> Theory:
        if name not in self.theories:
            raise StructureError(f"unknown theory {name!r}")
        return self.theories[name]

    def only_signature(self) -> Signature:
        if len(self.signatures) != 1:
            raise StructureError("an explicit signature name is required")
        return next(iter(self.signatures.values()))


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.lines = text.split("\n")

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def eof(self) -> bool:
        return self.peek().kind == "eof"

    def error(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.peek().text!r}")
        return self.next()

    def expect_name(self) -> str:
        t = self.peek()
        if t.kind != "name":
            raise self.error(f"expected a name, found {t.text!r}")
        return self.next().text

    def expect_number(self) -> int:
        t = self.peek()
        if t.kind != "number":
            raise self.error(f"expected a number, found {t.text!r}")
        return int(self.next().text)

    def offset(self, tok: Token) -> int:
        return sum(len(l) + 1 for l in self.lines[: tok.line - 1]) + tok.col - 1

    def slice_block_body(self) -> str:
        """Raw text from the current token up to (not including) the matching
        closing '}' of the enclosing block; consumes the body tokens."""
        start = self.offset(self.peek())
        depth = 0
        while not self.eof():
            t = self.peek()
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                if depth == 0:
                    break
                depth -= 1
            self.next()
        end = self.offset(self.peek())
        return self.text[start:end].strip()


def _parse_name_arity_list(sc: _Scanner) -> Dict[str, int]:
    out: Dict[str, int] = {}
    while True:
        name = sc.expect_name()
        sc.expect("/")
        out[name] = sc.expect_number()
        if sc.at(","):
            sc.next()
            continue
        break
    return out


def _parse_signature(sc: _Scanner, ws: Workspace) -> None:
    name = sc.expect_name()
    sc.expect("{")
    relations: Dict[str, int] = {}
    functions: Dict[str, int] = {}
    constants: List[str] = []
    while not sc.at("}"):
        key = sc.expect_name()
        sc.expect(":")
        if key == "relations":
            relations.update(_parse_name_arity_list(sc))
        elif key == "functions":
            functions.update(_parse_name_arity_list(sc))
        elif key == "constants":
            while True:
                constants.append(sc.expect_name())
                if sc.at(","):
                    sc.next()
                    continue
                break
        else:
            raise sc.error(f"unknown signature field {key!r}")
        sc.expect(";")
    sc.expect("}")
    if name in ws.signatures:
        raise StructureError(f"duplicate signature name {name!r}")
    ws.signatures[name] = Signature.make(
        relations=relations, functions=functions, constants=constants
    )


def _parse_tuple(sc: _Scanner) -> Tuple[str, ...]:
    sc.expect("(")
    items = [sc.expect_name()]
    while sc.at(","):
        sc.next()
        items.append(sc.expect_name())
    sc.expect(")")
    return tuple(items)


def _parse_structure(sc: _Scanner, ws: Workspace) -> None:
    name = sc.expect_name()
    sc.expect("over")
    signame = sc.expect_name()
    sig = ws.signature(signame)
    sc.expect("{")
    universe: Tuple[str, ...] = ()
    relations = {rn: set() for rn, _ in sig.relations}
    functions: Dict[str, Dict[Tuple[str, ...], str]] = {fn: {} for fn, _ in sig.functions}
    constants: Dict[str, str] = {}
    rel_names = {rn for rn, _ in sig.relations}
    func_names = {fn for fn, _ in sig.functions}
    func_arity = sig.function_arities
    while not sc.at("}"):
        key = sc.expect_name()
        if key == "universe":
            sc.expect(":")
            items = [sc.expect_name()]
            while sc.at(","):
                sc.next()
                items.append(sc.expect_name())
            universe = tuple(items)
        elif key in rel_names:
            sc.expect(":")
            if not sc.at(";"):
                while True:
                    relations[key].add(_parse_tuple(sc))
                    if sc.at(","):
                        sc.next()
                        continue
                    break
        elif key in func_names:
            sc.expect(":")
            while True:
                if sc.at("("):
                    args = _parse_tuple(sc)
                else:
                    args = (sc.expect_name(),)
                if len(args) != func_arity[key]:
                    raise sc.error(f"arity mismatch for function {key!r}")
                sc.expect("->")
                functions[key][args] = sc.expect_name()
                if sc.at(","):
                    sc.next()
                    continue
                break
        elif key in sig.constants:
            sc.expect("=")
            constants[key] = sc.expect_name()
        else:
            raise sc.error(f"{key!r} is not a symbol of signature {signame!r}")
        sc.expect(";")
    sc.expect("}")
    if name in ws.structures:
        raise StructureError(f"duplicate structure name {name!r}")
    ws.structures[name] = FiniteStructure(
        sig, universe, {k: frozenset(v) for k, v in relations.items()}, functions, constants
    )
    ws.structure_signame[name] = signame


def _parse_morphism(sc: _Scanner, ws: Workspace) -> None:
    name = sc.expect_name()
    sc.expect("from")
    src = sc.expect_name()
    sc.expect("to")
    tgt = sc.expect_name()
    sc.expect("{")
    mapping: Dict[str, str] = {}
    while not sc.at("}"):
        key = sc.expect_name()
        if key != "map":
            raise sc.error(f"unknown morphism field {key!r}")
        sc.expect(":")
        while True:
            e = sc.expect_name()
            sc.expect("->")
            mapping[e] = sc.expect_name()
            if sc.at(","):
                sc.next()
                continue
            break
        sc.expect(";")
    sc.expect("}")
    source = ws.structure(src)
    target = ws.structure(tgt)
    missing = [e for e in source.universe if e not in mapping]
    if missing:
        raise StructureError(f"morphism {name!r} misses elements {missing}")
    bad = [v for v in mapping.values() if v not in target.universe]
    if bad:
        raise StructureError(f"morphism {name!r} maps outside the target: {bad}")
    if name in ws.morphisms:
        raise StructureError(f"duplicate morphism name {name!r}")
    ws.morphisms[name] = Morphism(source, target, mapping)


def _parse_theory(sc: _Scanner, ws: Workspace) -> None:
    name = sc.expect_name()
    if sc.at("over"):
        sc.next()
        sig = ws.signature(sc.expect_name())
    else:
        sig = ws.only_signature()
    sc.expect("{")
    body = sc.slice_block_body()
    sc.expect("}")
    sentences: List[Formula] = parse_sentences(body, sig) if body else []
    if name in ws.theories:
        raise StructureError(f"duplicate theory name {name!r}")
    ws.theories[name] = Theory.make(sig, sentences, name)


def _parse_amalgamation(sc: _Scanner, ws: Workspace) -> None:
    name = sc.expect_name()
    sc.expect("{")
    fields: Dict[str, object] = {
        "base": None, "left": None, "right": None, "kinds": None,
        "theory": None, "strong": False, "strict_strong": False, "budget": {},
    }
    while not sc.at("}"):
        key = sc.expect_name()
        sc.expect(":")
        if key in ("base", "left", "right"):
            fields[key] = sc.expect_name()
        elif key == "kinds":
            sc.expect("[")
            letters = [sc.expect_name()]
            while sc.at(","):
                sc.next()
                letters.append(sc.expect_name())
            sc.expect("]")
            fields["kinds"] = "".join(letters)
        elif key == "class":
            what = sc.expect_name()
            if what == "theory":
                fields["theory"] = sc.expect_name()
            elif what != "all":
                raise sc.error("class must be `theory <name>` or `all`")
        elif key in ("strong", "strict"):
            value = sc.expect_name()
            if value not in ("true", "false"):
                raise sc.error("expected true or false")
            fields["strict_strong" if key == "strict" else "strong"] = value == "true"
        elif key == "budget":
            sc.expect("{")
            budget: Dict[str, int] = {}
            while not sc.at("}"):
                bkey = sc.expect_name()
                sc.expect(":")
                budget[bkey] = sc.expect_number()
                sc.expect(";")
            sc.expect("}")
            fields["budget"] = budget
        else:
            raise sc.error(f"unknown amalgamation field {key!r}")
        sc.expect(";")
    sc.expect("}")
    for required in ("base", "left", "right", "kinds"):
        if fields[required] is None:
            raise ParseError(f"amalgamation block misses {required!r}", 1, 1)
    if name in ws.problems:
        raise StructureError(f"duplicate problem name {name!r}")
    ws.problems[name] = RawProblem(
        name, fields["base"], fields["left"], fields["right"], fields["kinds"],
        fields["theory"], fields["strong"], fields["strict_strong"], fields["budget"],
    )


BLOCK_PARSERS = {
    "signature": _parse_signature,
    "structure": _parse_structure,
    "morphism": _parse_morphism,
    "theory": _parse_theory,
    "amalgamation": _parse_amalgamation,
}


def load_workspace(texts: List[str], workspace: Optional[Workspace] = None) -> Workspace:
    ws = workspace or Workspace()
    for text in texts:
        sc = _Scanner(text)
        while not sc.eof():
            kw = sc.expect_name()
            if kw not in BLOCK_PARSERS:
                raise ParseError(f"unknown block kind {kw!r}", sc.tokens[sc.pos - 1].line,
                                 sc.tokens[sc.pos - 1].col)
            BLOCK_PARSERS[kw](sc, ws)
    return ws


# ---------------------------------------------------------------------------
# JSON serialization


def structure_to_json(s: FiniteStructure) -> Dict:
    return {
        "universe": list(s.universe),
        "relations": {name: sorted(map(list, table)) for name, table in s.relations.items()},
        "functions": {
            name: [[list(args), val] for args, val in sorted(entries.items())]
            for name, entries in s.functions.items()
        },
        "constants": dict(s.constants),
        "signature": signature_to_json(s.signature),
    }


def signature_to_json(sig: Signature) -> Dict:
    return {
        "relations": {name: arity for name, arity in sig.relations},
        "functions": {name: arity for name, arity in sig.functions},
        "constants": list(sig.constants),
    }


def signature_from_json(data: Dict) -> Signature:
    return Signature.make(
        relations=data.get("relations", {}),
        functions=data.get("functions", {}),
        constants=data.get("constants", []),
    )


def structure_from_json(data: Dict) -> FiniteStructure:
    sig = signature_from_json(data["signature"])
    return FiniteStructure(
        sig,
        tuple(data["universe"]),
        {name: frozenset(map(tuple, table)) for name, table in data["relations"].items()},
        {
            name: {tuple(args): val for args, val in entries}
            for name, entries in data["functions"].items()
        },
        dict(data["constants"]),
    )


def jsonable(value):
    if isinstance(value, FiniteStructure):
        return {"structure": structure_to_json(value)}
    if isinstance(value, Morphism):
        return {"map": dict(value.map)}
    if isinstance(value, MorphismKind):
        return value.letter
    if isinstance(value, Verdict):
        return verdict_to_json(value)
    if isinstance(value, Budget):
        return value.as_dict()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = list(value)
        if isinstance(value, (set, frozenset)):
            items = sorted(items, key=repr)
        return [jsonable(v) for v in items]
    if hasattr(value, "conjuncts") or hasattr(value, "inner") or hasattr(value, "matrix"):
        try:
            return pp_formula(value)
        except Exception:
            return repr(value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return repr(value)


def verdict_to_json(v: Verdict) -> Dict:
    return {
        "schema": SCHEMA,
        "verdict": v.status,
        "budget": v.budget.as_dict(),
        "certificate": jsonable(v.certificate),
        "notes": list(v.notes),
    }


def report_to_json(report: Dict) -> str:
    return json.dumps({"schema": SCHEMA, **jsonable(report)}, indent=2, sort_keys=True)
