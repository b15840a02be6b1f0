"""Tokenizer and recursive-descent parser for the formula grammar.

Grammar sketch:
    sentence  := "hinductive:" impl (";" impl)*
               | "huniversal:" "!" posex
               | "positive:" posex
               | "general:" general
    impl      := ["forall" names "."] posex "->" posex
    posex     := ["exists" names "."] or_f
    or_f      := and_f ("|" and_f)*
    and_f     := atom ("&" atom)*
    atom      := "true" | "false" | "(" or_f ")" | term ["=" term]
    term      := NAME ["(" term ("," term)* ")"]

Names are [a-z][a-zA-Z0-9_]*; user variables may not begin with "_".
"#" starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from .errors import FormulaError, ParseError
from .formulas import (
    And, App, Const, EqAtom, Exists, Falsum, Forall, GAnd, GOr,
    HInductiveSentence, HUniversalSentence, Implication, Implies, Not, Or,
    PosEx, RelAtom, Truth, Var, Formula, Term, free_vars,
)
from .structures import Signature

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)"
    r"|(?P<arrow>->)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<number>\d+)"
    r"|(?P<punct>[().,;:=&|!\[\]{}/<>-])"
)

KEYWORDS = {"forall", "exists", "true", "false"}


@dataclass
class Token:
    kind: str  # "name" | "punct" | "arrow" | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(tok)
        else:
            tokens.append(Token(kind, tok, line, col))
            col += len(tok)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str, signature: Optional[Signature] = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.signature = signature
        self.bound: List[str] = []

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def error(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise self.error(f"expected {text!r}, found {t.text!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def expect_name(self) -> Token:
        t = self.peek()
        if t.kind != "name":
            raise self.error(f"expected a name, found {t.text!r}")
        return self.next()

    def expect_eof(self) -> None:
        if self.peek().kind != "eof":
            raise self.error(f"trailing input {self.peek().text!r}")

    # -- grammar ----------------------------------------------------------

    def parse_names(self) -> Tuple[str, ...]:
        names = []
        while self.peek().kind == "name" and self.peek().text not in KEYWORDS:
            t = self.next()
            if t.text.startswith("_"):
                raise ParseError("user variables may not begin with '_'", t.line, t.col)
            names.append(t.text)
        if not names:
            raise self.error("expected at least one variable name")
        return tuple(names)

    def parse_term(self) -> Term:
        t = self.expect_name()
        if self.at("("):
            self.next()
            args = [self.parse_term()]
            while self.at(","):
                self.next()
                args.append(self.parse_term())
            self.expect(")")
            if self.signature is not None:
                far = self.signature.function_arities
                if t.text in far and far[t.text] != len(args):
                    raise ParseError(f"arity mismatch for {t.text}", t.line, t.col)
            return App(t.text, tuple(args))
        if t.text.startswith("_"):
            raise ParseError("user variables may not begin with '_'", t.line, t.col)
        if t.text in self.bound:
            return Var(t.text)
        if self.signature is not None and t.text in self.signature.constants:
            return Const(t.text)
        return Var(t.text)

    def parse_atom(self):
        t = self.peek()
        if t.text == "true":
            self.next()
            return Truth()
        if t.text == "false":
            self.next()
            return Falsum()
        if t.text == "(":
            self.next()
            inner = self.parse_or()
            self.expect(")")
            return inner
        term = self.parse_term()
        if self.at("="):
            self.next()
            return EqAtom(term, self.parse_term())
        if isinstance(term, App):
            # bare application in atom position: a relation atom
            if self.signature is not None:
                rar = self.signature.relation_arities
                if term.func not in rar:
                    if self.signature.has_symbol(term.func):
                        raise ParseError(
                            f"{term.func} is not a relation symbol", t.line, t.col
                        )
                elif rar[term.func] != len(term.args):
                    raise ParseError(f"arity mismatch for {term.func}", t.line, t.col)
            return RelAtom(term.func, term.args)
        raise ParseError(f"a bare term {t.text!r} is not an atom", t.line, t.col)

    def parse_and(self):
        parts = [self.parse_atom()]
        while self.at("&"):
            self.next()
            parts.append(self.parse_atom())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_or(self):
        parts = [self.parse_and()]
        while self.at("|"):
            self.next()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_posex(self) -> PosEx:
        if self.at("exists"):
            self.next()
            names = self.parse_names()
            self.expect(".")
            self.bound.extend(names)
            matrix = self.parse_or()
            del self.bound[-len(names):]
            return PosEx(names, matrix)
        return PosEx((), self.parse_or())

    def parse_posex_opt_parens(self) -> PosEx:
        """A posex, possibly wrapped in one pair of parentheses (the printer
        emits `(premise) -> (conclusion)`)."""
        if self.at("("):
            save = self.pos
            try:
                self.next()
                p = self.parse_posex()
                self.expect(")")
                if self.peek().text in ("->", ";") or self.peek().kind == "eof":
                    return p
            except ParseError:
                pass
            self.pos = save
        return self.parse_posex()

    def parse_implication(self) -> Implication:
        if self.at("forall"):
            self.next()
            names = self.parse_names()
            self.expect(".")
        else:
            names = ()
        self.bound.extend(names)
        premise = self.parse_posex_opt_parens()
        self.expect("->")
        conclusion = self.parse_posex_opt_parens()
        if names:
            del self.bound[-len(names):]
        return Implication(names, premise, conclusion)

    def parse_hinductive(self) -> HInductiveSentence:
        conjuncts = [self.parse_implication()]
        while self.at(";"):
            self.next()
            if self.peek().kind == "eof":
                break
            conjuncts.append(self.parse_implication())
        return HInductiveSentence(tuple(conjuncts))

    def parse_huniversal(self) -> HUniversalSentence:
        self.expect("!")
        return HUniversalSentence(self.parse_posex())

    # general fragment: implication over quantified boolean combinations
    def parse_general(self) -> Formula:
        if self.at("forall"):
            self.next()
            names = self.parse_names()
            self.expect(".")
            self.bound.extend(names)
            sub = self.parse_general()
            del self.bound[-len(names):]
            return Forall(names, sub)
        if self.at("exists"):
            self.next()
            names = self.parse_names()
            self.expect(".")
            self.bound.extend(names)
            sub = self.parse_general()
            del self.bound[-len(names):]
            return Exists(names, sub)
        left = self.parse_general_or()
        if self.at("->"):
            self.next()
            return Implies(left, self.parse_general())
        return left

    def parse_general_or(self) -> Formula:
        parts = [self.parse_general_and()]
        while self.at("|"):
            self.next()
            parts.append(self.parse_general_and())
        return parts[0] if len(parts) == 1 else GOr(tuple(parts))

    def parse_general_and(self) -> Formula:
        parts = [self.parse_general_unary()]
        while self.at("&"):
            self.next()
            parts.append(self.parse_general_unary())
        return parts[0] if len(parts) == 1 else GAnd(tuple(parts))

    def parse_general_unary(self) -> Formula:
        if self.at("!"):
            self.next()
            return Not(self.parse_general_unary())
        if self.at("("):
            save = self.pos
            self.next()
            inner = self.parse_general()
            self.expect(")")
            # "(x" could have been the start of a term; a term never parses
            # as a general formula, so this branch is unambiguous
            del save
            return inner
        if self.at("forall") or self.at("exists"):
            return self.parse_general()
        return self.parse_atom()


def parse_formula(
    text: str, signature: Optional[Signature] = None
) -> Formula:
    """Parse a single declared-class formula.

    Accepts `hinductive:`, `huniversal:`, `positive:` and `general:` prefixed
    texts; an unprefixed text is parsed as a positive formula, or as a bare
    term if it is one.
    """
    p = Parser(text, signature)
    t = p.peek()
    if t.kind == "name" and p.tokens[p.pos + 1].text == ":":
        keyword = p.next().text
        p.next()  # ":"
        if keyword == "hinductive":
            out: Formula = p.parse_hinductive()
        elif keyword == "huniversal":
            out = p.parse_huniversal()
        elif keyword == "positive":
            out = p.parse_posex()
            _check_no_shape_violation(out)
        elif keyword == "general":
            out = p.parse_general()
        else:
            raise ParseError(f"unknown formula class {keyword!r}", t.line, t.col)
        p.expect_eof()
        return out
    # unprefixed: try a positive formula, else a bare term
    try:
        q = Parser(text, signature)
        out = q.parse_posex()
        q.expect_eof()
        return out
    except ParseError:
        q = Parser(text, signature)
        term = q.parse_term()
        q.expect_eof()
        return term  # type: ignore[return-value]


def _check_no_shape_violation(f: Formula) -> None:
    # parse_posex only builds positive nodes, so nothing further to check;
    # kept as the single seam where shape errors would be reported
    if isinstance(f, (Not, Implies)):
        raise FormulaError("negation/implication inside a positive formula")


def parse_sentences(text: str, signature: Optional[Signature] = None) -> List[Formula]:
    """Parse a `;`-separated list of class-prefixed sentences."""
    out: List[Formula] = []
    toks = tokenize(text)
    starts = []
    for i, t in enumerate(toks):
        if (
            t.kind == "name"
            and t.text in ("hinductive", "huniversal", "positive", "general")
            and i + 1 < len(toks)
            and toks[i + 1].text == ":"
            and (i == 0 or toks[i - 1].text == ";")
        ):
            starts.append(i)
    if not starts:
        raise ParseError("expected a class-prefixed sentence", 1, 1)
    lines = text.split("\n")

    def offset(tok: Token) -> int:
        return sum(len(l) + 1 for l in lines[: tok.line - 1]) + tok.col - 1

    pieces = []
    for j, st in enumerate(starts):
        begin = offset(toks[st])
        end = offset(toks[starts[j + 1]]) if j + 1 < len(starts) else len(text)
        piece = text[begin:end].rstrip()
        piece = piece.rstrip(";").rstrip()
        pieces.append(piece)
    for piece in pieces:
        out.append(parse_formula(piece, signature))
    return out
