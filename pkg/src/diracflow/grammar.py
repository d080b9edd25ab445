"""Canonical text form of operator expressions: renderer, parser and JSON.

Grammar (whitespace is ignored)::

    expr     := term (('+'|'-') term)*
    term     := coeff ('*' word)? | word
    coeff    := rational | '(' epoly ')'
    epoly    := eterm (('+'|'-') eterm)*
    eterm    := rational ('*' 's' ('^' uint)?)? ('*' 'exp[-' uint 's]')?
    word     := factor ('*' factor)*
    factor   := 'b' | 'O' | 'E' | 'F' | factor '^' uint
    rational := '-'? uint ('/' uint)?

The parser is a little more forgiving than the grammar: it accepts a
leading sign on any term, ``s`` or ``exp[...]`` factors in any order inside
an ``eterm`` and bare ``s``/``exp[...]`` factors in front of a word, so that
hand-written input such as ``exp[-4s]*(s)*b*O^3`` is understood.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .algebra import OperatorExpr, Word, normalize
from .expoly import DECAY_UNIT, ExpPoly

__all__ = ["ParseError", "parse", "render", "to_json", "from_json", "dumps", "loads"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset[str]):
        self.line = line
        self.column = column
        self.expected = expected
        exp = ", ".join(sorted(expected)) if expected else "nothing"
        super().__init__(f"{message} at line {line}, column {column} (expected {exp})")


# -- rendering ------------------------------------------------------------
def _rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_word(w: Word) -> str:
    parts = ["b"] if w.beta else []
    i = 0
    fs = w.factors
    while i < len(fs):
        j = i
        while j < len(fs) and fs[j] == fs[i]:
            j += 1
        n = j - i
        parts.append(fs[i] if n == 1 else f"{fs[i]}^{n}")
        i = j
    return "*".join(parts)


def render(a: OperatorExpr) -> str:
    if a.is_zero():
        return "0"
    out = []
    for w, c in a.items():
        wtxt = render_word(w)
        neg = False
        if c.is_constant():
            v = c.constant_value()
            neg = v < 0
            v = abs(v)
            if not wtxt:
                body = _rational(v)
            elif v == 1:
                body = wtxt
            elif v.denominator == 1:
                body = f"{v.numerator}*{wtxt}"
            else:
                body = f"({_rational(v)})*{wtxt}"
        else:
            body = f"({c.to_text()})"
            if wtxt:
                body += "*" + wtxt
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# -- parsing --------------------------------------------------------------
class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # position helpers
    def _loc(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, msg, expected):
        line, col = self._loc()
        raise ParseError(msg, line, col, frozenset(expected))

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, tok: str) -> bool:
        self.skip()
        if self.text.startswith(tok, self.pos):
            self.pos += len(tok)
            return True
        return False

    def expect(self, tok: str):
        if not self.accept(tok):
            self.error(f"unexpected {self._describe()}", {repr(tok)})

    def _describe(self):
        ch = self.peek()
        return "end of input" if not ch else repr(ch)

    def uint(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error(f"unexpected {self._describe()}", {"integer"})
        return int(self.text[start:self.pos])

    def rational(self) -> Fraction:
        num = self.uint()
        if self.accept("/"):
            den = self.uint()
            if den == 0:
                self.error("zero denominator", {"non-zero integer"})
            return Fraction(num, den)
        return Fraction(num)

    # grammar
    def expr(self) -> OperatorExpr:
        raw = []
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        while True:
            raw.extend(self.term(sign))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        if self.peek():
            self.error(f"unexpected {self._describe()}", {"'+'", "'-'", "'*'", "end of input"})
        return normalize(raw)

    def term(self, sign: int):
        coeff = ExpPoly.const(sign)
        symbols: list[str] = []
        seen_factor = False
        while True:
            ch = self.peek()
            if ch == "(":
                self.pos += 1
                coeff = coeff * self.epoly()
                self.expect(")")
            elif ch.isdigit():
                coeff = coeff.scale(self.rational())
            elif ch == "s":
                self.pos += 1
                coeff = coeff * ExpPoly.term(1, self._power())
            elif ch == "e":
                coeff = coeff * self._exp_factor()
            elif ch in ("b", "O", "E", "F"):
                self.pos += 1
                symbols.extend([ch] * self._power())
            else:
                expected = {"rational", "'('", "'b'", "'O'", "'E'", "'F'", "'s'", "'exp['"}
                self.error(f"unexpected {self._describe()}", expected)
            seen_factor = True
            if not self.accept("*"):
                break
        assert seen_factor
        return [(coeff, symbols)]

    def _power(self) -> int:
        if self.accept("^"):
            return self.uint()
        return 1

    def _exp_factor(self) -> ExpPoly:
        self.expect("exp[-")
        self.skip()
        start = self.pos
        rate = self.uint()
        if rate % DECAY_UNIT:
            self.pos = start
            self.error(f"decay rate {rate} is not a multiple of {DECAY_UNIT}", {"multiple of 4"})
        self.expect("s")
        self.expect("]")
        return ExpPoly.term(1, 0, rate // DECAY_UNIT)

    def epoly(self) -> ExpPoly:
        total = ExpPoly.zero()
        sign = -1 if self.accept("-") else 1
        while True:
            total = total + self.eterm().scale(sign)
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                return total

    def eterm(self) -> ExpPoly:
        val = ExpPoly.one()
        while True:
            ch = self.peek()
            if ch.isdigit():
                val = val.scale(self.rational())
            elif ch == "s":
                self.pos += 1
                val = val * ExpPoly.term(1, self._power())
            elif ch == "e":
                val = val * self._exp_factor()
            else:
                self.error(f"unexpected {self._describe()}", {"rational", "'s'", "'exp['"})
            if not self.accept("*"):
                return val


def parse(text: str) -> OperatorExpr:
    p = _Parser(text)
    if not p.peek():
        p.error("empty expression", {"term"})
    return p.expr()


# -- JSON -----------------------------------------------------------------
def to_json(a: OperatorExpr) -> dict:
    return {
        "terms": [
            {"beta": w.beta, "word": list(w.factors), "coeff": c.to_json()}
            for w, c in a.items()
        ]
    }


def from_json(data: dict) -> OperatorExpr:
    return OperatorExpr(
        {Word(int(t["beta"]), tuple(t["word"])): ExpPoly.from_json(t["coeff"]) for t in data["terms"]}
    )


def dumps(a: OperatorExpr) -> str:
    return json.dumps(to_json(a), indent=2)


def loads(text: str) -> OperatorExpr:
    return from_json(json.loads(text))
