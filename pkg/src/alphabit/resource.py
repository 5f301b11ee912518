"""Exact resource calculus over the basis {zero-bit, X-bit, Y-bit}.

A resource is a rational vector; one resource can simulate another
asymptotically iff it dominates it componentwise. Identities that hold with
catalytic entanglement are represented as plain vector equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction]


@dataclass(frozen=True)
class Resource:
    zero: Fraction = Fraction(0)
    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("zero", "x", "y"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def __add__(self, other: "Resource") -> "Resource":
        return Resource(self.zero + other.zero, self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Resource") -> "Resource":
        return Resource(self.zero - other.zero, self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Resource":
        return Resource(-self.zero, -self.x, -self.y)

    def __mul__(self, c: Number) -> "Resource":
        c = Fraction(c)
        return Resource(c * self.zero, c * self.x, c * self.y)

    __rmul__ = __mul__

    @property
    def proper(self) -> bool:
        return self.zero >= 0 and self.x >= 0 and self.y >= 0

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.zero, self.x, self.y)

    def __str__(self) -> str:
        return f"({self.zero}, {self.x}, {self.y})"


ZERO = Resource()

BASIS = {
    "zero_bit": Resource(1, 0, 0),
    "x_bit": Resource(0, 1, 0),
    "y_bit": Resource(0, 0, 1),
    "ebit": Resource(0, 1, 1),
    "cbit": Resource(1, 1, 0),
    "cobit": Resource(1, 1, 1),
    "qubit": Resource(2, 1, 1),
}


def alpha_bit(alpha: Number) -> Resource:
    """(1 + alpha) zero-bits + alpha ebits."""
    a = Fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    return Resource(1 + a, a, a)


def named(name: str) -> Resource:
    try:
        return BASIS[name]
    except KeyError:
        raise ValueError(f"unknown resource {name!r}") from None


def vectorize(terms) -> Resource:
    """Sum of (coefficient, resource) pairs; resources may be names or vectors."""
    out = ZERO
    for coeff, res in terms:
        out = out + Fraction(coeff) * (named(res) if isinstance(res, str) else res)
    return out


def geq(a: Resource, b: Resource) -> bool:
    return a.zero >= b.zero and a.x >= b.x and a.y >= b.y


def check_identity(lhs: Resource, rhs: Resource) -> bool:
    return lhs == rhs


def gap(a: Resource, b: Resource) -> Resource:
    return a - b


class Verdict(str, Enum):
    EQUAL = "EQUAL"
    GEQ = "GEQ"
    LEQ = "LEQ"
    INCOMPARABLE = "INCOMPARABLE"


def compare(a: Resource, b: Resource) -> Verdict:
    if a == b:
        return Verdict.EQUAL
    if geq(a, b):
        return Verdict.GEQ
    if geq(b, a):
        return Verdict.LEQ
    return Verdict.INCOMPARABLE


# --- expression language ---------------------------------------------------------------
#
#   relation := expr (("=" | ">=" | "<=") expr)?
#   expr     := ["+" | "-"] term (("+" | "-") term)*
#   term     := factor ("*" factor)*
#   factor   := rational | name | name "(" args ")" | "(" expr ")"
#
# Products must have at most one resource-valued factor.


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


_SINGLE = {"+": "PLUS", "-": "MINUS", "*": "STAR", "/": "SLASH", "(": "LP", ")": "RP", ",": "COMMA"}


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
        elif c.isdigit() or (c == "." and i + 1 < len(src) and src[i + 1].isdigit()):
            j = i
            while j < len(src) and (src[j].isdigit() or src[j] == "."):
                j += 1
            toks.append(_Tok("NUM", src[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("NAME", src[i:j], i))
            i = j
        elif src.startswith(">=", i) or src.startswith("<=", i):
            toks.append(_Tok("REL", src[i:i + 2], i))
            i += 2
        elif c == "=":
            toks.append(_Tok("REL", "=", i))
            i += 1
        elif c in _SINGLE:
            toks.append(_Tok(_SINGLE[c], c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    toks.append(_Tok("END", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def eat(self, kind: str) -> _Tok:
        tok = self.cur
        if tok.kind != kind:
            want = {"RP": "')'", "LP": "'('", "END": "end of input"}.get(kind, kind.lower())
            got = tok.text or "end of input"
            raise ParseError(f"expected {want}, found {got!r}", tok.pos)
        self.i += 1
        return tok

    # values are Fraction (scalar) or Resource
    def expr(self):
        sign = 1
        if self.cur.kind in ("PLUS", "MINUS"):
            sign = -1 if self.eat(self.cur.kind).kind == "MINUS" else 1
        val = self._scale(self.term(), sign)
        while self.cur.kind in ("PLUS", "MINUS"):
            op = self.eat(self.cur.kind)
            rhs = self.term()
            if isinstance(val, Resource) != isinstance(rhs, Resource):
                raise ParseError("cannot add a number to a resource", op.pos)
            val = val + rhs if op.kind == "PLUS" else val - rhs
        return val

    @staticmethod
    def _scale(v, s):
        return v if s == 1 else (-v)

    def term(self):
        val = self.factor()
        while self.cur.kind in ("STAR", "SLASH"):
            op = self.eat(self.cur.kind)
            rhs = self.factor()
            if op.kind == "SLASH":
                if isinstance(rhs, Resource):
                    raise ParseError("cannot divide by a resource", op.pos)
                if rhs == 0:
                    raise ParseError("division by zero", op.pos)
                val = val * (1 / rhs)
                continue
            if isinstance(val, Resource) and isinstance(rhs, Resource):
                raise ParseError("cannot multiply two resources", op.pos)
            val = rhs * val if isinstance(rhs, Resource) else val * rhs
        return val

    def factor(self):
        tok = self.cur
        if tok.kind == "NUM":
            self.eat("NUM")
            return Fraction(tok.text)
        if tok.kind == "LP":
            self.eat("LP")
            v = self.expr()
            self.eat("RP")
            return v
        if tok.kind == "MINUS":
            self.eat("MINUS")
            return -self.factor()
        if tok.kind == "NAME":
            self.eat("NAME")
            if self.cur.kind == "LP":
                return self.call(tok)
            if tok.text not in BASIS:
                raise ParseError(f"unknown resource {tok.text!r}", tok.pos)
            return BASIS[tok.text]
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)

    def call(self, name: _Tok):
        self.eat("LP")
        args = [self.expr()]
        while self.cur.kind == "COMMA":
            self.eat("COMMA")
            args.append(self.expr())
        self.eat("RP")
        if name.text == "alpha_bit":
            if len(args) != 1 or isinstance(args[0], Resource):
                raise ParseError("alpha_bit takes one rational argument", name.pos)
            try:
                return alpha_bit(args[0])
            except ValueError as exc:
                raise ParseError(str(exc), name.pos) from None
        if name.text == "gap":
            if len(args) != 2 or not all(isinstance(a, Resource) for a in args):
                raise ParseError("gap takes two resources", name.pos)
            return gap(args[0], args[1])
        raise ParseError(f"unknown function {name.text!r}", name.pos)


def parse_expression(src: str) -> Resource:
    p = _Parser(src)
    v = p.expr()
    p.eat("END")
    if not isinstance(v, Resource):
        raise ParseError("expression is a number, not a resource", 0)
    return v


@dataclass(frozen=True)
class Statement:
    lhs: Resource
    relation: str | None
    rhs: Resource | None


def parse_statement(src: str) -> Statement:
    p = _Parser(src)
    lhs = p.expr()
    rel, rhs = None, None
    if p.cur.kind == "REL":
        rel = p.eat("REL").text
        rhs = p.expr()
    p.eat("END")
    for side in (lhs, rhs):
        if side is not None and not isinstance(side, Resource):
            raise ParseError("each side must be a resource", 0)
    return Statement(lhs, rel, rhs)


def evaluate(src: str) -> str:
    """Verdict text for a statement, or the vector for a bare expression."""
    st = parse_statement(src)
    if st.relation is None:
        tag = "" if st.lhs.proper else " improper"
        return f"{st.lhs}{tag}"
    return compare(st.lhs, st.rhs).value


def statement_holds(src: str) -> bool:
    st = parse_statement(src)
    if st.relation == "=":
        return st.lhs == st.rhs
    if st.relation == ">=":
        return geq(st.lhs, st.rhs)
    if st.relation == "<=":
        return geq(st.rhs, st.lhs)
    raise ValueError("statement has no relation")


# --- protocol bundles from entropies ---------------------------------------------------

@dataclass(frozen=True)
class Bundle:
    """Net rate vector per channel use: produced minus consumed.

    ``consumed_only`` bundles (remote qubits) live outside the basis and only
    list what they consume.
    """

    name: str
    label: str
    net: Resource
    consumed_only: bool = False


RATE_DENOMINATOR = 10 ** 9


def _q(v: float) -> Fraction:
    # snap float round-off (1 - 2^-53 -> 1); the error stays below 1e-9 bits
    return Fraction(float(v)).limit_denominator(RATE_DENOMINATOR)


def derive_protocol_rates(report) -> list[Bundle]:
    """Rate bundles implied by one channel/input entropy report.

    I(A>B) is used with its sign in the father, coherent and hashing bundles so
    that substituting teleportation into the father bundle reproduces the
    coherent bundle exactly; I(A>E) in the zero-bit form is clamped at 0.
    """
    h_a, h_b, h_e = _q(report.h_a), _q(report.h_b), _q(report.h_e)
    mutual = h_a + h_b - h_e
    mutual_ae = h_a + h_e - h_b
    ic_b = h_b - h_e
    ic_e = max(h_e - h_b, Fraction(0))
    qubit, ebit, zero = BASIS["qubit"], BASIS["ebit"], BASIS["zero_bit"]
    father = mutual / 2 * qubit - mutual_ae / 2 * ebit
    coherent_plus = ic_b * qubit + mutual_ae * zero
    zero_form = mutual * zero - ic_e * ebit
    mother = mutual / 2 * ebit - mutual_ae / 2 * qubit
    hashing = ic_b * ebit - mutual_ae * zero
    bundles = [
        Bundle("father", "channel + 1/2 I(A;E) ebits >= 1/2 I(A;B) qubits", father),
        Bundle("coherent_plus", "channel >= I(A>B) qubits + I(A;E) zero-bits", coherent_plus),
        Bundle("zero_bit", "channel + I(A>E) ebits >= I(A;B) zero-bits", zero_form),
        Bundle("mother", "state + 1/2 I(A;E) qubits >= 1/2 I(A;B) ebits", mother),
        Bundle("hashing", "state + I(A;E) zero-bits >= I(A>B) ebits", hashing),
        Bundle("remote_qubit", "1 zero-bit + 1 ebit >= 1 remote qubit", -(zero + ebit), consumed_only=True),
    ]
    if father != coherent_plus:
        raise AssertionError("father bundle does not reduce to the coherent bundle")
    return bundles
