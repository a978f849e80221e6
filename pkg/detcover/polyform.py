"""
Homogeneous forms over Q and over Z/p^a.

A Form keeps dense exponent vectors of length num_vars and stores its terms in
graded-lex descending order, so printing and every basis built on top of it is
deterministic.
"""
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from detcover.errors import (DenominatorError, FormSyntaxError, LengthMismatchError,
                             NonHomogeneousError, VariableIndexError)

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Coefficient = Union[int, Fraction]


def grlex_key(exponent: Exponent) -> Tuple[int, Exponent]:
    return sum(exponent), exponent


def monomials(num_vars: int, degree: int) -> Iterator[Exponent]:
    """Yield every exponent vector of the given degree, graded-lex descending."""
    if num_vars == 1:
        yield (degree,)
        return
    for head in range(degree, -1, -1):
        for tail in monomials(num_vars - 1, degree - head):
            yield (head,) + tail


def divides(small: Exponent, big: Exponent) -> bool:
    return all(s <= b for s, b in zip(small, big))


def eval_monomial(exponent: Exponent, coords: Sequence[int]):
    value = 1
    for c, e in zip(coords, exponent):
        if e:
            value *= c ** e
    return value


@dataclass(frozen=True)
class Form:
    num_vars: int
    degree: int
    terms: Tuple[Tuple[Exponent, Coefficient], ...] = ()
    modulus: Optional[int] = None

    @classmethod
    def from_dict(cls, num_vars: int, degree: int, coeffs: Mapping[Exponent, Coefficient],
                  modulus: Optional[int] = None) -> "Form":
        cleaned: Dict[Exponent, Coefficient] = {}
        for exponent, c in coeffs.items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != num_vars:
                raise LengthMismatchError(f"exponent {exponent} has length {len(exponent)}, expected {num_vars}")
            if modulus is None:
                c = Fraction(c)
            else:
                c = int(c) % modulus
            if c == 0:
                continue
            if sum(exponent) != degree:
                raise NonHomogeneousError(tuple(sorted((degree, sum(exponent)))))
            cleaned[exponent] = c
        terms = tuple(sorted(cleaned.items(), key=lambda t: grlex_key(t[0]), reverse=True))
        return cls(num_vars=num_vars, degree=degree, terms=terms, modulus=modulus)

    @classmethod
    def zero(cls, num_vars: int, degree: int = 0, modulus: Optional[int] = None) -> "Form":
        return cls(num_vars=num_vars, degree=degree, modulus=modulus)

    @classmethod
    def variable(cls, i: int, num_vars: int) -> "Form":
        if not 0 <= i < num_vars:
            raise VariableIndexError(f"x{i}", num_vars)
        return cls.from_dict(num_vars, 1, {tuple(int(j == i) for j in range(num_vars)): 1})

    @property
    def coefficients(self) -> Dict[Exponent, Coefficient]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_integral(self) -> bool:
        return self.modulus is not None or all(c.denominator == 1 for _, c in self.terms)

    def leading_monomial(self) -> Exponent:
        if self.is_zero:
            raise ValueError("zero form has no leading monomial")
        return self.terms[0][0]

    def leading_coefficient(self) -> Coefficient:
        if self.is_zero:
            raise ValueError("zero form has no leading coefficient")
        return self.terms[0][1]

    def _check_compatible(self, other: "Form") -> None:
        if self.num_vars != other.num_vars:
            raise LengthMismatchError(f"forms in {self.num_vars} and {other.num_vars} variables")
        if self.modulus != other.modulus:
            raise ValueError(f"forms over different rings (modulus {self.modulus} vs {other.modulus})")

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise NonHomogeneousError(tuple(sorted((self.degree, other.degree))))
        coeffs = self.coefficients
        for exponent, c in other.terms:
            coeffs[exponent] = coeffs.get(exponent, 0) + c
        return Form.from_dict(self.num_vars, self.degree, coeffs, self.modulus)

    def __neg__(self) -> "Form":
        return self.scale(-1)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, other: Union["Form", int, Fraction]) -> "Form":
        if not isinstance(other, Form):
            return self.scale(other)
        self._check_compatible(other)
        coeffs: Dict[Exponent, Coefficient] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                exponent = tuple(a + b for a, b in zip(e1, e2))
                coeffs[exponent] = coeffs.get(exponent, 0) + c1 * c2
        return Form.from_dict(self.num_vars, self.degree + other.degree, coeffs, self.modulus)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Form":
        if k < 0:
            raise ValueError("negative powers are not forms")
        result = Form.from_dict(self.num_vars, 0, {(0,) * self.num_vars: 1}, self.modulus)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c: Coefficient) -> "Form":
        return Form.from_dict(self.num_vars, self.degree, {e: v * c for e, v in self.terms}, self.modulus)

    def primitive(self) -> "Form":
        """Integer coprime coefficients with a positive leading coefficient."""
        if self.modulus is not None:
            raise ValueError("primitive() is defined for rational forms only")
        if self.is_zero:
            return self
        den = math.lcm(*(c.denominator for _, c in self.terms))
        ints = [c.numerator * (den // c.denominator) for _, c in self.terms]
        g = reduce(math.gcd, ints)
        if ints[0] < 0:
            g = -g
        return self.scale(Fraction(den, g))

    def derivative(self, i: int) -> "Form":
        if not 0 <= i < self.num_vars:
            raise VariableIndexError(f"x{i}", self.num_vars)
        coeffs: Dict[Exponent, Coefficient] = {}
        for exponent, c in self.terms:
            if exponent[i] == 0:
                continue
            lowered = exponent[:i] + (exponent[i] - 1,) + exponent[i + 1:]
            coeffs[lowered] = c * exponent[i]
        return Form.from_dict(self.num_vars, max(self.degree - 1, 0), coeffs, self.modulus)

    def __call__(self, coords: Sequence[int]) -> Coefficient:
        return eval_form(self, coords)

    def __str__(self) -> str:
        return print_form(self)

    def to_sympy(self) -> sympy.Poly:
        gens = sympy.symbols(f"x0:{self.num_vars}")
        if self.modulus is not None:
            expr = sum((int(c) * sympy.Mul(*(g ** e for g, e in zip(gens, exponent)))
                        for exponent, c in self.terms), sympy.Integer(0))
            return sympy.Poly(expr, *gens, modulus=self.modulus) if sympy.isprime(self.modulus) \
                else sympy.Poly(expr, *gens)
        expr = sum((sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*(g ** e for g, e in zip(gens, exponent)))
                    for exponent, c in self.terms), sympy.Integer(0))
        return sympy.Poly(expr, *gens, domain="QQ")


_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|([-+*^/()]))")


class _Parser:
    """Recursive-descent parser over the grammar expr := term (('+'|'-') term)*."""

    def __init__(self, text: str, num_vars: int):
        self.text = text
        self.num_vars = num_vars
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                bad = pos + len(stripped[pos:]) - len(stripped[pos:].lstrip())
                raise FormSyntaxError(f"unexpected character {stripped[bad]!r}", bad)
            start = m.start(m.lastindex)
            if m.group(1) is not None:
                self.tokens.append(("num", m.group(1), start))
            elif m.group(2) is not None:
                self.tokens.append(("var", m.group(2), start))
            else:
                self.tokens.append(("op", m.group(3), start))
            pos = m.end()
        self.index = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def position(self) -> int:
        tok = self.peek()
        return tok[2] if tok else len(self.text.rstrip())

    def take_op(self, op: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == op:
            self.index += 1
            return True
        return False

    def expect_number(self) -> int:
        tok = self.peek()
        if not tok or tok[0] != "num":
            raise FormSyntaxError("expected an integer", self.position())
        self.index += 1
        return int(tok[1])

    def parse(self) -> Dict[Exponent, Fraction]:
        if not self.tokens:
            raise FormSyntaxError("empty form", 0)
        poly = self.expr()
        if self.peek() is not None:
            raise FormSyntaxError(f"unexpected token {self.peek()[1]!r}", self.position())
        return poly

    def expr(self) -> Dict[Exponent, Fraction]:
        sign = -1 if self.take_op("-") else 1
        if sign == 1:
            self.take_op("+")
        poly = _poly_scale(self.term(), sign)
        while True:
            if self.take_op("+"):
                poly = _poly_add(poly, self.term())
            elif self.take_op("-"):
                poly = _poly_add(poly, _poly_scale(self.term(), -1))
            else:
                return poly

    def term(self) -> Dict[Exponent, Fraction]:
        poly = self.power()
        while self.take_op("*"):
            poly = _poly_mul(poly, self.power())
        return poly

    def power(self) -> Dict[Exponent, Fraction]:
        base = self.atom()
        if self.take_op("^"):
            k = self.expect_number()
            result = {(0,) * self.num_vars: Fraction(1)}
            for _ in range(k):
                result = _poly_mul(result, base)
            return result
        return base

    def atom(self) -> Dict[Exponent, Fraction]:
        tok = self.peek()
        if tok is None:
            raise FormSyntaxError("unexpected end of input", self.position())
        kind, value, pos = tok
        if kind == "num":
            self.index += 1
            c = Fraction(int(value))
            if self.take_op("/"):
                den = self.expect_number()
                if den == 0:
                    raise FormSyntaxError("division by zero", pos)
                c /= den
            return {(0,) * self.num_vars: c} if c else {}
        if kind == "var":
            self.index += 1
            i = int(value)
            if i >= self.num_vars:
                raise VariableIndexError(f"x{i}", self.num_vars, pos)
            return {tuple(int(j == i) for j in range(self.num_vars)): Fraction(1)}
        if value == "(":
            self.index += 1
            inner = self.expr()
            if not self.take_op(")"):
                raise FormSyntaxError("expected ')'", self.position())
            return inner
        raise FormSyntaxError(f"unexpected token {value!r}", pos)


def _poly_add(p: Dict[Exponent, Fraction], q: Dict[Exponent, Fraction]) -> Dict[Exponent, Fraction]:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + c
        if out[e] == 0:
            del out[e]
    return out


def _poly_scale(p: Dict[Exponent, Fraction], c: int) -> Dict[Exponent, Fraction]:
    return {e: v * c for e, v in p.items()}


def _poly_mul(p: Dict[Exponent, Fraction], q: Dict[Exponent, Fraction]) -> Dict[Exponent, Fraction]:
    out: Dict[Exponent, Fraction] = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def parse_form(text: str, num_vars: int) -> Form:
    """Parse text such as "x0^2 + x1^2 - x2^2" into a homogeneous Form."""
    if num_vars < 1:
        raise ValueError("num_vars must be positive")
    coeffs = _Parser(text, num_vars).parse()
    degrees = sorted({sum(e) for e in coeffs})
    if len(degrees) > 1:
        raise NonHomogeneousError((degrees[0], degrees[1]))
    degree = degrees[0] if degrees else 0
    return Form.from_dict(num_vars, degree, coeffs)


def eval_form(F: Form, coords: Sequence[int]) -> Coefficient:
    if len(coords) != F.num_vars:
        raise LengthMismatchError(f"expected {F.num_vars} coordinates, got {len(coords)}")
    total = sum((c * eval_monomial(e, coords) for e, c in F.terms), 0)
    if F.modulus is not None:
        return int(total) % F.modulus
    total = Fraction(total)
    return total.numerator if total.denominator == 1 else total


def reduce_form(F: Form, p: int, a: int = 1) -> Form:
    """Coefficient-wise image of a rational form in Z/p^a."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if a < 1:
        raise ValueError("power a must be positive")
    if F.modulus is not None:
        raise ValueError("form is already reduced")
    q = p ** a
    coeffs = {}
    for exponent, c in F.terms:
        if c.denominator % p == 0:
            raise DenominatorError(f"coefficient {c} has denominator divisible by {p}")
        coeffs[exponent] = c.numerator * pow(c.denominator, -1, q)
    return Form.from_dict(F.num_vars, F.degree, coeffs, modulus=q)


def _monomial_text(exponent: Exponent) -> str:
    parts = []
    for i, e in enumerate(exponent):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def print_form(F: Form) -> str:
    if F.is_zero:
        return "0"
    pieces = []
    for k, (exponent, c) in enumerate(F.terms):
        negative = c < 0 and F.modulus is None
        magnitude = -c if negative else c
        mono = _monomial_text(exponent)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{magnitude}*{mono}"
        if k == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def forms_from_strings(texts: Iterable[str], num_vars: int) -> List[Form]:
    return [parse_form(t, num_vars) for t in texts]
