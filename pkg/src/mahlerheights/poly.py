"""Exact integer and rational polynomial arithmetic.

Univariate polynomials are dense (``IntPoly`` over the integers, ``RatPoly``
over the rationals), multivariate ones are sparse maps from exponent vectors
to integer coefficients (``MultiPoly``).  All coefficients are arbitrary
precision and every operation here is exact; floating point enters only in
the numerical modules that consume these objects.

Values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

# Rational scalars are plain fractions.Fraction values throughout the package.
RationalNumber = Fraction


class ParseError(ValueError):
    """Syntax or semantic error in a polynomial expression.

    ``position`` is the 0-based offset into the input text.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class IntPoly:
    """Dense univariate polynomial with integer coefficients.

    ``coeffs`` is ascending: ``coeffs[k]`` multiplies T^k.  The zero
    polynomial is the empty tuple; otherwise the last entry is nonzero.
    """

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))
        for c in self.coeffs:
            if not isinstance(c, int):
                raise TypeError(f"IntPoly coefficients must be int, got {type(c).__name__}")

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def content(self) -> int:
        """Positive gcd of the coefficients.  Errors on the zero polynomial."""
        if not self.coeffs:
            raise ValueError("content of the zero polynomial is undefined")
        g = 0
        for c in self.coeffs:
            g = gcd(g, abs(c))
        return g

    def primitive_part(self) -> "IntPoly":
        """P divided by its content; the sign stays in the primitive part."""
        g = self.content()
        return IntPoly(tuple(c // g for c in self.coeffs))

    def is_primitive(self) -> bool:
        return not self.is_zero() and self.content() == 1

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _as_intpoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return IntPoly(a)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_intpoly(other))

    def __rsub__(self, other):
        return _as_intpoly(other) + (-self)

    def __mul__(self, other):
        other = _as_intpoly(other)
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = IntPoly((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k >= 1))

    def evaluate(self, x):
        """Horner evaluation; exact for int/Fraction arguments."""
        acc = 0 * x if self.coeffs else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a) -> "RatPoly":
        """The polynomial T |-> P(T + a), computed exactly (Taylor shift)."""
        return self.to_rational().shift(a)

    def to_rational(self) -> "RatPoly":
        return RatPoly(tuple(Fraction(c) for c in self.coeffs))

    def __str__(self):  # round-trips through parse_poly with variable "T"
        return format_univariate(self.coeffs, "T")

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)!r})"


def _as_intpoly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly((x,))
    raise TypeError(f"cannot coerce {type(x).__name__} to IntPoly")


@dataclass(frozen=True)
class RatPoly:
    """Dense univariate polynomial with rational coefficients.

    Produced by Taylor shifts; consumed by Newton-polygon code.  Only the
    operations those uses need are provided.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", _strip(tuple(Fraction(c) for c in self.coeffs))
        )

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def evaluate(self, x):
        acc = 0 * x if self.coeffs else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a) -> "RatPoly":
        """Exact Taylor shift T |-> P(T + a); the degree is preserved."""
        a = Fraction(a)
        b = list(self.coeffs)
        d = len(b) - 1
        for i in range(d):
            for j in range(d - 1, i - 1, -1):
                b[j] += a * b[j + 1]
        return RatPoly(tuple(b))

    def clear_denominators(self) -> tuple[IntPoly, int]:
        """Return (Q, m) with Q integral, m > 0 and Q = m * self."""
        m = 1
        for c in self.coeffs:
            m = m * c.denominator // gcd(m, c.denominator)
        return IntPoly(tuple(int(c * m) for c in self.coeffs)), m

    def to_int_poly(self) -> IntPoly:
        """Exact conversion; errors if any coefficient has a denominator."""
        for c in self.coeffs:
            if c.denominator != 1:
                raise ValueError(f"coefficient {c} is not an integer")
        return IntPoly(tuple(int(c) for c in self.coeffs))

    def __str__(self):
        return format_univariate(self.coeffs, "T")

    def __repr__(self):
        return f"RatPoly({[str(c) for c in self.coeffs]!r})"


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """Sparse multivariate polynomial over the integers.

    ``terms`` maps exponent vectors (tuples of length ``nvars``) to nonzero
    integer coefficients.  The zero polynomial has an empty term map.
    """

    nvars: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for exps, c in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise ValueError(
                    f"exponent vector {exps} has length {len(exps)}, expected {self.nvars}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if c != 0:
                clean[exps] = int(c)
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    @classmethod
    def constant(cls, nvars: int, c: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        """Maximum total degree of a term; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degrees = {sum(e) for e in self.terms}
        return len(degrees) <= 1

    def coefficients(self):
        return self.terms.values()

    def content(self) -> int:
        if not self.terms:
            raise ValueError("content of the zero polynomial is undefined")
        g = 0
        for c in self.terms.values():
            g = gcd(g, abs(c))
        return g

    def primitive_part(self) -> "MultiPoly":
        g = self.content()
        return MultiPoly(self.nvars, {e: c // g for e, c in self.terms.items()})

    def is_primitive(self) -> bool:
        return not self.is_zero() and self.content() == 1

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, int):
            return MultiPoly.constant(self.nvars, other)
        raise TypeError(f"cannot coerce {type(other).__name__} to MultiPoly")

    def partial_derivative(self, index: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[index] == 0:
                continue
            new = list(e)
            new[index] -= 1
            out[tuple(new)] = out.get(tuple(new), 0) + c * e[index]
        return MultiPoly(self.nvars, out)

    def evaluate(self, point):
        """Evaluate at a point (sequence of length nvars), any numeric kind."""
        if len(point) != self.nvars:
            raise ValueError("point length mismatch")
        acc = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            acc = acc + term
        return acc

    def to_univariate(self) -> IntPoly:
        """Dense conversion; requires nvars == 1."""
        if self.nvars != 1:
            raise ValueError(f"polynomial has {self.nvars} variables, expected 1")
        if not self.terms:
            return IntPoly()
        coeffs = [0] * (max(e[0] for e in self.terms) + 1)
        for (k,), c in self.terms.items():
            coeffs[k] = c
        return IntPoly(coeffs)

    @classmethod
    def from_univariate(cls, p: IntPoly) -> "MultiPoly":
        return cls(1, {(k,): c for k, c in enumerate(p.coeffs) if c != 0})

    def __repr__(self):
        return f"MultiPoly(nvars={self.nvars}, terms={self.terms!r})"


def homogenize(f: MultiPoly, m: int) -> MultiPoly:
    """Homogenize to degree m by a fresh variable inserted at index 0.

    Each term of total degree t picks up exponent m - t on the new variable,
    so x - 2 at m = 1 becomes x1 - 2*x0.  Errors if m is below some term's
    total degree.
    """
    out = {}
    for e, c in f.terms.items():
        t = sum(e)
        if t > m:
            raise ValueError(f"term of total degree {t} exceeds target degree {m}")
        out[(m - t,) + e] = c
    return MultiPoly(f.nvars + 1, out)


def dehomogenize(f: MultiPoly, index: int) -> MultiPoly:
    """Set variable ``index`` to 1 and drop it.

    Inverse of :func:`homogenize` when applied at the inserted variable.
    """
    if not 0 <= index < f.nvars:
        raise ValueError(f"variable index {index} out of range")
    out = {}
    for e, c in f.terms.items():
        reduced = e[:index] + e[index + 1:]
        out[reduced] = out.get(reduced, 0) + c
    return MultiPoly(f.nvars - 1, out)


# ---------------------------------------------------------------------------
# Parsing
#
# Grammar (no implicit multiplication, '^' exponents are nonnegative
# integer literals):
#
#   expr   := ('+'|'-')? term (('+'|'-') term)*
#   term   := factor ('*' factor)*
#   factor := base ('^' nat)?
#   base   := integer | var | '(' expr ')'
# ---------------------------------------------------------------------------

_OPS = set("+-*^()")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = list(variables)
        self.index = {v: k for k, v in enumerate(self.variables)}
        self.nvars = len(self.variables)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, value, position = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", position)
        return self.advance()

    def parse(self) -> MultiPoly:
        result = self.expr()
        kind, value, position = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", position)
        return result

    def expr(self) -> MultiPoly:
        sign = 1
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":  # leading sign
            self.advance()
            sign = -1 if value == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                acc = acc + rhs if value == "+" else acc - rhs
            else:
                return acc

    def term(self) -> MultiPoly:
        acc = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> MultiPoly:
        base = self.base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            kind, value, position = self.peek()
            if kind == "op" and value == "-":
                raise ParseError("exponent must be a nonnegative integer", position)
            if kind != "int":
                raise ParseError("expected a nonnegative integer exponent", position)
            self.advance()
            return base**value
        return base

    def base(self) -> MultiPoly:
        kind, value, position = self.advance()
        if kind == "int":
            return MultiPoly.constant(self.nvars, value)
        if kind == "name":
            if value not in self.index:
                raise ParseError(f"unknown variable {value!r}", position)
            return MultiPoly.variable(self.nvars, self.index[value])
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(
            "expected an integer, a variable or a parenthesized expression", position
        )


def parse_poly(text: str, variables) -> MultiPoly:
    """Parse a polynomial expression over the named variables, exactly.

    Raises :class:`ParseError` (with position) on syntax errors, unknown
    variables and negative exponents.
    """
    return _Parser(_tokenize(text), variables).parse()


def parse_univariate(text: str, variable: str = "T") -> IntPoly:
    """Parse a univariate expression into a dense integer polynomial."""
    return parse_poly(text, [variable]).to_univariate()


def detect_variables(text: str) -> list[str]:
    """Variable names in order of first appearance (CLI convenience)."""
    seen = []
    for kind, value, _ in _tokenize(text):
        if kind == "name" and value not in seen:
            seen.append(value)
    return seen


# ---------------------------------------------------------------------------
# Formatting (round-trips through parse_poly)
# ---------------------------------------------------------------------------


def format_univariate(coeffs, variable: str) -> str:
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        if k == 0:
            mono = None
        elif k == 1:
            mono = variable
        else:
            mono = f"{variable}^{k}"
        parts.append(_joined_term(c, mono, first=not parts))
    return "".join(parts)


def format_multi(f: MultiPoly, variables) -> str:
    if len(variables) != f.nvars:
        raise ValueError("variable name count mismatch")
    if not f.terms:
        return "0"
    # descending total degree, then lexicographic on exponents: deterministic
    ordered = sorted(f.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
    parts = []
    for exps in ordered:
        factors = []
        for v, e in zip(variables, exps):
            if e == 1:
                factors.append(v)
            elif e > 1:
                factors.append(f"{v}^{e}")
        mono = "*".join(factors) if factors else None
        parts.append(_joined_term(f.terms[exps], mono, first=not parts))
    return "".join(parts)


def _joined_term(c, mono, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    sep = "" if first else " "
    lead = f"{sep}{sign} " if not first else sign
    a = abs(c)
    if mono is None:
        return f"{lead}{a}"
    if a == 1:
        return f"{lead}{mono}"
    return f"{lead}{a}*{mono}"
