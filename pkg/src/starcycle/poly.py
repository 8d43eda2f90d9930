"""Exact multivariate polynomials over the rationals.

Variables are fixed as x1..xd.  Coefficients are Fractions, so every
identity checked downstream (brackets, integration by parts, star
products) is exact rather than floating-point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import prod


class Polynomial:
    """Polynomial in x1..x{dim} with rational coefficients.

    terms maps exponent tuples (length dim) to nonzero Fractions.
    Instances are treated as immutable; all operations return new ones.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim:
                raise ValueError("exponent tuple %r does not have length %d" % (exps, dim))
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent in %r" % (exps,))
            c = Fraction(coeff)
            if c != 0:
                clean[exps] = c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, value) -> "Polynomial":
        return cls(dim, {(0,) * dim: Fraction(value)})

    @classmethod
    def one(cls, dim: int) -> "Polynomial":
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        """x_i, 1-based."""
        if not 1 <= i <= dim:
            raise ValueError("variable index %d out of range for dim %d" % (i, dim))
        exps = [0] * dim
        exps[i - 1] = 1
        return cls(dim, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, exps, coeff=1) -> "Polynomial":
        return cls(dim, {tuple(exps): Fraction(coeff)})

    # -- ring structure ---------------------------------------------------

    def _check_dim(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch: %d vs %d" % (self.dim, other.dim))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_dim(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps, Fraction(0)) + c
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return Polynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return Polynomial(self.dim, {e: c * v for e, v in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_dim(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.one(self.dim)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus ---------------------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to x_i (1-based)."""
        if not 1 <= i <= self.dim:
            raise ValueError("axis %d out of range for dim %d" % (i, self.dim))
        a = i - 1
        out = {}
        for exps, c in self.terms.items():
            if exps[a] == 0:
                continue
            e = list(exps)
            e[a] -= 1
            out[tuple(e)] = c * exps[a]
        return Polynomial(self.dim, out)

    def derive(self, multi_index) -> "Polynomial":
        """Iterated partial derivative for an exponent multi-index."""
        if len(multi_index) != self.dim:
            raise ValueError(
                f"multi-index length {len(multi_index)} != dim {self.dim}"
            )
        p = self
        for axis, k in enumerate(multi_index, start=1):
            for _ in range(k):
                p = p.partial(axis)
                if p.is_zero():
                    return p
        return p

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def evaluate(self, point):
        """Evaluate at a point (sequence of length dim, exact or float)."""
        if len(point) != self.dim:
            raise ValueError("point has length %d, expected %d" % (len(point), self.dim))
        total = Fraction(0)
        for exps, c in self.terms.items():
            total = total + c * prod(v ** e for v, e in zip(point, exps) if e)
        return total

    # -- text form ----------------------------------------------------------
    #
    # Grammar: terms joined by + / -; a term is a rational "a/b" or integer
    # and/or "*"-joined powers "xK^E"; whitespace ignored.

    _TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>x\d+)|(?P<op>[\^\*\+\-]))")

    @classmethod
    def parse(cls, text: str, dim: int) -> "Polynomial":
        tokens = []
        pos = 0
        while pos < len(text):
            m = cls._TOKEN.match(text, pos)
            if m is None:
                if text[pos:].strip() == "":
                    break
                raise ValueError("syntax error at position %d: %r" % (pos, text[pos:pos + 10]))
            kind = m.lastgroup
            tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        if not tokens:
            raise ValueError("empty polynomial text")

        result = cls.zero(dim)
        i = 0
        sign = 1
        if tokens[0][0] == "op" and tokens[0][1] in "+-":
            sign = -1 if tokens[0][1] == "-" else 1
            i = 1
        while True:
            term, i = cls._parse_term(tokens, i, dim, text)
            result = result + sign * term
            if i >= len(tokens):
                break
            kind, val, at = tokens[i]
            if kind != "op" or val not in "+-":
                raise ValueError("expected + or - at position %d" % at)
            sign = -1 if val == "-" else 1
            i += 1
            if i >= len(tokens):
                raise ValueError("dangling %r at end of input" % val)
        return result

    @classmethod
    def _parse_term(cls, tokens, i, dim, text):
        coeff = Fraction(1)
        exps = [0] * dim
        seen = False
        while True:
            if i >= len(tokens):
                break
            kind, val, at = tokens[i]
            if kind == "num":
                try:
                    coeff *= Fraction(val)
                except ZeroDivisionError:
                    raise ValueError("zero denominator at position %d" % at) from None
                seen = True
                i += 1
            elif kind == "var":
                k = int(val[1:])
                if not 1 <= k <= dim:
                    raise ValueError("unknown variable %s at position %d (dim=%d)" % (val, at, dim))
                power = 1
                i += 1
                if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "^":
                    i += 1
                    if i >= len(tokens) or tokens[i][0] != "num" or "/" in tokens[i][1]:
                        raise ValueError("expected integer exponent after ^ at position %d" % at)
                    power = int(tokens[i][1])
                    i += 1
                exps[k - 1] += power
                seen = True
            else:
                break
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                if i >= len(tokens) or tokens[i][0] == "op":
                    raise ValueError("dangling * in term")
                continue
            break
        if not seen:
            at = tokens[i][2] if i < len(tokens) else len(text)
            raise ValueError("expected a term at position %d" % at)
        return cls.monomial(dim, exps, coeff), i

    def render(self) -> str:
        """Inverse of parse: parse(p.render(), p.dim) == p."""
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
        parts = []
        for idx, exps in enumerate(keys):
            c = self.terms[exps]
            factors = []
            for axis, e in enumerate(exps, start=1):
                if e == 1:
                    factors.append("x%d" % axis)
                elif e > 1:
                    factors.append("x%d^%d" % (axis, e))
            mag = abs(c)
            if not factors or mag != 1:
                factors.insert(0, str(mag))
            body = "*".join(factors)
            if idx == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return "Polynomial(%d, %s)" % (self.dim, self.render())
