"""Exact arithmetic for a tower of fields: the finite field K = F_{p^e},
the polynomial ring K[u_1, ..., u_k], and the rational function field
L = K(u_1, ..., u_k).

Representations
---------------
* ``FqElem`` stores an element of K as a little-endian coefficient tuple
  over F_p in the extension generator ``g`` (degree < e, no trailing
  zeros; the zero element is the empty tuple).
* ``Poly`` is a sparse map from exponent vectors (one entry per declared
  variable) to nonzero ``FqElem`` coefficients.
* ``RatFunc`` is a reduced fraction of two ``Poly`` values: numerator
  and denominator coprime, denominator monic under graded-lex order,
  zero normalized to 0/1.  On this canonical form structural equality
  is field equality, which everything downstream relies on.

The p-power structure of the tower is exposed directly: ``frobenius``
(raising to the p-th power), p-th roots (always defined on K, defined
on K[u] and L exactly for p-th powers), and ``depth``, the number of
times an element can be peeled by successive p-th roots.  Depth is
finite exactly for nonconstant elements, so constants are reported as
``math.inf``.

The module also owns the textual coefficient grammar used by the CLI
and by trace documents::

    ratfunc  := poly | poly "/" poly
    poly     := term ("+" term)*
    term     := factor ("*" factor)*
    factor   := nat | name ("^" nat)?

where a name is either a declared variable or, for e > 1, the generator
symbol ``g``.  Whitespace is ignored; there is no "-": coefficients are
written as canonical residues.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import inf

from .errors import ParseError

__all__ = [
    "FieldParams",
    "FqElem",
    "Poly",
    "RatFunc",
    "poly_gcd",
    "is_prime",
    "parse_ratfunc",
    "format_ratfunc",
    "parse_modulus",
    "format_modulus",
]

_NAME_RE = re.compile(r"[A-Za-z_]\w*\Z")


# ---------------------------------------------------------------------------
# primality and F_p[x] helpers (used for parameter validation only)

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all machine-sized inputs."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# Dense little-endian coefficient vectors over F_p, trailing zeros stripped.

def _px_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _px_add(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _px_trim(out)


def _px_sub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return _px_trim(out)


def _px_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _px_trim(out)


def _px_rem(a, m, p):
    """a mod m for monic m."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, c in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * c) % p
        a.pop()
    return _px_trim(a)


def _px_gcd(a, b, p):
    while b:
        inv = pow(b[-1], p - 2, p)
        bm = tuple(c * inv % p for c in b)  # monic
        a, b = b, _px_rem(a, bm, p)
    return a


def _px_powmod(a, n, m, p):
    result = (1,)
    base = _px_rem(a, m, p)
    while n:
        if n & 1:
            result = _px_rem(_px_mul(result, base, p), m, p)
        base = _px_rem(_px_mul(base, base, p), m, p)
        n >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Rabin's test: x^(p^e) = x mod m, and x^(p^(e/r)) - x coprime to m
    for every prime r dividing e."""
    e = len(modulus) - 1
    x = (0, 1)
    frob = {0: _px_rem(x, modulus, p)}
    cur = frob[0]
    for j in range(1, e + 1):
        cur = _px_powmod(cur, p, modulus, p)
        frob[j] = cur
    if frob[e] != frob[0]:
        return False
    for r in _prime_factors(e):
        d = _px_gcd(_px_sub(frob[e // r], x, p), modulus, p)
        if len(d) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field parameters

@dataclass(frozen=True)
class FieldParams:
    """Parameters of the coefficient tower: K = F_{p^e} and the variable
    list of L = K(vars).  For e > 1 an explicit monic irreducible
    modulus over F_p must be supplied (little-endian, length e + 1); no
    modulus table is bundled."""

    p: int
    e: int = 1
    vars: tuple[str, ...] = ("u",)
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if not isinstance(self.e, int) or self.e < 1:
            raise ValueError(f"e must be a positive integer, got {self.e}")
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("at least one variable is required")
        for v in self.vars:
            if not isinstance(v, str) or not _NAME_RE.match(v):
                raise ValueError(f"invalid variable name {v!r}")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variable names must be distinct")
        if self.e > 1 and "g" in self.vars:
            raise ValueError("variable name 'g' collides with the field generator")
        if self.e == 1:
            if self.modulus is not None:
                raise ValueError("modulus is only meaningful for e > 1")
        else:
            if self.modulus is None:
                raise ValueError("e > 1 requires an explicit modulus")
            mod = tuple(int(c) % self.p for c in self.modulus)
            if len(mod) != self.e + 1 or mod[-1] != 1:
                raise ValueError(f"modulus must be monic of degree {self.e}")
            if not _is_irreducible(mod, self.p):
                raise ValueError("modulus is not irreducible over F_p")
            object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def k(self) -> int:
        return len(self.vars)

    def var_index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None

    # element constructors
    def fq(self, n: int) -> "FqElem":
        """Prime-field constant n mod p, embedded into K."""
        return FqElem(self, _px_trim([n % self.p]))

    def fq_coeffs(self, coeffs) -> "FqElem":
        """Element from little-endian F_p coefficients in the generator."""
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.e:
            raise ValueError("coefficient vector longer than extension degree")
        return FqElem(self, _px_trim(c))

    def gen(self) -> "FqElem":
        if self.e == 1:
            raise ValueError("prime field has no extension generator")
        return FqElem(self, (0, 1))


# ---------------------------------------------------------------------------
# elements of K

@dataclass(frozen=True, repr=False)
class FqElem:
    """Element of K = F_{p^e}; immutable and hashable."""

    fp: FieldParams
    coeffs: tuple[int, ...]

    def _check(self, other: "FqElem"):
        if self.fp != other.fp:
            raise ValueError("mixed field parameters")

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def __add__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.fp, _px_add(self.coeffs, other.coeffs, self.fp.p))

    def __sub__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.fp, _px_sub(self.coeffs, other.coeffs, self.fp.p))

    def __neg__(self) -> "FqElem":
        return FqElem(self.fp, _px_sub((), self.coeffs, self.fp.p))

    def __mul__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        prod = _px_mul(self.coeffs, other.coeffs, self.fp.p)
        if self.fp.e > 1:
            prod = _px_rem(prod, self.fp.modulus, self.fp.p)
        return FqElem(self.fp, prod)

    def __pow__(self, n: int) -> "FqElem":
        if n < 0:
            return self.inv() ** (-n)
        result = self.fp.fq(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inv(self) -> "FqElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.fp.q - 2)

    def __truediv__(self, other: "FqElem") -> "FqElem":
        return self * other.inv()

    def pth_root(self) -> "FqElem":
        """The unique b with b^p = a; equals a^(p^(e-1)) since the
        Frobenius is bijective on a finite field."""
        return self ** (self.fp.p ** (self.fp.e - 1))

    def __str__(self) -> str:
        return _format_fq(self)

    def __repr__(self) -> str:
        return f"FqElem({_format_fq(self)})"


# ---------------------------------------------------------------------------
# sparse multivariate polynomials over K

def _grlex_key(ev: tuple[int, ...]):
    return (sum(ev), ev)


class Poly:
    """Sparse polynomial in the declared variables, exponent vector ->
    nonzero coefficient.  Treated as immutable after construction."""

    __slots__ = ("fp", "terms", "_hash")

    def __init__(self, fp: FieldParams, terms=None):
        clean: dict[tuple[int, ...], FqElem] = {}
        if terms:
            for ev, c in (terms.items() if isinstance(terms, dict) else terms):
                ev = tuple(int(x) for x in ev)
                if len(ev) != fp.k or any(x < 0 for x in ev):
                    raise ValueError(f"bad exponent vector {ev}")
                if not c.is_zero():
                    acc = clean.get(ev)
                    c = c if acc is None else acc + c
                    if c.is_zero():
                        clean.pop(ev, None)
                    else:
                        clean[ev] = c
        self.fp = fp
        self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, fp: FieldParams) -> "Poly":
        return cls(fp)

    @classmethod
    def constant(cls, fp: FieldParams, c) -> "Poly":
        if isinstance(c, int):
            c = fp.fq(c)
        return cls(fp, {(0,) * fp.k: c})

    @classmethod
    def variable(cls, fp: FieldParams, name: str) -> "Poly":
        ev = [0] * fp.k
        ev[fp.var_index(name)] = 1
        return cls(fp, {tuple(ev): fp.fq(1)})

    @classmethod
    def monomial(cls, fp: FieldParams, ev, coeff: FqElem) -> "Poly":
        return cls(fp, {tuple(ev): coeff})

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(ev) for ev in self.terms)

    def constant_value(self) -> FqElem:
        if self.is_zero():
            return self.fp.fq(0)
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.fp.k: self.fp.fq(1)}

    def total_degree(self) -> int:
        if self.is_zero():
            raise ValueError("degree of zero polynomial")
        return max(sum(ev) for ev in self.terms)

    def leading(self) -> tuple[tuple[int, ...], FqElem]:
        """Leading (exponent vector, coefficient) under graded-lex."""
        if self.is_zero():
            raise ValueError("leading term of zero polynomial")
        ev = max(self.terms, key=_grlex_key)
        return ev, self.terms[ev]

    # arithmetic
    def _check(self, other: "Poly"):
        if self.fp != other.fp:
            raise ValueError("mixed field parameters")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for ev, c in other.terms.items():
            s = out.get(ev)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(ev, None)
            else:
                out[ev] = s
        p = Poly.__new__(Poly)
        p.fp, p.terms, p._hash = self.fp, out, None
        return p

    def __neg__(self) -> "Poly":
        p = Poly.__new__(Poly)
        p.fp, p.terms, p._hash = self.fp, {ev: -c for ev, c in self.terms.items()}, None
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        out: dict[tuple[int, ...], FqElem] = {}
        for ev1, c1 in self.terms.items():
            for ev2, c2 in other.terms.items():
                ev = tuple(a + b for a, b in zip(ev1, ev2))
                c = c1 * c2
                s = out.get(ev)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(ev, None)
                else:
                    out[ev] = s
        p = Poly.__new__(Poly)
        p.fp, p.terms, p._hash = self.fp, out, None
        return p

    def scale(self, c: FqElem) -> "Poly":
        if c.is_zero():
            return Poly.zero(self.fp)
        p = Poly.__new__(Poly)
        p.fp, p.terms, p._hash = self.fp, {ev: a * c for ev, a in self.terms.items()}, None
        return p

    def mul_monomial(self, ev) -> "Poly":
        ev = tuple(ev)
        p = Poly.__new__(Poly)
        p.fp = self.fp
        p.terms = {tuple(a + b for a, b in zip(e, ev)): c for e, c in self.terms.items()}
        p._hash = None
        return p

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.constant(self.fp, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        _, lc = self.leading()
        return self if lc.is_one() else self.scale(lc.inv())

    def exact_div(self, divisor: "Poly") -> "Poly":
        """Exact quotient self / divisor; raises ValueError when the
        division leaves a remainder."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        q = Poly.zero(self.fp)
        r = self
        ev_d, c_d = divisor.leading()
        c_d_inv = c_d.inv()
        while not r.is_zero():
            ev_r, c_r = r.leading()
            ev_t = tuple(a - b for a, b in zip(ev_r, ev_d))
            if any(x < 0 for x in ev_t):
                raise ValueError("not an exact divisor")
            t = Poly.monomial(self.fp, ev_t, c_r * c_d_inv)
            q = q + t
            r = r - t * divisor
        return q

    # p-power structure
    def frobenius(self) -> "Poly":
        p = self.fp.p
        out = Poly.__new__(Poly)
        out.fp = self.fp
        out.terms = {tuple(e * p for e in ev): c ** p for ev, c in self.terms.items()}
        out._hash = None
        return out

    def pth_root(self) -> "Poly | None":
        """Polynomial g with g^p = self, or None.  Exists iff every
        exponent is divisible by p; coefficient roots always exist."""
        p = self.fp.p
        if any(e % p for ev in self.terms for e in ev):
            return None
        out = Poly.__new__(Poly)
        out.fp = self.fp
        out.terms = {tuple(e // p for e in ev): c.pth_root() for ev, c in self.terms.items()}
        out._hash = None
        return out

    def derivative(self, i: int) -> "Poly":
        """Formal partial derivative with respect to the i-th variable."""
        out: dict[tuple[int, ...], FqElem] = {}
        p = self.fp.p
        for ev, c in self.terms.items():
            n = ev[i] % p
            if ev[i] == 0 or n == 0:
                continue
            dev = ev[:i] + (ev[i] - 1,) + ev[i + 1:]
            d = c * self.fp.fq(n)
            s = out.get(dev)
            s = d if s is None else s + d
            if s.is_zero():
                out.pop(dev, None)
            else:
                out[dev] = s
        poly = Poly.__new__(Poly)
        poly.fp, poly.terms, poly._hash = self.fp, out, None
        return poly

    # equality / hashing / display
    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.fp == other.fp and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.fp, frozenset(self.terms.items())))
        return self._hash

    def __str__(self) -> str:
        return _format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({_format_poly(self)})"


# ---------------------------------------------------------------------------
# multivariate gcd (content / primitive-part recursion over a pseudo-
# remainder sequence; coefficients live in a finite field so there is no
# growth to manage, only the degrees in the eliminated variables)

def _deg_in(f: Poly, i: int) -> int:
    return max(ev[i] for ev in f.terms)

def _coeff_in(f: Poly, i: int, d: int) -> Poly:
    """Coefficient of x_i^d, as a polynomial with x_i cleared."""
    out = {ev[:i] + (0,) + ev[i + 1:]: c for ev, c in f.terms.items() if ev[i] == d}
    p = Poly.__new__(Poly)
    p.fp, p.terms, p._hash = f.fp, out, None
    return p

def _content_primitive(f: Poly, i: int) -> tuple[Poly, Poly]:
    """Content (gcd of the x_i-coefficients) and primitive part of f."""
    cont = Poly.zero(f.fp)
    for d in sorted({ev[i] for ev in f.terms}):
        cont = poly_gcd(cont, _coeff_in(f, i, d))
        if cont.is_one():
            return cont, f
    return cont, f.exact_div(cont)

def _pseudo_rem(f: Poly, g: Poly, i: int) -> Poly:
    """Remainder of f by g viewed in x_i, scaled by powers of g's
    leading x_i-coefficient so no fractions are needed."""
    dg = _deg_in(g, i)
    lc_g = _coeff_in(g, i, dg)
    r = f
    while not r.is_zero() and _deg_in(r, i) >= dg:
        dr = _deg_in(r, i)
        lc_r = _coeff_in(r, i, dr)
        shift = [0] * f.fp.k
        shift[i] = dr - dg
        r = lc_g * r - (lc_r * g).mul_monomial(shift)
    return r

def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd of two polynomials (monic under graded-lex; the gcd of
    anything with a nonzero constant is 1)."""
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return Poly.constant(f.fp, 1)
    present = [i for i in range(f.fp.k)
               if any(ev[i] for ev in f.terms) or any(ev[i] for ev in g.terms)]
    i = present[0]
    cf, pf = _content_primitive(f, i)
    cg, pg = _content_primitive(g, i)
    cont = poly_gcd(cf, cg)
    a, b = pf, pg
    if _deg_in(a, i) < _deg_in(b, i):
        a, b = b, a
    while not b.is_zero():
        r = _pseudo_rem(a, b, i)
        if not r.is_zero():
            r = _content_primitive(r, i)[1]
        a, b = b, r
    return (cont * a).monic()


# ---------------------------------------------------------------------------
# rational functions: elements of L

class RatFunc:
    """Element of L = K(vars) in canonical form: coprime numerator and
    denominator, denominator monic under graded-lex, zero stored as 0/1.
    All arithmetic returns canonical values, so == is field equality."""

    __slots__ = ("fp", "num", "den")

    def __init__(self, fp: FieldParams, num: Poly, den: Poly):
        # trusted constructor: inputs must already be canonical
        self.fp = fp
        self.num = num
        self.den = den

    @classmethod
    def make(cls, num: Poly, den: Poly) -> "RatFunc":
        """Canonicalize an arbitrary fraction."""
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        fp = num.fp
        if num.is_zero():
            return cls(fp, Poly.zero(fp), Poly.constant(fp, 1))
        g = poly_gcd(num, den)
        if not g.is_one():
            num = num.exact_div(g)
            den = den.exact_div(g)
        _, lc = den.leading()
        if not lc.is_one():
            inv = lc.inv()
            num = num.scale(inv)
            den = den.scale(inv)
        return cls(fp, num, den)

    @classmethod
    def zero(cls, fp: FieldParams) -> "RatFunc":
        return cls(fp, Poly.zero(fp), Poly.constant(fp, 1))

    @classmethod
    def one(cls, fp: FieldParams) -> "RatFunc":
        return cls.constant(fp, 1)

    @classmethod
    def constant(cls, fp: FieldParams, c) -> "RatFunc":
        return cls(fp, Poly.constant(fp, c), Poly.constant(fp, 1))

    @classmethod
    def variable(cls, fp: FieldParams, name: str) -> "RatFunc":
        return cls(fp, Poly.variable(fp, name), Poly.constant(fp, 1))

    @classmethod
    def from_poly(cls, num: Poly) -> "RatFunc":
        return cls(num.fp, num, Poly.constant(num.fp, 1))

    # structure
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        """True iff the value lies in K."""
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self) -> FqElem:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_value()

    # arithmetic
    def _check(self, other: "RatFunc"):
        if self.fp != other.fp:
            raise ValueError("mixed field parameters")

    def __add__(self, other: "RatFunc") -> "RatFunc":
        self._check(other)
        return RatFunc.make(self.num * other.den + other.num * self.den,
                            self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        self._check(other)
        return RatFunc.make(self.num * other.den - other.num * self.den,
                            self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(self.fp, -self.num, self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        self._check(other)
        return RatFunc.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        self._check(other)
        return RatFunc.make(self.num * other.den, self.den * other.num)

    def inv(self) -> "RatFunc":
        return RatFunc.one(self.fp) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inv() ** (-n)
        result = RatFunc.one(self.fp)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # p-power structure
    def frobenius(self) -> "RatFunc":
        # the p-th power of a reduced monic-denominator fraction is
        # again reduced with monic denominator, so no recanonicalization
        return RatFunc(self.fp, self.num.frobenius(), self.den.frobenius())

    def pth_root(self) -> "RatFunc | None":
        """The p-th root inside L, or None if the value is not a p-th
        power.  A reduced fraction is a p-th power iff numerator and
        denominator both are."""
        rn = self.num.pth_root()
        if rn is None:
            return None
        rd = self.den.pth_root()
        if rd is None:
            return None
        return RatFunc(self.fp, rn, rd)

    def depth(self):
        """Number of successive p-th roots the value admits: inf for
        constants (elements of K), otherwise a finite count.  Undefined
        (an error) for zero."""
        if self.is_zero():
            raise ValueError("depth of zero is undefined")
        if self.is_constant():
            return inf
        d = 0
        cur = self
        while True:
            nxt = cur.pth_root()
            if nxt is None:
                return d
            d += 1
            cur = nxt

    # equality / hashing / display
    def __eq__(self, other) -> bool:
        return (isinstance(other, RatFunc) and self.fp == other.fp
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self) -> str:
        return format_ratfunc(self)

    def __repr__(self) -> str:
        return f"RatFunc({format_ratfunc(self)})"


# ---------------------------------------------------------------------------
# expression grammar: parsing

def _tokenize(text: str):
    toks = []
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
            toks.append(("nat", text[i:j], i + 1))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], i + 1))
            i = j
        elif ch in "^*+/":
            toks.append((ch, ch, i + 1))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", col=i + 1)
    return toks


def _parse_factor(toks, i, fp, coeff, ev):
    if i >= len(toks):
        raise ParseError("expected a factor", col=(toks[-1][2] if toks else 1))
    kind, val, col = toks[i]
    if kind == "nat":
        return i + 1, coeff * fp.fq(int(val))
    if kind != "name":
        raise ParseError(f"expected a factor, found {val!r}", col=col)
    exp = 1
    j = i + 1
    if j < len(toks) and toks[j][0] == "^":
        if j + 1 >= len(toks) or toks[j + 1][0] != "nat":
            raise ParseError("expected an exponent after '^'", col=toks[j][2])
        exp = int(toks[j + 1][1])
        j += 2
    if val in fp.vars:
        ev[fp.var_index(val)] += exp
        return j, coeff
    if val == "g" and fp.e > 1:
        return j, coeff * fp.gen() ** exp
    raise ParseError(f"unknown symbol {val!r}", col=col)


def _parse_term(toks, i, fp):
    coeff = fp.fq(1)
    ev = [0] * fp.k
    i, coeff = _parse_factor(toks, i, fp, coeff, ev)
    while i < len(toks) and toks[i][0] == "*":
        i, coeff = _parse_factor(toks, i + 1, fp, coeff, ev)
    if i < len(toks) and toks[i][0] in ("nat", "name"):
        raise ParseError("missing operator between factors", col=toks[i][2])
    return i, Poly.monomial(fp, ev, coeff)


def _parse_poly(toks, i, fp):
    acc = Poly.zero(fp)
    while True:
        i, term = _parse_term(toks, i, fp)
        acc = acc + term
        if i < len(toks) and toks[i][0] == "+":
            i += 1
            continue
        return i, acc


def parse_ratfunc(text: str, fp: FieldParams) -> RatFunc:
    """Parse an expression in the coefficient grammar into a canonical
    rational function.  Raises ParseError with a column on bad input."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression", col=1)
    i, num = _parse_poly(toks, 0, fp)
    den = Poly.constant(fp, 1)
    if i < len(toks) and toks[i][0] == "/":
        slash_col = toks[i][2]
        i, den = _parse_poly(toks, i + 1, fp)
        if den.is_zero():
            raise ParseError("zero denominator", col=slash_col)
    if i < len(toks):
        raise ParseError(f"unexpected {toks[i][1]!r}", col=toks[i][2])
    return RatFunc.make(num, den)


# ---------------------------------------------------------------------------
# expression grammar: formatting (canonical: graded-lex descending, one
# grammar term per generator power so the output re-parses exactly)

def _format_pieces(a: int, gpow: int, ev, fp: FieldParams) -> str:
    pieces = []
    if a != 1 or (gpow == 0 and not any(ev)):
        pieces.append(str(a))
    if gpow:
        pieces.append("g" if gpow == 1 else f"g^{gpow}")
    for name, k in zip(fp.vars, ev):
        if k:
            pieces.append(name if k == 1 else f"{name}^{k}")
    return "*".join(pieces)


def _format_fq(c: FqElem) -> str:
    if c.is_zero():
        return "0"
    ev = (0,) * c.fp.k
    parts = [_format_pieces(a, j, ev, c.fp)
             for j in range(len(c.coeffs) - 1, -1, -1)
             if (a := c.coeffs[j])]
    return "+".join(parts)


def _format_poly(poly: Poly) -> str:
    if poly.is_zero():
        return "0"
    parts = []
    for ev in sorted(poly.terms, key=_grlex_key, reverse=True):
        c = poly.terms[ev]
        for j in range(len(c.coeffs) - 1, -1, -1):
            if c.coeffs[j]:
                parts.append(_format_pieces(c.coeffs[j], j, ev, poly.fp))
    return "+".join(parts)


def format_ratfunc(f: RatFunc) -> str:
    num = _format_poly(f.num)
    if f.den.is_one():
        return num
    return f"{num}/{_format_poly(f.den)}"


# ---------------------------------------------------------------------------
# modulus text form ("g^2+1" style), used by equation files and trace
# documents; parsed before a FieldParams exists, so it gets its own tiny
# reader over the shared tokenizer

def parse_modulus(text: str, p: int) -> tuple[int, ...]:
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty modulus", col=1)
    coeffs: dict[int, int] = {}
    i = 0
    while True:
        coeff = 1
        exp = 0
        saw = False
        while i < len(toks) and toks[i][0] in ("nat", "name"):
            kind, val, col = toks[i]
            if kind == "nat":
                coeff = coeff * int(val) % p
                i += 1
            else:
                if val != "g":
                    raise ParseError(f"modulus may only use 'g', found {val!r}", col=col)
                e = 1
                if i + 1 < len(toks) and toks[i + 1][0] == "^":
                    if i + 2 >= len(toks) or toks[i + 2][0] != "nat":
                        raise ParseError("expected an exponent after '^'", col=toks[i + 1][2])
                    e = int(toks[i + 2][1])
                    i += 2
                exp += e
                i += 1
            saw = True
            if i < len(toks) and toks[i][0] == "*":
                i += 1
                if i >= len(toks) or toks[i][0] not in ("nat", "name"):
                    raise ParseError("expected a factor after '*'",
                                     col=toks[i - 1][2])
        if not saw:
            col = toks[i][2] if i < len(toks) else toks[-1][2]
            raise ParseError("expected a modulus term", col=col)
        coeffs[exp] = (coeffs.get(exp, 0) + coeff) % p
        if i < len(toks) and toks[i][0] == "+":
            i += 1
            continue
        break
    if i < len(toks):
        raise ParseError(f"unexpected {toks[i][1]!r} in modulus", col=toks[i][2])
    deg = max(coeffs)
    return tuple(coeffs.get(d, 0) for d in range(deg + 1))


def format_modulus(modulus: tuple[int, ...]) -> str:
    parts = []
    for j in range(len(modulus) - 1, -1, -1):
        a = modulus[j]
        if not a:
            continue
        if j == 0:
            parts.append(str(a))
        else:
            gp = "g" if j == 1 else f"g^{j}"
            parts.append(gp if a == 1 else f"{a}*{gp}")
    return "+".join(parts) if parts else "0"
