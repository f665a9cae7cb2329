"""Prime fields, exact commutative polynomials and small dense matrices.

Everything here is immutable. Matrices are generic over a ring object that
exposes ``zero()``, ``one()``, ``embed(int)`` and ``is_zero(x)``; three rings
ship with the module: :data:`ZZ`, :class:`PrimeField` and :data:`CPOLY`.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2

# 40 Miller-Rabin rounds: error < 4^-40 = 2^-80 for composites.
MR_ROUNDS = 40


class NotPrime(ValueError):
    pass


class DimMismatch(ValueError):
    pass


def is_probable_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n, MR_ROUNDS))


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    return int(gmpy2.next_prime(max(n, 1)))


# ---------------------------------------------------------------------------
# Rings


class IntegerRing:
    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def embed(self, c: int) -> int:
        return int(c)

    def is_zero(self, x) -> bool:
        return x == 0

    def __repr__(self):
        return "ZZ"


ZZ = IntegerRing()


class PrimeField:
    """The field of integers modulo a prime."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int):
        modulus = int(modulus)
        if modulus < 2:
            raise NotPrime(f"modulus must be >= 2, got {modulus}")
        if not is_probable_prime(modulus):
            raise NotPrime(f"{modulus} is not prime")
        self.modulus = modulus

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("PrimeField", self.modulus))

    def __repr__(self):
        return f"PrimeField({self.modulus})"

    def __call__(self, value: int) -> FieldElem:
        return FieldElem(int(value) % self.modulus, self)

    def zero(self) -> FieldElem:
        return FieldElem(0, self)

    def one(self) -> FieldElem:
        return FieldElem(1 % self.modulus, self)

    def embed(self, c: int) -> FieldElem:
        return self(c)

    def is_zero(self, x: FieldElem) -> bool:
        return x.value == 0

    def sample(self, rng: random.Random, nonzero: bool = False) -> FieldElem:
        return FieldElem(self.sample_int(rng, nonzero), self)

    def sample_int(self, rng: random.Random, nonzero: bool = False) -> int:
        if nonzero:
            return 1 + rng.randrange(self.modulus - 1)
        return rng.randrange(self.modulus)


def field_create(modulus: int) -> PrimeField:
    return PrimeField(modulus)


def field_sample(field: PrimeField, rng: random.Random, nonzero: bool = False) -> FieldElem:
    return field.sample(rng, nonzero)


class FieldElem:
    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        self.value = value
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field.modulus != self.field.modulus:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((self.value + o) % self.field.modulus, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((self.value - o) % self.field.modulus, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((o - self.value) % self.field.modulus, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.value * o % self.field.modulus, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value % self.field.modulus, self.field)

    def __pow__(self, e: int):
        return FieldElem(pow(self.value, e, self.field.modulus), self.field)

    def inverse(self) -> FieldElem:
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElem(pow(self.value, -1, self.field.modulus), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field.modulus == other.field.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.modulus))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.modulus})"


# ---------------------------------------------------------------------------
# Commutative polynomials with exact integer coefficients

# A monomial is a tuple of (variable id, exponent) pairs sorted by id; () is 1.
CommMonomial = tuple


def monomial(exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> CommMonomial:
    items = exponents.items() if isinstance(exponents, Mapping) else exponents
    acc: dict[int, int] = {}
    for v, e in items:
        if e < 0:
            raise ValueError("negative exponent")
        if e:
            acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


def monomial_mul(a: CommMonomial, b: CommMonomial) -> CommMonomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def monomial_degree(m: CommMonomial) -> int:
    return sum(e for _, e in m)


class CommPoly:
    """Sparse commutative polynomial over ZZ in integer-indexed variables."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[CommMonomial, int] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, c: int) -> CommPoly:
        return cls({(): int(c)})

    @classmethod
    def var(cls, vid: int, exp: int = 1) -> CommPoly:
        return cls({monomial({vid: exp}): 1})

    @classmethod
    def _raw(cls, terms: dict) -> CommPoly:
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, m: CommMonomial) -> int:
        return self.terms.get(m, 0)

    def degree(self) -> int | None:
        if not self.terms:
            return None
        return max(monomial_degree(m) for m in self.terms)

    def variables(self) -> set[int]:
        return {v for m in self.terms for v, _ in m}

    def __len__(self):
        return len(self.terms)

    def _lift(self, other) -> CommPoly:
        if isinstance(other, CommPoly):
            return other
        if isinstance(other, int):
            return CommPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return CommPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return CommPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = monomial_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                else:
                    del out[m]
        return CommPoly._raw(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = CommPoly.const(other)
        if not isinstance(other, CommPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def to_text(self, names: Callable[[int], str] | None = None) -> str:
        """Render as ``c * v1^e1 v2^e2 + ...`` with terms in lexicographic monomial order."""
        if not self.terms:
            return "0"
        name = names or (lambda v: f"v{v}")
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            if not m:
                parts.append(str(c))
                continue
            mono = " ".join(name(v) if e == 1 else f"{name(v)}^{e}" for v, e in m)
            parts.append(f"{c} * {mono}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"CommPoly({self.to_text()!r})"

    @classmethod
    def from_text(cls, text: str, names: Mapping[str, int] | None = None) -> CommPoly:
        """Inverse of :meth:`to_text`. Without ``names``, variables are ``v<id>``."""
        text = text.strip()
        if text == "0":
            return cls()
        out: dict = {}
        for part in text.split(" + "):
            part = part.strip()
            if " * " in part:
                c_str, mono_str = part.split(" * ", 1)
            else:
                c_str, mono_str = part, ""
            c = int(c_str)
            exps: dict[int, int] = {}
            for tok in mono_str.split():
                base, _, e = tok.partition("^")
                if names is not None:
                    if base not in names:
                        raise ValueError(f"unknown variable {base!r}")
                    vid = names[base]
                else:
                    mt = re.fullmatch(r"v(\d+)", base)
                    if not mt:
                        raise ValueError(f"bad variable token {tok!r}")
                    vid = int(mt.group(1))
                exps[vid] = exps.get(vid, 0) + (int(e) if e else 1)
            m = monomial(exps)
            out[m] = out.get(m, 0) + c
        return cls(out)


def cpoly_op(a: CommPoly, b: CommPoly, kind: str) -> CommPoly:
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown op {kind!r}")


def cpoly_coeff(p: CommPoly, m: CommMonomial) -> int:
    return p.coeff(m)


class CommPolyRing:
    def zero(self) -> CommPoly:
        return CommPoly()

    def one(self) -> CommPoly:
        return CommPoly.const(1)

    def embed(self, c: int) -> CommPoly:
        return CommPoly.const(c)

    def is_zero(self, x: CommPoly) -> bool:
        return x.is_zero()

    def __repr__(self):
        return "CPOLY"


CPOLY = CommPolyRing()


# ---------------------------------------------------------------------------
# Dense square matrices over a ring


@dataclass(frozen=True, eq=False)
class Matrix:
    rows: tuple
    ring: object

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring) -> Matrix:
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimMismatch("matrix must be square and non-empty")
        return cls(rows, ring)

    @classmethod
    def from_ints(cls, rows: Sequence[Sequence[int]], ring) -> Matrix:
        return cls.from_rows([[ring.embed(x) for x in r] for r in rows], ring)

    @classmethod
    def identity(cls, dim: int, ring) -> Matrix:
        z, o = ring.zero(), ring.one()
        return cls(tuple(tuple(o if i == j else z for j in range(dim)) for i in range(dim)), ring)

    @classmethod
    def zeros(cls, dim: int, ring) -> Matrix:
        z = ring.zero()
        return cls(tuple((z,) * dim for _ in range(dim)), ring)

    @classmethod
    def scalar(cls, c: int, dim: int, ring) -> Matrix:
        z, s = ring.zero(), ring.embed(c)
        return cls(tuple(tuple(s if i == j else z for j in range(dim)) for i in range(dim)), ring)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: Matrix):
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix")
        if other.dim != self.dim:
            raise DimMismatch(f"dimension {self.dim} vs {other.dim}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)), self.ring)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)), self.ring)

    def scale(self, c) -> Matrix:
        c = self.ring.embed(c) if isinstance(c, int) else c
        return Matrix(tuple(tuple(c * a for a in r) for r in self.rows), self.ring)

    def __matmul__(self, other: Matrix) -> Matrix:
        return mat_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, Matrix) or other.dim != self.dim:
            return NotImplemented
        return all(a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(a) for r in self.rows for a in r)

    def is_upper_triangular(self) -> bool:
        return all(self.ring.is_zero(self.rows[i][j]) for i in range(self.dim) for j in range(i))

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.rows]!r})"


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Product ``a @ b``; left factors stay on the left in every entry product."""
    a._check(b)
    n = a.dim
    zero = a.ring.zero()
    cols = list(zip(*b.rows))
    out = []
    for i in range(n):
        row_a = a.rows[i]
        row = []
        for j in range(n):
            col = cols[j]
            acc = zero
            for k in range(n):
                x = row_a[k]
                y = col[k]
                if a.ring.is_zero(x) or a.ring.is_zero(y):
                    continue
                acc = acc + x * y
            row.append(acc)
        out.append(tuple(row))
    return Matrix(tuple(out), a.ring)


def mat_pow(a: Matrix, e: int) -> Matrix:
    if e < 0:
        raise ValueError("negative exponent")
    result = Matrix.identity(a.dim, a.ring)
    base = a
    while e:
        if e & 1:
            result = mat_mul(result, base)
        e >>= 1
        if e:
            base = mat_mul(base, base)
    return result
