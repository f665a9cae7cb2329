"""Explicit sparse noncommutative polynomials.

Words are tuples of symbol ids: ``1..n`` for the z-alphabet, ``0``/``1`` for
the bivariate alphabet {x0, x1}. Coefficients are Python ints, reduced modulo
``modulus`` when one is attached.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import DimMismatch, Matrix

Word = tuple

ALPHABET_Z = "z"
ALPHABET_X = "x"


class ZeroPolynomial(ValueError):
    pass


class PolyFormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def at(w: Word, i: int):
    """Symbol at 1-indexed position ``i``."""
    if i < 1:
        raise IndexError(i)
    return w[i - 1]


def sym_name(alphabet: str, s: int) -> str:
    return f"z{s}" if alphabet == ALPHABET_Z else f"x{s}"


def word_str(w: Word, alphabet: str = ALPHABET_Z) -> str:
    if not w:
        return "1"
    return "".join(sym_name(alphabet, s) for s in w)


@dataclass(frozen=True)
class SparseNCPoly:
    alphabet: str
    nvars: int
    terms: Mapping = field(default_factory=dict)
    modulus: int | None = None

    def __post_init__(self):
        if self.alphabet not in (ALPHABET_Z, ALPHABET_X):
            raise ValueError(f"unknown alphabet {self.alphabet!r}")
        if self.alphabet == ALPHABET_X and self.nvars != 2:
            raise ValueError("bivariate polynomials have exactly 2 variables")
        lo, hi = (1, self.nvars) if self.alphabet == ALPHABET_Z else (0, 1)
        for w, c in self.terms.items():
            if any(not (lo <= s <= hi) for s in w):
                raise ValueError(f"word {w} uses a symbol outside {lo}..{hi}")
            if c == 0:
                raise ValueError("zero coefficient stored")

    @property
    def sparsity(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int | None:
        """Max word length; ``None`` for the zero polynomial."""
        if not self.terms:
            return None
        return max(len(w) for w in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SparseNCPoly):
            return NotImplemented
        return (self.alphabet, self.nvars, self.modulus, dict(self.terms)) == (
            other.alphabet, other.nvars, other.modulus, dict(other.terms))

    def __hash__(self):
        return hash((self.alphabet, self.nvars, self.modulus, frozenset(self.terms.items())))

    def __add__(self, other: SparseNCPoly) -> SparseNCPoly:
        self._compatible(other)
        return ncpoly_normalize(list(self.items()) + list(other.items()), self.alphabet, self.nvars, self.modulus)

    def __sub__(self, other: SparseNCPoly) -> SparseNCPoly:
        self._compatible(other)
        return ncpoly_normalize(list(self.items()) + [(-c, w) for c, w in other.items()],
                                self.alphabet, self.nvars, self.modulus)

    def __mul__(self, other: SparseNCPoly) -> SparseNCPoly:
        self._compatible(other)
        raw = [(ca * cb, wa + wb) for ca, wa in self.items() for cb, wb in other.items()]
        return ncpoly_normalize(raw, self.alphabet, self.nvars, self.modulus)

    def scale(self, c: int) -> SparseNCPoly:
        return ncpoly_normalize([(c * a, w) for a, w in self.items()], self.alphabet, self.nvars, self.modulus)

    def _compatible(self, other: SparseNCPoly):
        if (self.alphabet, self.nvars, self.modulus) != (other.alphabet, other.nvars, other.modulus):
            raise ValueError("incompatible polynomials")

    def items(self) -> Iterable[tuple[int, Word]]:
        """(coefficient, word) pairs in sorted word order."""
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            yield self.terms[w], w

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{word_str(w, self.alphabet)}" for c, w in self.items())


def ncpoly_normalize(raw: Iterable[tuple[int, Word]], alphabet: str = ALPHABET_Z, nvars: int | None = None,
                     modulus: int | None = None) -> SparseNCPoly:
    acc: dict = {}
    for c, w in raw:
        w = tuple(w)
        acc[w] = acc.get(w, 0) + int(c)
    if modulus is not None:
        acc = {w: c % modulus for w, c in acc.items()}
    terms = {w: c for w, c in acc.items() if c}
    if nvars is None:
        if alphabet == ALPHABET_X:
            nvars = 2
        else:
            nvars = max((max(w) for w in terms if w), default=1)
    return SparseNCPoly(alphabet, nvars, terms, modulus)


def encode_word(w: Word) -> Word:
    out: list = []
    for i in w:
        out.append(0)
        out.extend([1] * i)
        out.append(0)
    return tuple(out)


def encode_bivariate(f: SparseNCPoly) -> SparseNCPoly:
    """Substitute ``z_i -> x0 x1^i x0`` in every word."""
    if f.alphabet != ALPHABET_Z:
        raise ValueError("expected a polynomial over the z-alphabet")
    return SparseNCPoly(ALPHABET_X, 2, {encode_word(w): c for w, c in f.terms.items()}, f.modulus)


def encoding_injective_check(words: Iterable[Word]) -> bool:
    words = set(map(tuple, words))
    return len({encode_word(w) for w in words}) == len(words)


def ncpoly_eval(f: SparseNCPoly, assignment: Sequence[Matrix], ring=None) -> Matrix:
    """Evaluate ``f`` with ``assignment[k]`` substituted for the k-th symbol.

    For the z-alphabet ``assignment[0]`` is z1; for the bivariate alphabet
    ``assignment[b]`` is x_b. Words multiply left to right.
    """
    if not assignment:
        raise DimMismatch("empty assignment")
    dim = assignment[0].dim
    ring = ring or assignment[0].ring
    if any(m.dim != dim for m in assignment):
        raise DimMismatch("assignment matrices differ in dimension")
    need = f.nvars if f.alphabet == ALPHABET_Z else 2
    if len(assignment) < need:
        raise DimMismatch(f"need {need} matrices, got {len(assignment)}")
    offset = 1 if f.alphabet == ALPHABET_Z else 0
    total = Matrix.zeros(dim, ring)
    # memoize shared prefixes; sorted order keeps them adjacent
    cache: dict = {(): Matrix.identity(dim, ring)}
    for c, w in f.items():
        prod = cache.get(w)
        if prod is None:
            k = len(w)
            while w[:k] not in cache:
                k -= 1
            prod = cache[w[:k]]
            for s in w[k:]:
                prod = prod @ assignment[s - offset]
            cache[w] = prod
        total = total + prod.scale(ring.embed(c))
    return total


@dataclass(frozen=True)
class MaxDegreeSet:
    degree: int
    words: frozenset


def max_degree_set(f: SparseNCPoly) -> MaxDegreeSet:
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no top-degree part")
    d = f.degree
    return MaxDegreeSet(d, frozenset(w for w in f.terms if len(w) == d))


# ---------------------------------------------------------------------------
# text format

_HEADER = re.compile(r"ncpoly\s+v1\s+vars=(\d+)\s+alphabet=([zx])\s*$")
_ZSYM = re.compile(r"z(\d+)$")


def _parse_lines(text: str):
    """Header ``(nvars, alphabet)`` and the list of ``(coeff, word)`` lines."""
    header = None
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise PolyFormatError("expected header 'ncpoly v1 vars=<n> alphabet=<z|x>'", lineno)
            header = (int(m.group(1)), m.group(2))
            if header[1] == ALPHABET_X and header[0] != 2:
                raise PolyFormatError("alphabet x requires vars=2", lineno)
            continue
        toks = line.split()
        try:
            coeff = int(toks[0])
        except ValueError:
            raise PolyFormatError(f"bad coefficient {toks[0]!r}", lineno) from None
        nvars, alphabet = header
        word = []
        for tok in toks[1:]:
            if alphabet == ALPHABET_X:
                if tok not in ("x0", "x1"):
                    raise PolyFormatError(f"bad symbol {tok!r} for alphabet x", lineno)
                word.append(int(tok[1]))
            else:
                m = _ZSYM.match(tok)
                if not m or not 1 <= int(m.group(1)) <= nvars:
                    raise PolyFormatError(f"bad symbol {tok!r} for alphabet z with vars={nvars}", lineno)
                word.append(int(m.group(1)))
        raw.append((coeff, tuple(word)))
    if header is None:
        raise PolyFormatError("missing header")
    return header, raw


def parse_ncpoly(text: str, modulus: int | None = None) -> SparseNCPoly:
    (nvars, alphabet), raw = _parse_lines(text)
    return ncpoly_normalize(raw, alphabet, nvars, modulus)


def parse_words(text: str) -> tuple[str, int, list[Word]]:
    """Alphabet, nvars and distinct words of an ncpoly file; coefficients ignored."""
    (nvars, alphabet), raw = _parse_lines(text)
    return alphabet, nvars, list(dict.fromkeys(w for _, w in raw))


def format_ncpoly(f: SparseNCPoly) -> str:
    lines = [f"ncpoly v1 vars={f.nvars} alphabet={f.alphabet}"]
    for c, w in f.items():
        lines.append(" ".join([str(c)] + [sym_name(f.alphabet, s) for s in w]))
    return "\n".join(lines) + "\n"
