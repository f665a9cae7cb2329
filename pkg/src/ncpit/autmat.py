"""Transition matrices of the substitution automaton.

States q_0..q_K. Reading x_b in state q_j either stays (emitting the block
variable xi_{j+1}) or, for j < K, advances to q_{j+1} (emitting the index
variable y_{b,j+1}). The matrices are upper-bidiagonal: xi on the diagonal,
y_{b,.} on the superdiagonal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .algebra import CPOLY, CommMonomial, CommPoly, Matrix, PrimeField, mat_pow, monomial
from .ncpoly import ALPHABET_X, SparseNCPoly, Word


def xi_id(j: int) -> int:
    """Variable id of the block variable xi_j (j >= 1)."""
    return 3 * j


def y_id(b: int, j: int) -> int:
    """Variable id of the index variable y_{b,j} (b in {0,1}, j >= 1)."""
    return 3 * j + 1 + b


def var_name(vid: int) -> str:
    j, r = divmod(vid, 3)
    return f"xi{j}" if r == 0 else f"y{r - 1}_{j}"


def name_table(K: int) -> dict[str, int]:
    table = {var_name(xi_id(j)): xi_id(j) for j in range(1, K + 2)}
    for j in range(1, K + 1):
        for b in (0, 1):
            table[var_name(y_id(b, j))] = y_id(b, j)
    return table


@dataclass(frozen=True)
class SubstitutionAssignment:
    K: int
    xi: tuple  # xi_1..xi_{K+1}
    y: tuple  # (y_{0,1..K}, y_{1,1..K})

    def __post_init__(self):
        if len(self.xi) != self.K + 1 or len(self.y) != 2 or any(len(r) != self.K for r in self.y):
            raise ValueError("need K+1 block values and 2K index values")

    def values(self) -> list:
        return list(self.xi) + list(self.y[0]) + list(self.y[1])


@dataclass(frozen=True)
class SubstitutionMatrices:
    mx0: Matrix
    mx1: Matrix

    @property
    def dim(self) -> int:
        return self.mx0.dim

    def pair(self) -> list[Matrix]:
        return [self.mx0, self.mx1]


def build_substitution_matrices(assignment: SubstitutionAssignment, ring) -> SubstitutionMatrices:
    K = assignment.K
    zero = ring.zero()
    mats = []
    for b in (0, 1):
        rows = []
        for i in range(K + 1):
            row = [zero] * (K + 1)
            row[i] = assignment.xi[i]
            if i < K:
                row[i + 1] = assignment.y[b][i]
            rows.append(row)
        mats.append(Matrix.from_rows(rows, ring))
    return SubstitutionMatrices(*mats)


def random_assignment(K: int, field: PrimeField, rng: random.Random) -> SubstitutionAssignment:
    """Uniform values drawn in the order xi_1..xi_{K+1}, y_{0,1..K}, y_{1,1..K}."""
    xi = tuple(field.sample(rng) for _ in range(K + 1))
    y0 = tuple(field.sample(rng) for _ in range(K))
    y1 = tuple(field.sample(rng) for _ in range(K))
    return SubstitutionAssignment(K, xi, (y0, y1))


def symbolic_assignment(K: int) -> SubstitutionAssignment:
    xi = tuple(CommPoly.var(xi_id(j)) for j in range(1, K + 2))
    y = tuple(tuple(CommPoly.var(y_id(b, j)) for j in range(1, K + 1)) for b in (0, 1))
    return SubstitutionAssignment(K, xi, y)


def symbolic_matrices(K: int) -> SubstitutionMatrices:
    return build_substitution_matrices(symbolic_assignment(K), CPOLY)


def encoded_variable_matrices(sm: SubstitutionMatrices, n: int) -> list[Matrix]:
    """``N_i = Mx0 Mx1^i Mx0`` for i = 1..n, the image of ``z_i -> x0 x1^i x0``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [sm.mx0 @ mat_pow(sm.mx1, i) @ sm.mx0 for i in range(1, n + 1)]


# ---------------------------------------------------------------------------
# direct path enumeration (independent of matrix products)


def path_monomial(word: Word, J: Sequence[int]) -> CommMonomial:
    """Monomial emitted along the run that advances exactly at positions ``J``.

    ``J`` is a strictly increasing tuple of 1-indexed positions.
    """
    exps: dict[int, int] = {}
    block = 1
    steps = set(J)
    for pos, b in enumerate(word, 1):
        if pos in steps:
            v = y_id(b, block)
            block += 1
        else:
            v = xi_id(block)
        exps[v] = exps.get(v, 0) + 1
    return monomial(exps)


def isolated_monomial(word: Word, index_set: Sequence[int]) -> CommMonomial:
    """The block part times the projection of ``word`` onto ``index_set``.

    Block exponents count the positions strictly between consecutive indices:
    ``i_1 - 1, i_2 - i_1 - 1, ..., D - i_k``.
    """
    D = len(word)
    idx = sorted(index_set)
    exps: dict[int, int] = {}
    prev = 0
    for j, i in enumerate(idx, 1):
        exps[xi_id(j)] = i - prev - 1
        exps[y_id(word[i - 1], j)] = exps.get(y_id(word[i - 1], j), 0) + 1
        prev = i
    exps[xi_id(len(idx) + 1)] = D - prev
    return monomial(exps)


def path_enumeration_entry(f: SparseNCPoly, K: int, j: int | None = None) -> CommPoly:
    """``(q_0, q_j)`` entry of ``f(Mx0, Mx1)`` by summing over automaton runs.

    ``f`` must be bivariate; ``j`` defaults to ``K``. Exponential in word length.
    """
    if f.alphabet != ALPHABET_X:
        raise ValueError("expected a bivariate polynomial")
    j = K if j is None else j
    if not 0 <= j <= K:
        raise ValueError("target state out of range")
    acc: dict = {}
    for w, c in f.terms.items():
        for J in combinations(range(1, len(w) + 1), j):
            m = path_monomial(w, J)
            acc[m] = acc.get(m, 0) + c
    return CommPoly(acc)
