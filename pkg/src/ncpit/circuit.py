"""Noncommutative arithmetic circuits: text format, bounds, evaluation, expansion, generators."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .algebra import DimMismatch, Matrix, PrimeField
from .ncpoly import ALPHABET_Z, SparseNCPoly, ncpoly_normalize

VAR, CONST, ADD, MUL = "var", "const", "add", "mul"

SATURATION = 1 << 63
DEFAULT_TERM_CAP = 10**6
DEFAULT_DEGREE_CAP = 10**5


class CircuitError(ValueError):
    pass


class CircuitSyntaxError(CircuitError):
    def __init__(self, msg: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {msg}")


class CycleError(CircuitError):
    pass


class BadReference(CircuitError):
    pass


class CapExceeded(RuntimeError):
    def __init__(self, gate: int, what: str):
        self.gate = gate
        super().__init__(f"gate {gate}: {what}")


class BoxDimRefused(RuntimeError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    a: int = 0
    b: int = 0


@dataclass(frozen=True)
class Circuit:
    nvars: int
    gates: tuple
    output: int

    def __post_init__(self):
        if self.nvars < 0:
            raise CircuitError("nvars must be >= 0")
        if not self.gates:
            raise CircuitError("empty circuit")
        for k, g in enumerate(self.gates):
            if g.kind == VAR:
                if not 1 <= g.a <= self.nvars:
                    raise BadReference(f"gate {k}: variable z{g.a} outside 1..{self.nvars}")
            elif g.kind in (ADD, MUL):
                for x in (g.a, g.b):
                    if not 0 <= x < k:
                        raise BadReference(f"gate {k} references gate {x}")
            elif g.kind != CONST:
                raise CircuitError(f"unknown gate kind {g.kind!r}")
        if not 0 <= self.output < len(self.gates):
            raise BadReference(f"output gate {self.output} does not exist")

    @property
    def size(self) -> int:
        return len(self.gates)

    @cached_property
    def tape(self) -> kernels.Tape:
        n = len(self.gates)
        ops = np.empty(n, dtype=np.int8)
        lhs = np.zeros(n, dtype=np.int64)
        rhs = np.zeros(n, dtype=np.int64)
        consts = []
        code = {VAR: kernels.OP_VAR, CONST: kernels.OP_CONST, ADD: kernels.OP_ADD, MUL: kernels.OP_MUL}
        for k, g in enumerate(self.gates):
            ops[k] = code[g.kind]
            if g.kind == VAR:
                lhs[k] = g.a - 1
            elif g.kind == CONST:
                lhs[k] = len(consts)
                consts.append(g.a)
            else:
                lhs[k], rhs[k] = g.a, g.b
        return kernels.Tape(ops, lhs, rhs, tuple(consts), self.output, self.nvars)


class CircuitBuilder:
    """Appends gates in topological order; var and const gates are shared."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.gates: list[Gate] = []
        self._leaves: dict = {}

    def _push(self, g: Gate) -> int:
        self.gates.append(g)
        return len(self.gates) - 1

    def var(self, i: int) -> int:
        if not 1 <= i <= self.nvars:
            raise BadReference(f"variable z{i} outside 1..{self.nvars}")
        key = (VAR, i)
        if key not in self._leaves:
            self._leaves[key] = self._push(Gate(VAR, i))
        return self._leaves[key]

    def const(self, c: int) -> int:
        key = (CONST, c)
        if key not in self._leaves:
            self._leaves[key] = self._push(Gate(CONST, c))
        return self._leaves[key]

    def add(self, a: int, b: int) -> int:
        return self._push(Gate(ADD, a, b))

    def mul(self, a: int, b: int) -> int:
        return self._push(Gate(MUL, a, b))

    def sum(self, items: Sequence[int]) -> int:
        items = list(items)
        acc = items[0]
        for g in items[1:]:
            acc = self.add(acc, g)
        return acc

    def build(self, output: int) -> Circuit:
        return Circuit(self.nvars, tuple(self.gates), output)


# ---------------------------------------------------------------------------
# text format

_HEADER = re.compile(r"ncircuit\s+v1\s+vars=(\d+)$")
_GATE = re.compile(r"(g\d+)\s*=\s*(\S+)(.*)$")
_OUTPUT = re.compile(r"output\s+(g\d+)$")


def parse_circuit(text: str) -> Circuit:
    nvars = None
    defs: list[tuple[int, str, str, list[str]]] = []
    names: dict[str, int] = {}
    output = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if nvars is None:
            m = _HEADER.match(line)
            if not m:
                raise CircuitSyntaxError("expected header 'ncircuit v1 vars=<n>'", lineno)
            nvars = int(m.group(1))
            continue
        m = _OUTPUT.match(line)
        if m:
            if output is not None:
                raise CircuitSyntaxError("duplicate output line", lineno)
            output = (m.group(1), lineno)
            continue
        m = _GATE.match(line)
        if not m:
            raise CircuitSyntaxError(f"cannot parse {line!r}", lineno)
        name, op, rest = m.group(1), m.group(2), m.group(3).split()
        if name in names:
            raise CircuitSyntaxError(f"gate {name} defined twice", lineno)
        arity = {"var": 1, "const": 1, "add": 2, "mul": 2}.get(op)
        if arity is None:
            raise CircuitSyntaxError(f"unknown operation {op!r}", lineno)
        if len(rest) != arity:
            raise CircuitSyntaxError(f"{op} takes {arity} operand(s), got {len(rest)}", lineno)
        names[name] = len(defs)
        defs.append((lineno, name, op, rest))
    if nvars is None:
        raise CircuitSyntaxError("missing header", 1)
    if output is None:
        raise BadReference("missing output line")

    # operands must name gates declared earlier; a forward reference is a
    # cycle if it closes one, else a plain ordering violation
    edges: dict[int, list[int]] = {}
    for k, (lineno, name, op, rest) in enumerate(defs):
        if op in ("add", "mul"):
            for tok in rest:
                if tok not in names:
                    raise BadReference(f"line {lineno}: gate {name} references undeclared {tok}")
                edges.setdefault(k, []).append(names[tok])
    _check_acyclic(edges, defs)
    for k, (lineno, name, op, rest) in enumerate(defs):
        for tok in rest if op in ("add", "mul") else ():
            if names[tok] >= k:
                raise BadReference(f"line {lineno}: gate {name} uses {tok} before its declaration")

    gates = []
    for lineno, name, op, rest in defs:
        if op == "var":
            m = re.fullmatch(r"z(\d+)", rest[0])
            if not m:
                raise CircuitSyntaxError(f"bad variable {rest[0]!r}", lineno)
            i = int(m.group(1))
            if not 1 <= i <= nvars:
                raise BadReference(f"line {lineno}: z{i} outside 1..{nvars}")
            gates.append(Gate(VAR, i))
        elif op == "const":
            try:
                gates.append(Gate(CONST, int(rest[0])))
            except ValueError:
                raise CircuitSyntaxError(f"bad constant {rest[0]!r}", lineno) from None
        else:
            gates.append(Gate(ADD if op == "add" else MUL, names[rest[0]], names[rest[1]]))
    out_name, out_line = output
    if out_name not in names:
        raise BadReference(f"line {out_line}: output {out_name} is not a gate")
    return Circuit(nvars, tuple(gates), names[out_name])


def _check_acyclic(edges: dict[int, list[int]], defs) -> None:
    state: dict[int, int] = {}
    for root in edges:
        if state.get(root):
            continue
        stack = [(root, iter(edges.get(root, ())))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise CycleError(f"cycle through gate {defs[nxt][1]}")
            elif not state.get(nxt):
                state[nxt] = 1
                stack.append((nxt, iter(edges.get(nxt, ()))))


def format_circuit(c: Circuit) -> str:
    lines = [f"ncircuit v1 vars={c.nvars}"]
    for k, g in enumerate(c.gates):
        if g.kind == VAR:
            lines.append(f"g{k} = var z{g.a}")
        elif g.kind == CONST:
            lines.append(f"g{k} = const {g.a}")
        else:
            lines.append(f"g{k} = {g.kind} g{g.a} g{g.b}")
    lines.append(f"output g{c.output}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class Bound:
    """Nonnegative integer bound; ``value is None`` means it exceeded 2**63."""

    value: int | None

    @classmethod
    def of(cls, v: int | None) -> Bound:
        return cls(None if v is None or v > SATURATION else v)

    @property
    def huge(self) -> bool:
        return self.value is None

    def __str__(self):
        return "huge" if self.value is None else str(self.value)


def _sat(v: int | None) -> int | None:
    return None if v is None or v > SATURATION else v


def gate_degrees(c: Circuit) -> list[int | None]:
    deg: list[int | None] = []
    for g in c.gates:
        if g.kind == VAR:
            deg.append(1)
        elif g.kind == CONST:
            deg.append(0)
        else:
            a, b = deg[g.a], deg[g.b]
            if a is None or b is None:
                deg.append(None)
            else:
                deg.append(_sat(max(a, b) if g.kind == ADD else a + b))
    return deg


def syntactic_degree_bound(c: Circuit) -> Bound:
    return Bound.of(gate_degrees(c)[c.output])


def sparsity_log2_bound(c: Circuit) -> Bound:
    """log2 of a bound on the output's monomial count.

    var/const give 0; add gives ceil(log2(2^a + 2^b)) = max(a, b) + 1;
    mul gives a + b.
    """
    lg: list[int | None] = []
    for g in c.gates:
        if g.kind in (VAR, CONST):
            lg.append(0)
        else:
            a, b = lg[g.a], lg[g.b]
            if a is None or b is None:
                lg.append(None)
            else:
                lg.append(_sat(max(a, b) + 1 if g.kind == ADD else a + b))
    return Bound.of(lg[c.output])


# ---------------------------------------------------------------------------
# evaluation


def circuit_eval(c: Circuit, matrices: Sequence[Matrix], ring=None) -> Matrix:
    """Gate-by-gate evaluation over any ring; constants become scalar identities."""
    if len(matrices) != c.nvars:
        raise DimMismatch(f"expected {c.nvars} matrices, got {len(matrices)}")
    if not matrices and ring is None:
        raise DimMismatch("ring and dimension unknown for a variable-free circuit")
    dim = matrices[0].dim if matrices else 1
    ring = ring or matrices[0].ring
    if any(m.dim != dim for m in matrices):
        raise DimMismatch("matrices differ in dimension")
    vals: list[Matrix] = []
    for g in c.gates:
        if g.kind == VAR:
            vals.append(matrices[g.a - 1])
        elif g.kind == CONST:
            vals.append(Matrix.scalar(g.a, dim, ring))
        elif g.kind == ADD:
            vals.append(vals[g.a] + vals[g.b])
        else:
            vals.append(vals[g.a] @ vals[g.b])
    return vals[c.output]


class BlackBox:
    """Evaluation oracle: per-variable dim x dim matrices over Z/p in, matrix out.

    ``max_dim`` / ``max_modulus`` advertise capability limits; ``None`` means
    unlimited.
    """

    nvars: int
    max_dim: int | None = None
    max_modulus: int | None = None

    def evaluate(self, matrices: Sequence, modulus: int, dim: int | None = None) -> np.ndarray:
        raise NotImplementedError

    def check_capability(self, dim: int, modulus: int) -> None:
        if self.max_dim is not None and dim > self.max_dim:
            raise BoxDimRefused(f"black box refuses dimension {dim} (max {self.max_dim})")
        if self.max_modulus is not None and modulus > self.max_modulus:
            raise BoxDimRefused(f"black box refuses modulus of {modulus.bit_length()} bits")


class CircuitBlackBox(BlackBox):
    def __init__(self, circuit: Circuit, max_dim: int | None = None, backend: str | None = None):
        self.circuit = circuit
        self.nvars = circuit.nvars
        self.max_dim = max_dim
        self.backend = backend
        self.calls = 0

    def evaluate(self, matrices: Sequence, modulus: int, dim: int | None = None) -> np.ndarray:
        if len(matrices):
            dim = np.shape(matrices[0])[0]
        elif dim is None:
            raise ValueError("dim is required for a circuit without variables")
        self.check_capability(dim, modulus)
        self.calls += 1
        return kernels.eval_tape(self.circuit.tape, matrices, modulus, dim=dim, backend=self.backend)


class PolyBlackBox(BlackBox):
    """Black box backed by an explicit polynomial (for tests and external use)."""

    def __init__(self, f: SparseNCPoly, max_dim: int | None = None):
        if f.alphabet != ALPHABET_Z:
            raise ValueError("expected a z-alphabet polynomial")
        self.f = f
        self.nvars = f.nvars
        self.max_dim = max_dim

    def evaluate(self, matrices: Sequence, modulus: int, dim: int | None = None) -> np.ndarray:
        if len(matrices):
            dim = np.shape(matrices[0])[0]
        elif dim is None:
            raise ValueError("dim is required for a polynomial without variables")
        self.check_capability(dim, modulus)
        mats = [np.array(m, dtype=object) % modulus for m in matrices]
        total = np.zeros((dim, dim), dtype=object)
        eye = np.identity(dim, dtype=object)
        for w, c in self.f.terms.items():
            prod = eye
            for s in w:
                prod = (prod @ mats[s - 1]) % modulus
            total = (total + c * prod) % modulus
        return total


# ---------------------------------------------------------------------------
# brute-force expansion


def expand_to_sparse(c: Circuit, term_cap: int = DEFAULT_TERM_CAP, modulus: int | None = None,
                     degree_cap: int = DEFAULT_DEGREE_CAP) -> SparseNCPoly:
    """Exact polynomial of the output gate.

    Raises :class:`CapExceeded` as soon as a gate needed by the output has more
    than ``term_cap`` terms or syntactic degree above ``degree_cap``.
    """
    deg = gate_degrees(c)
    needed = _cone(c)
    vals: dict[int, SparseNCPoly] = {}
    n = c.nvars

    def poly(raw):
        return ncpoly_normalize(raw, ALPHABET_Z, n, modulus)

    for k, g in enumerate(c.gates):
        if k not in needed:
            continue
        if deg[k] is None or deg[k] > degree_cap:
            raise CapExceeded(k, f"syntactic degree {deg[k] if deg[k] is not None else 'huge'} over cap {degree_cap}")
        if g.kind == VAR:
            p = poly([(1, (g.a,))])
        elif g.kind == CONST:
            p = poly([(g.a, ())])
        elif g.kind == ADD:
            p = vals[g.a] + vals[g.b]
        else:
            a, b = vals[g.a], vals[g.b]
            # the raw product list is materialized before merging
            if len(a.terms) * len(b.terms) > 4 * term_cap:
                raise CapExceeded(k, f"product of {len(a.terms)} and {len(b.terms)} terms over cap {term_cap}")
            p = a * b
        if len(p.terms) > term_cap:
            raise CapExceeded(k, f"{len(p.terms)} terms over cap {term_cap}")
        vals[k] = p
    return vals[c.output]


def _cone(c: Circuit) -> set[int]:
    seen = {c.output}
    stack = [c.output]
    while stack:
        g = c.gates[stack.pop()]
        if g.kind in (ADD, MUL):
            for x in (g.a, g.b):
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
    return seen


# ---------------------------------------------------------------------------
# generators


def circuit_from_poly(f: SparseNCPoly) -> Circuit:
    """Sum-of-products circuit computing ``f`` (zero polynomial -> const 0)."""
    b = CircuitBuilder(f.nvars)
    summands = []
    for coeff, w in f.items():
        if not w:
            summands.append(b.const(coeff))
            continue
        g = b.var(w[0])
        for s in w[1:]:
            g = b.mul(g, b.var(s))
        summands.append(b.mul(b.const(coeff), g))
    if not summands:
        return b.build(b.const(0))
    return b.build(b.sum(summands))


def gen_random_instance(n: int, degree: int, terms: int, seed: int,
                        field: PrimeField) -> tuple[Circuit, SparseNCPoly]:
    """Random ``terms``-sparse polynomial (word lengths 1..degree) and a circuit for it."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if n < 1 or degree < 1:
        raise ValueError("need n >= 1 and degree >= 1")
    capacity = sum(n**k for k in range(1, degree + 1))
    if terms > capacity:
        raise ValueError(f"only {capacity} words of length 1..{degree} over {n} variables")
    rng = random.Random(seed)
    words: set = set()
    while len(words) < terms:
        length = rng.randint(1, degree)
        words.add(tuple(rng.randint(1, n) for _ in range(length)))
    raw = [(field.sample_int(rng, nonzero=True), w) for w in sorted(words)]
    f = ncpoly_normalize(raw, ALPHABET_Z, n, field.modulus)
    return circuit_from_poly(f), f


def _random_subcircuit(b: CircuitBuilder, rng: random.Random, n: int, budget: int) -> int:
    pool = [b.var(rng.randint(1, n)) for _ in range(max(2, budget + 1))]
    if rng.random() < 0.3:
        pool.append(b.const(rng.choice([-2, -1, 2, 3])))
    while len(pool) > 1:
        x = pool.pop(rng.randrange(len(pool)))
        y = pool.pop(rng.randrange(len(pool)))
        pool.append(b.mul(x, y) if rng.random() < 0.5 else b.add(x, y))
    return pool[0]


def _copy_subdag(src: Circuit | CircuitBuilder, b: CircuitBuilder, root: int) -> int:
    gates = src.gates
    memo: dict[int, int] = {}
    order = sorted(_cone(Circuit(b.nvars, tuple(gates[: root + 1]), root)))
    for k in order:
        g = gates[k]
        if g.kind == VAR:
            memo[k] = b.var(g.a)
        elif g.kind == CONST:
            memo[k] = b.const(g.a)
        elif g.kind == ADD:
            memo[k] = b.add(memo[g.a], memo[g.b])
        else:
            memo[k] = b.mul(memo[g.a], memo[g.b])
    return memo[root]


def _random_plus_tree(b: CircuitBuilder, rng: random.Random, items: list[int]) -> int:
    pool = list(items)
    while len(pool) > 1:
        x = pool.pop(rng.randrange(len(pool)))
        y = pool.pop(rng.randrange(len(pool)))
        pool.append(b.add(x, y))
    return pool[0]


def gen_zero_circuit(n: int, size_hint: int, seed: int, verify_cap: int = 10**4) -> Circuit:
    """Circuit for ``g + (-1) g'`` where ``g'`` re-associates a fresh copy of ``g``'s plus-tree.

    The size stays within ``size_hint`` unless even the smallest shape exceeds it.
    """
    n = max(1, n)
    m = max(2, min(6, size_hint // 10))
    per = max(1, (size_hint - 2 * m - 4 - n) // (2 * m))
    while True:
        c = _zero_circuit_shape(n, m, per, random.Random(seed))
        if c.size <= size_hint or per == 1:
            break
        per -= 1
    try:
        expanded = expand_to_sparse(c, term_cap=verify_cap, degree_cap=256)
    except CapExceeded:
        return c
    if not expanded.is_zero():  # pragma: no cover
        raise AssertionError("generated zero circuit does not expand to zero")
    return c


def _zero_circuit_shape(n: int, m: int, per: int, rng: random.Random) -> Circuit:
    b = CircuitBuilder(n)
    roots = [_random_subcircuit(b, rng, n, per) for _ in range(m)]
    g = _random_plus_tree(b, rng, roots)
    copies = [_copy_subdag(b, b, r) for r in roots]
    rng.shuffle(copies)
    g2 = _random_plus_tree(b, rng, copies)
    return b.build(b.add(g, b.mul(b.const(-1), g2)))


def power_sum_circuit(log2_exponent: int, n: int = 2) -> Circuit:
    """``z1^(2^e) + ... + zn^(2^e)`` by repeated squaring."""
    b = CircuitBuilder(n)
    tops = []
    for i in range(1, n + 1):
        g = b.var(i)
        for _ in range(log2_exponent):
            g = b.mul(g, g)
        tops.append(g)
    return b.build(b.sum(tops))


def binomial_power_circuit(s: int) -> Circuit:
    """``(z1 + z2)^(2^s)``: O(s) gates, 2^(2^s) monomials."""
    b = CircuitBuilder(2)
    g = b.add(b.var(1), b.var(2))
    for _ in range(s):
        g = b.mul(g, g)
    return b.build(g)


def commutator_circuit() -> Circuit:
    """``z1 z2 - z2 z1``."""
    b = CircuitBuilder(2)
    z1, z2 = b.var(1), b.var(2)
    return b.build(b.add(b.mul(z1, z2), b.mul(b.const(-1), b.mul(z2, z1))))


def difference_circuit(c: Circuit) -> Circuit:
    """``g - g`` with ``g`` the output of ``c`` and its subcircuit duplicated."""
    b = CircuitBuilder(c.nvars)
    g = _copy_subdag(c, b, c.output)
    g2 = _copy_subdag(c, b, c.output)
    return b.build(b.add(g, b.mul(b.const(-1), g2)))
