"""Randomized identity tests and the exact symbolic check behind them.

The main tester sweeps K = 0..K_max. Each trial draws random values for the
automaton variables, feeds ``N_i = Mx0 Mx1^i Mx0`` to the black box at
dimension K+1 and declares Nonzero on any nonzero output entry. Soundness is
unconditional: a zero polynomial evaluates to the zero matrix.

Per-trial seeds are ``blake2b(f"{master}:{K}:{trial}")`` truncated to 64 bits,
so a trial's outcome depends only on (master seed, K, trial index).
"""

from __future__ import annotations

import hashlib
import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import CPOLY, CommMonomial, CommPoly, Matrix, PrimeField, next_prime
from .autmat import (build_substitution_matrices, encoded_variable_matrices, isolated_monomial,
                     random_assignment, symbolic_matrices)
from .circuit import BlackBox, Circuit, sparsity_log2_bound, syntactic_degree_bound
from .isolate import isolating_index_set
from .ncpoly import ALPHABET_Z, SparseNCPoly, Word, encode_bivariate, max_degree_set, ncpoly_eval

ZERO, NONZERO = "Zero", "Nonzero"

MIN_AUTO_MODULUS = 1 << 61
PER_TRIAL_TARGET = Fraction(1, 1 << 16)
DEFAULT_ERROR = 1e-9
AUTO_KMAX_CAP = 64
DEFAULT_AL_DIM_CAP = 64


class ConfigError(ValueError):
    pass


class FieldTooSmall(ConfigError):
    pass


class DegenerateBound(ConfigError):
    pass


class DimTooLarge(ConfigError):
    pass


def _frac(x) -> Fraction:
    # str() keeps decimal literals exact: 0.1 -> 1/10, not the binary double
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def required_trials(eps_total, eps_single) -> int:
    """Smallest r with ``eps_single**r <= eps_total``."""
    eps_total, eps_single = _frac(eps_total), _frac(eps_single)
    if not 0 < eps_total < 1:
        raise ValueError("eps_total must lie in (0, 1)")
    if eps_single >= 1:
        raise DegenerateBound(f"per-trial bound {float(eps_single):.3g} >= 1; the field is too small")
    if eps_single <= 0:
        raise ValueError("eps_single must be positive")
    r = max(1, math.floor(_log(eps_total) / _log(eps_single)) - 1)
    while eps_single**r > eps_total:
        r += 1
    while r > 1 and eps_single ** (r - 1) <= eps_total:
        r -= 1
    return r


def trial_seed(master: int, K: int, trial: int) -> int:
    h = hashlib.blake2b(f"{master}:{K}:{trial}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def choose_modulus(degree_bound: int, per_trial_target=PER_TRIAL_TARGET) -> int:
    """Smallest prime above ``max(2 * degree_bound / per_trial_target, 2**61)``."""
    floor = max(math.ceil(2 * degree_bound / _frac(per_trial_target)), MIN_AUTO_MODULUS)
    return next_prime(floor)


@dataclass(frozen=True)
class TestParams:
    k_max: int
    degree_bound: int  # bound on the bivariate degree D_biv
    target_error: Any
    trials_per_K: int
    seed: int
    field: PrimeField

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.k_max < 0:
            raise ConfigError("k_max must be >= 0")
        if self.degree_bound < 0:
            raise ConfigError("degree bound must be >= 0")
        if self.field.modulus <= self.degree_bound:
            raise FieldTooSmall(f"modulus {self.field.modulus} must exceed the degree bound {self.degree_bound}")
        if self.trials_per_K < 1:
            raise ConfigError("trials_per_K must be >= 1")

    @property
    def eps_single(self) -> Fraction:
        return Fraction(self.degree_bound, self.field.modulus)

    @property
    def error_bound(self) -> Fraction:
        return self.eps_single**self.trials_per_K

    @classmethod
    def build(cls, k_max: int, degree_bound: int, *, target_error=DEFAULT_ERROR, trials: int | None = None,
              seed: int = 0, modulus: int | None = None) -> TestParams:
        """Fill in modulus (auto-chosen) and trial count (from the error target)."""
        p = modulus if modulus is not None else choose_modulus(degree_bound)
        field_ = PrimeField(p)
        if p <= degree_bound:
            raise FieldTooSmall(f"modulus {p} must exceed the degree bound {degree_bound}")
        if trials is None:
            trials = required_trials(target_error, Fraction(degree_bound, p)) if degree_bound else 1
        return cls(k_max, degree_bound, target_error, trials, seed, field_)


def default_bounds(c: Circuit, k_max: int | None = None, degree_log2: int | None = None) -> tuple[int, int]:
    """``(k_max, D_biv)`` for a circuit, from explicit values or syntactic bounds.

    Raises :class:`ConfigError` when a needed bound saturates.
    """
    n = c.nvars
    deg = syntactic_degree_bound(c)
    if degree_log2 is not None:
        d_biv = 1 << degree_log2
    elif deg.huge:
        raise ConfigError("syntactic degree bound saturates; supply the degree bound (--degree-log2) explicitly")
    else:
        d_biv = (n + 2) * deg.value
    if k_max is None:
        candidates = []
        sp = sparsity_log2_bound(c)
        if not sp.huge:
            candidates.append(sp.value)
        if not deg.huge:
            candidates.append(deg.value * math.ceil(math.log2(n + 1)) if n else 0)
        if not candidates:
            raise ConfigError("sparsity and degree bounds both saturate; supply --log2-sparsity")
        k_max = min(min(candidates), d_biv)
        if k_max > AUTO_KMAX_CAP:
            raise ConfigError(f"derived sparsity bound 2^{k_max} is impractical; supply --log2-sparsity")
        warnings.warn(f"log2 sparsity not given; using syntactic bound K_max={k_max}. "
                      "A wrong bound voids completeness (soundness is unaffected).", stacklevel=2)
    return k_max, d_biv


# ---------------------------------------------------------------------------
# trials and verdicts


@dataclass
class TrialOutcome:
    nonzero: bool
    digest: str
    matrix: np.ndarray


@dataclass
class Verdict:
    outcome: str
    method: str
    modulus: int
    error_bound: Fraction
    witness: dict | None = None
    transcript: list = field(default_factory=list)
    dims: list = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return self.outcome == ZERO

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "method": self.method,
            "modulus": str(self.modulus),
            "error_bound": float(self.error_bound),
            "witness": self.witness,
            "dims": self.dims,
            "trials_run": len(self.transcript),
        }


def _digest(m: np.ndarray) -> str:
    h = hashlib.blake2b(digest_size=8)
    for x in m.ravel():
        h.update(int(x).to_bytes((int(x).bit_length() + 8) // 8, "big"))
        h.update(b",")
    return h.hexdigest()


def _to_ints(m: Matrix) -> np.ndarray:
    out = np.empty((m.dim, m.dim), dtype=object)
    for i in range(m.dim):
        for j in range(m.dim):
            out[i, j] = int(m.rows[i][j])
    return out


def _first_nonzero(m: np.ndarray) -> tuple[int, int] | None:
    for (i, j), x in np.ndenumerate(m):
        if x:
            return i, j
    return None


def single_trial(box: BlackBox, K: int, field_: PrimeField, rng: random.Random) -> TrialOutcome:
    dim = K + 1
    box.check_capability(dim, field_.modulus)
    sm = build_substitution_matrices(random_assignment(K, field_, rng), field_)
    mats = [_to_ints(N) for N in encoded_variable_matrices(sm, box.nvars)] if box.nvars else []
    out = box.evaluate(mats, field_.modulus, dim=dim)
    return TrialOutcome(_first_nonzero(out) is not None, _digest(out), out)


def nfa_identity_test(box: BlackBox, params: TestParams) -> Verdict:
    p = params.field.modulus
    verdict = Verdict(ZERO, "nfa", p, params.error_bound)
    for K in range(params.k_max + 1):
        verdict.dims.append(K + 1)
        for t in range(params.trials_per_K):
            seed = trial_seed(params.seed, K, t)
            res = single_trial(box, K, params.field, random.Random(seed))
            verdict.transcript.append({"K": K, "trial": t, "seed": seed, "nonzero": res.nonzero,
                                       "digest": res.digest})
            if res.nonzero:
                i, j = _first_nonzero(res.matrix)
                verdict.outcome = NONZERO
                verdict.error_bound = Fraction(0)
                verdict.witness = {"K": K, "trial": t, "seed": seed, "dim": K + 1, "row": i, "col": j,
                                   "value": str(res.matrix[i, j])}
                return verdict
    return verdict


def replay_witness(box: BlackBox, verdict: Verdict) -> int:
    """Re-run the witness trial and return the recorded entry."""
    w = verdict.witness
    if w is None:
        raise ValueError("verdict has no witness")
    field_ = PrimeField(verdict.modulus)
    if verdict.method == "nfa":
        res = single_trial(box, w["K"], field_, random.Random(w["seed"]))
    else:
        res = _al_trial(box, w["dim"], field_, random.Random(w["seed"]))
    return int(res.matrix[w["row"], w["col"]])


def al_dimension(degree_bound: int) -> int:
    return degree_bound // 2 + 1


def _al_trial(box: BlackBox, d: int, field_: PrimeField, rng: random.Random) -> TrialOutcome:
    box.check_capability(d, field_.modulus)
    mats = []
    for _ in range(box.nvars):
        m = np.empty((d, d), dtype=object)
        for idx in np.ndindex(d, d):
            m[idx] = field_.sample_int(rng)
        mats.append(m)
    out = box.evaluate(mats, field_.modulus, dim=d)
    return TrialOutcome(_first_nonzero(out) is not None, _digest(out), out)


def al_identity_test(box: BlackBox, degree_bound: int | None, field_: PrimeField, trials: int, seed: int,
                     dim_cap: int = DEFAULT_AL_DIM_CAP) -> Verdict:
    """Baseline: random d x d matrices with d = floor(degree/2) + 1."""
    if degree_bound is None:
        raise DimTooLarge("degree bound saturates; no finite dimension applies")
    d = al_dimension(degree_bound)
    if d > dim_cap:
        raise DimTooLarge(f"dimension {d} exceeds cap {dim_cap}")
    if field_.modulus <= degree_bound:
        raise FieldTooSmall(f"modulus {field_.modulus} must exceed the degree bound {degree_bound}")
    eps = Fraction(degree_bound, field_.modulus)
    verdict = Verdict(ZERO, "al", field_.modulus, eps**trials, dims=[d])
    for t in range(trials):
        s = trial_seed(seed, d, t)
        res = _al_trial(box, d, field_, random.Random(s))
        verdict.transcript.append({"K": None, "dim": d, "trial": t, "seed": s, "nonzero": res.nonzero,
                                   "digest": res.digest})
        if res.nonzero:
            i, j = _first_nonzero(res.matrix)
            verdict.outcome = NONZERO
            verdict.error_bound = Fraction(0)
            verdict.witness = {"K": None, "trial": t, "seed": s, "dim": d, "row": i, "col": j,
                               "value": str(res.matrix[i, j])}
            break
    return verdict


# ---------------------------------------------------------------------------
# exact symbolic check


@dataclass
class SymbolicReport:
    K_used: int
    entry_poly: CommPoly
    isolated_word: Word
    index_set: tuple
    isolated_monomial: CommMonomial
    isolated_monomial_coeff: int
    expected_coeff: int
    bivariate_degree: int

    @property
    def nonzero(self) -> bool:
        return not self.entry_poly.is_zero()

    @property
    def coeff_ok(self) -> bool:
        return self.isolated_monomial_coeff == self.expected_coeff

    @property
    def passed(self) -> bool:
        return self.nonzero and self.coeff_ok


def symbolic_theorem_check(f: SparseNCPoly) -> SymbolicReport:
    """Evaluate ``f`` on the symbolic automaton matrices and inspect the ``(q0, qK)`` entry.

    K is the size of the isolating index set of the top-degree bivariate words.
    The entry must be nonzero and the isolated word's coefficient must appear
    unchanged on its path monomial.
    """
    if f.alphabet != ALPHABET_Z:
        raise ValueError("expected a z-alphabet polynomial")
    fb = encode_bivariate(f)
    top = max_degree_set(fb)
    iso = isolating_index_set(top.words)
    K = len(iso.index_set)
    sm = symbolic_matrices(K)
    mf = ncpoly_eval(f, encoded_variable_matrices(sm, f.nvars), CPOLY)
    entry = mf[0, K]
    mono = isolated_monomial(iso.isolated, iso.index_set)
    return SymbolicReport(K, entry, iso.isolated, iso.index_set, mono, entry.coeff(mono), fb.terms[iso.isolated],
                          top.degree)
