"""Acceptance criteria; each test prints one PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or through pytest.
"""

import random
import time
import warnings


from ncpit.algebra import CPOLY, PrimeField
from ncpit.autmat import encoded_variable_matrices, path_enumeration_entry, symbolic_matrices
from ncpit.circuit import (CircuitBlackBox, commutator_circuit, difference_circuit, expand_to_sparse,
                           gen_random_instance, gen_zero_circuit, power_sum_circuit, syntactic_degree_bound)
from ncpit.isolate import ceil_log2, check_isolating, isolating_index_set
from ncpit.ncpoly import encode_bivariate, ncpoly_eval, ncpoly_normalize
from ncpit.pit import (NONZERO, ZERO, DimTooLarge, TestParams, al_identity_test, default_bounds,
                       nfa_identity_test, symbolic_theorem_check)

M61 = (1 << 61) - 1
F61 = PrimeField(M61)

N_ZERO, ZERO_SEEDS = 200, 5
N_RANDOM = 500


def report(capsys, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def warm_up():
    # first call loads the compiled kernels from cache
    box = CircuitBlackBox(commutator_circuit())
    nfa_identity_test(box, TestParams.build(1, 8, trials=1, modulus=M61))


def zero_corpus():
    out = []
    for i in range(N_ZERO):
        n = 1 + i % 5
        out.append(gen_zero_circuit(n, 60, seed=1000 + i))
    return out


def random_corpus():
    rng = random.Random(20240601)
    out = []
    for i in range(N_RANDOM):
        n = rng.randint(1, 4)
        d = rng.randint(1, 20)
        cap = sum(n**k for k in range(1, d + 1))
        t = rng.randint(1, min(32, cap))
        c, f = gen_random_instance(n, d, t, seed=i, field=F61)
        out.append((c, f, n, d, t))
    return out


def zero_params(c, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        k_max, d_biv = default_bounds(c)
    return TestParams.build(k_max, d_biv, seed=seed, modulus=M61)


def random_params(n, d, t, trials, seed):
    return TestParams.build(ceil_log2(t), (n + 2) * d, trials=trials, seed=seed, modulus=M61)


_cache = {}


def corpora():
    if not _cache:
        _cache["zero"] = zero_corpus()
        _cache["random"] = random_corpus()
    return _cache["zero"], _cache["random"]


def test_criterion_1_soundness(capsys):
    warm_up()
    zeros, _ = corpora()
    t0 = time.perf_counter()
    verdicts = []
    for i, c in enumerate(zeros):
        assert c.size <= 60 and c.nvars <= 5
        box = CircuitBlackBox(c)
        for s in range(ZERO_SEEDS):
            verdicts.append(nfa_identity_test(box, zero_params(c, seed=s * 7919 + i)).outcome)
    elapsed = time.perf_counter() - t0
    nz = verdicts.count(ZERO)
    ok = nz == N_ZERO * ZERO_SEEDS and elapsed < 30
    report(capsys, "1 soundness", ok, f"{nz}/{len(verdicts)} Zero in {elapsed:.2f}s (limit 30s)")


def test_criterion_2_completeness(capsys):
    warm_up()
    _, inst = corpora()
    t0 = time.perf_counter()
    single = sum(nfa_identity_test(CircuitBlackBox(c), random_params(n, d, t, 1, seed=i)).outcome == NONZERO
                 for i, (c, f, n, d, t) in enumerate(inst))
    amplified = sum(nfa_identity_test(CircuitBlackBox(c), random_params(n, d, t, 20, seed=i)).outcome == NONZERO
                    for i, (c, f, n, d, t) in enumerate(inst))
    elapsed = time.perf_counter() - t0
    ok = single >= 0.99 * N_RANDOM and amplified == N_RANDOM and elapsed < 60
    report(capsys, "2 completeness", ok,
           f"trials=1: {single}/{N_RANDOM} Nonzero, trials=20: {amplified}/{N_RANDOM} in {elapsed:.2f}s (limit 60s)")


def test_criterion_3_oracle_agreement(capsys):
    zeros, inst = corpora()
    bad = 0
    for i, (c, f, n, d, t) in enumerate(inst):
        expect = ZERO if expand_to_sparse(c, modulus=M61).is_zero() else NONZERO
        bad += nfa_identity_test(CircuitBlackBox(c), random_params(n, d, t, 1, seed=i)).outcome != expect
    for i, c in enumerate(zeros):
        expect = ZERO if expand_to_sparse(c).is_zero() else NONZERO
        bad += nfa_identity_test(CircuitBlackBox(c), zero_params(c, seed=i)).outcome != expect
    total = len(inst) + len(zeros)
    report(capsys, "3 oracle agreement", bad == 0, f"{total - bad}/{total} verdicts match expansion")


def test_criterion_4_symbolic(capsys):
    rng = random.Random(4242)
    t0 = time.perf_counter()
    passed = matched = 0
    for i in range(100):
        n, d = rng.randint(1, 3), rng.randint(1, 3)
        t = rng.randint(1, min(8, sum(n**k for k in range(1, d + 1))))
        _, f = gen_random_instance(n, d, t, seed=rng.randrange(2**32), field=PrimeField(10007))
        # signed integer coefficients keep the arithmetic over Z
        f = ncpoly_normalize([(c if c < 5004 else c - 10007, w) for w, c in f.terms.items()], nvars=n)
        rep = symbolic_theorem_check(f)
        passed += rep.passed
        if i < 10:
            oracle = path_enumeration_entry(encode_bivariate(f), rep.K_used)
            matched += oracle == rep.entry_poly
    elapsed = time.perf_counter() - t0
    ok = passed == 100 and matched == 10 and elapsed < 120
    report(capsys, "4 symbolic check", ok,
           f"{passed}/100 pass, {matched}/10 match path enumeration, {elapsed:.2f}s (limit 120s)")


def test_criterion_5_isolation(capsys):
    rng = random.Random(55)
    good = 0
    samples = []
    for _ in range(1000):
        D = rng.randint(1, 64)
        size = rng.randint(1, min(1024, 2**D))
        M = set()
        while len(M) < size:
            M.add(tuple(rng.getrandbits(1) for _ in range(D)))
        r = isolating_index_set(M)
        good += len(r.index_set) <= ceil_log2(len(M)) and check_isolating(M, r.index_set, r.isolated)
        if len(samples) < 200:
            samples.append((M, r, D))
    closure = 0
    for M, r, D in samples:
        extra = rng.sample(range(1, D + 1), rng.randint(0, D))
        closure += check_isolating(M, sorted(set(r.index_set) | set(extra)), r.isolated)
    ok = good == 1000 and closure == 200
    report(capsys, "5 isolation bound", ok, f"{good}/1000 bound+isolating, {closure}/200 superset closure")


def test_criterion_6_exponential_degree(capsys):
    warm_up()
    c = power_sum_circuit(40)
    t0 = time.perf_counter()
    k_max, d_biv = default_bounds(c, k_max=1)
    params = TestParams.build(k_max, d_biv, trials=2, seed=6)
    v = nfa_identity_test(CircuitBlackBox(c), params)
    t_nonzero = time.perf_counter() - t0
    z = difference_circuit(c)
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        zk, zd = default_bounds(z)
    vz = nfa_identity_test(CircuitBlackBox(z), TestParams.build(zk, zd, trials=2, seed=6))
    t_zero = time.perf_counter() - t0
    try:
        al_identity_test(CircuitBlackBox(c), syntactic_degree_bound(c).value, params.field, 1, seed=6)
        al = "ran"
    except DimTooLarge:
        al = "DimTooLarge"
    bits = params.field.modulus.bit_length()
    ok = (v.outcome == NONZERO and t_nonzero < 1 and vz.outcome == ZERO and t_zero < 1 and al == "DimTooLarge"
          and bits == 62 and c.size <= 90)
    report(capsys, "6 exponential degree", ok,
           f"{c.size} gates, {bits}-bit modulus, Nonzero in {t_nonzero:.4f}s, "
           f"g-g Zero in {t_zero:.4f}s, AL {al}")


def test_criterion_7_two_monomials(capsys):
    box = CircuitBlackBox(commutator_circuit())
    hits = 0
    for s in range(100):
        v = nfa_identity_test(box, TestParams.build(1, 8, trials=5, seed=s, modulus=M61))
        hits += v.outcome == NONZERO and max(v.dims) <= 2
    al_hits = sum(al_identity_test(box, 2, F61, 5, seed=s).outcome == NONZERO for s in range(100))
    ok = hits == 100 and al_hits == 100
    report(capsys, "7 two-monomial detection", ok, f"{hits}/100 Nonzero at dim <= 2 (baseline d=2: {al_hits}/100)")


def test_criterion_8_homomorphism(capsys):
    rng = random.Random(88)
    equal = 0
    for _ in range(50):
        n = rng.randint(1, 3)
        raw = [(rng.randint(-9, 9), tuple(rng.randint(1, n) for _ in range(rng.randint(0, 3))))
               for _ in range(rng.randint(1, 5))]
        f = ncpoly_normalize(raw, nvars=n)
        sm = symbolic_matrices(rng.randint(0, 2))
        lhs = ncpoly_eval(encode_bivariate(f), sm.pair(), CPOLY)
        rhs = ncpoly_eval(f, encoded_variable_matrices(sm, n), CPOLY)
        equal += lhs == rhs
    report(capsys, "8 homomorphism", equal == 50, f"{equal}/50 exact symbolic equalities")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn(None)
            except AssertionError:
                pass
