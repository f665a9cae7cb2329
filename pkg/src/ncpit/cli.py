"""Command-line interface.

Exit codes: 0 = Zero (or success), 1 = Nonzero (or a failed verification),
2 = configuration error, 3 = file error, 4 = parse error.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

from .algebra import NotPrime, PrimeField
from .autmat import var_name
from .circuit import (BoxDimRefused, CapExceeded, CircuitBlackBox, CircuitError, binomial_power_circuit,
                      commutator_circuit, expand_to_sparse, format_circuit, gen_random_instance,
                      gen_zero_circuit, parse_circuit, power_sum_circuit, syntactic_degree_bound)
from .isolate import MixedLengths, isolating_index_set
from .ncpoly import (ALPHABET_Z, PolyFormatError, ZeroPolynomial, encode_word, format_ncpoly, parse_ncpoly,
                     parse_words, word_str)
from .pit import (DEFAULT_ERROR, ConfigError, TestParams, al_identity_test, choose_modulus, default_bounds,
                  nfa_identity_test, required_trials, symbolic_theorem_check)

EXIT_ZERO, EXIT_NONZERO, EXIT_CONFIG, EXIT_FILE, EXIT_PARSE = 0, 1, 2, 3, 4

MERSENNE_61 = (1 << 61) - 1


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        self.code = code
        super().__init__(msg)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}", EXIT_FILE) from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e.strerror or e}", EXIT_FILE) from None


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _load_circuit(path: str):
    try:
        return parse_circuit(_read(path))
    except CircuitError as e:
        raise CliError(f"{path}: {e}", EXIT_PARSE) from None


def _load_poly(path: str):
    try:
        return parse_ncpoly(_read(path))
    except PolyFormatError as e:
        raise CliError(f"{path}: {e}", EXIT_PARSE) from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(63)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


# ---------------------------------------------------------------------------
# subcommands


def run_identity_test(circuit, *, method="nfa", log2_sparsity=None, degree_log2=None, error=DEFAULT_ERROR,
                      trials=None, seed=0, modulus=None, al_dim_cap=64):
    """Configure and run one test; returns ``(verdict, config)``."""
    box = CircuitBlackBox(circuit)
    if method == "nfa":
        k_max, d_biv = default_bounds(circuit, log2_sparsity, degree_log2)
        params = TestParams.build(k_max, d_biv, target_error=error, trials=trials, seed=seed, modulus=modulus)
        config = {"method": "nfa", "k_max": k_max, "degree_bound": d_biv, "modulus": str(params.field.modulus),
                  "trials_per_K": params.trials_per_K, "target_error": error, "seed": seed}
        return nfa_identity_test(box, params), config
    if degree_log2 is not None:
        delta = 1 << degree_log2
    else:
        delta = syntactic_degree_bound(circuit).value
    if delta is None:
        raise ConfigError("degree bound saturates; the baseline is inapplicable")
    p = modulus if modulus is not None else choose_modulus(delta)
    field_ = PrimeField(p)
    r = trials if trials is not None else (required_trials(error, Fraction(delta, p)) if delta else 1)
    config = {"method": "al", "degree_bound": delta, "modulus": str(p), "trials": r, "target_error": error,
              "seed": seed}
    return al_identity_test(box, delta, field_, r, seed, dim_cap=al_dim_cap), config


def cmd_test(args) -> int:
    circuit = _load_circuit(args.circuit)
    seed = _seed(args)
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        verdict, config = run_identity_test(
            circuit, method=args.method, log2_sparsity=args.log2_sparsity, degree_log2=args.degree_log2,
            error=args.error, trials=args.trials, seed=seed, modulus=args.modulus, al_dim_cap=args.al_dim_cap)
    elapsed = time.perf_counter() - t0
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    config.update({"circuit": args.circuit, "size": circuit.size, "nvars": circuit.nvars})
    if args.json:
        _emit({"type": "config", **config})
        for rec in sorted(verdict.transcript, key=lambda r: (r["K"] if r["K"] is not None else -1, r["trial"])):
            _emit({"type": "trial", **rec})
        _emit({"type": "verdict", **verdict.to_dict(), "elapsed_s": round(elapsed, 6)})
    else:
        print(f"circuit: {args.circuit} (size {circuit.size}, {circuit.nvars} vars)")
        for k in sorted(config):
            if k not in ("circuit", "size", "nvars"):
                print(f"  {k}: {config[k]}")
        print(f"verdict: {verdict.outcome}")
        if verdict.is_zero:
            print(f"error bound: {float(verdict.error_bound):.3e}")
        else:
            w = verdict.witness
            print(f"witness: dim {w['dim']} trial {w['trial']} seed {w['seed']} "
                  f"entry ({w['row']},{w['col']}) = {w['value']}")
        print(f"trials run: {len(verdict.transcript)}, dims {verdict.dims}, time {elapsed:.4f}s")
    return EXIT_ZERO if verdict.is_zero else EXIT_NONZERO


def cmd_expand(args) -> int:
    circuit = _load_circuit(args.circuit)
    f = expand_to_sparse(circuit, term_cap=args.term_cap, modulus=args.modulus)
    _write(args.out, format_ncpoly(f))
    return EXIT_ZERO


def cmd_verify(args) -> int:
    f = _load_poly(args.poly)
    if f.alphabet != ALPHABET_Z:
        raise CliError("verify expects a z-alphabet polynomial", EXIT_CONFIG)
    rep = symbolic_theorem_check(f)
    report = {
        "K": rep.K_used,
        "bivariate_degree": rep.bivariate_degree,
        "index_set": list(rep.index_set),
        "isolated_word": word_str(rep.isolated_word, "x"),
        "isolated_monomial": " ".join(f"{var_name(v)}^{e}" if e > 1 else var_name(v)
                                      for v, e in rep.isolated_monomial),
        "coefficient": rep.isolated_monomial_coeff,
        "expected_coefficient": rep.expected_coeff,
        "entry_nonzero": rep.nonzero,
        "coefficient_ok": rep.coeff_ok,
        "entry_terms": len(rep.entry_poly),
    }
    if len(rep.entry_poly) <= args.max_terms:
        report["entry_poly"] = rep.entry_poly.to_text(var_name)
    if args.json:
        _emit({"type": "verify", **report})
    else:
        for k, v in report.items():
            print(f"{k}: {v}")
        print("PASS" if rep.passed else "FAIL")
    return EXIT_ZERO if rep.passed else EXIT_NONZERO


def cmd_isolate(args) -> int:
    try:
        alphabet, _, words = parse_words(_read(args.poly))
    except PolyFormatError as e:
        raise CliError(f"{args.poly}: {e}", EXIT_PARSE) from None
    if alphabet == ALPHABET_Z:
        words = [encode_word(w) for w in words]
    if args.top and words:
        d = max(len(w) for w in words)
        words = [w for w in words if len(w) == d]
    res = isolating_index_set(words)
    if args.json:
        _emit({"type": "isolate", "index_set": list(res.index_set), "isolated": word_str(res.isolated, "x"),
               "trace": [list(t) for t in res.trace], "set_size": len(set(words))})
    else:
        print(f"words: {len(set(words))} of length {len(words[0])}")
        print(f"I = {{{', '.join(map(str, res.index_set))}}}")
        print(f"m = {word_str(res.isolated, 'x')}")
        for pos, bit, left in res.trace:
            print(f"  split at {pos}: keep x{bit}, {left} left")
    return EXIT_ZERO


def cmd_gen(args) -> int:
    kind = "zero" if args.zero else args.kind
    seed = _seed(args)
    poly = None
    if kind == "random":
        field_ = PrimeField(args.modulus or MERSENNE_61)
        circuit, poly = gen_random_instance(args.vars, args.degree, args.terms, seed, field_)
    elif kind == "zero":
        circuit = gen_zero_circuit(args.vars, args.size, seed)
    elif kind == "power":
        circuit = power_sum_circuit(args.log2_exponent, args.vars)
    elif kind == "binomial":
        circuit = binomial_power_circuit(args.log2_exponent)
    else:
        circuit = commutator_circuit()
    _write(args.out, format_circuit(circuit))
    if args.poly_out:
        if poly is None:
            poly = expand_to_sparse(circuit)
        _write(args.poly_out, format_ncpoly(poly))
    return EXIT_ZERO


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise CliError(f"{corpus} is not a directory", EXIT_FILE)
    files = sorted(corpus.glob("*.circ"))
    if not files:
        raise CliError(f"no *.circ files in {corpus}", EXIT_FILE)
    seed = _seed(args)
    rows = []
    for path in files:
        circuit = _load_circuit(str(path))
        row = {"instance": path.name, "size": circuit.size}
        for method in ("nfa", "al"):
            t0 = time.perf_counter()
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    verdict, config = run_identity_test(circuit, method=method, error=args.error, seed=seed,
                                                   al_dim_cap=args.al_dim_cap)
            except ConfigError as e:
                row[f"{method}_dim"] = "inapplicable"
                row[f"{method}_verdict"] = "-"
                row[f"{method}_time_s"] = None
                row[f"{method}_note"] = str(e)
                continue
            # configured bound (K_max + 1 for nfa), comparable across methods
            row[f"{method}_dim"] = config["k_max"] + 1 if method == "nfa" else max(verdict.dims)
            if method == "nfa":
                row["nfa_dim_reached"] = max(verdict.dims)
            row[f"{method}_verdict"] = verdict.outcome
            row[f"{method}_time_s"] = round(time.perf_counter() - t0, 6)
        rows.append(row)
    if args.json:
        for row in rows:
            _emit({"type": "bench", **row})
        return EXIT_ZERO
    cols = ["instance", "size", "nfa_dim", "nfa_verdict", "nfa_time_s", "al_dim", "al_verdict", "al_time_s"]
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in cells:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return EXIT_ZERO


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncpit", description="Black-box identity testing for sparse "
                                     "noncommutative polynomials via small automaton matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="randomized identity test of a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--log2-sparsity", type=int, help="K_max, a bound on log2 of the monomial count")
    p.add_argument("--degree-log2", type=int, help="bound on log2 of the (bivariate) degree")
    p.add_argument("--error", type=float, default=DEFAULT_ERROR, help="target false-Zero probability")
    p.add_argument("--trials", type=int, help="trials per K (default: derived from --error)")
    p.add_argument("--seed", type=int)
    p.add_argument("--modulus", type=int, help="prime modulus (default: auto-chosen)")
    p.add_argument("--method", choices=("nfa", "al"), default="nfa")
    p.add_argument("--al-dim-cap", type=int, default=64)
    p.add_argument("--json", action="store_true", help="emit json-lines")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("expand", help="expand a circuit into an explicit polynomial")
    p.add_argument("--circuit", required=True)
    p.add_argument("--modulus", type=int)
    p.add_argument("--term-cap", type=int, default=10**6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="exact symbolic check of the nonvanishing entry")
    p.add_argument("--poly", required=True)
    p.add_argument("--max-terms", type=int, default=200, help="print entry_poly up to this many terms")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("isolate", help="isolating index set of a word set")
    p.add_argument("--poly", required=True)
    p.add_argument("--top", action="store_true", help="keep only the longest words")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_isolate)

    p = sub.add_parser("gen", help="generate circuits")
    p.add_argument("--kind", choices=("random", "zero", "power", "binomial", "commutator"), default="random")
    p.add_argument("--zero", action="store_true", help="same as --kind zero")
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--terms", type=int, default=4)
    p.add_argument("--size", type=int, default=40)
    p.add_argument("--log2-exponent", type=int, default=10)
    p.add_argument("--modulus", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--poly-out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="compare the automaton test with the linear-dimension baseline")
    p.add_argument("corpus")
    p.add_argument("--error", type=float, default=DEFAULT_ERROR)
    p.add_argument("--seed", type=int)
    p.add_argument("--al-dim-cap", type=int, default=64)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else 0
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (PolyFormatError, CircuitError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, NotPrime, CapExceeded, BoxDimRefused, MixedLengths, ZeroPolynomial, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
