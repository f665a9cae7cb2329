"""Isolating index sets for sets of equal-length binary words."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .ncpoly import Word


class EmptySet(ValueError):
    pass


class MixedLengths(ValueError):
    pass


@dataclass(frozen=True)
class IsolationResult:
    index_set: tuple  # strictly increasing 1-indexed positions
    isolated: Word
    trace: tuple  # (position, kept bit, surviving count) per step


def ceil_log2(m: int) -> int:
    return (m - 1).bit_length() if m > 1 else 0


def isolating_index_set(words: Iterable[Word]) -> IsolationResult:
    """Halve the set at its first disagreeing position until one word remains.

    The smaller side survives each split; on a tie the x0 side does.
    """
    surviving = sorted(set(map(tuple, words)))
    if not surviving:
        raise EmptySet("need at least one word")
    lengths = {len(w) for w in surviving}
    if len(lengths) != 1:
        raise MixedLengths(f"words have lengths {sorted(lengths)}")
    if any(s not in (0, 1) for w in surviving for s in w):
        raise ValueError("words must be over the bivariate alphabet")
    (D,) = lengths
    positions = []
    trace = []
    while len(surviving) > 1:
        # rescan from position 1; used positions are constant on the survivors
        pos = next(i for i in range(D) if any(w[i] != surviving[0][i] for w in surviving))
        s0 = [w for w in surviving if w[pos] == 0]
        s1 = [w for w in surviving if w[pos] == 1]
        bit = 0 if len(s0) <= len(s1) else 1
        surviving = s0 if bit == 0 else s1
        positions.append(pos + 1)
        trace.append((pos + 1, bit, len(surviving)))
    return IsolationResult(tuple(sorted(positions)), surviving[0], tuple(trace))


def check_isolating(words: Iterable[Word], index_set: Sequence[int], m: Word) -> bool:
    """True iff every other word differs from ``m`` somewhere in ``index_set``."""
    m = tuple(m)
    for w in set(map(tuple, words)):
        if w == m:
            continue
        if all(w[i - 1] == m[i - 1] for i in index_set):
            return False
    return True
