"""Prefix counts and finite surrogates for upper density, in exact rationals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence

from rdl.colouring import class_tuple
from rdl.paths import DirectedPath


@dataclass(frozen=True)
class DensityProfile:
    """``counts[m - 1] == |A ∩ [1..m]|`` for m = 1..horizon."""

    horizon: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.horizon:
            raise ValueError("counts must have one entry per m in [1..horizon]")
        prev = 0
        for m, c in enumerate(self.counts, start=1):
            if c - prev not in (0, 1) or c > m:
                raise ValueError(f"counts are not a prefix-count sequence at m={m}")
            prev = c

    def count(self, m: int) -> int:
        return self.counts[m - 1] if m >= 1 else 0

    def ratio(self, m: int) -> Fraction:
        return Fraction(self.count(m), m)

    def to_csv(self) -> str:
        lines = ["m,count,ratio_num,ratio_den"]
        for m, c in enumerate(self.counts, start=1):
            q = Fraction(c, m)
            lines.append(f"{m},{c},{q.numerator},{q.denominator}")
        return "\n".join(lines) + "\n"


def profile(members: Iterable[int], n: int) -> DensityProfile:
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    marks = [0] * n
    for v in set(members):
        if 1 <= v <= n:
            marks[v - 1] = 1
    return DensityProfile(n, tuple(accumulate(marks)))


def upper_density_estimate(p: DensityProfile, window_start: int | None = None) -> Fraction:
    """max of count(m)/m over m in [window_start, horizon]; window defaults to the top half."""
    if window_start is None:
        window_start = max(1, p.horizon // 2)
    if not 1 <= window_start <= p.horizon:
        raise ValueError(f"window_start {window_start} outside [1..{p.horizon}]")
    return max(p.ratio(m) for m in range(window_start, p.horizon + 1))


def exact_periodic_density(residues: Iterable, modulus: int | Sequence[int]) -> Fraction:
    """Density of the integers whose residue (or residue tuple) lies in ``residues``.

    With a tuple of moduli, residues are tuples and the count runs over one
    full period lcm(moduli), so non-coprime moduli are handled correctly.
    """
    residues = set(residues)
    if isinstance(modulus, int):
        if modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {modulus}")
        for x in residues:
            if not 0 <= x < modulus:
                raise ValueError(f"residue {x} outside [0..{modulus - 1}]")
        return Fraction(len(residues), modulus)
    moduli = tuple(modulus)
    for tup in residues:
        if len(tup) != len(moduli) or any(not 0 <= x < r for x, r in zip(tup, moduli)):
            raise ValueError(f"residue tuple {tup} does not fit moduli {moduli}")
    period = math.lcm(*moduli)
    hits = sum(1 for x in range(period) if class_tuple(x, moduli) in residues)
    return Fraction(hits, period)


def path_density(path: DirectedPath, n: int) -> Fraction:
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    return Fraction(sum(1 for v in set(path.vertices) if 1 <= v <= n), n)
