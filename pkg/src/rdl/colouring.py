"""Colouring rules on ordered pairs of positive integers and their finite views.

Colours are small positive integers. In a 2-colouring ``RED == 1`` and
``BLUE == 2``; in a (k+1)-colouring colours ``1..k`` are the restricted ones
and ``k + 1`` is the unrestricted colour.

Every rule has two evaluation paths: a scalar ``colour_of`` written in plain
integer arithmetic, and a vectorised ``_colour_array`` used to materialise
views. Tests hold the two against each other.
"""

from __future__ import annotations

import bisect
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from rdl._validation import check_modulus, check_vertex_set
from rdl.errors import InvalidPairError, OutOfDomainError, ParseError

RED = 1
BLUE = 2

DEFAULT_HORIZON_CAP = 4096

_MASK64 = (1 << 64) - 1


def residue_class(v: int, r: int) -> int:
    check_modulus(r)
    return v % r


def class_tuple(v: int, moduli: Sequence[int]) -> tuple[int, ...]:
    for r in moduli:
        check_modulus(r)
    return tuple(v % r for r in moduli)


class ColouringRule:
    """Total, deterministic colouring of ordered pairs of distinct positive integers."""

    colour_count: int

    def colour_of(self, m: int, n: int) -> int:
        m, n = int(m), int(n)
        if m == n:
            raise InvalidPairError(f"no colour for loop ({m},{n})")
        if m < 1 or n < 1:
            raise InvalidPairError(f"vertices must be positive, got ({m},{n})")
        self.check_domain((m, n))
        return self._colour(m, n)

    def check_domain(self, vertices: Iterable[int]) -> None:
        """Raise OutOfDomainError if some vertex is outside the rule's domain."""

    def colour_matrix(self, vertices: Sequence[int]) -> np.ndarray:
        """Colours of all ordered pairs of ``vertices``; zero on the diagonal."""
        v = np.asarray(vertices, dtype=np.int64)
        out = self._colour_array(v[:, None], v[None, :]).astype(np.int8)
        np.fill_diagonal(out, 0)
        return out

    def colour_row(self, m: int, targets: np.ndarray) -> np.ndarray:
        """Colours of (m, t) for every t in ``targets`` (t != m assumed)."""
        return self._colour_array(np.int64(m), np.asarray(targets, dtype=np.int64))

    def _colour(self, m: int, n: int) -> int:
        raise NotImplementedError

    def _colour_array(self, m: np.ndarray, n: np.ndarray) -> np.ndarray:
        # slow fallback; subclasses override
        m, n = np.broadcast_arrays(m, n)
        out = np.zeros(m.shape, dtype=np.int8)
        for idx in np.ndindex(m.shape):
            a, b = int(m[idx]), int(n[idx])
            if a != b:
                out[idx] = self._colour(a, b)
        return out


@dataclass(frozen=True)
class DensityZero(ColouringRule):
    """2-colouring in which every monochromatic directed path has upper density 0.

    For distinct m, n let t be least with m != n (mod 2**t). The two residues
    mod 2**t agree below bit t-1 and differ at bit t-1, so exactly one endpoint
    has bit t-1 clear: that endpoint is congruent to some x < 2**(t-1) and is
    the red source. No tie is possible.
    """

    colour_count: int = field(default=2, init=False)

    def _colour(self, m: int, n: int) -> int:
        diff = m ^ n
        low = diff & -diff
        return RED if m & low == 0 else BLUE

    def _colour_array(self, m, n):
        diff = np.bitwise_xor(m, n)
        low = diff & -diff
        return np.where((m & low) == 0, RED, BLUE).astype(np.int8)


@dataclass(frozen=True)
class Extremal(ColouringRule):
    """The extremal 2-colouring c_r: residue classes 0 < 1 < ... < r-1.

    Within a class both directions are blue; from a lower class to a higher
    class is blue and the reverse is red.
    """

    r: int
    colour_count: int = field(default=2, init=False)

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"Extremal needs r >= 2, got {self.r}")

    def _colour(self, m: int, n: int) -> int:
        return RED if m % self.r > n % self.r else BLUE

    def _colour_array(self, m, n):
        return np.where(m % self.r > n % self.r, RED, BLUE).astype(np.int8)


@dataclass(frozen=True)
class ProductExtremal(ColouringRule):
    """(k+1)-colouring built from residue tuples modulo r_1..r_k.

    Vertices in the same class tuple get colour k+1 both ways. Otherwise, at
    the first coordinate t where the tuples differ, the endpoint that is
    smaller there sends colour k+1 forward and receives colour t back.
    ``moduli`` of length 1 reproduces Extremal(r_1).
    """

    moduli: tuple[int, ...]
    colour_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(r) for r in self.moduli))
        if not self.moduli or any(r < 2 for r in self.moduli):
            raise ValueError(f"ProductExtremal needs moduli >= 2, got {self.moduli}")
        object.__setattr__(self, "colour_count", len(self.moduli) + 1)

    def _colour(self, m: int, n: int) -> int:
        for t, r in enumerate(self.moduli, start=1):
            a, b = m % r, n % r
            if a != b:
                return self.colour_count if a < b else t
        return self.colour_count

    def _colour_array(self, m, n):
        m, n = np.broadcast_arrays(m, n)
        out = np.full(m.shape, self.colour_count, dtype=np.int8)
        open_ = np.ones(m.shape, dtype=bool)
        for t, r in enumerate(self.moduli, start=1):
            a, b = m % r, n % r
            hit = open_ & (a > b)
            out[hit] = t
            open_ &= a == b
        return out


class Explicit(ColouringRule):
    """Colour table on [1..horizon], e.g. parsed from a colouring file."""

    def __init__(self, table: np.ndarray, colour_count: int | None = None,
                 horizon_cap: int = DEFAULT_HORIZON_CAP):
        table = np.asarray(table, dtype=np.int8)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("explicit table must be square")
        n = table.shape[0]
        if n > horizon_cap:
            raise ValueError(f"horizon {n} exceeds cap {horizon_cap}")
        off = ~np.eye(n, dtype=bool)
        if n > 1 and table[off].min() < 1:
            raise ValueError("explicit table has uncoloured pairs")
        self.horizon = n
        self.colour_count = int(colour_count if colour_count is not None
                                else max(2, int(table.max(initial=0))))
        if n > 1 and table[off].max() > self.colour_count:
            raise ValueError("table colour exceeds colour_count")
        table = table.copy()
        np.fill_diagonal(table, 0)
        table.flags.writeable = False
        self._table = table

    @classmethod
    def from_pairs(cls, horizon: int, pairs: Mapping[tuple[int, int], int],
                   colour_count: int | None = None) -> Explicit:
        table = np.zeros((horizon, horizon), dtype=np.int8)
        for (m, n), c in pairs.items():
            table[m - 1, n - 1] = c
        return cls(table, colour_count)

    @property
    def table(self) -> np.ndarray:
        return self._table

    def check_domain(self, vertices):
        for v in vertices:
            if not 1 <= v <= self.horizon:
                raise OutOfDomainError(f"vertex {v} outside explicit horizon [1..{self.horizon}]")

    def _colour(self, m, n):
        return int(self._table[m - 1, n - 1])

    def _colour_array(self, m, n):
        return self._table[m - 1, n - 1]

    def __eq__(self, other):
        return (isinstance(other, Explicit) and self.colour_count == other.colour_count
                and np.array_equal(self._table, other._table))

    def __hash__(self):
        return hash((self.horizon, self.colour_count, self._table.tobytes()))

    def __repr__(self):
        return f"Explicit(horizon={self.horizon}, colour_count={self.colour_count})"


class Perturbed(ColouringRule):
    """A base rule with finitely many ordered pairs recoloured."""

    def __init__(self, base: ColouringRule, overrides: Mapping[tuple[int, int], int]):
        clean = {}
        for (m, n), c in overrides.items():
            if m == n:
                raise InvalidPairError(f"override on loop ({m},{n})")
            clean[(int(m), int(n))] = int(c)
        self.base = base
        self.overrides = dict(sorted(clean.items()))
        self.colour_count = max([base.colour_count, *self.overrides.values()])

    @property
    def touched(self) -> frozenset[int]:
        return frozenset(v for pair in self.overrides for v in pair)

    def check_domain(self, vertices):
        self.base.check_domain(vertices)

    def _colour(self, m, n):
        c = self.overrides.get((m, n))
        return c if c is not None else self.base._colour(m, n)

    def _colour_array(self, m, n):
        m, n = np.broadcast_arrays(m, n)
        out = np.array(self.base._colour_array(m, n), dtype=np.int8)
        for (a, b), c in self.overrides.items():
            out[(m == a) & (n == b)] = c
        return out

    def __repr__(self):
        return f"Perturbed({self.base!r}, {len(self.overrides)} overrides)"


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeededRandom(ColouringRule):
    """Each ordered pair coloured independently by a hash of (seed, m, n).

    ``weights`` are positive integers, one per colour (default: uniform).
    """

    colour_count: int
    seed: int
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.colour_count < 2:
            raise ValueError("need at least two colours")
        w = self.weights if self.weights is not None else (1,) * self.colour_count
        w = tuple(int(x) for x in w)
        if len(w) != self.colour_count or min(w) < 1:
            raise ValueError(f"weights must be {self.colour_count} positive integers")
        if sum(w) >= 1 << 32:
            raise ValueError("total weight must be below 2**32")
        object.__setattr__(self, "weights", w)

    @cached_property
    def _cumulative(self) -> list[int]:
        return list(np.cumsum(self.weights).tolist())

    def _key(self, m: int, n: int) -> int:
        z = _splitmix64((self.seed & _MASK64) ^ (m * 0xD1B54A32D192ED03 & _MASK64))
        return _splitmix64(z ^ (n * 0x8CB92BA72F3D8DD7 & _MASK64))

    def _colour(self, m, n):
        total = self._cumulative[-1]
        slot = ((self._key(m, n) >> 32) * total) >> 32
        return bisect.bisect_right(self._cumulative, slot) + 1

    def _colour_array(self, m, n):
        m, n = np.broadcast_arrays(np.asarray(m, dtype=np.uint64), np.asarray(n, dtype=np.uint64))
        with np.errstate(over="ignore"):
            z = _splitmix64_np(np.uint64(self.seed & _MASK64) ^ (m * np.uint64(0xD1B54A32D192ED03)))
            z = _splitmix64_np(z ^ (n * np.uint64(0x8CB92BA72F3D8DD7)))
        total = np.uint64(self._cumulative[-1])
        slot = ((z >> np.uint64(32)) * total) >> np.uint64(32)
        cum = np.asarray(self._cumulative, dtype=np.uint64)
        return (np.searchsorted(cum, slot, side="right") + 1).astype(np.int8)


def _splitmix64_np(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class PrefixView:
    """A coloured complete symmetric digraph on a finite sorted vertex set.

    Vertices are addressed by value in the public API; ``index`` maps a vertex
    to its row in ``colours``. Sorted order of indices equals sorted order of
    vertices, which the searches rely on for lexicographic tie-breaks.
    """

    def __init__(self, vertices: Sequence[int], colours: np.ndarray, colour_count: int):
        self.vertices = tuple(int(v) for v in vertices)
        colours = np.asarray(colours, dtype=np.int8)
        if colours.shape != (len(self.vertices), len(self.vertices)):
            raise ValueError("colour matrix shape does not match vertex count")
        colours.flags.writeable = False
        self.colours = colours
        self.colour_count = int(colour_count)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self._adj_cache: dict[tuple[str, int], tuple] = {}

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v):
        return v in self._index

    def __eq__(self, other):
        return (isinstance(other, PrefixView) and self.vertices == other.vertices
                and self.colour_count == other.colour_count
                and np.array_equal(self.colours, other.colours))

    def __repr__(self):
        return f"PrefixView(n={len(self)}, colours={self.colour_count})"

    def index(self, v: int) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise OutOfDomainError(f"vertex {v} not in view") from None

    def colour(self, m: int, n: int) -> int:
        if m == n:
            raise InvalidPairError(f"no colour for loop ({m},{n})")
        return int(self.colours[self.index(m), self.index(n)])

    def is_prefix(self) -> bool:
        return self.vertices == tuple(range(1, len(self.vertices) + 1))

    def _adjacency(self, kind: str, colour: int):
        key = (kind, colour)
        if key not in self._adj_cache:
            mat = self.colours == colour
            if kind == "in":
                mat = mat.T
            rows = tuple(tuple(np.flatnonzero(row).tolist()) for row in mat)
            self._adj_cache[key] = rows
        return self._adj_cache[key]

    def out_indices(self, colour: int) -> tuple[tuple[int, ...], ...]:
        """Per-index sorted out-neighbour indices in ``colour``."""
        return self._adjacency("out", colour)

    def in_indices(self, colour: int) -> tuple[tuple[int, ...], ...]:
        return self._adjacency("in", colour)

    def out_masks(self, colour: int) -> tuple[int, ...]:
        key = ("outmask", colour)
        if key not in self._adj_cache:
            self._adj_cache[key] = tuple(sum(1 << j for j in row) for row in self.out_indices(colour))
        return self._adj_cache[key]

    def in_masks(self, colour: int) -> tuple[int, ...]:
        key = ("inmask", colour)
        if key not in self._adj_cache:
            self._adj_cache[key] = tuple(sum(1 << j for j in row) for row in self.in_indices(colour))
        return self._adj_cache[key]

    def out_neighbours(self, v: int, colour: int) -> tuple[int, ...]:
        vs = self.vertices
        return tuple(vs[j] for j in self.out_indices(colour)[self.index(v)])

    def in_neighbours(self, v: int, colour: int) -> tuple[int, ...]:
        vs = self.vertices
        return tuple(vs[j] for j in self.in_indices(colour)[self.index(v)])

    def edges(self, colour: int) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[i], vs[j]) for i, j in np.argwhere(self.colours == colour).tolist()]

    def restrict(self, vertices: Iterable[int]) -> PrefixView:
        keep = sorted(set(vertices))
        idx = [self.index(v) for v in keep]
        return PrefixView(keep, self.colours[np.ix_(idx, idx)], self.colour_count)

    def without(self, removed: Iterable[int]) -> PrefixView:
        removed = set(removed)
        return self.restrict(v for v in self.vertices if v not in removed)

    def recoloured(self, changes: Mapping[tuple[int, int], int]) -> PrefixView:
        colours = self.colours.copy()
        for (m, n), c in changes.items():
            if m == n:
                raise InvalidPairError(f"no colour for loop ({m},{n})")
            colours[self.index(m), self.index(n)] = c
        count = max([self.colour_count, *changes.values()]) if changes else self.colour_count
        return PrefixView(self.vertices, colours, count)


def materialize(rule: ColouringRule, vertices: Iterable[int]) -> PrefixView:
    vs = check_vertex_set(vertices)
    rule.check_domain(vs)
    return PrefixView(vs, rule.colour_matrix(vs), rule.colour_count)


def prefix(rule: ColouringRule, n: int) -> PrefixView:
    """The view of ``rule`` on [1..n]."""
    return materialize(rule, range(1, n + 1))


# -- colouring file format --------------------------------------------------

HEADER_PREFIX = "dcolour v1"


def serialize_view(view: PrefixView) -> bytes:
    """Encode a view on [1..N] in the line-oriented ``dcolour v1`` format."""
    if not view.is_prefix():
        raise ValueError("only views on [1..N] can be serialised")
    n = len(view)
    buf = io.StringIO()
    buf.write(f"{HEADER_PREFIX} n={n} colours={view.colour_count}\n")
    colours = view.colours.tolist()
    for i in range(n):
        row = colours[i]
        m = i + 1
        buf.write("".join(f"{m} {j + 1} {row[j]}\n" for j in range(n) if j != i))
    return buf.getvalue().encode("ascii")


def _parse_header(line: str, lineno: int) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 4 or " ".join(parts[:2]) != HEADER_PREFIX:
        raise ParseError(f"malformed header {line!r}", lineno)
    fields = {}
    for part in parts[2:]:
        key, sep, value = part.partition("=")
        if not sep or not value.isdigit():
            raise ParseError(f"malformed header field {part!r}", lineno)
        fields[key] = int(value)
    if set(fields) != {"n", "colours"}:
        raise ParseError(f"malformed header {line!r}", lineno)
    if fields["n"] < 1 or fields["colours"] < 2:
        raise ParseError("header needs n >= 1 and colours >= 2", lineno)
    return fields["n"], fields["colours"]


def parse_view(data: bytes | str, horizon_cap: int = DEFAULT_HORIZON_CAP
               ) -> tuple[Explicit, tuple[int, ...]]:
    """Parse a colouring file into an Explicit rule and its vertex set [1..N]."""
    if isinstance(data, bytes):
        try:
            data = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError(f"non-ASCII input: {exc}") from None
    header = None
    table = None
    last = (0, 0)
    count = 0
    for lineno, raw in enumerate(data.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = _parse_header(line, lineno)
            n, k = header
            if n > horizon_cap:
                raise ParseError(f"n={n} exceeds horizon cap {horizon_cap}", lineno)
            table = np.zeros((n, n), dtype=np.int8)
            continue
        parts = line.split(" ")
        if len(parts) != 3 or not all(p.isdigit() for p in parts):
            raise ParseError(f"expected 'm n c', got {line!r}", lineno)
        m, v, c = (int(p) for p in parts)
        if m == v:
            raise ParseError(f"loop pair ({m},{v}) is not allowed", lineno)
        if not (1 <= m <= n and 1 <= v <= n):
            raise ParseError(f"pair ({m},{v}) outside [1..{n}]", lineno)
        if not 1 <= c <= k:
            raise ParseError(f"colour {c} outside [1..{k}]", lineno)
        if table[m - 1, v - 1]:
            raise ParseError(f"duplicate pair ({m},{v})", lineno)
        if (m, v) < last:
            raise ParseError(f"pair ({m},{v}) out of lexicographic order", lineno)
        table[m - 1, v - 1] = c
        last = (m, v)
        count += 1
    if header is None:
        raise ParseError("missing header")
    n, k = header
    if count != n * (n - 1):
        missing = np.argwhere((table == 0) & ~np.eye(n, dtype=bool))[0]
        raise ParseError(f"incomplete table: missing pair ({missing[0] + 1},{missing[1] + 1})")
    return Explicit(table, k, horizon_cap=horizon_cap), tuple(range(1, n + 1))


def read_view(path) -> PrefixView:
    with open(path, "rb") as fh:
        rule, vertices = parse_view(fh.read())
    return materialize(rule, vertices)


def write_view(view: PrefixView, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_view(view))


def parse_rule(text: str) -> ColouringRule:
    """Rule from a short descriptor: density-zero, extremal:R, product:R1,R2,..., random:K:SEED."""
    name, _, arg = text.partition(":")
    try:
        if name == "density-zero" and not arg:
            return DensityZero()
        if name == "extremal":
            return Extremal(int(arg))
        if name == "product":
            return ProductExtremal(tuple(int(x) for x in arg.split(",")))
        if name == "random":
            k, seed = arg.split(":")
            return SeededRandom(int(k), int(seed))
    except ValueError as exc:
        raise ValueError(f"bad rule {text!r}: {exc}") from None
    raise ValueError(f"unknown rule {text!r}")
