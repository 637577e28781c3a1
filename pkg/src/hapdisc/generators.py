"""Instance families: subcubes, characters, HAPs, Sylvester matrices, prime embedding.

Points of {0,1}^d are encoded as integers with the first coordinate as the
most significant bit, so point ``u`` sits at ground index
``sum(u_i * 2**(d - i))``.  Every generator and file format uses this order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import CapExceededError, SetSystem, SignMatrix

MAX_CUBE_DIM = 16
MAX_EMBED_DIM = 12
MAX_HAP_PREFIX = 5000
MAX_SYLVESTER = 12

_PATTERN_DIGITS = "01*"


def point_label(u: int, d: int) -> str:
    return format(u, f"0{d}b") if d else ""


def parse_point(bits: str) -> int:
    if bits and set(bits) - {"0", "1"}:
        raise ValueError(f"not a 0/1 string: {bits!r}")
    return int(bits, 2) if bits else 0


@dataclass(frozen=True)
class CubePattern:
    """A word over {0, 1, *}; the subcube of points agreeing on the fixed symbols."""

    symbols: str

    def __post_init__(self):
        if set(self.symbols) - set(_PATTERN_DIGITS):
            raise ValueError(f"pattern {self.symbols!r} uses symbols outside 0, 1, *")

    @property
    def d(self) -> int:
        return len(self.symbols)

    @property
    def fixed_mask(self) -> int:
        """Bits of the non-star coordinates, in point encoding."""
        d = self.d
        return sum(1 << (d - 1 - i) for i, c in enumerate(self.symbols) if c != "*")

    @property
    def fixed_value(self) -> int:
        d = self.d
        return sum(1 << (d - 1 - i) for i, c in enumerate(self.symbols) if c == "1")

    @property
    def stars(self) -> int:
        return self.symbols.count("*")

    def contains(self, u: int) -> bool:
        return (u & self.fixed_mask) == self.fixed_value

    def members(self) -> np.ndarray:
        """Boolean membership vector over all 2^d points."""
        pts = np.arange(1 << self.d, dtype=np.int64)
        return (pts & self.fixed_mask) == self.fixed_value

    def __str__(self) -> str:
        return self.symbols


@dataclass(frozen=True)
class CharacterIndex:
    d: int
    v: int

    def __post_init__(self):
        if self.d < 0 or self.v < 0 or self.v.bit_length() > self.d:
            raise ValueError(f"character index {self.v} does not fit in {self.d} bits")

    @classmethod
    def from_bits(cls, bits: str) -> "CharacterIndex":
        return cls(len(bits), parse_point(bits))

    @property
    def weight(self) -> int:
        return bin(self.v).count("1")

    @property
    def support(self) -> list[int]:
        """0-based coordinates (first coordinate = 0) where v has a one."""
        return [i for i in range(self.d) if self.v >> (self.d - 1 - i) & 1]

    def __str__(self) -> str:
        return point_label(self.v, self.d)


@dataclass(frozen=True, eq=False)
class EmbeddingWitness:
    d: int
    primes: tuple[int, ...]
    b_of_u: tuple[int, ...]
    a_of_v: dict
    n: int

    def __eq__(self, other):
        if not isinstance(other, EmbeddingWitness):
            return NotImplemented
        return (
            self.d == other.d
            and self.primes == other.primes
            and self.b_of_u == other.b_of_u
            and list(self.a_of_v.items()) == list(other.a_of_v.items())
            and self.n == other.n
        )

    def prime(self, i: int, bit: int) -> int:
        """p_{i,bit} with 1-based coordinate i."""
        return self.primes[2 * (i - 1) + bit]

    def image(self, point_mask: int) -> list[int]:
        """Integers b_u for the points set in a ground bitset."""
        return [self.b_of_u[u] for u in range(1 << self.d) if point_mask >> u & 1]


def patterns(d: int):
    """All words of {0,1,*}^d in base-3 order with 0 < 1 < *, first symbol most significant."""
    for word in itertools.product(_PATTERN_DIGITS, repeat=d):
        yield CubePattern("".join(word))


def _check_dim(d: int, hi: int = MAX_CUBE_DIM):
    if not 1 <= d <= hi:
        raise CapExceededError(f"dimension d={d} outside 1..{hi}")


def gen_subcubes(d: int) -> SetSystem:
    _check_dim(d)
    ground = tuple(point_label(u, d) for u in range(1 << d))
    pts = np.arange(1 << d, dtype=np.int64)
    sets = []
    for p in patterns(d):
        members = np.flatnonzero((pts & p.fixed_mask) == p.fixed_value)
        sets.append((p.symbols, sum(1 << int(u) for u in members)))
    return SetSystem(ground, tuple(sets))


def default_weight(d: int) -> int:
    if d % 8:
        raise ValueError(f"d={d} is not divisible by 8; supply the character weight k")
    return d // 8


def weight_vectors(d: int, k: int) -> list[int]:
    """All v in {0,1}^d with |v| = k, ascending as integers."""
    out = []
    for support in itertools.combinations(range(d), k):
        out.append(sum(1 << (d - 1 - i) for i in support))
    return sorted(out)


def parity(x: np.ndarray) -> np.ndarray:
    """Popcount parity of each entry of an integer array."""
    x = x.astype(np.uint64, copy=True)
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> np.uint64(shift)
    return (x & np.uint64(1)).astype(np.int8)


def character_row(d: int, v: int) -> np.ndarray:
    pts = np.arange(1 << d, dtype=np.int64)
    return (1 - 2 * parity(pts & v)).astype(np.int8)


def gen_characters(d: int, k: int) -> SignMatrix:
    _check_dim(d)
    if not 0 <= k <= d:
        raise ValueError(f"weight k={k} outside 0..{d}")
    vs = weight_vectors(d, k)
    pts = np.arange(1 << d, dtype=np.int64)
    entries = 1 - 2 * parity(pts[None, :] & np.array(vs, dtype=np.int64)[:, None])
    return SignMatrix(
        entries,
        row_labels=tuple(point_label(v, d) for v in vs),
        col_labels=tuple(point_label(u, d) for u in range(1 << d)),
    )


def hap_set_count(n: int, mode: str) -> int:
    if mode == "multiples":
        return n
    return sum(n // a for a in range(1, n + 1))


def gen_hap(n: int, mode: str) -> SetSystem:
    if mode not in ("prefix", "multiples"):
        raise ValueError(f"unknown mode {mode!r}")
    if n < 1:
        raise ValueError("n must be positive")
    if mode == "prefix" and n > MAX_HAP_PREFIX:
        raise CapExceededError(f"prefix HAP system capped at n={MAX_HAP_PREFIX}; use hap_disc_stream")
    if n > (1 << 20):
        raise CapExceededError("HAP ground too large to materialize")
    sets = []
    for a in range(1, n + 1):
        q = n // a
        if mode == "multiples":
            sets.append((str(a), sum(1 << (i * a - 1) for i in range(1, q + 1))))
            continue
        s = 0
        for k in range(1, q + 1):
            s |= 1 << (k * a - 1)
            sets.append((f"{a}:{k}", s))
    return SetSystem(tuple(range(1, n + 1)), tuple(sets))


def gen_sylvester(m: int) -> SignMatrix:
    if not 0 <= m <= MAX_SYLVESTER:
        raise CapExceededError(f"Sylvester order m={m} outside 0..{MAX_SYLVESTER}")
    idx = np.arange(1 << m, dtype=np.int64)
    return SignMatrix(1 - 2 * parity(idx[:, None] & idx[None, :]))


def first_primes(count: int) -> list[int]:
    """The first `count` primes by a sieve whose bound doubles until enough are found."""
    if count <= 0:
        return []
    bound = 16
    while True:
        sieve = bytearray([1]) * (bound + 1)
        sieve[0:2] = b"\x00\x00"
        for p in range(2, int(bound**0.5) + 1):
            if sieve[p]:
                sieve[p * p :: p] = bytearray(len(range(p * p, bound + 1, p)))
        found = [i for i in range(bound + 1) if sieve[i]]
        if len(found) >= count:
            return found[:count]
        bound *= 2


def gen_embedding(d: int) -> EmbeddingWitness:
    _check_dim(d, MAX_EMBED_DIM)
    primes = tuple(first_primes(2 * d))
    b_of_u = []
    for u in range(1 << d):
        b = 1
        for i in range(d):
            b *= primes[2 * i + (u >> (d - 1 - i) & 1)]
        b_of_u.append(b)
    a_of_v = {}
    # base-3 order built incrementally: products over prefixes
    prods = {"": 1}
    for i in range(d):
        nxt = {}
        for word, val in prods.items():
            nxt[word + "0"] = val * primes[2 * i]
            nxt[word + "1"] = val * primes[2 * i + 1]
            nxt[word + "*"] = val
        prods = nxt
    for p in patterns(d):
        a_of_v[p.symbols] = prods[p.symbols]
    return EmbeddingWitness(d, primes, tuple(b_of_u), a_of_v, b_of_u[-1])


def extend_pattern(v: CharacterIndex, w) -> CubePattern:
    """Place the bits of w on the support of v, stars everywhere else."""
    w = [int(b) for b in (w if not isinstance(w, str) else list(w))]
    support = v.support
    if len(w) != len(support):
        raise ValueError(f"w has length {len(w)}, v has weight {len(support)}")
    symbols = ["*"] * v.d
    for pos, bit in zip(support, w):
        if bit not in (0, 1):
            raise ValueError("w must be a bit vector")
        symbols[pos] = str(bit)
    return CubePattern("".join(symbols))


def representative(p: CubePattern) -> int:
    """The member of the subcube with every star replaced by 0."""
    return p.fixed_value


def subcube_count_by_size(d: int) -> dict[int, int]:
    return {1 << s: comb(d, s) * (1 << (d - s)) for s in range(d + 1)}
