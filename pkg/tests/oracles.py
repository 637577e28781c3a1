"""Independent brute-force references; none of these call into the package's solvers."""

from __future__ import annotations

import itertools
from fractions import Fraction


def det_cofactor(a) -> int:
    a = [list(map(int, r)) for r in a]
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        if a[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in a[1:]]
            total += (-1) ** j * a[0][j] * det_cofactor(minor)
    return total


def det_fraction(a) -> int:
    """Plain Gaussian elimination over the rationals."""
    m = [[Fraction(int(x)) for x in r] for r in a]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(det)


def disc_all_colorings(rows) -> int:
    """min over x in {-1,1}^n of max |row . x| by full enumeration."""
    rows = [list(map(int, r)) for r in rows]
    if not rows or not rows[0]:
        return 0
    n = len(rows[0])
    best = None
    for x in itertools.product((1, -1), repeat=n):
        val = max(abs(sum(a * b for a, b in zip(r, x))) for r in rows)
        best = val if best is None else min(best, val)
    return best


def herdisc_all_subsets(rows) -> tuple[int, int]:
    """(max over column subsets W of disc of the restriction, smallest maximizing W as int)."""
    rows = [list(map(int, r)) for r in rows]
    n = len(rows[0]) if rows else 0
    best, arg = 0, 0
    for w in range(1 << n):
        cols = [j for j in range(n) if w >> j & 1]
        sub = [[r[j] for j in cols] for r in rows]
        val = disc_all_colorings(sub) if cols else 0
        if val > best:
            best, arg = val, w
    return best, arg


def hap_disc_direct(f, mode: str) -> int:
    """max over a, k of |sum_{i<=k} f(ia)| from explicit sums; f is 1-indexed via f[i-1]."""
    n = len(f)
    best = 0
    for a in range(1, n + 1):
        ks = range(1, n // a + 1) if mode == "prefix" else [n // a]
        for k in ks:
            best = max(best, abs(sum(f[i * a - 1] for i in range(1, k + 1))))
    return best


def subcube_points(pattern: str) -> list[str]:
    """Points of {0,1}^d matching the pattern, by string comparison."""
    d = len(pattern)
    out = []
    for bits in itertools.product("01", repeat=d):
        if all(p == "*" or p == b for p, b in zip(pattern, bits)):
            out.append("".join(bits))
    return out


def ternary_rule(i: int) -> int:
    while i % 3 == 0:
        i //= 3
    return -1 if i % 3 == 2 else 1


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


def splitmix64_reference(seed: int, count: int) -> list[int]:
    mask = (1 << 64) - 1
    out = []
    state = seed & mask
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out
