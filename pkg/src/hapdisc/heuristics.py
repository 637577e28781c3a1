"""Upper-bound colorings: Beck-Fiala floating colors, ternary rule, baselines."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import CapExceededError, Coloring, SetSystem, as_matrix, bits_of, eval_discrepancy
from .rng import SplitMix64

BF_MAX_GROUND = 2000
BF_MAX_SETS = 20000
MAX_TERNARY = 10**8


@dataclass(frozen=True)
class HeuristicOutcome:
    coloring: Coloring
    achieved: int
    guarantee: int | None
    iterations: int


def _kernel_vector(rows: list[list[int]], width: int) -> list[Fraction]:
    """Nonzero solution of rows . z = 0; first free column set to 1, other free columns 0."""
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = next(c for c in range(width) if c not in set(pivots))
    z = [Fraction(0)] * width
    z[free] = Fraction(1)
    for i, c in enumerate(pivots):
        z[c] = -mat[i][free]
    return z


def beck_fiala(system: SetSystem) -> HeuristicOutcome:
    """Iterative rounding with floating colors; discrepancy at most 2t - 1 for degree t.

    A set stays active while it holds more than t floating elements; active
    sets keep zero sum.  Each round moves along a kernel vector of the
    active constraints, restricted to the first r+1 floating elements (r
    active sets, fewer than floating elements by double counting), until a
    coordinate reaches +-1 and freezes.  Arithmetic is exact.
    """
    n, m = system.n, system.m
    if n > BF_MAX_GROUND or m > BF_MAX_SETS:
        raise CapExceededError(f"Beck-Fiala capped at {BF_MAX_GROUND} elements and {BF_MAX_SETS} sets")
    members = [bits_of(s) for _, s in system.sets]
    containing: list[list[int]] = [[] for _ in range(n)]
    for j, mem in enumerate(members):
        for i in mem:
            containing[i].append(j)
    t = max((len(c) for c in containing), default=0)
    x = [Fraction(0)] * n
    floating = list(range(n))
    is_floating = [True] * n
    live = [len(mem) for mem in members]
    member_sets = [set(mem) for mem in members]
    iterations = 0
    while floating:
        iterations += 1
        active = [j for j in range(m) if live[j] > t]
        cols = floating[: len(active) + 1]
        rows = [[1 if i in member_sets[j] else 0 for i in cols] for j in active]
        z = _kernel_vector(rows, len(cols)) if rows else [Fraction(1)] + [Fraction(0)] * (len(cols) - 1)
        step = None
        for i, zi in zip(cols, z):
            if zi > 0:
                lim = (1 - x[i]) / zi
            elif zi < 0:
                lim = (-1 - x[i]) / zi
            else:
                continue
            if step is None or lim < step:
                step = lim
        for i, zi in zip(cols, z):
            if zi:
                x[i] += step * zi
                if abs(x[i]) == 1:
                    is_floating[i] = False
                    for j in containing[i]:
                        live[j] -= 1
        floating = [i for i in floating if is_floating[i]]
    coloring = Coloring(np.array([int(v) for v in x], dtype=np.int8))
    achieved = eval_discrepancy(system, coloring).value if m else 0
    guarantee = max(2 * t - 1, 0)
    if achieved > guarantee:
        raise AssertionError(f"Beck-Fiala produced {achieved} > 2t-1 = {guarantee}")
    return HeuristicOutcome(coloring, achieved, guarantee, iterations)


def _ternary_signs(n: int) -> np.ndarray:
    # f(3m) = f(m), f(3m+1) = +1, f(3m+2) = -1; index 0 unused
    f = np.empty(n + 1, dtype=np.int8)
    f[0] = 0
    f[1::3] = 1
    f[2::3] = -1
    if n >= 3:
        f[3::3] = _ternary_signs(n // 3)[1:]
    return f


def ternary_coloring(n: int) -> Coloring:
    """f(i) = -1 exactly when the last nonzero ternary digit of i is 2."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n > MAX_TERNARY:
        raise CapExceededError(f"n={n} exceeds {MAX_TERNARY}")
    return Coloring(_ternary_signs(n)[1:])


def random_coloring(n: int, seed: int = 0) -> Coloring:
    if n < 1:
        raise ValueError("n must be positive")
    return Coloring(SplitMix64(seed).signs(n))


def greedy_improve(matrix, start: Coloring, max_passes: int = 1000) -> HeuristicOutcome:
    """Flip the single sign that lowers max |row sum| the most, until stuck."""
    A = as_matrix(matrix).entries.astype(np.int64)
    x = np.array(start.values, dtype=np.int64)
    if x.size != A.shape[1]:
        raise ValueError(f"coloring has length {x.size}, expected {A.shape[1]}")
    s = A @ x
    value = int(np.abs(s).max()) if s.size else 0
    passes = 0
    while passes < max_passes and x.size and s.size:
        flipped = s[:, None] - 2 * A * x[None, :]
        vals = np.abs(flipped).max(axis=0)
        j = int(np.argmin(vals))
        if vals[j] >= value:
            break
        x[j] = -x[j]
        s = flipped[:, j].copy()
        value = int(vals[j])
        passes += 1
    return HeuristicOutcome(Coloring(x), value, None, passes)
