"""Exact discrepancy, hereditary discrepancy and determinant search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import CapExceededError, Coloring, SignMatrix, as_matrix
from .rng import SplitMix64

MAX_DISC_COLS = 30
MAX_HERDISC_COLS = 16
MAX_DET_DIM = 64
DEFAULT_SUBSET_CAP = 10**8


@dataclass(frozen=True)
class ExactResult:
    value: int
    witness_coloring: Coloring | None = None
    witness_subset: int | None = None
    nodes_explored: int = 0


# ---------------------------------------------------------------- determinants


def det_exact(square) -> int:
    """Determinant by fraction-free (Bareiss) elimination over Python ints."""
    if isinstance(square, SignMatrix):
        square = square.entries
    rows = [[int(x) for x in row] for row in np.asarray(square, dtype=object).tolist()]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    if n > MAX_DET_DIM:
        raise CapExceededError(f"dimension {n} exceeds {MAX_DET_DIM}")
    if n == 0:
        return 1
    a = rows
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - f * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


class _Expansion:
    """Index tables to extend a wedge of k columns by one more column.

    For each (k+1)-row subset J (lex order) and each position p in J, the
    k-minor on rows J without J[p] contributes with sign (-1)^(p + k) times
    the new column's entry in row J[p] (Laplace along the last column).
    """

    def __init__(self, m: int, k: int):
        lower = {c: i for i, c in enumerate(itertools.combinations(range(m), k))}
        upper = list(itertools.combinations(range(m), k + 1))
        self.size = len(upper)
        self.terms = []  # one entry per position p: (lower idx array, row array, sign array)
        for p in range(k + 1):
            idx = np.array([lower[J[:p] + J[p + 1 :]] for J in upper], dtype=np.int64)
            row = np.array([J[p] for J in upper], dtype=np.int64)
            self.terms.append((idx, row, -1 if (p + k) % 2 else 1))


def _wedge_dtype(A: np.ndarray):
    # Hadamard bound on every minor: product of the largest column norms
    norms = np.sort(np.sqrt((A.astype(np.float64) ** 2).sum(axis=0)))[::-1]
    bound = float(np.prod(np.maximum(norms[: A.shape[0]], 1.0))) if norms.size else 1.0
    return np.int64 if bound < 2.0**60 else object


def minors_by_first_column(A: np.ndarray):
    """Yield (first_column, dets) for all maximal minors of a k x n matrix.

    Column subsets are visited in lexicographic order; each yielded chunk
    holds the subsets starting with ``first_column`` in lex order.
    """
    A = np.asarray(A)
    k, n = A.shape
    if k == 0:
        yield None, np.array([1], dtype=np.int64)
        return
    dtype = _wedge_dtype(A)
    A = A.astype(dtype)
    tables = [_Expansion(k, j) for j in range(1, k)]
    for c1 in range(n - k + 1):
        wedge = A[:, c1][None, :].copy()  # rows of Lambda^1 coordinates
        last = np.array([c1], dtype=np.int64)
        for j in range(1, k):
            need = k - j - 1
            counts = np.maximum(n - 1 - need - last, 0)
            total = int(counts.sum())
            parent = np.repeat(np.arange(last.size), counts)
            starts = np.repeat(np.cumsum(counts) - counts, counts)
            new_last = last[parent] + 1 + (np.arange(total) - starts)
            tab = tables[j - 1]
            out = np.zeros((total, tab.size), dtype=dtype)
            pw = wedge[parent]
            for idx, row, sgn in tab.terms:
                term = pw[:, idx] * A[row[None, :], new_last[:, None]]
                if sgn > 0:
                    out += term
                else:
                    out -= term
            wedge, last = out, new_last
        yield c1, wedge[:, 0]


def unrank_combination(index: int, n: int, k: int) -> tuple[int, ...]:
    """The index-th k-subset of range(n) in lexicographic order."""
    out = []
    c = 0
    for slot in range(k, 0, -1):
        while True:
            block = comb(n - c - 1, slot - 1)
            if index < block:
                out.append(c)
                c += 1
                break
            index -= block
            c += 1
    return tuple(out)


def max_minor(A: np.ndarray) -> tuple[int, tuple[int, ...], int]:
    """(max |det|, lex-first maximizing column subset, signed det) over k-column subsets."""
    A = np.asarray(A)
    k, n = A.shape
    best, best_cols, best_det = -1, (), 0
    for c1, dets in minors_by_first_column(A):
        if c1 is None:
            return 1, (), 1
        absd = np.abs(dets)
        i = int(np.argmax(absd))
        val = int(absd[i])
        if val > best:
            rest = unrank_combination(i, n - c1 - 1, k - 1)
            best, best_cols, best_det = val, (c1,) + tuple(c1 + 1 + r for r in rest), int(dets[i])
    return best, best_cols, best_det


def sum_squared_minors(A: np.ndarray) -> int:
    """Sum over all maximal column subsets of det^2 (exact)."""
    total = 0
    for _, dets in minors_by_first_column(np.asarray(A)):
        total += sum(int(x) * int(x) for x in dets.tolist())
    return total


@dataclass(frozen=True)
class DetSubsetResult:
    columns: tuple[int, ...]
    det: int
    success: bool
    restarts: int = 0

    @property
    def root(self) -> float:
        """|det|^(1/M)."""
        m = len(self.columns)
        if self.det == 0 or m == 0:
            return 0.0
        return math.exp(math.log(abs(self.det)) / m)


def averaging_bound(n_cols: int, m_rows: int) -> float:
    """sqrt(N) * C(N, M)^(-1/(2M)): some M-subset of an orthogonal-row matrix reaches this."""
    return math.sqrt(n_cols) * math.exp(-math.log(comb(n_cols, m_rows)) / (2 * m_rows))


def find_large_det_subset(
    matrix,
    strategy: str = "exhaustive",
    seed: int = 0,
    threshold: float = 0.0,
    restarts: int = 200,
    max_subsets: int = DEFAULT_SUBSET_CAP,
) -> DetSubsetResult:
    """Search M-column subsets of an M x N matrix for a large |det|^(1/M)."""
    A = as_matrix(matrix).entries.astype(np.int64)
    m, n = A.shape
    if m > n:
        raise ValueError(f"matrix has more rows ({m}) than columns ({n})")
    if threshold < 0 or restarts < 1:
        raise ValueError("threshold must be >= 0 and the restart budget positive")
    if strategy == "exhaustive":
        if comb(n, m) > max_subsets:
            raise CapExceededError(f"C({n},{m}) subsets exceed the cap {max_subsets}")
        _, cols, det = max_minor(A)
        found = DetSubsetResult(cols, det, False)
        return DetSubsetResult(cols, det, det != 0 and found.root >= threshold * (1 - 1e-12))
    if strategy != "random-swap":
        raise ValueError(f"unknown strategy {strategy!r}")
    return _random_swap(A, seed, threshold, restarts)


def _random_swap(A: np.ndarray, seed: int, threshold: float, restarts: int) -> DetSubsetResult:
    m, n = A.shape
    rng = SplitMix64(seed)
    Af = A.astype(np.float64)
    best = None
    for r in range(1, restarts + 1):
        W = sorted(rng.sample(n, m))
        det = det_exact(A[:, W])
        while m < n:
            inside = set(W)
            outside = [j for j in range(n) if j not in inside]
            # candidate p*len(outside)+j replaces W[p] by outside[j]
            cand = np.repeat(Af[:, W][None], m * len(outside), axis=0)
            for p in range(m):
                cand[p * len(outside) : (p + 1) * len(outside), :, p] = Af[:, outside].T
            i = int(np.argmax(np.abs(np.linalg.det(cand))))
            p, j = divmod(i, len(outside))
            trial = sorted(W[:p] + W[p + 1 :] + [outside[j]])
            tdet = det_exact(A[:, trial])
            if abs(tdet) <= abs(det):
                break
            W, det = trial, tdet
        cur = DetSubsetResult(tuple(W), det, False, r)
        if best is None or abs(det) > abs(best.det):
            best = cur
        if det != 0 and cur.root >= threshold * (1 - 1e-12):
            return DetSubsetResult(tuple(W), det, True, r)
    return DetSubsetResult(best.columns, best.det, False, restarts)


# ---------------------------------------------------------------- discrepancy


def _row_lower_bounds(s: np.ndarray, rem: np.ndarray) -> np.ndarray:
    a = np.abs(s)
    return np.where(a >= rem, a - rem, (rem - a) & 1)


def disc_exact(matrix) -> ExactResult:
    """Minimum over all colorings of max |row . x| by depth-first branch and bound.

    Columns are branched in order of decreasing support (ties by index), +1
    before -1; the witness is the first optimum in that order.
    """
    M = as_matrix(matrix)
    A = M.entries.astype(np.int64)
    m, n = A.shape
    if n > MAX_DISC_COLS:
        raise CapExceededError(f"{n} columns exceed the exact-disc cap {MAX_DISC_COLS}")
    if m == 0 or n == 0:
        return ExactResult(0, Coloring.ones(n), None, 1)
    support = np.count_nonzero(A, axis=0)
    order = sorted(range(n), key=lambda j: (-support[j], j))
    cols = [A[:, j] for j in order]
    absA = np.abs(A)
    rem0 = absA.sum(axis=1)
    floor = int(((rem0 & 1) == 1).any())  # an odd row can never balance

    best = [int(rem0.max()) + 1]
    best_x: list = [None]
    x = [0] * n
    nodes = [0]

    def dfs(depth: int, s: np.ndarray, rem: np.ndarray) -> bool:
        nodes[0] += 1
        if depth == n:
            val = int(np.abs(s).max())
            if val < best[0]:
                best[0] = val
                best_x[0] = list(x)
                return val <= floor
            return False
        col = cols[depth]
        rem2 = rem - np.abs(col)
        for sign in (1, -1):
            s2 = s + sign * col
            if int(_row_lower_bounds(s2, rem2).max()) >= best[0]:
                continue
            x[depth] = sign
            if dfs(depth + 1, s2, rem2):
                return True
        return False

    dfs(0, np.zeros(m, dtype=np.int64), rem0)
    values = np.empty(n, dtype=np.int8)
    for pos, j in enumerate(order):
        values[j] = best_x[0][pos]
    return ExactResult(best[0], Coloring(values), None, nodes[0])


def disc_brute(matrix) -> int:
    """Reference minimum over all 2^n colorings; small n only."""
    A = as_matrix(matrix).entries.astype(np.int64)
    m, n = A.shape
    if m == 0 or n == 0:
        return 0
    xs = 1 - 2 * ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1)
    return int(np.abs(xs @ A.T).max(axis=1).min())


def disc_all_subsets(matrix) -> tuple[np.ndarray, int]:
    """disc of the column restriction to every subset W, indexed by W as a bitmask.

    Every vector x in {-1,0,+1}^n is a coloring of its support, so the table
    is the minimum of ||Ax||_inf grouped by support.  Returns the table and
    the number of sign vectors evaluated.
    """
    A = as_matrix(matrix).entries.astype(np.int64)
    m, n = A.shape
    if n > MAX_HERDISC_COLS:
        raise CapExceededError(f"{n} columns exceed the hereditary cap {MAX_HERDISC_COLS}")
    support = np.count_nonzero(A, axis=1)
    single_cols = 0
    for r in np.flatnonzero(support == 1):
        single_cols |= 1 << int(np.flatnonzero(A[r])[0])
    R = A[support >= 2]
    if R.shape[0]:
        # rows equal up to sign have equal |row . x|
        lead = R[np.arange(R.shape[0]), np.argmax(R != 0, axis=1)]
        R = np.unique(R * lead[:, None], axis=0)
    masks = np.arange(1 << n, dtype=np.int64)
    if R.shape[0] == 0:
        table = ((masks & single_cols) != 0).astype(np.int64)
        return table, 3**n
    R = R.astype(np.int8)
    inner = min(n, 10)
    outer = n - inner
    T = np.zeros((R.shape[0], 1), dtype=np.int8)
    inner_mask = np.zeros(1, dtype=np.int64)
    for j in range(inner):
        col = R[:, j : j + 1]
        T = np.concatenate([T, T + col, T - col], axis=1)
        inner_mask = np.concatenate([inner_mask, inner_mask | (1 << j), inner_mask | (1 << j)])
    perm = np.argsort(inner_mask, kind="stable")
    sorted_mask = inner_mask[perm]
    starts = np.flatnonzero(np.r_[True, sorted_mask[1:] != sorted_mask[:-1]])
    T = T[:, perm]
    table = np.full(1 << n, np.iinfo(np.int64).max, dtype=np.int64)
    low = np.arange(1 << inner, dtype=np.int64)
    evaluated = 0
    Rout = R[:, inner:].astype(np.int64)
    for digits in itertools.product((0, 1, -1), repeat=outer):
        nz = [dg for dg in digits if dg]
        if nz and nz[0] < 0:
            continue  # x and -x have equal value and equal support
        y = np.array(digits, dtype=np.int64)
        omask = sum(1 << (inner + i) for i, dg in enumerate(digits) if dg)
        c = (Rout @ y).astype(np.int8) if outer else np.zeros(R.shape[0], dtype=np.int8)
        vals = np.abs(T + c[:, None]).max(axis=0)
        grp = np.minimum.reduceat(vals, starts).astype(np.int64)
        sl = omask | low
        np.minimum(table[sl], grp, out=grp)
        table[sl] = grp
        evaluated += vals.size
    if single_cols:
        table = np.where((masks & single_cols) != 0, np.maximum(table, 1), table)
    return table, evaluated


def herdisc_exact(system_or_matrix, cap: int = MAX_HERDISC_COLS) -> ExactResult:
    """max over ground subsets W of disc of the restriction to W.

    The witness is the smallest maximizing W, read as an integer whose bit j
    is ground element j.
    """
    M = as_matrix(system_or_matrix)
    cap = min(cap, MAX_HERDISC_COLS)
    if M.cols > cap:
        raise CapExceededError(f"ground size {M.cols} exceeds cap {cap}")
    if M.rows == 0 or M.cols == 0:
        return ExactResult(0, None, 0, 1)
    table, evaluated = disc_all_subsets(M)
    w = int(np.argmax(table))
    return ExactResult(int(table[w]), None, w, evaluated)


def restricted_disc(system_or_matrix, subset: int) -> int:
    """disc_exact of the restriction to a ground bitset."""
    M = as_matrix(system_or_matrix)
    return disc_exact(M.restrict_columns(subset)).value

