"""Determinant lower-bound certificates and exact checks of the subcube identities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .core import CapExceededError, as_matrix, bits_of, restrict
from .exact import (
    DEFAULT_SUBSET_CAP,
    averaging_bound,
    det_exact,
    find_large_det_subset,
    herdisc_exact,
    minors_by_first_column,
    unrank_combination,
)
from .generators import (
    CharacterIndex,
    EmbeddingWitness,
    character_row,
    extend_pattern,
    gen_characters,
    gen_hap,
    gen_subcubes,
    patterns,
    representative,
)
from .rng import SplitMix64

REL_TOL = 1e-9
MAX_FULL_SCAN_DIM = 6
MAX_SAMPLED_SCAN_DIM = 8
SAMPLED_A = 10**4


@dataclass(frozen=True)
class LowerBoundCert:
    k: int
    row_subset: tuple[int, ...]
    col_subset: tuple[int, ...]
    det: int
    bound: float


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    detail: str = ""
    trials: int = 0
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed and self.detail:
            raise ValueError("a passing report carries no detail")


def lsv_bound(det: int, k: int) -> float:
    """Half the k-th root of |det|."""
    if det == 0:
        return 0.0
    a = abs(det)
    if a.bit_length() < 1000:
        return 0.5 * float(a) ** (1.0 / k)
    return 0.5 * math.exp(math.log(a) / k)


def _beats(det_a: int, k_a: int, det_b: int, k_b: int) -> bool:
    """|det_a|^(1/k_a) > |det_b|^(1/k_b), decided in integers."""
    return abs(det_a) ** k_b > abs(det_b) ** k_a


def _submatrix_count(m: int, n: int, kmax: int) -> int:
    return sum(comb(m, k) * comb(n, k) for k in range(1, kmax + 1))


def detlb_certificate(
    matrix,
    kmax: int | None = None,
    strategy: str = "exhaustive",
    seed: int = 0,
    restarts: int = 8,
    max_submatrices: int = DEFAULT_SUBSET_CAP,
) -> LowerBoundCert:
    """Best square submatrix for herdisc(A) >= |det B|^(1/k) / 2."""
    A = as_matrix(matrix).entries.astype(np.int64)
    m, n = A.shape
    top = min(m, n)
    if kmax is None:
        kmax = top
    if not 1 <= kmax <= top:
        raise ValueError(f"kmax={kmax} must lie in 1..{top}")
    if strategy == "exhaustive":
        if _submatrix_count(m, n, kmax) > max_submatrices:
            raise CapExceededError("too many submatrices for an exhaustive search")
        k, rows, cols, det = _exhaustive_detlb(A, kmax)
    elif strategy == "greedy":
        k, rows, cols = _greedy_detlb(A, kmax, seed, restarts)
        det = det_exact(A[np.ix_(rows, cols)])
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return LowerBoundCert(k, tuple(rows), tuple(cols), det, lsv_bound(det, k))


def _exhaustive_detlb(A: np.ndarray, kmax: int):
    m, n = A.shape
    best = (1, [0], [0], int(A[0, 0]))
    for k in range(1, kmax + 1):
        level = None  # (|det|, rows, cols, det)
        # loop over the smaller side, enumerate the other side's subsets in bulk
        by_rows = comb(m, k) <= comb(n, k)
        outer = itertools.combinations(range(m if by_rows else n), k)
        for fixed in outer:
            sub = A[list(fixed), :] if by_rows else A[:, list(fixed)].T
            span = n if by_rows else m
            for c1, dets in minors_by_first_column(sub):
                absd = np.abs(dets)
                i = int(np.argmax(absd))
                val = int(absd[i])
                if level is not None and val < level[0]:
                    continue
                other = (c1,) + tuple(c1 + 1 + r for r in unrank_combination(i, span - c1 - 1, k - 1))
                rows, cols = (fixed, other) if by_rows else (other, fixed)
                cand = (val, list(rows), list(cols), int(dets[i]))
                if level is None or val > level[0] or (cand[1], cand[2]) < (level[1], level[2]):
                    level = cand
        if level is not None and _beats(level[0], k, best[3], best[0]):
            best = (k, level[1], level[2], level[3])
    return best


def _greedy_detlb(A: np.ndarray, kmax: int, seed: int, restarts: int):
    """Grow (rows, cols) by the pair with the largest Schur complement entry."""
    m, n = A.shape
    Af = A.astype(np.float64)
    rng = SplitMix64(seed)
    nz = np.flatnonzero(A.reshape(-1))
    if nz.size == 0:
        return 1, [0], [0]
    best_score, best = -math.inf, None
    for r in range(restarts):
        start = int(np.argmax(np.abs(A))) if r == 0 else int(nz[rng.below(nz.size)])
        rows, cols = [start // n], [start % n]
        logdet = math.log(abs(Af[rows[0], cols[0]]))
        while True:
            score = logdet / len(rows)
            if score > best_score + 1e-12:
                best_score, best = score, (len(rows), sorted(rows), sorted(cols))
            if len(rows) == kmax:
                break
            B = Af[np.ix_(rows, cols)]
            schur = Af - Af[:, cols] @ np.linalg.solve(B, Af[rows, :])
            schur[rows, :] = 0
            schur[:, cols] = 0
            i = int(np.argmax(np.abs(schur)))
            piv = abs(schur.flat[i])
            if piv < 1e-9:
                break
            rows.append(i // n)
            cols.append(i % n)
            logdet += math.log(piv)
    return best


def verify_certificate(matrix, cert: LowerBoundCert) -> CheckReport:
    A = as_matrix(matrix).entries
    m, n = A.shape
    k = cert.k
    if k < 1 or len(cert.row_subset) != k or len(cert.col_subset) != k:
        raise ValueError("malformed certificate: order k must be >= 1 and match both index lists")
    for name, idx, hi in (("row", cert.row_subset, m), ("column", cert.col_subset, n)):
        if len(set(idx)) != k or min(idx) < 0 or max(idx) >= hi:
            raise ValueError(f"malformed certificate: {name} indices repeat or fall outside 0..{hi - 1}")
    det = det_exact(A[np.ix_(list(cert.row_subset), list(cert.col_subset))])
    bound = lsv_bound(det, k)
    problems = []
    if det != cert.det:
        problems.append(f"det mismatch: certificate says {cert.det}, submatrix has {det}")
    if abs(bound - cert.bound) > REL_TOL * max(1.0, abs(bound)):
        problems.append(f"bound mismatch: certificate says {cert.bound!r}, recomputed {bound!r}")
    return CheckReport(
        "cert",
        not problems,
        "; ".join(problems),
        1,
        {"k": k, "det": str(det), "bound": bound},
    )


def check_char_decomposition(d: int, v: CharacterIndex) -> CheckReport:
    """chi_v equals the signed sum of the 2^|v| subcube indicators S_{v(w)}."""
    if v.d != d:
        raise ValueError(f"character index has length {v.d}, expected {d}")
    if d > 16 or v.weight > 12:
        raise CapExceededError("character decomposition capped at d <= 16 and |v| <= 12")
    chi = character_row(d, v.v).astype(np.int64)
    total = np.zeros(1 << d, dtype=np.int64)
    for w in itertools.product((0, 1), repeat=v.weight):
        pat = extend_pattern(v, w)
        sign = -1 if bin(v.v & representative(pat)).count("1") & 1 else 1
        total += sign * pat.members()
    bad = np.flatnonzero(total != chi)
    detail = ""
    if bad.size:
        u = int(bad[0])
        detail = f"{bad.size} points fail, first u={format(u, f'0{d}b')}: chi={chi[u]}, sum={total[u]}"
    return CheckReport(f"chars d={d} v={v}", not bad.size, detail, 1 << d, {"terms": 1 << v.weight})


def _divisor_masks(witness: EmbeddingWitness, a_values: np.ndarray) -> list[int]:
    """For each a, the bitset of points u with a | b_u."""
    npts = 1 << witness.d
    b = np.array(witness.b_of_u, dtype=np.int64)
    out: list[int] = []
    chunk = max(1, 2_000_000 // npts)
    if npts <= 64:
        weights = np.uint64(1) << np.arange(npts, dtype=np.uint64)
        for lo in range(0, a_values.size, chunk):
            div = (b[None, :] % a_values[lo : lo + chunk, None]) == 0
            masks = (div.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
            out.extend(np.unique(masks).tolist())
        return out
    for lo in range(0, a_values.size, chunk):
        div = (b[None, :] % a_values[lo : lo + chunk, None]) == 0
        packed = np.packbits(div, axis=1, bitorder="little")
        out.extend(int.from_bytes(row.tobytes(), "little") for row in packed)
    return out


def check_embedding(witness: EmbeddingWitness, trials: int = 100, seed: int = 0) -> CheckReport:
    """Divisibility by a_v mirrors subcube membership, and HAP maxima equal subcube maxima.

    Up to d = 6 every a in [n] is scanned; d = 7, 8 scan the a_v plus 10^4
    seeded random a.
    """
    d = witness.d
    if d > MAX_SAMPLED_SCAN_DIM:
        raise CapExceededError(f"embedding check capped at d <= {MAX_SAMPLED_SCAN_DIM}")
    npts = 1 << d
    cube_masks = {s for _, s in gen_subcubes(d).sets}
    pats = list(patterns(d))
    b = np.array(witness.b_of_u, dtype=np.int64)
    failures = []

    # (i) a_v | b_u  <=>  u in S_v
    for pat in pats:
        a = witness.a_of_v[pat.symbols]
        if not np.array_equal(b % a == 0, pat.members()):
            u = int(np.flatnonzero((b % a == 0) != pat.members())[0])
            failures.append(f"divisibility: a_{pat}={a} vs b_{format(u, f'0{d}b')}")
            break

    # (ii) every nonempty {b in B_d : a | b} is the image of a subcube
    if d <= MAX_FULL_SCAN_DIM:
        a_values = np.arange(1, witness.n + 1, dtype=np.int64)
        scan = "full"
    else:
        rng = SplitMix64(seed ^ 0x5EED)
        sampled = [1 + rng.below(witness.n) for _ in range(SAMPLED_A)]
        a_values = np.array([witness.a_of_v[p.symbols] for p in pats] + sampled, dtype=np.int64)
        scan = "sampled"
    hap_masks = set(_divisor_masks(witness, a_values))
    hap_masks.discard(0)
    stray = sorted(hap_masks - cube_masks)
    if stray:
        failures.append(f"{len(stray)} divisor sets are not subcubes, e.g. points {bits_of(stray[0])}")
    if hap_masks != cube_masks and not stray:
        failures.append("some subcube is not cut out by any scanned a")

    # (iii) max over subcubes equals max over HAPs for random (f, U)
    rng = SplitMix64(seed)
    pts = np.arange(npts)
    cube_mat = np.array([[m >> int(u) & 1 for u in pts] for m in sorted(cube_masks)], dtype=np.int64)
    hap_mat = np.array([[m >> int(u) & 1 for u in pts] for m in sorted(hap_masks)], dtype=np.int64)
    mismatches = 0
    for _ in range(trials):
        f = rng.signs(npts).astype(np.int64)
        U = rng.bits(npts)
        g = np.where(U, f, 0)
        lhs = int(np.abs(cube_mat @ g).max())
        rhs = int(np.abs(hap_mat @ g).max()) if hap_mat.size else 0
        if lhs != rhs:
            mismatches += 1
    if mismatches:
        failures.append(f"{mismatches} of {trials} trials have different maxima")
    return CheckReport(
        f"embed d={d}",
        not failures,
        "; ".join(failures),
        trials,
        {"a_scan": scan, "a_values": int(a_values.size), "divisor_sets": len(hap_masks), "n": str(witness.n)},
    )


def check_system_equivalence(witness: EmbeddingWitness) -> CheckReport:
    """The multiples-HAP system on [n], restricted to B_d, is the subcube system."""
    d = witness.d
    if d > 4:
        raise CapExceededError("system equivalence materializes HAPs on [n(d)]; capped at d <= 4")
    haps = gen_hap(witness.n, "multiples")
    keep = sum(1 << (b - 1) for b in witness.b_of_u)
    restricted = restrict(haps, keep)
    # restricted ground is B_d in increasing order; relabel to points u
    pos_of_b = {b: i for i, b in enumerate(restricted.ground)}
    relabel = [pos_of_b[b] for b in witness.b_of_u]
    got = []
    for _, s in restricted.sets:
        if s:
            got.append(sum(1 << u for u in range(1 << d) if s >> relabel[u] & 1))
    want = [s for _, s in gen_subcubes(d).sets]
    passed = sorted(got) == sorted(want)
    detail = "" if passed else f"{len(got)} nonempty HAP sets vs {len(want)} subcubes"
    return CheckReport(f"system-equivalence d={d}", passed, detail, 1, {"nonempty_haps": len(got)})


def random_weight_vector(rng: SplitMix64, d: int, k: int) -> CharacterIndex:
    support = rng.sample(d, k)
    return CharacterIndex(d, sum(1 << (d - 1 - i) for i in support))


def check_transfer(d: int, k: int, trials: int = 100, seed: int = 0, herdisc: bool | None = None) -> CheckReport:
    """Character sums over U are signed sums of subcube sums; herdisc(G) <= 2^k herdisc(S^d)."""
    if not 1 <= d <= 12:
        raise CapExceededError("transfer identity capped at d <= 12")
    if not 0 <= k <= d:
        raise ValueError(f"k={k} outside 0..{d}")
    if herdisc is None:
        herdisc = d <= 4
    if herdisc and d > 4:
        raise CapExceededError("exact hereditary discrepancy comparison capped at d <= 4")
    rng = SplitMix64(seed)
    npts = 1 << d
    failures = []
    for t in range(trials):
        f = rng.signs(npts).astype(np.int64)
        U = rng.bits(npts)
        v = random_weight_vector(rng, d, k)
        g = np.where(U, f, 0)
        lhs = int(character_row(d, v.v).astype(np.int64) @ g)
        rhs = 0
        for w in itertools.product((0, 1), repeat=k):
            pat = extend_pattern(v, w)
            sign = -1 if bin(v.v & representative(pat)).count("1") & 1 else 1
            rhs += sign * int(g[pat.members()].sum())
        if lhs != rhs:
            failures.append(f"trial {t}: v={v}, character sum {lhs} != subcube sum {rhs}")
            break
    metrics: dict = {"d": d, "k": k}
    if herdisc:
        hg = herdisc_exact(gen_characters(d, k)).value
        hs = herdisc_exact(gen_subcubes(d)).value
        metrics.update(herdisc_characters=hg, herdisc_subcubes=hs, factor=1 << k)
        if hg > (1 << k) * hs:
            failures.append(f"herdisc(G)={hg} > 2^{k} * herdisc(S)={hs}")
    return CheckReport(f"transfer d={d} k={k}", not failures, "; ".join(failures), trials, metrics)


def averaging_chain(d: int, k: int) -> dict:
    """Exhaustive max |det(G|_W)|^(1/M) against the two averaging bounds."""
    G = gen_characters(d, k)
    M, N = G.shape
    best = find_large_det_subset(G, "exhaustive")
    avg = averaging_bound(N, M)
    floor = math.sqrt(M / math.e)
    return {
        "M": M,
        "N": N,
        "columns": best.columns,
        "det": best.det,
        "root": best.root,
        "averaging": avg,
        "sqrt_M_over_e": floor,
        "holds": best.root >= avg * (1 - REL_TOL) and avg >= floor * (1 - REL_TOL),
    }

