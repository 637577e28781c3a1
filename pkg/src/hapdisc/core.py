"""Set systems, sign matrices, colorings and discrepancy evaluation.

Sets are stored as Python integers used as bitsets: bit ``j`` is ground
element ``j``.  Matrices and colorings are read-only numpy ``int8`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_GROUND = 1 << 20


class CapExceededError(ValueError):
    """An input exceeds a documented size cap."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _mask_from_keep(keep, n: int) -> int:
    if isinstance(keep, (int, np.integer)) and not isinstance(keep, bool):
        keep = int(keep)
        if keep < 0 or keep.bit_length() > n:
            raise ValueError(f"keep bitset has bits beyond ground size {n}")
        return keep
    keep = list(keep)
    if len(keep) != n:
        raise ValueError(f"keep has length {len(keep)}, ground has {n} elements")
    return mask_of(i for i, b in enumerate(keep) if b)


@dataclass(frozen=True)
class SetSystem:
    ground: tuple
    sets: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(self.ground))
        object.__setattr__(self, "sets", tuple((str(nm), int(s)) for nm, s in self.sets))
        n = len(self.ground)
        if n > MAX_GROUND:
            raise CapExceededError(f"ground size {n} exceeds {MAX_GROUND}")
        if len(set(self.ground)) != n:
            raise ValueError("ground labels must be distinct")
        names = [nm for nm, _ in self.sets]
        if len(set(names)) != len(names):
            raise ValueError("set names must be distinct")
        for nm, s in self.sets:
            if s < 0 or s.bit_length() > n:
                raise ValueError(f"set {nm!r} has members outside the ground")

    @property
    def n(self) -> int:
        return len(self.ground)

    @property
    def m(self) -> int:
        return len(self.sets)

    def members(self, i: int) -> list[int]:
        return bits_of(self.sets[i][1])

    def degree(self) -> int:
        """Largest number of sets containing a single element."""
        if not self.sets or not self.ground:
            return 0
        return int(self.to_matrix().entries.sum(axis=0, dtype=np.int64).max())

    def to_matrix(self) -> "SignMatrix":
        return to_matrix(self)


@dataclass(frozen=True, eq=False)
class SignMatrix:
    entries: np.ndarray
    row_labels: tuple | None = None
    col_labels: tuple | None = None

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.int64, copy=True)
        if e.ndim != 2:
            if e.size == 0:
                e = e.reshape(0, 0)
            else:
                raise ValueError("entries must be a 2-d array")
        if e.size and (np.abs(e) > 1).any():
            raise ValueError("sign matrix entries must lie in {-1, 0, +1}")
        object.__setattr__(self, "entries", _frozen(e.astype(np.int8)))
        for attr, size in (("row_labels", e.shape[0]), ("col_labels", e.shape[1])):
            labels = getattr(self, attr)
            if labels is not None:
                labels = tuple(labels)
                if len(labels) != size:
                    raise ValueError(f"{attr} has {len(labels)} labels for {size} entries")
                object.__setattr__(self, attr, labels)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __eq__(self, other):
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.entries, other.entries)
            and self.row_labels == other.row_labels
            and self.col_labels == other.col_labels
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        return self.entries[np.ix_(list(rows), list(cols))]

    def restrict_columns(self, keep) -> "SignMatrix":
        mask = _mask_from_keep(keep, self.cols)
        idx = bits_of(mask)
        labels = None if self.col_labels is None else tuple(self.col_labels[i] for i in idx)
        return SignMatrix(self.entries[:, idx], self.row_labels, labels)


@dataclass(frozen=True, eq=False)
class Coloring:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.int64, copy=True).reshape(-1)
        if v.size and not np.isin(v, (-1, 1)).all():
            raise ValueError("coloring entries must be exactly -1 or +1")
        object.__setattr__(self, "values", _frozen(v.astype(np.int8)))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    @classmethod
    def ones(cls, n: int) -> "Coloring":
        return cls(np.ones(n, dtype=np.int8))


@dataclass(frozen=True, eq=False)
class DiscrepancyReport:
    value: int
    argmax_row: int | None
    per_row: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.per_row is not None and self.per_row.size:
            if int(self.per_row.max()) != self.value:
                raise ValueError("value must equal the maximum of per_row")


def restrict(system: SetSystem, keep) -> SetSystem:
    """Intersect every set with the kept ground elements and reindex.

    Duplicate intersections are kept as separate sets so names survive.
    """
    mask = _mask_from_keep(keep, system.n)
    positions = bits_of(mask)
    newpos = {p: i for i, p in enumerate(positions)}
    ground = tuple(system.ground[p] for p in positions)
    sets = []
    for nm, s in system.sets:
        t = 0
        for p in bits_of(s & mask):
            t |= 1 << newpos[p]
        sets.append((nm, t))
    return SetSystem(ground, tuple(sets))


def incidence(system: SetSystem) -> np.ndarray:
    n, m = system.n, system.m
    out = np.zeros((m, n), dtype=np.int8)
    if n == 0:
        return out
    nbytes = (n + 7) // 8
    for i, (_, s) in enumerate(system.sets):
        if s:
            raw = np.frombuffer(s.to_bytes(nbytes, "little"), dtype=np.uint8)
            out[i] = np.unpackbits(raw, bitorder="little")[:n]
    return out


def to_matrix(system: SetSystem) -> SignMatrix:
    """0/1 incidence matrix: rows are sets, columns are ground elements."""
    return SignMatrix(
        incidence(system),
        row_labels=tuple(nm for nm, _ in system.sets),
        col_labels=system.ground,
    )


def as_matrix(obj) -> SignMatrix:
    if isinstance(obj, SignMatrix):
        return obj
    if isinstance(obj, SetSystem):
        return to_matrix(obj)
    return SignMatrix(np.asarray(obj))


def _coloring_array(coloring, n: int) -> np.ndarray:
    x = coloring.values if isinstance(coloring, Coloring) else Coloring(coloring).values
    if x.size != n:
        raise ValueError(f"coloring has length {x.size}, expected {n}")
    return x


def eval_discrepancy(matrix, coloring) -> DiscrepancyReport:
    """||Ax||_inf for a fixed coloring x, with the first attaining row."""
    A = as_matrix(matrix)
    x = _coloring_array(coloring, A.cols)
    if A.rows == 0:
        return DiscrepancyReport(0, None, np.zeros(0, dtype=np.int64))
    per_row = np.abs(A.entries.astype(np.int64) @ x.astype(np.int64))
    arg = int(np.argmax(per_row))
    return DiscrepancyReport(int(per_row[arg]), arg, per_row)


def hap_disc_stream(n: int, mode: str, coloring) -> DiscrepancyReport:
    """Discrepancy of homogeneous progressions on [n] without building the sets.

    Row indices match the materialized ordering of ``gen_hap``: by (a, k) in
    prefix mode, by a in multiples mode.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if mode not in ("prefix", "multiples"):
        raise ValueError(f"unknown mode {mode!r}")
    f = _coloring_array(coloring, n).astype(np.int64)
    best, best_row = -1, None
    a = 1
    row_base = 0
    while a <= n:
        q = n // a
        a_hi = n // q  # last a with the same quotient
        avals = np.arange(a, a_hi + 1)
        idx = avals[:, None] * np.arange(1, q + 1)[None, :] - 1
        vals = f[idx]
        if mode == "prefix":
            sums = np.abs(np.cumsum(vals, axis=1))
            flat = int(np.argmax(sums))
            val = int(sums.flat[flat])
            if val > best:
                r, k = divmod(flat, q)
                best, best_row = val, row_base + r * q + k
            row_base += q * avals.size
        else:
            sums = np.abs(vals.sum(axis=1))
            r = int(np.argmax(sums))
            if int(sums[r]) > best:
                best, best_row = int(sums[r]), a - 1 + r
        a = a_hi + 1
    return DiscrepancyReport(best, best_row)

