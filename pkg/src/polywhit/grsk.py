"""Geometric RSK on polygonal arrays via local moves, with diagnostic functionals.

Arrays carry either exact rationals (Fraction) or float64 entries; the local
moves are subtraction-free, so rational mode stays exact.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "IndexSet",
    "PolygonalArray",
    "outer_indices",
    "local_move_a",
    "local_move_b",
    "rho",
    "grsk",
    "energy",
    "diagonal_product",
    "transpose",
    "path_sum",
    "log_jacobian_det",
    "symmetric_log_jacobian_det",
]


class CellOutOfRange(ValueError):
    """Cell not contained in the index set."""


class BorderIndexError(ValueError):
    """Local move b applied at a border index."""


@dataclass(frozen=True)
class IndexSet:
    """Downward-closed set of 1-based lattice cells (a Young-diagram shape).

    Stored as sorted cells plus per-row lengths, so border/outer queries are O(1).
    """

    cells: tuple

    def __post_init__(self):
        cells = tuple(sorted(set(map(tuple, self.cells))))
        object.__setattr__(self, "cells", cells)
        row_len = {}
        row_count = {}
        for (i, j) in cells:
            if i < 1 or j < 1:
                raise ValueError("cells must have 1-based positive coordinates")
            row_len[i] = max(row_len.get(i, 0), j)
            row_count[i] = row_count.get(i, 0) + 1
        if cells:
            rows = sorted(row_len)
            if rows != list(range(1, len(rows) + 1)):
                raise ValueError("index set not downward-closed: missing rows")
            prev = None
            for i in rows:
                if row_count[i] != row_len[i]:
                    raise ValueError(f"index set row {i} is not contiguous from column 1")
                if prev is not None and row_len[i] > prev:
                    raise ValueError("index set not downward-closed: row lengths increase")
                prev = row_len[i]
        object.__setattr__(self, "row_len", row_len)

    @classmethod
    def from_row_lengths(cls, lengths):
        return cls(tuple((i + 1, j + 1) for i, L in enumerate(lengths) for j in range(L)))

    def __contains__(self, cell):
        i, j = cell
        return 1 <= j <= self.row_len.get(i, 0)

    def __len__(self):
        return len(self.cells)

    def is_border(self, i, j):
        if (i, j) not in self:
            raise CellOutOfRange(f"cell {(i, j)} not in index set")
        return not ((i, j + 1) in self and (i + 1, j) in self and (i + 1, j + 1) in self)

    def is_outer(self, i, j):
        if (i, j) not in self:
            raise CellOutOfRange(f"cell {(i, j)} not in index set")
        return not ((i, j + 1) in self or (i + 1, j) in self or (i + 1, j + 1) in self)

    def border_indices(self):
        return tuple(c for c in self.cells if self.is_border(*c))

    def outer(self):
        return tuple(c for c in self.cells if self.is_outer(*c))

    def transpose(self):
        return IndexSet(tuple((j, i) for (i, j) in self.cells))


def outer_indices(s: IndexSet):
    """Outer indices of s: cells with no east, south, or southeast neighbor in s."""
    out = s.outer()
    diags = sorted(j - i for (i, j) in out)
    for a, b in zip(diags, diags[1:]):
        # outer cells never share the same or consecutive diagonals
        assert b - a > 1, "outer indices on same or consecutive diagonals"
    return set(out)


@dataclass(frozen=True)
class PolygonalArray:
    """Positive-entry array over a downward-closed index set."""

    index_set: IndexSet
    entries: dict

    def __post_init__(self):
        if set(self.entries) != set(self.index_set.cells):
            raise ValueError("entries must be defined exactly on the index set")
        for c, v in self.entries.items():
            if not v > 0:
                raise ValueError(f"entry at {c} must be strictly positive")

    @property
    def mode(self):
        if any(isinstance(v, Fraction) for v in self.entries.values()):
            return "exact-rational"
        return "float64"

    @classmethod
    def from_rows(cls, rows, exact=False):
        """Build from ragged rows; row r lists cells (r, 1..len_r)."""
        conv = Fraction if exact else float
        entries = {(i + 1, j + 1): conv(v) for i, row in enumerate(rows) for j, v in enumerate(row)}
        iset = IndexSet.from_row_lengths([len(r) for r in rows])
        return cls(iset, entries)

    def to_rows(self):
        rows = []
        for i in sorted(self.index_set.row_len):
            rows.append([self.entries[(i, j)] for j in range(1, self.index_set.row_len[i] + 1)])
        return rows

    def __getitem__(self, cell):
        return self.entries[cell]

    def with_entry(self, cell, value):
        new = dict(self.entries)
        new[cell] = value
        return PolygonalArray(self.index_set, new)


def _west_north_sum(w: PolygonalArray, i, j):
    """w_{i-1,j} + w_{i,j-1} with the convention w_{0,j} = w_{i,0} = 0 except
    w_{1,0} + w_{0,1} = 1."""
    if i == 1 and j == 1:
        one = Fraction(1) if w.mode == "exact-rational" else 1.0
        return one
    acc = 0
    if (i - 1, j) in w.index_set:
        acc = acc + w[(i - 1, j)]
    if (i, j - 1) in w.index_set:
        acc = acc + w[(i, j - 1)]
    return acc


def local_move_a(w: PolygonalArray, i, j):
    """Replace w_{i,j} by w_{i,j} (w_{i-1,j} + w_{i,j-1})."""
    if (i, j) not in w.index_set:
        raise CellOutOfRange(f"cell {(i, j)} not in index set")
    return w.with_entry((i, j), w[(i, j)] * _west_north_sum(w, i, j))


def local_move_b(w: PolygonalArray, i, j):
    """Replace w_{i,j} by (1/w_{i,j})(w_{i-1,j}+w_{i,j-1})(1/w_{i+1,j}+1/w_{i,j+1})^{-1}.

    Only defined at non-border indices, where both east and south neighbors exist.
    """
    if (i, j) not in w.index_set:
        raise CellOutOfRange(f"cell {(i, j)} not in index set")
    if w.index_set.is_border(i, j):
        raise BorderIndexError(f"local move b undefined at border index {(i, j)}")
    harm = 1 / (1 / w[(i + 1, j)] + 1 / w[(i, j + 1)])
    return w.with_entry((i, j), _west_north_sum(w, i, j) * harm / w[(i, j)])


def rho(w: PolygonalArray, i, j):
    """a_{i,j} followed by b_{i-k,j-k} for every k >= 1 with (i-k, j-k) in the set."""
    if (i, j) not in w.index_set:
        raise CellOutOfRange(f"cell {(i, j)} not in index set")
    out = local_move_a(w, i, j)
    k = 1
    while (i - k, j - k) in w.index_set:
        out = local_move_b(out, i - k, j - k)
        k += 1
    return out


def grsk(w: PolygonalArray):
    """Geometric RSK image of w, built by the recursive outer-index construction."""
    if len(w.index_set) == 0:
        return w
    out = w.index_set.outer()
    inner_cells = tuple(c for c in w.index_set.cells if c not in set(out))
    inner = PolygonalArray(IndexSet(inner_cells), {c: w.entries[c] for c in inner_cells})
    t_inner = grsk(inner)
    entries = dict(t_inner.entries)
    for c in out:
        entries[c] = w.entries[c]
    t = PolygonalArray(w.index_set, entries)
    for (i, j) in out:
        t = rho(t, i, j)
    return t


def energy(t: PolygonalArray):
    """1/t_{1,1} + sum over cells of (t_{i-1,j} + t_{i,j-1})/t_{i,j}, absent entries = 0."""
    if len(t.index_set) == 0:
        return 0
    acc = 1 / t[(1, 1)]
    for (i, j) in t.index_set.cells:
        num = 0
        if (i - 1, j) in t.index_set:
            num = num + t[(i - 1, j)]
        if (i, j - 1) in t.index_set:
            num = num + t[(i, j - 1)]
        if num != 0:
            acc = acc + num / t[(i, j)]
    return acc


def diagonal_product(t: PolygonalArray, k):
    """Product of entries on the diagonal j - i = k; empty diagonal gives 1."""
    acc = None
    for (i, j) in t.index_set.cells:
        if j - i == k:
            acc = t[(i, j)] if acc is None else acc * t[(i, j)]
    if acc is None:
        return Fraction(1) if t.mode == "exact-rational" else 1.0
    return acc


def transpose(w: PolygonalArray):
    """Transposed array over the transposed index set."""
    return PolygonalArray(w.index_set.transpose(),
                          {(j, i): v for (i, j), v in w.entries.items()})


def path_sum(w: PolygonalArray, p, q):
    """Sum over directed paths (1,1) -> (p,q) of the product of entries (oracle
    for the border identity; exact in rational mode)."""
    if (p, q) not in w.index_set:
        raise CellOutOfRange(f"cell {(p, q)} not in index set")
    # DP over the rectangle i<=p, j<=q, contained in the index set by closure
    z = {}
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            acc = 0
            if i == 1 and j == 1:
                acc = 1
            if (i - 1, j) in z:
                acc = acc + z[(i - 1, j)]
            if (i, j - 1) in z:
                acc = acc + z[(i, j - 1)]
            z[(i, j)] = acc * w[(i, j)]
    return z[(p, q)]


def log_jacobian_det(w: PolygonalArray, step=1e-6):
    """|det| of the Jacobian of (log w) -> (log grsk(w)), by central differences.

    Numerical oracle for the volume-preservation property; float mode only.
    """
    cells = w.index_set.cells
    logw = np.array([np.log(float(w[c])) for c in cells])

    def f(lw):
        arr = PolygonalArray(w.index_set, {c: float(np.exp(v)) for c, v in zip(cells, lw)})
        t = grsk(arr)
        return np.array([np.log(float(t[c])) for c in cells])

    m = len(cells)
    jac = np.empty((m, m))
    for k in range(m):
        up = logw.copy()
        dn = logw.copy()
        up[k] += step
        dn[k] -= step
        jac[:, k] = (f(up) - f(dn)) / (2 * step)
    return abs(np.linalg.det(jac))


def symmetric_log_jacobian_det(w: PolygonalArray, step=1e-6):
    """|det| of the log-coordinate Jacobian restricted to cells i <= j, for
    symmetric input arrays (entries with i > j mirror their transposes)."""
    upper = tuple(c for c in w.index_set.cells if c[0] <= c[1])
    logw = np.array([np.log(float(w[c])) for c in upper])

    def f(lw):
        entries = {}
        vals = {c: float(np.exp(v)) for c, v in zip(upper, lw)}
        for (i, j) in w.index_set.cells:
            entries[(i, j)] = vals[(i, j)] if i <= j else vals[(j, i)]
        t = grsk(PolygonalArray(w.index_set, entries))
        return np.array([np.log(float(t[c])) for c in upper])

    m = len(upper)
    jac = np.empty((m, m))
    for k in range(m):
        up = logw.copy()
        dn = logw.copy()
        up[k] += step
        dn[k] -= step
        jac[:, k] = (f(up) - f(dn)) / (2 * step)
    return abs(np.linalg.det(jac))
