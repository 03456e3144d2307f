"""Log-gamma polymer weights, partition functions, last passage times, Monte Carlo.

Weight laws follow the exactly solvable parametrizations: inverse-gamma entries
for the positive-temperature polymer, exponential or geometric entries for last
passage percolation.  The second Gamma parameter is always a *rate*.
"""

import math
from dataclasses import dataclass

import numpy as np

from .grsk import IndexSet, PolygonalArray

__all__ = [
    "Geometry",
    "PolymerParams",
    "MCEstimate",
    "sample_weights",
    "partition_function",
    "partition_sum",
    "lpp_time",
    "enumerate_paths",
    "mc_laplace_transform",
    "mc_lpp_cdf",
]

_BATCH = 1 << 16


class SizeCapError(ValueError):
    """Enumeration size cap exceeded."""


@dataclass(frozen=True)
class Geometry:
    """Path geometry: endpoint constraints for polymers of even length 2n.

    Tags: point-to-point(p,q); flat(n), half-flat(n), restricted(n) and
    symmetric(n) all refer to paths of length 2n started at (1,1).
    """

    tag: str
    n: int = 0
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.tag == "point-to-point":
            if self.p < 1 or self.q < 1:
                raise ValueError("point-to-point geometry needs p, q >= 1")
        elif self.tag in ("flat", "half-flat", "restricted", "symmetric"):
            if self.n < 1:
                raise ValueError(f"{self.tag} geometry needs n >= 1")
        else:
            raise ValueError(f"unknown geometry tag {self.tag!r}")

    def cells(self):
        """Weight cells carried by this geometry (a downward-closed set)."""
        if self.tag == "point-to-point":
            return tuple((i, j) for i in range(1, self.p + 1) for j in range(1, self.q + 1))
        n = self.n
        if self.tag == "half-flat":
            return tuple((i, j) for i in range(1, n + 1) for j in range(1, 2 * n + 2 - i))
        return tuple((i, j) for i in range(1, 2 * n + 1) for j in range(1, 2 * n + 2 - i))

    def path_cells(self):
        """Cells admissible for paths (restricted paths stay on i <= j)."""
        if self.tag == "restricted":
            return tuple(c for c in self.cells() if c[0] <= c[1])
        return self.cells()

    def endpoints(self):
        if self.tag == "point-to-point":
            return ((self.p, self.q),)
        n = self.n
        if self.tag == "flat":
            return tuple((i, 2 * n + 1 - i) for i in range(1, 2 * n + 1))
        # half-flat, restricted and symmetric end on the upper half-line
        return tuple((i, 2 * n + 1 - i) for i in range(1, n + 1))

    def index_set(self):
        return IndexSet(self.cells())


@dataclass(frozen=True)
class PolymerParams:
    """Spectral parameters and weight family for a polymer geometry."""

    alpha: tuple
    beta: tuple = ()
    gamma: float = 0.0
    kind: str = "inverse-gamma"
    y: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if self.kind not in ("inverse-gamma", "exponential", "geometric"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if any(a <= 0 for a in self.alpha) or any(b <= 0 for b in self.beta):
            raise ValueError("alpha and beta entries must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.kind == "geometric" and not all(0.0 < v < 1.0 for v in self.y):
            raise ValueError("geometric weights need 0 < y_i < 1")


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate; reproducible from (seed, n_samples, params)."""

    mean: float
    stderr: float
    n_samples: int
    seed: int


def _check_params(params: PolymerParams, geometry: Geometry):
    n = geometry.n
    if geometry.tag in ("restricted", "symmetric"):
        if len(params.alpha) != n or params.beta:
            raise ValueError(f"{geometry.tag} geometry uses alpha of length n={n} and no beta")
    elif geometry.tag in ("flat", "half-flat"):
        if params.kind == "geometric":
            if len(params.y) != 2 * n:
                raise ValueError("geometric weights need y of length 2n")
        elif len(params.alpha) != n or len(params.beta) != n:
            raise ValueError(f"{geometry.tag} geometry needs alpha, beta of length n={n}")
    elif geometry.tag == "point-to-point":
        if len(params.alpha) < geometry.p or len(params.beta) < geometry.q:
            raise ValueError("point-to-point geometry needs len(alpha) >= p, len(beta) >= q")
    if params.kind == "exponential" and params.gamma != 0.0:
        raise ValueError("exponential weights do not carry a gamma parameter")


def _cell_shape(params: PolymerParams, geometry: Geometry, i, j):
    """Gamma shape (inverse-gamma kind) or exponential rate at cell (i, j)."""
    a, b, g = params.alpha, params.beta, params.gamma
    n = geometry.n
    if geometry.tag == "point-to-point":
        return a[i - 1] + b[j - 1] + g
    if geometry.tag == "flat":
        if i <= n and j <= n:
            return a[i - 1] + b[j - 1] + g
        if i <= n < j:
            return a[i - 1] + a[2 * n - j]
        return b[2 * n - i] + b[j - 1]
    if geometry.tag == "half-flat":
        # the gamma parameter folds into beta on the trapezoid
        if j <= n:
            return a[i - 1] + b[j - 1] + g
        return a[i - 1] + a[2 * n - j]
    # restricted / symmetric: defined on i <= j, mirrored below the diagonal
    if i > j:
        i, j = j, i
    if i == j:
        return a[i - 1] + g
    if j <= n:
        return a[i - 1] + a[j - 1] + 2 * g
    return a[i - 1] + a[2 * n - j]


def _diag_rate(geometry: Geometry):
    # symmetric diagonal inverse-gamma entries carry rate 1/2, restricted rate 1
    return 0.5 if geometry.tag == "symmetric" else 1.0


def _draw_cell(params, geometry, i, j, rng, size=None):
    shape = _cell_shape(params, geometry, i, j)
    if params.kind == "inverse-gamma":
        rate = _diag_rate(geometry) if (geometry.tag in ("restricted", "symmetric") and i == j) else 1.0
        return 1.0 / (rng.gamma(shape, 1.0 / rate, size=size))
    if params.kind == "exponential":
        rate = shape
        if geometry.tag == "restricted" and i == j:
            rate = params.alpha[i - 1]
        return rng.exponential(1.0 / rate, size=size)
    # geometric: P(W = k) proportional to (y_i y_{2n+1-j})^k
    q = params.y[i - 1] * params.y[2 * geometry.n - j]
    return rng.geometric(1.0 - q, size=size) - 1


def sample_weights(params: PolymerParams, geometry: Geometry, rng) -> PolygonalArray:
    """One weight array on the geometry's index set.

    Symmetric and restricted geometries are sampled on i <= j and mirrored, so
    the result is a valid polygonal array; the restricted DP only reads i <= j.
    """
    _check_params(params, geometry)
    entries = {}
    for (i, j) in geometry.cells():
        if geometry.tag in ("restricted", "symmetric") and i > j:
            continue
        entries[(i, j)] = float(_draw_cell(params, geometry, i, j, rng))
    if geometry.tag in ("restricted", "symmetric"):
        for (i, j) in geometry.cells():
            if i > j:
                entries[(i, j)] = entries[(j, i)]
    return PolygonalArray(geometry.index_set(), entries)


def _sample_batch(params, geometry, rng, m):
    """Dict cell -> array of m draws (cells on i > j mirrored where applicable)."""
    batch = {}
    for (i, j) in geometry.cells():
        if geometry.tag in ("restricted", "symmetric") and i > j:
            continue
        batch[(i, j)] = _draw_cell(params, geometry, i, j, rng, size=m)
    if geometry.tag in ("restricted", "symmetric"):
        for (i, j) in geometry.cells():
            if i > j:
                batch[(i, j)] = batch[(j, i)]
    return batch


def _dp_cells(geometry: Geometry):
    return sorted(geometry.path_cells())


def partition_function(w, geometry: Geometry):
    """log of the path-sum partition function, by log-sum-exp dynamic programming.

    Accepts a PolygonalArray or a dict cell -> ndarray of sampled weights (the
    vectorized form used by the Monte Carlo estimators).
    """
    logw = _as_log_arrays(w, geometry)
    z = {}
    for (i, j) in _dp_cells(geometry):
        prev = [z[c] for c in ((i - 1, j), (i, j - 1)) if c in z]
        if (i, j) == (1, 1):
            z[(i, j)] = logw[(i, j)]
        else:
            acc = prev[0] if len(prev) == 1 else np.logaddexp(prev[0], prev[1])
            z[(i, j)] = logw[(i, j)] + acc
    ends = [z[c] for c in geometry.endpoints()]
    total = ends[0]
    for e in ends[1:]:
        total = np.logaddexp(total, e)
    if geometry.tag == "symmetric":
        total = total + math.log(2.0)
    return total


def _as_log_arrays(w, geometry):
    if isinstance(w, PolygonalArray):
        if set(geometry.cells()) - set(w.index_set.cells):
            raise ValueError("array index set does not cover the geometry")
        return {c: math.log(float(w[c])) for c in geometry.path_cells()}
    return {c: np.log(w[c]) for c in geometry.path_cells()}


def partition_sum(w, geometry: Geometry):
    """Exact path-sum partition function (sum/product DP; exact in rational mode)."""
    vals = w.entries if isinstance(w, PolygonalArray) else w
    z = {}
    for (i, j) in _dp_cells(geometry):
        prev = [z[c] for c in ((i - 1, j), (i, j - 1)) if c in z]
        if (i, j) == (1, 1):
            z[(i, j)] = vals[(i, j)]
        else:
            z[(i, j)] = vals[(i, j)] * sum(prev)
    total = sum(z[c] for c in geometry.endpoints())
    if geometry.tag == "symmetric":
        total = 2 * total
    return total


def lpp_time(w, geometry: Geometry):
    """Last passage time: max over admissible paths of the sum of weights."""
    vals = w.entries if isinstance(w, PolygonalArray) else w
    vectorized = any(isinstance(v, np.ndarray) for v in vals.values())
    vmax = np.maximum if vectorized else max
    z = {}
    for (i, j) in _dp_cells(geometry):
        prev = [z[c] for c in ((i - 1, j), (i, j - 1)) if c in z]
        if (i, j) == (1, 1):
            z[(i, j)] = vals[(i, j)]
        elif len(prev) == 1:
            z[(i, j)] = vals[(i, j)] + prev[0]
        else:
            z[(i, j)] = vals[(i, j)] + vmax(prev[0], prev[1])
    ends = [z[c] for c in geometry.endpoints()]
    total = ends[0]
    for e in ends[1:]:
        total = vmax(total, e)
    return total


def enumerate_paths(geometry: Geometry):
    """All admissible directed paths of the geometry (brute-force DP oracle)."""
    cells = set(geometry.path_cells())
    if len(cells) > 30:
        raise SizeCapError("enumerate_paths supports at most 30 cells")
    ends = set(geometry.endpoints())
    paths = []

    def walk(cell, acc):
        acc = acc + [cell]
        if cell in ends:
            paths.append(acc)
        if geometry.tag != "point-to-point" and cell in ends:
            # line endpoints are terminal: paths have fixed length
            return
        for nxt in ((cell[0], cell[1] + 1), (cell[0] + 1, cell[1])):
            if nxt in cells:
                walk(nxt, acc)

    if (1, 1) in cells:
        walk((1, 1), [])
    return paths


def _substream(seed, index):
    """Deterministic per-batch substream: identical results for any worker split."""
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _mc_run(params, geometry, fn, n_samples, seed, threads=1):
    """Batched Monte Carlo mean/stderr of fn over weight draws.

    Per-batch Philox substreams keyed by (seed, batch index) and index-ordered
    combination make the result identical for any worker count.
    """
    _check_params(params, geometry)
    sizes = []
    done = 0
    while done < n_samples:
        m = min(_BATCH, n_samples - done)
        sizes.append(m)
        done += m

    def one(b):
        vals = fn(_sample_batch(params, geometry, _substream(seed, b), sizes[b]))
        return float(vals.sum()), float((vals * vals).sum())

    if threads > 1 and len(sizes) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(b) for b in range(len(sizes))]
    total = sum(p[0] for p in parts)
    total2 = sum(p[1] for p in parts)
    mean = total / n_samples
    var = max(total2 / n_samples - mean * mean, 0.0)
    stderr = math.sqrt(var / n_samples)
    return MCEstimate(mean, stderr, n_samples, seed)


def mc_laplace_transform(params, geometry, r, n_samples, seed, threads=1) -> MCEstimate:
    """Monte Carlo estimate of E[exp(-r Z)] for the geometry's partition function."""
    if r <= 0:
        raise ValueError("r must be positive")

    def fn(batch):
        logz = partition_function(batch, geometry)
        with np.errstate(over="ignore"):
            return np.exp(-r * np.exp(logz))

    return _mc_run(params, geometry, fn, n_samples, seed, threads)


def mc_lpp_cdf(params, geometry, u, n_samples, seed, threads=1) -> MCEstimate:
    """Monte Carlo estimate of P(tau <= u) for exponential or geometric weights."""
    if params.kind == "inverse-gamma":
        raise ValueError("mc_lpp_cdf requires exponential or geometric weights")

    def fn(batch):
        tau = lpp_time(batch, geometry)
        return (tau <= u).astype(float)

    return _mc_run(params, geometry, fn, n_samples, seed, threads)
