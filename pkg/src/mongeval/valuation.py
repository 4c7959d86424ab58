"""Valuation functionals built from mixed Hessian determinants.

The central object evaluates

    Phi(f) = integral of B(x) * det(Hess_F(f)(x) [i times], A_1(x), ..., A_{n-i}(x))

over a box, where F is one of the scalar fields R, C, H, O2, B is a
continuous compactly supported scalar weight, and the A_k are Hermitian
matrix weights: either continuous compactly supported fields or single
point atoms.  Point atoms collapse the integral to one evaluation (the
mixed determinant is multilinear, so a delta factor pulls everything to
its location); at most one atom is allowed since a product of deltas at
distinct points vanishes and at a common point is undefined.

Quadrature is a midpoint Riemann sum with deterministic index-ordered
accumulation, so repeated runs are bit-identical; optional threading only
splits evaluation into fixed chunks and never changes the reduction
order.  Non-smooth inputs (support functions, PL functions) are smoothed
by a Gaussian grid convolution of width sigma cells before the Hessian
stencil is applied.

For piecewise-linear convex inputs and i = n over R there is an exact
route: the determinant-of-Hessian measure of a PL convex function is
atomic, one atom per vertex of its max-structure, with mass equal to the
volume of the convex hull of the active gradients.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter
from scipy.spatial import ConvexHull, QhullError

from .algebra import FIELD_COMPONENTS, FIELDS, HermitianMatrix, polarized_det_batch
from .convex import ConvexBody, PLConvexFunction
from .hessian import DEFAULT_STEP, assemble_structured, fd_hessian_batch, grid_hessian

__all__ = [
    "Grid",
    "BumpWeight",
    "MatrixBump",
    "MatrixAtom",
    "ValuationSpec",
    "AtomicMeasure",
    "hull_volume",
    "ma_measure_pl",
    "ma_total_mass_mc",
    "pl_valuation",
    "eval_valuation",
    "body_valuation",
    "homogeneous_components",
    "parity_split",
    "chunked_apply",
]


# ---------------------------------------------------------------------------
# quadrature grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Grid:
    """Axis-aligned box with a fixed midpoint-rule resolution per axis."""

    lo: np.ndarray
    hi: np.ndarray
    shape: tuple

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        if lo.shape != hi.shape or lo.ndim != 1 or len(shape) != lo.size:
            raise ValueError("grid bounds and shape are inconsistent")
        if np.any(hi <= lo) or any(s < 1 for s in shape):
            raise ValueError("grid box must be non-degenerate with positive resolution")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "shape", shape)

    @staticmethod
    def cube(center, halfwidth: float, resolution: int, dim: int) -> "Grid":
        c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
        return Grid(c - halfwidth, c + halfwidth, (resolution,) * dim)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def spacing(self) -> np.ndarray:
        return (self.hi - self.lo) / np.asarray(self.shape, dtype=float)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    def axis_nodes(self, a: int) -> np.ndarray:
        h = self.spacing[a]
        return self.lo[a] + h * (0.5 + np.arange(self.shape[a]))

    def nodes(self) -> np.ndarray:
        """Cell midpoints as an (n_cells, dim) array, C-ordered."""
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def with_margin(self, cells: int) -> "Grid":
        """Same spacing, ``cells`` extra cells on every side."""
        pad = cells * self.spacing
        return Grid(self.lo - pad, self.hi + pad, tuple(s + 2 * cells for s in self.shape))


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def _bump_profile(r2, plateau: float):
    """C^2 radial profile: 1 on r <= plateau, falling to 0 at r = 1."""
    r = np.sqrt(np.maximum(r2, 0.0))
    if plateau > 0:
        r = np.clip((r - plateau) / (1.0 - plateau), 0.0, None)
    return np.where(r < 1.0, (1.0 - np.minimum(r, 1.0) ** 2) ** 3, 0.0)


@dataclass(frozen=True, eq=False)
class BumpWeight:
    """Continuous compactly supported scalar weight around a center.

    value = height * profile(|x - center| / radius); with plateau > 0 the
    profile is exactly ``height`` on the inner fraction of the support.
    """

    center: np.ndarray
    radius: float
    height: float = 1.0
    plateau: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("bump radius must be positive")
        if not 0.0 <= self.plateau < 1.0:
            raise ValueError("plateau must lie in [0, 1)")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return self.center.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - self.center) ** 2, axis=-1) / self.radius**2
        return self.height * _bump_profile(r2, self.plateau)

    @property
    def support_lo(self):
        return self.center - self.radius

    @property
    def support_hi(self):
        return self.center + self.radius


@dataclass(frozen=True, eq=False)
class MatrixBump:
    """Hermitian-matrix weight: a constant matrix times a scalar bump.

    With ``normalize=True`` the scalar profile is rescaled on the
    evaluation grid so its midpoint-rule integral is exactly 1; this is
    the continuous approximation of a unit point atom.
    """

    matrix: HermitianMatrix
    center: np.ndarray
    radius: float
    plateau: float = 0.0
    normalize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if self.radius <= 0:
            raise ValueError("bump radius must be positive")

    def scalar(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - self.center) ** 2, axis=-1) / self.radius**2
        return _bump_profile(r2, self.plateau)

    @property
    def support_lo(self):
        return self.center - self.radius

    @property
    def support_hi(self):
        return self.center + self.radius


@dataclass(frozen=True, eq=False)
class MatrixAtom:
    """Point mass: matrix * delta(location)."""

    matrix: HermitianMatrix
    location: np.ndarray
    width: float = 0.1  # default radius when approximated by a bump

    def __post_init__(self):
        object.__setattr__(self, "location", np.atleast_1d(np.asarray(self.location, dtype=float)))

    def as_bump(self, width: float = None) -> MatrixBump:
        """Continuous normalized approximation; converges to the atom as
        width -> 0."""
        w = self.width if width is None else float(width)
        return MatrixBump(self.matrix, self.location, w, normalize=True)


# ---------------------------------------------------------------------------
# valuation specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ValuationSpec:
    """Field, matrix size n, homogeneity degree i, and the weights.

    ``weights`` carries the n - i matrix slots (bumps or at most one
    atom); for degree n it is empty, and for degree 0 the functional is
    constant in its argument.
    """

    field: str
    n: int
    degree: int
    scalar_weight: Callable
    weights: tuple = ()

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")
        if self.field == "O2":
            if self.n != 2:
                raise ValueError("field O2 requires n = 2")
            if self.degree not in (1, 2):
                raise ValueError("field O2 supports degrees 1 and 2 only")
        if not 0 <= self.degree <= self.n:
            raise ValueError(f"degree {self.degree} out of range 0..{self.n}")
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.n - self.degree:
            raise ValueError(
                f"expected {self.n - self.degree} matrix weights, got {len(self.weights)}"
            )
        n_atoms = sum(isinstance(w, MatrixAtom) for w in self.weights)
        if n_atoms > 1:
            raise ValueError("at most one matrix weight may be a point atom")
        for w in self.weights:
            if w.matrix.field != self.field or w.matrix.n != self.n:
                raise ValueError("matrix weight does not match the valuation's field/size")

    @property
    def real_dim(self) -> int:
        return self.n * FIELD_COMPONENTS[self.field]

    @property
    def atom(self):
        for w in self.weights:
            if isinstance(w, MatrixAtom):
                return w
        return None

    def with_atom_widened(self, width: float) -> "ValuationSpec":
        """Replace the point atom by its normalized bump approximation."""
        if self.atom is None:
            raise ValueError("spec has no point atom to widen")
        new = tuple(
            w.as_bump(width) if isinstance(w, MatrixAtom) else w for w in self.weights
        )
        return ValuationSpec(self.field, self.n, self.degree, self.scalar_weight, new)


# ---------------------------------------------------------------------------
# convex-hull volume and the exact PL route
# ---------------------------------------------------------------------------

def _affine_rank(points, tol=1e-10):
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return 0
    rel = points[1:] - points[0]
    scale = np.abs(rel).max(initial=0.0)
    if scale == 0.0:
        return 0
    return int(np.linalg.matrix_rank(rel, tol=tol * scale))


def hull_volume(points) -> float:
    """Volume of the convex hull of a point set, by facet triangulation.

    Facet combinatorics come from qhull; the metric part sums |det| / n!
    over facet simplices coned to the vertex centroid.  Degenerate (lower
    dimensional) hulls return 0.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("expected an (m, n) point array")
    n = points.shape[1]
    if n == 1:
        return float(points.max() - points.min())
    if _affine_rank(points) < n:
        return 0.0
    try:
        hull = ConvexHull(points)
    except QhullError:
        return 0.0
    centroid = points[np.unique(hull.simplices)].mean(axis=0)
    total = 0.0
    for simplex in hull.simplices:
        mat = points[simplex] - centroid
        total += abs(np.linalg.det(mat))
    return total / math.factorial(n)


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finitely many point masses; total_mass is their exact sum."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.atleast_2d(np.asarray(self.locations, dtype=float))
        m = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if loc.shape[0] != m.shape[0]:
            raise ValueError("locations and masses disagree in length")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", m)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def integrate(self, fn) -> float:
        if len(self.masses) == 0:
            return 0.0
        return float(np.sum(np.asarray(fn(self.locations), dtype=float) * self.masses))


_EMPTY_MEASURE_CACHE = {}


def _empty_measure(dim):
    if dim not in _EMPTY_MEASURE_CACHE:
        _EMPTY_MEASURE_CACHE[dim] = AtomicMeasure(np.zeros((0, dim)), np.zeros(0))
    return _EMPTY_MEASURE_CACHE[dim]


def _dedupe_pieces(slopes, offsets):
    stacked = np.round(np.column_stack([slopes, offsets]), 12)
    _, idx = np.unique(stacked, axis=0, return_index=True)
    idx = np.sort(idx)
    return slopes[idx], offsets[idx]


def ma_measure_pl(f: PLConvexFunction) -> AtomicMeasure:
    """Determinant-of-Hessian measure of a PL convex function (exact).

    The gradient map of f sends each cell of its max-structure to the
    hull of the active gradients; the measure is atomic with one atom per
    vertex of the structure and mass the n-volume of that hull.  The
    vertex/cell combinatorics are read off the lower convex hull of the
    lifted points (a_j, -b_j): every lower facet is a cell of the induced
    regular subdivision of conv{a_j}, its supporting-plane gradient is the
    primal point where those pieces are all active, and its projected
    volume is the atom mass.  Total mass is vol(conv{a_j}).

    Exact mode is limited to dimension <= 3; see ma_total_mass_mc for the
    Monte Carlo total-mass fallback in higher dimension.
    """
    n = f.dim
    if n > 3:
        raise ValueError("exact PL measure supports dimension <= 3; use ma_total_mass_mc")
    slopes, offsets = _dedupe_pieces(f.slopes, f.offsets)
    if len(slopes) == 1 or _affine_rank(slopes) < n:
        return _empty_measure(n)

    total_expected = hull_volume(slopes)

    # exact affine dependence of -b on a: a single cell, one atom at the
    # supporting-plane gradient (support functions land here: b = 0 -> atom
    # at the origin with mass vol of the gradient hull)
    design = np.column_stack([slopes, np.ones(len(slopes))])
    coef, *_ = np.linalg.lstsq(design, -offsets, rcond=None)
    resid = design @ coef + offsets
    scale = 1.0 + np.abs(offsets).max(initial=0.0)
    if np.abs(resid).max() <= 1e-10 * scale:
        return AtomicMeasure(coef[:n][None, :], np.array([total_expected]))

    lifted = np.column_stack([slopes, -offsets])
    hull = ConvexHull(lifted)
    atoms = {}
    for simplex, eq in zip(hull.simplices, hull.equations):
        nu, _off = eq[:-1], eq[-1]
        if nu[n] >= -1e-9:  # not a lower facet
            continue
        grad = -nu[:n] / nu[n]
        verts = slopes[simplex]
        mass = abs(np.linalg.det(verts[1:] - verts[0])) / math.factorial(n)
        if mass <= 0.0:
            continue
        key = tuple(np.round(grad, 7))
        if key in atoms:
            atoms[key][1] += mass
        else:
            atoms[key] = [grad, mass]

    if not atoms:
        return _empty_measure(n)
    keys = sorted(atoms.keys())
    locations = np.array([atoms[k][0] for k in keys])
    masses = np.array([atoms[k][1] for k in keys])
    measure = AtomicMeasure(locations, masses)
    gap = abs(measure.total_mass - total_expected)
    if gap > 1e-8 * max(1.0, total_expected):
        raise ArithmeticError(
            f"PL measure lost mass: atoms sum to {measure.total_mass:.12e}, "
            f"gradient hull volume is {total_expected:.12e}"
        )
    return measure


def ma_total_mass_mc(f: PLConvexFunction, n_samples: int = 20000, seed: int = 0):
    """Monte Carlo estimate of the total PL measure mass (any dimension).

    Total mass equals vol(conv of slopes); estimated by rejection sampling
    the slope bounding box.  Returns (estimate, standard_error).
    """
    slopes, _ = _dedupe_pieces(f.slopes, f.offsets)
    n = f.dim
    if _affine_rank(slopes) < n:
        return 0.0, 0.0
    lo, hi = slopes.min(axis=0), slopes.max(axis=0)
    box_vol = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    samples = lo + (hi - lo) * rng.random((n_samples, n))
    try:
        hull = ConvexHull(slopes)
        inside = np.all(
            samples @ hull.equations[:, :-1].T + hull.equations[:, -1] <= 1e-12, axis=1
        )
    except QhullError:
        return 0.0, 0.0
    p = float(np.mean(inside))
    est = box_vol * p
    stderr = box_vol * math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)
    return est, stderr


def pl_valuation(scalar_weight, f: PLConvexFunction) -> float:
    """Exact value of integral B d(det Hess f) for PL convex f (i = n, R)."""
    return ma_measure_pl(f).integrate(scalar_weight)


# ---------------------------------------------------------------------------
# quadrature evaluation
# ---------------------------------------------------------------------------

def chunked_apply(fn, points, threads: int = 1, chunk: int = 65536):
    """Apply a vectorized map over fixed row chunks, concatenated in order.

    Chunk boundaries do not depend on the thread count, so results are
    bit-identical for any ``threads``.
    """
    points = np.asarray(points)
    n = points.shape[0]
    if n == 0:
        return np.asarray(fn(points))
    blocks = [points[i:i + chunk] for i in range(0, n, chunk)]
    if threads <= 1 or len(blocks) == 1:
        parts = [np.asarray(fn(b)) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = [np.asarray(r) for r in pool.map(fn, blocks)]
    return np.concatenate(parts, axis=0)


def _check_supports_inside(grid: Grid, weights) -> bool:
    """Validate that the joint weight support fits in the quadrature box.

    The integrand vanishes wherever any single weight vanishes (mixed
    determinants are multilinear), so only the intersection of the
    declared support boxes must be covered.  Returns False when that
    intersection is empty (the integral is exactly 0).
    """
    lo = np.copy(grid.lo)
    hi = np.copy(grid.hi)
    inter_lo = None
    inter_hi = None
    for w in weights:
        wlo = getattr(w, "support_lo", None)
        whi = getattr(w, "support_hi", None)
        if wlo is None:
            continue
        wlo = np.asarray(wlo, dtype=float)
        whi = np.asarray(whi, dtype=float)
        inter_lo = wlo if inter_lo is None else np.maximum(inter_lo, wlo)
        inter_hi = whi if inter_hi is None else np.minimum(inter_hi, whi)
    if inter_lo is None:
        return True
    if np.any(inter_lo >= inter_hi):
        return False
    if np.any(inter_lo < lo - 1e-12) or np.any(inter_hi > hi + 1e-12):
        raise ValueError("joint weight support exceeds the quadrature box")
    return True


def _field_hessians_smooth(spec, f, nodes, step, threads):
    hreal = chunked_apply(lambda b: fd_hessian_batch(f, b, step=step), nodes,
                          threads=threads, chunk=8192)
    return assemble_structured(spec.field, hreal)


def _field_hessians_grid(spec, f, grid, sigma_cells, threads):
    if sigma_cells < 0:
        raise ValueError("smoothing width must be non-negative")
    margin = int(np.ceil(4.0 * sigma_cells)) + 3
    ext = grid.with_margin(margin)
    values = chunked_apply(f, ext.nodes(), threads=threads, chunk=1 << 20)
    values = values.reshape(ext.shape)
    if sigma_cells > 0:
        values = gaussian_filter(values, sigma=sigma_cells, mode="nearest")
    hreal = grid_hessian(values, ext.spacing, margin)
    d = grid.dim
    return assemble_structured(spec.field, hreal.reshape(-1, d, d))


def _matrix_slot_values(weight, nodes, grid: Grid = None):
    """Evaluate one matrix weight on nodes -> (N, n, n[, comps]) array."""
    scal = weight.scalar(nodes)
    if weight.normalize:
        if grid is None:
            raise ValueError("normalized bump weights need a quadrature grid")
        total = float(np.sum(scal)) * grid.cell_volume
        if total <= 0:
            raise ValueError("normalized bump has zero mass on this grid")
        scal = scal / total
    data = weight.matrix.data
    extra = (1,) * data.ndim
    return scal.reshape(scal.shape + extra) * data[None]


def eval_valuation(spec: ValuationSpec, f, grid: Grid = None, *, smooth: bool = True,
                   sigma_cells: float = 3.0, step: float = None, threads: int = 1) -> float:
    """Evaluate the valuation functional on a convex (or C^2) function.

    ``f`` must be vectorized, (m, d) -> (m,) with d = spec.real_dim.  If the
    spec holds a point atom, the value is one weighted mixed determinant at
    the atom location and no grid is needed (f must be C^2 there).  Otherwise
    a grid is required; with ``smooth=True`` Hessians come from per-node
    difference stencils, with ``smooth=False`` the function is sampled on an
    extended grid, convolved with a Gaussian of ``sigma_cells`` cells, and
    differenced on the grid.

    Normalization of the integrand: the mixed determinant of the i Hessian
    copies against the n - i matrix weights is scaled by (n - i)!, so that
    weights E_1, ..., E_{n-i} (unit diagonal atoms) extract exactly
    binomial(n, i)^{-1} times the complementary principal minor of the
    Hessian, and a degree-0 functional with such weights integrates B
    against 1.  The bare symmetric polarization would carry an extra
    1/(n - i)! here; see ``mixed_det`` for that form.
    """
    if step is None:
        step = DEFAULT_STEP
    d = spec.real_dim
    atom = spec.atom
    i = spec.degree
    slot_scale = float(math.factorial(spec.n - i))

    if atom is not None:
        loc = atom.location[None, :]
        if loc.shape[1] != d:
            raise ValueError(f"atom location dimension {loc.shape[1]} != {d}")
        slots = []
        if i > 0:
            hf = _field_hessians_smooth(spec, f, loc, step, threads)
            slots.extend([hf] * i)
        for w in spec.weights:
            if isinstance(w, MatrixAtom):
                slots.append(w.matrix.data[None])
            else:
                slots.append(_matrix_slot_values(w, loc))
        det = polarized_det_batch(spec.field, slots)[0]
        b = float(np.asarray(spec.scalar_weight(loc))[0])
        return float(slot_scale * b * det)

    if grid is None:
        raise ValueError("a quadrature grid is required unless a weight is a point atom")
    if grid.dim != d:
        raise ValueError(f"grid dimension {grid.dim} != spec real dimension {d}")
    if not _check_supports_inside(grid, (spec.scalar_weight, *spec.weights)):
        return 0.0

    nodes = grid.nodes()
    bvals = np.asarray(spec.scalar_weight(nodes), dtype=float)

    slots = []
    if i > 0:
        if smooth:
            hf = _field_hessians_smooth(spec, f, nodes, step, threads)
        else:
            hf = _field_hessians_grid(spec, f, grid, sigma_cells, threads)
        slots.extend([hf] * i)
    for w in spec.weights:
        slots.append(_matrix_slot_values(w, nodes, grid))

    dets = polarized_det_batch(spec.field, slots)
    integrand = bvals * dets
    return float(slot_scale * grid.cell_volume * np.sum(integrand))


# ---------------------------------------------------------------------------
# induced valuations on convex bodies
# ---------------------------------------------------------------------------

def _origin_in_supports(spec: ValuationSpec) -> bool:
    zero_ok = []
    for w in (spec.scalar_weight, *spec.weights):
        lo = getattr(w, "support_lo", None)
        hi = getattr(w, "support_hi", None)
        if lo is None:
            continue
        zero_ok.append(bool(np.all(np.asarray(lo) <= 0) and np.all(np.asarray(hi) >= 0)))
    return any(zero_ok)


def body_valuation(spec: ValuationSpec, K: ConvexBody, grid: Grid = None, *,
                   sigma_body: float = 0.0, step: float = None, threads: int = 1) -> float:
    """phi(K) = Phi(h_K): the induced i-homogeneous valuation on bodies.

    Support functions are singular at the origin, so either every weight
    must be supported away from 0 (sigma_body = 0: direct stencils on a
    smooth h_K) or sigma_body > 0 selects the smoothed grid route, which
    also covers polytopal h_K kinks away from 0.
    """
    if sigma_body == 0.0 and _origin_in_supports(spec):
        raise ValueError(
            "origin lies inside a weight support but sigma_body = 0; "
            "pass sigma_body > 0 to smooth the support function"
        )
    h = K.support
    if sigma_body > 0.0:
        return eval_valuation(spec, h, grid, smooth=False, sigma_cells=sigma_body,
                              step=step, threads=threads)
    return eval_valuation(spec, h, grid, smooth=True, step=step, threads=threads)


def homogeneous_components(phi, K: ConvexBody, max_degree: int):
    """Coefficients c_0..c_n of phi(lambda K) = sum c_i lambda^i.

    Probes lambda = 1..n+1 and solves the Vandermonde system; for an
    i-homogeneous phi everything except c_i vanishes to solver precision.
    """
    n = int(max_degree)
    lambdas = np.arange(1, n + 2, dtype=float)
    values = np.array([phi(K.scale(lam)) for lam in lambdas])
    V = np.vander(lambdas, N=n + 1, increasing=True)
    cond = float(np.linalg.cond(V))
    if cond > 1e12:
        raise ArithmeticError(f"Vandermonde system is ill-conditioned (cond ~ {cond:.3e})")
    return np.linalg.solve(V, values)


def parity_split(spec: ValuationSpec, K: ConvexBody, grid: Grid = None, **kwargs):
    """(even, odd) parts of phi at K: (phi(K) +- phi(-K)) / 2."""
    plus = body_valuation(spec, K, grid, **kwargs)
    minus = body_valuation(spec, K.negate(), grid, **kwargs)
    return 0.5 * (plus + minus), 0.5 * (plus - minus)
