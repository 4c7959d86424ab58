"""Convex bodies, support functions, and piecewise-linear convex functions.

Bodies are represented either by a vertex list (Polytope) or by an
explicit 1-homogeneous support function h(xi) = |xi| g(xi_1 / |xi|)
built from a scalar profile g on [-1, 1] (SmoothProfileBody).  A third
thin wrapper adds a ball summand, h + r |xi|.

Support functions satisfy the lattice identities that make valuations on
bodies talk to valuations on functions: if A, B and A u B are all convex
then h_{A u B} = max(h_A, h_B) and h_{A n B} = min(h_A, h_B).  The slab
generator below manufactures such pairs by cutting one body with two
overlapping half-spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Union

import numpy as np

from .hessian import fd_hessian_batch

__all__ = [
    "GeometryError",
    "Polytope",
    "SmoothProfileBody",
    "RoundedBody",
    "ConvexBody",
    "PLConvexFunction",
    "support_function",
    "unit_directions",
    "hausdorff_distance",
    "ball_body",
    "make_two_ball_body",
    "certify_support_convexity",
    "halfspace_clip",
    "generate_union_convex_pair",
    "slab_intersection",
    "random_shell_polytope",
    "pl_lattice",
    "midpoint_convex",
    "ball_slab_support",
    "pl_tangent_approx",
]


class GeometryError(ValueError):
    """A body operation produced an empty or invalid configuration."""


# ---------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of a finite vertex list; h(xi) = max_v <v, xi>.

    Points inside the hull may appear in the list; they do not change the
    support function.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            raise GeometryError("a polytope needs at least one vertex")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def support(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.max(xi @ self.vertices.T, axis=-1)

    def scale(self, lam: float) -> "Polytope":
        if lam <= 0:
            raise GeometryError(f"scale factor must be positive, got {lam}")
        return Polytope(lam * self.vertices)

    def negate(self) -> "Polytope":
        return Polytope(-self.vertices)

    def translate(self, x0) -> "Polytope":
        return Polytope(self.vertices + np.asarray(x0, dtype=float))


@dataclass(frozen=True, eq=False)
class SmoothProfileBody:
    """Body of revolution about the first axis, given by its support profile.

    h(xi) = |xi| g(xi_1 / |xi|) + <center, xi>, with g smooth on [-1, 1].
    1-homogeneity holds by construction; convexity of h is a property of g
    and is certified numerically (see certify_support_convexity).
    """

    dim: int
    profile: Callable[[np.ndarray], np.ndarray]
    center: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        c = np.zeros(self.dim) if self.center is None else np.asarray(self.center, dtype=float)
        if c.shape != (self.dim,):
            raise GeometryError(f"center shape {c.shape} does not match dim {self.dim}")
        object.__setattr__(self, "center", c)

    def support(self, xi):
        xi = np.asarray(xi, dtype=float)
        r = np.linalg.norm(xi, axis=-1)
        u = np.divide(xi[..., 0], r, out=np.zeros_like(r), where=r > 0)
        return r * self.profile(np.clip(u, -1.0, 1.0)) + xi @ self.center

    def scale(self, lam: float) -> "SmoothProfileBody":
        if lam <= 0:
            raise GeometryError(f"scale factor must be positive, got {lam}")
        g = self.profile
        return SmoothProfileBody(self.dim, lambda u: lam * g(u), lam * self.center)

    def negate(self) -> "SmoothProfileBody":
        g = self.profile
        return SmoothProfileBody(self.dim, lambda u: g(-u), -self.center)

    def translate(self, x0) -> "SmoothProfileBody":
        return SmoothProfileBody(self.dim, self.profile, self.center + np.asarray(x0, dtype=float))


@dataclass(frozen=True, eq=False)
class RoundedBody:
    """Minkowski sum of a body with a centered ball: h = h_body + radius |xi|."""

    body: "ConvexBody"
    radius: float

    @property
    def dim(self) -> int:
        return self.body.dim

    def support(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.body.support(xi) + self.radius * np.linalg.norm(xi, axis=-1)

    def scale(self, lam: float) -> "RoundedBody":
        return RoundedBody(self.body.scale(lam), lam * self.radius)

    def negate(self) -> "RoundedBody":
        return RoundedBody(self.body.negate(), self.radius)

    def translate(self, x0) -> "RoundedBody":
        return RoundedBody(self.body.translate(x0), self.radius)


ConvexBody = Union[Polytope, SmoothProfileBody, RoundedBody]


def support_function(K: ConvexBody, xi):
    """h_K(xi) = sup_{x in K} <x, xi>; accepts a single vector or a batch."""
    xi = np.asarray(xi, dtype=float)
    return K.support(xi)


# ---------------------------------------------------------------------------
# sphere sampling and the Hausdorff metric
# ---------------------------------------------------------------------------

def unit_directions(dim: int, count: int, seed: int = 7):
    """Deterministic unit directions: +-axes first, then a fixed random stream.

    For a fixed seed the first m directions are a prefix of the first m' > m,
    so sampled suprema are monotone in the sample count.
    """
    axes = np.concatenate([np.eye(dim), -np.eye(dim)], axis=0)
    if count <= len(axes):
        return axes[:count]
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((count - len(axes), dim))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    return np.concatenate([axes, extra], axis=0)


def hausdorff_distance(A: ConvexBody, B: ConvexBody, sphere_samples: int = 2048) -> float:
    """sup-norm of h_A - h_B over sampled unit directions."""
    if A.dim != B.dim:
        raise GeometryError(f"dimension mismatch: {A.dim} vs {B.dim}")
    dirs = unit_directions(A.dim, sphere_samples)
    return float(np.max(np.abs(A.support(dirs) - B.support(dirs))))


# ---------------------------------------------------------------------------
# the two-ball parity body and convexity certification
# ---------------------------------------------------------------------------

def ball_body(dim: int, radius: float = 1.0, center=None) -> SmoothProfileBody:
    return SmoothProfileBody(dim, lambda u: np.full_like(np.asarray(u, dtype=float), radius), center)


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def make_two_ball_body(dim: int) -> SmoothProfileBody:
    """Smoothed intersection of balls of radii 1 and 2 along the first axis.

    The support profile equals 1 on directions with xi_1/|xi| >= 0.8 and 2
    for xi_1/|xi| <= -0.8, so near +-e_1 the support function is exactly
    |xi| resp. 2 |xi| and its Hessians there are diag(0, 1, ..., 1) and
    2 diag(0, 1, ..., 1).  The plateaus are joined by a quintic smoothstep
    in the polar angle: blending in the angle rather than in xi_1/|xi|
    keeps h convex (the angular blend has min principal curvature ~ 0.25,
    while the same blend in the cosine variable dips negative).
    """
    if dim < 2:
        raise GeometryError("the two-ball body needs dimension >= 2")
    th_lo = float(np.arccos(0.8))
    th_hi = float(np.arccos(-0.8))

    def profile(u):
        theta = np.arccos(np.clip(u, -1.0, 1.0))
        return 1.0 + _smoothstep((theta - th_lo) / (th_hi - th_lo))

    body = SmoothProfileBody(dim, profile)
    min_eig = certify_support_convexity(body)
    if min_eig < -1e-6:
        raise GeometryError(
            f"two-ball profile failed its convexity certificate (min eig {min_eig:.3e})"
        )
    return body


def certify_support_convexity(body: ConvexBody, n_dirs: int = 400, seed: int = 11) -> float:
    """Smallest Hessian eigenvalue of the support function on a sphere sample.

    A 1-homogeneous h always has the radial direction in the kernel, so a
    convex h yields a value ~ 0 up to difference error; clearly negative
    values disprove convexity.  Advisory, not a proof.
    """
    dirs = unit_directions(body.dim, n_dirs)
    H = fd_hessian_batch(body.support, dirs, step=1e-4)
    return float(np.min(np.linalg.eigvalsh(H)))


# ---------------------------------------------------------------------------
# half-space clipping and union-convex pairs
# ---------------------------------------------------------------------------

def halfspace_clip(P: Polytope, normal, offset: float) -> Polytope:
    """Vertices of P cut by the half-space {x : <normal, x> <= offset}.

    Keeps inside vertices and adds the plane crossing of every insideapart
    outside segment.  Since hull edges are among all vertex pairs, the
    result's hull is exact in any dimension (extra interior points do not
    change the support function).
    """
    normal = np.asarray(normal, dtype=float)
    d = P.vertices @ normal - offset
    tol = 1e-12 * (1.0 + np.abs(d).max())
    inside = d <= tol
    if not np.any(inside):
        raise GeometryError("half-space clip produced an empty intersection")
    pts = [P.vertices[inside]]
    outside = ~inside
    if np.any(outside):
        vi, di = P.vertices[inside], d[inside]
        vo, do = P.vertices[outside], d[outside]
        # lam[i, o] in [0, 1]: crossing of the segment v_i -> v_o
        lam = di[:, None] / (di[:, None] - do[None, :])
        cross = vi[:, None, :] + lam[..., None] * (vo[None, :, :] - vi[:, None, :])
        pts.append(cross.reshape(-1, P.dim))
    verts = np.unique(np.round(np.vstack(pts), 12), axis=0)
    return Polytope(verts)


def generate_union_convex_pair(K: Polytope, s: float, t: float, axis: int = 0):
    """Bodies A = K n {x_axis <= t}, B = K n {x_axis >= s} with s < t.

    Because the half-spaces overlap, A u B = K is convex, so the pair
    satisfies max(h_A, h_B) = h_K and min(h_A, h_B) = h_{A n B}.
    """
    if not s < t:
        raise GeometryError(f"need s < t, got s = {s}, t = {t}")
    e = np.zeros(K.dim)
    e[axis] = 1.0
    A = halfspace_clip(K, e, t)
    B = halfspace_clip(K, -e, -s)
    return A, B


def slab_intersection(K: Polytope, s: float, t: float, axis: int = 0) -> Polytope:
    """K n {s <= x_axis <= t}; the intersection body A n B of the pair above."""
    e = np.zeros(K.dim)
    e[axis] = 1.0
    return halfspace_clip(halfspace_clip(K, e, t), -e, -s)


def random_shell_polytope(rng, dim: int = 3, n_vertices: int = 10, radius: float = 0.35,
                          min_sep: float = 0.7, max_tries: int = 10000) -> Polytope:
    """Random polytope with well-separated vertices near a sphere shell.

    A minimum chordal separation between vertex directions keeps the
    normal fan well conditioned: near-duplicate vertices produce weak,
    slowly decaying kinks in the support function, which smoothed-grid
    quadratures resolve poorly.
    """
    dirs = []
    tries = 0
    while len(dirs) < n_vertices:
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        if all(np.linalg.norm(v - w) > min_sep for w in dirs):
            dirs.append(v)
        tries += 1
        if tries > max_tries:
            raise GeometryError("could not place separated vertices; lower min_sep")
    radii = radius * rng.uniform(0.85, 1.0, (n_vertices, 1))
    return Polytope(np.array(dirs) * radii)


# ---------------------------------------------------------------------------
# piecewise-linear convex functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PLConvexFunction:
    """f(x) = max_j (<a_j, x> + b_j): a finite max of affine pieces."""

    slopes: np.ndarray
    offsets: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.slopes, dtype=float))
        b = np.zeros(a.shape[0]) if self.offsets is None else np.asarray(self.offsets, dtype=float)
        if b.shape != (a.shape[0],):
            raise ValueError(f"offsets shape {b.shape} does not match {a.shape[0]} pieces")
        object.__setattr__(self, "slopes", a)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self) -> int:
        return self.slopes.shape[1]

    @property
    def npieces(self) -> int:
        return self.slopes.shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.max(x @ self.slopes.T + self.offsets, axis=-1)

    def add_affine(self, a, c: float = 0.0) -> "PLConvexFunction":
        """The function f + <a, x> + c (every piece shifts)."""
        return PLConvexFunction(self.slopes + np.asarray(a, dtype=float), self.offsets + c)

    @classmethod
    def from_polytope_support(cls, P: Polytope) -> "PLConvexFunction":
        return cls(P.vertices, np.zeros(P.vertices.shape[0]))


def midpoint_convex(fn, lo, hi, n_pairs: int = 10000, tol: float = 1e-8, seed: int = 0) -> bool:
    """Midpoint-convexity verdict on random pairs in a box.  Advisory."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    rng = np.random.default_rng(seed)
    x = lo + (hi - lo) * rng.random((n_pairs, lo.size))
    y = lo + (hi - lo) * rng.random((n_pairs, lo.size))
    mid = 0.5 * (x + y)
    defect = fn(mid) - 0.5 * (np.asarray(fn(x)) + np.asarray(fn(y)))
    return bool(np.max(defect) <= tol)


def pl_lattice(f: PLConvexFunction, g: PLConvexFunction, box_halfwidth: float = 2.0,
               n_pairs: int = 10000, tol: float = 1e-8, seed: int = 0):
    """max/min of two PL convex functions for the valuation identity.

    The max is again PL convex with the union of the piece lists; the min
    is returned as a plain callable together with a sampled midpoint
    convexity verdict (min of convex functions need not be convex).
    """
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    fmax = PLConvexFunction(
        np.vstack([f.slopes, g.slopes]), np.concatenate([f.offsets, g.offsets])
    )

    def fmin(x):
        return np.minimum(f(x), g(x))

    lo = -box_halfwidth * np.ones(f.dim)
    hi = box_halfwidth * np.ones(f.dim)
    flag = midpoint_convex(fmin, lo, hi, n_pairs=n_pairs, tol=tol, seed=seed)
    return fmax, fmin, flag


def pl_tangent_approx(fn, dfn, points) -> PLConvexFunction:
    """PL underestimate of a smooth convex 1-d function from its tangents."""
    points = np.asarray(points, dtype=float)
    slopes = np.array([[dfn(p)] for p in points])
    offsets = np.array([fn(p) - dfn(p) * p for p in points])
    return PLConvexFunction(slopes, offsets)


# ---------------------------------------------------------------------------
# closed-form support functions of sliced balls
# ---------------------------------------------------------------------------

def ball_slab_support(u, s: float, t: float, radius: float = 1.0):
    """Support function of {|x| <= radius, s <= <u, x> <= t} as a callable.

    Piecewise closed form: the unconstrained spherical maximizer wins when
    its u-coordinate lies in [s, t]; otherwise the maximizer sits on the
    rim at height t (or s).  C^1 across the two interface cones, smooth
    elsewhere away from 0.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    if not (-radius <= s < t <= radius):
        raise GeometryError(f"need -radius <= s < t <= radius, got s={s}, t={t}")
    wt = np.sqrt(radius**2 - t**2)
    ws = np.sqrt(radius**2 - s**2)

    def h(xi):
        xi = np.asarray(xi, dtype=float)
        r = np.linalg.norm(xi, axis=-1)
        xu = xi @ u
        perp = np.sqrt(np.maximum(r * r - xu * xu, 0.0))
        top = radius * xu > t * r
        bot = radius * xu < s * r
        return np.select(
            [top, bot],
            [t * xu + wt * perp, s * xu + ws * perp],
            default=radius * r,
        )

    def interface_margin(xi):
        """Distance of xi (per row) from the two non-smooth cones, in the
        cosine variable radius * xu / r; used to filter sample points."""
        xi = np.asarray(xi, dtype=float)
        r = np.linalg.norm(xi, axis=-1)
        c = radius * (xi @ u) / np.where(r > 0, r, 1.0)
        return np.minimum(np.abs(c - t), np.abs(c - s))

    h.interface_margin = interface_margin
    return h
