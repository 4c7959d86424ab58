"""Finite-difference real Hessians and structured field Hessians.

Real coordinate layout is fixed per field so assembly is bit-reproducible:

* C:   x1, y1, x2, y2, ...            (z_p = x_p + i y_p)
* H:   t1, x1, y1, z1, t2, ...        (q_a = t_a + i x_a + j y_a + k z_a)
* O2:  x10..x17, x20..x27             (q_a = sum_i x_ai e_i)

For a real-valued C^2 function the structured Hessians reduce to fixed
linear combinations of real second partials:

* complex entry (p, q):  (1/4) * sum_{mu,nu} conj(u_mu) u_nu f_{mu_p nu_q}
  with units u = (1, i), i.e. ((f_xx + f_yy) + i (f_{x y} - f_{y x})) / 4;
* quaternionic entry (a, b): sum_{mu,nu} u_mu conj(u_nu) f_{mu_a nu_b}
  with units u = (1, i, j, k) - the conjugate-derivative operator applied
  to the plain one, whose unit coefficients sit on the right with flipped
  signs (no 1/4 normalization, so e.g. the Hessian of |q|^2 is 8);
* octonionic entry (a, b): sum_{i,j} e_i conj(e_j) f_{x_ai x_bj}.

These combinations are precomputed once as coefficient tables and
contracted against a finite-difference real Hessian, rather than nesting
first-difference quotients.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    FIELD_COMPONENTS,
    HermitianMatrix,
    oct_conj,
    oct_mul,
    oct_unit,
    quat_conj,
    quat_mul,
)

__all__ = [
    "DEFAULT_STEP",
    "fd_hessian",
    "fd_hessian_batch",
    "fd_laplacian_batch",
    "grid_hessian",
    "assemble_structured",
    "structured_hessian",
    "SmoothField",
]

#: relative central-difference step; the effective step is step * (1 + |x|).
#: 5e-4 balances O(h^2) truncation against the eps/h^2 rounding floor, which
#: has to sit below 1e-9 relative for the linear-invariance checks.
DEFAULT_STEP = 5e-4


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def fd_hessian_batch(f, points, step=None):
    """Central-difference Hessians of ``f`` at rows of ``points``.

    ``f`` must be vectorized: (m, d) -> (m,).  Returns (N, d, d) symmetric
    arrays; the stencil is the standard 3-point one on the diagonal and the
    4-point cross formula off-diagonal, exact on quadratics up to roundoff.
    """
    points, _ = _as_points(points)
    N, d = points.shape
    if step is None:
        step = DEFAULT_STEP
    h = step * (1.0 + np.linalg.norm(points, axis=1))  # (N,)

    eye = np.eye(d)
    stencil = [points]
    for a in range(d):
        stencil.append(points + h[:, None] * eye[a])
        stencil.append(points - h[:, None] * eye[a])
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    for a, b in pairs:
        ea, eb = eye[a], eye[b]
        stencil.append(points + h[:, None] * (ea + eb))
        stencil.append(points + h[:, None] * (ea - eb))
        stencil.append(points - h[:, None] * (ea - eb))
        stencil.append(points - h[:, None] * (ea + eb))

    vals = np.asarray(f(np.concatenate(stencil, axis=0)), dtype=float).reshape(len(stencil), N)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite function value inside the Hessian stencil")

    h2 = h * h
    H = np.empty((N, d, d))
    f0 = vals[0]
    for a in range(d):
        fp, fm = vals[1 + 2 * a], vals[2 + 2 * a]
        H[:, a, a] = (fp - 2.0 * f0 + fm) / h2
    base = 1 + 2 * d
    for k, (a, b) in enumerate(pairs):
        fpp, fpm, fmp, fmm = vals[base + 4 * k: base + 4 * k + 4]
        H[:, a, b] = H[:, b, a] = (fpp - fpm - fmp + fmm) / (4.0 * h2)
    return H


def fd_hessian(f, x, step=None):
    """Central-difference Hessian at a single point; see fd_hessian_batch."""
    x = np.asarray(x, dtype=float)
    return fd_hessian_batch(f, x[None, :], step=step)[0]


def fd_laplacian_batch(f, points, step=None):
    """Central-difference Laplacian (diagonal stencil only) at each row."""
    points, _ = _as_points(points)
    N, d = points.shape
    if step is None:
        step = DEFAULT_STEP
    h = step * (1.0 + np.linalg.norm(points, axis=1))
    eye = np.eye(d)
    stencil = [points]
    for a in range(d):
        stencil.append(points + h[:, None] * eye[a])
        stencil.append(points - h[:, None] * eye[a])
    vals = np.asarray(f(np.concatenate(stencil, axis=0)), dtype=float).reshape(len(stencil), N)
    out = np.zeros(N)
    for a in range(d):
        out += vals[1 + 2 * a] + vals[2 + 2 * a] - 2.0 * vals[0]
    return out / (h * h)


def grid_hessian(values, spacing, margin):
    """Hessians from samples on a uniform grid, by pure array shifts.

    ``values`` has shape ``ext_shape`` (d axes); the result covers the
    interior region obtained by trimming ``margin`` cells per side and has
    shape ``interior_shape + (d, d)``.  Uses fourth-order central stencils
    (reach 2 cells, so margin >= 2): Gaussian-smoothed kinks are resolved
    over only a few cells and the quadratic-order bias of the 3-point
    stencil, O((cell/sigma)^2) relative, would visibly inflate
    determinant-of-Hessian masses.
    """
    values = np.asarray(values, dtype=float)
    d = values.ndim
    spacing = np.broadcast_to(np.asarray(spacing, dtype=float), (d,))
    margin = np.broadcast_to(np.asarray(margin, dtype=int), (d,))
    if np.any(margin < 2):
        raise ValueError("grid_hessian needs at least two margin cells per side")

    def region(shift):
        return tuple(
            slice(int(m + s), int(size - m + s))
            for m, s, size in zip(margin, shift, values.shape)
        )

    eye = np.eye(d, dtype=int)
    core = values[region(np.zeros(d, dtype=int))]
    H = np.empty(core.shape + (d, d))
    for a in range(d):
        ea = eye[a]
        H[..., a, a] = (
            -values[region(2 * ea)]
            + 16.0 * values[region(ea)]
            - 30.0 * core
            + 16.0 * values[region(-ea)]
            - values[region(-2 * ea)]
        ) / (12.0 * spacing[a] ** 2)
    for a in range(d):
        for b in range(a + 1, d):
            ea, eb = eye[a], eye[b]
            near = (
                values[region(ea + eb)]
                - values[region(ea - eb)]
                - values[region(eb - ea)]
                + values[region(-ea - eb)]
            )
            far = (
                values[region(2 * (ea + eb))]
                - values[region(2 * (ea - eb))]
                - values[region(2 * (eb - ea))]
                + values[region(-2 * (ea + eb))]
            )
            cross = (16.0 * near - far) / (48.0 * spacing[a] * spacing[b])
            H[..., a, b] = cross
            H[..., b, a] = cross
    return H


# ---------------------------------------------------------------------------
# structured Hessians
# ---------------------------------------------------------------------------

# complex: conj(u_mu) u_nu / 4 with u = (1, i)
_COEF_C = np.array([[1.0, 1.0j], [-1.0j, 1.0]]) / 4.0

# quaternionic: u_mu * conj(u_nu), components on the trailing axis
_COEF_H = np.zeros((4, 4, 4))
for _m in range(4):
    for _n in range(4):
        _COEF_H[_m, _n] = quat_mul(np.eye(4)[_m], quat_conj(np.eye(4)[_n]))

# octonionic: e_i * conj(e_j)
_COEF_O = np.zeros((8, 8, 8))
for _i in range(8):
    for _j in range(8):
        _COEF_O[_i, _j] = oct_mul(oct_unit(_i), oct_conj(oct_unit(_j)))


def assemble_structured(field, hreal):
    """Contract real Hessians (..., d, d) into field-Hessian matrices.

    Returns (..., n, n) complex for C and (..., n, n, comps) for H/O2,
    Hermitian-symmetrized; for R the input is returned symmetrized.
    """
    hreal = np.asarray(hreal, dtype=float)
    if field == "R":
        return 0.5 * (hreal + np.swapaxes(hreal, -2, -1))
    m = FIELD_COMPONENTS[field]
    d = hreal.shape[-1]
    if d % m:
        raise ValueError(f"real dimension {d} is not a multiple of {m} for field {field}")
    n = d // m
    lead = hreal.shape[:-2]
    blocks = hreal.reshape(lead + (n, m, n, m))
    if field == "C":
        out = np.einsum("...ambn,mn->...ab", blocks, _COEF_C)
        return 0.5 * (out + np.conj(np.swapaxes(out, -2, -1)))
    coef = _COEF_H if field == "H" else _COEF_O
    out = np.einsum("...ambn,mnc->...abc", blocks, coef)
    flip = np.swapaxes(out, -3, -2).copy()
    flip[..., 1:] = -flip[..., 1:]
    return 0.5 * (out + flip)


def structured_hessian(field, f, p, step=None):
    """Field Hessian of a real-valued function at a point, as a HermitianMatrix."""
    hreal = fd_hessian(f, p, step=step)
    return HermitianMatrix(field, assemble_structured(field, hreal))


class SmoothField:
    """A twice-differentiable scalar field bundled with its difference step."""

    def __init__(self, fn, step=DEFAULT_STEP):
        self.fn = fn
        self.step = float(step)

    def __call__(self, x):
        return self.fn(x)

    def hessian(self, x):
        return fd_hessian(self.fn, np.asarray(x, dtype=float), step=self.step)
