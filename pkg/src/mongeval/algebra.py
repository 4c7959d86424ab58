"""Division-algebra arithmetic, Hermitian matrices, and their determinants.

Scalars are stored componentwise over a fixed real basis:

* quaternions as ``(..., 4)`` arrays over ``(1, i, j, k)`` with
  ``i^2 = j^2 = k^2 = -1`` and ``ij = k``;
* octonions as ``(..., 8)`` arrays over ``(e0, ..., e7)``, built by
  Cayley-Dickson doubling of the quaternions,

      (a, b) (c, d) = (a c - conj(d) b,  d a + b conj(c)),

  which makes ``e0`` the identity, fixes ``e1 e2 = e3``, and embeds the
  quaternions on ``e0..e3``.

Hermitian matrices over the four scalar fields carry real determinant
polynomials: the ordinary determinant for R and C, the Moore determinant
for H, and ``a b - |q|^2`` for 2x2 octonionic matrices.  The Moore
determinant of an n x n quaternionic Hermitian matrix is recovered from
the spectrum of its 2n x 2n complex embedding, where every eigenvalue
appears exactly twice: the product of one representative per pair has
the right sign (a bare fourth root of the real realization does not),
and is cross-checked against ``det(realization) == moore^4``.

Polarizing any of these degree-n polynomials gives the mixed
determinant: a symmetric n-linear form restoring the determinant on the
diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "FIELDS",
    "FIELD_COMPONENTS",
    "PairingError",
    "DeterminantConsistencyError",
    "quat_mul",
    "quat_conj",
    "quat_abs2",
    "quat_matmul",
    "quat_conj_transpose",
    "oct_mul",
    "oct_conj",
    "oct_abs2",
    "oct_unit",
    "quat_left_matrix",
    "realize_quat_matrix",
    "complex_embedding",
    "jacobi_eigvalsh",
    "moore_det",
    "moore_det_batch",
    "oct_det2",
    "HermitianMatrix",
    "MixedDetForm",
    "mixed_det",
    "det_batch",
    "polarized_det_batch",
]

FIELDS = ("R", "C", "H", "O2")

#: real dimension of a single scalar over each field
FIELD_COMPONENTS = {"R": 1, "C": 2, "H": 4, "O2": 8}


class PairingError(ArithmeticError):
    """The spectrum of a complex embedding did not split into duplicated
    pairs within tolerance, so the Moore determinant is ambiguous."""


class DeterminantConsistencyError(ArithmeticError):
    """det(realization) and moore_det**4 disagree beyond tolerance."""


# ---------------------------------------------------------------------------
# quaternions
# ---------------------------------------------------------------------------

def quat_mul(p, q):
    """Quaternion product, vectorized over leading axes of (..., 4) arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    t1, x1, y1, z1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    t2, x2, y2, z2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            t1 * t2 - x1 * x2 - y1 * y2 - z1 * z2,
            t1 * x2 + x1 * t2 + y1 * z2 - z1 * y2,
            t1 * y2 - x1 * z2 + y1 * t2 + z1 * x2,
            t1 * z2 + x1 * y2 - y1 * x2 + z1 * t2,
        ],
        axis=-1,
    )


def quat_conj(p):
    p = np.asarray(p, dtype=float)
    out = p.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def quat_abs2(p):
    p = np.asarray(p, dtype=float)
    return np.sum(p * p, axis=-1)


# e_a e_b = sum_c _QTAB[a, b, c] e_c
_QTAB = np.zeros((4, 4, 4))
for _a in range(4):
    for _b in range(4):
        _QTAB[_a, _b] = quat_mul(np.eye(4)[_a], np.eye(4)[_b])


def quat_matmul(A, B):
    """Matrix product of quaternionic matrices stored as (n, k, 4)/(k, m, 4)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return np.einsum("ika,kjb,abc->ijc", A, B, _QTAB)


def quat_conj_transpose(A):
    return quat_conj(np.swapaxes(np.asarray(A, dtype=float), 0, 1))


# ---------------------------------------------------------------------------
# octonions (Cayley-Dickson doubling of the quaternions)
# ---------------------------------------------------------------------------

def oct_mul(p, q):
    """Octonion product of (..., 8) coefficient arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a, b = p[..., :4], p[..., 4:]
    c, d = q[..., :4], q[..., 4:]
    left = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    right = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([left, right], axis=-1)


def oct_conj(p):
    p = np.asarray(p, dtype=float)
    out = p.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def oct_abs2(p):
    p = np.asarray(p, dtype=float)
    return np.sum(p * p, axis=-1)


def oct_unit(i):
    e = np.zeros(8)
    e[i] = 1.0
    return e


# e_i e_j = sum_c _OTAB[i, j, c] e_c
_OTAB = np.zeros((8, 8, 8))
for _i in range(8):
    for _j in range(8):
        _OTAB[_i, _j] = oct_mul(oct_unit(_i), oct_unit(_j))


# ---------------------------------------------------------------------------
# realization and complex embedding of quaternionic matrices
# ---------------------------------------------------------------------------

def quat_left_matrix(q):
    """4x4 real matrix of left multiplication by q on (t, x, y, z) coords."""
    t, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [t, -x, -y, -z],
            [x, t, -z, y],
            [y, z, t, -x],
            [z, -y, x, t],
        ]
    )


def realize_quat_matrix(A):
    """Real 4n x 4n matrix of x -> Ax under H^n ~ R^{4n}.

    Coordinates are interleaved per quaternionic entry:
    t_1, x_1, y_1, z_1, t_2, ...  A need not be Hermitian.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    out = np.zeros((4 * n, 4 * n))
    for a in range(n):
        for b in range(n):
            out[4 * a:4 * a + 4, 4 * b:4 * b + 4] = quat_left_matrix(A[a, b])
    return out


def complex_embedding(A):
    """Complex 2n x 2n matrix of x -> Ax on H^n viewed as a right C-module.

    Writing each entry q = (t + ix) + j (y - iz) = a + j c, the embedding is
    [[A1, -conj(A2)], [A2, conj(A1)]] with A1 = t + ix and A2 = y - iz.
    It is multiplicative, and Hermitian whenever A is quaternionic Hermitian.
    Vectorized over leading axes of (..., n, n, 4) input.
    """
    A = np.asarray(A, dtype=float)
    a1 = A[..., 0] + 1j * A[..., 1]
    a2 = A[..., 2] - 1j * A[..., 3]
    top = np.concatenate([a1, -np.conj(a2)], axis=-1)
    bot = np.concatenate([a2, np.conj(a1)], axis=-1)
    return np.concatenate([top, bot], axis=-2)


# ---------------------------------------------------------------------------
# Jacobi eigenvalues for Hermitian matrices
# ---------------------------------------------------------------------------

def jacobi_eigvalsh(H, tol=1e-14, max_sweeps=60):
    """Eigenvalues of a (small, dense) Hermitian matrix by cyclic Jacobi.

    Each rotation is a complex Givens rotation annihilating one
    off-diagonal entry.  Returns eigenvalues in ascending order.
    """
    A = np.array(H, dtype=complex)
    m = A.shape[0]
    if m == 1:
        return A.diagonal().real.copy()
    scale = max(np.abs(A).max(), 1e-300)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                off = max(off, abs(A[p, q]))
        if off <= tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                b = A[p, q]
                if abs(b) <= 1e-300:
                    continue
                theta = np.angle(b)
                tau = (A[q, q].real - A[p, p].real) / (2.0 * abs(b))
                # smaller-angle root of t^2 - 2 tau t - 1 = 0
                if tau == 0.0:
                    t = 1.0
                else:
                    t = -np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                U = np.eye(m, dtype=complex)
                U[p, p] = c
                U[q, q] = c
                U[p, q] = -s * np.exp(1j * theta)
                U[q, p] = s * np.exp(-1j * theta)
                A = U.conj().T @ A @ U
    return np.sort(A.diagonal().real)


# ---------------------------------------------------------------------------
# Moore determinant and the octonionic 2x2 determinant
# ---------------------------------------------------------------------------

def _quat_components(A):
    """Coerce HermitianMatrix / array input to an (n, n, 4) float array."""
    if isinstance(A, HermitianMatrix):
        if A.field != "H":
            raise ValueError(f"expected a quaternionic matrix, got field {A.field!r}")
        return A.data
    A = np.asarray(A, dtype=float)
    if A.ndim != 3 or A.shape[0] != A.shape[1] or A.shape[2] != 4:
        raise ValueError(f"expected an (n, n, 4) quaternionic matrix, got shape {A.shape}")
    return A


def _check_quat_hermitian(A, tol=1e-8):
    dev = np.abs(A - quat_conj_transpose(A)).max()
    if dev > tol * (1.0 + np.abs(A).max()):
        raise ValueError(f"matrix is not quaternionic Hermitian (deviation {dev:.3e})")


def _paired_product(eigs, pair_tol):
    """Product of one representative per duplicated eigenvalue pair.

    ``eigs`` has even trailing length and is sorted ascending along the
    last axis; pairs are taken by sorted adjacency.
    """
    pairs = eigs.reshape(*eigs.shape[:-1], -1, 2)
    gaps = pairs[..., 1] - pairs[..., 0]
    if np.any(gaps > pair_tol):
        raise PairingError(
            "eigenvalues of the complex embedding do not pair up "
            f"(max gap {float(np.max(gaps)):.3e} > tol {float(np.max(pair_tol)):.3e})"
        )
    return np.prod(pairs.mean(axis=-1), axis=-1)


def moore_det(A, check=True):
    """Moore determinant of a quaternionic Hermitian matrix.

    Computed as the product of one representative per duplicated
    eigenvalue pair of the complex embedding (eigenvalues via Jacobi),
    normalized so the identity maps to 1.  With ``check=True`` the value
    is verified against ``det(realization) == moore^4`` at relative
    tolerance 1e-8.
    """
    A = _quat_components(A)
    _check_quat_hermitian(A)
    n = A.shape[0]
    norm = np.sqrt(np.sum(A * A))
    eigs = jacobi_eigvalsh(complex_embedding(A))
    value = float(_paired_product(eigs, 1e-7 * max(1.0, norm)))
    if check:
        det_real = float(np.linalg.det(realize_quat_matrix(A)))
        p4 = value**4
        rel = abs(det_real - p4) / max(1.0, abs(p4), abs(det_real))
        if rel > 1e-8:
            raise DeterminantConsistencyError(
                f"det(realization) = {det_real:.12e} vs moore^4 = {p4:.12e} "
                f"(relative gap {rel:.3e}), n = {n}"
            )
    return value


def moore_det_batch(data):
    """Vectorized Moore determinant of (..., n, n, 4) Hermitian arrays.

    Hot path for quadrature grids: eigenvalues via LAPACK instead of the
    scalar Jacobi route, same sorted-adjacency pairing.  Agreement of the
    two routes is part of the test suite.
    """
    data = np.asarray(data, dtype=float)
    if data.shape[-3] == 1:
        return data[..., 0, 0, 0].copy()
    norm = np.sqrt(np.sum(data * data, axis=(-3, -2, -1)))
    eigs = np.linalg.eigvalsh(complex_embedding(data))
    return _paired_product(eigs, 1e-7 * np.maximum(1.0, norm)[..., None])


def oct_det2(A):
    """Determinant a*b - |q|^2 of a 2x2 octonionic Hermitian matrix."""
    if isinstance(A, HermitianMatrix):
        if A.field != "O2":
            raise ValueError(f"expected a 2x2 octonionic matrix, got field {A.field!r}")
        A = A.data
    A = np.asarray(A, dtype=float)
    return float(A[0, 0, 0] * A[1, 1, 0] - np.sum(A[0, 1] ** 2))


# ---------------------------------------------------------------------------
# Hermitian matrices over a scalar field
# ---------------------------------------------------------------------------

def _conj_transpose(field, data):
    if field == "R":
        return np.swapaxes(data, -2, -1)
    if field == "C":
        return np.conj(np.swapaxes(data, -2, -1))
    out = np.swapaxes(data, -3, -2).copy()
    out[..., 1:] = -out[..., 1:]
    return out


def hermitian_deviation(field, data):
    return float(np.abs(data - _conj_transpose(field, data)).max())


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Square Hermitian matrix over R, C, H, or O2 (the latter 2x2 only).

    Storage: R -> (n, n) float, C -> (n, n) complex, H -> (n, n, 4),
    O2 -> (2, 2, 8) with scalar components on the trailing axis.
    """

    field: str
    data: np.ndarray

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")
        dtype = complex if self.field == "C" else float
        data = np.asarray(self.data, dtype=dtype)
        comps = FIELD_COMPONENTS[self.field]
        if self.field in ("R", "C"):
            if data.ndim != 2 or data.shape[0] != data.shape[1]:
                raise ValueError(f"bad shape {data.shape} for field {self.field}")
        else:
            if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != comps:
                raise ValueError(f"bad shape {data.shape} for field {self.field}")
        if self.field == "O2" and data.shape[0] != 2:
            raise ValueError("octonionic Hermitian matrices are supported for size 2 only")
        dev = hermitian_deviation(self.field, data)
        if dev > 1e-8 * (1.0 + float(np.abs(data).max(initial=0.0))):
            raise ValueError(f"matrix is not Hermitian over {self.field} (deviation {dev:.3e})")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def det(self, check=True) -> float:
        if self.field == "R":
            return float(np.linalg.det(self.data))
        if self.field == "C":
            return float(np.linalg.det(self.data).real)
        if self.field == "H":
            return moore_det(self.data, check=check)
        return oct_det2(self.data)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        return HermitianMatrix(self.field, self.data + other.data)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        return HermitianMatrix(self.field, self.data - other.data)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.field, self.data * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix(self.field, -self.data)

    @staticmethod
    def identity(field: str, n: int) -> "HermitianMatrix":
        if field in ("R", "C"):
            data = np.eye(n, dtype=complex if field == "C" else float)
        else:
            data = np.zeros((n, n, FIELD_COMPONENTS[field]))
            data[np.arange(n), np.arange(n), 0] = 1.0
        return HermitianMatrix(field, data)

    @staticmethod
    def zeros(field: str, n: int) -> "HermitianMatrix":
        if field in ("R", "C"):
            data = np.zeros((n, n), dtype=complex if field == "C" else float)
        else:
            data = np.zeros((n, n, FIELD_COMPONENTS[field]))
        return HermitianMatrix(field, data)


# ---------------------------------------------------------------------------
# mixed determinants by polarization
# ---------------------------------------------------------------------------

def det_batch(field, data):
    """Determinant polynomial over a batch (..., n, n[, comps]) of matrices."""
    if field == "R":
        return np.linalg.det(np.asarray(data, dtype=float))
    if field == "C":
        return np.linalg.det(np.asarray(data, dtype=complex)).real
    if field == "H":
        return moore_det_batch(data)
    if field == "O2":
        data = np.asarray(data, dtype=float)
        return data[..., 0, 0, 0] * data[..., 1, 1, 0] - np.sum(data[..., 0, 1, :] ** 2, axis=-1)
    raise ValueError(f"unknown field {field!r}")


def _det_scalar(field, data):
    """Single-matrix determinant; quaternionic case goes through Jacobi."""
    if field == "H":
        return moore_det(data, check=False)
    return float(det_batch(field, data[None])[0])


def polarized_det_batch(field, slots):
    """Polarization of the determinant polynomial on batched slot arrays.

    ``slots`` is a list of n arrays of identical shape (..., n, n[, c]).
    Uses the inclusion-exclusion form

        pbar(x_1, ..., x_n)
            = (1/n!) sum_{0 != S subset [n]} (-1)^{n - |S|} p(sum_{i in S} x_i)

    which costs 2^n - 1 determinant evaluations.
    """
    n = len(slots)
    if n == 1:
        return det_batch(field, slots[0])
    total = None
    for mask in range(1, 2**n):
        acc = None
        for i in range(n):
            if mask >> i & 1:
                acc = slots[i] if acc is None else acc + slots[i]
        sign = -1.0 if (n - int(bin(mask).count("1"))) % 2 else 1.0
        term = sign * det_batch(field, acc)
        total = term if total is None else total + term
    return total / math.factorial(n)


@dataclass(frozen=True, eq=False)
class MixedDetForm:
    """The symmetric n-linear polarization of a determinant polynomial.

    form(H, ..., H) == det(H); permuting arguments leaves the value
    unchanged up to roundoff.
    """

    field: str
    n: int

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")
        if self.field == "O2" and self.n != 2:
            raise ValueError("octonionic mixed determinants require n = 2")

    def __call__(self, mats: Sequence[HermitianMatrix]) -> float:
        if len(mats) != self.n:
            raise ValueError(f"expected {self.n} matrices, got {len(mats)}")
        for m in mats:
            if m.field != self.field:
                raise ValueError(f"field mismatch: {m.field} vs {self.field}")
            if m.n != self.n:
                raise ValueError(f"size mismatch: {m.n} vs {self.n}")
        n = self.n
        datas = [m.data for m in mats]
        if n == 1:
            return _det_scalar(self.field, datas[0])
        total = 0.0
        for mask in range(1, 2**n):
            acc = None
            for i in range(n):
                if mask >> i & 1:
                    acc = datas[i] if acc is None else acc + datas[i]
            sign = -1.0 if (n - int(bin(mask).count("1"))) % 2 else 1.0
            total += sign * _det_scalar(self.field, acc)
        return total / math.factorial(n)


def mixed_det(mats: Sequence[HermitianMatrix]) -> float:
    """Mixed determinant of n Hermitian matrices over a common field."""
    if not mats:
        raise ValueError("need at least one matrix")
    return MixedDetForm(mats[0].field, mats[0].n)(mats)
