"""Quadratic forms of point arrays: construction, spectra, coordinate realizations.

For an n-point array with distances d and a chosen base point, the form W on
R^(n-1) is fixed by W(v_i - v_j) = d(i, j)^2 over the simplex-vertex basis
v_1..v_{n-1} (standard basis) and v_n = 0 (the base point).  Its matrix is

    B[i][j] = (d(i, base)^2 + d(j, base)^2 - d(i, j)^2) / 2.

The signature of W decides embeddability: no negative eigenvalue gives a
Euclidean realization; exactly one gives a realization in signed coordinates
with a single timelike axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotPSD, TooManyNegativeEigenvalues, WrongSignature
from .metric import FiniteMetricSpace

#: Eigenvalues with |l| <= ZERO_REL_TOL * max(1, spectral radius) classify as zero.
ZERO_REL_TOL = 1e-9

#: Sweep cap for the cyclic rotation eigensolver.
MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """Symmetric matrix of the form in the simplex-vertex basis with v_base = 0."""

    matrix: np.ndarray
    base_index: int
    point_indices: tuple[int, ...]  # ascending original indices, base excluded

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Full spectral data of a form: descending eigenvalues and orthonormal frame."""

    eigenvalues: np.ndarray  # descending
    frame: np.ndarray  # columns are eigenvectors matching ``eigenvalues``
    signature: tuple[int, int, int]  # (n_pos, n_zero, n_neg)
    zero_tol: float


@dataclass(frozen=True, eq=False)
class MinkowskiEmbedding:
    """Point coordinates realizing all squared distances under a signed sum.

    ``metric_signs[k]`` in {+1, 0, -1} weighs axis k:
    sum_k signs[k] * (x_i[k] - x_j[k])^2 = d(i, j)^2.  At most one -1 sign;
    ``time_axis`` is its index (None in the nonnegative case).  Axes with sign
    0 carry no length.
    """

    coords: np.ndarray  # (n, out_dim)
    metric_signs: tuple[int, ...]
    time_axis: int | None
    base_index: int

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def out_dim(self) -> int:
        return self.coords.shape[1]


def associated_form(space: FiniteMetricSpace, base_index: int | None = None) -> QuadraticForm:
    """Build the form of a point array over the given base point (default: last index)."""
    n = space.n
    if base_index is None:
        base_index = n - 1
    if not 0 <= base_index < n:
        raise ValueError(f"base_index {base_index} out of range for n={n}")
    idx = [i for i in range(n) if i != base_index]
    d = space.d
    r2 = d[idx, base_index] ** 2
    b = 0.5 * (r2[:, None] + r2[None, :] - d[np.ix_(idx, idx)] ** 2)
    b = 0.5 * (b + b.T)
    b.flags.writeable = False
    return QuadraticForm(b, base_index, tuple(idx))


def jacobi_eigh(matrix, *, max_sweeps: int = MAX_SWEEPS):
    """Diagonalize a small dense symmetric matrix by cyclic plane rotations.

    Self-contained (no library eigensolver).  Returns (eigenvalues, frame)
    unsorted; columns of ``frame`` are orthonormal eigenvectors.

    Raises
    ------
    NoConvergence
        If the off-diagonal mass has not vanished after ``max_sweeps`` sweeps.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), v

    scale = max(1.0, float(np.abs(a).max()))
    off_tol = 1e-14 * scale
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off <= off_tol:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # Two-sided rotation J^T A J on columns then rows p, q.
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
    if off <= off_tol:
        return np.diag(a).copy(), v
    raise NoConvergence(f"off-diagonal mass {off:.3e} after {max_sweeps} sweeps")


def eigendecompose(
    form: QuadraticForm, *, zero_rel_tol: float = ZERO_REL_TOL, max_sweeps: int = MAX_SWEEPS
) -> Spectrum:
    """Spectral decomposition of a form with eigenvalues sorted descending."""
    if form.dim > 15:
        raise ValueError(f"dimension {form.dim} exceeds the supported cap of 15")
    w, v = jacobi_eigh(form.matrix, max_sweeps=max_sweeps)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    zero_tol = zero_rel_tol * max(1.0, float(np.abs(w).max()) if w.size else 1.0)
    n_pos = int(np.sum(w > zero_tol))
    n_neg = int(np.sum(w < -zero_tol))
    n_zero = int(w.size) - n_pos - n_neg
    w.flags.writeable = False
    v.flags.writeable = False
    return Spectrum(w, v, (n_pos, n_zero, n_neg), zero_tol)


def is_euclidean(spectrum: Spectrum) -> bool:
    """True iff the form has no negative eigenvalue (Euclidean-realizable array)."""
    return spectrum.signature[2] == 0


def _classify_signs(spectrum: Spectrum) -> list[int]:
    signs = []
    for lam in spectrum.eigenvalues:
        if lam > spectrum.zero_tol:
            signs.append(1)
        elif lam < -spectrum.zero_tol:
            signs.append(-1)
        else:
            signs.append(0)
    return signs


def _assemble(spectrum: Spectrum, form: QuadraticForm, kernel_scale) -> MinkowskiEmbedding:
    dim = form.dim
    out_dim = max(4, dim)
    signs = _classify_signs(spectrum)
    scales = np.array(
        [math.sqrt(abs(l)) if s != 0 else kernel_scale for l, s in zip(spectrum.eigenvalues, signs)]
    )
    n = dim + 1
    coords = np.zeros((n, out_dim))
    rows = spectrum.frame * scales[None, :]  # row i realizes basis vector v_i
    for r, orig in enumerate(form.point_indices):
        coords[orig, :dim] = rows[r]
    signs_out = tuple(signs + [0] * (out_dim - dim))
    time_axis = signs_out.index(-1) if -1 in signs_out else None
    coords.flags.writeable = False
    return MinkowskiEmbedding(coords, signs_out, time_axis, form.base_index)


def euclidean_embedding(spectrum: Spectrum, form: QuadraticForm) -> MinkowskiEmbedding:
    """Coordinates in Euclidean space realizing all distances (base point at the origin).

    Axes of zero eigenvalue are emitted as zero coordinates, so plain Euclidean
    distances between the rows equal the input distances.
    """
    if spectrum.signature[2] != 0:
        raise NotPSD(f"form has {spectrum.signature[2]} negative eigenvalues")
    return _assemble(spectrum, form, kernel_scale=0.0)


def minkowski_embedding(spectrum: Spectrum, form: QuadraticForm) -> MinkowskiEmbedding:
    """Signed-coordinate realization for a form with exactly one negative eigenvalue.

    Kernel directions are kept as explicit sign-0 axes.  Their coordinates are
    taken from the unscaled eigenframe: they carry no length but keep the n
    points affinely independent, so downstream projections and facet geometry
    stay nondegenerate when the form has low rank.
    """
    n_neg = spectrum.signature[2]
    if n_neg == 0:
        raise WrongSignature("form is positive semidefinite; use euclidean_embedding")
    if n_neg > 1:
        raise TooManyNegativeEigenvalues(n_neg)
    return _assemble(spectrum, form, kernel_scale=1.0)


def form_value(emb: MinkowskiEmbedding, v) -> float:
    """Signed square length sum(signs[k] * v[k]^2) of a coordinate vector."""
    v = np.asarray(v, dtype=float)
    if v.shape != (emb.out_dim,):
        raise ValueError(f"expected a vector of length {emb.out_dim}, got {v.shape}")
    return float(np.dot(np.asarray(emb.metric_signs, dtype=float), v * v))


def pair_form_values(emb: MinkowskiEmbedding) -> np.ndarray:
    """Matrix of signed square lengths of all coordinate differences."""
    diff = emb.coords[:, None, :] - emb.coords[None, :, :]
    return np.einsum("ijk,k->ij", diff * diff, np.asarray(emb.metric_signs, dtype=float))
