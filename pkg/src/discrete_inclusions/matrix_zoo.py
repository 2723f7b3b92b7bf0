"""Structured SPD matrices of difference operators and their spectra.

All constructors return an :class:`SpdMatrix`, whose construction runs a
Cholesky factorization and refuses anything that is not symmetric positive
definite.  Eigenvalues come from a cyclic Jacobi iteration (round-robin
ordering, so each step rotates ``T // 2`` disjoint pairs at once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AdmissibilityViolation,
    ConvergenceFailure,
    DimensionMismatch,
    InvalidSign,
    NotPositiveDefinite,
    OutOfRange,
)

__all__ = [
    "SpdMatrix",
    "Spectrum",
    "GridShape",
    "build_tridiagonal",
    "build_second_order",
    "build_fourth_order",
    "build_grid_laplacian",
    "grid_index",
    "grid_index_inverse",
    "spectrum",
    "jacobi_eigenvalues",
    "tridiagonal_eigenvalue",
    "ones_quadratic",
    "quadratic_form",
]


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """Dense symmetric positive definite matrix.

    ``entries`` is copied into a read-only float64 array.  Symmetry is
    required bit-for-bit; positive definiteness is checked by Cholesky.
    """

    entries: np.ndarray
    order: int = field(init=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise NotPositiveDefinite("matrix is not exactly symmetric")
        try:
            np.linalg.cholesky(a)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite("Cholesky factorization failed") from exc
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "order", a.shape[0])

    def __eq__(self, other):
        if not isinstance(other, SpdMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def tolist(self):
        return self.entries.tolist()


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple

    @property
    def lambda_min(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda_max(self) -> float:
        return self.eigenvalues[-1]


@dataclass(frozen=True)
class GridShape:
    m: int
    n: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 1 or self.n < 1:
            raise OutOfRange(f"grid shape must be positive integers, got ({self.m}, {self.n})")

    @property
    def size(self) -> int:
        return self.m * self.n


def _check_order(T, minimum=1):
    if int(T) != T or T < minimum:
        raise OutOfRange(f"order must be an integer >= {minimum}, got {T}")
    return int(T)


def _banded(T, stencil):
    """Symmetric Toeplitz matrix from ``stencil = (diag, off1, off2, ...)``, truncated at the edges."""
    a = np.zeros((T, T))
    for offset, value in enumerate(stencil):
        if offset >= T:
            break
        idx = np.arange(T - offset)
        a[idx, idx + offset] = value
        a[idx + offset, idx] = value
    return a


def build_tridiagonal(T: int, a: float, b: float) -> SpdMatrix:
    """T_T(a, b, a) with ``a < 0 < b`` and ``cos(pi/(T+1)) < -b/(2a)``."""
    T = _check_order(T, 2)
    if not a < 0:
        raise InvalidSign(f"off-diagonal a must be negative, got {a}")
    if not b > 0:
        raise InvalidSign(f"diagonal b must be positive, got {b}")
    if not math.cos(math.pi / (T + 1)) < -b / (2 * a):
        raise AdmissibilityViolation(
            f"cos(pi/{T + 1}) = {math.cos(math.pi / (T + 1)):.6g} is not < -b/(2a) = {-b / (2 * a):.6g}"
        )
    return SpdMatrix(_banded(T, (b, a)))


def build_second_order(T: int) -> SpdMatrix:
    T = _check_order(T)
    return SpdMatrix(_banded(T, (2.0, -1.0)))


def build_fourth_order(T: int) -> SpdMatrix:
    # rows keep the (1, -4, 6, -4, 1) entries whose columns fall inside [1, T]
    T = _check_order(T)
    return SpdMatrix(_banded(T, (6.0, -4.0, 1.0)))


def grid_index(i: int, j: int, shape: GridShape) -> int:
    """1-based flattening ``i + m (j - 1)`` of cell (i, j)."""
    if not (1 <= i <= shape.m and 1 <= j <= shape.n):
        raise OutOfRange(f"cell ({i}, {j}) outside {shape.m}x{shape.n} grid")
    return i + shape.m * (j - 1)


def grid_index_inverse(k: int, shape: GridShape) -> tuple:
    if not 1 <= k <= shape.size:
        raise OutOfRange(f"index {k} outside 1..{shape.size}")
    j, i = divmod(k - 1, shape.m)
    return i + 1, j + 1


def build_grid_laplacian(shape: GridShape) -> SpdMatrix:
    """Five-point Dirichlet Laplacian on an m x n grid, flattened by :func:`grid_index`."""
    m, n = shape.m, shape.n
    size = m * n
    a = 4.0 * np.eye(size)
    for k in range(1, size + 1):
        i, j = grid_index_inverse(k, shape)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, j + dj
            if 1 <= ii <= m and 1 <= jj <= n:
                a[k - 1, grid_index(ii, jj, shape) - 1] = -1.0
    return SpdMatrix(a)


def _round_robin(T):
    """Pairings for one cyclic sweep: T-1 rounds (T even) of disjoint pairs covering all (p, q)."""
    players = list(range(T)) + ([-1] if T % 2 else [])
    n = len(players)
    rounds = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        rounds.append((np.array([p for p, _ in pairs], dtype=int), np.array([q for _, q in pairs], dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigenvalues(a, rel_tol=1e-14, max_sweeps=100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Sweeps until the off-diagonal Frobenius norm drops below
    ``rel_tol * ||a||_F``.  Raises :class:`ConvergenceFailure` after
    ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=float, copy=True)
    T = a.shape[0]
    if T == 1:
        return a.diagonal().copy()
    target = rel_tol * np.linalg.norm(a)
    rounds = _round_robin(T)

    def off_norm(m):
        return np.linalg.norm(m - np.diag(m.diagonal()))

    for _ in range(max_sweeps):
        if off_norm(a) <= target:
            return np.sort(a.diagonal())
        for P, Q in rounds:
            apq = a[P, Q]
            active = apq != 0.0
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            tau = (a[Q, Q] - a[P, P]) / (2.0 * apq)
            # hypot avoids overflow of tau**2 when apq is tiny
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = a[P, :].copy(), a[Q, :].copy()
            a[P, :] = c[:, None] * rp - s[:, None] * rq
            a[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, P].copy(), a[:, Q].copy()
            a[:, P] = cp * c - cq * s
            a[:, Q] = cp * s + cq * c
            a[P, Q] = 0.0
            a[Q, P] = 0.0
    if off_norm(a) <= target:
        return np.sort(a.diagonal())
    raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps")


def spectrum(A) -> Spectrum:
    entries = A.entries if isinstance(A, SpdMatrix) else np.asarray(A, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {entries.shape}")
    if not np.array_equal(entries, entries.T):
        raise DimensionMismatch("spectrum() needs a symmetric matrix")
    return Spectrum(tuple(float(x) for x in jacobi_eigenvalues(entries)))


def tridiagonal_eigenvalue(k: int, T: int, a: float, b: float) -> float:
    """k-th smallest eigenvalue of T_T(a, b, a): ``b + 2a cos(k pi / (T+1))``.

    With ``a < 0`` the expression grows with k, so k = 1 is the smallest.
    """
    if not a < 0:
        raise InvalidSign(f"off-diagonal a must be negative, got {a}")
    if not b > 0:
        raise InvalidSign(f"diagonal b must be positive, got {b}")
    if not 1 <= k <= T:
        raise OutOfRange(f"eigenvalue index {k} outside 1..{T}")
    return b + 2.0 * a * math.cos(k * math.pi / (T + 1))


def ones_quadratic(A: SpdMatrix) -> float:
    """Sum of all entries, i.e. trace(A) + 2 * sum_{i<j} a_ij = 1^T A 1."""
    return float(math.fsum(A.entries.ravel()))


def quadratic_form(A: SpdMatrix, u) -> float:
    u = np.asarray(u, dtype=float)
    if u.shape != (A.order,):
        raise DimensionMismatch(f"vector of shape {u.shape} does not match order {A.order}")
    return float(u @ (A.entries @ u))
