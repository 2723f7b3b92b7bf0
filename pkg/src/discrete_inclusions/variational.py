"""Energy functional of the inclusion and the residual that certifies solutions.

For ``Au in lam * alpha_k [g_k-(u_k), g_k+(u_k)]`` the energy is

    J(u) = u^T A u / 2 - lam * sum_k alpha_k G_k(u_k),

and a point is a solution exactly when ``0`` lies in the generalized
gradient ``Au - lam * alpha * [g-, g+]`` componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, InvalidSign
from .matrix_zoo import SpdMatrix
from .nonlinearity import PiecewiseNonlinearity, WeightVector

__all__ = [
    "InclusionProblem",
    "CertifiedSolution",
    "phi",
    "psi",
    "j_lambda",
    "gradient_box",
    "residual",
    "residual_components",
    "is_solution",
    "descent_direction",
    "certify",
]

KINDS = ("trivial", "local_min", "saddle_candidate", "unclassified")


@dataclass(frozen=True, eq=False)
class InclusionProblem:
    matrix: SpdMatrix
    nonlinearities: tuple
    lam: float
    weights: Optional[WeightVector] = None
    _groups: tuple = field(default=(), init=False, repr=False)

    def __post_init__(self):
        gs = tuple(self.nonlinearities)
        if len(gs) != self.matrix.order:
            raise DimensionMismatch(f"{len(gs)} nonlinearities for a matrix of order {self.matrix.order}")
        if not all(isinstance(g, PiecewiseNonlinearity) for g in gs):
            raise TypeError("nonlinearities must be PiecewiseNonlinearity instances")
        if not self.lam > 0:
            raise InvalidSign(f"lambda must be positive, got {self.lam}")
        weights = self.weights if self.weights is not None else WeightVector.ones(len(gs))
        if len(weights) != len(gs):
            raise DimensionMismatch(f"{len(weights)} weights for {len(gs)} components")
        # components sharing one nonlinearity object are evaluated together
        groups = {}
        for k, g in enumerate(gs):
            groups.setdefault(id(g), (g, []))[1].append(k)
        object.__setattr__(self, "nonlinearities", gs)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "_groups", tuple((g, np.array(ks)) for g, ks in groups.values()))

    @property
    def order(self) -> int:
        return self.matrix.order

    @property
    def alpha(self) -> np.ndarray:
        return np.asarray(self.weights.alpha)

    def with_lambda(self, lam: float) -> "InclusionProblem":
        return InclusionProblem(self.matrix, self.nonlinearities, lam, self.weights)

    def check(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.order,):
            raise DimensionMismatch(f"vector of shape {u.shape} does not match order {self.order}")
        return u

    def _apply(self, method, u):
        # works for a single vector or a batch of shape (N, T)
        out = np.empty(np.shape(u))
        for g, ks in self._groups:
            out[..., ks] = getattr(g, method)(u[..., ks])
        return out

    def g(self, u):
        return self._apply("eval", u)

    def g_prime(self, u):
        return self._apply("derivative", u)

    def potentials(self, u):
        return self._apply("potential", u)

    def envelopes(self, u):
        lo, hi = np.empty(np.shape(u)), np.empty(np.shape(u))
        for g, ks in self._groups:
            lo[..., ks], hi[..., ks] = g.envelopes(u[..., ks])
        return lo, hi

    def batch_energy(self, U) -> np.ndarray:
        """J at each row of ``U``."""
        U = np.asarray(U, dtype=float)
        quad = np.einsum("ij,ij->i", U @ self.matrix.entries, U) / 2.0
        return quad - self.lam * (self.potentials(U) @ self.alpha)

    def batch_direction(self, U) -> np.ndarray:
        """Minimum-norm generalized gradient at each row of ``U``."""
        U = np.asarray(U, dtype=float)
        au = U @ self.matrix.entries
        lo, hi = self.envelopes(U)
        scale = self.lam * self.alpha
        return au - np.clip(au, scale * lo, scale * hi)


@dataclass(frozen=True)
class CertifiedSolution:
    u: tuple
    residual: float
    energy: float
    kind: str = "unclassified"
    route: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "trivial" and any(x != 0.0 for x in self.u):
            raise ValueError("a trivial solution must be the zero vector")

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.u)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.u))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u))) if self.u else 0.0

    def to_dict(self):
        return {
            "u": list(self.u),
            "residual": self.residual,
            "energy": self.energy,
            "kind": self.kind,
            "route": self.route,
        }


def phi(p: InclusionProblem, u) -> float:
    u = p.check(u)
    return float(u @ (p.matrix.entries @ u)) / 2.0


def psi(p: InclusionProblem, u) -> float:
    u = p.check(u)
    return float(p.alpha @ p.potentials(u))


def j_lambda(p: InclusionProblem, u) -> float:
    return phi(p, u) - p.lam * psi(p, u)


def gradient_box(p: InclusionProblem, u) -> list:
    """Per-component intervals ``lam * alpha_k * [g_k-(u_k), g_k+(u_k)]``."""
    u = p.check(u)
    lo, hi = p.envelopes(u)
    scale = p.lam * p.alpha
    return [(float(a), float(b)) for a, b in zip(scale * lo, scale * hi)]


def _box_arrays(p, u):
    lo, hi = p.envelopes(u)
    scale = p.lam * p.alpha
    return scale * lo, scale * hi


def descent_direction(p: InclusionProblem, u) -> np.ndarray:
    """``Au - lam * s`` with ``s`` the element of the envelope box closest to ``Au / lam``.

    This is the minimum-norm element of the generalized gradient of J.
    """
    u = p.check(u)
    au = p.matrix.entries @ u
    lo, hi = _box_arrays(p, u)
    return au - np.clip(au, lo, hi)


def residual_components(p: InclusionProblem, u) -> np.ndarray:
    return np.abs(descent_direction(p, u))


def residual(p: InclusionProblem, u) -> float:
    """Max over k of the distance from ``(Au)_k`` to its envelope box."""
    return float(np.max(residual_components(p, u)))


def is_solution(p: InclusionProblem, u, tol: float = 1e-8) -> bool:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return residual(p, u) <= tol


def certify(p: InclusionProblem, u, kind: str = "unclassified", route: str = "") -> CertifiedSolution:
    u = p.check(u)
    if not np.any(u):
        kind = "trivial"
        u = np.zeros_like(u)
    return CertifiedSolution(
        u=tuple(float(x) for x in u),
        residual=residual(p, u),
        energy=j_lambda(p, u),
        kind=kind,
        route=route,
    )
