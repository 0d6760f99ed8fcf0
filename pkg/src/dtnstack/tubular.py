"""Hermitian coordinates, the positive-semidefinite cone, and trajectories.

The space of N×N Hermitian matrices is identified with ``R^{N²}`` through the
isometry ``phi`` (``Tr(AB) = phi(A)·phi(B)``); matrices with positive-definite
imaginary part form the tube ``R^{N²} + i·(interior PSD cone)`` in these
coordinates. The PSD cone is closed, convex, acute, and self-dual — probed
numerically here by sampling.

Trajectories: any tensor ``L`` with ``Im L > 0`` is the ``s = i`` point of the
curve ``L'(s) = L0 - (A + sB)^{-1}`` with ``A = Re (L0-L)^{-1}`` and
``B = Im (L0-L)^{-1} > 0``; the curve maps the open upper half-plane into the
tube, so scalar boundary samples composed with it inherit the Herglotz
property, which :func:`herglotz_along_trajectory` certifies on a grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .analyticity import cr_residual, default_cr_step, scalar_sample
from .dtn import DtnMap
from .exceptions import ContractError, DomainError, ParameterError, SingularMatrixError
from .linalg import as_cmatrix, hermitian_parts, solve

__all__ = [
    "phi",
    "phi_inv",
    "basis",
    "cone_member",
    "self_duality_check",
    "ConeMembership",
    "SelfDualityReport",
    "TrajectorySpec",
    "trajectory_coeffs",
    "trajectory_point",
    "trajectory_roundtrip",
    "herglotz_along_trajectory",
    "TrajectoryCertificate",
]

_HERM_RTOL = 1e-12


def _require_hermitian(M, name: str = "matrix") -> np.ndarray:
    A = as_cmatrix(M, name, square=True)
    scale = max(float(np.linalg.norm(A)), 1.0)
    if np.linalg.norm(A - A.conj().T) > _HERM_RTOL * scale:
        raise ContractError(f"{name} must be Hermitian")
    return (A + A.conj().T) / 2.0


def _upper_pairs(n: int):
    return [(k, l) for k in range(n) for l in range(k + 1, n)]


def phi(A) -> np.ndarray:
    """Coordinates of a Hermitian matrix: diagonal, then ``√2·Re`` and
    ``√2·Im`` of the upper triangle (row-major)."""
    H = _require_hermitian(A, "A")
    n = H.shape[0]
    pairs = _upper_pairs(n)
    return np.concatenate([
        np.diag(H).real,
        [np.sqrt(2.0) * H[k, l].real for k, l in pairs],
        [np.sqrt(2.0) * H[k, l].imag for k, l in pairs],
    ])


def phi_inv(x) -> np.ndarray:
    """Inverse of :func:`phi`; the input length must be a perfect square."""
    v = np.asarray(x, dtype=float).reshape(-1)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ParameterError(f"coordinate length {v.size} is not a perfect square")
    H = np.zeros((n, n), dtype=complex)
    H[np.diag_indices(n)] = v[:n]
    pairs = _upper_pairs(n)
    m = len(pairs)
    for idx, (k, l) in enumerate(pairs):
        val = (v[n + idx] + 1j * v[n + m + idx]) / np.sqrt(2.0)
        H[k, l] = val
        H[l, k] = np.conj(val)
    return H


def basis(n: int) -> np.ndarray:
    """Orthonormal Hermitian basis matching the :func:`phi` coordinates.

    Order: ``E_kk`` for each diagonal, then ``(E_kl + E_lk)/√2`` and
    ``i(E_kl - E_lk)/√2`` over the upper triangle row-major. ``phi`` maps
    each element to the corresponding one-hot vector.
    """
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    out = np.zeros((n * n, n, n), dtype=complex)
    for k in range(n):
        out[k, k, k] = 1.0
    pairs = _upper_pairs(n)
    m = len(pairs)
    for idx, (k, l) in enumerate(pairs):
        out[n + idx, k, l] = out[n + idx, l, k] = 1.0 / np.sqrt(2.0)
        out[n + m + idx, k, l] = 1j / np.sqrt(2.0)
        out[n + m + idx, l, k] = -1j / np.sqrt(2.0)
    return out


class ConeMembership(NamedTuple):
    """PSD-cone membership verdicts with the eigenvalue margin."""

    in_closed: bool
    in_interior: bool
    margin: float


def cone_member(H, tol: float = 0.0) -> ConeMembership:
    """Membership of a Hermitian matrix in the PSD cone.

    ``in_closed`` iff the smallest eigenvalue is ``>= -tol``; ``in_interior``
    iff it is ``> tol``. The margin is the smallest eigenvalue itself.
    """
    A = _require_hermitian(H, "H")
    margin = float(np.linalg.eigvalsh(A)[0])
    return ConeMembership(margin >= -tol, margin > tol, margin)


class SelfDualityReport(NamedTuple):
    """Sampling evidence for self-duality of the PSD cone."""

    consistent: bool
    min_pairing: float
    witness: np.ndarray | None


def self_duality_check(H, n_samples: int = 200, seed: int = 0,
                       tol: float = 1e-12) -> SelfDualityReport:
    """Probe ``H ⪰ 0  ⟺  Tr(H B) ≥ 0 for all B ⪰ 0`` by sampling.

    For ``H`` in the cone: pairs against random PSD samples and reports the
    smallest pairing (consistency requires it above ``-tol`` relative).
    For ``H`` outside: returns the rank-one eigenvector witness ``v v*`` with
    ``Tr(H v v*) < 0``, confirming the dual separation.
    """
    A = _require_hermitian(H, "H")
    n = A.shape[0]
    eigs, vecs = np.linalg.eigh(A)
    scale = max(float(np.max(np.abs(eigs))), 1.0)
    if eigs[0] >= -tol * scale:
        rng = np.random.default_rng(seed)
        worst = np.inf
        for _ in range(int(n_samples)):
            G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            B = G.conj().T @ G
            B /= max(np.trace(B).real, 1.0)
            worst = min(worst, float(np.trace(A @ B).real))
        return SelfDualityReport(worst >= -tol * scale, worst, None)
    v = vecs[:, 0]
    witness = np.outer(v, v.conj())
    pairing = float(np.trace(A @ witness).real)
    return SelfDualityReport(pairing < 0.0, pairing, witness)


@dataclass(frozen=True)
class TrajectorySpec:
    """Base point and per-tensor coefficients of a tube trajectory."""

    L0: np.ndarray
    coeffs: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        L0 = _require_hermitian(self.L0, "L0")
        if np.linalg.norm(L0.imag) > _HERM_RTOL * max(np.linalg.norm(L0), 1.0):
            raise ContractError("L0 must be real symmetric")
        object.__setattr__(self, "L0", L0.real.astype(float))
        object.__setattr__(self, "coeffs", tuple(
            (np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))
            for A, B in self.coeffs))


def trajectory_coeffs(L0, tensors: Sequence) -> TrajectorySpec:
    """Coefficients ``(A_j, B_j)`` reproducing each tensor at ``s = i``.

    ``A_j = Re (L0 - L_j)^{-1}`` and ``B_j = Im (L0 - L_j)^{-1}``; the domain
    requires ``Im L_j`` positive definite, which forces ``B_j`` positive
    definite.
    """
    L0 = _require_hermitian(L0, "L0").real
    pairs = []
    for j, L in enumerate(tensors):
        Lj = as_cmatrix(L, f"tensors[{j}]", square=True)
        if Lj.shape != L0.shape:
            raise ParameterError(f"tensors[{j}] shape {Lj.shape} does not match "
                                 f"L0 shape {L0.shape}")
        im = hermitian_parts(Lj).imag
        if np.linalg.eigvalsh(im)[0] <= 0.0:
            raise DomainError(f"Im of tensors[{j}] must be positive definite")
        G = solve(L0 - Lj, np.eye(L0.shape[0], dtype=complex))
        A, B = hermitian_parts(G)
        if np.linalg.eigvalsh(B)[0] <= 0.0:
            raise ContractError(
                f"coefficient B[{j}] lost positive definiteness numerically")
        pairs.append((A, B))
    return TrajectorySpec(L0, tuple(pairs))


def trajectory_point(spec: TrajectorySpec, s) -> tuple[np.ndarray, ...]:
    """Tensors ``L'_j(s) = L0 - (A_j + s B_j)^{-1}`` at ``Im s > 0``."""
    sc = complex(s)
    if sc.imag <= 0.0:
        raise DomainError(f"trajectory parameter must satisfy Im s > 0, got {sc}")
    out = []
    eye = np.eye(spec.L0.shape[0], dtype=complex)
    for j, (A, B) in enumerate(spec.coeffs):
        try:
            inv = solve(A + sc * B, eye)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                f"anomaly: A + sB singular at Im s > 0 for tensor {j} "
                f"(contradicts B > 0): {exc}", condition=exc.condition) from exc
        out.append(spec.L0.astype(complex) - inv)
    return tuple(out)


def trajectory_roundtrip(L0, tensors: Sequence) -> float:
    """Worst relative deviation of the ``s = i`` reconstruction.

    Builds coefficients from the tensors and evaluates the trajectory at
    ``s = i``, which must reproduce the inputs; returns
    ``max_j ||L'_j(i) - L_j|| / max(1, ||L_j||)``.
    """
    spec = trajectory_coeffs(L0, tensors)
    back = trajectory_point(spec, 1j)
    worst = 0.0
    for L, R in zip(tensors, back):
        L = np.asarray(L, dtype=complex)
        dev = np.linalg.norm(R - L) / max(1.0, np.linalg.norm(L))
        worst = max(worst, float(dev))
    return worst


class TrajectoryCertificate(NamedTuple):
    """Herglotz evidence for a scalar boundary sample along a trajectory."""

    grid: tuple[complex, ...]
    min_im: float
    worst_cr: float
    passed: bool
    values: tuple[complex, ...]


def herglotz_along_trajectory(builder: Callable[[Sequence[np.ndarray]], DtnMap],
                              spec: TrajectorySpec, f, s_grid: Sequence[complex],
                              cr_tol: float = 1e-5) -> TrajectoryCertificate:
    """Certify that ``s -> (Lambda(Z(s)) f, f)`` behaves as a Herglotz map.

    Parameters
    ----------
    builder : callable
        Maps the tuple of trajectory tensors to a boundary operator
        (typically wrapping the tensor-route pipeline with fixed geometry,
        wavevector, and constant).
    spec : TrajectorySpec
    f : array_like
        Tangential 6-vector sample direction.
    s_grid : sequence of complex
        Evaluation points in the open upper half-plane.
    cr_tol : float
        CR-residual threshold for the verdict.
    """
    if not len(s_grid):
        raise ParameterError("s_grid must be nonempty")

    def h_f(s: complex) -> complex:
        return scalar_sample(builder(trajectory_point(spec, s)), f)

    values, residuals = [], []
    for s in s_grid:
        sc = complex(s)
        values.append(h_f(sc))
        h = min(default_cr_step(sc), 0.5 * sc.imag)
        residuals.append(cr_residual(h_f, sc, h))
    min_im = min(v.imag for v in values)
    worst_cr = max(residuals)
    passed = bool(min_im > 0.0 and worst_cr < cr_tol)
    return TrajectoryCertificate(tuple(complex(s) for s in s_grid), float(min_im),
                                 float(worst_cr), passed, tuple(values))
