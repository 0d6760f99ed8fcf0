"""Frequency-response models for passive materials.

A passive material is described by the maps ``z -> z·eps(z)`` and
``z -> z·mu(z)`` on the open upper half-plane; passivity means both take
values with positive-definite imaginary part there. Three model variants
share one evaluation interface:

* :class:`HerglotzModel` — discrete pole/weight representation
  ``h(z) = alpha·z + beta + sum_k W_k [(p_k - z)^{-1} - p_k/(1 + p_k^2)]``
  with ``alpha >= 0`` and ``W_k >= 0`` Hermitian, ``beta`` Hermitian and
  ``p_k`` real;
* :class:`DrudeModel` — the collision-damped free-carrier response
  ``z - wp^2/(z + i·gamma)`` times the identity, kept in closed form;
* :class:`ConstantModel` — a frequency-independent tensor ``V`` with
  response ``z·V``.

All evaluations are gated to ``Im z > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .exceptions import ContractError, DomainError, ParameterError
from .linalg import as_cmatrix, hermitian_parts

__all__ = [
    "HerglotzModel",
    "DrudeModel",
    "ConstantModel",
    "ResponseModel",
    "MaterialSpec",
    "PassivityCertificate",
    "eval_herglotz",
    "make_drude",
    "make_constant",
    "vacuum_material",
    "material_response",
    "passivity_check",
]

_PSD_RTOL = 1e-12


def _require_hermitian(M, name: str) -> np.ndarray:
    A = as_cmatrix(M, name, square=True)
    scale = max(float(np.linalg.norm(A)), 1.0)
    if np.linalg.norm(A - A.conj().T) > _PSD_RTOL * scale:
        raise ContractError(f"{name} must be Hermitian")
    return (A + A.conj().T) / 2.0


def _require_psd(M, name: str) -> np.ndarray:
    A = _require_hermitian(M, name)
    eigs = np.linalg.eigvalsh(A)
    scale = max(float(np.max(np.abs(eigs))) if eigs.size else 0.0, 1.0)
    if eigs.size and eigs[0] < -_PSD_RTOL * scale:
        raise ContractError(f"{name} must be positive semidefinite "
                            f"(min eigenvalue {eigs[0]:.3e})")
    return A


@dataclass(frozen=True)
class HerglotzModel:
    """Discrete matrix-valued model on the upper half-plane.

    Parameters
    ----------
    dim : int
        Matrix dimension (1 for scalar responses, 3 for material tensors).
    alpha : array_like
        Linear coefficient, Hermitian positive semidefinite, shape (dim, dim).
    beta : array_like
        Constant term, Hermitian.
    poles : array_like
        Real pole locations, shape (K,). May be empty.
    weights : array_like
        Hermitian PSD residue weights, shape (K, dim, dim).
    """

    dim: int
    alpha: np.ndarray
    beta: np.ndarray
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros((0, 1, 1)))

    kind = "herglotz_discrete"

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ParameterError(f"dim must be >= 1, got {self.dim}")
        d = int(self.dim)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "alpha",
                           _require_psd(as_cmatrix(self.alpha, "alpha", shape=(d, d)),
                                        "alpha"))
        object.__setattr__(self, "beta",
                           _require_hermitian(as_cmatrix(self.beta, "beta", shape=(d, d)),
                                              "beta"))
        poles = np.asarray(self.poles, dtype=float).reshape(-1)
        if not np.all(np.isfinite(poles)):
            raise ParameterError("poles must be finite real numbers")
        object.__setattr__(self, "poles", poles)
        W = np.asarray(self.weights, dtype=complex)
        if poles.size == 0:
            W = np.zeros((0, d, d), dtype=complex)
        if W.shape != (poles.size, d, d):
            raise ParameterError(
                f"weights must have shape {(poles.size, d, d)}, got {W.shape}")
        W = np.stack([_require_psd(W[k], f"weights[{k}]") for k in range(W.shape[0])]) \
            if W.shape[0] else W
        object.__setattr__(self, "weights", W)

    def _eval(self, z: complex) -> np.ndarray:
        h = self.alpha * z + self.beta.astype(complex)
        for p, W in zip(self.poles, self.weights):
            h = h + W * (1.0 / (p - z) - p / (1.0 + p * p))
        return h


@dataclass(frozen=True)
class DrudeModel:
    """Free-carrier response ``z - wp^2 / (z + i·gamma)`` on the diagonal."""

    plasma_freq: float
    collision_rate: float
    dim: int = 1

    kind = "drude"

    def __post_init__(self):
        if self.plasma_freq < 0:
            raise ParameterError("plasma_freq must be >= 0")
        if self.collision_rate < 0:
            raise ParameterError("collision_rate must be >= 0")
        if int(self.dim) < 1:
            raise ParameterError(f"dim must be >= 1, got {self.dim}")

    def _eval(self, z: complex) -> np.ndarray:
        wp2 = self.plasma_freq ** 2
        val = z - wp2 / (z + 1j * self.collision_rate)
        return val * np.eye(self.dim, dtype=complex)


@dataclass(frozen=True)
class ConstantModel:
    """Frequency-independent tensor ``V``; the response is ``z·V``.

    Passive on all of the upper half-plane exactly when ``V`` is Hermitian
    positive definite (checked at evaluation sites, not at construction,
    since non-passive constants are legitimate inputs for failure probes).
    """

    value: np.ndarray
    kind = "constant"

    def __post_init__(self):
        V = as_cmatrix(self.value, "value", square=True)
        object.__setattr__(self, "value", V)

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def _eval(self, z: complex) -> np.ndarray:
        return z * self.value


ResponseModel = Union[HerglotzModel, DrudeModel, ConstantModel]


def eval_herglotz(model: ResponseModel, z) -> np.ndarray:
    """Evaluate a response model at a point of the open upper half-plane.

    Parameters
    ----------
    model : HerglotzModel or DrudeModel or ConstantModel
    z : complex
        Evaluation point with ``Im z > 0``.

    Returns
    -------
    numpy.ndarray
        The (dim, dim) response value.

    Raises
    ------
    DomainError
        If ``Im z <= 0``.
    """
    zc = complex(z)
    if zc.imag <= 0.0:
        raise DomainError(f"evaluation point must satisfy Im z > 0, got z={zc}")
    return model._eval(zc)


def make_drude(plasma_freq: float, collision_rate: float, dim: int = 1) -> DrudeModel:
    """Scalar (or isotropic) Drude response ``z -> z - wp^2/(z + i·gamma)``."""
    return DrudeModel(float(plasma_freq), float(collision_rate), int(dim))


def make_constant(value) -> ConstantModel:
    """Frequency-independent tensor model with response ``z·value``."""
    return ConstantModel(np.asarray(value, dtype=complex))


@dataclass(frozen=True)
class MaterialSpec:
    """Electric and magnetic response models of one material, both 3×3."""

    label: str
    eps_model: ResponseModel
    mu_model: ResponseModel

    def __post_init__(self):
        for name, m in (("eps_model", self.eps_model), ("mu_model", self.mu_model)):
            if m.dim != 3:
                raise ParameterError(f"{name} must have dim 3, got {m.dim}")


def vacuum_material(label: str = "vacuum") -> MaterialSpec:
    """Material with identity permittivity and permeability tensors."""
    eye = np.eye(3, dtype=complex)
    return MaterialSpec(label, make_constant(eye), make_constant(eye))


def material_response(material: MaterialSpec, omega) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``(omega·eps, omega·mu)`` of a material at frequency ``omega``."""
    return (eval_herglotz(material.eps_model, omega),
            eval_herglotz(material.mu_model, omega))


class PassivityCertificate(NamedTuple):
    """Smallest eigenvalues of the imaginary parts of the two responses."""

    ok: bool
    min_eig_eps: float
    min_eig_mu: float


def passivity_check(omega_eps, omega_mu, tol: float = 0.0) -> PassivityCertificate:
    """Certify positivity of ``Im(omega·eps)`` and ``Im(omega·mu)``.

    Parameters
    ----------
    omega_eps, omega_mu : array_like
        Response tensors at one frequency, shape (3, 3).
    tol : float
        Positivity margin both smallest eigenvalues must exceed.

    Returns
    -------
    PassivityCertificate
    """
    im_e = hermitian_parts(as_cmatrix(omega_eps, "omega_eps", shape=(3, 3))).imag
    im_m = hermitian_parts(as_cmatrix(omega_mu, "omega_mu", shape=(3, 3))).imag
    min_e = float(np.linalg.eigvalsh(im_e)[0])
    min_m = float(np.linalg.eigvalsh(im_m)[0])
    return PassivityCertificate(bool(min_e > tol and min_m > tol), min_e, min_m)
