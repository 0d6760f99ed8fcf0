"""Tangential-field transfer matrices for layered anisotropic media.

The tangential field ``psi = (E1, E2, H1, H2)`` of a time-harmonic wave with
in-plane wavevector ``kappa = (k1, k2)`` satisfies the linear ODE
``psi' = i J A(z) psi`` along the stacking axis, where ``J`` is the constant
flux matrix below and ``A(z)`` is built pointwise from the material response
tensors. Over a homogeneous layer the propagator is a single matrix
exponential, and the transfer matrix of any interval is the ordered product
of layer propagators (later layers multiply on the left).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, GeometryError, NumericRangeError, SingularMatrixError
from .herglotz import MaterialSpec, ResponseModel
from .linalg import as_cmatrix, mat_exp, solve, split_blocks
from .stack import StackSpec, locate

__all__ = [
    "RHO",
    "J",
    "TransferMatrix",
    "eval_response",
    "resolve_layers",
    "build_A",
    "normal_components",
    "layer_propagator",
    "transfer",
    "transfer_from_tensors",
    "field_profile",
]

#: 2×2 rotation generator; RHO* = -RHO = RHO^{-1}
RHO = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)

#: 4×4 flux matrix [[0, RHO], [RHO*, 0]]; Hermitian, J @ J = I
J = np.block([[np.zeros((2, 2)), RHO], [RHO.conj().T, np.zeros((2, 2))]]).astype(complex)


def eval_response(model: ResponseModel, z) -> np.ndarray:
    """Evaluate a response model anywhere its formula is finite.

    Unlike the certification-facing evaluator (which insists on ``Im z > 0``),
    propagation is defined for any frequency where the layer responses exist,
    e.g. on the real axis away from poles.
    """
    val = model._eval(complex(z))
    if not np.all(np.isfinite(val.view(float))):
        raise DomainError(f"model response is not finite at z={complex(z)}")
    return val


def resolve_layers(stack: StackSpec, omega) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Evaluate every layer's ``(thickness, omega*eps, omega*mu)`` at ``omega``."""
    out = []
    for ly in stack.layers:
        we = eval_response(ly.material.eps_model, omega)
        wm = eval_response(ly.material.mu_model, omega)
        out.append((ly.thickness, we, wm))
    return out


def _v_blocks(omega_eps: np.ndarray, omega_mu: np.ndarray, kappa, c: float):
    """The four blocks of the first-order system, eliminated form inputs."""
    k1, k2 = complex(kappa[0]), complex(kappa[1])
    we, wm = omega_eps, omega_mu
    Vpp = np.zeros((4, 4), dtype=complex)
    Vpp[:2, :2] = we[:2, :2] / c
    Vpp[2:, 2:] = wm[:2, :2] / c

    Vpo = np.zeros((4, 2), dtype=complex)
    Vpo[0, 0] = we[0, 2] / c
    Vpo[1, 0] = we[1, 2] / c
    Vpo[2, 1] = wm[0, 2] / c
    Vpo[3, 1] = wm[1, 2] / c
    Vpo += np.array([[0.0, k2], [0.0, -k1], [-k2, 0.0], [k1, 0.0]])

    Vop = np.zeros((2, 4), dtype=complex)
    Vop[0, 0] = we[2, 0] / c
    Vop[0, 1] = we[2, 1] / c
    Vop[1, 2] = wm[2, 0] / c
    Vop[1, 3] = wm[2, 1] / c
    Vop += np.array([[0.0, 0.0, -k2, k1], [k2, -k1, 0.0, 0.0]])

    voo = np.array([we[2, 2] / c, wm[2, 2] / c])  # diagonal of the normal block
    return Vpp, Vpo, Vop, voo


def _check_normal_block(voo: np.ndarray):
    if np.min(np.abs(voo)) == 0.0:
        raise SingularMatrixError(
            "normal response block is singular (omega*eps_33 or omega*mu_33 vanishes)")


def build_A(omega_eps, omega_mu, kappa, c: float = 1.0) -> np.ndarray:
    """System matrix of the tangential ODE ``psi' = i J A psi``.

    Parameters
    ----------
    omega_eps, omega_mu : array_like
        Response tensors ``omega*eps(omega)`` and ``omega*mu(omega)``, 3×3.
    kappa : sequence of two scalars
        In-plane wavevector; complex values are accepted.
    c : float
        Speed-of-light constant (default 1).

    Returns
    -------
    numpy.ndarray
        The 4×4 matrix ``A = Vpp - Vpo Voo^{-1} Vop`` after eliminating the
        normal field components.
    """
    we = as_cmatrix(omega_eps, "omega_eps", shape=(3, 3))
    wm = as_cmatrix(omega_mu, "omega_mu", shape=(3, 3))
    Vpp, Vpo, Vop, voo = _v_blocks(we, wm, kappa, float(c))
    _check_normal_block(voo)
    return Vpp - (Vpo / voo[np.newaxis, :]) @ Vop


def normal_components(omega_eps, omega_mu, kappa, psi, c: float = 1.0) -> np.ndarray:
    """Normal components ``phi = (E3, H3)`` induced by tangential data ``psi``.

    ``phi = -Voo^{-1} Vop psi`` with the same block conventions as
    :func:`build_A`.
    """
    we = as_cmatrix(omega_eps, "omega_eps", shape=(3, 3))
    wm = as_cmatrix(omega_mu, "omega_mu", shape=(3, 3))
    psi = np.asarray(psi, dtype=complex).reshape(4)
    _, _, Vop, voo = _v_blocks(we, wm, kappa, float(c))
    _check_normal_block(voo)
    return -(Vop @ psi) / voo


def layer_propagator(A, dz: float) -> np.ndarray:
    """Propagator ``exp(i J A dz)`` across a homogeneous slab of width ``dz``."""
    A = as_cmatrix(A, "A", shape=(4, 4))
    return mat_exp(1j * (J @ A) * float(dz))


@dataclass(frozen=True)
class TransferMatrix:
    """Transfer matrix ``T`` with ``psi(z1) = T psi(z0)``."""

    z0: float
    z1: float
    matrix: np.ndarray

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """2×2 blocks ``(T11, T12, T21, T22)`` splitting (E1,E2) ⊕ (H1,H2)."""
        return split_blocks(self.matrix)


def _segment_table(stack: StackSpec, omega, kappa) -> list[tuple[float, float, np.ndarray]]:
    """Per-layer ``(z_left, thickness, A)`` table at fixed frequency."""
    b = stack.boundaries
    table = []
    for j, (t, we, wm) in enumerate(resolve_layers(stack, omega)):
        table.append((float(b[j]), t, build_A(we, wm, kappa, stack.c)))
    return table


def _ordered_product(table, a: float, z: float) -> np.ndarray:
    """``T(a, z)`` for ``a <= z`` as the left-ordered propagator product."""
    T = np.eye(4, dtype=complex)
    for z_left, t, A in table:
        z_right = z_left + t
        lo, hi = max(a, z_left), min(z, z_right)
        if hi > lo:
            T = layer_propagator(A, hi - lo) @ T
    return T


def transfer(stack: StackSpec, kappa, omega, z0: float, z1: float) -> TransferMatrix:
    """Transfer matrix of the stack between two coordinates.

    Satisfies ``T(z0, z0) = I``, the composition rule
    ``T(z0, z) = T(zm, z) T(z0, zm)``, and ``T(z0, z1)^{-1} = T(z1, z0)``.
    Both real and complex ``omega``/``kappa`` are accepted; certification
    pipelines impose their stricter domains separately.
    """
    for name, z in (("z0", z0), ("z1", z1)):
        if not (stack.z_min <= z <= stack.z_max):
            raise GeometryError(
                f"{name}={z} outside the stack [{stack.z_min}, {stack.z_max}]")
    table = _segment_table(stack, omega, kappa)
    a, b = (z0, z1) if z0 <= z1 else (z1, z0)
    T = _ordered_product(table, a, b)
    if z0 > z1:
        T = solve(T, np.eye(4, dtype=complex))
    if not np.all(np.isfinite(T.view(float))):
        raise NumericRangeError("transfer matrix overflowed")
    return TransferMatrix(float(z0), float(z1), T)


def transfer_from_tensors(layer_tensors, kappa, c: float = 1.0,
                          z_min: float = 0.0) -> TransferMatrix:
    """Transfer matrix across explicitly resolved layers.

    Parameters
    ----------
    layer_tensors : sequence of (thickness, omega_eps, omega_mu)
        Already-evaluated response tensors per layer, bottom to top.
    kappa : sequence of two scalars
    c : float
    z_min : float
        Coordinate of the bottom face (affects only the stored endpoints).

    Returns
    -------
    TransferMatrix
        ``T(z_min, z_max)`` across the whole resolved stack.
    """
    T = np.eye(4, dtype=complex)
    z = float(z_min)
    for t, we, wm in layer_tensors:
        if t <= 0:
            raise GeometryError(f"layer thickness must be > 0, got {t}")
        A = build_A(we, wm, kappa, c)
        T = layer_propagator(A, t) @ T
        z += float(t)
    return TransferMatrix(float(z_min), z, T)


def field_profile(stack: StackSpec, psi0, kappa, omega, zs,
                  z_ref: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Propagate tangential data through the stack and sample the fields.

    Parameters
    ----------
    stack : StackSpec
    psi0 : array_like
        Tangential data ``(E1, E2, H1, H2)`` prescribed at ``z_ref``.
    kappa, omega :
        In-plane wavevector and frequency.
    zs : array_like
        Sample coordinates inside the stack (any order).
    z_ref : float, optional
        Anchor coordinate for ``psi0`` (default: the bottom face).

    Returns
    -------
    (psi, phi) : numpy.ndarray
        Arrays of shape (n, 4) and (n, 2): the tangential field
        ``psi(z) = T(z_ref, z) psi0`` and the normal components recovered
        from the tensors of the layer owning each sample point.
    """
    psi0 = np.asarray(psi0, dtype=complex).reshape(4)
    z_ref = stack.z_min if z_ref is None else float(z_ref)
    if not (stack.z_min <= z_ref <= stack.z_max):
        raise GeometryError(f"z_ref={z_ref} outside the stack")
    zs = np.atleast_1d(np.asarray(zs, dtype=float))

    resolved = resolve_layers(stack, omega)
    table = _segment_table(stack, omega, kappa)
    b = stack.boundaries

    # prefix transfer matrices from z_ref to each layer's left face
    prefixes: list[np.ndarray] = []
    for j in range(len(stack.layers)):
        zl = float(b[j])
        if zl >= z_ref:
            G = _ordered_product(table, z_ref, zl)
        else:
            G = solve(_ordered_product(table, zl, z_ref), np.eye(4, dtype=complex))
        prefixes.append(G)

    psi_out = np.zeros((zs.size, 4), dtype=complex)
    phi_out = np.zeros((zs.size, 2), dtype=complex)
    for i, z in enumerate(zs):
        j, offset = locate(stack, float(z))
        _, _, A = table[j]
        Tz = layer_propagator(A, offset) @ prefixes[j]
        psi = Tz @ psi0
        _, we, wm = resolved[j]
        psi_out[i] = psi
        phi_out[i] = normal_components(we, wm, kappa, psi, stack.c)
    return psi_out, phi_out
