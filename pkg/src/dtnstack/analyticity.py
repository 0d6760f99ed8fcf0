"""Numerical surrogates for analyticity and Herglotz certification.

Analyticity cannot be proven from samples; it is *probed* with two
complementary residuals:

* the Cauchy–Riemann residual — a central-difference estimate of
  ``2 ∂f/∂conj(z)``, which vanishes to O(h²) for holomorphic ``f`` and
  reproduces the size of any conj-contamination;
* the Cauchy circle-mean residual — ``|f(z0) - mean of f on a circle|``,
  which vanishes for holomorphic ``f`` by the mean-value property (used only
  alongside the CR residual; on its own it cannot refute anything).

The certificates in this module sweep boundary operators over grids in the
open upper half-plane, recording positivity margins of ``Im`` on the
tangential coordinates together with CR residuals in frequency, material
entries, or trajectory parameters.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .dtn import DtnCertificate, DtnMap, dtn, dtn_from_tensors, gamma, lambda_map
from .exceptions import DomainError, ParameterError
from .herglotz import material_response
from .linalg import as_cmatrix, hermitian_parts
from .stack import StackSpec
from .transfer import transfer

__all__ = [
    "AnalyticityReport",
    "HerglotzCertificate",
    "PointRecord",
    "cr_residual",
    "cauchy_residual",
    "omega_grid_points",
    "certify_point",
    "herglotz_certify",
    "slice_analyticity",
    "scalar_sample",
    "phase_tensors",
]


def default_cr_step(z0: complex) -> float:
    """Default stencil step ``1e-4 * max(1, |z0|)``."""
    return 1e-4 * max(1.0, abs(complex(z0)))


def _stencil_residual(fp, fm, fip, fim, h: float):
    """CR residual from the four stencil values (array-valued allowed)."""
    deriv = (np.asarray(fp) - np.asarray(fm)) / (2.0 * h) \
        + 1j * (np.asarray(fip) - np.asarray(fim)) / (2.0 * h)
    scale = np.maximum.reduce([np.abs(np.asarray(v)) for v in (fp, fm, fip, fim)])
    return np.abs(deriv) / np.maximum(scale, 1.0)


def cr_residual(fn: Callable[[complex], complex], z0, h: float | None = None) -> float:
    """Cauchy–Riemann residual of ``fn`` at ``z0``.

    ``|(f(z0+h)-f(z0-h))/(2h) + i (f(z0+ih)-f(z0-ih))/(2h)| / scale`` with
    ``scale = max(|f| over the stencil, 1)``. Approximates ``2|∂f/∂conj(z)|``
    — ~0 for holomorphic maps, ``2|c|`` for ``f = g + c·conj(z)``.
    """
    z0 = complex(z0)
    if h is None:
        h = default_cr_step(z0)
    if not (h > 0):
        raise ParameterError(f"stencil step must be > 0, got {h}")
    vals = [complex(fn(z0 + d)) for d in (h, -h, 1j * h, -1j * h)]
    return float(_stencil_residual(*vals, h))


def cauchy_residual(fn: Callable[[complex], complex], z0, radius: float,
                    n_points: int = 64) -> float:
    """Circle mean-value residual ``|f(z0) - mean_{|w-z0|=r} f(w)| / scale``.

    Zero (to quadrature accuracy) when ``fn`` is holomorphic on the closed
    disc. A small value alone proves nothing — always pair it with
    :func:`cr_residual`.
    """
    z0 = complex(z0)
    if not (radius > 0):
        raise ParameterError(f"radius must be > 0, got {radius}")
    if n_points < 4:
        raise ParameterError(f"need at least 4 circle points, got {n_points}")
    theta = 2.0 * np.pi * np.arange(n_points) / n_points
    ring = np.mean([complex(fn(z0 + radius * np.exp(1j * t))) for t in theta])
    center = complex(fn(z0))
    return float(abs(center - ring) / max(abs(center), 1.0))


def scalar_sample(L: DtnMap, f) -> complex:
    """Quadratic boundary sample ``(Lambda f, f)`` for tangential ``f``.

    Uses the standard inner product (conjugation on the second argument), so
    the value is ``conj(f)·(Lambda f)`` and its imaginary part equals the
    quadratic form of ``Im Lambda`` at ``f`` — positive for passive media.
    """
    fv = np.asarray(f, dtype=complex).reshape(6)
    norm = float(np.linalg.norm(fv))
    if norm == 0.0:
        raise ParameterError("sample vector must be nonzero")
    if max(abs(fv[2]), abs(fv[5])) > 1e-13 * norm:
        raise ParameterError("sample vector must be tangential "
                             "(components 3 and 6 zero)")
    return complex(np.vdot(fv, L.matrix @ fv))


def omega_grid_points(re_min: float, re_max: float, re_steps: int,
                      im_min: float, im_max: float, im_steps: int) -> list[complex]:
    """Rectangular frequency grid, sorted by (Re, Im)."""
    if re_steps < 1 or im_steps < 1:
        raise ParameterError("grid must be nonempty (steps >= 1)")
    if re_max < re_min or im_max < im_min:
        raise ParameterError("grid bounds must be ordered")
    res = np.linspace(re_min, re_max, re_steps)
    ims = np.linspace(im_min, im_max, im_steps)
    return [complex(r, i) for r in res for i in ims]


def _compression_at(stack: StackSpec, kappa, omega, z0: float, z1: float) -> np.ndarray:
    """Tangential compression of the boundary operator, no certificates."""
    T = transfer(stack, kappa, omega, z0, z1)
    return lambda_map(gamma(T), z0, z1).tangential_compression


class PointRecord(NamedTuple):
    """One grid point of a certification sweep."""

    omega: complex
    min_im_eig: float
    worst_cr: float
    condition_T12: float
    compression: np.ndarray


def certify_point(stack: StackSpec, kappa, omega, z0: float | None = None,
                  z1: float | None = None,
                  step: float | None = None) -> tuple[PointRecord, DtnCertificate]:
    """Boundary-operator certificate at one frequency.

    Records the smallest eigenvalue of ``Im`` of the tangential compression,
    the worst CR residual in frequency over the compression entries (shared
    4-point stencil, kept inside the upper half-plane), and the condition
    estimate of the pivotal transfer block.
    """
    w = complex(omega)
    z0 = stack.z_min if z0 is None else float(z0)
    z1 = stack.z_max if z1 is None else float(z1)
    L, cert = dtn(stack, kappa, w, z0, z1)
    h = default_cr_step(w) if step is None else float(step)
    h = min(h, 0.5 * w.imag)
    stencil = [_compression_at(stack, kappa, w + d, z0, z1)
               for d in (h, -h, 1j * h, -1j * h)]
    res = _stencil_residual(*stencil, h)
    record = PointRecord(w, cert.im_min_eig, float(np.max(res)),
                         cert.well_defined.condition_T12,
                         L.tangential_compression)
    return record, cert


@dataclass(frozen=True)
class HerglotzCertificate:
    """Grid certificate for the frequency-Herglotz behavior of the operator."""

    grid: tuple[complex, ...]
    min_im_eig: float
    worst_cr: float
    passed: bool
    points: tuple[PointRecord, ...]
    anomalies: tuple[str, ...]


def _certify_one(stack: StackSpec, kappa, z0, z1, step, omega):
    """Top-level worker so grid points can be farmed out to processes."""
    return certify_point(stack, kappa, omega, z0, z1, step=step)


def herglotz_certify(stack: StackSpec, kappa, grid: Sequence[complex],
                     z0: float | None = None, z1: float | None = None,
                     cr_tol: float = 1e-5, map_fn=None,
                     step: float | None = None) -> HerglotzCertificate:
    """Certify positivity and analyticity margins over a frequency grid.

    The verdict passes iff every grid point has a strictly positive smallest
    eigenvalue of ``Im`` on the tangential compression, every CR residual is
    below ``cr_tol``, all layers are passive at every point, and no
    theorem-contradicting anomaly was recorded. ``map_fn`` may supply a
    parallel ``map`` (e.g. from an executor); results do not depend on it.
    ``step`` overrides the per-point default CR stencil width.
    """
    if not grid:
        raise ParameterError("grid must be nonempty")
    worker = partial(_certify_one, stack, kappa, z0, z1, step)
    pairs = list((map_fn or map)(worker, [complex(w) for w in grid]))
    points, anomalies = [], []
    all_passive = True
    for record, cert in pairs:
        points.append(record)
        all_passive = all_passive and cert.passive
        anomalies.extend(cert.anomalies)
    min_im = min(p.min_im_eig for p in points)
    worst_cr = max(p.worst_cr for p in points)
    passed = bool(all_passive and min_im > 0.0 and worst_cr < cr_tol
                  and not anomalies)
    return HerglotzCertificate(tuple(complex(w) for w in grid), float(min_im),
                               float(worst_cr), passed, tuple(points),
                               tuple(anomalies))


@dataclass(frozen=True)
class AnalyticityReport:
    """CR residual of one analytic slice."""

    label: str
    point: complex
    step: float
    residual: float


def phase_tensors(stack: StackSpec, omega) -> tuple[list[str], list[int], list[np.ndarray]]:
    """Distinct materials (by label), per-layer phase index, and the tensor
    tuple ``(omega*eps per phase..., omega*mu per phase...)`` at ``omega``."""
    labels: list[str] = []
    phase_of_layer: list[int] = []
    for ly in stack.layers:
        if ly.material.label not in labels:
            labels.append(ly.material.label)
        phase_of_layer.append(labels.index(ly.material.label))
    tensors: list[np.ndarray] = [None] * (2 * len(labels))
    for j, ly in enumerate(stack.layers):
        p = phase_of_layer[j]
        if tensors[p] is None:
            we, wm = material_response(ly.material, omega)
            tensors[p] = we
            tensors[len(labels) + p] = wm
    return labels, phase_of_layer, tensors


def slice_analyticity(stack: StackSpec, omega, kappa, tensor_index: int,
                      row: int, col: int, base_Z: Sequence | None = None,
                      entry: tuple[int, int] = (0, 0),
                      step: float = 1e-4) -> AnalyticityReport:
    """Probe analyticity of the boundary operator in one tensor entry.

    The material tensors of the stack's distinct phases are listed as
    ``Z = (omega*eps_1, ..., omega*eps_P, omega*mu_1, ..., omega*mu_P)``
    (resolved at ``omega`` unless ``base_Z`` overrides them). The slice
    varies ``Z[tensor_index]`` along the Hermitian direction(s) attached to
    entry ``(row, col)`` — the diagonal unit for ``row == col``, otherwise
    the mirrored pair ``(E_rc + E_cr)/√2`` and ``i(E_rc - E_cr)/√2`` so that
    the Hermitian/anti-Hermitian split moves consistently — and reports the
    worst CR residual of the watched operator entry at slice parameter 0.

    Raises
    ------
    DomainError
        If a base tensor's imaginary part is not positive definite, or the
        step is so large the perturbed imaginary part loses definiteness.
    """
    labels, phase_of_layer, resolved = phase_tensors(stack, omega)
    P = len(labels)
    Z = [as_cmatrix(M, f"Z[{i}]", shape=(3, 3))
         for i, M in enumerate(base_Z)] if base_Z is not None else resolved
    if len(Z) != 2 * P:
        raise ParameterError(f"base_Z must list {2 * P} tensors, got {len(Z)}")
    if not 0 <= tensor_index < 2 * P:
        raise ParameterError(f"tensor_index out of range [0, {2 * P})")
    if not (0 <= row < 3 and 0 <= col < 3):
        raise ParameterError("row/col must index a 3×3 tensor")
    for i, M in enumerate(Z):
        if np.linalg.eigvalsh(hermitian_parts(M).imag)[0] <= 0.0:
            raise DomainError(f"Im Z[{i}] must be positive definite at the base point")

    if row == col:
        D = np.zeros((3, 3), dtype=complex)
        D[row, col] = 1.0
        directions = [D]
    else:
        Ds = np.zeros((3, 3), dtype=complex)
        Ds[row, col] = Ds[col, row] = 1.0 / np.sqrt(2.0)
        Da = np.zeros((3, 3), dtype=complex)
        Da[row, col] = 1j / np.sqrt(2.0)
        Da[col, row] = -1j / np.sqrt(2.0)
        directions = [Ds, Da]

    h = float(step)
    if not h > 0:
        raise ParameterError(f"step must be > 0, got {step}")
    base = Z[tensor_index]
    im_base = hermitian_parts(base).imag
    for D in directions:
        for sgn in (1.0, -1.0):
            shifted = im_base + sgn * h * D  # D Hermitian: Im(t D) = Im(t)·D
            if np.linalg.eigvalsh(shifted)[0] <= 0.0:
                raise DomainError(
                    f"step {h} pushes Im Z[{tensor_index}] out of positive "
                    f"definiteness; decrease the step")

    thicknesses = [ly.thickness for ly in stack.layers]
    i_entry, j_entry = entry

    def lam_entry(t: complex, D: np.ndarray) -> complex:
        Zt = list(Z)
        Zt[tensor_index] = base + t * D
        layer_tensors = [(thicknesses[j], Zt[phase_of_layer[j]],
                          Zt[P + phase_of_layer[j]])
                         for j in range(len(thicknesses))]
        L, _ = dtn_from_tensors(layer_tensors, kappa, stack.c, stack.z_min)
        return complex(L.matrix[i_entry, j_entry])

    worst = 0.0
    for D in directions:
        worst = max(worst, cr_residual(lambda t: lam_entry(t, D), 0.0, h))
    what = "eps" if tensor_index < P else "mu"
    phase = labels[tensor_index % P]
    return AnalyticityReport(
        label=f"{what}[{phase}] entry ({row},{col}) -> Lambda[{i_entry},{j_entry}]",
        point=complex(omega), step=h, residual=float(worst))
