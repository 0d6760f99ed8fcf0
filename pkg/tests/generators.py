"""Random generators for passive materials, stacks, and probe parameters."""
import numpy as np

from dtnstack import (
    ConstantModel,
    HerglotzModel,
    Layer,
    MaterialSpec,
    StackSpec,
    make_drude,
    vacuum_material,
)


def rand_hermitian(rng, n=3, scale=1.0):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (G + G.conj().T)


def rand_posdef(rng, n=3, shift=0.15):
    """Hermitian positive definite with eigenvalues bounded away from zero."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (G @ G.conj().T) / n + shift * np.eye(n)


def rand_constant_material(rng, label="random-constant"):
    # Hermitian positive definite tensors give Im(omega*V) = Im(omega)*V,
    # which is positive definite everywhere in the upper half plane.
    eps = ConstantModel(value=rand_posdef(rng))
    mu = ConstantModel(value=rand_posdef(rng))
    return MaterialSpec(label=label, eps_model=eps, mu_model=mu)


def rand_herglotz_model(rng, n_poles=2):
    alpha = rand_posdef(rng, shift=0.3)
    beta = rand_hermitian(rng, scale=0.4)
    poles = np.sort(rng.uniform(-3.0, 3.0, size=n_poles))
    weights = np.stack([rand_posdef(rng, shift=0.05) for _ in range(n_poles)])
    return HerglotzModel(dim=3, alpha=alpha, beta=beta,
                         poles=tuple(poles), weights=weights)


def rand_dispersive_material(rng, label="random-dispersive"):
    eps = rand_herglotz_model(rng, n_poles=int(rng.integers(1, 4)))
    mu = ConstantModel(value=rand_posdef(rng))
    return MaterialSpec(label=label, eps_model=eps, mu_model=mu)


def rand_drude_material(rng, label="random-drude"):
    wp = float(rng.uniform(0.5, 2.5))
    gamma = float(rng.uniform(0.0, 1.0))
    return MaterialSpec(label=label, eps_model=make_drude(wp, gamma, dim=3),
                        mu_model=ConstantModel(value=np.eye(3, dtype=complex)))


def rand_stack(rng, max_layers=4, dispersive=False, z_min=None):
    n = int(rng.integers(1, max_layers + 1))
    layers = []
    for k in range(n):
        d = float(rng.uniform(0.2, 1.2))
        if dispersive and rng.random() < 0.5:
            mat = rand_dispersive_material(rng, label=f"layer{k}")
        else:
            mat = rand_constant_material(rng, label=f"layer{k}")
        layers.append(Layer(thickness=d, material=mat))
    if z_min is None:
        z_min = float(rng.uniform(-1.0, 0.0))
    return StackSpec(z_min=z_min, layers=tuple(layers))


def vacuum_slab(z_min=-1.0, thickness=2.0):
    return StackSpec(z_min=z_min, layers=(
        Layer(thickness=thickness, material=vacuum_material()),))


def rand_kappa(rng):
    return tuple(rng.uniform(-2.0, 2.0, size=2))


def rand_omega(rng, im_min=0.1, im_max=2.0):
    return complex(rng.uniform(-2.0, 2.0), rng.uniform(im_min, im_max))


def rand_tangential(rng):
    """Random nonzero boundary field pair supported on tangential slots."""
    f = np.zeros(6, dtype=complex)
    for i in (0, 1, 3, 4):
        f[i] = rng.standard_normal() + 1j * rng.standard_normal()
    return f
