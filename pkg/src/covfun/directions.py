"""Deterministic direction grids on the unit circle and sphere."""

import numpy as np


def circle_directions(n, offset=0.0):
    """``n`` equally spaced unit vectors in the plane."""
    angles = offset + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(angles), np.sin(angles)])


def fibonacci_sphere(n):
    """``n`` nearly uniform unit vectors on the 2-sphere (golden-angle spiral)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def direction_grid(dim, n):
    if dim == 2:
        return circle_directions(n)
    if dim == 3:
        return fibonacci_sphere(n)
    raise ValueError("only dimensions 2 and 3 are supported")


def default_grid_size(dim):
    """Grid sizes used for smooth-body measurements (2**14 in the plane, 1e5 in space)."""
    return 2 ** 14 if dim == 2 else 100_000


def random_directions(rng, dim, n):
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
